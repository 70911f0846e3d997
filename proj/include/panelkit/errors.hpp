#pragma once

#include <stdexcept>
#include <string>

namespace panelkit {

enum class ErrorCode {
    // dataset
    MissingCell,
    DuplicateRow,
    NonNumericValue,
    TooSmall,
    UnknownSample,
    BadSelection,
    IoError,
    // least squares
    RankDeficient,
    TooFewObservations,
    // panel estimators
    DegenerateEntityVariance,
    NotEnoughEntities,
    WrongModel,
    // factor analysis
    ZeroVarianceColumn,
    SingularCorrelation,
    UndefinedKMO,
    ConvergenceFailure,
    ZeroCommunalityRow,
    NoComponentsRetained,
    // simulation
    InvalidDgp,
};

const char* error_code_name(ErrorCode code);

/// Every hard failure in the library throws this; `code()` identifies the
/// condition programmatically, what() carries the human-readable detail.
class ToolkitError : public std::runtime_error {
public:
    ToolkitError(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw ToolkitError(code, message);
}

}  // namespace panelkit
