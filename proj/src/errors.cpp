#include "panelkit/errors.hpp"

namespace panelkit {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingCell: return "MissingCell";
        case ErrorCode::DuplicateRow: return "DuplicateRow";
        case ErrorCode::NonNumericValue: return "NonNumericValue";
        case ErrorCode::TooSmall: return "TooSmall";
        case ErrorCode::UnknownSample: return "UnknownSample";
        case ErrorCode::BadSelection: return "BadSelection";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::TooFewObservations: return "TooFewObservations";
        case ErrorCode::DegenerateEntityVariance: return "DegenerateEntityVariance";
        case ErrorCode::NotEnoughEntities: return "NotEnoughEntities";
        case ErrorCode::WrongModel: return "WrongModel";
        case ErrorCode::ZeroVarianceColumn: return "ZeroVarianceColumn";
        case ErrorCode::SingularCorrelation: return "SingularCorrelation";
        case ErrorCode::UndefinedKMO: return "UndefinedKMO";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::ZeroCommunalityRow: return "ZeroCommunalityRow";
        case ErrorCode::NoComponentsRetained: return "NoComponentsRetained";
        case ErrorCode::InvalidDgp: return "InvalidDgp";
    }
    return "UnknownError";
}

}  // namespace panelkit
