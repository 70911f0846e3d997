#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "panelkit/dataset.hpp"
#include "panelkit/errors.hpp"
#include "panelkit/factor.hpp"
#include "panelkit/hausman.hpp"
#include "panelkit/panel.hpp"
#include "panelkit/report.hpp"
#include "panelkit/simulate.hpp"

namespace {

using panelkit::ErrorCode;
using panelkit::PanelDataset;
using panelkit::ToolkitError;

struct DataArgs {
    std::string data;
    std::string sample;
    std::string wide;
    std::string entity_col;
    std::string time_col;
};

struct OutputArgs {
    std::string format = "text";
    std::string out = "stdout";
};

void add_data_options(CLI::App& cmd, DataArgs& args) {
    auto* data = cmd.add_option("--data", args.data, "Input CSV path");
    auto* sample = cmd.add_option("--sample", args.sample, "Name of a built-in sample dataset");
    data->excludes(sample);
    cmd.add_option("--wide", args.wide,
                   "Treat --data as a wide CSV (rows = entities, columns = periods) holding "
                   "the named variable");
    cmd.add_option("--entity", args.entity_col, "Entity column name in a long CSV");
    cmd.add_option("--time", args.time_col, "Time column name in a long CSV");
}

void add_output_options(CLI::App& cmd, OutputArgs& args) {
    cmd.add_option("--format", args.format, "Output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    cmd.add_option("--out", args.out, "Output path, or 'stdout'")->capture_default_str();
}

PanelDataset load_data(const DataArgs& args) {
    if (!args.sample.empty()) return panelkit::embedded_sample(args.sample);
    if (args.data.empty()) {
        throw CLI::ValidationError("either --data or --sample is required");
    }
    if (!args.wide.empty()) return panelkit::load_wide_csv(args.data, args.wide);
    return panelkit::load_long_csv(args.data, args.entity_col, args.time_col);
}

std::string available_variables(const PanelDataset& data) {
    std::string out;
    for (const auto& name : data.variable_names()) {
        if (!out.empty()) out += ", ";
        out += name;
    }
    return out;
}

// Unknown variable names are usage errors: diagnose before estimation starts.
void require_variables(const PanelDataset& data, const std::vector<std::string>& names) {
    for (const auto& name : names) {
        if (!data.has_variable(name)) {
            std::ostringstream msg;
            msg << "unknown variable '" << name << "'; available variables: "
                << available_variables(data);
            throw ToolkitError(ErrorCode::BadSelection, msg.str());
        }
    }
}

void emit(const panelkit::ReportDocument& doc, const OutputArgs& args) {
    const std::string text =
        args.format == "json" ? panelkit::to_json_string(doc) : panelkit::to_text(doc);
    if (args.out == "stdout" || args.out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream file(args.out, std::ios::binary);
    if (!file) {
        throw ToolkitError(ErrorCode::IoError, "cannot open output file: " + args.out);
    }
    file << text;
}

int exit_code_for(const ToolkitError& err) {
    switch (err.code()) {
        case ErrorCode::BadSelection:
        case ErrorCode::UnknownSample:
        case ErrorCode::InvalidDgp:
            return 2;
        default:
            return 1;
    }
}

struct FitArgs {
    DataArgs data;
    OutputArgs output;
    std::string dep;
    std::vector<std::string> regressors;
    std::string effects = "none";
    std::string weights = "none";
};

int run_fit(const FitArgs& args) {
    PanelDataset data = load_data(args.data);
    std::vector<std::string> wanted = args.regressors;
    wanted.insert(wanted.begin(), args.dep);
    require_variables(data, wanted);
    panelkit::VariableSelection sel{args.dep, args.regressors};

    panelkit::PanelFit fit;
    if (args.effects == "none") {
        if (args.weights != "none") {
            throw ToolkitError(ErrorCode::BadSelection,
                               "--weights cross-section requires --effects fixed");
        }
        fit = panelkit::fit_pooled(data, sel);
    } else if (args.effects == "fixed") {
        const auto weighting = args.weights == "cross-section"
                                   ? panelkit::PanelWeighting::CrossSection
                                   : panelkit::PanelWeighting::None;
        fit = panelkit::fit_fixed_effects(data, sel, weighting);
    } else {
        if (args.weights != "none") {
            throw ToolkitError(ErrorCode::BadSelection,
                               "--weights cross-section requires --effects fixed");
        }
        fit = panelkit::fit_random_effects(data, sel);
    }
    emit(panelkit::build_fit_report(fit), args.output);
    return 0;
}

struct HausmanArgs {
    DataArgs data;
    OutputArgs output;
    std::string dep;
    std::vector<std::string> regressors;
};

int run_hausman(const HausmanArgs& args) {
    PanelDataset data = load_data(args.data);
    std::vector<std::string> wanted = args.regressors;
    wanted.insert(wanted.begin(), args.dep);
    require_variables(data, wanted);
    panelkit::VariableSelection sel{args.dep, args.regressors};
    panelkit::HausmanResult result = panelkit::hausman(data, sel);
    emit(panelkit::build_hausman_report(result), args.output);
    return 0;
}

struct FactorArgs {
    std::string data;
    std::string sample;
    OutputArgs output;
    std::vector<std::string> vars;
    std::string retain = "kaiser";
    std::string rotate = "varimax";
    bool kaiser_normalize = true;
    double suppress = 0.10;
    double loading_cutoff = 0.60;
};

// Factor analysis reads a plain observation x variable table; a built-in
// panel sample is flattened entity-major first.
Eigen::MatrixXd load_factor_matrix(const FactorArgs& args) {
    if (!args.sample.empty()) {
        PanelDataset data = panelkit::embedded_sample(args.sample);
        require_variables(data, args.vars);
        return panelkit::observation_matrix(data, args.vars);
    }
    if (args.data.empty()) {
        throw CLI::ValidationError("either --data or --sample is required");
    }
    panelkit::TableData table = panelkit::load_table_csv(args.data);
    Eigen::MatrixXd out(table.values.rows(), static_cast<long>(args.vars.size()));
    for (std::size_t j = 0; j < args.vars.size(); ++j) {
        const auto it = std::find(table.columns.begin(), table.columns.end(), args.vars[j]);
        if (it == table.columns.end()) {
            std::string available;
            for (const auto& name : table.columns) {
                if (!available.empty()) available += ", ";
                available += name;
            }
            throw ToolkitError(ErrorCode::BadSelection, "unknown variable '" + args.vars[j] +
                                                            "'; available variables: " +
                                                            available);
        }
        out.col(static_cast<long>(j)) =
            table.values.col(std::distance(table.columns.begin(), it));
    }
    return out;
}

int run_factor(const FactorArgs& args) {
    const Eigen::MatrixXd observations = load_factor_matrix(args);

    panelkit::FactorOptions options;
    if (args.retain == "kaiser") {
        options.retain = -1;
    } else if (args.retain.rfind("fixed:", 0) == 0) {
        try {
            options.retain = std::stol(args.retain.substr(6));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--retain fixed:<m> requires an integer m");
        }
        if (options.retain < 1) {
            throw CLI::ValidationError("--retain fixed:<m> requires m >= 1");
        }
    } else {
        throw CLI::ValidationError("--retain must be 'kaiser' or 'fixed:<m>'");
    }
    options.rotation = args.rotate == "none" ? panelkit::RotationMethod::None
                                             : panelkit::RotationMethod::Varimax;
    options.kaiser_normalize = args.kaiser_normalize;

    panelkit::CorrelationMatrix corr = panelkit::correlation_matrix(observations, args.vars);
    panelkit::FactorSolution solution =
        panelkit::summarize_solution(corr, observations.rows(), options);
    emit(panelkit::build_factor_report(solution, args.suppress, args.loading_cutoff),
         args.output);
    return 0;
}

struct SimulateArgs {
    long entities = 8;
    long periods = 12;
    std::vector<double> beta;
    double intercept = 0.0;
    double sigma_u = 0.0;
    double sigma_e = 1.0;
    std::vector<double> scales;
    std::vector<std::string> laws;
    unsigned long long seed = 0;
    std::string out;
    std::string truth;
};

panelkit::RegressorLaw parse_law(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream stream(text);
    std::string part;
    while (std::getline(stream, part, ':')) parts.push_back(part);
    try {
        if (parts.size() == 3 && parts[0] == "uniform") {
            return panelkit::RegressorLaw::uniform(std::stod(parts[1]), std::stod(parts[2]));
        }
        if (parts.size() == 3 && parts[0] == "gaussian") {
            return panelkit::RegressorLaw::gaussian(std::stod(parts[1]), std::stod(parts[2]));
        }
    } catch (const std::exception&) {
        // fall through to the shared diagnosis
    }
    throw CLI::ValidationError("--laws entries must be uniform:<a>:<b> or gaussian:<mean>:<sd>, got '" +
                               text + "'");
}

int run_simulate(const SimulateArgs& args) {
    panelkit::PanelDGP dgp;
    dgp.n_entities = args.entities;
    dgp.n_periods = args.periods;
    dgp.beta = Eigen::Map<const Eigen::VectorXd>(args.beta.data(),
                                                 static_cast<long>(args.beta.size()));
    dgp.intercept = args.intercept;
    dgp.sigma_u = args.sigma_u;
    dgp.sigma_e = args.sigma_e;
    dgp.per_entity_scale = args.scales;
    if (args.laws.empty()) {
        dgp.regressor_laws.assign(args.beta.size(), panelkit::RegressorLaw::uniform(0.0, 10.0));
    } else {
        for (const auto& law : args.laws) dgp.regressor_laws.push_back(parse_law(law));
    }
    dgp.seed = args.seed;

    panelkit::SimulatedPanel panel = panelkit::generate(dgp);
    panelkit::write_long_csv(panel.data, args.out);

    nlohmann::json truth;
    truth["schema"] = "panelkit/1";
    truth["seed"] = panel.truth.seed;
    truth["intercept"] = panel.truth.intercept;
    truth["sigma_u"] = panel.truth.sigma_u;
    truth["sigma_e"] = panel.truth.sigma_e;
    truth["beta"] = std::vector<double>(panel.truth.beta.data(),
                                        panel.truth.beta.data() + panel.truth.beta.size());
    truth["entity_effects"] =
        std::vector<double>(panel.truth.entity_effects.data(),
                            panel.truth.entity_effects.data() + panel.truth.entity_effects.size());
    truth["scales"] = panel.truth.scales;
    const std::string truth_text = truth.dump(2) + "\n";
    if (args.truth.empty()) {
        std::cerr << truth_text;
    } else {
        std::ofstream file(args.truth, std::ios::binary);
        if (!file) {
            throw ToolkitError(ErrorCode::IoError, "cannot open truth file: " + args.truth);
        }
        file << truth_text;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"panelkit: panel regression, specification tests, and factor analysis"};
    app.require_subcommand(1);

    FitArgs fit_args;
    CLI::App* fit = app.add_subcommand("fit", "Estimate a panel regression");
    add_data_options(*fit, fit_args.data);
    fit->add_option("--dep", fit_args.dep, "Dependent variable")->required();
    fit->add_option("--regressors", fit_args.regressors, "Comma-separated regressors")
        ->required()
        ->delimiter(',');
    fit->add_option("--effects", fit_args.effects, "Entity effects")
        ->check(CLI::IsMember({"none", "fixed", "random"}))
        ->capture_default_str();
    fit->add_option("--weights", fit_args.weights, "Residual weighting")
        ->check(CLI::IsMember({"none", "cross-section"}))
        ->capture_default_str();
    add_output_options(*fit, fit_args.output);

    HausmanArgs hausman_args;
    CLI::App* hausman = app.add_subcommand("hausman", "Fixed-vs-random specification test");
    add_data_options(*hausman, hausman_args.data);
    hausman->add_option("--dep", hausman_args.dep, "Dependent variable")->required();
    hausman->add_option("--regressors", hausman_args.regressors, "Comma-separated regressors")
        ->required()
        ->delimiter(',');
    add_output_options(*hausman, hausman_args.output);

    FactorArgs factor_args;
    CLI::App* factor = app.add_subcommand("factor", "Principal-component factor analysis");
    auto* factor_data = factor->add_option("--data", factor_args.data,
                                           "Input CSV: header row, numeric columns");
    auto* factor_sample =
        factor->add_option("--sample", factor_args.sample, "Name of a built-in sample dataset");
    factor_data->excludes(factor_sample);
    factor->add_option("--vars", factor_args.vars, "Comma-separated variables")
        ->required()
        ->delimiter(',');
    factor->add_option("--retain", factor_args.retain, "Retention rule: kaiser or fixed:<m>")
        ->capture_default_str();
    factor->add_option("--rotate", factor_args.rotate, "Rotation method")
        ->check(CLI::IsMember({"varimax", "none"}))
        ->capture_default_str();
    factor->add_flag("--kaiser-normalize,!--no-kaiser-normalize", factor_args.kaiser_normalize,
                     "Kaiser-normalize rows during rotation (default on)");
    factor->add_option("--suppress", factor_args.suppress,
                       "Blank loadings below this magnitude in the matrix table")
        ->capture_default_str();
    factor->add_option("--loading-cutoff", factor_args.loading_cutoff,
                       "Minimum |loading| for factor-summary membership")
        ->capture_default_str();
    add_output_options(*factor, factor_args.output);

    SimulateArgs sim_args;
    CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic balanced panel");
    simulate->add_option("--entities", sim_args.entities, "Number of entities")
        ->capture_default_str();
    simulate->add_option("--periods", sim_args.periods, "Number of periods")
        ->capture_default_str();
    simulate->add_option("--beta", sim_args.beta, "Comma-separated slope coefficients")
        ->required()
        ->delimiter(',');
    simulate->add_option("--intercept", sim_args.intercept, "Common intercept")
        ->capture_default_str();
    simulate->add_option("--sigma-u", sim_args.sigma_u, "Entity-effect standard deviation")
        ->capture_default_str();
    simulate->add_option("--sigma-e", sim_args.sigma_e, "Idiosyncratic standard deviation")
        ->capture_default_str();
    simulate->add_option("--scales", sim_args.scales,
                         "Comma-separated per-entity residual scale multipliers")
        ->delimiter(',');
    simulate->add_option("--laws", sim_args.laws,
                         "Comma-separated regressor laws (uniform:<a>:<b> or gaussian:<mean>:<sd>)")
        ->delimiter(',');
    simulate->add_option("--seed", sim_args.seed, "Random seed")->capture_default_str();
    simulate->add_option("--out", sim_args.out, "Output CSV path")->required();
    simulate->add_option("--truth", sim_args.truth,
                         "Write the truth record to this file instead of stderr");

    try {
        app.parse(argc, argv);
        if (fit->parsed()) return run_fit(fit_args);
        if (hausman->parsed()) return run_hausman(hausman_args);
        if (factor->parsed()) return run_factor(factor_args);
        if (simulate->parsed()) return run_simulate(sim_args);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ToolkitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
