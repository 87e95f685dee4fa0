#include "interfere/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "interfere/dataset.hpp"
#include "interfere/error.hpp"
#include "interfere/io.hpp"
#include "interfere/model.hpp"
#include "interfere/planner.hpp"
#include "interfere/regression.hpp"
#include "interfere/stressor.hpp"

namespace interfere::cli {

namespace {

using io::Json;

struct CommonOptions {
    std::string model = "paper-default";
    std::string calibration;
    std::string decimals = "none";
    std::string format = "table";
};

ScoreRounding parse_decimals(const std::string& text) {
    if (text == "none") return std::nullopt;
    if (text == "1") return 1;
    if (text == "2") return 2;
    throw Error(ErrorKind::Config, "--decimals must be 1, 2 or none");
}

std::string percent(double fraction) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << fraction * 100.0 << '%';
    return s.str();
}

std::string fixed(double value, int precision = 4) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << value;
    return s.str();
}

InterferenceModel resolve_model(const std::string& spec) {
    if (spec == "paper-default") return InterferenceModel::paper_default();
    return io::load_model(spec);
}

std::optional<CalibrationMaxima> resolve_calibration(const std::string& path) {
    if (!path.empty()) return io::load_calibration(path);
    if (const char* env = std::getenv(kCalibrationEnv); env != nullptr && *env != '\0') {
        return io::load_calibration(env);
    }
    return std::nullopt;
}

// Scores of different calibrations cannot be compared, so raw and score
// profiles may not be mixed in one invocation.
void require_consistent_units(const std::vector<ApplicationProfile>& profiles) {
    for (const ApplicationProfile& profile : profiles) {
        if (profile.units() != profiles.front().units()) {
            throw Error(ErrorKind::UnitMismatch, "profiles '" + profiles.front().label + "' and '" +
                                                     profile.label +
                                                     "' mix raw rates and scores");
        }
    }
}

ApplicationProfile to_score(const ApplicationProfile& profile,
                            const std::optional<CalibrationMaxima>& calibration,
                            ScoreRounding decimals) {
    if (profile.units() == Units::Score) return normalize_profile(profile, {1, 1, 1}, std::nullopt);
    if (!calibration) {
        throw Error(ErrorKind::Calibration, "profile '" + profile.label +
                                                "' holds raw rates; pass --calibration or set " +
                                                kCalibrationEnv);
    }
    return normalize_profile(profile, *calibration, decimals);
}

Json features_json(const FeatureRow& row) {
    return {{"t_sllc", row.accumulated.sllc}, {"t_dram", row.accumulated.dram},
            {"t_net", row.accumulated.net},   {"g_sllc", row.similarity.sllc},
            {"g_dram", row.similarity.dram},  {"g_net", row.similarity.net},
            {"t1", row.t1},                   {"t2", row.t2},
            {"t3", row.t3}};
}

std::string joined(const std::vector<std::string>& labels, const char* separator) {
    std::string out;
    for (const std::string& label : labels) {
        if (!out.empty()) out += separator;
        out += label;
    }
    return out;
}

// predict ---------------------------------------------------------------------

void print_prediction(std::ostream& out, const std::vector<ApplicationProfile>& members,
                      const InterferenceModel& model, const std::string& format) {
    const FeatureRow row = features(CoLocation(members));
    const double prediction = predict(model, row);
    const bool extrapolated = is_extrapolation(prediction);

    if (format == "json") {
        Json report;
        report["model"] = io::to_json(model);
        Json profiles = Json::array();
        for (const ApplicationProfile& member : members) profiles.push_back(io::to_json(member));
        report["members"] = profiles;
        report["features"] = features_json(row);
        report["prediction"] = prediction;
        report["extrapolation"] = extrapolated;
        out << report.dump(2) << '\n';
        return;
    }
    if (format == "csv") {
        out << "members,t_sllc,t_dram,t_net,g_sllc,g_dram,g_net,t1,t2,t3,prediction,extrapolation\n";
        const Json f = features_json(row);
        out << joined(row.labels, "+");
        for (const char* key : {"t_sllc", "t_dram", "t_net", "g_sllc", "g_dram", "g_net", "t1", "t2", "t3"}) {
            out << ',' << f.at(key).get<double>();
        }
        out << ',' << prediction << ',' << (extrapolated ? "true" : "false") << '\n';
        return;
    }
    out << "co-location: " << joined(row.labels, " x ") << '\n';
    out << "  accumulated  sllc " << fixed(row.accumulated.sllc) << "  dram "
        << fixed(row.accumulated.dram) << "  net " << fixed(row.accumulated.net) << '\n';
    out << "  similarity   sllc " << fixed(row.similarity.sllc) << "  dram "
        << fixed(row.similarity.dram) << "  net " << fixed(row.similarity.net) << '\n';
    out << "  terms        t1 " << fixed(row.t1) << "  t2 " << fixed(row.t2) << "  t3 "
        << fixed(row.t3) << '\n';
    out << "  predicted interference: " << percent(prediction);
    if (extrapolated) out << "  [extrapolation: outside 0%.." << percent(kTrainingEnvelopeMax) << "]";
    out << '\n';
}

int cmd_predict(const std::vector<std::string>& files, const std::string& report_path,
                const CommonOptions& options, std::ostream& out) {
    if (!report_path.empty()) {
        const Json report = io::read_json_file(report_path);
        std::vector<ApplicationProfile> members;
        for (const Json& member : report.at("members")) members.push_back(io::profile_from_json(member));
        print_prediction(out, members, io::model_from_json(report.at("model")), options.format);
        return 0;
    }
    if (files.size() < 2) {
        throw Error(ErrorKind::Config, "predict needs at least two profiles");
    }
    const InterferenceModel model = resolve_model(options.model);
    const auto calibration = resolve_calibration(options.calibration);
    const ScoreRounding decimals = parse_decimals(options.decimals);
    std::vector<ApplicationProfile> loaded;
    for (const std::string& file : files) loaded.push_back(io::load_profile(file));
    require_consistent_units(loaded);
    std::vector<ApplicationProfile> members;
    for (const ApplicationProfile& profile : loaded) {
        members.push_back(to_score(profile, calibration, decimals));
    }
    print_prediction(out, members, model, options.format);
    return 0;
}

// normalize -------------------------------------------------------------------

int cmd_normalize(const std::vector<std::string>& files, const CommonOptions& options,
                  std::ostream& out) {
    const auto calibration = resolve_calibration(options.calibration);
    const ScoreRounding decimals = parse_decimals(options.decimals);
    Json profiles = Json::array();
    for (const std::string& file : files) {
        const ApplicationProfile scored = to_score(io::load_profile(file), calibration, decimals);
        if (options.format == "json") {
            profiles.push_back(io::to_json(scored));
        } else {
            const ResourceVector s = application_score(scored);
            out << scored.label << "  sllc " << s.sllc << "  dram " << s.dram << "  net " << s.net
                << '\n';
        }
    }
    if (options.format == "json") out << (files.size() == 1 ? profiles[0] : profiles).dump(2) << '\n';
    return 0;
}

// fit -------------------------------------------------------------------------

int cmd_fit(const std::string& dataset_path, const std::string& model_out, double alpha,
            bool floor_negative, const CommonOptions& options, std::ostream& out) {
    const InterferenceDataset data = io::load_dataset(dataset_path);
    const InterferenceModel model = fit(data, FitOptions{floor_negative});
    if (!model_out.empty()) io::write_json_file(model_out, io::to_json(model));

    const FitDiagnostics& diag = *model.diagnostics;
    const SignificanceReport sig = significance(diag, alpha);
    std::optional<ResidualReport> residuals;
    if (diag.residuals.size() >= kMinResidualsForChecks) residuals = residual_checks(diag, alpha);

    if (options.format == "json") {
        Json report = io::to_json(model);
        report["significance"] = {{"alpha", alpha},
                                  {"regression_significant", sig.regression_significant},
                                  {"coefficient_significant", sig.coefficient_significant}};
        if (residuals) {
            Json checks = Json::array();
            for (const ResidualCheck* check :
                 {&residuals->linearity, &residuals->homoscedasticity, &residuals->normality}) {
                checks.push_back({{"name", check->name},
                                  {"statistic", check->statistic},
                                  {"p_value", check->p_value},
                                  {"passed", check->passed}});
            }
            report["residual_checks"] = checks;
        }
        out << report.dump(2) << '\n';
        return 0;
    }

    out << "model: I = " << std::setprecision(10) << model.c1 << "*T1 + " << model.c2 << "*T2 + "
        << model.c3 << "*T3\n";
    out << "rows: " << diag.n << "\n";
    out << "R2 (uncentered): " << fixed(diag.r2, 6) << "\n";
    out << "R2-adj: " << fixed(diag.r2_adj, 6) << "\n";
    out << "F: " << diag.f_statistic << "  p = " << diag.f_pvalue
        << (sig.regression_significant ? "  significant" : "  not significant") << " at alpha "
        << alpha << "\n";
    for (std::size_t j = 0; j < 3; ++j) {
        out << "c" << j + 1 << ": se " << diag.std_errors[j] << "  t " << diag.t_statistics[j]
            << "  p " << diag.t_pvalues[j]
            << (sig.coefficient_significant[j] ? "  significant" : "  not significant") << "\n";
    }
    if (residuals) {
        for (const ResidualCheck* check :
             {&residuals->linearity, &residuals->homoscedasticity, &residuals->normality}) {
            out << check->name << ": statistic " << check->statistic << "  p " << check->p_value
                << (check->passed ? "  pass" : "  FAIL") << "\n";
        }
    } else {
        out << "residual checks skipped: fewer than " << kMinResidualsForChecks << " residuals\n";
    }
    return 0;
}

// stress ----------------------------------------------------------------------

int cmd_stress(const std::string& spec_path, const std::string& preset_label, std::size_t workers,
               const std::string& transport_name, std::uint64_t cache_bytes,
               const CommonOptions& options, std::ostream& out) {
    stressor::SyntheticAppSpec spec;
    if (!spec_path.empty()) {
        Json j = io::read_json_file(spec_path);
        if (!preset_label.empty()) j["preset"] = preset_label;
        spec = io::spec_from_json(j);
    } else if (!preset_label.empty()) {
        spec = stressor::preset(preset_label);
    } else {
        throw Error(ErrorKind::Config, "stress needs --spec or --preset");
    }
    auto transport = stressor::make_transport(stressor::parse_transport(transport_name), workers);
    const stressor::StressorCounters counters = stressor::run(spec, workers, *transport);
    stressor::AttributionOptions attribution;
    attribution.cache_bytes = cache_bytes;
    const double seconds = counters.wall_seconds > 0.0 ? counters.wall_seconds : 1e-9;
    const ResourceVector rates = stressor::estimate_profile(counters, seconds, attribution);

    if (options.format == "json") {
        Json report = io::to_json(counters);
        report["spec"] = io::to_json(spec);
        report["transport"] = transport_name;
        report["estimated_rates"] = {{"sllc_mrps", rates.sllc}, {"dram_mrps", rates.dram},
                                     {"net_mbps", rates.net}};
        out << report.dump(2) << '\n';
        return 0;
    }
    out << "workers: " << counters.workers << " (" << transport_name << ")\n"
        << "element accesses: " << counters.element_accesses << "\n"
        << "sqrt evaluations: " << counters.sqrt_evaluations << "\n"
        << "bytes sent: " << counters.bytes_sent << "  received: " << counters.bytes_received << "\n"
        << "computation phase: " << fixed(counters.computation_phase_seconds) << " s\n"
        << "communication phase: " << fixed(counters.communication_phase_seconds) << " s\n"
        << "wall: " << fixed(counters.wall_seconds) << " s\n"
        << "estimated rates: sllc " << fixed(rates.sllc, 2) << " MR/s  dram " << fixed(rates.dram, 2)
        << " MR/s  net " << fixed(rates.net, 2) << " MB/s\n";
    return 0;
}

// dataset ---------------------------------------------------------------------

struct DatasetOptions {
    std::string runner = "oracle";
    std::string measurements;
    std::string output;
    std::string transport = "inproc";
    std::uint64_t seed = 0;
    double sigma = 0.0;
    std::vector<double> hidden;
};

int cmd_dataset(const std::string& plan_path, const DatasetOptions& dopts,
                const CommonOptions& options, std::ostream& out) {
    dataset::CoExecutionPlan plan = io::load_plan(plan_path);
    const auto calibration = resolve_calibration(options.calibration);
    const ScoreRounding decimals = parse_decimals(options.decimals);
    std::vector<ApplicationProfile> loaded;
    for (const dataset::PlanMember& member : plan.members) loaded.push_back(member.profile);
    if (!loaded.empty()) require_consistent_units(loaded);
    for (dataset::PlanMember& member : plan.members) {
        member.profile = to_score(member.profile, calibration, decimals);
    }

    std::unique_ptr<dataset::InstanceRunner> runner;
    if (dopts.runner == "oracle") {
        dataset::ContentionOracle oracle;
        if (!dopts.hidden.empty()) {
            if (dopts.hidden.size() != 3) throw Error(ErrorKind::Config, "--hidden takes three coefficients");
            oracle.h1 = dopts.hidden[0];
            oracle.h2 = dopts.hidden[1];
            oracle.h3 = dopts.hidden[2];
        }
        oracle.sigma = dopts.sigma;
        oracle.seed = dopts.seed;
        runner = std::make_unique<dataset::OracleRunner>(oracle);
    } else if (dopts.runner == "stressor") {
        runner = std::make_unique<dataset::StressorRunner>(stressor::parse_transport(dopts.transport));
    } else if (dopts.runner == "external-measurements") {
        if (dopts.measurements.empty()) {
            throw Error(ErrorKind::Config, "the external-measurements runner needs --measurements");
        }
        std::ifstream in(dopts.measurements);
        if (!in) throw Error(ErrorKind::Load, "cannot open " + dopts.measurements);
        runner = std::make_unique<dataset::MeasurementRunner>(io::read_measurements_csv(in));
    } else {
        throw Error(ErrorKind::Config, "unknown runner '" + dopts.runner + "'");
    }

    const InterferenceDataset data = dataset::build_dataset(plan, *runner);
    if (dopts.output.empty()) {
        io::write_dataset_csv(out, data);
    } else {
        std::ofstream file(dopts.output);
        if (!file) throw Error(ErrorKind::Load, "cannot write " + dopts.output);
        io::write_dataset_csv(file, data);
        out << "wrote " << data.rows.size() << " rows to " << dopts.output << '\n';
    }
    return 0;
}

// histogram -------------------------------------------------------------------

int cmd_histogram(const std::string& dataset_path, double bin_width, std::ostream& out) {
    io::write_histogram_csv(out, dataset::histogram(io::load_dataset(dataset_path), bin_width));
    return 0;
}

// plan ------------------------------------------------------------------------

int cmd_plan(const std::vector<std::string>& files, std::size_t slots, const CommonOptions& options,
             std::ostream& out) {
    const InterferenceModel model = resolve_model(options.model);
    const auto calibration = resolve_calibration(options.calibration);
    const ScoreRounding decimals = parse_decimals(options.decimals);
    std::vector<ApplicationProfile> loaded;
    for (const std::string& file : files) loaded.push_back(io::load_profile(file));
    require_consistent_units(loaded);
    std::vector<ApplicationProfile> profiles;
    for (const ApplicationProfile& profile : loaded) {
        profiles.push_back(to_score(profile, calibration, decimals));
    }
    const PlanRecommendation plan = plan_colocations(profiles, slots, model);

    const auto group_json = [](const ScoredGroup& group) {
        return Json{{"members", group.labels}, {"predicted", group.predicted}};
    };
    if (options.format == "json") {
        Json report{{"strategy", plan.strategy}, {"heuristic", true}};
        Json candidates = Json::array();
        for (const ScoredGroup& group : plan.candidates) candidates.push_back(group_json(group));
        Json assignment = Json::array();
        for (const ScoredGroup& group : plan.assignment) assignment.push_back(group_json(group));
        report["candidates"] = candidates;
        report["assignment"] = assignment;
        report["assignment_total"] = plan.assignment_total;
        out << report.dump(2) << '\n';
        return 0;
    }
    out << "strategy: " << plan.strategy << " (heuristic demonstrator, not an optimal placement)\n";
    out << "candidate groupings:\n";
    for (const ScoredGroup& group : plan.candidates) {
        out << "  " << std::setw(8) << percent(group.predicted) << "  " << joined(group.labels, " x ")
            << (is_extrapolation(group.predicted) ? "  [extrapolation]" : "") << '\n';
    }
    out << "chosen assignment:\n";
    std::size_t host = 1;
    for (const ScoredGroup& group : plan.assignment) {
        out << "  host " << host++ << ": " << joined(group.labels, " x ") << "  "
            << percent(group.predicted) << '\n';
    }
    out << "total predicted interference: " << percent(plan.assignment_total) << '\n';
    return 0;
}

void add_common(CLI::App* cmd, CommonOptions& options, bool with_model) {
    if (with_model) {
        cmd->add_option("--model", options.model, "model JSON file or 'paper-default'");
    }
    cmd->add_option("--calibration", options.calibration,
                    std::string("calibration JSON file (default: $") + kCalibrationEnv + ")");
    cmd->add_option("--decimals", options.decimals, "score rounding: 1, 2 or none")
        ->check(CLI::IsMember({"1", "2", "none"}));
    cmd->add_option("--format", options.format, "output format")
        ->check(CLI::IsMember({"table", "json", "csv"}));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Predicts and models cross-application interference of co-located applications",
                 "interfere"};
    app.require_subcommand(1);
    CommonOptions options;

    std::vector<std::string> files;
    std::string report_path;
    auto* predict_cmd = app.add_subcommand("predict", "predict the interference of co-located profiles");
    predict_cmd->add_option("profiles", files, "profile JSON files (two or more)");
    predict_cmd->add_option("--report", report_path, "re-evaluate a JSON report from a previous run");
    add_common(predict_cmd, options, true);

    auto* normalize_cmd = app.add_subcommand("normalize", "convert raw profiles into scores");
    normalize_cmd->add_option("profiles", files, "profile JSON files")->required();
    add_common(normalize_cmd, options, false);

    std::string dataset_path;
    std::string model_out;
    double alpha = 0.05;
    bool floor_negative = false;
    auto* fit_cmd = app.add_subcommand("fit", "fit the interference model to a dataset CSV");
    fit_cmd->add_option("dataset", dataset_path, "dataset CSV")->required();
    fit_cmd->add_option("--out", model_out, "write the fitted model JSON here");
    fit_cmd->add_option("--alpha", alpha, "significance level");
    fit_cmd->add_flag("--floor-negative", floor_negative, "floor negative interference at zero");
    add_common(fit_cmd, options, false);

    std::string spec_path;
    std::string preset_label;
    std::size_t workers = 1;
    std::string transport = "inproc";
    std::uint64_t cache_bytes = stressor::AttributionOptions{}.cache_bytes;
    auto* stress_cmd = app.add_subcommand("stress", "run the synthetic stressor");
    stress_cmd->add_option("--spec", spec_path, "stressor spec JSON file");
    stress_cmd->add_option("--preset", preset_label, "preset S1..S18");
    stress_cmd->add_option("--workers", workers, "worker count")->check(CLI::PositiveNumber);
    stress_cmd->add_option("--transport", transport, "inproc or loopback")
        ->check(CLI::IsMember({"inproc", "loopback"}));
    stress_cmd->add_option("--cache-bytes", cache_bytes, "cache size for DRAM attribution");
    add_common(stress_cmd, options, false);

    std::string plan_path;
    DatasetOptions dopts;
    auto* dataset_cmd = app.add_subcommand("dataset", "build an interference dataset from a plan");
    dataset_cmd->add_option("plan", plan_path, "plan JSON file")->required();
    dataset_cmd->add_option("--runner", dopts.runner, "oracle, stressor or external-measurements")
        ->check(CLI::IsMember({"oracle", "stressor", "external-measurements"}));
    dataset_cmd->add_option("--measurements", dopts.measurements, "measured runtimes CSV");
    dataset_cmd->add_option("--out", dopts.output, "write the dataset CSV here");
    dataset_cmd->add_option("--seed", dopts.seed, "oracle noise seed");
    dataset_cmd->add_option("--sigma", dopts.sigma, "oracle noise standard deviation");
    dataset_cmd->add_option("--hidden", dopts.hidden, "oracle coefficients h1 h2 h3")->expected(3);
    dataset_cmd->add_option("--transport", dopts.transport, "transport for the stressor runner")
        ->check(CLI::IsMember({"inproc", "loopback"}));
    add_common(dataset_cmd, options, false);

    double bin_width = 0.5;
    auto* histogram_cmd = app.add_subcommand("histogram", "histogram of observed interference");
    histogram_cmd->add_option("dataset", dataset_path, "dataset CSV")->required();
    histogram_cmd->add_option("--bin-width", bin_width, "bin width");

    std::size_t slots = 2;
    auto* plan_cmd = app.add_subcommand("plan", "recommend co-locations (greedy heuristic)");
    plan_cmd->add_option("profiles", files, "profile JSON files")->required();
    plan_cmd->add_option("--slots", slots, "applications per host");
    add_common(plan_cmd, options, true);

    std::vector<std::string> argv_storage{"interfere"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const std::string& arg : argv_storage) argv.push_back(arg.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*predict_cmd) return cmd_predict(files, report_path, options, out);
        if (*normalize_cmd) return cmd_normalize(files, options, out);
        if (*fit_cmd) return cmd_fit(dataset_path, model_out, alpha, floor_negative, options, out);
        if (*stress_cmd) {
            return cmd_stress(spec_path, preset_label, workers, transport, cache_bytes, options, out);
        }
        if (*dataset_cmd) return cmd_dataset(plan_path, dopts, options, out);
        if (*histogram_cmd) return cmd_histogram(dataset_path, bin_width, out);
        if (*plan_cmd) return cmd_plan(files, slots, options, out);
    } catch (const Error& e) {
        err << "error: " << error_kind_name(e.kind()) << ": " << e.what() << '\n';
        return error_exit_code(e.kind());
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << error_kind_name(ErrorKind::Load) << ": " << e.what() << '\n';
        return error_exit_code(ErrorKind::Load);
    }
    return 1;
}

}  // namespace interfere::cli
