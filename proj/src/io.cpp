#include "interfere/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "interfere/error.hpp"

namespace interfere::io {

namespace {

constexpr double kFeatureTolerance = 1e-6;

double number(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw Error(ErrorKind::Load, std::string("missing numeric field '") + key + "'");
    }
    return j.at(key).get<double>();
}

std::uint64_t count(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<long long>() < 0) {
        throw Error(ErrorKind::Load, std::string("field '") + key + "' must be a nonnegative integer");
    }
    return j.at(key).get<std::uint64_t>();
}

Json finite_or_null(double value) {
    return std::isfinite(value) ? Json(value) : Json(nullptr);
}

double number_or_nan(const Json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nan("");
    return number(j, key);
}

std::string format_double(double value) {
    if (!std::isfinite(value)) return "";
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

double parse_double(const std::string& field, std::size_t line) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc{} || result.ptr != end) {
        throw Error(ErrorKind::Load,
                    "line " + std::to_string(line) + ": '" + field + "' is not a number");
    }
    return value;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c != '\r') {
            fields.back() += c;
        }
    }
    return fields;
}

std::string quote_csv(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::vector<std::string> split_labels(const std::string& joined) {
    std::vector<std::string> labels;
    if (joined.empty()) return labels;
    std::stringstream stream(joined);
    std::string label;
    while (std::getline(stream, label, '+')) labels.push_back(label);
    return labels;
}

}  // namespace

ApplicationProfile profile_from_json(const Json& j) {
    try {
        ApplicationProfile profile;
        if (!j.contains("label") || !j.at("label").is_string()) {
            throw Error(ErrorKind::MalformedProfile, "profile needs a string 'label'");
        }
        profile.label = j.at("label").get<std::string>();
        const Units units = parse_units(j.value("units", std::string("raw")));
        if (!j.contains("vm_accesses") || !j.at("vm_accesses").is_array()) {
            throw Error(ErrorKind::MalformedProfile,
                        "profile '" + profile.label + "' needs a 'vm_accesses' array");
        }
        for (const Json& vm : j.at("vm_accesses")) {
            profile.vm_accesses.push_back(
                {number(vm, "sllc"), number(vm, "dram"), number(vm, "net"), units});
        }
        profile.vm_count = j.contains("vm_count") ? static_cast<std::size_t>(count(j, "vm_count"))
                                                  : profile.vm_accesses.size();
        if (j.contains("isolated_runtime_s") && !j.at("isolated_runtime_s").is_null()) {
            profile.isolated_runtime = number(j, "isolated_runtime_s");
        }
        validate(profile);
        return profile;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Load) throw Error(ErrorKind::MalformedProfile, e.what());
        throw;
    }
}

Json to_json(const ApplicationProfile& profile) {
    Json vms = Json::array();
    for (const ResourceVector& vm : profile.vm_accesses) {
        vms.push_back({{"sllc", vm.sllc}, {"dram", vm.dram}, {"net", vm.net}});
    }
    Json j{{"label", profile.label},
           {"vm_count", profile.vm_count},
           {"vm_accesses", vms},
           {"units", units_name(profile.units())}};
    if (profile.isolated_runtime) j["isolated_runtime_s"] = *profile.isolated_runtime;
    return j;
}

ApplicationProfile load_profile(const std::filesystem::path& path) {
    return profile_from_json(read_json_file(path));
}

CalibrationMaxima calibration_from_json(const Json& j) {
    CalibrationMaxima maxima;
    try {
        maxima = {number(j, "max_sllc"), number(j, "max_dram"), number(j, "max_net")};
    } catch (const Error& e) {
        throw Error(ErrorKind::Calibration, e.what());
    }
    validate(maxima);
    return maxima;
}

Json to_json(const CalibrationMaxima& maxima) {
    return {{"max_sllc", maxima.max_sllc}, {"max_dram", maxima.max_dram}, {"max_net", maxima.max_net}};
}

CalibrationMaxima load_calibration(const std::filesystem::path& path) {
    return calibration_from_json(read_json_file(path));
}

Json to_json(const FitDiagnostics& diag) {
    Json j{{"n", diag.n},
           {"k", diag.k},
           {"r2", finite_or_null(diag.r2)},
           {"r2_adj", finite_or_null(diag.r2_adj)},
           {"sse", finite_or_null(diag.sse)},
           {"ssr", finite_or_null(diag.ssr)},
           {"f_statistic", finite_or_null(diag.f_statistic)},
           {"f_pvalue", finite_or_null(diag.f_pvalue)},
           {"normality_pvalue", finite_or_null(diag.normality_pvalue)},
           {"heteroscedasticity_pvalue", finite_or_null(diag.heteroscedasticity_pvalue)}};
    Json se = Json::array();
    Json t = Json::array();
    Json p = Json::array();
    for (std::size_t i = 0; i < 3; ++i) {
        se.push_back(finite_or_null(diag.std_errors[i]));
        t.push_back(finite_or_null(diag.t_statistics[i]));
        p.push_back(finite_or_null(diag.t_pvalues[i]));
    }
    j["std_errors"] = se;
    j["t_statistics"] = t;
    j["t_pvalues"] = p;
    j["residuals"] = diag.residuals;
    return j;
}

InterferenceModel model_from_json(const Json& j) {
    InterferenceModel model;
    model.c1 = number(j, "c1");
    model.c2 = number(j, "c2");
    model.c3 = number(j, "c3");
    if (!std::isfinite(model.c1) || !std::isfinite(model.c2) || !std::isfinite(model.c3)) {
        throw Error(ErrorKind::Load, "model coefficients must be finite");
    }
    model.provenance = parse_provenance(j.value("provenance", std::string("fitted")));
    if (j.contains("diagnostics") && j.at("diagnostics").is_object()) {
        const Json& d = j.at("diagnostics");
        FitDiagnostics diag;
        diag.n = d.value("n", std::size_t{0});
        diag.k = d.value("k", std::size_t{3});
        diag.r2 = number_or_nan(d, "r2");
        diag.r2_adj = number_or_nan(d, "r2_adj");
        diag.sse = number_or_nan(d, "sse");
        diag.ssr = number_or_nan(d, "ssr");
        diag.f_statistic = number_or_nan(d, "f_statistic");
        diag.f_pvalue = number_or_nan(d, "f_pvalue");
        diag.normality_pvalue = number_or_nan(d, "normality_pvalue");
        diag.heteroscedasticity_pvalue = number_or_nan(d, "heteroscedasticity_pvalue");
        for (std::size_t i = 0; i < 3; ++i) {
            const auto at = [&](const char* key) {
                if (!d.contains(key) || d.at(key).size() != 3 || d.at(key)[i].is_null()) {
                    return std::nan("");
                }
                return d.at(key)[i].get<double>();
            };
            diag.std_errors[i] = at("std_errors");
            diag.t_statistics[i] = at("t_statistics");
            diag.t_pvalues[i] = at("t_pvalues");
        }
        if (d.contains("residuals")) diag.residuals = d.at("residuals").get<std::vector<double>>();
        model.diagnostics = std::move(diag);
    }
    return model;
}

Json to_json(const InterferenceModel& model) {
    Json j{{"c1", model.c1},
           {"c2", model.c2},
           {"c3", model.c3},
           {"provenance", provenance_name(model.provenance)}};
    if (model.diagnostics) j["diagnostics"] = to_json(*model.diagnostics);
    return j;
}

InterferenceModel load_model(const std::filesystem::path& path) {
    return model_from_json(read_json_file(path));
}

stressor::SyntheticAppSpec spec_from_json(const Json& j) {
    stressor::SyntheticAppSpec spec;
    if (j.contains("preset")) {
        spec = stressor::preset(j.at("preset").get<std::string>());
    } else {
        for (const char* key : {"omega", "alpha", "beta", "gamma", "delta", "theta", "lambda_bytes"}) {
            if (!j.contains(key)) {
                throw Error(ErrorKind::Config, std::string("stressor spec is missing '") + key + "'");
            }
        }
    }
    const auto override_field = [&](const char* key, std::uint64_t& field) {
        if (j.contains(key)) field = count(j, key);
    };
    override_field("omega", spec.omega);
    override_field("alpha", spec.alpha);
    override_field("beta", spec.beta);
    override_field("gamma", spec.gamma);
    override_field("delta", spec.delta);
    override_field("theta", spec.theta);
    override_field("lambda_bytes", spec.lambda_bytes);
    stressor::validate(spec);
    return spec;
}

Json to_json(const stressor::SyntheticAppSpec& spec) {
    return {{"omega", spec.omega}, {"alpha", spec.alpha}, {"beta", spec.beta},
            {"gamma", spec.gamma}, {"delta", spec.delta}, {"theta", spec.theta},
            {"lambda_bytes", spec.lambda_bytes}};
}

Json to_json(const stressor::StressorCounters& counters) {
    return {{"element_accesses", counters.element_accesses},
            {"sqrt_evaluations", counters.sqrt_evaluations},
            {"bytes_sent", counters.bytes_sent},
            {"bytes_received", counters.bytes_received},
            {"computation_phase_seconds", counters.computation_phase_seconds},
            {"communication_phase_seconds", counters.communication_phase_seconds},
            {"wall_seconds", counters.wall_seconds},
            {"working_set_bytes", counters.working_set_bytes},
            {"stride_bytes", counters.stride_bytes},
            {"workers", counters.workers}};
}

dataset::CoExecutionPlan plan_from_json(const Json& j, const std::filesystem::path& base) {
    dataset::CoExecutionPlan plan;
    if (!j.contains("members") || !j.at("members").is_array()) {
        throw Error(ErrorKind::Load, "plan needs a 'members' array");
    }
    for (const Json& entry : j.at("members")) {
        dataset::PlanMember member;
        if (entry.is_string()) {
            std::filesystem::path path = entry.get<std::string>();
            if (path.is_relative()) path = base / path;
            const Json profile = read_json_file(path);
            member.profile = profile_from_json(profile);
            if (profile.contains("synthetic")) member.synthetic = spec_from_json(profile.at("synthetic"));
            if (profile.contains("preset")) member.synthetic = stressor::preset(profile.at("preset").get<std::string>());
        } else {
            member.profile = profile_from_json(entry);
            if (entry.contains("synthetic")) member.synthetic = spec_from_json(entry.at("synthetic"));
            if (entry.contains("preset")) member.synthetic = stressor::preset(entry.at("preset").get<std::string>());
        }
        plan.members.push_back(std::move(member));
    }
    plan.scheme = dataset::parse_scheme(j.value("scheme", std::string("pairwise-all")));
    if (j.contains("groups")) {
        plan.groups = j.at("groups").get<std::vector<std::vector<std::string>>>();
    }
    if (j.contains("repetitions")) plan.repetitions = static_cast<std::size_t>(count(j, "repetitions"));
    const std::string aggregation = j.value("aggregation", std::string("mean"));
    if (aggregation == "mean") {
        plan.aggregation = dataset::Aggregation::Mean;
    } else if (aggregation == "first") {
        plan.aggregation = dataset::Aggregation::First;
    } else {
        throw Error(ErrorKind::Config, "unknown aggregation '" + aggregation + "'");
    }
    return plan;
}

dataset::CoExecutionPlan load_plan(const std::filesystem::path& path) {
    return plan_from_json(read_json_file(path), path.parent_path());
}

void write_dataset_csv(std::ostream& out, const InterferenceDataset& dataset) {
    out << kDatasetHeader << ",members,error\n";
    for (const DatasetRow& row : dataset.rows) {
        const FeatureRow& f = row.features;
        std::string members;
        for (const std::string& label : f.labels) {
            if (!members.empty()) members += '+';
            members += label;
        }
        out << format_double(f.accumulated.sllc) << ',' << format_double(f.accumulated.dram) << ','
            << format_double(f.accumulated.net) << ',' << format_double(f.similarity.sllc) << ','
            << format_double(f.similarity.dram) << ',' << format_double(f.similarity.net) << ','
            << format_double(f.t1) << ',' << format_double(f.t2) << ',' << format_double(f.t3) << ','
            << format_double(row.observed) << ',' << quote_csv(members) << ','
            << quote_csv(row.error) << '\n';
    }
}

InterferenceDataset read_dataset_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::Load, "dataset is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_csv(line);
    const std::vector<std::string> expected = split_csv(kDatasetHeader);
    if (header.size() < expected.size() ||
        !std::equal(expected.begin(), expected.end(), header.begin())) {
        throw Error(ErrorKind::Load, std::string("dataset header must start with ") + kDatasetHeader);
    }
    std::ptrdiff_t members_col = -1;
    std::ptrdiff_t error_col = -1;
    for (std::size_t i = expected.size(); i < header.size(); ++i) {
        if (header[i] == "members") members_col = static_cast<std::ptrdiff_t>(i);
        if (header[i] == "error") error_col = static_cast<std::ptrdiff_t>(i);
    }

    InterferenceDataset dataset;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != header.size()) {
            throw Error(ErrorKind::Load, "line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(header.size()) + " fields");
        }
        std::array<double, 9> v{};
        for (std::size_t i = 0; i < 9; ++i) v[i] = parse_double(fields[i], line_no);

        DatasetRow row;
        row.features = features_from_aggregates({v[0], v[1], v[2], Units::Score},
                                                {v[3], v[4], v[5], Units::Score});
        const std::array<double, 3> recomputed{row.features.t1, row.features.t2, row.features.t3};
        for (std::size_t i = 0; i < 3; ++i) {
            if (std::abs(recomputed[i] - v[6 + i]) > kFeatureTolerance) {
                throw Error(ErrorKind::Load, "line " + std::to_string(line_no) + ": stored t" +
                                                 std::to_string(i + 1) +
                                                 " does not match the accumulated scores");
            }
        }
        row.observed = fields[9].empty() ? std::nan("") : parse_double(fields[9], line_no);
        if (members_col >= 0) row.features.labels = split_labels(fields[static_cast<std::size_t>(members_col)]);
        if (error_col >= 0) row.error = fields[static_cast<std::size_t>(error_col)];
        if (row.ok() && !std::isfinite(row.observed)) {
            throw Error(ErrorKind::Load, "line " + std::to_string(line_no) +
                                             ": interference must be finite on rows without an error");
        }
        dataset.rows.push_back(std::move(row));
    }
    return dataset;
}

InterferenceDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Load, "cannot open " + path.string());
    return read_dataset_csv(in);
}

void write_histogram_csv(std::ostream& out, const std::vector<dataset::HistogramBin>& bins) {
    out << "bin_low,bin_high,count\n";
    for (const dataset::HistogramBin& bin : bins) {
        out << format_double(bin.low) << ',' << format_double(bin.high) << ',' << bin.count << '\n';
    }
}

dataset::MeasurementRunner::Table read_measurements_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::Load, "measurements file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "colocation,member,runtime_s") {
        throw Error(ErrorKind::Load, "measurements header must be colocation,member,runtime_s");
    }
    dataset::MeasurementRunner::Table table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != 3) {
            throw Error(ErrorKind::Load, "line " + std::to_string(line_no) + ": expected 3 fields");
        }
        table[fields[0]][fields[1]] = parse_double(fields[2], line_no);
    }
    return table;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Load, "cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::Load, path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Load, "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace interfere::io
