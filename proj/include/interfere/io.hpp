#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "interfere/core.hpp"
#include "interfere/dataset.hpp"
#include "interfere/model.hpp"
#include "interfere/regression.hpp"
#include "interfere/stressor.hpp"

namespace interfere::io {

using Json = nlohmann::json;

// Profiles: { label, vm_count, vm_accesses: [{sllc, dram, net}], isolated_runtime_s?, units }
[[nodiscard]] ApplicationProfile profile_from_json(const Json& j);
[[nodiscard]] Json to_json(const ApplicationProfile& profile);
[[nodiscard]] ApplicationProfile load_profile(const std::filesystem::path& path);

// Calibration: { max_sllc, max_dram, max_net }
[[nodiscard]] CalibrationMaxima calibration_from_json(const Json& j);
[[nodiscard]] Json to_json(const CalibrationMaxima& maxima);
[[nodiscard]] CalibrationMaxima load_calibration(const std::filesystem::path& path);

// Models: { c1, c2, c3, provenance, diagnostics? }
[[nodiscard]] InterferenceModel model_from_json(const Json& j);
[[nodiscard]] Json to_json(const InterferenceModel& model);
[[nodiscard]] Json to_json(const FitDiagnostics& diag);
[[nodiscard]] InterferenceModel load_model(const std::filesystem::path& path);

// Stressor specs: { omega, alpha, beta, gamma, delta, theta, lambda_bytes } and/or { preset }
[[nodiscard]] stressor::SyntheticAppSpec spec_from_json(const Json& j);
[[nodiscard]] Json to_json(const stressor::SyntheticAppSpec& spec);
[[nodiscard]] Json to_json(const stressor::StressorCounters& counters);

/// Plan: { members: [profile object | path string], scheme, repetitions, groups?, aggregation? }.
/// Member objects may carry "synthetic" (a spec object) or "preset". Relative
/// paths resolve against `base`.
[[nodiscard]] dataset::CoExecutionPlan plan_from_json(const Json& j,
                                                      const std::filesystem::path& base);
[[nodiscard]] dataset::CoExecutionPlan load_plan(const std::filesystem::path& path);

inline constexpr const char* kDatasetHeader =
    "t_sllc,t_dram,t_net,g_sllc,g_dram,g_net,t1,t2,t3,interference";

/// Writes the dataset CSV. Two trailing columns, members and error, follow the
/// ten feature/observation columns.
void write_dataset_csv(std::ostream& out, const InterferenceDataset& dataset);

/// Reads a dataset CSV, recomputing t1..t3 from the stored accumulated scores
/// and similarities; a mismatch above 1e-6 is a load error.
[[nodiscard]] InterferenceDataset read_dataset_csv(std::istream& in);
[[nodiscard]] InterferenceDataset load_dataset(const std::filesystem::path& path);

void write_histogram_csv(std::ostream& out, const std::vector<dataset::HistogramBin>& bins);

/// Measurements CSV: header `colocation,member,runtime_s`; colocation is a
/// PlanEntry key such as "S1+S3", or "isolated".
[[nodiscard]] dataset::MeasurementRunner::Table read_measurements_csv(std::istream& in);

[[nodiscard]] Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace interfere::io
