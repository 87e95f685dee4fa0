#pragma once

#include <string>
#include <vector>

#include "interfere/core.hpp"

namespace interfere::reference {

/// Calibration maxima implied by the synthetic workload: the highest SLLC,
/// DRAM and NET totals reached by any S1..S18 application.
[[nodiscard]] CalibrationMaxima synthetic_calibration();

/// Measured whole-application raw rates of S1..S18, split evenly over six VMs.
[[nodiscard]] std::vector<ApplicationProfile> synthetic_raw_profiles();

/// S1..S18 normalized against synthetic_calibration() with `decimals` rounding.
[[nodiscard]] std::vector<ApplicationProfile> synthetic_score_profiles(ScoreRounding decimals = 1);

/// Individual scores of the HPC evaluation workload (MUFITS, HPL, DGEMM, PTRANS, FFT).
[[nodiscard]] std::vector<ApplicationProfile> evaluation_profiles();

/// Looks up an evaluation profile by label, e.g. "PTRANS.I1.P6".
[[nodiscard]] ApplicationProfile evaluation_profile(const std::string& label);

/// A reported co-location result of the evaluation workload.
struct ReportedOutcome {
    std::string member;
    std::size_t copies = 0;
    double observed = 0.0;
    double predicted = 0.0;
    double error = 0.0;
};

[[nodiscard]] std::vector<ReportedOutcome> evaluation_outcomes();

}  // namespace interfere::reference
