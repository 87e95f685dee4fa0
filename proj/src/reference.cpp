#include "interfere/reference.hpp"

#include <algorithm>
#include <array>

#include "interfere/error.hpp"

namespace interfere::reference {

namespace {

struct RawRow {
    const char* label;
    double sllc;
    double dram;
    double net;
};

// MR/s, MR/s, MB/s totals on the calibration machine.
constexpr std::array<RawRow, 18> kSyntheticRates{{
    {"S1", 1635, 4, 300},     {"S2", 851, 61, 324},     {"S3", 239, 41, 312},
    {"S4", 444, 444, 318},    {"S5", 224, 224, 324},    {"S6", 797, 240, 318},
    {"S7", 1597, 18, 2892},   {"S8", 890, 43, 2810},    {"S9", 220, 49, 2910},
    {"S10", 438, 438, 2832},  {"S11", 214, 214, 2892},  {"S12", 817, 241, 2838},
    {"S13", 1575, 22, 1392},  {"S14", 890, 52, 1362},   {"S15", 228, 49, 1335},
    {"S16", 438, 438, 1375},  {"S17", 221, 221, 1404},  {"S18", 824, 239, 1380},
}};

struct ScoreRow {
    const char* label;
    std::size_t processes;
    double sllc;
    double dram;
    double net;
};

constexpr std::array<ScoreRow, 14> kEvaluationScores{{
    {"MUFITS.I1.P6", 6, 0.05, 0.13, 0.00}, {"MUFITS.I2.P6", 6, 0.03, 0.00, 0.01},
    {"MUFITS.I1.P4", 4, 0.05, 0.08, 0.00}, {"HPL.I1.P6", 6, 0.03, 0.06, 0.02},
    {"HPL.I2.P6", 6, 0.03, 0.06, 0.02},    {"HPL.I1.P4", 4, 0.02, 0.04, 0.01},
    {"DGEMM.I1.P6", 6, 0.02, 0.02, 0.00},  {"DGEMM.I2.P6", 6, 0.01, 0.02, 0.00},
    {"DGEMM.I1.P4", 4, 0.01, 0.02, 0.00},  {"PTRANS.I1.P6", 6, 0.18, 0.21, 0.32},
    {"PTRANS.I2.P6", 6, 0.02, 0.04, 0.02}, {"PTRANS.I1.P4", 4, 0.14, 0.09, 0.19},
    {"FFT.I1.P4", 4, 0.07, 0.17, 0.49},    {"FFT.I2.P4", 4, 0.07, 0.16, 0.52},
}};

constexpr std::size_t kSyntheticVms = 6;

}  // namespace

CalibrationMaxima synthetic_calibration() {
    CalibrationMaxima maxima;
    for (const RawRow& row : kSyntheticRates) {
        maxima.max_sllc = std::max(maxima.max_sllc, row.sllc);
        maxima.max_dram = std::max(maxima.max_dram, row.dram);
        maxima.max_net = std::max(maxima.max_net, row.net);
    }
    return maxima;
}

std::vector<ApplicationProfile> synthetic_raw_profiles() {
    std::vector<ApplicationProfile> profiles;
    for (const RawRow& row : kSyntheticRates) {
        ApplicationProfile profile;
        profile.label = row.label;
        profile.vm_count = kSyntheticVms;
        const double share = 1.0 / static_cast<double>(kSyntheticVms);
        profile.vm_accesses.assign(
            kSyntheticVms, ResourceVector{row.sllc * share, row.dram * share, row.net * share,
                                          Units::Raw});
        profiles.push_back(std::move(profile));
    }
    return profiles;
}

std::vector<ApplicationProfile> synthetic_score_profiles(ScoreRounding decimals) {
    const CalibrationMaxima maxima = synthetic_calibration();
    std::vector<ApplicationProfile> scored;
    for (const ApplicationProfile& raw : synthetic_raw_profiles()) {
        scored.push_back(normalize_profile(raw, maxima, decimals));
    }
    return scored;
}

std::vector<ApplicationProfile> evaluation_profiles() {
    std::vector<ApplicationProfile> profiles;
    for (const ScoreRow& row : kEvaluationScores) {
        ApplicationProfile profile;
        profile.label = row.label;
        profile.vm_count = row.processes;
        profile.vm_accesses = {ResourceVector{row.sllc, row.dram, row.net, Units::Score}};
        profiles.push_back(std::move(profile));
    }
    return profiles;
}

ApplicationProfile evaluation_profile(const std::string& label) {
    for (ApplicationProfile& profile : evaluation_profiles()) {
        if (profile.label == label) return profile;
    }
    throw Error(ErrorKind::UnknownLabel, "no evaluation profile '" + label + "'");
}

std::vector<ReportedOutcome> evaluation_outcomes() {
    return {
        {"PTRANS.I1.P6", 2, 0.4450, 0.3997, 0.0453},
        {"PTRANS.I2.P6", 2, 0.0531, 0.1211, 0.0680},
        {"DGEMM.I1.P6", 2, 0.0779, 0.0250, 0.0529},
        {"FFT.I1.P4", 3, 0.4931, 0.4045, 0.0887},
        {"MUFITS.I1.P4", 3, 0.2285, 0.1165, 0.1120},
    };
}

}  // namespace interfere::reference
