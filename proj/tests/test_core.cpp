#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "interfere/core.hpp"
#include "interfere/reference.hpp"

using namespace interfere;
using testing::error_of;
using testing::raw_profile;
using testing::score_profile;

namespace {

ApplicationProfile synthetic(const std::string& label) {
    for (const ApplicationProfile& p : reference::synthetic_score_profiles(1)) {
        if (p.label == label) return p;
    }
    throw std::logic_error("no synthetic profile " + label);
}

}  // namespace

TEST_CASE("application_access sums VM rates") {
    const ResourceVector vm{272.5, 4.0 / 6.0, 50.0, Units::Raw};
    const ResourceVector total = application_access(raw_profile("S1", std::vector(6, vm)));
    CHECK(total.sllc == doctest::Approx(1635).epsilon(1e-12));
    CHECK(total.dram == doctest::Approx(4).epsilon(1e-12));
    CHECK(total.net == doctest::Approx(300).epsilon(1e-12));
    CHECK(total.units == Units::Raw);

    CHECK(application_access(raw_profile("zero", {{0, 0, 0, Units::Raw}})) ==
          ResourceVector{0, 0, 0, Units::Raw});
    CHECK(application_access(raw_profile("two", {{1, 2, 3, Units::Raw}, {4, 5, 6, Units::Raw}})) ==
          ResourceVector{5, 7, 9, Units::Raw});
}

TEST_CASE("application_access rejects an empty profile") {
    ApplicationProfile empty;
    empty.label = "empty";
    CHECK(error_of([&] { (void)application_access(empty); }) == ErrorKind::MalformedProfile);
}

TEST_CASE("validate enforces the profile shape") {
    ApplicationProfile p = raw_profile("p", {{1, 1, 1, Units::Raw}, {1, 1, 1, Units::Raw}});
    p.vm_count = 3;
    CHECK(error_of([&] { validate(p); }) == ErrorKind::MalformedProfile);
    p.vm_count = 2;
    p.vm_accesses[1].dram = -1;
    CHECK(error_of([&] { validate(p); }) == ErrorKind::MalformedProfile);
    p.vm_accesses[1] = {1, 1, 1, Units::Score};
    CHECK(error_of([&] { validate(p); }) == ErrorKind::UnitMismatch);
    CHECK(error_of([&] { validate(score_profile("big", 1.2, 0, 0)); }) ==
          ErrorKind::MalformedProfile);
}

TEST_CASE("normalize divides by the calibration maxima") {
    const CalibrationMaxima maxima{1635, 444, 2910};
    CHECK(normalize({1635, 0, 0, Units::Raw}, maxima, 1).sllc == 1.0);
    CHECK(normalize({851, 0, 0, Units::Raw}, maxima, 1).sllc == doctest::Approx(0.5));
    const ResourceVector zero = normalize({0, 0, 0, Units::Raw}, maxima, 1);
    CHECK(zero == ResourceVector{0, 0, 0, Units::Score});
    CHECK(normalize({851, 0, 0, Units::Raw}, maxima, std::nullopt).sllc ==
          doctest::Approx(851.0 / 1635.0).epsilon(1e-15));
    CHECK(normalize({3000, 0, 0, Units::Raw}, maxima, std::nullopt).sllc == 1.0);
}

TEST_CASE("normalize rejects a zero maximum") {
    CHECK(error_of([] { (void)normalize({1, 1, 1, Units::Raw}, {1, 0, 1}, 1); }) ==
          ErrorKind::Calibration);
}

TEST_CASE("round_half_up rounds ties upward") {
    CHECK(round_half_up(0.15, 1) == doctest::Approx(0.2));
    CHECK(round_half_up(0.25, 1) == doctest::Approx(0.3));
    CHECK(round_half_up(0.125, 2) == doctest::Approx(0.13));
    CHECK(round_half_up(0.149, 1) == doctest::Approx(0.1));
}

TEST_CASE("synthetic raw rates normalize to the published scores") {
    // label, sllc, dram, net scores at one decimal
    const std::vector<std::tuple<std::string, double, double, double>> expected{
        {"S1", 1.0, 0.0, 0.1},  {"S2", 0.5, 0.1, 0.1},  {"S3", 0.1, 0.1, 0.1},
        {"S4", 0.3, 1.0, 0.1},  {"S5", 0.1, 0.5, 0.1},  {"S6", 0.5, 0.5, 0.1},
        {"S7", 1.0, 0.0, 1.0},  {"S8", 0.5, 0.1, 1.0},  {"S9", 0.1, 0.1, 1.0},
        {"S10", 0.3, 1.0, 1.0}, {"S11", 0.1, 0.5, 1.0}, {"S12", 0.5, 0.5, 1.0},
        {"S13", 1.0, 0.0, 0.5}, {"S14", 0.5, 0.1, 0.5}, {"S15", 0.1, 0.1, 0.5},
        {"S16", 0.3, 1.0, 0.5}, {"S17", 0.1, 0.5, 0.5}, {"S18", 0.5, 0.5, 0.5},
    };
    for (const auto& [label, s, d, n] : expected) {
        CAPTURE(label);
        const ResourceVector score = application_score(synthetic(label));
        CHECK(score.sllc == doctest::Approx(s));
        CHECK(score.dram == doctest::Approx(d));
        CHECK(score.net == doctest::Approx(n));
    }
}

TEST_CASE("accumulated_access sums member scores") {
    CoLocation s1s3({synthetic("S1"), synthetic("S3")});
    CHECK(accumulated_access(s1s3, ResourceKind::Sllc) == doctest::Approx(1.1));
    CoLocation s15s7({synthetic("S15"), synthetic("S7")});
    CHECK(accumulated_access(s15s7, ResourceKind::Net) == doctest::Approx(1.5));
    CoLocation zeros({score_profile("a", 0, 0, 0), score_profile("b", 0, 0, 0)});
    for (ResourceKind kind : kAllResources) CHECK(accumulated_access(zeros, kind) == 0.0);
}

TEST_CASE("co-locations require scores and at least two members") {
    ApplicationProfile raw = raw_profile("raw", {{1, 1, 1, Units::Raw}});
    CHECK(error_of([&] { CoLocation({raw, score_profile("s", 0.1, 0.1, 0.1)}); }) ==
          ErrorKind::UnitMismatch);
    CHECK(error_of([&] { CoLocation({score_profile("s", 0.1, 0.1, 0.1)}); }) == ErrorKind::Domain);
}

TEST_CASE("slowdown is the relative runtime increase") {
    CHECK(slowdown({"A", 60, 100}) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(slowdown({"B", 80, 100}) == 0.25);
    CHECK(slowdown({"C", 50, 50}) == 0.0);
    CHECK(slowdown({"fast", 100, 80}) == doctest::Approx(-0.2));
    CHECK(error_of([] { (void)slowdown({"bad", 0, 10}); }) == ErrorKind::Domain);
    CHECK(error_of([] { (void)slowdown({"bad", 10, -1}); }) == ErrorKind::Domain);
}

TEST_CASE("interference_level averages slowdowns") {
    const std::vector<SlowdownObservation> pair{{"A", 60, 100}, {"B", 80, 100}};
    CHECK(interference_level(pair) == doctest::Approx(0.458333333333).epsilon(1e-12));
    const std::vector<SlowdownObservation> one{{"A", 60, 100}};
    CHECK(interference_level(one) == slowdown(one[0]));
    const std::vector<SlowdownObservation> none_slow{{"A", 10, 10}, {"B", 20, 20}};
    CHECK(interference_level(none_slow) == 0.0);
    CHECK(error_of([] { (void)interference_level({}); }) == ErrorKind::Domain);
}

TEST_CASE("similarity_factor") {
    CHECK(similarity_factor(synthetic("S15"), synthetic("S7"), ResourceKind::Sllc) ==
          doctest::Approx(0.1));
    const ApplicationProfile p = score_profile("p", 0.3, 0.4, 0.5);
    for (ResourceKind kind : kAllResources) CHECK(similarity_factor(p, p, kind) == 1.0);
    CHECK(similarity_factor(score_profile("a", 0, 0, 0), score_profile("b", 1, 0, 0),
                            ResourceKind::Sllc) == 0.0);
    const ApplicationProfile raw = raw_profile("raw", {{1, 1, 1, Units::Raw}});
    CHECK(error_of([&] { (void)similarity_factor(raw, p, ResourceKind::Net); }) ==
          ErrorKind::UnitMismatch);
}

TEST_CASE("global_similarity averages unordered pairs") {
    const ApplicationProfile a = score_profile("a", 0.1, 0, 0);
    const ApplicationProfile b = score_profile("b", 0.5, 0, 0);
    const ApplicationProfile c = score_profile("c", 0.9, 0, 0);
    CHECK(global_similarity(CoLocation({a, b}), ResourceKind::Sllc) ==
          similarity_factor(a, b, ResourceKind::Sllc));
    CHECK(global_similarity(CoLocation({a, a, a}), ResourceKind::Sllc) == 1.0);
    CHECK(global_similarity(CoLocation({a, b, c}), ResourceKind::Sllc) ==
          doctest::Approx(1.4 / 3.0).epsilon(1e-12));
}

TEST_CASE("core properties on random profiles") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> rate(0.0, 2000.0);
    const CalibrationMaxima maxima{1635, 444, 2910};

    for (int trial = 0; trial < 500; ++trial) {
        // linearity of application_access over a VM split
        std::vector<ResourceVector> p_vms(1 + trial % 4), q_vms(1 + trial % 3);
        for (auto& vm : p_vms) vm = {rate(rng), rate(rng), rate(rng), Units::Raw};
        for (auto& vm : q_vms) vm = {rate(rng), rate(rng), rate(rng), Units::Raw};
        std::vector<ResourceVector> all = p_vms;
        all.insert(all.end(), q_vms.begin(), q_vms.end());
        const ResourceVector joint = application_access(raw_profile("pq", all));
        const ResourceVector split = application_access(raw_profile("p", p_vms)) +
                                     application_access(raw_profile("q", q_vms));
        for (ResourceKind kind : kAllResources) {
            CHECK(joint[kind] == doctest::Approx(split[kind]).epsilon(1e-12));
        }

        // normalize is monotone and maps the maximum to 1
        const double lo = rate(rng);
        const double hi = lo + rate(rng);
        for (ScoreRounding decimals : {ScoreRounding{}, ScoreRounding{1}, ScoreRounding{2}}) {
            CHECK(normalize({lo, lo, lo, Units::Raw}, maxima, decimals).sllc <=
                  normalize({hi, hi, hi, Units::Raw}, maxima, decimals).sllc);
            const ResourceVector top =
                normalize({maxima.max_sllc, maxima.max_dram, maxima.max_net, Units::Raw}, maxima,
                          decimals);
            CHECK(top == ResourceVector{1, 1, 1, Units::Score});
        }

        // slowdown monotonicity
        const double t = 1.0 + rate(rng);
        const double c = 1.0 + rate(rng);
        CHECK(slowdown({"x", t, t}) == 0.0);
        CHECK(slowdown({"x", t, c + 1.0}) > slowdown({"x", t, c}));
        CHECK(slowdown({"x", t + 1.0, c}) < slowdown({"x", t, c}));

        // similarity, accumulation and bounds
        const std::size_t n = 2 + trial % 4;
        std::vector<ApplicationProfile> members;
        for (std::size_t i = 0; i < n; ++i) {
            members.push_back(score_profile("m" + std::to_string(i), unit(rng), unit(rng), unit(rng)));
        }
        CHECK(similarity_factor(members[0], members[1], ResourceKind::Dram) ==
              similarity_factor(members[1], members[0], ResourceKind::Dram));
        const CoLocation coloc(members);
        std::vector<ApplicationProfile> shuffled = members;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const CoLocation permuted(shuffled);
        for (ResourceKind kind : kAllResources) {
            const double acc = accumulated_access(coloc, kind);
            CHECK(acc == doctest::Approx(accumulated_access(permuted, kind)).epsilon(1e-12));
            CHECK(acc >= 0.0);
            CHECK(acc <= static_cast<double>(n));
            const double g = global_similarity(coloc, kind);
            CHECK(g >= 0.0);
            CHECK(g <= 1.0);
        }
        const CoLocation copies(std::vector(n, members[0]));
        for (ResourceKind kind : kAllResources) CHECK(global_similarity(copies, kind) == 1.0);
    }
}
