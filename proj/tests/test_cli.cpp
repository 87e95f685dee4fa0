#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "interfere/cli.hpp"
#include "interfere/error.hpp"
#include "interfere/io.hpp"

using namespace interfere;
using io::Json;
namespace fs = std::filesystem;

namespace {

const fs::path kData = INTERFERE_DATA_DIR;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string eval(const std::string& label) { return (kData / "evaluation" / (label + ".json")).string(); }

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("interfere-cli-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream(path) << text;
}

std::size_t line_count(const std::string& text) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

// Exactly one line of the form "error: <class>: <message>".
void check_single_error_line(const Result& r, ErrorKind kind) {
    CHECK(r.code == error_exit_code(kind));
    CHECK(line_count(r.err) == 1);
    CHECK(r.err.rfind("error: " + std::string(error_kind_name(kind)) + ": ", 0) == 0);
}

}  // namespace

TEST_CASE("predict a PTRANS self-pair") {
    const Result r = run({"predict", eval("PTRANS.I1.P6"), eval("PTRANS.I1.P6")});
    CHECK(r.code == 0);
    CHECK(r.out.find("predicted interference: 39.42%") != std::string::npos);
    CHECK(r.out.find("extrapolation") == std::string::npos);
}

TEST_CASE("predict two zero-access profiles") {
    const fs::path dir = scratch_dir("zero");
    write_text(dir / "z.json",
               R"({"label": "z", "units": "score", "vm_accesses": [{"sllc": 0, "dram": 0, "net": 0}]})");
    const Result r = run({"predict", (dir / "z.json").string(), (dir / "z.json").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("predicted interference: 0.00%") != std::string::npos);
}

TEST_CASE("predict a three-way MUFITS co-location") {
    const std::string m = eval("MUFITS.I1.P4");
    const Result r = run({"predict", m, m, m});
    CHECK(r.code == 0);
    CHECK(r.out.find("11.77%") != std::string::npos);
}

TEST_CASE("predict JSON output round-trips") {
    const fs::path dir = scratch_dir("report");
    const Result first =
        run({"predict", eval("FFT.I1.P4"), eval("HPL.I1.P4"), eval("DGEMM.I1.P4"), "--format", "json"});
    REQUIRE(first.code == 0);
    const Json report = Json::parse(first.out);
    CHECK(report.at("prediction").get<double>() > 0.0);
    CHECK(report.at("model").at("provenance") == "paper-default");
    write_text(dir / "report.json", first.out);
    const Result again = run({"predict", "--report", (dir / "report.json").string(), "--format", "json"});
    REQUIRE(again.code == 0);
    CHECK(again.out == first.out);
    CHECK(Json::parse(again.out).at("prediction").get<double>() == report.at("prediction").get<double>());
}

TEST_CASE("predict needs a calibration for raw profiles") {
    const std::string s1 = (kData / "synthetic" / "S1.json").string();
    const std::string s2 = (kData / "synthetic" / "S2.json").string();
    ::unsetenv(cli::kCalibrationEnv);
    check_single_error_line(run({"predict", s1, s2}), ErrorKind::Calibration);

    const Result with_flag =
        run({"predict", s1, s2, "--calibration", (kData / "calibration.json").string(), "--decimals", "1"});
    CHECK(with_flag.code == 0);

    ::setenv(cli::kCalibrationEnv, (kData / "calibration.json").c_str(), 1);
    const Result with_env = run({"predict", s1, s2, "--decimals", "1"});
    ::unsetenv(cli::kCalibrationEnv);
    CHECK(with_env.code == 0);
    CHECK(with_env.out == with_flag.out);
}

TEST_CASE("predict rejects mixed raw and score profiles") {
    const Result r = run({"predict", (kData / "synthetic" / "S1.json").string(), eval("HPL.I1.P6"),
                          "--calibration", (kData / "calibration.json").string()});
    check_single_error_line(r, ErrorKind::UnitMismatch);
}

TEST_CASE("usage errors exit with 1") {
    CHECK(run({}).code == 1);
    CHECK(run({"predict", "--format", "yaml", eval("HPL.I1.P6")}).code == 1);
    CHECK(run({"bogus"}).code == 1);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("normalize reproduces the one-decimal scores") {
    const Result r = run({"normalize", (kData / "synthetic" / "S2.json").string(), "--calibration",
                          (kData / "calibration.json").string(), "--decimals", "1", "--format", "json"});
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j.at("units") == "score");
    CHECK(j.at("vm_accesses")[0].at("sllc").get<double>() == doctest::Approx(0.5));
    CHECK(j.at("vm_accesses")[0].at("dram").get<double>() == doctest::Approx(0.1));
}

TEST_CASE("dataset, fit and histogram on the zero-noise oracle") {
    const fs::path dir = scratch_dir("pipeline");
    const std::string csv = (dir / "data.csv").string();
    const std::string model = (dir / "model.json").string();
    const Result built = run({"dataset", (kData / "plans" / "synthetic-pairwise.json").string(),
                              "--calibration", (kData / "calibration.json").string(), "--decimals",
                              "1", "--hidden", "0.5", "0.25", "0.125", "--out", csv});
    REQUIRE(built.code == 0);
    std::ifstream in(csv);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(line_count(text) == 172);

    const Result fitted = run({"fit", csv, "--out", model});
    REQUIRE(fitted.code == 0);
    CHECK(fitted.out.find("R2-adj: 1.000000") != std::string::npos);
    const InterferenceModel m = io::load_model(model);
    CHECK(std::abs(m.c1 - 0.5) / 0.5 <= 1e-9);
    CHECK(std::abs(m.c2 - 0.25) / 0.25 <= 1e-9);
    CHECK(std::abs(m.c3 - 0.125) / 0.125 <= 1e-9);
    CHECK(m.provenance == Provenance::Fitted);

    const Result predicted = run({"predict", eval("PTRANS.I1.P6"), eval("PTRANS.I1.P6"), "--model", model});
    CHECK(predicted.code == 0);
    // 0.5·0.36 + 0.25·0.64 + 0.125·0.1512
    CHECK(predicted.out.find("35.89%") != std::string::npos);

    const Result hist = run({"histogram", csv, "--bin-width", "0.25"});
    CHECK(hist.code == 0);
    CHECK(hist.out.rfind("bin_low,bin_high,count\n", 0) == 0);
}

TEST_CASE("fit reports residual checks on a noisy dataset") {
    const fs::path dir = scratch_dir("noisy");
    const std::string csv = (dir / "data.csv").string();
    REQUIRE(run({"dataset", (kData / "plans" / "synthetic-pairwise.json").string(), "--calibration",
                 (kData / "calibration.json").string(), "--decimals", "1", "--sigma", "0.05", "--seed",
                 "3", "--out", csv})
                .code == 0);
    const Result r = run({"fit", csv, "--format", "json"});
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j.at("residual_checks").size() == 3);
    CHECK(j.at("diagnostics").at("n") == 171);
    CHECK(std::abs(j.at("c1").get<double>() - 0.7498) < 0.05);
}

TEST_CASE("fit names collinear columns") {
    const fs::path dir = scratch_dir("collinear");
    std::ostringstream csv;
    csv << io::kDatasetHeader << '\n';
    for (int i = 1; i <= 10; ++i) {
        const double t = 0.1 * i;
        // g = 1 everywhere and t_dram = 1, so t3 = t_sllc = t1
        csv << t << ",1," << 0.05 * i * i << ",1,1,1," << t << ',' << 0.05 * i * i << ',' << t << ','
            << 0.3 * t << '\n';
    }
    write_text(dir / "data.csv", csv.str());
    const Result r = run({"fit", (dir / "data.csv").string()});
    check_single_error_line(r, ErrorKind::Collinearity);
    CHECK(r.err.find("t1,t3") != std::string::npos);
}

TEST_CASE("dataset plans of two members and of none") {
    const fs::path dir = scratch_dir("plans");
    write_text(dir / "two.json", R"({"members": [
        {"label": "a", "units": "score", "vm_accesses": [{"sllc": 0.1, "dram": 0.2, "net": 0.3}]},
        {"label": "b", "units": "score", "vm_accesses": [{"sllc": 0.3, "dram": 0.2, "net": 0.1}]}]})");
    const Result two = run({"dataset", (dir / "two.json").string()});
    CHECK(two.code == 0);
    CHECK(line_count(two.out) == 4);

    write_text(dir / "empty.json", R"({"members": []})");
    check_single_error_line(run({"dataset", (dir / "empty.json").string()}), ErrorKind::EmptyPlan);
}

TEST_CASE("dataset from external measurements") {
    const fs::path dir = scratch_dir("measured");
    write_text(dir / "plan.json", R"({"members": [
        {"label": "A", "units": "score", "vm_accesses": [{"sllc": 0.1, "dram": 0.2, "net": 0.3}]},
        {"label": "B", "units": "score", "vm_accesses": [{"sllc": 0.3, "dram": 0.2, "net": 0.1}]}]})");
    write_text(dir / "runs.csv",
               "colocation,member,runtime_s\nisolated,A,60\nisolated,B,80\nA+A,A,90\nA+B,A,100\nA+B,B,100\n");
    const Result r = run({"dataset", (dir / "plan.json").string(), "--runner", "external-measurements",
                          "--measurements", (dir / "runs.csv").string()});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string header, aa, ab, bb;
    std::getline(lines, header);
    std::getline(lines, aa);
    std::getline(lines, ab);
    std::getline(lines, bb);
    CHECK(aa.find(",0.5,A+A,") != std::string::npos);
    CHECK(ab.find("A+B") != std::string::npos);
    CHECK(bb.find("co-execution") != std::string::npos);
}

TEST_CASE("stress a small spec") {
    const Result r = run({"stress", "--spec", (kData / "specs" / "small.json").string(), "--workers",
                          "3", "--format", "json"});
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    // 4·2000·ceil(65536/8)·3 per worker
    CHECK(j.at("element_accesses").get<std::uint64_t>() == 3ull * 4 * 2000 * 8192 * 3);
    CHECK(j.at("sqrt_evaluations").get<std::uint64_t>() == 3ull * 4 * 2000 * 8192 * 2);
    CHECK(j.at("bytes_sent").get<std::uint64_t>() == 3ull * 4 * 100 * 4096 * 2);
    CHECK(j.at("bytes_received") == j.at("bytes_sent"));
}

TEST_CASE("stress preset S1 on six workers") {
    const Result r = run({"stress", "--preset", "S1", "--workers", "6", "--format", "json"});
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j.at("spec").at("alpha") == 120000);
    CHECK(j.at("element_accesses").get<std::uint64_t>() == 6ull * 25 * 120000 * 14 * 3);
    CHECK(j.at("bytes_sent").get<std::uint64_t>() == 6ull * 25 * 5200 * 22600 * 5);
}

TEST_CASE("stress over loopback") {
    const Result r = run({"stress", "--spec", (kData / "specs" / "small.json").string(), "--workers",
                          "2", "--transport", "loopback"});
    CHECK(r.code == 0);
    CHECK(r.out.find("(loopback)") != std::string::npos);
}

TEST_CASE("stress with an unknown preset") {
    check_single_error_line(run({"stress", "--preset", "S99"}), ErrorKind::UnknownLabel);
}

TEST_CASE("plan pairs DGEMM with PTRANS") {
    const std::string p = eval("PTRANS.I1.P6");
    const std::string d = eval("DGEMM.I1.P6");
    const Result r = run({"plan", p, d, p, d, "--slots", "2", "--format", "json"});
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    REQUIRE(j.at("assignment").size() == 2);
    for (const Json& group : j.at("assignment")) {
        CHECK(group.at("members") == Json::array({"DGEMM.I1.P6", "PTRANS.I1.P6"}));
    }
    const Result table = run({"plan", p, d, p, d});
    CHECK(table.out.find("heuristic") != std::string::npos);
    check_single_error_line(run({"plan", p, d, p, "--slots", "2"}), ErrorKind::Config);
}

TEST_CASE("malformed input files map to a single error line") {
    const fs::path dir = scratch_dir("malformed");
    write_text(dir / "bad.json", "{ not json");
    check_single_error_line(run({"predict", (dir / "bad.json").string(), (dir / "bad.json").string()}),
                            ErrorKind::Load);
    write_text(dir / "neg.json",
               R"({"label": "n", "units": "score", "vm_accesses": [{"sllc": -1, "dram": 0, "net": 0}]})");
    check_single_error_line(run({"predict", (dir / "neg.json").string(), (dir / "neg.json").string()}),
                            ErrorKind::MalformedProfile);
}
