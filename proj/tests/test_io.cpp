#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ch3/io.hpp"

using namespace ch3;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("ch3_io_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("field snapshots round-trip bit-exact") {
    TempDir tmp;
    auto g = make_grid(128, 25.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> val(-3.0, 3.0);
    Field f = make_field(g);
    for (auto& v : f.values) v = val(rng);

    const auto path = tmp.path / "field.bin";
    write_field(path, f);
    Field back = read_field(path);
    CHECK(back.size() == f.size());
    CHECK(back.grid->half_width() == f.grid->half_width());
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == f[i]);

    // Header layout: magic, u64 n, f64 L.
    std::ifstream in(path, std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    CHECK(std::string(magic, 4) == "C3F1");
}

TEST_CASE("state snapshots round-trip bit-exact") {
    TempDir tmp;
    auto g = make_grid(64, 10.0);
    StateTriple z = make_state(g, 1.75);
    for (std::size_t i = 0; i < z.u.size(); ++i) {
        z.u[i] = std::sin(0.1 * static_cast<double>(i));
        z.v[i] = 0.5 - 0.01 * static_cast<double>(i);
        z.w[i] = static_cast<double>(i % 7);
    }
    const auto path = tmp.path / "state.bin";
    write_state(path, z);
    StateTriple back = read_state(path);
    CHECK(back.t == z.t);
    for (std::size_t i = 0; i < z.u.size(); ++i) {
        CHECK(back.u[i] == z.u[i]);
        CHECK(back.v[i] == z.v[i]);
        CHECK(back.w[i] == z.w[i]);
    }

    std::ifstream in(path, std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    CHECK(std::string(magic, 4) == "C3S1");
}

TEST_CASE("reading a mismatched magic fails") {
    TempDir tmp;
    auto g = make_grid(64, 10.0);
    write_field(tmp.path / "f.bin", make_field(g));
    CHECK_THROWS(read_state(tmp.path / "f.bin"));
    CHECK_THROWS(read_field(tmp.path / "missing.bin"));
}

TEST_CASE("CSV exports carry the documented columns") {
    TempDir tmp;
    auto g = make_grid(64, 10.0);
    Field f = sample_function(g, [](double x) { return x * x; });
    write_field_csv(tmp.path / "field.csv", f);
    std::ifstream in(tmp.path / "field.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,value");
    std::string first;
    std::getline(in, first);
    CHECK(first.substr(0, 4) == "-10,");

    StateTriple z = make_state(g);
    write_state_csv(tmp.path / "state.csv", z);
    std::ifstream sin_(tmp.path / "state.csv");
    std::getline(sin_, header);
    CHECK(header == "x,u,v,w");

    std::vector<DiagnosticsRecord> recs(2);
    recs[0].t = 0.0;
    recs[0].weighted["JN:0.5:4"] = 1.0;
    recs[1].t = 0.5;
    recs[1].weighted["JN:0.5:4"] = 2.0;
    write_diagnostics_csv(tmp.path / "diag.csv", recs);
    std::ifstream din(tmp.path / "diag.csv");
    std::getline(din, header);
    CHECK(header == "t,E,Q,min_ux,min_vx,min_wx,sup_sq_sum,JN:0.5:4");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(din, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);
}

TEST_CASE("termination reports serialize to JSON") {
    TempDir tmp;
    TerminationReport report;
    report.reason = StopReason::wave_breaking;
    report.t_final = 0.125;
    report.slope_threshold_used = 100.0;
    report.min_slope_history = {{0.0, -22.0}, {0.1, -80.0}, {0.12, -130.0}};
    write_termination_report(tmp.path / "report.json", report, 95.8, -14156.0);

    std::ifstream in(tmp.path / "report.json");
    nlohmann::json doc = nlohmann::json::parse(in);
    CHECK(doc["reason"] == "wave_breaking");
    CHECK(doc["t_final"] == doctest::Approx(0.125));
    CHECK(doc["E0"] == doctest::Approx(95.8));
    CHECK(doc.contains("lifespan_bound"));
    CHECK(doc.contains("blowup_threshold"));
    CHECK(doc["min_slope_history_tail"].size() == 3);
}

TEST_CASE("format_double is round-trip exact") {
    for (double v : {0.1, -3.25e-17, 1.0 / 3.0, 12345.6789, 1e300}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}
