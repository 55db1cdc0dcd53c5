#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cogmac/cli.hpp"
#include "cogmac/result_io.hpp"

using namespace cogmac;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("cogmac_test_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

std::string write_file(const TempDir& dir, const std::string& name,
                       const std::string& text) {
    const std::string p = dir.file(name);
    std::ofstream(p) << text;
    return p;
}

std::vector<ResultRow> read_rows(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    return read_csv(in);
}

} // namespace

TEST_CASE("cli usage errors") {
    CHECK(run_cli({"no-such-command"}) == 1);
    CHECK(run_cli({}) == 1);
    CHECK(run_cli({"analyze-aloha"}) == 1);             // missing --config
    CHECK(run_cli({"analyze-aloha", "--config", "/nonexistent.json"}) == 1);
    CHECK(run_cli({"figures", "no-such-recipe"}) == 1);
    CHECK(run_cli({"figures", "--list"}) == 0);
}

TEST_CASE("analyze-aloha with q=0 yields an all-zero series") {
    TempDir dir;
    const std::string cfg = write_file(dir, "cfg.json", R"({
        "channels": {"widths": [1, 2], "thetas": [0.2, 0.5]},
        "population": {"m_range": {"from": 1, "to": 12}, "q": 0.0}
    })");
    const std::string out = dir.file("out.csv");
    CHECK(run_cli({"analyze-aloha", "--config", cfg, "--out", out}) == 0);
    const auto rows = read_rows(out);
    CHECK(rows.size() == 12 * 4);
    for (const auto& r : rows) {
        CHECK(r.value == 0.0);
        CHECK(r.provenance == Provenance::analytic);
    }
    CHECK(fs::exists(out + ".manifest.json"));
}

TEST_CASE("sweep override and csv output") {
    TempDir dir;
    const std::string cfg = write_file(dir, "cfg.json", R"({
        "channels": {"widths": [1, 1, 1], "thetas": [0.1, 0.4, 0.7]},
        "population": {"q": 0.5}
    })");
    const std::string out = dir.file("sweep.csv");
    CHECK(run_cli({"analyze-aloha", "--config", cfg, "--out", out, "--sweep",
                   "M=2..10:2"}) == 0);
    const auto rows = read_rows(out);
    // 5 sweep points, 4 metrics each
    CHECK(rows.size() == 20);
    CHECK(rows.front().coords.front().first == "M");
    CHECK(rows.front().coords.front().second == 2.0);
    // bad sweep strings are validation errors
    CHECK(run_cli({"analyze-aloha", "--config", cfg, "--sweep", "M=5"}) == 1);
    CHECK(run_cli({"analyze-aloha", "--config", cfg, "--sweep", "M=9..2"}) == 1);
}

TEST_CASE("simulate aloha reproducibly") {
    TempDir dir;
    const std::string cfg = write_file(dir, "cfg.json", R"({
        "channels": {"widths": [1, 1], "thetas": [0.0, 0.0]},
        "population": {"m": 2, "q": 1.0},
        "simulation": {"slots": 5000, "seed": 42, "shards": 2}
    })");
    const std::string o1 = dir.file("a.csv"), o2 = dir.file("b.csv");
    CHECK(run_cli({"simulate", "--config", cfg, "--out", o1}) == 0);
    CHECK(run_cli({"simulate", "--config", cfg, "--out", o2}) == 0);
    const auto r1 = read_rows(o1), r2 = read_rows(o2);
    REQUIRE(!r1.empty());
    CHECK(r1.size() == r2.size());
    for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i] == r2[i]);
    CHECK(r1.front().metric == "aloha_throughput");
    CHECK(r1.front().provenance == Provenance::simulated);
    CHECK(r1.front().seed == 42);
}

TEST_CASE("optimize emits the scheme and report metrics") {
    TempDir dir;
    const std::string cfg = write_file(dir, "cfg.json", R"({
        "channels": {"widths": [2, 1], "thetas": [0.0, 0.0]},
        "scheme": {"kind": "optimal", "s": 1},
        "population": {"m": 2}
    })");
    const std::string out = dir.file("opt.csv");
    CHECK(run_cli({"optimize", "--config", cfg, "--out", out}) == 0);
    const auto rows = read_rows(out);
    double p0 = -1.0, nu = -1.0;
    for (const auto& r : rows) {
        if (r.metric == "prob" && r.coords.back().second == 0.0) p0 = r.value;
        if (r.metric == "nu") nu = r.value;
    }
    CHECK(p0 == doctest::Approx(2.0 / 3).epsilon(1e-8));
    CHECK(nu == doctest::Approx(4.0 / 3).epsilon(1e-8));
}

TEST_CASE("compare produces nonnegative losses") {
    TempDir dir;
    const std::string cfg = write_file(dir, "cfg.json", R"({
        "channels": {"widths": [1, 1, 1, 1], "thetas": [0.1, 0.3, 0.5, 0.7]},
        "population": {"m_range": {"from": 4, "to": 16, "step": 4}}
    })");
    const std::string out = dir.file("cmp.csv");
    CHECK(run_cli({"compare", "--config", cfg, "--out", out}) == 0);
    for (const auto& r : read_rows(out))
        if (r.metric == "loss_percentage") CHECK(r.value >= -1e-9);
}

TEST_CASE("cell command on the shipped scenario") {
    TempDir dir;
    const std::string out = dir.file("cell.csv");
    const std::string cfg =
        std::string(COGMAC_SOURCE_DIR) + "/scenarios/cell_reference.json";
    CHECK(run_cli({"cell", "--config", cfg, "--out", out, "--sweep",
                   "M=10..30:10"}) == 0);
    const auto rows = read_rows(out);
    bool has_rd = false, has_tp = false;
    for (const auto& r : rows) {
        if (r.metric == "detection_radius") has_rd = true;
        if (r.metric == "cell_throughput_normalized") has_tp = true;
    }
    CHECK(has_rd);
    CHECK(has_tp);
}

TEST_CASE("jsonl format round trips through the cli") {
    TempDir dir;
    const std::string cfg = write_file(dir, "cfg.json", R"({
        "channels": {"widths": [1], "thetas": [0.5]},
        "population": {"m": 3, "q": 0.5}
    })");
    const std::string out = dir.file("rows.jsonl");
    CHECK(run_cli({"analyze-aloha", "--config", cfg, "--out", out, "--format",
                   "jsonl"}) == 0);
    std::ifstream in(out);
    const auto rows = read_jsonl(in);
    CHECK(!rows.empty());
}
