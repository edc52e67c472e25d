#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "batchrisk/io.hpp"

using namespace batchrisk;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = BATCHRISK_CLI_PATH;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("batchrisk_cli_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string sub(const std::string& name) const {
        return (path / name).string();
    }
};

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("cli: synth then a small fit produces the full output set") {
    TempDir dir;
    REQUIRE(run("synth --calibrated-default --seed 3 --out " + dir.sub("d")) ==
            0);
    CHECK(fs::exists(dir.sub("d") + "/baseline.csv"));
    CHECK(fs::exists(dir.sub("d") + "/summaries.csv"));
    CHECK(fs::exists(dir.sub("d") + "/truth.json"));
    CHECK(fs::exists(dir.sub("d") + "/manifest.json"));

    REQUIRE(run("fit --model combined --baseline " + dir.sub("d") +
                "/baseline.csv --summaries " + dir.sub("d") +
                "/summaries.csv --seed 5 --iterations 2000 --burnin 500 "
                "--thin 3 --chains 2 --threads 2 --out " +
                dir.sub("f")) == 0);
    CHECK(fs::exists(dir.sub("f") + "/draws.csv"));
    CHECK(fs::exists(dir.sub("f") + "/summary.json"));
    CHECK(fs::exists(dir.sub("f") + "/diagnostics.json"));

    const json summary = json::parse(read_text_file(dir.sub("f") + "/summary.json"));
    CHECK(summary["n_draws"] == 1000);
    CHECK(summary["parameters"].size() == 6);

    // draws round-trip through the downstream commands
    REQUIRE(run("mc-eval --draws " + dir.sub("f") +
                "/draws.csv --criterion 5/1/1000 --status not-met "
                "--batches-per-draw 10 --seed 2 --out " +
                dir.sub("m")) == 0);
    const json rep = json::parse(read_text_file(dir.sub("m") + "/conditional.json"));
    CHECK(rep["p_contaminated"] == 1.0);  // a failing batch is contaminated
    CHECK(rep["status"] == "not_met");

    REQUIRE(run("rr-grid --draws " + dir.sub("f") +
                "/draws.csv --criterion 5/1/1000 --criterion 5/5/1000 "
                "--batches 10 --servings 4 --seed 9 --threads 2 --out " +
                dir.sub("g")) == 0);
    CHECK(fs::exists(dir.sub("g") + "/grid.csv"));
    CHECK(fs::exists(dir.sub("g") + "/series.csv"));
    CHECK(fs::exists(dir.sub("g") + "/scatter.svg"));
    const std::string grid_text = read_text_file(dir.sub("g") + "/grid.csv");
    CHECK(grid_text.find("n,c,m,rr_mean,rr_lo,rr_hi,rpr,mrrr_mean,"
                         "reject_pct_mean,mc_se") == 0);
}

TEST_CASE("cli: exit code 2 on input errors") {
    TempDir dir;
    CHECK(run("fit --model combined --baseline /nonexistent.csv --summaries "
              "/nonexistent2.csv --out " +
              dir.sub("x")) == 2);
    CHECK(run("mc-eval --draws /nonexistent.csv --criterion 5/1/1000 --out " +
              dir.sub("y")) == 2);
    CHECK(run("qq --input /nonexistent.csv --out " + dir.sub("z")) == 2);
    CHECK(run("nonsense-subcommand") == 2);
}

TEST_CASE("cli: malformed criterion is an input error") {
    TempDir dir;
    REQUIRE(run("synth --calibrated-default --seed 1 --out " + dir.sub("d")) ==
            0);
    REQUIRE(run("fit --model baseline --baseline " + dir.sub("d") +
                "/baseline.csv --iterations 400 --burnin 100 --thin 1 "
                "--chains 1 --out " +
                dir.sub("f")) == 0);
    CHECK(run("mc-eval --draws " + dir.sub("f") +
              "/draws.csv --criterion 5/6/1000 --out " + dir.sub("m")) == 2);
    CHECK(run("rr-grid --draws " + dir.sub("f") +
              "/draws.csv --criterion five --out " + dir.sub("g")) == 2);
}

TEST_CASE("cli: prior sensitivity flag runs the uniform-sd variant") {
    TempDir dir;
    REQUIRE(run("synth --calibrated-default --seed 2 --n-baseline 150 --out " +
                dir.sub("d")) == 0);
    REQUIRE(run("fit --model baseline --baseline " + dir.sub("d") +
                "/baseline.csv --prior-variance uniform-sd --iterations 1500 "
                "--burnin 400 --thin 2 --chains 2 --seed 4 --out " +
                dir.sub("f")) == 0);
    const json summary = json::parse(read_text_file(dir.sub("f") + "/summary.json"));
    CHECK(summary["model"] == "baseline_only");
}

TEST_CASE("cli: dry runs validate without writing") {
    TempDir dir;
    REQUIRE(run("synth --calibrated-default --seed 1 --out " + dir.sub("d")) ==
            0);
    CHECK(run("fit --model baseline --baseline " + dir.sub("d") +
              "/baseline.csv --dry-run --out " + dir.sub("f")) == 0);
    CHECK_FALSE(fs::exists(dir.sub("f") + "/draws.csv"));
    CHECK_FALSE(fs::exists(dir.sub("f") + "/manifest.json"));
}

TEST_CASE("cli: qq emits quantile pairs for each schema") {
    TempDir dir;
    REQUIRE(run("synth --calibrated-default --seed 6 --out " + dir.sub("d")) ==
            0);
    REQUIRE(run("qq --input " + dir.sub("d") +
                "/baseline.csv --schema baseline --out " + dir.sub("q1")) == 0);
    const std::string qq = read_text_file(dir.sub("q1") + "/qq.csv");
    CHECK(qq.find("theoretical_quantile,sample_quantile") == 0);

    REQUIRE(run("qq --input " + dir.sub("d") +
                "/summaries.csv --schema summaries --out " + dir.sub("q2")) ==
            0);

    write_text_file(dir.sub("vals.txt"), "1.0\n2.0\n3.5\n0.7\n");
    REQUIRE(run("qq --input " + dir.sub("vals.txt") + " --schema values --out " +
                dir.sub("q3")) == 0);
    // line count: header + 4 points
    std::istringstream in(read_text_file(dir.sub("q3") + "/qq.csv"));
    std::string line;
    int lines = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++lines;
    CHECK(lines == 5);
}

TEST_CASE("cli: rpr measure writes the single-number column") {
    TempDir dir;
    REQUIRE(run("synth --calibrated-default --seed 8 --n-baseline 100 --out " +
                dir.sub("d")) == 0);
    REQUIRE(run("fit --model combined --baseline " + dir.sub("d") +
                "/baseline.csv --summaries " + dir.sub("d") +
                "/summaries.csv --iterations 1200 --burnin 300 --thin 3 "
                "--chains 1 --seed 3 --out " +
                dir.sub("f")) == 0);
    REQUIRE(run("rr-grid --draws " + dir.sub("f") +
                "/draws.csv --criterion 5/1/1000 --measure rpr --seed 2 "
                "--out " +
                dir.sub("r")) == 0);
    const std::string text = read_text_file(dir.sub("r") + "/rpr.csv");
    CHECK(text.find("n,c,m,rpr") == 0);
    CHECK_FALSE(fs::exists(dir.sub("r") + "/series.csv"));
    CHECK_FALSE(fs::exists(dir.sub("r") + "/scatter.svg"));
}

TEST_CASE("cli: qmra spec file and thread env var are honored") {
    TempDir dir;
    REQUIRE(run("synth --calibrated-default --seed 4 --n-baseline 120 --out " +
                dir.sub("d")) == 0);
    REQUIRE(run("fit --model baseline --baseline " + dir.sub("d") +
                "/baseline.csv --iterations 800 --burnin 200 --thin 2 "
                "--chains 1 --seed 9 --out " +
                dir.sub("f")) == 0);

    // shipped default asset parses and drives a grid run
    const std::string asset = std::string(BATCHRISK_SOURCE_DIR) +
                              "/configs/qmra_default.json";
    REQUIRE(fs::exists(asset));
    REQUIRE(run("rr-grid --draws " + dir.sub("f") +
                "/draws.csv --criterion 5/1/1000 --qmra " + asset +
                " --batches 5 --servings 2 --out " + dir.sub("g1")) == 0);
    // the asset matches the built-in default, so results are identical
    REQUIRE(run("rr-grid --draws " + dir.sub("f") +
                "/draws.csv --criterion 5/1/1000 --batches 5 --servings 2 "
                "--out " +
                dir.sub("g2")) == 0);
    CHECK(read_text_file(dir.sub("g1") + "/grid.csv") ==
          read_text_file(dir.sub("g2") + "/grid.csv"));

    // malformed spec file is an input error
    write_text_file(dir.sub("bad.json"), "{\"transfer_probability\": 3}");
    CHECK(run("rr-grid --draws " + dir.sub("f") +
              "/draws.csv --criterion 5/1/1000 --qmra " + dir.sub("bad.json") +
              " --out " + dir.sub("g3")) == 2);

    // env-var thread default is accepted and cannot change results
    const int status = std::system(
        ("BATCHRISK_THREADS=3 " + kCli + " rr-grid --draws " + dir.sub("f") +
         "/draws.csv --criterion 5/1/1000 --batches 5 --servings 2 --out " +
         dir.sub("g4") + " >/dev/null 2>&1")
            .c_str());
    REQUIRE(WEXITSTATUS(status) == 0);
    CHECK(read_text_file(dir.sub("g4") + "/grid.csv") ==
          read_text_file(dir.sub("g2") + "/grid.csv"));
}

TEST_CASE("cli: fixed seeds reproduce byte-identical data files") {
    TempDir dir;
    REQUIRE(run("synth --calibrated-default --seed 12 --out " + dir.sub("a")) ==
            0);
    REQUIRE(run("synth --calibrated-default --seed 12 --out " + dir.sub("b")) ==
            0);
    CHECK(sha256_file(dir.sub("a") + "/baseline.csv") ==
          sha256_file(dir.sub("b") + "/baseline.csv"));
    CHECK(sha256_file(dir.sub("a") + "/summaries.csv") ==
          sha256_file(dir.sub("b") + "/summaries.csv"));
    CHECK(sha256_file(dir.sub("a") + "/truth.json") ==
          sha256_file(dir.sub("b") + "/truth.json"));
}
