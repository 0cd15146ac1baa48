#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "sausage/report.hpp"
#include "sausagelab/app.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Scratch {
  fs::path root;
  Scratch() {
    root = fs::temp_directory_path() / ("sausage_cli_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Scratch() { fs::remove_all(root); }

  fs::path config(const std::string& name, const std::string& text) const {
    const fs::path p = root / (name + ".json");
    std::ofstream(p) << text;
    return p;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(const std::string& cmd, const fs::path& config, const fs::path& out,
        std::vector<std::string> extra = {}) {
  std::vector<std::string> args{cmd, "--config", config.string(), "--out", out.string()};
  args.insert(args.end(), extra.begin(), extra.end());
  return sausagelab::run_command(args);
}

}  // namespace

TEST_CASE("report formatting") {
  using sausage::CsvTable;
  CHECK(sausage::format_number(0.1) == "0.10000000000000001");
  CHECK(sausage::format_number(1.0 / 0.0) == "inf");
  CHECK(sausage::hex64(sausage::fnv1a("")) == "cbf29ce484222325");
  CHECK(sausage::hex64(sausage::fnv1a("a")) == "af63dc4c8601ec8c");
  CsvTable t({{"n", CsvTable::Type::kInt}, {"x", CsvTable::Type::kFloat}, {"ok", CsvTable::Type::kBool}});
  t.row().cell(3).cell(0.5).cell(true);
  CHECK(t.str() == "n:int,x:float,ok:bool\n3,0.5,true\n");
}

TEST_CASE("sausage with nu = 0 reports zero L and exits 0") {
  Scratch s;
  const fs::path cfg = s.config("z", R"({"space": {"kind": "path", "n": 101}, "start": 50, "nu": 0,
                                        "times": [2, 4, 8]})");
  REQUIRE(run("sausage", cfg, s.root / "out") == sausagelab::kOk);
  const std::string csv = slurp(s.root / "out" / "results_sausage.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line.rfind("t:float,", 0) == 0);
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    CHECK(cells[8] == "0");
    CHECK(cells[9] == "0");
  }
  CHECK(rows == 3);
  const json manifest = json::parse(slurp(s.root / "out" / "manifest.json"));
  CHECK(manifest["seed"] == 1);
  CHECK(manifest["exit_code"] == 0);
  const json summary = json::parse(slurp(s.root / "out" / "summary_sausage.json"));
  CHECK(summary["config_hash"] == manifest["config_hash"]);
  CHECK(fs::exists(s.root / "out" / "series_scaling.csv"));
}

TEST_CASE("config errors exit 2") {
  Scratch s;
  CHECK(run("sausage", s.config("m", R"({"start": 1, "nu": 0, "times": [1]})"), s.root / "a") ==
        sausagelab::kConfigError);
  CHECK(run("sausage", s.config("b", "{\n  \"space\": ,\n}"), s.root / "b") == sausagelab::kConfigError);
  CHECK(run("sausage", s.config("c", R"({"space": {"kind": "path", "n": 5}, "start": 9, "nu": 1,
                                        "times": [1]})"), s.root / "c") == sausagelab::kConfigError);
  CHECK(run("sausage", s.config("d", R"({"space": {"kind": "torus"}, "start": 0, "nu": 1,
                                        "times": [1]})"), s.root / "d") == sausagelab::kConfigError);
  CHECK(sausagelab::run_command({"nonsense"}) == sausagelab::kConfigError);
  CHECK(sausagelab::run_command({"sausage", "--out", "x"}) == sausagelab::kConfigError);
}

TEST_CASE("resource cap exits 3") {
  Scratch s;
  const fs::path cfg = s.config("big", R"({"space": {"kind": "lattice_box", "dims": 2, "side": 50,
                                             "vertex_cap": 1000}, "start": 0, "nu": 1, "times": [1],
                                           "mode": "mc"})");
  CHECK(run("sausage", cfg, s.root / "out") == sausagelab::kResourceLimit);
}

TEST_CASE("failed assertions exit 1") {
  Scratch s;
  const fs::path cfg = s.config("f", R"({"space": {"kind": "lattice_box", "dims": 2, "side": 21},
                                        "start": 220, "expect_beta": [3.0, 3.5],
                                        "times": [4, 8, 16, 32, 64], "n_thirring": 2})");
  CHECK(run("spectral-audit", cfg, s.root / "out") == sausagelab::kAssertionFailed);
  const json summary = json::parse(slurp(s.root / "out" / "summary_spectral-audit.json"));
  REQUIRE(summary["failures"].size() == 1);
  CHECK(summary["failures"][0].get<std::string>().find("walk dimension") != std::string::npos);
}

TEST_CASE("seed precedence") {
  Scratch s;
  const fs::path cfg = s.config("p", R"({"space": {"kind": "path", "n": 31}, "start": 15, "nu": 0.2,
                                        "s": 1.0, "n_fields": 20, "n_paths": 5,
                                        "n_moment_paths": 200, "seed": 5})");
  REQUIRE(run("survival", cfg, s.root / "a") == sausagelab::kOk);
  CHECK(json::parse(slurp(s.root / "a" / "manifest.json"))["seed"] == 5);
  ::setenv("SAUSAGE_SEED", "6", 1);
  REQUIRE(run("survival", cfg, s.root / "b") == sausagelab::kOk);
  CHECK(json::parse(slurp(s.root / "b" / "manifest.json"))["seed"] == 6);
  REQUIRE(run("survival", cfg, s.root / "c", {"--seed", "7"}) == sausagelab::kOk);
  CHECK(json::parse(slurp(s.root / "c" / "manifest.json"))["seed"] == 7);
  ::unsetenv("SAUSAGE_SEED");
  CHECK(slurp(s.root / "a" / "results_survival.csv") != slurp(s.root / "b" / "results_survival.csv"));
}

TEST_CASE("every subcommand runs") {
  Scratch s;
  const fs::path space = s.config("space", R"({"space": {"kind": "sierpinski_gasket", "level": 4},
                                              "centers": [0, 5], "net_scale": 2})");
  CHECK(run("space-audit", space, s.root / "space") == sausagelab::kOk);
  CHECK(fs::exists(s.root / "space" / "series_volume.csv"));
  const fs::path cert = s.config("cert", R"({"space": {"kind": "path", "n": 61}, "start": 30,
                                            "nu": 1, "times": [3, 5],
                                            "upper": {"t": 2, "nu": 0.3, "n_fields": 3,
                                                      "tail": {"c": 0.1, "C": 1}}})");
  CHECK(run("certify", cert, s.root / "cert") == sausagelab::kOk);
  CHECK(fs::exists(s.root / "cert" / "series_upper_bound.csv"));
  const fs::path surv = s.config("surv", R"({"space": {"kind": "path", "n": 41}, "start": 20,
                                            "nu": 1, "s": 2, "n_fields": 50, "n_paths": 5,
                                            "cramer": {"radii": [4, 8], "frac": 0.3}})");
  CHECK(run("survival", surv, s.root / "surv") == sausagelab::kOk);
  CHECK(fs::exists(s.root / "surv" / "series_cramer.csv"));
}
