#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cocom/harness.hpp"

using namespace cocom;
namespace fs = std::filesystem;

namespace {

ExperimentConfig cfg_from(const std::string& text) { return ExperimentConfig::from_json(nlohmann::json::parse(text)); }

const char* kOgd = R"({"algorithm": "penalty_ogd", "variant": "coco_m2",
  "environment": {"family": "appendix_a", "m": 3, "T": 200, "mode": "stochastic"},
  "penalty": {"kind": "quadratic", "lambda": {"mode": "inv_sqrt_t"}}, "seeds": 10})";

const char* kOdaf = R"({"algorithm": "odaf", "variant": "coco_m2",
  "environment": {"family": "separable", "m": 2, "T": 150},
  "predictor": {"kind": "noisy", "scale": 0.5}, "seeds": [3]})";

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("cocom_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("CSV layout") {
  for (const char* text : {kOgd, kOdaf}) {
    ExperimentConfig cfg = cfg_from(text);
    SeedResult r = run_seed(cfg, cfg.seeds.front());
    REQUIRE(r.ok);
    auto lines = split(csv_string(r), '\n');
    CHECK(lines[0].rfind("# seed=", 0) == 0);
    CHECK(lines[1] ==
          "t,x,f_mem,g_mem,g_plus_recorded,V_t,eta_or_mu,eps_f,eps_g,eps_Z,regret_static_cum,regret_perround_cum,ccv_cum");
    CHECK(lines.size() == static_cast<std::size_t>(cfg.T() - cfg.m() + 1) + 2);
    for (std::size_t k = 2; k < lines.size(); ++k) {
      auto cols = split(lines[k], ',');
      REQUIRE(cols.size() == 13);
      if (cfg.algorithm == Algorithm::PenaltyOgd) CHECK((cols[7] == "0" && cols[8] == "0" && cols[9] == "0"));
    }
    CHECK(split(lines[2], ',')[0] == std::to_string(cfg.first_round()));
  }
}

TEST_CASE("runs are deterministic") {
  for (const char* text : {kOgd, kOdaf}) {
    ExperimentConfig cfg = cfg_from(text);
    CHECK(csv_string(run_seed(cfg, 7)) == csv_string(run_seed(cfg, 7)));
    CHECK(csv_string(run_seed(cfg, 7)) != csv_string(run_seed(cfg, 8)));
  }
}

TEST_CASE("shortest round-trip number format") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(std::nan("")) == "nan");
  double v = 1.0 / 3.0;
  CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("summary aggregates match an average over the written CSVs") {
  ExperimentConfig cfg = cfg_from(kOgd);
  cfg.checkpoints = {20, 100, 200};
  fs::path dir = scratch("aggregate");
  ExperimentSummary s = run_experiment(cfg, dir.string(), 4);
  REQUIRE(s.failed == 0);
  std::ifstream sj(dir / "summary.json");
  nlohmann::json summary = nlohmann::json::parse(sj);
  for (std::size_t ci = 0; ci < cfg.checkpoints.size(); ++ci) {
    int c = cfg.checkpoints[ci];
    double sum = 0.0, sum_ccv = 0.0;
    for (int seed = 1; seed <= 10; ++seed) {
      std::ifstream in(dir / ("seed_" + std::to_string(seed) + ".csv"));
      std::string line;
      while (std::getline(in, line)) {
        auto cols = split(line, ',');
        if (line.empty() || line[0] == '#' || cols[0] == "t") continue;
        if (std::stoi(cols[0]) == c) {
          sum += std::stod(cols[10]) / c;
          sum_ccv += std::stod(cols[12]) / c;
        }
      }
    }
    const auto& cp = summary["checkpoints"][ci];
    CHECK(cp["t"] == c);
    CHECK(cp["regret_static_over_t"]["n"] == 10);
    CHECK(cp["regret_static_over_t"]["mean"].get<double>() == doctest::Approx(sum / 10).epsilon(1e-12));
    CHECK(cp["ccv_over_t"]["mean"].get<double>() == doctest::Approx(sum_ccv / 10).epsilon(1e-12));
  }
  CHECK(summary["seeds_ok"] == 10);
  CHECK(summary["failed_seeds"].empty());
  fs::remove_all(dir);
}

TEST_CASE("parallel and serial runs write identical files") {
  ExperimentConfig cfg = cfg_from(kOdaf);
  cfg.seeds = {1, 2, 3, 4};
  fs::path a = scratch("serial"), b = scratch("parallel");
  run_experiment(cfg, a.string(), 1);
  run_experiment(cfg, b.string(), 4);
  for (int seed = 1; seed <= 4; ++seed) {
    auto name = "seed_" + std::to_string(seed) + ".csv";
    std::ifstream fa(a / name), fb(b / name);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("unsupported combinations are rejected") {
  auto rejects = [](const std::string& text) {
    CHECK_THROWS_AS(cfg_from(text).validate(), ConfigError);
  };
  // exponential penalty with the windowed constraint
  rejects(R"({"algorithm": "penalty_ogd", "variant": "coco_m2", "penalty": {"kind": "exponential"}})");
  // optimistic learner on the appendix environment
  rejects(R"({"algorithm": "odaf", "environment": {"family": "appendix_a"}})");
  // optimistic learner with a schedule
  rejects(R"({"algorithm": "odaf", "penalty": {"lambda": {"mode": "inv_sqrt_t"}}})");
  rejects(R"({"algorithm": "odaf", "penalty": {"kind": "quadratic"}})");
  rejects(R"({"algorithm": "odaf", "variant": "coco_m"})");
  rejects(R"({"penalty": {"lambda": -1}})");
  rejects(R"({"seeds": []})");
  CHECK_THROWS_AS(cfg_from(R"({"algorithm": "nope"})"), ConfigError);
  CHECK_THROWS_AS(cfg_from(R"({"environment": {"T": "long"}})"), ConfigError);
  CHECK_THROWS_AS(cfg_from(R"([1, 2])"), ConfigError);
  CHECK_NOTHROW(cfg_from(kOgd).validate());
  CHECK_NOTHROW(cfg_from(kOdaf).validate());
  CHECK_NOTHROW(cfg_from(R"({"algorithm": "odaf", "variant": "coco_m",
                             "environment": {"memoryless_constraint": true}})").validate());
}

TEST_CASE("config round trip and seed count shorthand") {
  ExperimentConfig cfg = cfg_from(kOgd);
  CHECK(cfg.seeds.size() == 10);
  CHECK(cfg.seeds.front() == 1);
  CHECK(cfg.seeds.back() == 10);
  ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());
  auto top = cfg_from(R"({"T": 99, "m": 1, "environment": {"T": 5000}})");
  CHECK(top.T() == 99);
  CHECK(top.m() == 1);
}

TEST_CASE("verify suite passes on small runs") {
  for (const char* text : {kOgd, kOdaf}) {
    ExperimentConfig cfg = cfg_from(text);
    cfg.seeds = {1, 2};
    for (auto seed : cfg.seeds) {
      SeedResult r = run_seed(cfg, seed);
      REQUIRE(r.ok);
      for (const Check& c : verify_seed(cfg, r)) {
        INFO(c.name << " lhs=" << c.lhs << " rhs=" << c.rhs);
        CHECK(c.ok);
      }
    }
  }
}

TEST_CASE("schedules report no theorem precondition") {
  ExperimentConfig cfg = cfg_from(kOgd);
  SeedResult r = run_seed(cfg, 1);
  CHECK_FALSE(r.fixed_lambda);
  CHECK_FALSE(r.bounds.precondition_ok);
  CHECK(r.lambda == doctest::Approx(1.0 / std::sqrt(200.0)));
}
