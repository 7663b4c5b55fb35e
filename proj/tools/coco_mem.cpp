// coco_mem: run experiments, check invariants, print bound reports.
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "cocom/harness.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kRuntime = 2, kCheck = 3 };

struct Common {
  std::string config;
  int seeds = 0;
  int parallel = 1;
};

cocom::ExperimentConfig load(const Common& c) {
  cocom::ExperimentConfig cfg = cocom::load_config(c.config);
  if (c.seeds > 0) {
    cfg.seeds.clear();
    for (int i = 1; i <= c.seeds; ++i) cfg.seeds.push_back(static_cast<std::uint64_t>(i));
  }
  return cfg;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "experiment JSON")->required()->check(CLI::ExistingFile);
  sub->add_option("--seeds", c.seeds, "use seeds 1..n instead of the config list")->check(CLI::PositiveNumber);
  sub->add_option("--parallel", c.parallel, "seeds run concurrently")->check(CLI::PositiveNumber);
}

int cmd_run(const Common& c, std::string out) {
  cocom::ExperimentConfig cfg = load(c);
  if (out.empty()) {
    if (const char* env = std::getenv("COCO_MEM_OUT"); env && *env) out = env;
    else out = cfg.output;
  }
  cocom::ExperimentSummary s = cocom::run_experiment(cfg, out, c.parallel);
  std::cout << "wrote " << (cfg.seeds.size() - static_cast<std::size_t>(s.failed)) << " seed(s) to " << out << '\n';
  for (const auto& r : s.results)
    if (!r.ok) std::cerr << "seed " << r.seed << " failed: " << r.error << '\n';
  return s.failed > 0 ? kRuntime : kOk;
}

int cmd_verify(const Common& c) {
  cocom::ExperimentConfig cfg = load(c);
  cocom::ExperimentSummary s = cocom::run_experiment(cfg, "", c.parallel);
  int bad = 0;
  for (const auto& r : s.results) {
    for (const auto& chk : cocom::verify_seed(cfg, r)) {
      std::cout << (chk.ok ? "PASS " : "FAIL ") << "seed=" << r.seed << ' ' << chk.name
                << " lhs=" << cocom::format_double(chk.lhs) << " rhs=" << cocom::format_double(chk.rhs) << '\n';
      if (!chk.ok) ++bad;
    }
  }
  std::cout << (bad ? "verify: " + std::to_string(bad) + " check(s) failed" : std::string("verify: all checks passed"))
            << '\n';
  return bad ? kCheck : kOk;
}

int cmd_bounds(const Common& c) {
  cocom::ExperimentConfig cfg = load(c);
  cocom::ExperimentSummary s = cocom::run_experiment(cfg, "", c.parallel);
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : s.results) {
    nlohmann::json j = {{"seed", r.seed}, {"ok", r.ok}};
    if (r.ok) j["report"] = r.bounds.to_json();
    else j["error"] = r.error;
    out.push_back(j);
  }
  std::cout << out.dump(2) << '\n';
  return s.failed > 0 ? kRuntime : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online learning with memory and long-term constraints"};
  app.require_subcommand(1);

  Common run_c, verify_c, bounds_c;
  std::string out;
  auto* run = app.add_subcommand("run", "run all seeds and write CSV + summary.json");
  add_common(run, run_c);
  run->add_option("--out", out, "output directory (default: $COCO_MEM_OUT, then the config)");
  auto* verify = app.add_subcommand("verify", "run all seeds and check the invariant suite");
  add_common(verify, verify_c);
  auto* bounds = app.add_subcommand("bounds", "print the bound report per seed");
  add_common(bounds, bounds_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(run_c, out);
    if (*verify) return cmd_verify(verify_c);
    return cmd_bounds(bounds_c);
  } catch (const cocom::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
