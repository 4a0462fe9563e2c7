#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "coagfuse/config.hpp"
#include "coagfuse/experiments.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t replicas = 0;  // 0: use config value
  std::uint64_t seed = 0;      // 0: use config value
  bool seed_set = false;
};

coagfuse::RunSetup load_setup(const CommonArgs& args) {
  coagfuse::Config cfg = args.config_path.empty()
                             ? coagfuse::Config::from_string("")
                             : coagfuse::Config::from_file(args.config_path);
  if (args.seed_set) cfg.set("sim.seed", std::to_string(args.seed));
  if (args.replicas > 0) cfg.set("study.replicas", std::to_string(args.replicas));
  return coagfuse::load_run_setup(cfg);
}

void attach_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "flat key=value config file");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--replicas", args.replicas, "replica count (overrides study.replicas)");
  cmd->add_option("--seed", args.seed, "base RNG seed (overrides sim.seed)")
      ->each([&args](const std::string&) { args.seed_set = true; });
}

int finish(const coagfuse::StudyReport& report, const std::string& out_dir) {
  coagfuse::write_study_outputs(report, out_dir);
  for (const auto& check : report.checks) {
    std::cout << (check.pass ? "[PASS] " : "[FAIL] ") << check.name
              << " value=" << check.value << " threshold=" << check.threshold << "\n";
  }
  std::cout << report.name << ": " << (report.all_pass ? "all checks passed" : "CHECKS FAILED")
            << ", outputs in " << out_dir << "\n";
  return report.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coagfuse: two-component coagulation-fusion simulator"};
  app.require_subcommand(1);

  CommonArgs mc_args, sect_args, smolu_args, fast_args, slow_args, cross_args;

  CLI::App* run_mc = app.add_subcommand("run-mc", "stochastic particle simulation");
  attach_common(run_mc, mc_args);

  CLI::App* run_sect = app.add_subcommand("run-sectional", "deterministic (v,e) grid solver");
  attach_common(run_sect, sect_args);

  CLI::App* run_smolu =
      app.add_subcommand("run-smolu1d", "one-dimensional limit-equation solver");
  attach_common(run_smolu, smolu_args);

  CLI::App* study = app.add_subcommand("study", "automated limit-regime studies");
  study->require_subcommand(1);
  CLI::App* fast = study->add_subcommand("fast-fusion", "lambda -> 0 sweep");
  attach_common(fast, fast_args);
  CLI::App* slow = study->add_subcommand("slow-fusion", "lambda -> inf sweep");
  attach_common(slow, slow_args);
  CLI::App* cross = study->add_subcommand("cross-validate", "MC vs sectional moments");
  attach_common(cross, cross_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_mc->parsed()) {
      const auto setup = load_setup(mc_args);
      const std::size_t replicas = mc_args.replicas > 0 ? mc_args.replicas : setup.replicas;
      return finish(coagfuse::run_mc_command(setup, replicas), mc_args.out_dir);
    }
    if (run_sect->parsed()) {
      const auto setup = load_setup(sect_args);
      return finish(coagfuse::run_sectional_command(setup), sect_args.out_dir);
    }
    if (run_smolu->parsed()) {
      const auto setup = load_setup(smolu_args);
      return finish(coagfuse::run_smolu1d_command(setup), smolu_args.out_dir);
    }
    if (study->parsed()) {
      if (fast->parsed()) {
        return finish(coagfuse::study_fast_fusion(load_setup(fast_args)), fast_args.out_dir);
      }
      if (slow->parsed()) {
        return finish(coagfuse::study_slow_fusion(load_setup(slow_args)), slow_args.out_dir);
      }
      if (cross->parsed()) {
        return finish(coagfuse::study_cross_validation(load_setup(cross_args)),
                      cross_args.out_dir);
      }
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}
