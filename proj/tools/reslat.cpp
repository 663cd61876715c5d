#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "reslat/harness.hpp"
#include "reslat/version.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* cfg = cmd->add_option("--config", args.config_path, "JSON config file");
  if (config_required) cfg->required();
  cmd->add_option("--seed", args.seed, "override the experiment seed");
  cmd->add_option("--out", args.out_dir, "override the output directory");
}

// Only the seed and the output directory may come from the environment;
// every other knob lives in the config file.
void apply_env_overrides(CommonArgs& args) {
  if (!args.seed) {
    if (const char* s = std::getenv("RESLAT_SEED")) args.seed = std::strtoull(s, nullptr, 10);
  }
  if (!args.out_dir) {
    if (const char* s = std::getenv("RESLAT_OUT")) args.out_dir = s;
  }
}

reslat::ExperimentConfig load(CommonArgs args) {
  apply_env_overrides(args);
  reslat::ExperimentConfig cfg;
  if (!args.config_path.empty()) {
    cfg = reslat::load_config_file(args.config_path);
  } else {
    cfg = reslat::parse_config(reslat::Json::object());
  }
  if (args.seed) {
    cfg.sim.seed = *args.seed;
    cfg.raw["sim"]["seed"] = *args.seed;
  }
  if (args.out_dir) {
    cfg.out_dir = *args.out_dir;
    cfg.raw["output"]["dir"] = *args.out_dir;
  }
  return cfg;
}

int run_report(const CommonArgs& args,
               reslat::Report (*runner)(const reslat::ExperimentConfig&)) {
  const auto cfg = load(args);
  const auto report = runner(cfg);
  reslat::write_report(report, cfg.out_dir);
  std::cout << report.name << ": wrote " << report.files.size() + 1
            << " file(s) to " << cfg.out_dir << "\n";
  return 0;
}

int run_validate_cmd(const CommonArgs& args) {
  auto args_copy = args;
  apply_env_overrides(args_copy);
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  if (!args_copy.config_path.empty()) {
    const auto cfg = reslat::load_config_file(args_copy.config_path);
    seed = cfg.sim.seed;
    out_dir = cfg.out_dir;
  }
  if (args_copy.seed) seed = *args_copy.seed;
  if (args_copy.out_dir) out_dir = *args_copy.out_dir;

  const auto outcome = reslat::run_validate(seed);
  for (const auto& c : outcome.checks)
    std::printf("[%s] %-42s measured %.6g  limit %.6g  %s\n",
                c.pass ? " ok " : "FAIL", c.name.c_str(), c.measured,
                c.threshold, c.detail.c_str());

  reslat::Json summary = outcome.to_json();
  summary["seed"] = seed;
  summary["quartic_kappa_coefficient"] =
      reslat::Json{{"value", reslat::quartic_kappa_coefficient()},
                   {"method", "gauss_hermite"},
                   {"order", reslat::kGaussHermiteOrder}};
  reslat::Report report;
  report.name = "validate";
  report.summary = std::move(summary);
  reslat::write_report(report, out_dir);

  std::cout << (outcome.all_pass ? "validate: all checks passed"
                                 : "validate: FAILURES present")
            << "\n";
  return outcome.all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic oscillator-lattice transport simulator"};
  app.set_version_flag("--version", reslat::kVersion);
  app.require_subcommand(1);

  CommonArgs sim_args, avg_args, st_args, flow_args, cond_args, gk_args,
      four_args, val_args;

  add_common(app.add_subcommand("simulate", "integrate trajectories and dump them"),
             sim_args, true);
  add_common(app.add_subcommand("averaging-sweep",
                                "full dynamics against the effective equation "
                                "over an epsilon grid"),
             avg_args, true);
  add_common(app.add_subcommand("stationary",
                                "stationary moments of the full and effective "
                                "dynamics"),
             st_args, true);
  add_common(app.add_subcommand("flow", "stationary edge flow against lambda"),
             flow_args, true);
  add_common(app.add_subcommand("conductivity",
                                "conductivity by closed form and OU correlation"),
             cond_args, true);
  add_common(app.add_subcommand("greenkubo",
                                "flow correlation integrals on a uniform chain"),
             gk_args, true);
  add_common(app.add_subcommand("fourier",
                                "scaled flow against the conductivity "
                                "prediction over chain lengths"),
             four_args, true);
  add_common(app.add_subcommand("validate", "run the invariant suite"), val_args,
             false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand("simulate")) return run_report(sim_args, reslat::run_simulate);
    if (app.got_subcommand("averaging-sweep"))
      return run_report(avg_args, reslat::run_averaging_sweep);
    if (app.got_subcommand("stationary"))
      return run_report(st_args, reslat::run_stationary_measure);
    if (app.got_subcommand("flow")) return run_report(flow_args, reslat::run_flow_vs_lambda);
    if (app.got_subcommand("conductivity"))
      return run_report(cond_args, reslat::run_conductivity);
    if (app.got_subcommand("greenkubo")) return run_report(gk_args, reslat::run_green_kubo);
    if (app.got_subcommand("fourier")) return run_report(four_args, reslat::run_fourier);
    if (app.got_subcommand("validate")) return run_validate_cmd(val_args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
