// rbcd: command-line front end for the randomized two-block coordinate
// descent toolkit.
//
//   rbcd solve  --config FILE [--seed U64] [--out PATH]
//   rbcd dist   --config FILE [--out PATH]
//   rbcd verify [--seed U64]
//   rbcd bounds --config FILE [--out PATH] [--eps X] [--rho X]
//   rbcd mc     --config FILE [--seed U64] [--out PATH] [--replicas M]
//               [--iters K|auto] [--eps X | --eps-rel X] [--rho X]
//               [--checkpoints k1,k2,...] [--workers W] [--replica-dir DIR]
//
// Exit codes: 0 success, 1 usage or configuration error, 2 failed
// verification or certification.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>

#include "rbcd/config.hpp"
#include "rbcd/errors.hpp"
#include "rbcd/experiment.hpp"
#include "rbcd/pair_sampler.hpp"
#include "rbcd/report.hpp"
#include "rbcd/solver.hpp"
#include "rbcd/theory.hpp"
#include "rbcd/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailed = 2;

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

rbcd::Config load(const CommonArgs& args) {
  rbcd::Config cfg = args.config.empty() ? rbcd::Config{}
                                         : rbcd::load_config(args.config);
  if (args.seed) cfg.solver.seed = *args.seed;
  return cfg;
}

// Writes to the --out file when given, stdout otherwise.
template <class Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw rbcd::ConfigError("cannot write " + path);
  write(out);
}

int cmd_solve(const CommonArgs& args) {
  const auto cfg = load(args);
  const auto inst = rbcd::instantiate(cfg.problem, cfg.bounds);
  const auto dist = rbcd::build_distribution(inst.problem.lipschitz());
  rbcd::Rng rng(cfg.solver.seed);
  const rbcd::StoppingRule stop{cfg.solver.max_iters, cfg.solver.gap_tol,
                                cfg.solver.residual_tol};
  const rbcd::RecordPolicy record{
      cfg.solver.record_stride.value_or(
          rbcd::default_record_stride(cfg.solver.max_iters)),
      {}};
  const auto traj =
      rbcd::run(inst.problem, inst.x0, dist, rng, stop, record, inst.optimum());
  emit(args.out, [&](std::ostream& os) { rbcd::write_trajectory_csv(os, traj); });
  std::cerr << "iterations=" << traj.iterations << " f="
            << rbcd::format_number(traj.records.back().f_value) << '\n';
  return kExitOk;
}

int cmd_dist(const CommonArgs& args) {
  const auto cfg = load(args);
  const auto L = rbcd::family_lipschitz(cfg.problem.family_spec());
  const auto dist = rbcd::build_distribution(L);
  emit(args.out,
       [&](std::ostream& os) { rbcd::write_distribution_csv(os, dist); });
  return kExitOk;
}

int cmd_verify(const CommonArgs& args) {
  rbcd::VerifyOptions options;
  options.seed = args.seed.value_or(0);
  options.on_check = [](const rbcd::CheckOutcome& c) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " ("
              << c.instances << " instances)";
    if (!c.passed) {
      std::cout << ": " << c.detail;
      if (c.failing_seed) std::cout << " [instance seed " << *c.failing_seed << "]";
    }
    std::cout << '\n';
  };
  const auto results = rbcd::run_property_suite(options);
  for (const auto& r : results) {
    if (!r.passed) return kExitFailed;
  }
  return kExitOk;
}

int cmd_bounds(const CommonArgs& args, std::optional<double> eps,
               std::optional<double> rho) {
  const auto cfg = load(args);
  const auto inst = rbcd::instantiate(cfg.problem, cfg.bounds);
  const auto inputs = inst.bound_inputs();
  if (!inputs) {
    throw rbcd::ConfigError(
        "bounds need f* and R~^2; set bounds.f_star and bounds.tilde_R_sq");
  }
  std::vector<std::size_t> ks(cfg.bounds.k_max + 1);
  std::iota(ks.begin(), ks.end(), std::size_t{0});
  const auto set = rbcd::make_bound_set(*inputs, ks);

  if (!eps) eps = cfg.experiment.eps;
  if (!eps && cfg.experiment.eps_rel) eps = *cfg.experiment.eps_rel * inputs->gap0;
  if (!rho) rho = cfg.experiment.rho;
  std::optional<rbcd::ComplexityReport> report;
  if (eps && rho && inputs->R_sq) {
    report = rbcd::complexity_report({inputs->blocks, *inputs->R_sq,
                                      inputs->tilde_R_sq, inputs->mu_f, *eps,
                                      *rho, inputs->gap0});
  }

  if (args.out.empty()) {
    rbcd::write_bound_csv(std::cout, set);
    if (report) {
      std::cout << '\n';
      rbcd::write_complexity(std::cout, *report);
    }
  } else {
    emit(args.out, [&](std::ostream& os) { rbcd::write_bound_csv(os, set); });
    if (report) rbcd::write_complexity(std::cout, *report);
  }
  return kExitOk;
}

struct McArgs {
  std::optional<std::size_t> replicas;
  std::string iters;
  std::optional<double> eps;
  std::optional<double> eps_rel;
  std::optional<double> rho;
  std::string checkpoints;
  std::optional<std::size_t> workers;
  std::string replica_dir;
};

int cmd_mc(const CommonArgs& args, const McArgs& mc) {
  auto cfg = load(args);
  auto& e = cfg.experiment;
  if (mc.replicas) e.replicas = *mc.replicas;
  if (!mc.iters.empty()) {
    if (mc.iters == "auto") {
      e.iters.reset();
    } else {
      e.iters = rbcd::parse_index_list(mc.iters).at(0);
    }
  }
  if (mc.eps) {
    e.eps = mc.eps;
    e.eps_rel.reset();
  }
  if (mc.eps_rel) {
    e.eps_rel = mc.eps_rel;
    e.eps.reset();
  }
  if (mc.rho) e.rho = mc.rho;
  if ((mc.eps || mc.eps_rel) && mc.rho) e.high_probability = true;
  if (!mc.checkpoints.empty()) e.checkpoints = rbcd::parse_index_list(mc.checkpoints);
  if (mc.workers) e.workers = *mc.workers;

  const auto plan = rbcd::plan_experiment(rbcd::experiment_config(cfg));
  const auto trajectories = rbcd::run_replica_trajectories(plan);
  const auto summary = rbcd::summarize(plan, trajectories);

  if (!mc.replica_dir.empty()) {
    std::filesystem::create_directories(mc.replica_dir);
    for (std::size_t r = 0; r < trajectories.size(); ++r) {
      char name[32];
      std::snprintf(name, sizeof name, "replica_%05zu.csv", r);
      std::ofstream os(std::filesystem::path(mc.replica_dir) / name);
      rbcd::write_trajectory_csv(os, trajectories[r]);
    }
  }
  emit(args.out, [&](std::ostream& os) { rbcd::write_summary_csv(os, summary); });

  std::ostream& info = args.out.empty() ? std::cerr : std::cout;
  rbcd::write_summary_info(info, summary);
  if (!e.certify) return kExitOk;
  const auto report = rbcd::certify(summary);
  for (const auto& line : report.checks) info << line << '\n';
  info << (report.passed ? "CERTIFIED" : "NOT CERTIFIED") << '\n';
  return report.passed ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized two-block coordinate descent toolkit"};
  app.require_subcommand(1);

  CommonArgs common;
  auto add_common = [&](CLI::App* sub, bool with_seed) {
    sub->add_option("--config", common.config, "INI config file")
        ->check(CLI::ExistingFile);
    if (with_seed) sub->add_option("--seed", common.seed, "64-bit seed");
    sub->add_option("--out", common.out, "output path (default stdout)");
  };

  auto* solve = app.add_subcommand("solve", "run one trajectory, write CSV");
  add_common(solve, true);
  auto* dist = app.add_subcommand("dist", "print the pair distribution");
  add_common(dist, false);
  auto* verify = app.add_subcommand("verify", "run the property suite");
  verify->add_option("--seed", common.seed, "64-bit seed");

  std::optional<double> bounds_eps, bounds_rho;
  auto* bounds = app.add_subcommand("bounds", "bound envelopes and complexities");
  add_common(bounds, false);
  bounds->add_option("--eps", bounds_eps, "accuracy for the complexities");
  bounds->add_option("--rho", bounds_rho, "confidence level in (0,1)");

  McArgs mc;
  auto* mcc = app.add_subcommand("mc", "Monte Carlo replica experiment");
  add_common(mcc, true);
  mcc->add_option("--replicas", mc.replicas, "number of replicas M");
  mcc->add_option("--iters", mc.iters, "iterations K, or 'auto'");
  auto* eps_opt = mcc->add_option("--eps", mc.eps, "absolute accuracy");
  mcc->add_option("--eps-rel", mc.eps_rel, "accuracy as a fraction of gap0")
      ->excludes(eps_opt);
  mcc->add_option("--rho", mc.rho, "confidence level in (0,1)");
  mcc->add_option("--checkpoints", mc.checkpoints, "comma-separated k list");
  mcc->add_option("--workers", mc.workers, "worker threads");
  mcc->add_option("--replica-dir", mc.replica_dir,
                  "write one trajectory CSV per replica here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*solve) return cmd_solve(common);
    if (*dist) return cmd_dist(common);
    if (*verify) return cmd_verify(common);
    if (*bounds) return cmd_bounds(common, bounds_eps, bounds_rho);
    if (*mcc) return cmd_mc(common, mc);
  } catch (const rbcd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const rbcd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
