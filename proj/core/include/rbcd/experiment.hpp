#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rbcd/config.hpp"
#include "rbcd/problem.hpp"
#include "rbcd/solver.hpp"
#include "rbcd/theory.hpp"

namespace rbcd {

// A concrete problem with everything the bounds need. Analytic quantities
// are filled for quadratics; overrides replace them.
struct ProblemInstance {
  ProblemFamilySpec spec;
  BlockProblem problem;
  FeasiblePoint x0;
  std::optional<double> f_star;
  std::optional<FeasiblePoint> x_star;
  std::optional<double> tilde_R_sq;
  std::optional<double> R_sq;
  std::optional<double> mu_f;

  std::optional<double> gap0() const;
  bool exact_optimum = false;  // f_star and x_star both from the KKT solve
  KnownOptimum optimum() const { return {f_star, x_star, exact_optimum}; }
  std::optional<BoundInputs> bound_inputs() const;
};

ProblemInstance instantiate(const ProblemSetup& setup,
                            const BoundsOverrides& overrides = {});

struct ExperimentConfig {
  ProblemSetup problem;
  BoundsOverrides overrides;
  std::uint64_t seed = 0;
  ExperimentSettings settings;
};

ExperimentConfig experiment_config(const Config& config);

// Resolved iteration count, checkpoints and high-probability parameters.
struct ExperimentPlan {
  ProblemInstance instance;
  std::size_t replicas = 0;
  std::size_t iterations = 0;
  std::vector<std::size_t> checkpoints;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::optional<double> eps;
  std::optional<double> rho;
  bool high_probability = false;
};

// {0,1,2,5,10,20,50,100,200,500} clipped to [0, K], plus K.
std::vector<std::size_t> default_checkpoints(std::size_t iterations);

// Validates the config; throws ConfigError on inconsistent settings.
ExperimentPlan plan_experiment(const ExperimentConfig& config);

// Runs replica r with seed replica_seed(seed, r), recording only the
// checkpoints. Output is indexed by replica regardless of worker count.
std::vector<Trajectory> run_replica_trajectories(const ExperimentPlan& plan);

struct CheckpointStats {
  std::size_t k = 0;
  double mean_gap = 0.0;
  double stderr_gap = 0.0;
  std::optional<double> mean_lyapunov;  // mean of r_sq/2 + gap
  std::optional<double> stderr_lyapunov;
  // Change of the Lyapunov quantity since the previous checkpoint, averaged
  // per replica, with its standard error.
  std::optional<double> lyapunov_increase;
  std::optional<double> stderr_lyapunov_increase;
  double bound_ours_sublinear = 0.0;
  std::optional<double> bound_ours_linear;
  std::optional<double> bound_nng_sublinear;
  std::optional<double> bound_nng_linear;
};

struct ExperimentSummary {
  std::size_t blocks = 0;
  std::size_t dim = 0;
  std::string family;
  std::size_t replicas = 0;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  double f_star = 0.0;
  double gap0 = 0.0;
  // Smallest gap the measurement can resolve in double precision.
  double gap_resolution = 0.0;
  double tilde_R_sq = 0.0;
  std::optional<double> R_sq;
  std::optional<double> mu_f;
  std::optional<double> eps;
  std::optional<double> rho;
  std::vector<CheckpointStats> rows;
  std::optional<double> success_fraction;  // fraction with gap(K) <= eps
};

// Aggregates per-replica trajectories. Statistics depend only on the
// multiset of replica values, not on their order.
ExperimentSummary summarize(const ExperimentPlan& plan,
                            std::span<const Trajectory> trajectories);

ExperimentSummary run_replicas(const ExperimentConfig& config);

struct CertifyReport {
  bool passed = true;
  std::vector<std::string> checks;      // one line per evaluated check
  std::vector<std::string> violations;  // subset that failed
};

CertifyReport certify(const ExperimentSummary& summary);

}  // namespace rbcd
