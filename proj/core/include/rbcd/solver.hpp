#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rbcd/block_vector.hpp"
#include "rbcd/pair_sampler.hpp"
#include "rbcd/problem.hpp"

namespace rbcd {

// The two-block step moves block i by +d and block j by -d where
// d = -(grad f_i(x_i) - grad f_j(x_j)) / (L_i + L_j).
std::vector<double> direction(const BlockProblem& problem,
                              const FeasiblePoint& x, std::size_t i,
                              std::size_t j);

FeasiblePoint step(const BlockProblem& problem, const FeasiblePoint& x,
                   std::size_t i, std::size_t j);

// Optimal value and point, when known, for gap and distance metrics.
struct KnownOptimum {
  std::optional<double> f_star;
  std::optional<FeasiblePoint> x_star;
  // x_star is an exact minimizer with value f_star: gaps are then evaluated
  // through optimality_gap instead of f(x) - f_star.
  bool exact = false;
};

struct StepRecord {
  std::size_t k = 0;
  std::optional<IndexPair> pair;  // pair that produced x^k; empty at k = 0
  double f_value = 0.0;
  std::optional<double> gap;   // f - f*
  std::optional<double> r_sq;  // ||x^k - x*||_L^2
  double residual = 0.0;       // grad_residual(x^k)
};

struct StoppingRule {
  std::size_t max_iters = 1;
  std::optional<double> gap_tol;
  std::optional<double> residual_tol;
};

// Which iterates to record. x^0 and the final iterate are always recorded.
struct RecordPolicy {
  std::size_t stride = 1;       // 0 disables stride-based recording
  std::vector<std::size_t> at;  // extra iteration indices
};

// max(1, max_iters / 1000)
std::size_t default_record_stride(std::size_t max_iters);

enum class StopReason { max_iters, gap_tol, residual_tol };

struct Trajectory {
  std::vector<StepRecord> records;
  FeasiblePoint final_point;
  std::size_t iterations = 0;
  StopReason reason = StopReason::max_iters;
};

// Runs the randomized two-block method from x0. Throws InvalidInput for
// max_iters == 0 and OracleFailure (with the iteration index) when an
// oracle throws or returns non-finite values.
Trajectory run(const BlockProblem& problem, const FeasiblePoint& x0,
               const PairDistribution& dist, Rng& rng,
               const StoppingRule& stop, const RecordPolicy& record = {},
               const KnownOptimum& optimum = {});

}  // namespace rbcd
