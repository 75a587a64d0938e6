#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rbcd/pair_sampler.hpp"
#include "rbcd/problem.hpp"

namespace rbcd {

// Random instance of a family: quadratic curvatures and pseudo-Huber
// weights log-uniform in [0.1, 10], linear terms and softplus directions
// standard normal.
ProblemFamilySpec random_family(FamilyKind kind, std::size_t blocks,
                                std::size_t dim, Rng& rng);

// Standard-normal vector projected onto S, scaled.
FeasiblePoint random_feasible_point(std::size_t blocks, std::size_t dim,
                                    Rng& rng, double scale = 1.0);

struct CheckOutcome {
  std::string name;
  bool passed = true;
  std::size_t instances = 0;
  std::string detail;
  // Seed that regenerates the failing instance.
  std::optional<std::uint64_t> failing_seed;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  bool stop_on_first_failure = true;
  // Called after each check finishes.
  std::function<void(const CheckOutcome&)> on_check;
};

// Runs every numerical property of the toolkit: oracle contracts, the
// projection, the closed-form optimum, the basis of S and the operator
// identity, the per-step descent inequality, and the bound orderings.
std::vector<CheckOutcome> run_property_suite(const VerifyOptions& options);

}  // namespace rbcd
