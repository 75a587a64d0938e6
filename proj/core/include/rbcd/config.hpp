#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rbcd/problem.hpp"

namespace rbcd {

// Generator for per-block data, written in config files as
//   constant:V          every entry V
//   geometric:LO,HI     N log-spaced scalars from LO to HI (inclusive)
//   list:V1,V2,...      explicit values
//   gaussian:SEED[,S]   i.i.d. N(0, S^2) entries from a seeded stream
struct ValueRule {
  enum class Kind { constant, geometric, list, gaussian };
  Kind kind = Kind::constant;
  double first = 0.0;   // constant value, geometric low end
  double second = 1.0;  // geometric high end, gaussian scale
  std::vector<double> values;
  std::uint64_t seed = 0;

  static ValueRule parse(const std::string& text);
  std::string to_string() const;

  // One scalar per block (curvatures, weights).
  std::vector<double> expand_scalars(std::size_t blocks) const;
  // N*n entries (linear terms, directions, initial points).
  std::vector<double> expand_vectors(std::size_t blocks,
                                     std::size_t dim) const;
};

struct ProblemSetup {
  FamilyKind kind = FamilyKind::quadratic;
  std::size_t blocks = 10;
  std::size_t dim = 2;
  std::optional<ValueRule> a;  // quadratic curvature
  std::optional<ValueRule> b;  // quadratic linear term
  std::optional<ValueRule> w;  // pseudo_huber weight
  std::optional<ValueRule> c;  // softplus direction
  double lipschitz_multiplier = 1.0;
  ValueRule x0 = ValueRule::parse("gaussian:1");  // projected onto S

  ProblemFamilySpec family_spec() const;
};

struct SolverSettings {
  std::size_t max_iters = 1000;
  std::optional<double> gap_tol;
  std::optional<double> residual_tol;
  std::optional<std::size_t> record_stride;
  std::uint64_t seed = 0;
};

struct ExperimentSettings {
  std::size_t replicas = 1000;
  std::optional<std::size_t> iters = 500;  // nullopt: "auto"
  std::vector<std::size_t> checkpoints;    // empty: default ladder
  std::optional<double> eps;
  std::optional<double> eps_rel;  // eps as a fraction of f(x0) - f*
  std::optional<double> rho;
  std::size_t workers = 1;
  bool high_probability = false;
  bool certify = true;
};

// Manual values that take precedence over analytic ones.
struct BoundsOverrides {
  std::optional<double> R_sq;
  std::optional<double> tilde_R_sq;
  std::optional<double> mu_f;
  std::optional<double> f_star;
  std::size_t k_max = 100;
};

struct Config {
  ProblemSetup problem;
  SolverSettings solver;
  ExperimentSettings experiment;
  BoundsOverrides bounds;
};

// INI-style text: [problem], [solver], [experiment], [bounds] sections of
// `key = value` lines, `#` comments. Unknown sections or keys are errors.
Config parse_config(std::istream& in);
Config load_config(const std::filesystem::path& path);

// Comma-separated non-negative integers.
std::vector<std::size_t> parse_index_list(const std::string& text);

}  // namespace rbcd
