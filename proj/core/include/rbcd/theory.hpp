#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rbcd/block_vector.hpp"
#include "rbcd/problem.hpp"

namespace rbcd {

// ---------------------------------------------------------------------------
// Basis of S
// ---------------------------------------------------------------------------

// v_lm = (e_l - e_{l+1}) (x) e~_m for l < N-1 (zero-based), m < n. Stored at
// index l * n + m.
struct BasisSet {
  std::size_t blocks = 0;
  std::size_t dim = 0;
  std::vector<BlockVector> vectors;

  const BlockVector& at(std::size_t l, std::size_t m) const {
    return vectors[l * dim + m];
  }
};

BasisSet basis_vectors(std::size_t blocks, std::size_t dim);

// Coefficients c_lm = <e~_m, x_1 + ... + x_{l+1}> (zero-based l) such that
// x = sum c_lm v_lm. Throws InvalidInput when x is not in S.
std::vector<double> decompose(const BlockVector& x);

BlockVector reconstruct(std::span<const double> coeffs, std::size_t blocks,
                        std::size_t dim);

// Applies sum_{i<j} p_ij/(L_i+L_j) (e_i - e_j)(L_i e_i^T - L_j e_j^T) (x) I_n
// to x as |E| rank-one actions. On S the image is x / (N - 1).
BlockVector lemma2_apply(std::span<const double> lipschitz,
                         const BlockVector& x);

// ---------------------------------------------------------------------------
// Per-step and initial-point inequalities
// ---------------------------------------------------------------------------

struct DescentCheck {
  double actual_decrease = 0.0;  // f(x) - f(x+)
  double model_bound = 0.0;      // ||g_i - g_j||^2 / (2 (L_i + L_j))
};

DescentCheck descent_check(const BlockProblem& problem,
                           const FeasiblePoint& x, std::size_t i,
                           std::size_t j);

struct Lemma3Check {
  double lhs = 0.0;  // f(x0) - f*
  double rhs = 0.0;  // R~^2 / 2
};

Lemma3Check lemma3_check(const BlockProblem& problem, const FeasiblePoint& x0,
                         const FeasiblePoint& x_star, double f_star);

// ---------------------------------------------------------------------------
// Rate bounds
// ---------------------------------------------------------------------------

// (N-1)/(N+k-1) R~^2
double bound_sublinear(std::size_t k, std::size_t blocks, double tilde_R_sq);

// 1 - 2 mu / ((N-1)(1+mu)); mu in (0, 1].
double linear_factor(std::size_t blocks, double mu_f);
// factor^k R~^2
double bound_linear(std::size_t k, std::size_t blocks, double mu_f,
                    double tilde_R_sq);

// Prior-work counterparts: 2 (N-1) R^2 / k (k >= 1), and
// (1 - mu/(N-1))^k (f(x0) - f*).
double bound_nng_sublinear(std::size_t k, std::size_t blocks, double R_sq);
double nng_linear_factor(std::size_t blocks, double mu_f);
double bound_nng_linear(std::size_t k, std::size_t blocks, double mu_f,
                        double gap0);

// B/A = 2 ((N-1)/k + 1) R^2 / R~^2. Requires R^2 >= R~^2 > 0.
double compare_bounds(std::size_t blocks, std::size_t k, double R_sq,
                      double tilde_R_sq);

struct BoundInputs {
  std::size_t blocks = 0;
  double tilde_R_sq = 0.0;
  std::optional<double> R_sq;
  std::optional<double> mu_f;  // linear bounds only when > 0
  double gap0 = 0.0;
};

// Bound envelopes at the requested iterations. Optional entries are absent
// when the inputs they need are missing (or k = 0 for the sublinear prior
// bound).
struct BoundSet {
  BoundInputs inputs;
  std::vector<std::size_t> k;
  std::vector<double> ours_sublinear;
  std::vector<std::optional<double>> ours_linear;
  std::vector<std::optional<double>> nng_sublinear;
  std::vector<std::optional<double>> nng_linear;
};

BoundSet make_bound_set(const BoundInputs& inputs,
                        std::span<const std::size_t> iterations);

// ---------------------------------------------------------------------------
// High-probability iteration complexities
// ---------------------------------------------------------------------------

struct ComplexityInputs {
  std::size_t blocks = 0;
  double R_sq = 0.0;
  double tilde_R_sq = 0.0;
  std::optional<double> mu_f;
  double eps = 0.0;
  double rho = 0.0;
  double gap0 = 0.0;
};

struct ComplexityReport {
  ComplexityInputs inputs;
  double K = 0.0;                      // ours, convex
  double K_bar = 0.0;                  // prior, convex
  std::optional<double> K_tilde;       // ours, strongly convex
  std::optional<double> K_hat;         // prior, strongly convex

  // max(0, ceil(raw))
  static std::uint64_t display(double raw);
};

ComplexityReport complexity_report(const ComplexityInputs& inputs);

}  // namespace rbcd
