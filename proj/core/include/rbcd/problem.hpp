#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rbcd/block_vector.hpp"

namespace rbcd {

// Smooth convex function f_i : R^n -> R. Implementations must be pure.
class BlockFunction {
 public:
  virtual ~BlockFunction() = default;
  virtual std::size_t dim() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual void gradient(std::span<const double> x,
                        std::span<double> out) const = 0;
  // f(x) - f(y) - <grad f(y), x - y>. Overridden where a closed form avoids
  // the cancellation of the generic formula.
  virtual double bregman(std::span<const double> x,
                         std::span<const double> y) const;
};

// f(x) = a/2 ||x||^2 + <b, x>
class QuadraticBlock final : public BlockFunction {
 public:
  QuadraticBlock(double curvature, std::vector<double> linear);
  std::size_t dim() const override { return linear_.size(); }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x,
                std::span<double> out) const override;
  // a/2 ||x - y||^2
  double bregman(std::span<const double> x,
                 std::span<const double> y) const override;

  double curvature() const { return curvature_; }
  std::span<const double> linear() const { return linear_; }

 private:
  double curvature_;
  std::vector<double> linear_;
};

// f(x) = w (sqrt(1 + ||x||^2) - 1)
class PseudoHuberBlock final : public BlockFunction {
 public:
  PseudoHuberBlock(double weight, std::size_t dim);
  std::size_t dim() const override { return dim_; }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x,
                std::span<double> out) const override;

 private:
  double weight_;
  std::size_t dim_;
};

// f(x) = log(1 + exp(<c, x>))
class SoftplusBlock final : public BlockFunction {
 public:
  explicit SoftplusBlock(std::vector<double> direction);
  std::size_t dim() const override { return direction_.size(); }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x,
                std::span<double> out) const override;

 private:
  std::vector<double> direction_;
};

// f(x) = f_1(x_1) + ... + f_N(x_N) to be minimized over S, together with
// the block Lipschitz constants that define ||.||_L and the pair
// distribution. Immutable after construction.
class BlockProblem {
 public:
  BlockProblem(std::vector<std::shared_ptr<const BlockFunction>> blocks,
               std::vector<double> lipschitz,
               std::optional<double> mu_f = std::nullopt);

  std::size_t blocks() const { return blocks_.size(); }
  std::size_t dim() const { return dim_; }
  const BlockFunction& block(std::size_t i) const { return *blocks_[i]; }
  std::span<const double> lipschitz() const { return lipschitz_; }
  std::optional<double> mu_f() const { return mu_f_; }

  double value(const BlockVector& x) const;

  // Same blocks and constants, different strong-convexity parameter.
  BlockProblem with_mu_f(std::optional<double> mu_f) const;

 private:
  std::vector<std::shared_ptr<const BlockFunction>> blocks_;
  std::vector<double> lipschitz_;
  std::optional<double> mu_f_;
  std::size_t dim_ = 0;
};

enum class FamilyKind { quadratic, pseudo_huber, softplus };

std::string to_string(FamilyKind kind);
FamilyKind family_kind_from_string(const std::string& name);

// Parameters of one of the built-in test families. Per-block vectors
// (`linear`, `direction`) are stored flat, block-major, N*n entries.
struct ProblemFamilySpec {
  FamilyKind kind = FamilyKind::quadratic;
  std::size_t blocks = 0;
  std::size_t dim = 0;
  std::vector<double> curvature;  // quadratic a_i
  std::vector<double> linear;     // quadratic b_i
  std::vector<double> weight;     // pseudo_huber w_i
  std::vector<double> direction;  // softplus c_i
  double lipschitz_multiplier = 1.0;
};

// Tight analytic constants of the family, scaled by the multiplier.
std::vector<double> family_lipschitz(const ProblemFamilySpec& spec);

// Validates the spec and builds the problem. Quadratics get mu_f populated.
BlockProblem make_problem(const ProblemFamilySpec& spec);

// sum_i L_i ||x_i||^2
double l_norm_sq(const BlockVector& x, std::span<const double> lipschitz);

struct QuadraticOptimum {
  FeasiblePoint x_star;
  double f_star;
  std::vector<double> nu;  // common block gradient at the optimum
};

QuadraticOptimum kkt_solve_quadratic(const ProblemFamilySpec& spec);

// f(x) - f* for x in S and a minimizer x*, evaluated as
// sum_i D_i(x_i, x*_i). The cross terms <nu, x_i - x*_i> cancel on S, so no
// large values are subtracted and gaps far below ulp(f*) stay resolvable.
double optimality_gap(const BlockProblem& problem, const BlockVector& x,
                      const BlockVector& x_star);

// max_{i<j} ||grad f_i(x_i) - grad f_j(x_j)||; zero exactly at optima.
double grad_residual(const BlockProblem& problem, const BlockVector& x);

double tilde_R_sq(const FeasiblePoint& x0, const FeasiblePoint& x_star,
                  std::span<const double> lipschitz);

// min_i a_i / L_i. Throws InvalidInput when some L_i < a_i.
double mu_f_quadratic(std::span<const double> curvature,
                      std::span<const double> lipschitz);
double mu_f_quadratic(const ProblemFamilySpec& spec);

// Upper bound on the level-set radius R^2(x0) for quadratics:
// 2 (f(x0) - f*) max_i L_i / a_i. Not the exact R^2.
double R_sq_upper_quadratic(const ProblemFamilySpec& spec,
                            const FeasiblePoint& x0);
double R_sq_upper_quadratic(std::span<const double> curvature,
                            std::span<const double> lipschitz, double gap0);

struct OracleCheck {
  bool ok = true;
  double worst_ratio = 0.0;  // largest observed lhs / rhs
  std::string detail;
};

// Samples (x, d) per block and checks the gradient Lipschitz bound and the
// quadratic upper model, each within relative slack.
OracleCheck check_lipschitz(const BlockProblem& problem, std::uint64_t seed,
                            std::size_t samples_per_block = 100,
                            double rel_slack = 1e-8);

// Midpoint convexity on sampled pairs.
OracleCheck check_convexity(const BlockProblem& problem, std::uint64_t seed,
                            std::size_t samples_per_block = 100);

}  // namespace rbcd
