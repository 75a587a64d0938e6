#include "rbcd/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rbcd/errors.hpp"
#include "rbcd/pair_sampler.hpp"

namespace rbcd {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double norm_sq(std::span<const double> a) { return dot(a, a); }

void require_positive(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw InvalidInput(std::string(what) + "_" + std::to_string(i + 1) +
                         " must be positive and finite");
    }
  }
}

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw InvalidInput(std::string(what) + " has non-finite entries");
    }
  }
}

}  // namespace

QuadraticBlock::QuadraticBlock(double curvature, std::vector<double> linear)
    : curvature_(curvature), linear_(std::move(linear)) {}

double QuadraticBlock::value(std::span<const double> x) const {
  return 0.5 * curvature_ * norm_sq(x) + dot(linear_, x);
}

void QuadraticBlock::gradient(std::span<const double> x,
                              std::span<double> out) const {
  for (std::size_t k = 0; k < x.size(); ++k) {
    out[k] = curvature_ * x[k] + linear_[k];
  }
}

double QuadraticBlock::bregman(std::span<const double> x,
                               std::span<const double> y) const {
  double sq = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) sq += (x[k] - y[k]) * (x[k] - y[k]);
  return 0.5 * curvature_ * sq;
}

PseudoHuberBlock::PseudoHuberBlock(double weight, std::size_t dim)
    : weight_(weight), dim_(dim) {}

double PseudoHuberBlock::value(std::span<const double> x) const {
  // sqrt(1+s) - 1 = s / (sqrt(1+s) + 1), stable for small s.
  const double s = norm_sq(x);
  return weight_ * s / (std::sqrt(1.0 + s) + 1.0);
}

void PseudoHuberBlock::gradient(std::span<const double> x,
                                std::span<double> out) const {
  const double scale = weight_ / std::sqrt(1.0 + norm_sq(x));
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = scale * x[k];
}

SoftplusBlock::SoftplusBlock(std::vector<double> direction)
    : direction_(std::move(direction)) {}

double SoftplusBlock::value(std::span<const double> x) const {
  const double t = dot(direction_, x);
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

void SoftplusBlock::gradient(std::span<const double> x,
                             std::span<double> out) const {
  const double t = dot(direction_, x);
  const double sigma =
      t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = sigma * direction_[k];
}

BlockProblem::BlockProblem(
    std::vector<std::shared_ptr<const BlockFunction>> blocks,
    std::vector<double> lipschitz, std::optional<double> mu_f)
    : blocks_(std::move(blocks)),
      lipschitz_(std::move(lipschitz)),
      mu_f_(mu_f) {
  if (blocks_.size() < 2) throw InvalidInput("problem needs N >= 2 blocks");
  if (lipschitz_.size() != blocks_.size()) {
    throw InvalidInput("one Lipschitz constant per block is required");
  }
  require_positive(lipschitz_, "L");
  dim_ = blocks_.front() ? blocks_.front()->dim() : 0;
  if (dim_ == 0) throw InvalidInput("block dimension must be >= 1");
  for (const auto& b : blocks_) {
    if (!b || b->dim() != dim_) {
      throw InvalidInput("all blocks must share the same dimension");
    }
  }
  if (mu_f_ && !(*mu_f_ >= 0.0 && *mu_f_ <= 1.0)) {
    throw InvalidInput("mu_f must lie in [0, 1]");
  }
}

double BlockProblem::value(const BlockVector& x) const {
  double f = 0.0;
  for (std::size_t i = 0; i < blocks(); ++i) f += blocks_[i]->value(x.block(i));
  return f;
}

BlockProblem BlockProblem::with_mu_f(std::optional<double> mu_f) const {
  return BlockProblem(blocks_, lipschitz_, mu_f);
}

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::quadratic: return "quadratic";
    case FamilyKind::pseudo_huber: return "pseudo_huber";
    case FamilyKind::softplus: return "softplus";
  }
  return "unknown";
}

FamilyKind family_kind_from_string(const std::string& name) {
  if (name == "quadratic") return FamilyKind::quadratic;
  if (name == "pseudo_huber") return FamilyKind::pseudo_huber;
  if (name == "softplus") return FamilyKind::softplus;
  throw InvalidInput("unknown problem kind '" + name + "'");
}

namespace {

void validate_spec(const ProblemFamilySpec& spec) {
  if (spec.blocks < 2) throw InvalidInput("N must be >= 2");
  if (spec.dim < 1) throw InvalidInput("n must be >= 1");
  if (!(spec.lipschitz_multiplier >= 1.0) ||
      !std::isfinite(spec.lipschitz_multiplier)) {
    throw InvalidInput("lipschitz_multiplier must be finite and >= 1");
  }
  const std::size_t flat = spec.blocks * spec.dim;
  switch (spec.kind) {
    case FamilyKind::quadratic:
      if (spec.curvature.size() != spec.blocks || spec.linear.size() != flat) {
        throw InvalidInput("quadratic needs N curvatures and N*n linear terms");
      }
      require_positive(spec.curvature, "a");
      require_finite(spec.linear, "b");
      break;
    case FamilyKind::pseudo_huber:
      if (spec.weight.size() != spec.blocks) {
        throw InvalidInput("pseudo_huber needs N weights");
      }
      require_positive(spec.weight, "w");
      break;
    case FamilyKind::softplus:
      if (spec.direction.size() != flat) {
        throw InvalidInput("softplus needs N*n direction entries");
      }
      require_finite(spec.direction, "c");
      for (std::size_t i = 0; i < spec.blocks; ++i) {
        std::span<const double> c(spec.direction.data() + i * spec.dim,
                                  spec.dim);
        if (norm_sq(c) == 0.0) {
          throw InvalidInput("softplus direction c_" + std::to_string(i + 1) +
                             " is zero (L_i would be 0)");
        }
      }
      break;
  }
}

std::vector<double> block_slice(const std::vector<double>& flat, std::size_t i,
                                std::size_t dim) {
  return {flat.begin() + static_cast<std::ptrdiff_t>(i * dim),
          flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim)};
}

}  // namespace

std::vector<double> family_lipschitz(const ProblemFamilySpec& spec) {
  validate_spec(spec);
  std::vector<double> L(spec.blocks);
  for (std::size_t i = 0; i < spec.blocks; ++i) {
    switch (spec.kind) {
      case FamilyKind::quadratic: L[i] = spec.curvature[i]; break;
      case FamilyKind::pseudo_huber: L[i] = spec.weight[i]; break;
      case FamilyKind::softplus: {
        std::span<const double> c(spec.direction.data() + i * spec.dim,
                                  spec.dim);
        L[i] = norm_sq(c) / 4.0;
        break;
      }
    }
    L[i] *= spec.lipschitz_multiplier;
  }
  return L;
}

BlockProblem make_problem(const ProblemFamilySpec& spec) {
  auto L = family_lipschitz(spec);
  std::vector<std::shared_ptr<const BlockFunction>> blocks;
  blocks.reserve(spec.blocks);
  for (std::size_t i = 0; i < spec.blocks; ++i) {
    switch (spec.kind) {
      case FamilyKind::quadratic:
        blocks.push_back(std::make_shared<QuadraticBlock>(
            spec.curvature[i], block_slice(spec.linear, i, spec.dim)));
        break;
      case FamilyKind::pseudo_huber:
        blocks.push_back(
            std::make_shared<PseudoHuberBlock>(spec.weight[i], spec.dim));
        break;
      case FamilyKind::softplus:
        blocks.push_back(std::make_shared<SoftplusBlock>(
            block_slice(spec.direction, i, spec.dim)));
        break;
    }
  }
  std::optional<double> mu;
  if (spec.kind == FamilyKind::quadratic) mu = mu_f_quadratic(spec.curvature, L);
  return BlockProblem(std::move(blocks), std::move(L), mu);
}

double l_norm_sq(const BlockVector& x, std::span<const double> lipschitz) {
  if (lipschitz.size() != x.blocks()) {
    throw InvalidInput("l_norm_sq: " + std::to_string(lipschitz.size()) +
                       " weights for " + std::to_string(x.blocks()) +
                       " blocks");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < x.blocks(); ++i) {
    s += lipschitz[i] * norm_sq(x.block(i));
  }
  return s;
}

QuadraticOptimum kkt_solve_quadratic(const ProblemFamilySpec& spec) {
  if (spec.kind != FamilyKind::quadratic) {
    throw UnsupportedProblem("closed-form optimum only exists for quadratics");
  }
  for (double a : spec.curvature) {
    if (!(a > 0.0)) {
      throw UnsupportedProblem(
          "quadratic with a_i <= 0 has no unique optimum");
    }
  }
  validate_spec(spec);
  const std::size_t N = spec.blocks;
  const std::size_t n = spec.dim;

  // All block gradients equal nu: a_i x_i + b_i = nu, sum_i x_i = 0.
  double inv_a_sum = 0.0;
  for (double a : spec.curvature) inv_a_sum += 1.0 / a;
  std::vector<double> nu(n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      s += spec.linear[i * n + m] / spec.curvature[i];
    }
    nu[m] = s / inv_a_sum;
  }

  BlockVector x(N, n);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t m = 0; m < n; ++m) {
      x.block(i)[m] = (nu[m] - spec.linear[i * n + m]) / spec.curvature[i];
    }
  }
  // Clean the rounding-level sum so that x* is in S to working precision.
  FeasiblePoint x_star = project_to_S(x);

  double f_star = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    auto xi = x_star.block(i);
    std::span<const double> bi(spec.linear.data() + i * n, n);
    f_star += 0.5 * spec.curvature[i] * norm_sq(xi) + dot(bi, xi);
  }
  return {std::move(x_star), f_star, std::move(nu)};
}

double BlockFunction::bregman(std::span<const double> x,
                              std::span<const double> y) const {
  std::vector<double> g(y.size());
  gradient(y, g);
  double inner = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) inner += g[k] * (x[k] - y[k]);
  return value(x) - value(y) - inner;
}

double optimality_gap(const BlockProblem& problem, const BlockVector& x,
                      const BlockVector& x_star) {
  if (x.blocks() != problem.blocks() || x_star.blocks() != problem.blocks() ||
      x.dim() != problem.dim() || x_star.dim() != problem.dim()) {
    throw InvalidInput("optimality_gap: shape mismatch");
  }
  double gap = 0.0;
  for (std::size_t i = 0; i < problem.blocks(); ++i) {
    gap += problem.block(i).bregman(x.block(i), x_star.block(i));
  }
  return gap;
}

double grad_residual(const BlockProblem& problem, const BlockVector& x) {
  const std::size_t N = problem.blocks();
  const std::size_t n = problem.dim();
  if (x.blocks() != N || x.dim() != n) {
    throw InvalidInput("grad_residual: point shape does not match problem");
  }
  std::vector<double> g(N * n);
  for (std::size_t i = 0; i < N; ++i) {
    problem.block(i).gradient(x.block(i), std::span<double>(g.data() + i * n, n));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = i + 1; j < N; ++j) {
      double s = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        const double diff = g[i * n + m] - g[j * n + m];
        s += diff * diff;
      }
      worst = std::max(worst, s);
    }
  }
  return std::sqrt(worst);
}

double tilde_R_sq(const FeasiblePoint& x0, const FeasiblePoint& x_star,
                  std::span<const double> lipschitz) {
  return l_norm_sq(x0.vec() - x_star.vec(), lipschitz);
}

double mu_f_quadratic(std::span<const double> curvature,
                      std::span<const double> lipschitz) {
  if (curvature.size() != lipschitz.size() || curvature.empty()) {
    throw InvalidInput("mu_f_quadratic: curvature/Lipschitz length mismatch");
  }
  double mu = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curvature.size(); ++i) {
    if (!(curvature[i] > 0.0)) {
      throw UnsupportedProblem("mu_f_quadratic: a_i must be positive");
    }
    if (lipschitz[i] < curvature[i]) {
      throw InvalidInput("invalid Lipschitz declaration: L_" +
                         std::to_string(i + 1) + " < a_" +
                         std::to_string(i + 1));
    }
    mu = std::min(mu, curvature[i] / lipschitz[i]);
  }
  return mu;
}

double mu_f_quadratic(const ProblemFamilySpec& spec) {
  if (spec.kind != FamilyKind::quadratic) {
    throw UnsupportedProblem("mu_f has a closed form only for quadratics");
  }
  return mu_f_quadratic(spec.curvature, family_lipschitz(spec));
}

double R_sq_upper_quadratic(std::span<const double> curvature,
                            std::span<const double> lipschitz, double gap0) {
  if (curvature.size() != lipschitz.size() || curvature.empty()) {
    throw InvalidInput("R_sq_upper_quadratic: curvature/Lipschitz length mismatch");
  }
  double ratio = 0.0;
  for (std::size_t i = 0; i < curvature.size(); ++i) {
    if (!(curvature[i] > 0.0)) {
      throw UnsupportedProblem("R_sq_upper_quadratic: a_i must be positive");
    }
    ratio = std::max(ratio, lipschitz[i] / curvature[i]);
  }
  return 2.0 * std::max(0.0, gap0) * ratio;
}

double R_sq_upper_quadratic(const ProblemFamilySpec& spec,
                            const FeasiblePoint& x0) {
  if (spec.kind != FamilyKind::quadratic) {
    throw UnsupportedProblem(
        "level-set radius bound only available for quadratics; supply R^2");
  }
  const auto opt = kkt_solve_quadratic(spec);
  const BlockProblem problem = make_problem(spec);
  return R_sq_upper_quadratic(spec.curvature, problem.lipschitz(),
                              problem.value(x0.vec()) - opt.f_star);
}

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n, double scale) {
  std::vector<double> v(n);
  for (auto& e : v) e = scale * rng.normal();
  return v;
}

}  // namespace

OracleCheck check_lipschitz(const BlockProblem& problem, std::uint64_t seed,
                            std::size_t samples_per_block, double rel_slack) {
  OracleCheck out;
  Rng rng(seed);
  const std::size_t n = problem.dim();
  std::vector<double> g0(n), g1(n), xd(n);
  for (std::size_t i = 0; i < problem.blocks(); ++i) {
    const auto& f = problem.block(i);
    const double L = problem.lipschitz()[i];
    for (std::size_t s = 0; s < samples_per_block; ++s) {
      // Mix of scales so both the flat and curved regions get sampled.
      const double scale = std::pow(10.0, static_cast<double>(s % 5) - 2.0);
      auto x = random_vector(rng, n, 3.0);
      auto d = random_vector(rng, n, scale);
      for (std::size_t m = 0; m < n; ++m) xd[m] = x[m] + d[m];
      f.gradient(x, g0);
      f.gradient(xd, g1);
      double diff = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        diff += (g1[m] - g0[m]) * (g1[m] - g0[m]);
      }
      const double lhs = std::sqrt(diff);
      const double rhs = L * std::sqrt(norm_sq(d));
      if (rhs > 0.0) out.worst_ratio = std::max(out.worst_ratio, lhs / rhs);
      if (lhs > rhs * (1.0 + rel_slack) + 1e-300) {
        out.ok = false;
        out.detail = "gradient Lipschitz bound violated at block " +
                     std::to_string(i + 1);
        return out;
      }
      const double fx = f.value(x);
      const double model = fx + dot(g0, d) + 0.5 * L * norm_sq(d);
      const double fxd = f.value(xd);
      if (fxd > model + rel_slack * (1.0 + std::abs(model))) {
        out.ok = false;
        out.detail =
            "quadratic upper model violated at block " + std::to_string(i + 1);
        return out;
      }
    }
  }
  return out;
}

OracleCheck check_convexity(const BlockProblem& problem, std::uint64_t seed,
                            std::size_t samples_per_block) {
  OracleCheck out;
  Rng rng(seed);
  const std::size_t n = problem.dim();
  std::vector<double> mid(n);
  for (std::size_t i = 0; i < problem.blocks(); ++i) {
    const auto& f = problem.block(i);
    for (std::size_t s = 0; s < samples_per_block; ++s) {
      auto x = random_vector(rng, n, 3.0);
      auto y = random_vector(rng, n, 3.0);
      for (std::size_t m = 0; m < n; ++m) mid[m] = 0.5 * x[m] + 0.5 * y[m];
      const double avg = 0.5 * f.value(x) + 0.5 * f.value(y);
      const double fm = f.value(mid);
      if (fm > avg + 1e-12 * (1.0 + std::abs(avg))) {
        out.ok = false;
        out.detail = "midpoint convexity violated at block " +
                     std::to_string(i + 1);
        return out;
      }
    }
  }
  return out;
}

}  // namespace rbcd
