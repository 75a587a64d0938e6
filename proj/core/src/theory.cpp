#include "rbcd/theory.hpp"

#include <cmath>
#include <string>

#include "rbcd/errors.hpp"
#include "rbcd/pair_sampler.hpp"
#include "rbcd/solver.hpp"

namespace rbcd {

BasisSet basis_vectors(std::size_t blocks, std::size_t dim) {
  if (blocks < 2 || dim < 1) {
    throw InvalidInput("basis_vectors needs N >= 2 and n >= 1");
  }
  BasisSet set{blocks, dim, {}};
  set.vectors.reserve((blocks - 1) * dim);
  for (std::size_t l = 0; l + 1 < blocks; ++l) {
    for (std::size_t m = 0; m < dim; ++m) {
      BlockVector v(blocks, dim);
      v.block(l)[m] = 1.0;
      v.block(l + 1)[m] = -1.0;
      set.vectors.push_back(std::move(v));
    }
  }
  return set;
}

std::vector<double> decompose(const BlockVector& x) {
  if (x.blocks() < 2) throw InvalidInput("decompose needs N >= 2");
  if (!(feasibility_violation(x) <= kFeasibilityTol)) {
    throw InvalidInput("decompose: point is not in S");
  }
  const std::size_t N = x.blocks();
  const std::size_t n = x.dim();
  std::vector<double> coeffs((N - 1) * n);
  for (std::size_t m = 0; m < n; ++m) {
    double partial = 0.0;
    for (std::size_t l = 0; l + 1 < N; ++l) {
      partial += x.block(l)[m];
      coeffs[l * n + m] = partial;
    }
  }
  return coeffs;
}

BlockVector reconstruct(std::span<const double> coeffs, std::size_t blocks,
                        std::size_t dim) {
  if (blocks < 2 || coeffs.size() != (blocks - 1) * dim) {
    throw InvalidInput("reconstruct: expected (N-1)*n coefficients");
  }
  BlockVector x(blocks, dim);
  for (std::size_t l = 0; l + 1 < blocks; ++l) {
    for (std::size_t m = 0; m < dim; ++m) {
      const double c = coeffs[l * dim + m];
      x.block(l)[m] += c;
      x.block(l + 1)[m] -= c;
    }
  }
  return x;
}

BlockVector lemma2_apply(std::span<const double> lipschitz,
                         const BlockVector& x) {
  if (lipschitz.size() != x.blocks()) {
    throw InvalidInput("lemma2_apply: one Lipschitz constant per block");
  }
  const auto dist = build_distribution(lipschitz);
  const std::size_t n = x.dim();
  BlockVector out(x.blocks(), n);
  std::vector<double> w(n);
  for (std::size_t k = 0; k < dist.size(); ++k) {
    const auto [i, j] = dist.pairs()[k];
    const double Li = lipschitz[i];
    const double Lj = lipschitz[j];
    const double coef = dist.probs()[k] / (Li + Lj);
    auto xi = x.block(i);
    auto xj = x.block(j);
    for (std::size_t m = 0; m < n; ++m) w[m] = coef * (Li * xi[m] - Lj * xj[m]);
    auto oi = out.block(i);
    auto oj = out.block(j);
    for (std::size_t m = 0; m < n; ++m) {
      oi[m] += w[m];
      oj[m] -= w[m];
    }
  }
  return out;
}

DescentCheck descent_check(const BlockProblem& problem,
                           const FeasiblePoint& x, std::size_t i,
                           std::size_t j) {
  const auto d = direction(problem, x, i, j);
  const auto L = problem.lipschitz();
  // d = -(g_i - g_j)/(L_i + L_j), so ||g_i - g_j||^2 = (L_i + L_j)^2 ||d||^2.
  double dd = 0.0;
  for (double v : d) dd += v * v;
  DescentCheck out;
  out.model_bound = 0.5 * (L[i] + L[j]) * dd;

  // Only blocks i and j change; differencing them avoids cancellation
  // against the untouched part of f.
  FeasiblePoint next = x;
  next.apply_pair_update(i, j, d);
  const auto& fi = problem.block(i);
  const auto& fj = problem.block(j);
  out.actual_decrease = (fi.value(x.block(i)) - fi.value(next.block(i))) +
                        (fj.value(x.block(j)) - fj.value(next.block(j)));
  return out;
}

Lemma3Check lemma3_check(const BlockProblem& problem, const FeasiblePoint& x0,
                         const FeasiblePoint& x_star, double f_star) {
  return {problem.value(x0.vec()) - f_star,
          0.5 * tilde_R_sq(x0, x_star, problem.lipschitz())};
}

namespace {

void require_blocks(std::size_t blocks) {
  if (blocks < 2) throw InvalidInput("bounds need N >= 2");
}

void require_mu(double mu_f) {
  if (!(mu_f > 0.0 && mu_f <= 1.0)) {
    throw InvalidInput("mu_f must lie in (0, 1]");
  }
}

}  // namespace

double bound_sublinear(std::size_t k, std::size_t blocks, double tilde_R_sq) {
  require_blocks(blocks);
  const double N = static_cast<double>(blocks);
  return (N - 1.0) / (N + static_cast<double>(k) - 1.0) * tilde_R_sq;
}

double linear_factor(std::size_t blocks, double mu_f) {
  require_blocks(blocks);
  require_mu(mu_f);
  const double N = static_cast<double>(blocks);
  return 1.0 - 2.0 * mu_f / ((N - 1.0) * (1.0 + mu_f));
}

double bound_linear(std::size_t k, std::size_t blocks, double mu_f,
                    double tilde_R_sq) {
  return std::pow(linear_factor(blocks, mu_f), static_cast<double>(k)) *
         tilde_R_sq;
}

double bound_nng_sublinear(std::size_t k, std::size_t blocks, double R_sq) {
  require_blocks(blocks);
  if (k == 0) throw InvalidInput("prior sublinear bound is undefined at k = 0");
  const double N = static_cast<double>(blocks);
  return 2.0 * (N - 1.0) * R_sq / static_cast<double>(k);
}

double nng_linear_factor(std::size_t blocks, double mu_f) {
  require_blocks(blocks);
  require_mu(mu_f);
  return 1.0 - mu_f / (static_cast<double>(blocks) - 1.0);
}

double bound_nng_linear(std::size_t k, std::size_t blocks, double mu_f,
                        double gap0) {
  return std::pow(nng_linear_factor(blocks, mu_f), static_cast<double>(k)) *
         gap0;
}

double compare_bounds(std::size_t blocks, std::size_t k, double R_sq,
                      double tilde_R_sq) {
  require_blocks(blocks);
  if (k == 0) throw InvalidInput("compare_bounds needs k >= 1");
  if (!(tilde_R_sq > 0.0)) throw InvalidInput("R~^2 must be positive");
  if (R_sq < tilde_R_sq) {
    throw InvalidInput("R^2 < R~^2 contradicts R >= R~");
  }
  const double N = static_cast<double>(blocks);
  const double floor_ratio = 2.0 * ((N - 1.0) / static_cast<double>(k) + 1.0);
  return floor_ratio * R_sq / tilde_R_sq;
}

BoundSet make_bound_set(const BoundInputs& inputs,
                        std::span<const std::size_t> iterations) {
  require_blocks(inputs.blocks);
  BoundSet set;
  set.inputs = inputs;
  const bool linear = inputs.mu_f && *inputs.mu_f > 0.0;
  for (std::size_t k : iterations) {
    set.k.push_back(k);
    set.ours_sublinear.push_back(
        bound_sublinear(k, inputs.blocks, inputs.tilde_R_sq));
    set.ours_linear.push_back(
        linear ? std::optional(bound_linear(k, inputs.blocks, *inputs.mu_f,
                                            inputs.tilde_R_sq))
               : std::nullopt);
    set.nng_sublinear.push_back(
        inputs.R_sq && k >= 1
            ? std::optional(bound_nng_sublinear(k, inputs.blocks, *inputs.R_sq))
            : std::nullopt);
    set.nng_linear.push_back(
        linear ? std::optional(bound_nng_linear(k, inputs.blocks, *inputs.mu_f,
                                                inputs.gap0))
               : std::nullopt);
  }
  return set;
}

std::uint64_t ComplexityReport::display(double raw) {
  if (!(raw > 0.0)) return 0;
  return static_cast<std::uint64_t>(std::ceil(raw));
}

ComplexityReport complexity_report(const ComplexityInputs& in) {
  require_blocks(in.blocks);
  if (!(in.eps > 0.0 && in.eps < in.gap0)) {
    throw InvalidInput("eps must lie in (0, f(x0) - f*)");
  }
  if (!(in.rho > 0.0 && in.rho < 1.0)) {
    throw InvalidInput("rho must lie in (0, 1)");
  }
  if (!(in.R_sq > 0.0) || !(in.tilde_R_sq > 0.0)) {
    throw InvalidInput("R^2 and R~^2 must be positive");
  }
  const double N = static_cast<double>(in.blocks);
  const double scale = 2.0 * (N - 1.0) * in.R_sq / in.eps;

  ComplexityReport out;
  out.inputs = in;
  out.K = scale * (1.0 + std::log(in.tilde_R_sq / (2.0 * in.R_sq * in.rho))) -
          N + 3.0;
  out.K_bar = scale * (1.0 + std::log(1.0 / in.rho)) + 2.0;
  if (in.mu_f) {
    const double mu = *in.mu_f;
    require_mu(mu);
    out.K_tilde = (N - 1.0) * (1.0 + mu) / (2.0 * mu) *
                  std::log(in.tilde_R_sq / (in.rho * in.eps));
    out.K_hat = (N - 1.0) / mu * std::log(in.gap0 / (in.eps * in.rho));
  }
  return out;
}

}  // namespace rbcd
