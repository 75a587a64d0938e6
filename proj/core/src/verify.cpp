#include "rbcd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rbcd/errors.hpp"
#include "rbcd/solver.hpp"
#include "rbcd/theory.hpp"

namespace rbcd {

namespace {

double log_uniform(Rng& rng, double lo, double hi) {
  return lo * std::pow(hi / lo, rng.uniform());
}

std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.next_u64() % (hi - lo + 1));
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

constexpr FamilyKind kFamilies[] = {FamilyKind::quadratic,
                                    FamilyKind::pseudo_huber,
                                    FamilyKind::softplus};

// One check: `body` returns an empty string on success or a description of
// the violation for the instance generated from the given seed.
using InstanceBody = std::function<std::string(std::uint64_t seed)>;

CheckOutcome run_check(const std::string& name, std::uint64_t base,
                       std::uint64_t tag, std::size_t instances,
                       const InstanceBody& body) {
  CheckOutcome out{name, true, 0, {}, std::nullopt};
  const std::uint64_t stream = base ^ splitmix64(tag);
  for (std::size_t idx = 0; idx < instances; ++idx) {
    const std::uint64_t seed = replica_seed(stream, idx);
    std::string err;
    try {
      err = body(seed);
    } catch (const std::exception& e) {
      err = std::string("exception: ") + e.what();
    }
    ++out.instances;
    if (!err.empty()) {
      out.passed = false;
      out.detail = err;
      out.failing_seed = seed;
      return out;
    }
  }
  return out;
}

}  // namespace

ProblemFamilySpec random_family(FamilyKind kind, std::size_t blocks,
                                std::size_t dim, Rng& rng) {
  ProblemFamilySpec spec;
  spec.kind = kind;
  spec.blocks = blocks;
  spec.dim = dim;
  switch (kind) {
    case FamilyKind::quadratic:
      for (std::size_t i = 0; i < blocks; ++i) {
        spec.curvature.push_back(log_uniform(rng, 0.1, 10.0));
      }
      for (std::size_t k = 0; k < blocks * dim; ++k) {
        spec.linear.push_back(rng.normal());
      }
      break;
    case FamilyKind::pseudo_huber:
      for (std::size_t i = 0; i < blocks; ++i) {
        spec.weight.push_back(log_uniform(rng, 0.1, 10.0));
      }
      break;
    case FamilyKind::softplus:
      for (std::size_t k = 0; k < blocks * dim; ++k) {
        spec.direction.push_back(rng.normal());
      }
      break;
  }
  return spec;
}

FeasiblePoint random_feasible_point(std::size_t blocks, std::size_t dim,
                                    Rng& rng, double scale) {
  BlockVector v(blocks, dim);
  for (auto& e : v.data()) e = scale * rng.normal();
  return project_to_S(v);
}

std::vector<CheckOutcome> run_property_suite(const VerifyOptions& options) {
  std::vector<CheckOutcome> results;
  const std::uint64_t base = options.seed;
  bool stop = false;
  auto add = [&](CheckOutcome outcome) {
    if (options.on_check) options.on_check(outcome);
    stop = !outcome.passed && options.stop_on_first_failure;
    results.push_back(std::move(outcome));
  };

  auto random_shape = [](Rng& rng) {
    return std::pair{uniform_int(rng, 2, 8), uniform_int(rng, 1, 4)};
  };

  for (std::size_t f = 0; f < 3 && !stop; ++f) {
    const FamilyKind kind = kFamilies[f];
    add(run_check("oracle_contract_" + to_string(kind), base, 10 + f, 20,
                  [&](std::uint64_t seed) -> std::string {
                    Rng rng(seed);
                    const auto [N, n] = random_shape(rng);
                    const auto problem =
                        make_problem(random_family(kind, N, n, rng));
                    const auto lip = check_lipschitz(problem, seed ^ 1, 100);
                    if (!lip.ok) return lip.detail;
                    const auto cvx = check_convexity(problem, seed ^ 2, 100);
                    if (!cvx.ok) return cvx.detail;
                    return {};
                  }));
  }

  if (!stop) {
    add(run_check(
        "gradient_finite_difference", base, 20, 150,
        [](std::uint64_t seed) -> std::string {
          Rng rng(seed);
          const FamilyKind kind = kFamilies[seed % 3];
          const std::size_t n = uniform_int(rng, 1, 4);
          const auto problem = make_problem(random_family(kind, 2, n, rng));
          const auto& fb = problem.block(0);
          std::vector<double> x(n), g(n), xp(n), xm(n);
          for (auto& e : x) e = rng.normal();
          fb.gradient(x, g);
          double err = 0.0, gnorm = 0.0;
          for (std::size_t m = 0; m < n; ++m) {
            const double h = 1e-5 * std::max(1.0, std::abs(x[m]));
            xp = x;
            xm = x;
            xp[m] += h;
            xm[m] -= h;
            const double fd = (fb.value(xp) - fb.value(xm)) / (2.0 * h);
            err += (fd - g[m]) * (fd - g[m]);
            gnorm += g[m] * g[m];
          }
          if (std::sqrt(err) > 1e-6 * std::max(1.0, std::sqrt(gnorm))) {
            return to_string(kind) + " gradient differs from finite "
                                     "differences by " + num(std::sqrt(err));
          }
          return {};
        }));
  }

  if (!stop) {
    add(run_check("projection_idempotent", base, 30, 200,
                  [&](std::uint64_t seed) -> std::string {
                    Rng rng(seed);
                    const auto [N, n] = random_shape(rng);
                    const auto p = random_feasible_point(N, n, rng, 10.0);
                    if (feasibility_violation(p.vec()) > kFeasibilityTol) {
                      return "projection left S";
                    }
                    const auto q = project_to_S(p.vec());
                    for (std::size_t k = 0; k < p.vec().size(); ++k) {
                      const double a = p.vec()[k];
                      const double b = q.vec()[k];
                      if (a != b && std::nextafter(a, b) != b) {
                        return "re-projection moved component " +
                               std::to_string(k) + " by more than 1 ulp";
                      }
                    }
                    return {};
                  }));
  }

  if (!stop) {
    add(run_check(
        "quadratic_optimum", base, 40, 200,
        [&](std::uint64_t seed) -> std::string {
          Rng rng(seed);
          const auto [N, n] = random_shape(rng);
          auto spec = random_family(FamilyKind::quadratic, N, n, rng);
          spec.lipschitz_multiplier = 1.0 + 2.0 * rng.uniform();
          const auto opt = kkt_solve_quadratic(spec);
          const auto problem = make_problem(spec);
          double sum_viol = 0.0;
          for (std::size_t m = 0; m < n; ++m) {
            double s = 0.0;
            for (std::size_t i = 0; i < N; ++i) s += opt.x_star.block(i)[m];
            sum_viol = std::max(sum_viol, std::abs(s));
          }
          if (sum_viol > 1e-12) return "sum of x* blocks = " + num(sum_viol);
          const double res = grad_residual(problem, opt.x_star.vec());
          if (res > 1e-10) return "gradient residual at x* = " + num(res);
          const auto x0 = random_feasible_point(N, n, rng, 3.0);
          const auto l3 = lemma3_check(problem, x0, opt.x_star, opt.f_star);
          if (l3.lhs > l3.rhs + 1e-10) {
            return "f(x0) - f* = " + num(l3.lhs) + " exceeds R~^2/2 = " +
                   num(l3.rhs);
          }
          const double upper = R_sq_upper_quadratic(spec, x0);
          const double tR = tilde_R_sq(x0, opt.x_star, problem.lipschitz());
          if (upper < tR * (1.0 - 1e-12)) {
            return "R^2 upper bound " + num(upper) + " below R~^2 " + num(tR);
          }
          return {};
        }));
  }

  if (!stop) {
    add(run_check("basis_of_S", base, 50, 20,
                  [&](std::uint64_t seed) -> std::string {
                    Rng rng(seed);
                    for (std::size_t N = 2; N <= 6; ++N) {
                      for (std::size_t n = 1; n <= 4; ++n) {
                        const auto basis = basis_vectors(N, n);
                        if (basis.vectors.size() != (N - 1) * n) {
                          return "wrong basis size";
                        }
                        for (const auto& v : basis.vectors) {
                          if (feasibility_violation(v) != 0.0) {
                            return "basis vector not in S";
                          }
                        }
                        const auto x = random_feasible_point(N, n, rng);
                        const auto back =
                            reconstruct(decompose(x.vec()), N, n);
                        double err = 0.0, scale = 0.0;
                        for (std::size_t k = 0; k < x.vec().size(); ++k) {
                          err = std::max(err, std::abs(back[k] - x.vec()[k]));
                          scale = std::max(scale, std::abs(x.vec()[k]));
                        }
                        if (err > 1e-12 * std::max(1.0, scale)) {
                          return "reconstruction error " + num(err);
                        }
                      }
                    }
                    return {};
                  }));
  }

  if (!stop) {
    add(run_check(
        "operator_identity_on_S", base, 60, 1000,
        [&](std::uint64_t seed) -> std::string {
          Rng rng(seed);
          const std::size_t N = uniform_int(rng, 2, 12);
          const std::size_t n = uniform_int(rng, 1, 5);
          std::vector<double> L(N);
          for (auto& l : L) l = log_uniform(rng, 1e-3, 1e3);
          const auto x = random_feasible_point(N, n, rng);
          const auto image = lemma2_apply(L, x.vec());
          double err = 0.0, xn = 0.0;
          const double scale = 1.0 / static_cast<double>(N - 1);
          for (std::size_t k = 0; k < x.vec().size(); ++k) {
            const double d = image[k] - scale * x.vec()[k];
            err += d * d;
            xn += x.vec()[k] * x.vec()[k];
          }
          if (std::sqrt(err) > 1e-10 * std::max(1.0, std::sqrt(xn))) {
            return "operator image differs from x/(N-1) by " +
                   num(std::sqrt(err));
          }
          return {};
        }));
  }

  if (!stop) {
    add(run_check(
        "descent_inequality", base, 70, 3000,
        [&](std::uint64_t seed) -> std::string {
          Rng rng(seed);
          const FamilyKind kind = kFamilies[seed % 3];
          const auto [N, n] = random_shape(rng);
          auto spec = random_family(kind, N, n, rng);
          const bool tight = kind == FamilyKind::quadratic && rng.uniform() < 0.5;
          if (kind == FamilyKind::quadratic && !tight) {
            spec.lipschitz_multiplier = 1.0 + rng.uniform();
          }
          const auto problem = make_problem(spec);
          const auto x = random_feasible_point(N, n, rng, 2.0);
          const std::size_t i = uniform_int(rng, 0, N - 2);
          const std::size_t j = uniform_int(rng, i + 1, N - 1);
          const auto dc = descent_check(problem, x, i, j);
          const double slack = 1e-9 * (1.0 + std::abs(problem.value(x.vec())));
          if (dc.actual_decrease < dc.model_bound - slack) {
            return "decrease " + num(dc.actual_decrease) +
                   " below model bound " + num(dc.model_bound);
          }
          if (tight && std::abs(dc.actual_decrease - dc.model_bound) > 1e-9) {
            return "tight quadratic: decrease " + num(dc.actual_decrease) +
                   " != bound " + num(dc.model_bound);
          }
          return {};
        }));
  }

  if (!stop) {
    add(run_check(
        "pair_distribution", base, 80, 200,
        [&](std::uint64_t seed) -> std::string {
          Rng rng(seed);
          const std::size_t N = uniform_int(rng, 2, 20);
          std::vector<double> L(N);
          for (auto& l : L) l = log_uniform(rng, 1e-3, 1e3);
          const auto dist = build_distribution(L);
          if (dist.size() != N * (N - 1) / 2) return "wrong number of pairs";
          double inv = 0.0;
          for (double l : L) inv += 1.0 / l;
          double total = 0.0;
          for (std::size_t k = 0; k < dist.size(); ++k) {
            const auto [i, j] = dist.pairs()[k];
            const double p = dist.probs()[k];
            if (!(p > 0.0)) return "non-positive probability";
            const double lhs = p * static_cast<double>(N - 1) * inv;
            const double rhs = 1.0 / L[i] + 1.0 / L[j];
            if (std::abs(lhs - rhs) > 1e-12 * rhs) {
              return "p_ij formula mismatch at pair " + std::to_string(k);
            }
            if (k > 0 && !(dist.cumulative()[k] > dist.cumulative()[k - 1])) {
              return "cumulative table not strictly increasing";
            }
            total += p;
          }
          if (std::abs(total - 1.0) > 1e-12) return "probabilities sum to " + num(total);
          return {};
        }));
  }

  if (!stop) {
    add(run_check(
        "bound_orderings", base, 90, 10000,
        [&, cell = std::size_t{0}](std::uint64_t) mutable -> std::string {
          // One point of the 100 x 100 grid of (mu_f, N) per instance.
          const std::size_t a = 1 + cell / 100;
          const std::size_t N = 2 + cell % 100;
          ++cell;
          const double mu = static_cast<double>(a) / 100.0;
          const double ours = linear_factor(N, mu);
          const double prior = nng_linear_factor(N, mu);
          if (!(ours <= prior)) {
            return "linear factor ordering fails at mu=" + num(mu) +
                   " N=" + std::to_string(N);
          }
          if (!(ours >= 0.0 && ours < 1.0)) {
            return "linear factor outside [0,1) at mu=" + num(mu);
          }
          const double R2 = 1.0 + mu;  // R^2 >= R~^2 = 1
          const std::size_t k = 1 + (a * N) % 500;
          const double A = bound_sublinear(k, N, 1.0);
          const double B = bound_nng_sublinear(k, N, R2);
          if (!(A <= B)) return "sublinear dominance fails";
          if (!(bound_sublinear(k + 1, N, 1.0) < A)) {
            return "sublinear bound not strictly decreasing";
          }
          return {};
        }));
  }

  return results;
}

}  // namespace rbcd
