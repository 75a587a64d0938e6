#include "rbcd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "rbcd/errors.hpp"
#include "rbcd/pair_sampler.hpp"

namespace rbcd {

std::optional<double> ProblemInstance::gap0() const {
  if (exact_optimum && x_star) return optimality_gap(problem, x0.vec(), x_star->vec());
  if (!f_star) return std::nullopt;
  return problem.value(x0.vec()) - *f_star;
}

std::optional<BoundInputs> ProblemInstance::bound_inputs() const {
  const auto g0 = gap0();
  if (!g0 || !tilde_R_sq) return std::nullopt;
  return BoundInputs{problem.blocks(), *tilde_R_sq, R_sq, mu_f, *g0};
}

ProblemInstance instantiate(const ProblemSetup& setup,
                            const BoundsOverrides& overrides) {
  const ProblemFamilySpec spec = setup.family_spec();
  std::optional<double> mu;
  if (overrides.mu_f) {
    if (!(*overrides.mu_f > 0.0 && *overrides.mu_f <= 1.0)) {
      throw ConfigError("bounds.mu_f must lie in (0, 1]");
    }
    mu = overrides.mu_f;
  }
  BlockProblem problem = make_problem(spec);
  if (mu) {
    problem = problem.with_mu_f(mu);
  } else {
    mu = problem.mu_f();
  }

  const auto x0 = project_to_S(BlockVector(
      spec.blocks, spec.dim, setup.x0.expand_vectors(spec.blocks, spec.dim)));

  ProblemInstance inst{spec, std::move(problem), x0, {}, {}, {}, {}, mu};
  if (spec.kind == FamilyKind::quadratic) {
    auto opt = kkt_solve_quadratic(spec);
    inst.f_star = opt.f_star;
    inst.tilde_R_sq = tilde_R_sq(x0, opt.x_star, inst.problem.lipschitz());
    inst.x_star = std::move(opt.x_star);
    inst.exact_optimum = true;
    inst.R_sq = R_sq_upper_quadratic(spec.curvature, inst.problem.lipschitz(),
                                     *inst.gap0());
  }
  if (overrides.f_star) {
    inst.f_star = overrides.f_star;
    inst.exact_optimum = false;
  }
  if (overrides.tilde_R_sq) inst.tilde_R_sq = overrides.tilde_R_sq;
  if (overrides.R_sq) inst.R_sq = overrides.R_sq;
  return inst;
}

ExperimentConfig experiment_config(const Config& config) {
  return {config.problem, config.bounds, config.solver.seed,
          config.experiment};
}

std::vector<std::size_t> default_checkpoints(std::size_t iterations) {
  static constexpr std::size_t ladder[] = {0, 1, 2, 5, 10, 20, 50, 100, 200, 500};
  std::vector<std::size_t> out;
  for (std::size_t k : ladder) {
    if (k <= iterations) out.push_back(k);
  }
  if (out.back() != iterations) out.push_back(iterations);
  return out;
}

ExperimentPlan plan_experiment(const ExperimentConfig& config) {
  const auto& s = config.settings;
  if (s.replicas < 1) throw ConfigError("replicas must be >= 1");
  if (s.workers < 1) throw ConfigError("workers must be >= 1");
  if (s.eps && s.eps_rel) throw ConfigError("give eps or eps_rel, not both");

  ExperimentPlan plan{instantiate(config.problem, config.overrides),
                      0, 0, {}, 0, 1, std::nullopt, std::nullopt, false};
  const auto& inst = plan.instance;
  if (!inst.f_star) {
    throw ConfigError(
        "optimal value unknown for this family; set bounds.f_star");
  }
  if (!inst.tilde_R_sq) {
    throw ConfigError(
        "distance to the optimum unknown for this family; set "
        "bounds.tilde_R_sq");
  }
  const double gap0 = *inst.gap0();

  plan.replicas = s.replicas;
  plan.seed = config.seed;
  plan.workers = s.workers;
  plan.high_probability = s.high_probability;
  if (s.eps) plan.eps = s.eps;
  if (s.eps_rel) plan.eps = *s.eps_rel * gap0;
  plan.rho = s.rho;

  const bool need_eps = s.high_probability || !s.iters;
  if (need_eps) {
    if (!plan.eps || !plan.rho) {
      throw ConfigError("high-probability runs need eps (or eps_rel) and rho");
    }
    if (!(*plan.eps > 0.0 && *plan.eps < gap0)) {
      throw ConfigError("eps must lie in (0, f(x0) - f*)");
    }
    if (!(*plan.rho > 0.0 && *plan.rho < 1.0)) {
      throw ConfigError("rho must lie in (0, 1)");
    }
  }

  if (s.iters) {
    plan.iterations = *s.iters;
  } else {
    if (!inst.R_sq) {
      throw ConfigError("iters = auto needs R^2; set bounds.R_sq");
    }
    const auto report = complexity_report({inst.problem.blocks(), *inst.R_sq,
                                           *inst.tilde_R_sq, inst.mu_f,
                                           *plan.eps, *plan.rho, gap0});
    plan.iterations = static_cast<std::size_t>(ComplexityReport::display(report.K));
  }
  if (plan.iterations < 1) throw ConfigError("iterations must be >= 1");

  plan.checkpoints = s.checkpoints.empty() ? default_checkpoints(plan.iterations)
                                           : s.checkpoints;
  std::sort(plan.checkpoints.begin(), plan.checkpoints.end());
  plan.checkpoints.erase(
      std::unique(plan.checkpoints.begin(), plan.checkpoints.end()),
      plan.checkpoints.end());
  if (plan.checkpoints.back() > plan.iterations) {
    throw ConfigError("checkpoint " + std::to_string(plan.checkpoints.back()) +
                      " exceeds the iteration count " +
                      std::to_string(plan.iterations));
  }
  return plan;
}

std::vector<Trajectory> run_replica_trajectories(const ExperimentPlan& plan) {
  const auto& inst = plan.instance;
  const auto dist = build_distribution(inst.problem.lipschitz());
  const StoppingRule stop{plan.iterations, std::nullopt, std::nullopt};
  const RecordPolicy record{0, plan.checkpoints};
  const KnownOptimum optimum = inst.optimum();

  std::vector<Trajectory> out(plan.replicas);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < plan.replicas; r = next++) {
      Rng rng(replica_seed(plan.seed, r));
      out[r] = run(inst.problem, inst.x0, dist, rng, stop, record, optimum);
    }
  };
  const std::size_t workers = std::min(plan.workers, plan.replicas);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return out;
}

namespace {

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Sorting first makes the result independent of replica order.
MeanStderr mean_stderr(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const double M = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / M;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (M - 1.0)) / std::sqrt(M)};
}

const StepRecord& record_at(const Trajectory& t, std::size_t k) {
  const auto it = std::find_if(t.records.begin(), t.records.end(),
                               [k](const StepRecord& r) { return r.k == k; });
  if (it == t.records.end()) {
    throw InvalidInput("trajectory has no record at checkpoint " +
                       std::to_string(k));
  }
  return *it;
}

}  // namespace

ExperimentSummary summarize(const ExperimentPlan& plan,
                            std::span<const Trajectory> trajectories) {
  const auto& inst = plan.instance;
  if (trajectories.size() != plan.replicas || trajectories.empty()) {
    throw InvalidInput("summarize: expected one trajectory per replica");
  }
  const auto inputs = inst.bound_inputs();
  if (!inputs) throw ConfigError("summary needs f* and R~^2");
  const auto bounds = make_bound_set(*inputs, plan.checkpoints);

  ExperimentSummary s;
  s.blocks = inst.problem.blocks();
  s.dim = inst.problem.dim();
  s.family = to_string(inst.spec.kind);
  s.replicas = plan.replicas;
  s.iterations = plan.iterations;
  s.seed = plan.seed;
  s.f_star = *inst.f_star;
  s.gap0 = inputs->gap0;
  {
    constexpr double ulp = std::numeric_limits<double>::epsilon();
    if (inst.exact_optimum) {
      // Iterates carry a few ulps of error per coordinate, so the divergence
      // cannot drop below roughly that error in the L-norm.
      s.gap_resolution = 64.0 * ulp * ulp *
                         l_norm_sq(inst.x_star->vec(), inst.problem.lipschitz());
    } else {
      // f(x) - f* subtracts O(|f*|) sums of N block values.
      s.gap_resolution = 8.0 * static_cast<double>(s.blocks) * ulp *
                         (1.0 + std::abs(s.f_star));
    }
  }
  s.tilde_R_sq = inputs->tilde_R_sq;
  s.R_sq = inputs->R_sq;
  s.mu_f = inputs->mu_f;
  s.eps = plan.eps;
  s.rho = plan.rho;

  const bool has_lyapunov = inst.x_star.has_value();
  std::vector<double> prev_lyap;
  for (std::size_t c = 0; c < plan.checkpoints.size(); ++c) {
    const std::size_t k = plan.checkpoints[c];
    std::vector<double> gaps, lyap;
    gaps.reserve(trajectories.size());
    for (const auto& t : trajectories) {
      const auto& rec = record_at(t, k);
      gaps.push_back(*rec.gap);
      if (has_lyapunov) lyap.push_back(0.5 * *rec.r_sq + *rec.gap);
    }
    CheckpointStats row;
    row.k = k;
    const auto g = mean_stderr(gaps);
    row.mean_gap = g.mean;
    row.stderr_gap = g.stderr_;
    if (has_lyapunov) {
      const auto l = mean_stderr(lyap);
      row.mean_lyapunov = l.mean;
      row.stderr_lyapunov = l.stderr_;
      if (!prev_lyap.empty()) {
        std::vector<double> inc(lyap.size());
        for (std::size_t r = 0; r < lyap.size(); ++r) {
          inc[r] = lyap[r] - prev_lyap[r];
        }
        const auto d = mean_stderr(std::move(inc));
        row.lyapunov_increase = d.mean;
        row.stderr_lyapunov_increase = d.stderr_;
      }
      prev_lyap = std::move(lyap);
    }
    row.bound_ours_sublinear = bounds.ours_sublinear[c];
    row.bound_ours_linear = bounds.ours_linear[c];
    row.bound_nng_sublinear = bounds.nng_sublinear[c];
    row.bound_nng_linear = bounds.nng_linear[c];
    s.rows.push_back(row);
  }

  if (plan.high_probability) {
    std::size_t hits = 0;
    for (const auto& t : trajectories) {
      if (*record_at(t, plan.iterations).gap <= *plan.eps) ++hits;
    }
    s.success_fraction =
        static_cast<double>(hits) / static_cast<double>(plan.replicas);
  }
  return s;
}

ExperimentSummary run_replicas(const ExperimentConfig& config) {
  auto plan = plan_experiment(config);
  // The final iterate is needed for the success fraction.
  const auto trajectories = run_replica_trajectories(plan);
  return summarize(plan, trajectories);
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

CertifyReport certify(const ExperimentSummary& s) {
  CertifyReport report;
  auto check = [&](bool ok, const std::string& what) {
    report.checks.push_back((ok ? "PASS " : "FAIL ") + what);
    if (!ok) {
      report.passed = false;
      report.violations.push_back(what);
    }
  };

  for (const auto& row : s.rows) {
    const std::string at = "k=" + std::to_string(row.k);
    const double envelope = 3.0 * row.stderr_gap + s.gap_resolution;
    check(row.mean_gap <= row.bound_ours_sublinear + envelope,
          at + " mean_gap " + fmt(row.mean_gap) + " <= sublinear bound " +
              fmt(row.bound_ours_sublinear) + " + 3se + resolution");
    if (row.bound_ours_linear) {
      check(row.mean_gap <= *row.bound_ours_linear + envelope,
            at + " mean_gap " + fmt(row.mean_gap) + " <= linear bound " +
                fmt(*row.bound_ours_linear) + " + 3se + resolution");
    }
    if (row.k >= 1 && row.bound_nng_sublinear) {
      check(row.bound_ours_sublinear <= *row.bound_nng_sublinear,
            at + " sublinear bound " + fmt(row.bound_ours_sublinear) +
                " <= prior bound " + fmt(*row.bound_nng_sublinear));
    }
    if (row.lyapunov_increase) {
      const double slack = 3.0 * *row.stderr_lyapunov_increase + s.gap_resolution;
      check(*row.lyapunov_increase <= slack,
            at + " Lyapunov change " + fmt(*row.lyapunov_increase) +
                " <= 3se + resolution");
    }
  }
  if (s.mu_f && *s.mu_f > 0.0) {
    const double ours = linear_factor(s.blocks, *s.mu_f);
    const double prior = nng_linear_factor(s.blocks, *s.mu_f);
    check(ours <= prior, "linear factor " + fmt(ours) +
                             " <= prior linear factor " + fmt(prior));
  }
  if (s.success_fraction) {
    const double rho = *s.rho;
    const double threshold =
        (1.0 - rho) -
        3.0 * std::sqrt(rho * (1.0 - rho) / static_cast<double>(s.replicas));
    check(*s.success_fraction >= threshold,
          "success fraction " + fmt(*s.success_fraction) + " >= " +
              fmt(threshold));
  }
  return report;
}

}  // namespace rbcd
