#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "oracles/oracles.hpp"
#include "rbcd/errors.hpp"
#include "rbcd/experiment.hpp"
#include "rbcd/report.hpp"

namespace rbcd {
namespace {

ExperimentConfig two_block_config() {
  ExperimentConfig c;
  c.problem.blocks = 2;
  c.problem.dim = 1;
  c.problem.a = ValueRule::parse("constant:1");
  c.problem.b = ValueRule::parse("constant:0");
  c.problem.x0 = ValueRule::parse("list:1,-1");
  c.settings.replicas = 1;
  c.settings.iters = 1;
  return c;
}

ExperimentConfig desk_config(std::size_t replicas, std::size_t iters) {
  ExperimentConfig c;
  c.problem.blocks = 10;
  c.problem.dim = 2;
  c.problem.a = ValueRule::parse("geometric:1,16");
  c.problem.b = ValueRule::parse("gaussian:11");
  c.problem.x0 = ValueRule::parse("gaussian:12");
  c.seed = 42;
  c.settings.replicas = replicas;
  c.settings.iters = iters;
  return c;
}

std::string summary_csv(const ExperimentSummary& s) {
  std::ostringstream os;
  write_summary_csv(os, s);
  write_summary_info(os, s);
  return os.str();
}

TEST(Checkpoints, DefaultLadder) {
  EXPECT_EQ(default_checkpoints(500),
            (std::vector<std::size_t>{0, 1, 2, 5, 10, 20, 50, 100, 200, 500}));
  EXPECT_EQ(default_checkpoints(30), (std::vector<std::size_t>{0, 1, 2, 5, 10, 20, 30}));
  EXPECT_EQ(default_checkpoints(1), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(default_checkpoints(933).back(), 933u);
}

TEST(Instantiate, AnalyticQuantities) {
  const auto inst = instantiate(two_block_config().problem);
  EXPECT_EQ(*inst.f_star, 0.0);
  EXPECT_EQ(*inst.gap0(), 1.0);
  EXPECT_EQ(*inst.tilde_R_sq, 2.0);
  EXPECT_EQ(*inst.R_sq, 2.0);
  EXPECT_EQ(*inst.mu_f, 1.0);
  EXPECT_TRUE(inst.exact_optimum);
  EXPECT_TRUE(inst.optimum().exact);
}

TEST(Instantiate, OverridesTakePrecedence) {
  BoundsOverrides o;
  o.R_sq = 9.0;
  o.tilde_R_sq = 3.0;
  o.mu_f = 0.5;
  o.f_star = -0.25;
  const auto inst = instantiate(two_block_config().problem, o);
  EXPECT_EQ(*inst.R_sq, 9.0);
  EXPECT_EQ(*inst.tilde_R_sq, 3.0);
  EXPECT_EQ(*inst.mu_f, 0.5);
  EXPECT_EQ(*inst.f_star, -0.25);
  EXPECT_EQ(*inst.problem.mu_f(), 0.5);
  EXPECT_EQ(*inst.gap0(), 1.25);
  // A manual f* no longer matches x*, so gaps fall back to f - f*.
  EXPECT_FALSE(inst.exact_optimum);
  EXPECT_FALSE(inst.optimum().exact);
}

TEST(Instantiate, NonQuadraticHasNoAnalyticOptimum) {
  ProblemSetup s;
  s.kind = FamilyKind::softplus;
  s.blocks = 4;
  s.dim = 2;
  const auto inst = instantiate(s);
  EXPECT_FALSE(inst.f_star);
  EXPECT_FALSE(inst.tilde_R_sq);
  EXPECT_FALSE(inst.bound_inputs());
}

TEST(Plan, Errors) {
  ExperimentConfig soft;
  soft.problem.kind = FamilyKind::softplus;
  EXPECT_THROW(plan_experiment(soft), ConfigError);

  auto c = desk_config(10, 50);
  c.settings.checkpoints = {0, 60};
  EXPECT_THROW(plan_experiment(c), ConfigError);

  c = desk_config(0, 50);
  EXPECT_THROW(plan_experiment(c), ConfigError);

  c = desk_config(10, 50);
  c.settings.high_probability = true;
  EXPECT_THROW(plan_experiment(c), ConfigError);
  c.settings.rho = 0.1;
  c.settings.eps = 1e9;
  EXPECT_THROW(plan_experiment(c), ConfigError);
  c.settings.eps = 0.5;
  c.settings.rho = 1.0;
  EXPECT_THROW(plan_experiment(c), ConfigError);
  c.settings.rho = 0.1;
  EXPECT_NO_THROW(plan_experiment(c));
}

TEST(Plan, AutoIterationsUseComplexity) {
  auto c = desk_config(10, 0);
  c.settings.iters.reset();
  c.settings.eps_rel = 0.1;
  c.settings.rho = 0.1;
  c.settings.high_probability = true;
  const auto plan = plan_experiment(c);
  const auto& inst = plan.instance;
  const auto report = complexity_report({10, *inst.R_sq, *inst.tilde_R_sq,
                                         inst.mu_f, 0.1 * *inst.gap0(), 0.1,
                                         *inst.gap0()});
  EXPECT_EQ(plan.iterations, static_cast<std::size_t>(std::ceil(report.K)));
  EXPECT_EQ(*plan.eps, 0.1 * *inst.gap0());
  EXPECT_EQ(plan.checkpoints.back(), plan.iterations);
}

TEST(RunReplicas, TwoBlockDegenerate) {
  const auto s = run_replicas(two_block_config());
  ASSERT_EQ(s.rows.size(), 2u);
  EXPECT_EQ(s.rows[0].mean_gap, 1.0);
  EXPECT_EQ(s.rows[1].mean_gap, 0.0);
  EXPECT_EQ(s.rows[1].stderr_gap, 0.0);
  const auto report = certify(s);
  EXPECT_TRUE(report.passed);
  EXPECT_TRUE(report.violations.empty());
}

TEST(RunReplicas, DeterministicAcrossRunsAndWorkers) {
  auto c = desk_config(60, 80);
  const auto a = summary_csv(run_replicas(c));
  const auto b = summary_csv(run_replicas(c));
  c.settings.workers = 4;
  const auto w = summary_csv(run_replicas(c));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, w);
  c.seed = 43;
  EXPECT_NE(a, summary_csv(run_replicas(c)));
}

TEST(RunReplicas, ReplicaOrderDoesNotMatter) {
  const auto plan = plan_experiment(desk_config(50, 40));
  auto traj = run_replica_trajectories(plan);
  const auto forward = summary_csv(summarize(plan, traj));
  std::reverse(traj.begin(), traj.end());
  EXPECT_EQ(summary_csv(summarize(plan, traj)), forward);
  std::rotate(traj.begin(), traj.begin() + 17, traj.end());
  EXPECT_EQ(summary_csv(summarize(plan, traj)), forward);
}

TEST(RunReplicas, ReplicasUseDerivedSeeds) {
  const auto plan = plan_experiment(desk_config(5, 30));
  const auto traj = run_replica_trajectories(plan);
  const auto dist = build_distribution(plan.instance.problem.lipschitz());
  for (std::size_t r = 0; r < 5; ++r) {
    Rng rng(replica_seed(plan.seed, r));
    const auto solo = run(plan.instance.problem, plan.instance.x0, dist, rng,
                          {plan.iterations}, {0, plan.checkpoints},
                          plan.instance.optimum());
    EXPECT_EQ(solo.final_point, traj[r].final_point);
  }
}

// Statistics recomputed from the per-replica CSV files, with the same
// order-independent definition (sum of sorted values).
double sorted_mean(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

TEST(RunReplicas, MatchesRecomputationFromCsv) {
  const auto plan = plan_experiment(desk_config(40, 60));
  const auto traj = run_replica_trajectories(plan);
  const auto summary = summarize(plan, traj);
  std::vector<std::vector<StepRecord>> parsed;
  for (const auto& t : traj) {
    std::stringstream ss;
    write_trajectory_csv(ss, t);
    parsed.push_back(read_trajectory_csv(ss));
  }
  for (const auto& row : summary.rows) {
    std::vector<double> gaps, lyap;
    for (const auto& recs : parsed) {
      const auto it = std::find_if(recs.begin(), recs.end(),
                                   [&](const StepRecord& r) { return r.k == row.k; });
      ASSERT_NE(it, recs.end());
      gaps.push_back(*it->gap);
      lyap.push_back(0.5 * *it->r_sq + *it->gap);
    }
    const double mean = sorted_mean(gaps);
    EXPECT_EQ(row.mean_gap, mean);
    EXPECT_EQ(*row.mean_lyapunov, sorted_mean(lyap));
    std::sort(gaps.begin(), gaps.end());
    double ss = 0.0;
    for (double g : gaps) ss += (g - mean) * (g - mean);
    const double M = static_cast<double>(gaps.size());
    EXPECT_EQ(row.stderr_gap, std::sqrt(ss / (M - 1.0)) / std::sqrt(M));
  }
}

TEST(RunReplicas, MonteCarloAgreesWithExactExpectation) {
  // N = 3, n = 1 quadratic with loose constants; E[gap(k)] by enumeration.
  ExperimentConfig c;
  c.problem.blocks = 3;
  c.problem.dim = 1;
  c.problem.a = ValueRule::parse("list:1,2,4");
  c.problem.b = ValueRule::parse("list:1,-1,0.5");
  c.problem.x0 = ValueRule::parse("list:2,-1,-1");
  c.problem.lipschitz_multiplier = 1.5;
  c.seed = 7;
  c.settings.replicas = 20000;
  c.settings.iters = 6;
  c.settings.checkpoints = {0, 1, 2, 3, 4, 5, 6};
  const auto s = run_replicas(c);

  const std::vector<double> a{1, 2, 4}, b{1, -1, 0.5}, L{1.5, 3, 6};
  const std::vector<double> x0{2, -1, -1};
  const auto opt = oracle::dense_kkt(a, b, 1);
  auto gap = [&](const std::vector<double>& x) {
    return oracle::quadratic_value(a, b, 1, x) - opt.f;
  };
  for (const auto& row : s.rows) {
    const double exact = oracle::exact_expectation(a, b, L, 1, x0, row.k, gap);
    // Sequential summation of M terms is exact only to about M eps |mean|.
    const double rounding = 20000 * 2.3e-16 * (1.0 + std::abs(exact));
    EXPECT_NEAR(row.mean_gap, exact, 4.0 * row.stderr_gap + rounding) << "k=" << row.k;
  }
}

TEST(RunReplicas, LyapunovMeanNonIncreasing) {
  const auto s = run_replicas(desk_config(300, 200));
  for (std::size_t c = 1; c < s.rows.size(); ++c) {
    EXPECT_LE(*s.rows[c].mean_lyapunov,
              *s.rows[c - 1].mean_lyapunov + 3.0 * *s.rows[c].stderr_lyapunov);
    EXPECT_LE(*s.rows[c].lyapunov_increase, 3.0 * *s.rows[c].stderr_lyapunov_increase + 1e-12);
  }
}

TEST(Certify, DeskScaleSublinearAndLinear) {
  const auto s = run_replicas(desk_config(200, 200));
  const auto report = certify(s);
  EXPECT_TRUE(report.passed);
  for (const auto& v : report.violations) ADD_FAILURE() << v;
  for (const auto& row : s.rows) {
    EXPECT_LE(row.mean_gap, row.bound_ours_sublinear + 3.0 * row.stderr_gap);
    if (row.k >= 1) EXPECT_LE(row.bound_ours_sublinear, *row.bound_nng_sublinear);
  }
}

TEST(Summarize, GapResolution) {
  const auto two = plan_experiment(two_block_config());
  EXPECT_EQ(summarize(two, run_replica_trajectories(two)).gap_resolution, 0.0);

  const auto plan = plan_experiment(desk_config(2, 5));
  const auto s = summarize(plan, run_replica_trajectories(plan));
  const double eps = std::numeric_limits<double>::epsilon();
  const auto& inst = plan.instance;
  EXPECT_DOUBLE_EQ(s.gap_resolution,
                   64 * eps * eps * l_norm_sq(inst.x_star->vec(), inst.problem.lipschitz()));

  auto c = desk_config(2, 5);
  c.overrides.f_star = *inst.f_star;
  const auto manual = plan_experiment(c);
  EXPECT_DOUBLE_EQ(summarize(manual, run_replica_trajectories(manual)).gap_resolution,
                   80 * eps * (1 + std::abs(*inst.f_star)));
}

TEST(Certify, ResolutionFloor) {
  ExperimentSummary s;
  s.blocks = 2;
  s.replicas = 10;
  s.gap0 = 1.0;
  s.tilde_R_sq = 2.0;
  s.gap_resolution = 1e-30;
  CheckpointStats r;
  r.k = 100;
  r.bound_ours_sublinear = 1.0;
  r.bound_ours_linear = 1e-40;
  r.mean_gap = 5e-31;
  s.rows = {r};
  EXPECT_TRUE(certify(s).passed);
  s.rows[0].mean_gap = 2e-30;
  EXPECT_FALSE(certify(s).passed);
}

TEST(Certify, DetectsViolations) {
  ExperimentSummary s;
  s.blocks = 3;
  s.replicas = 100;
  s.f_star = 0.0;
  s.gap0 = 0.5;
  s.tilde_R_sq = 1.0;
  CheckpointStats r0;
  r0.k = 0;
  r0.mean_gap = 0.5;
  r0.bound_ours_sublinear = 1.0;
  CheckpointStats r1;
  r1.k = 10;
  r1.mean_gap = 0.4;
  r1.stderr_gap = 0.01;
  r1.bound_ours_sublinear = bound_sublinear(10, 3, 1.0);
  s.rows = {r0, r1};
  auto report = certify(s);
  EXPECT_FALSE(report.passed);
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_NE(report.violations[0].find("k=10"), std::string::npos) << report.violations[0];

  s.rows[1].mean_gap = 0.1;
  EXPECT_TRUE(certify(s).passed);

  s.rho = 0.1;
  s.eps = 0.05;
  s.success_fraction = 0.8;
  EXPECT_FALSE(certify(s).passed);
  s.success_fraction = 0.86;
  EXPECT_TRUE(certify(s).passed);
}

}  // namespace
}  // namespace rbcd
