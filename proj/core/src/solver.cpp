#include "rbcd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rbcd/errors.hpp"

namespace rbcd {

namespace {

void check_pair(const BlockProblem& problem, const FeasiblePoint& x,
                std::size_t i, std::size_t j) {
  if (x.blocks() != problem.blocks() || x.dim() != problem.dim()) {
    throw InvalidInput("point shape does not match problem");
  }
  if (i >= j || j >= problem.blocks()) {
    throw InvalidInput("block pair (" + std::to_string(i) + ", " +
                       std::to_string(j) + ") must satisfy i < j < N");
  }
}

void pair_direction(std::span<const double> gi, std::span<const double> gj,
                    double Li, double Lj, std::span<double> d) {
  const double inv = 1.0 / (Li + Lj);
  for (std::size_t m = 0; m < d.size(); ++m) d[m] = -(gi[m] - gj[m]) * inv;
}

}  // namespace

std::vector<double> direction(const BlockProblem& problem,
                              const FeasiblePoint& x, std::size_t i,
                              std::size_t j) {
  check_pair(problem, x, i, j);
  const std::size_t n = problem.dim();
  std::vector<double> gi(n), gj(n), d(n);
  problem.block(i).gradient(x.block(i), gi);
  problem.block(j).gradient(x.block(j), gj);
  pair_direction(gi, gj, problem.lipschitz()[i], problem.lipschitz()[j], d);
  return d;
}

FeasiblePoint step(const BlockProblem& problem, const FeasiblePoint& x,
                   std::size_t i, std::size_t j) {
  const auto d = direction(problem, x, i, j);
  FeasiblePoint next = x;
  next.apply_pair_update(i, j, d);
  return next;
}

std::size_t default_record_stride(std::size_t max_iters) {
  return std::max<std::size_t>(1, max_iters / 1000);
}

namespace {

// Per-block value and gradient caches; a step refreshes only blocks i, j.
class SolverState {
 public:
  SolverState(const BlockProblem& problem, FeasiblePoint x0)
      : problem_(problem),
        x_(std::move(x0)),
        values_(problem.blocks()),
        grads_(problem.blocks() * problem.dim()),
        d_(problem.dim()) {
    for (std::size_t i = 0; i < problem.blocks(); ++i) refresh(i, 0);
  }

  const FeasiblePoint& point() const { return x_; }

  double f() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
  }

  double residual() const {
    const std::size_t N = problem_.blocks();
    const std::size_t n = problem_.dim();
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = i + 1; j < N; ++j) {
        double s = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
          const double diff = grads_[i * n + m] - grads_[j * n + m];
          s += diff * diff;
        }
        worst = std::max(worst, s);
      }
    }
    return std::sqrt(worst);
  }

  void advance(IndexPair p, std::size_t k) {
    const auto L = problem_.lipschitz();
    pair_direction(grad(p.i), grad(p.j), L[p.i], L[p.j], d_);
    x_.apply_pair_update(p.i, p.j, d_);
    refresh(p.i, k);
    refresh(p.j, k);
  }

 private:
  std::span<const double> grad(std::size_t i) const {
    return {grads_.data() + i * problem_.dim(), problem_.dim()};
  }

  void refresh(std::size_t i, std::size_t k) {
    const std::size_t n = problem_.dim();
    std::span<double> g(grads_.data() + i * n, n);
    try {
      values_[i] = problem_.block(i).value(x_.block(i));
      problem_.block(i).gradient(x_.block(i), g);
    } catch (const std::exception& e) {
      throw OracleFailure("iteration " + std::to_string(k) + ", block " +
                          std::to_string(i + 1) + ": " + e.what());
    }
    bool finite = std::isfinite(values_[i]);
    for (double v : g) finite = finite && std::isfinite(v);
    if (!finite) {
      throw OracleFailure("iteration " + std::to_string(k) + ", block " +
                          std::to_string(i + 1) +
                          ": oracle returned non-finite output");
    }
  }

  const BlockProblem& problem_;
  FeasiblePoint x_;
  std::vector<double> values_;
  std::vector<double> grads_;
  std::vector<double> d_;
};

StepRecord make_record(const SolverState& state, std::size_t k,
                       std::optional<IndexPair> pair,
                       const BlockProblem& problem,
                       const KnownOptimum& optimum) {
  StepRecord rec;
  rec.k = k;
  rec.pair = pair;
  rec.f_value = state.f();
  if (optimum.exact && optimum.x_star) {
    rec.gap = optimality_gap(problem, state.point().vec(), optimum.x_star->vec());
  } else if (optimum.f_star) {
    rec.gap = rec.f_value - *optimum.f_star;
  }
  if (optimum.x_star) {
    rec.r_sq = l_norm_sq(state.point().vec() - optimum.x_star->vec(),
                         problem.lipschitz());
  }
  rec.residual = state.residual();
  return rec;
}

}  // namespace

Trajectory run(const BlockProblem& problem, const FeasiblePoint& x0,
               const PairDistribution& dist, Rng& rng,
               const StoppingRule& stop, const RecordPolicy& record,
               const KnownOptimum& optimum) {
  if (stop.max_iters == 0) throw InvalidInput("max_iters must be >= 1");
  if (dist.blocks() != problem.blocks()) {
    throw InvalidInput("pair distribution built for a different N");
  }
  if (x0.blocks() != problem.blocks() || x0.dim() != problem.dim()) {
    throw InvalidInput("x0 shape does not match problem");
  }
  if (stop.gap_tol && !optimum.f_star) {
    throw InvalidInput("gap_tol requires a known optimal value");
  }

  std::vector<std::size_t> extra = record.at;
  std::sort(extra.begin(), extra.end());
  auto wanted = [&](std::size_t k) {
    return (record.stride > 0 && k % record.stride == 0) ||
           std::binary_search(extra.begin(), extra.end(), k);
  };

  SolverState state(problem, x0);
  Trajectory traj;
  std::optional<IndexPair> last;
  traj.records.push_back(make_record(state, 0, last, problem, optimum));

  auto converged = [&](const StepRecord& rec) -> std::optional<StopReason> {
    if (stop.gap_tol && rec.gap && *rec.gap <= *stop.gap_tol) {
      return StopReason::gap_tol;
    }
    if (stop.residual_tol && rec.residual <= *stop.residual_tol) {
      return StopReason::residual_tol;
    }
    return std::nullopt;
  };

  std::size_t k = 0;
  while (k < stop.max_iters) {
    const IndexPair p = sample_pair(dist, rng);
    state.advance(p, k + 1);
    ++k;
    last = p;

    const bool need_check = stop.gap_tol || stop.residual_tol;
    const bool final = k == stop.max_iters;
    if (!wanted(k) && !need_check && !final) continue;

    StepRecord rec = make_record(state, k, last, problem, optimum);
    auto reason = converged(rec);
    if (wanted(k) || final || reason) traj.records.push_back(std::move(rec));
    if (reason) {
      traj.reason = *reason;
      break;
    }
  }
  traj.iterations = k;
  traj.final_point = state.point();
  return traj;
}

}  // namespace rbcd
