#include "rbcd/pair_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rbcd/errors.hpp"

namespace rbcd {

PairDistribution build_distribution(std::span<const double> lipschitz) {
  const std::size_t N = lipschitz.size();
  if (N < 2) throw InvalidInput("pair distribution needs N >= 2 blocks");
  double inv_sum = 0.0;
  for (std::size_t t = 0; t < N; ++t) {
    const double L = lipschitz[t];
    if (!(L > 0.0) || !std::isfinite(L)) {
      throw InvalidInput("Lipschitz constant L_" + std::to_string(t + 1) +
                         " must be positive and finite");
    }
    inv_sum += 1.0 / L;
  }

  PairDistribution dist;
  dist.blocks_ = N;
  const std::size_t count = N * (N - 1) / 2;
  dist.pairs_.reserve(count);
  dist.probs_.reserve(count);
  dist.cumulative_.reserve(count);
  const double denom = static_cast<double>(N - 1) * inv_sum;
  double running = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = i + 1; j < N; ++j) {
      const double p = (1.0 / lipschitz[i] + 1.0 / lipschitz[j]) / denom;
      dist.pairs_.push_back({i, j});
      dist.probs_.push_back(p);
      running += p;
      dist.cumulative_.push_back(running);
    }
  }
  if (std::abs(running - 1.0) > 1e-12) {
    throw InvalidInput("pair probabilities sum to " + std::to_string(running));
  }
  // Pin the last edge so every u in [0,1) lands in some interval.
  dist.cumulative_.back() = 1.0;
  return dist;
}

std::size_t PairDistribution::index_for_uniform(double u) const {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  return std::min(idx, cumulative_.size() - 1);
}

IndexPair PairDistribution::pair_for_uniform(double u) const {
  return pairs_[index_for_uniform(u)];
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t replica_seed(std::uint64_t base, std::uint64_t replica) {
  return base ^ splitmix64(replica);
}

double Rng::normal() {
  // 1 - uniform() lies in (0, 1], so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

IndexPair sample_pair(const PairDistribution& dist, Rng& rng) {
  return dist.pair_for_uniform(rng.uniform());
}

}  // namespace rbcd
