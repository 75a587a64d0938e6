#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace rbcd {

// Zero-based block indices with i < j.
struct IndexPair {
  std::size_t i = 0;
  std::size_t j = 0;
  friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

// p_ij = (1/L_i + 1/L_j) / ((N-1) sum_t 1/L_t) over all pairs i < j,
// listed lexicographically. Immutable and shareable.
class PairDistribution {
 public:
  std::size_t blocks() const { return blocks_; }
  std::size_t size() const { return pairs_.size(); }
  std::span<const IndexPair> pairs() const { return pairs_; }
  std::span<const double> probs() const { return probs_; }
  std::span<const double> cumulative() const { return cumulative_; }

  // The pair whose half-open CDF interval [c_{k-1}, c_k) contains u.
  IndexPair pair_for_uniform(double u) const;
  std::size_t index_for_uniform(double u) const;

 private:
  friend PairDistribution build_distribution(std::span<const double>);

  std::size_t blocks_ = 0;
  std::vector<IndexPair> pairs_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

PairDistribution build_distribution(std::span<const double> lipschitz);

std::uint64_t splitmix64(std::uint64_t x);

// Seed of replica r: base XOR splitmix64(r).
std::uint64_t replica_seed(std::uint64_t base, std::uint64_t replica);

// Seeded stream backed by std::mt19937_64, whose output sequence is fixed by
// the C++ standard. Floating-point conversions are done here rather than by
// <random> distributions, which differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  // Standard normal via Box-Muller (one draw per call, no cached state).
  double normal();

 private:
  std::mt19937_64 engine_;
};

IndexPair sample_pair(const PairDistribution& dist, Rng& rng);

}  // namespace rbcd
