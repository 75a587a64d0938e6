#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rbcd {

// Relative tolerance for membership in S = {x : x_1 + ... + x_N = 0}.
inline constexpr double kFeasibilityTol = 1e-9;

// A vector of R^{nN} stored as N consecutive blocks of length n.
class BlockVector {
 public:
  BlockVector() = default;
  BlockVector(std::size_t blocks, std::size_t dim);
  BlockVector(std::size_t blocks, std::size_t dim, std::vector<double> data);

  std::size_t blocks() const { return blocks_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return data_.size(); }

  std::span<double> block(std::size_t i) {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<const double> block(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t k) { return data_[k]; }
  double operator[](std::size_t k) const { return data_[k]; }

  friend bool operator==(const BlockVector&, const BlockVector&) = default;

 private:
  std::size_t blocks_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

BlockVector operator-(const BlockVector& a, const BlockVector& b);

// ||sum_i x_i||_inf / max(1, max_i ||x_i||_inf).
double feasibility_violation(const BlockVector& x);

// A point of S. Construction is checked; the only mutation offered is the
// paired update (+d on block i, -d on block j), which leaves the block sum
// unchanged.
class FeasiblePoint {
 public:
  FeasiblePoint() = default;

  // Throws InvalidInput when x is not in S within `tol`.
  static FeasiblePoint checked(BlockVector x, double tol = kFeasibilityTol);

  const BlockVector& vec() const { return x_; }
  std::size_t blocks() const { return x_.blocks(); }
  std::size_t dim() const { return x_.dim(); }
  std::span<const double> block(std::size_t i) const { return x_.block(i); }

  void apply_pair_update(std::size_t i, std::size_t j,
                         std::span<const double> d);

  friend bool operator==(const FeasiblePoint&,
                         const FeasiblePoint&) = default;

 private:
  explicit FeasiblePoint(BlockVector x) : x_(std::move(x)) {}
  friend FeasiblePoint project_to_S(const BlockVector& v);

  BlockVector x_;
};

// Orthogonal projection onto S: subtracts the block mean from every block.
FeasiblePoint project_to_S(const BlockVector& v);

}  // namespace rbcd
