#include "rbcd/block_vector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rbcd/errors.hpp"

namespace rbcd {

BlockVector::BlockVector(std::size_t blocks, std::size_t dim)
    : blocks_(blocks), dim_(dim), data_(blocks * dim, 0.0) {}

BlockVector::BlockVector(std::size_t blocks, std::size_t dim,
                         std::vector<double> data)
    : blocks_(blocks), dim_(dim), data_(std::move(data)) {
  if (data_.size() != blocks * dim) {
    throw InvalidInput("BlockVector: expected " + std::to_string(blocks * dim) +
                       " entries, got " + std::to_string(data_.size()));
  }
}

BlockVector operator-(const BlockVector& a, const BlockVector& b) {
  if (a.blocks() != b.blocks() || a.dim() != b.dim()) {
    throw InvalidInput("BlockVector subtraction: shape mismatch");
  }
  BlockVector out(a.blocks(), a.dim());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
  return out;
}

double feasibility_violation(const BlockVector& x) {
  double scale = 1.0;
  for (double v : x.data()) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  for (std::size_t m = 0; m < x.dim(); ++m) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.blocks(); ++i) sum += x.block(i)[m];
    worst = std::max(worst, std::abs(sum));
  }
  return worst / scale;
}

FeasiblePoint FeasiblePoint::checked(BlockVector x, double tol) {
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw InvalidInput("point has non-finite entries");
  }
  const double viol = feasibility_violation(x);
  if (!(viol <= tol)) {
    throw InvalidInput("point is not in S: relative block-sum violation " +
                       std::to_string(viol));
  }
  return FeasiblePoint(std::move(x));
}

void FeasiblePoint::apply_pair_update(std::size_t i, std::size_t j,
                                      std::span<const double> d) {
  auto xi = x_.block(i);
  auto xj = x_.block(j);
  for (std::size_t m = 0; m < d.size(); ++m) {
    xi[m] += d[m];
    xj[m] -= d[m];
  }
}

FeasiblePoint project_to_S(const BlockVector& v) {
  for (double e : v.data()) {
    if (!std::isfinite(e)) throw InvalidInput("project_to_S: non-finite input");
  }
  if (v.blocks() == 0) throw InvalidInput("project_to_S: no blocks");
  const auto N = static_cast<double>(v.blocks());
  BlockVector out = v;
  for (std::size_t m = 0; m < v.dim(); ++m) {
    double sum = 0.0;
    for (std::size_t i = 0; i < v.blocks(); ++i) sum += v.block(i)[m];
    const double mean = sum / N;
    for (std::size_t i = 0; i < v.blocks(); ++i) out.block(i)[m] -= mean;
  }
  // Re-projecting a point of S would subtract a rounding-level mean; keep
  // already-feasible input bit-identical so the map is idempotent.
  const double noise = 4.0 * N * std::numeric_limits<double>::epsilon();
  if (feasibility_violation(v) <= noise) return FeasiblePoint(v);
  return FeasiblePoint(std::move(out));
}

}  // namespace rbcd
