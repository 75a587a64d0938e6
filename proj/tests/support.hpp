#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "rbcd/block_vector.hpp"
#include "rbcd/problem.hpp"

namespace rbcd::test {

inline ProblemFamilySpec quadratic_spec(std::vector<double> a,
                                        std::vector<double> b, std::size_t n,
                                        double multiplier = 1.0) {
  ProblemFamilySpec s;
  s.kind = FamilyKind::quadratic;
  s.blocks = a.size();
  s.dim = n;
  s.curvature = std::move(a);
  s.linear = std::move(b);
  s.lipschitz_multiplier = multiplier;
  return s;
}

// Quadratic blocks with arbitrary declared constants.
inline BlockProblem quadratic_problem(const std::vector<double>& a,
                                      const std::vector<double>& b,
                                      std::size_t n, std::vector<double> L) {
  std::vector<std::shared_ptr<const BlockFunction>> blocks;
  for (std::size_t i = 0; i < a.size(); ++i) {
    blocks.push_back(std::make_shared<QuadraticBlock>(
        a[i], std::vector<double>(b.begin() + i * n, b.begin() + (i + 1) * n)));
  }
  return BlockProblem(std::move(blocks), std::move(L));
}

inline FeasiblePoint point(std::vector<double> v, std::size_t n = 1) {
  const std::size_t N = v.size() / n;
  return FeasiblePoint::checked(BlockVector(N, n, std::move(v)));
}

}  // namespace rbcd::test
