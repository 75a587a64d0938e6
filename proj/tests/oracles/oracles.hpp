#pragma once

// Test-only reference computations. Nothing here calls the library code
// path it is used to check: matrices are materialized densely, optima come
// from a generic linear solve, and expectations from exhaustive enumeration.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace rbcd::oracle {

// p_ij = (1/L_i + 1/L_j) / ((N-1) sum 1/L_t), lexicographic pairs.
struct PairTable {
  std::vector<std::size_t> i, j;
  std::vector<double> p;
};

inline PairTable pair_table(const std::vector<double>& L) {
  const std::size_t N = L.size();
  double inv = 0.0;
  for (double l : L) inv += 1.0 / l;
  PairTable t;
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t b = a + 1; b < N; ++b) {
      t.i.push_back(a);
      t.j.push_back(b);
      t.p.push_back((1.0 / L[a] + 1.0 / L[b]) / ((N - 1.0) * inv));
    }
  }
  return t;
}

// Dense nN x nN matrix sum_{i<j} p_ij/(L_i+L_j) (e_i-e_j)(L_i e_i^T -
// L_j e_j^T) kron I_n.
inline Eigen::MatrixXd dense_pair_operator(const std::vector<double>& L,
                                           std::size_t n) {
  const std::size_t N = L.size();
  const auto t = pair_table(L);
  Eigen::MatrixXd small = Eigen::MatrixXd::Zero(N, N);
  for (std::size_t k = 0; k < t.p.size(); ++k) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(N);
    u(t.i[k]) = 1.0;
    u(t.j[k]) = -1.0;
    w(t.i[k]) = L[t.i[k]];
    w(t.j[k]) = -L[t.j[k]];
    small += t.p[k] / (L[t.i[k]] + L[t.j[k]]) * u * w.transpose();
  }
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(N * n, N * n);
  for (std::size_t r = 0; r < N; ++r) {
    for (std::size_t c = 0; c < N; ++c) {
      big.block(r * n, c * n, n, n) =
          small(r, c) * Eigen::MatrixXd::Identity(n, n);
    }
  }
  return big;
}

struct DenseOptimum {
  Eigen::VectorXd x;
  Eigen::VectorXd nu;
  double f;
};

// Solves the full KKT system of min sum a_i/2 |x_i|^2 + <b_i, x_i> s.t.
// sum x_i = 0 with a dense LU factorization.
inline DenseOptimum dense_kkt(const std::vector<double>& a,
                              const std::vector<double>& b, std::size_t n) {
  const std::size_t N = a.size();
  const std::size_t dim = N * n;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(dim + n, dim + n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim + n);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t m = 0; m < n; ++m) {
      const std::size_t r = i * n + m;
      K(r, r) = a[i];
      K(r, dim + m) = -1.0;  // a_i x_i + b_i - nu = 0
      K(dim + m, r) = 1.0;   // sum x_i = 0
      rhs(r) = -b[r];
    }
  }
  const Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
  DenseOptimum out{sol.head(dim), sol.tail(n), 0.0};
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t m = 0; m < n; ++m) {
      const std::size_t r = i * n + m;
      out.f += 0.5 * a[i] * out.x(r) * out.x(r) + b[r] * out.x(r);
    }
  }
  return out;
}

// Exact E[g(x^k)] for the randomized two-block method on a quadratic with
// curvatures a, linear terms b and constants L, by enumerating all |E|^k
// pair sequences. Small N and k only.
inline double exact_expectation(const std::vector<double>& a,
                                const std::vector<double>& b,
                                const std::vector<double>& L, std::size_t n,
                                const std::vector<double>& x0, std::size_t k,
                                const std::function<double(const std::vector<double>&)>& g) {
  const auto t = pair_table(L);
  std::function<double(const std::vector<double>&, std::size_t)> rec =
      [&](const std::vector<double>& x, std::size_t left) -> double {
    if (left == 0) return g(x);
    double acc = 0.0;
    for (std::size_t e = 0; e < t.p.size(); ++e) {
      const std::size_t i = t.i[e], j = t.j[e];
      std::vector<double> y = x;
      for (std::size_t m = 0; m < n; ++m) {
        const double gi = a[i] * x[i * n + m] + b[i * n + m];
        const double gj = a[j] * x[j * n + m] + b[j * n + m];
        const double d = -(gi - gj) / (L[i] + L[j]);
        y[i * n + m] += d;
        y[j * n + m] -= d;
      }
      acc += t.p[e] * rec(y, left - 1);
    }
    return acc;
  };
  return rec(x0, k);
}

inline double quadratic_value(const std::vector<double>& a,
                              const std::vector<double>& b, std::size_t n,
                              const std::vector<double>& x) {
  double f = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t m = 0; m < n; ++m) {
      const double v = x[i * n + m];
      f += 0.5 * a[i] * v * v + b[i * n + m] * v;
    }
  }
  return f;
}

}  // namespace rbcd::oracle
