#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adqec/pauli.hpp"

namespace adqec {

/// E_0 = diag(1, sqrt(1-gamma)), E_1 = sqrt(gamma) |0><1|.
inline std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd> single_qubit_kraus(
    double gamma) {
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("gamma must lie in [0,1]");
  Eigen::Matrix2cd e0 = Eigen::Matrix2cd::Zero();
  e0(0, 0) = 1.0;
  e0(1, 1) = std::sqrt(1.0 - gamma);
  Eigen::Matrix2cd e1 = Eigen::Matrix2cd::Zero();
  e1(0, 1) = std::sqrt(gamma);
  return {e0, e1};
}

/// One Kraus element of the n-qubit amplitude damping channel: the tensor
/// product with E_1 at pattern bits and E_0 elsewhere.  Every column has at
/// most one nonzero: column c maps to row c with the pattern bits cleared,
/// provided c has 1s at all pattern positions.
struct DampingKraus {
  int n = 1;
  uint64_t pattern = 0;  // qubit 1 is the most significant of the n bits
  double gamma = 0.0;

  DampingKraus() = default;
  DampingKraus(int n_, uint64_t pattern_, double gamma_)
      : n(n_), pattern(pattern_), gamma(gamma_) {
    if (n < 1 || n > 32) throw std::invalid_argument("bad qubit count");
    if (gamma < 0.0 || gamma > 1.0)
      throw std::invalid_argument("gamma must lie in [0,1]");
    if ((pattern >> n) != 0)
      throw std::invalid_argument("pattern exceeds qubit count");
  }

  int order() const { return std::popcount(pattern); }

  bool damps_qubit(int q) const { return pattern >> (n - q) & 1; }

  std::string pattern_string() const {
    std::string s;
    for (int q = 1; q <= n; ++q) s += damps_qubit(q) ? '1' : '0';
    return s;
  }

  /// Nonzero of column c, if any: (row, value).
  std::pair<uint64_t, double> column(uint64_t c) const {
    if ((c & pattern) != pattern) return {0, 0.0};
    int damped = order();
    int kept_ones = std::popcount(c & ~pattern);
    double v = std::pow(gamma, damped / 2.0) *
               std::pow(1.0 - gamma, kept_ones / 2.0);
    return {c & ~pattern, v};
  }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& state) const {
    uint64_t dim = uint64_t(1) << n;
    if (static_cast<uint64_t>(state.size()) != dim)
      throw std::invalid_argument("state dimension mismatch");
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
    for (uint64_t c = 0; c < dim; ++c) {
      if (state[c] == cxd(0)) continue;
      auto [r, v] = column(c);
      if (v != 0.0) out[r] += v * state[c];
    }
    return out;
  }

  /// K * V for a dense matrix V with 2^n rows.
  Eigen::MatrixXcd apply_to(const Eigen::MatrixXcd& v) const {
    uint64_t dim = uint64_t(1) << n;
    if (static_cast<uint64_t>(v.rows()) != dim)
      throw std::invalid_argument("matrix dimension mismatch");
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(v.rows(), v.cols());
    for (uint64_t c = 0; c < dim; ++c) {
      auto [r, val] = column(c);
      if (val != 0.0) out.row(r) += val * v.row(c);
    }
    return out;
  }

  Eigen::MatrixXcd to_dense() const {
    if (n > 12) throw std::invalid_argument("to_dense limited to n <= 12");
    uint64_t dim = uint64_t(1) << n;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (uint64_t c = 0; c < dim; ++c) {
      auto [r, v] = column(c);
      if (v != 0.0) m(r, c) = v;
    }
    return m;
  }

  /// tr(K^dag K) = gamma^w (2-gamma)^(n-w).
  double trace_kdag_k() const {
    return std::pow(gamma, order()) * std::pow(2.0 - gamma, n - order());
  }
};

struct KrausEnumeration {
  std::vector<DampingKraus> ops;
  int max_order = -1;            // -1: unlimited
  double discarded_weight = 0.0; // 1 - sum tr(K^dag K rho), rho = I/2^n
};

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// All damping patterns with popcount <= max_order, sorted by popcount then
/// lexicographic pattern order.
inline KrausEnumeration enumerate_kraus(int n, double gamma,
                                        int max_order = -1) {
  if (n < 1 || n > 12)
    throw std::invalid_argument("enumeration limited to n <= 12");
  KrausEnumeration out;
  out.max_order = max_order;
  int cap = (max_order < 0 || max_order > n) ? n : max_order;
  for (int w = 0; w <= cap; ++w)
    for (uint64_t p = 0; p < (uint64_t(1) << n); ++p)
      if (std::popcount(p) == w) out.ops.emplace_back(n, p, gamma);
  double pow2n = std::pow(2.0, n);
  for (int w = cap + 1; w <= n; ++w)
    out.discarded_weight += binomial(n, w) * std::pow(gamma, w) *
                            std::pow(2.0 - gamma, n - w) / pow2n;
  return out;
}

/// Unscaled product of |0><1| at the given qubits (identity elsewhere);
/// the damping representative (X + iY)/2 per qubit.  scale multiplies the
/// result, e.g. sqrt(gamma)^|mask| for a true E_1 product.
inline Eigen::MatrixXcd damping_product_apply(int n, uint64_t mask,
                                              const Eigen::MatrixXcd& v,
                                              double scale = 1.0) {
  uint64_t dim = uint64_t(1) << n;
  if (static_cast<uint64_t>(v.rows()) != dim)
    throw std::invalid_argument("matrix dimension mismatch");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(v.rows(), v.cols());
  for (uint64_t c = 0; c < dim; ++c)
    if ((c & mask) == mask) out.row(c & ~mask) += scale * v.row(c);
  return out;
}

}  // namespace adqec
