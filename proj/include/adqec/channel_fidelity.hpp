#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "adqec/damping.hpp"

namespace adqec {

using SparseOp = Eigen::SparseMatrix<cxd>;

/// F_e(rho, {K_i}) = sum_i |tr(rho K_i)|^2.
inline double entanglement_fidelity(const Eigen::MatrixXcd& rho,
                                    const std::vector<Eigen::MatrixXcd>& kraus) {
  if (rho.rows() != rho.cols())
    throw std::invalid_argument("rho must be square");
  if (std::abs(rho.trace().real() - 1.0) > 1e-9 ||
      std::abs(rho.trace().imag()) > 1e-9)
    throw std::invalid_argument("rho must have unit trace");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("rho must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw std::invalid_argument("rho must be positive semidefinite");
  double f = 0.0;
  for (const auto& k : kraus) {
    if (k.rows() != rho.rows() || k.cols() != rho.cols())
      throw std::invalid_argument("Kraus dimension mismatch");
    f += std::norm((rho * k).trace());
  }
  return f;
}

struct CompositeResult {
  double fidelity = 0.0;
  double bound = 0.0;                  // upper bound on the truncation error
  std::map<int, double> contributions; // damping order -> partial fidelity
};

/// Exact entanglement fidelity of encode -> damp -> recover at the maximally
/// mixed logical input: F = sum_{i,j} |tr(R_j K_i V) / 2^k|^2.  Patterns
/// with popcount > max_order are dropped (max_order < 0 keeps all); the
/// reported bound is 1 - sum_kept tr(K^dag K P_code)/2^k, a rigorous cap on
/// the dropped fidelity.
inline CompositeResult composite_fidelity(const Eigen::MatrixXcd& v,
                                          const std::vector<SparseOp>& elements,
                                          double gamma, int max_order = -1) {
  int kcols = static_cast<int>(v.cols());
  uint64_t dim = static_cast<uint64_t>(v.rows());
  int n = std::countr_zero(dim);
  if ((uint64_t(1) << n) != dim)
    throw std::invalid_argument("V must have 2^n rows");
  double inv_k = 1.0 / static_cast<double>(kcols);

  // Nonzero rows per column of V, scanned once.
  std::vector<std::vector<std::pair<uint64_t, cxd>>> vcols(kcols);
  for (int b = 0; b < kcols; ++b)
    for (uint64_t r = 0; r < dim; ++r)
      if (v(r, b) != cxd(0)) vcols[b].emplace_back(r, v(r, b));

  CompositeResult res;
  double kept_weight = 0.0;
  Eigen::MatrixXcd w(dim, kcols);
  int cap = (max_order < 0 || max_order > n) ? n : max_order;
  for (uint64_t pattern = 0; pattern < dim; ++pattern) {
    int order = std::popcount(pattern);
    if (order > cap) continue;
    DampingKraus kr(n, pattern, gamma);
    w.setZero();
    for (int b = 0; b < kcols; ++b)
      for (const auto& [r, val] : vcols[b]) {
        auto [row, kv] = kr.column(r);
        if (kv != 0.0) w(row, b) += kv * val;
      }
    kept_weight += w.squaredNorm() * inv_k;
    double part = 0.0;
    for (const auto& el : elements) {
      cxd t = 0.0;
      for (int outer = 0; outer < el.outerSize(); ++outer)
        for (SparseOp::InnerIterator it(el, outer); it; ++it)
          t += it.value() * w(it.col(), it.row());
      part += std::norm(t * inv_k);
    }
    res.fidelity += part;
    res.contributions[order] += part;
  }
  res.bound = (max_order < 0 || max_order >= n)
                  ? 0.0
                  : std::max(0.0, 1.0 - kept_weight);
  return res;
}

}  // namespace adqec
