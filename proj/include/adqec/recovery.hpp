#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "adqec/channel_fidelity.hpp"
#include "adqec/codes.hpp"

namespace adqec {

enum class RecoveryMode {
  projection,
  perturbed,
  sweep_optimized,
  generic_stabilizer,
  adapted_stabilizer,
};

inline std::string mode_name(RecoveryMode m) {
  switch (m) {
    case RecoveryMode::projection: return "projection";
    case RecoveryMode::perturbed: return "perturbed";
    case RecoveryMode::sweep_optimized: return "sweep_optimized";
    case RecoveryMode::generic_stabilizer: return "generic_stabilizer";
    case RecoveryMode::adapted_stabilizer: return "adapted_stabilizer";
  }
  return "?";
}

struct RecoveryElement {
  std::string label;
  SparseOp op;  // 2^k x 2^n, maps physical to logical
  std::vector<std::pair<PauliOperator, int>> measured;  // generator, +/-1
  std::vector<int> damped;
  int residual_dim = 0;
};

struct RecoveryOperation {
  int n = 1, k = 1;
  RecoveryMode mode = RecoveryMode::projection;
  std::optional<double> gamma;
  std::vector<RecoveryElement> elements;

  std::vector<SparseOp> ops() const {
    std::vector<SparseOp> v;
    v.reserve(elements.size());
    for (const auto& e : elements) v.push_back(e.op);
    return v;
  }

  Eigen::MatrixXcd sum_rdag_r() const {
    uint64_t dim = uint64_t(1) << n;
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& e : elements) {
      Eigen::MatrixXcd d = Eigen::MatrixXcd(e.op);
      s += d.adjoint() * d;
    }
    return s;
  }

  /// Largest eigenvalue excess of sum R^dag R above 1 (should be ~0).
  double trace_excess() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sum_rdag_r());
    return std::max(0.0, es.eigenvalues().maxCoeff() - 1.0);
  }
  /// How far sum R^dag R falls short of the identity.
  double completeness_deficit() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sum_rdag_r());
    return std::max(0.0, 1.0 - es.eigenvalues().minCoeff());
  }
};

namespace detail {

inline SparseOp sparse_from_rows(
    int krows, int n,
    const std::vector<std::vector<std::pair<uint64_t, cxd>>>& rows) {
  SparseOp m(krows, Eigen::Index(1) << n);
  std::vector<Eigen::Triplet<cxd>> trips;
  for (size_t b = 0; b < rows.size(); ++b)
    for (const auto& [c, v] : rows[b])
      if (v != cxd(0)) trips.emplace_back(static_cast<int>(b),
                                          static_cast<Eigen::Index>(c), v);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

inline SparseOp to_sparse(const Eigen::MatrixXcd& m, double tol = 1e-13) {
  SparseOp s(m.rows(), m.cols());
  std::vector<Eigen::Triplet<cxd>> trips;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (std::abs(m(r, c)) > tol) trips.emplace_back(r, c, m(r, c));
  s.setFromTriplets(trips.begin(), trips.end());
  return s;
}

struct PairStructure {
  std::vector<std::pair<int, int>> pairs;  // 1-based, as listed in the group
  PauliOperator all_x{1, 1, 0, 0};
};

inline std::optional<PairStructure> detect_pairs(const StabilizerCode& code) {
  int n = code.n();
  uint64_t full = (uint64_t(1) << n) - 1;
  PairStructure ps;
  bool saw_all_x = false;
  for (const auto& g : code.group.generators) {
    if (g.phase_pow() != 0) return std::nullopt;
    if (g.x_bits() == full && g.z_bits() == 0) {
      ps.all_x = g;
      saw_all_x = true;
      continue;
    }
    if (g.x_bits() != 0 || std::popcount(g.z_bits()) != 2) return std::nullopt;
    int a = 0, b = 0;
    for (int q = 1; q <= n; ++q)
      if (g.z_at(q)) (a == 0 ? a : b) = q;
    ps.pairs.emplace_back(a, b);
  }
  if (!saw_all_x || static_cast<int>(ps.pairs.size()) != n / 2)
    return std::nullopt;
  return ps;
}

inline std::string damped_label(const std::vector<int>& d) {
  std::string s = "damped{";
  for (size_t i = 0; i < d.size(); ++i)
    s += (i ? "," : "") + std::to_string(d[i]);
  return s + "}";
}

/// Decode basis for a damped syndrome: columns of T(D) V, T = prod |0><1|.
/// Surviving columns must be orthogonal with equal norms; if they are all
/// parallel the branch has collapsed to a single ray, which is decoded onto
/// the adjoint-image direction (for a single survivor this is exactly the
/// surviving codeword, matching the rank-1 partial recoveries).
struct DampedBasis {
  std::vector<int> target;                 // logical index per column
  std::vector<Eigen::VectorXcd> columns;   // normalized
  bool collapsed = false;
  Eigen::VectorXcd collapse_target;        // logical ray for the collapse
};

inline DampedBasis damped_basis(const Eigen::MatrixXcd& img) {
  DampedBasis out;
  std::vector<int> alive;
  for (int b = 0; b < img.cols(); ++b)
    if (img.col(b).norm() > 1e-12) alive.push_back(b);
  if (alive.empty()) throw std::logic_error("empty damped syndrome image");
  if (alive.size() > 1) {
    bool parallel = true;
    Eigen::VectorXcd ref = img.col(alive[0]).normalized();
    for (size_t i = 1; i < alive.size(); ++i) {
      double ov = std::abs(ref.dot(img.col(alive[i]).normalized()));
      if (ov < 1.0 - 1e-9) { parallel = false; break; }
    }
    if (parallel) {
      out.collapsed = true;
      out.columns = {ref};
      out.collapse_target = Eigen::VectorXcd::Zero(img.cols());
      for (int b = 0; b < img.cols(); ++b)
        out.collapse_target[b] = std::conj(ref.dot(img.col(b)));
      out.collapse_target.normalize();
      return out;
    }
  }
  double norm0 = img.col(alive[0]).norm();
  for (size_t i = 0; i < alive.size(); ++i) {
    double ni = img.col(alive[i]).norm();
    if (std::abs(ni - norm0) > 1e-9 * norm0)
      throw std::logic_error("damped syndrome image has unequal norms");
    for (size_t j = i + 1; j < alive.size(); ++j)
      if (std::abs(img.col(alive[i]).dot(img.col(alive[j]))) > 1e-9)
        throw std::logic_error("damped syndrome image is not orthogonal");
    out.target.push_back(alive[i]);
    out.columns.push_back(img.col(alive[i]) / ni);
  }
  return out;
}

inline RecoveryElement element_from_basis(const DampedBasis& basis, int k,
                                          int n, const std::string& label) {
  RecoveryElement el;
  el.label = label;
  std::vector<std::vector<std::pair<uint64_t, cxd>>> rows(size_t(1) << k);
  if (basis.collapsed) {
    const auto& col = basis.columns[0];
    for (int b = 0; b < basis.collapse_target.size(); ++b) {
      if (std::abs(basis.collapse_target[b]) < 1e-13) continue;
      for (Eigen::Index r = 0; r < col.size(); ++r)
        if (std::abs(col[r]) > 1e-13)
          rows[b].emplace_back(static_cast<uint64_t>(r),
                               basis.collapse_target[b] * std::conj(col[r]));
    }
    el.op = sparse_from_rows(1 << k, n, rows);
    el.residual_dim = 1;
    return el;
  }
  for (size_t i = 0; i < basis.columns.size(); ++i) {
    int b = basis.target[i];
    const auto& col = basis.columns[i];
    for (Eigen::Index r = 0; r < col.size(); ++r)
      if (std::abs(col[r]) > 1e-13)
        rows[b].emplace_back(static_cast<uint64_t>(r), std::conj(col[r]));
  }
  el.op = sparse_from_rows(1 << k, n, rows);
  el.residual_dim = static_cast<int>(basis.columns.size());
  return el;
}

/// No-damping elements shared by the pair family and the [7,3] code.
/// Projection mode decodes the code subspace directly (R+ = V^dag) and
/// corrects the -1 all-X branch with Z_1 (R- = V^dag Z_1).  Perturbed mode
/// needs codewords of the form (|u> + |ubar>)/sqrt(2) with disjoint
/// supports: the "+" branch projects onto (p|u> + q|ubar>)/N with
/// (p, q) = ((1-gamma)^(w(u)/2), (1-gamma)^(w(ubar)/2)), the "-" branch onto
/// the orthogonal complement (q|u> - p|ubar>)/N, which at p = q coincides
/// with the projection-mode pair.
inline std::pair<RecoveryElement, RecoveryElement> two_branch_no_damping(
    const Eigen::MatrixXcd& v, int n, int k, bool perturbed, double gamma) {
  if (!perturbed) {
    RecoveryElement ep, em;
    ep.label = "no-damping:+";
    em.label = "no-damping:-";
    ep.residual_dim = em.residual_dim = 1 << k;
    Eigen::MatrixXcd z1v = v;
    uint64_t m1 = uint64_t(1) << (n - 1);
    for (Eigen::Index r = 0; r < v.rows(); ++r)
      if (static_cast<uint64_t>(r) & m1) z1v.row(r) = -z1v.row(r);
    ep.op = to_sparse(v.adjoint());
    em.op = to_sparse(z1v.adjoint());
    return {ep, em};
  }
  double c = std::sqrt(1.0 - gamma);
  std::vector<std::vector<std::pair<uint64_t, cxd>>> plus(size_t(1) << k),
      minus(size_t(1) << k);
  for (int b = 0; b < v.cols(); ++b) {
    std::vector<std::pair<uint64_t, double>> nz;
    for (Eigen::Index r = 0; r < v.rows(); ++r)
      if (std::abs(v(r, b)) > 1e-12) {
        if (std::abs(v(r, b).imag()) > 1e-12 || v(r, b).real() < 0)
          throw std::logic_error("codeword amplitudes must be real positive");
        nz.emplace_back(static_cast<uint64_t>(r), v(r, b).real());
      }
    if (nz.size() != 2 || std::abs(nz[0].second - nz[1].second) > 1e-12)
      throw std::logic_error("code is not a two-branch superposition");
    auto [ru, au] = nz[0];  // lexicographically smaller branch
    auto [rv, av] = nz[1];
    // Weights (c^w(u), c^w(ubar)) rescaled by the smaller exponent so the
    // gamma -> 1 limit stays finite.
    int wu = std::popcount(ru), wv = std::popcount(rv);
    int base = std::min(wu, wv);
    double p = std::pow(c, wu - base);
    double q = std::pow(c, wv - base);
    double norm = std::sqrt(p * p + q * q);
    plus[b] = {{ru, p / norm}, {rv, q / norm}};
    minus[b] = {{ru, q / norm}, {rv, -p / norm}};
  }
  RecoveryElement ep, em;
  ep.label = "no-damping:+";
  em.label = "no-damping:-";
  ep.op = sparse_from_rows(1 << k, n, plus);
  em.op = sparse_from_rows(1 << k, n, minus);
  ep.residual_dim = em.residual_dim = 1 << k;
  return {ep, em};
}

}  // namespace detail

/// Recovery for the [2(M+1),M] family (and the [4,1] code): Z-pair syndrome
/// branches recovered by the H / CNOT-fan-out / X-flip map, and a
/// no-damping branch that either projects onto the code subspace or onto
/// the perturbed basis.
inline RecoveryOperation pair_family_recovery(const StabilizerCode& code,
                                              RecoveryMode mode,
                                              std::optional<double> gamma) {
  auto ps = detail::detect_pairs(code);
  if (!ps) throw std::invalid_argument("code is not in the Z-pair family");
  bool needs_gamma =
      mode == RecoveryMode::perturbed || mode == RecoveryMode::sweep_optimized;
  if (needs_gamma && !gamma)
    throw std::invalid_argument("gamma required for mode " + mode_name(mode));
  int n = code.n(), k = code.k();
  Eigen::MatrixXcd v = codeword_matrix(code);

  RecoveryOperation rec;
  rec.n = n;
  rec.k = k;
  rec.mode = mode;
  if (needs_gamma) rec.gamma = gamma;

  auto [ep, em] = detail::two_branch_no_damping(
      v, n, k, mode == RecoveryMode::perturbed, gamma.value_or(0.0));
  for (auto* el : {&ep, &em}) {
    for (const auto& [a, b] : ps->pairs)
      el->measured.emplace_back(PauliOperator::single(n, a, 'Z') *
                                    PauliOperator::single(n, b, 'Z'),
                                +1);
  }
  ep.measured.emplace_back(ps->all_x, +1);
  em.measured.emplace_back(ps->all_x, -1);
  rec.elements.push_back(std::move(ep));
  rec.elements.push_back(std::move(em));

  // All damped sets hitting distinct pairs, by size then lexicographic.
  std::vector<std::vector<int>> sets;
  size_t np = ps->pairs.size();
  for (uint32_t chosen = 1; chosen < (uint32_t(1) << np); ++chosen) {
    std::vector<int> idx;
    for (size_t i = 0; i < np; ++i)
      if (chosen >> i & 1) idx.push_back(static_cast<int>(i));
    for (uint32_t pick = 0; pick < (uint32_t(1) << idx.size()); ++pick) {
      std::vector<int> damped;
      for (size_t i = 0; i < idx.size(); ++i) {
        auto [a, b] = ps->pairs[idx[i]];
        damped.push_back((pick >> i & 1) ? b : a);
      }
      std::sort(damped.begin(), damped.end());
      sets.push_back(std::move(damped));
    }
  }
  std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });

  for (const auto& damped : sets) {
    uint64_t mask = 0;
    for (int q : damped) mask |= uint64_t(1) << (n - q);
    Eigen::MatrixXcd img = damping_product_apply(n, mask, v);
    auto basis = detail::damped_basis(img);
    auto el =
        detail::element_from_basis(basis, k, n, detail::damped_label(damped));
    el.damped = damped;
    for (const auto& [a, b] : ps->pairs) {
      bool hit = std::find(damped.begin(), damped.end(), a) != damped.end() ||
                 std::find(damped.begin(), damped.end(), b) != damped.end();
      el.measured.emplace_back(PauliOperator::single(n, a, 'Z') *
                                   PauliOperator::single(n, b, 'Z'),
                               hit ? -1 : +1);
      if (hit) {
        bool first_damped =
            std::find(damped.begin(), damped.end(), a) != damped.end();
        el.measured.emplace_back(PauliOperator::single(n, a, 'Z'),
                                 first_damped ? +1 : -1);
      }
    }
    rec.elements.push_back(std::move(el));
  }
  return rec;
}

inline RecoveryOperation pair_code_recovery(int m, RecoveryMode mode,
                                            std::optional<double> gamma = {}) {
  if (mode != RecoveryMode::projection && mode != RecoveryMode::perturbed)
    throw std::invalid_argument("pair code recovery: projection or perturbed");
  return pair_family_recovery(pair_code(m), mode, gamma);
}

namespace detail {

inline void set_leung_no_damping(RecoveryOperation& rec,
                                 const Eigen::MatrixXcd& v, double alpha) {
  double beta = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
  // Row 0 (the weight-unbalanced codeword) carries (alpha, beta); balanced
  // rows stay at 1/sqrt(2).
  std::vector<std::vector<std::pair<uint64_t, cxd>>> plus(2), minus(2);
  auto branches = [&](int b) {
    std::vector<uint64_t> rows;
    for (Eigen::Index r = 0; r < v.rows(); ++r)
      if (std::abs(v(r, b)) > 1e-12) rows.push_back(r);
    return rows;
  };
  auto b0 = branches(0), b1 = branches(1);
  double s = 1.0 / std::sqrt(2.0);
  plus[0] = {{b0[0], alpha}, {b0[1], beta}};
  minus[0] = {{b0[0], beta}, {b0[1], -alpha}};
  plus[1] = {{b1[0], s}, {b1[1], s}};
  minus[1] = {{b1[0], s}, {b1[1], -s}};
  rec.elements[0].op = sparse_from_rows(2, rec.n, plus);
  rec.elements[1].op = sparse_from_rows(2, rec.n, minus);
}

}  // namespace detail

/// [4,1] recovery.  projection: (alpha, beta) = (1,1)/sqrt(2); perturbed:
/// (alpha, beta) proportional to (1, (1-gamma)^2); sweep_optimized: alpha in
/// [1/sqrt(2), 1] maximizing the entanglement fidelity at the given gamma.
inline RecoveryOperation leung41_recovery(RecoveryMode mode,
                                          std::optional<double> gamma = {}) {
  StabilizerCode code = leung_41();
  if (mode == RecoveryMode::projection || mode == RecoveryMode::perturbed)
    return pair_family_recovery(code, mode, gamma);
  if (mode != RecoveryMode::sweep_optimized)
    throw std::invalid_argument(
        "leung41 recovery: projection, perturbed or sweep_optimized");
  if (!gamma) throw std::invalid_argument("gamma required for sweep");

  RecoveryOperation rec =
      pair_family_recovery(code, RecoveryMode::projection, {});
  rec.mode = RecoveryMode::sweep_optimized;
  rec.gamma = gamma;
  Eigen::MatrixXcd v = codeword_matrix(code);

  auto fid = [&](double alpha) {
    detail::set_leung_no_damping(rec, v, alpha);
    return composite_fidelity(v, rec.ops(), *gamma, -1).fidelity;
  };
  double lo = 1.0 / std::sqrt(2.0), hi = 1.0;
  double c = std::sqrt(1.0 - *gamma);
  double alpha_pert = 1.0 / std::sqrt(1.0 + std::pow(c, 8.0));
  double best_a = lo, best_f = fid(lo);
  auto consider = [&](double a) {
    double f = fid(a);
    if (f > best_f + 1e-15) { best_f = f; best_a = a; }
  };
  consider(alpha_pert);
  consider(hi);
  for (double a = lo; a < hi; a += 1e-4) consider(a);
  // Golden-section refinement around the best grid point.
  double gl = std::max(lo, best_a - 2e-4), gh = std::min(hi, best_a + 2e-4);
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = gh - golden * (gh - gl), x2 = gl + golden * (gh - gl);
  double f1 = fid(x1), f2 = fid(x2);
  for (int it = 0; it < 80 && gh - gl > 1e-12; ++it) {
    if (f1 < f2) {
      gl = x1; x1 = x2; f1 = f2;
      x2 = gl + golden * (gh - gl); f2 = fid(x2);
    } else {
      gh = x2; x2 = x1; f2 = f1;
      x1 = gh - golden * (gh - gl); f1 = fid(x1);
    }
  }
  consider(0.5 * (gl + gh));
  detail::set_leung_no_damping(rec, v, best_a);
  rec.elements[0].label = "no-damping:+ (alpha=" + std::to_string(best_a) + ")";
  return rec;
}

/// [7,3] recovery: Hamming syndrome bits locate the damped qubit, the all-X
/// generator separates the X and Y components, and the no-damping branch
/// follows the selected mode.  The code argument allows a different logical
/// completion over the same group.
inline RecoveryOperation hamming73_recovery(const StabilizerCode& code,
                                            RecoveryMode mode,
                                            std::optional<double> gamma = {}) {
  if (mode != RecoveryMode::projection && mode != RecoveryMode::perturbed)
    throw std::invalid_argument("hamming73 recovery: projection or perturbed");
  if (mode == RecoveryMode::perturbed && !gamma)
    throw std::invalid_argument("gamma required for perturbed mode");
  {
    const auto want = hamming_73().group.generators;
    if (code.n() != 7 || code.group.generators.size() != want.size())
      throw std::invalid_argument("hamming73 recovery needs the [7,3] group");
    for (size_t i = 0; i < want.size(); ++i)
      if (!(code.group.generators[i] == want[i]))
        throw std::invalid_argument("hamming73 recovery needs the [7,3] group");
  }
  int n = 7, k = 3;
  Eigen::MatrixXcd v = codeword_matrix(code);
  const auto& gens = code.group.generators;  // M1, M2, M3, XXXXXXX

  RecoveryOperation rec;
  rec.n = n;
  rec.k = k;
  rec.mode = mode;
  if (mode == RecoveryMode::perturbed) rec.gamma = gamma;

  auto [ep, em] = detail::two_branch_no_damping(
      v, n, k, mode == RecoveryMode::perturbed, gamma.value_or(0.0));
  for (auto* el : {&ep, &em})
    for (int j = 0; j < 3; ++j) el->measured.emplace_back(gens[j], +1);
  ep.measured.emplace_back(gens[3], +1);
  em.measured.emplace_back(gens[3], -1);
  rec.elements.push_back(std::move(ep));
  rec.elements.push_back(std::move(em));

  for (int q = 1; q <= 7; ++q) {
    for (int eps : {+1, -1}) {
      StabilizerGroup sg{n, {}};
      for (int j = 0; j < 3; ++j) {
        bool bit = (q >> (2 - j)) & 1;  // (M1,M2,M3) = binary representation
        sg.generators.push_back(bit ? gens[j].negated() : gens[j]);
      }
      sg.generators.push_back(eps > 0 ? gens[3] : gens[3].negated());
      Eigen::MatrixXcd p = projector(sg);
      PauliOperator corr = PauliOperator::single(n, q, eps > 0 ? 'X' : 'Y');
      Eigen::MatrixXcd r = v.adjoint() * corr.to_dense() * p;
      RecoveryElement el;
      el.label = detail::damped_label({q}) + (eps > 0 ? ":X" : ":Y");
      el.op = detail::to_sparse(r);
      el.damped = {q};
      el.residual_dim = 1 << k;
      for (size_t j = 0; j < sg.generators.size(); ++j)
        el.measured.emplace_back(gens[j],
                                 sg.generators[j] == gens[j] ? +1 : -1);
      rec.elements.push_back(std::move(el));
    }
  }
  return rec;
}

inline RecoveryOperation hamming73_recovery(RecoveryMode mode,
                                            std::optional<double> gamma = {}) {
  return hamming73_recovery(hamming_73(), mode, gamma);
}

/// Standard stabilizer syndrome-table recovery for a code that corrects
/// arbitrary single-qubit Paulis.  Non-adapted leaves the leftover syndromes
/// uncorrected; adapted assigns them products of two X/Y operators in
/// increasing lexicographic order.
inline RecoveryOperation generic_stabilizer_recovery(const StabilizerCode& code,
                                                     bool adapted) {
  validate_code(code);
  int n = code.n(), k = code.k();
  int r = n - k;
  if (r > 6) throw std::invalid_argument("syndrome table limited to n-k <= 6");
  const auto& gens = code.group.generators;
  auto syndrome = [&](const PauliOperator& p) {
    uint32_t s = 0;
    for (int i = 0; i < r; ++i)
      if (!p.commutes_with(gens[i])) s |= uint32_t(1) << i;
    return s;
  };

  std::vector<std::optional<PauliOperator>> table(size_t(1) << r);
  table[0] = PauliOperator::identity(n);
  for (int q = 1; q <= n; ++q)
    for (char l : {'X', 'Y', 'Z'}) {
      PauliOperator p = PauliOperator::single(n, q, l);
      uint32_t s = syndrome(p);
      if (table[s])
        throw std::invalid_argument(
            "syndrome collision among single Paulis: " + p.str() + " vs " +
            table[s]->str());
      table[s] = p;
    }
  if (adapted) {
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        for (char li : {'X', 'Y'})
          for (char lj : {'X', 'Y'}) {
            PauliOperator p = PauliOperator::single(n, i, li) *
                              PauliOperator::single(n, j, lj);
            uint32_t s = syndrome(p);
            if (!table[s]) table[s] = p;
          }
  }

  Eigen::MatrixXcd v = codeword_matrix(code);
  RecoveryOperation rec;
  rec.n = n;
  rec.k = k;
  rec.mode = adapted ? RecoveryMode::adapted_stabilizer
                     : RecoveryMode::generic_stabilizer;
  for (uint32_t s = 0; s < (uint32_t(1) << r); ++s) {
    StabilizerGroup sg{n, {}};
    for (int i = 0; i < r; ++i)
      sg.generators.push_back((s >> i & 1) ? gens[i].negated() : gens[i]);
    Eigen::MatrixXcd p = projector(sg);
    PauliOperator corr = table[s].value_or(PauliOperator::identity(n));
    Eigen::MatrixXcd rmat = v.adjoint() * corr.to_dense() * p;
    RecoveryElement el;
    std::string bits;
    for (int i = 0; i < r; ++i) bits += (s >> i & 1) ? '1' : '0';
    el.label = "syndrome " + bits + " -> " +
               (table[s] ? table[s]->str() : std::string("unassigned"));
    el.op = detail::to_sparse(rmat);
    el.residual_dim = el.op.nonZeros() ? (1 << k) : 0;
    for (int i = 0; i < r; ++i)
      el.measured.emplace_back(gens[i], (s >> i & 1) ? -1 : +1);
    rec.elements.push_back(std::move(el));
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Shor code

namespace detail {

struct ShorBlocks {
  static constexpr int first[3] = {1, 4, 7};
  static int block_of(int q) { return (q - 1) / 3; }
};

/// Z-pair generators of the Shor code in group order.
inline std::vector<std::pair<int, int>> shor_pairs() {
  return {{1, 2}, {2, 3}, {4, 5}, {5, 6}, {7, 8}, {8, 9}};
}

inline std::vector<PauliOperator> shor_x_elements() {
  return {PauliOperator::parse("XXXXXXIII"), PauliOperator::parse("IIIXXXXXX"),
          PauliOperator::parse("XXXIIIXXX")};
}

}  // namespace detail

/// Stabilizer presentation of a Shor damped subspace in the measurement
/// narrative's form: signed Z-pair rows, surviving block-X rows, then one
/// signed single-Z resolution row per damped block.
inline StabilizerGroup shor_damped_presentation(const std::set<int>& damped) {
  if (damped.empty()) throw std::invalid_argument("no damped qubits");
  int per_block[3] = {0, 0, 0};
  for (int q : damped) {
    if (q < 1 || q > 9) throw std::out_of_range("qubit out of range");
    per_block[detail::ShorBlocks::block_of(q)]++;
  }
  for (int c : per_block)
    if (c > 2)
      throw std::invalid_argument(
          "three dampings in one block are indistinguishable from no damping");
  StabilizerGroup g{9, {}};
  for (auto [a, b] : detail::shor_pairs()) {
    PauliOperator zz = PauliOperator::single(9, a, 'Z') *
                       PauliOperator::single(9, b, 'Z');
    int hits = static_cast<int>(damped.count(a) + damped.count(b));
    g.generators.push_back(hits % 2 ? zz.negated() : zz);
  }
  auto xels = detail::shor_x_elements();
  for (const auto& x : {xels[0], xels[1]}) {
    bool touched = false;
    for (int q : damped)
      if (x.x_at(q)) { touched = true; break; }
    if (!touched) g.generators.push_back(x);
  }
  for (int blk = 0; blk < 3; ++blk) {
    if (per_block[blk] == 0) continue;
    int first = detail::ShorBlocks::first[blk];
    PauliOperator z = PauliOperator::single(9, first, 'Z');
    g.generators.push_back(damped.count(first) ? z : z.negated());
  }
  validate_group(g);
  return g;
}

/// Shor-code recovery.  Both modes share the Z-pair plus per-block Z_1
/// syndrome tree; the leftover freedom is resolved by measuring the
/// surviving block-X stabilizers (adapted_stabilizer) or by the
/// gamma-dependent perturbed-basis decode that removes the E_0 distortion
/// (perturbed).  Three dampings within a block fold into the no-damping
/// pair syndrome; branches where all three blocks are damped collapse onto
/// a single ray.  The code argument allows a different logical completion
/// over the Shor group.
inline RecoveryOperation shor_recovery(const StabilizerCode& code,
                                       RecoveryMode mode,
                                       std::optional<double> gamma = {}) {
  bool gamma_dep = mode == RecoveryMode::perturbed;
  if (!gamma_dep && mode != RecoveryMode::adapted_stabilizer)
    throw std::invalid_argument(
        "shor recovery: adapted_stabilizer or perturbed (gamma-dependent)");
  if (gamma_dep && !gamma)
    throw std::invalid_argument("gamma required for gamma-dependent mode");
  {
    const auto want = shor_91().group.generators;
    if (code.n() != 9 || code.group.generators.size() != want.size())
      throw std::invalid_argument("shor recovery needs the Shor group");
    for (size_t i = 0; i < want.size(); ++i)
      if (!(code.group.generators[i] == want[i]))
        throw std::invalid_argument("shor recovery needs the Shor group");
  }
  int n = 9, k = 1;
  Eigen::MatrixXcd v = codeword_matrix(code);
  double c = std::sqrt(1.0 - gamma.value_or(0.0));

  RecoveryOperation rec;
  rec.n = n;
  rec.k = k;
  rec.mode = mode;
  if (gamma_dep) rec.gamma = gamma;

  auto xels = detail::shor_x_elements();
  // Per-block conditions: 0 intact, 1..3 single damping at that offset,
  // 4..6 double damping sparing that offset.
  auto block_damped = [](int cond, int blk) {
    std::vector<int> d;
    int first = detail::ShorBlocks::first[blk];
    if (cond >= 1 && cond <= 3) d = {first + cond - 1};
    if (cond >= 4 && cond <= 6)
      for (int off = 0; off < 3; ++off)
        if (off != cond - 4) d.push_back(first + off);
    return d;
  };

  for (int c1 = 0; c1 < 7; ++c1)
    for (int c2 = 0; c2 < 7; ++c2)
      for (int c3 = 0; c3 < 7; ++c3) {
        int conds[3] = {c1, c2, c3};
        std::vector<int> damped;
        int d_blocks = 0;
        for (int blk = 0; blk < 3; ++blk) {
          auto bd = block_damped(conds[blk], blk);
          if (!bd.empty()) ++d_blocks;
          damped.insert(damped.end(), bd.begin(), bd.end());
        }
        uint64_t mask = 0;
        for (int q : damped) mask |= uint64_t(1) << (n - q);

        auto base_measured = [&]() {
          std::vector<std::pair<PauliOperator, int>> ms;
          for (auto [a, b] : detail::shor_pairs()) {
            PauliOperator zz = PauliOperator::single(n, a, 'Z') *
                               PauliOperator::single(n, b, 'Z');
            int hits = 0;
            for (int q : damped) hits += (q == a) + (q == b);
            ms.emplace_back(hits % 2 ? zz.negated() : zz, hits % 2 ? -1 : +1);
          }
          for (int blk = 0; blk < 3; ++blk) {
            if (conds[blk] == 0) continue;
            int first = detail::ShorBlocks::first[blk];
            bool first_damped = std::find(damped.begin(), damped.end(),
                                          first) != damped.end();
            ms.emplace_back(PauliOperator::single(n, first, 'Z'),
                            first_damped ? +1 : -1);
          }
          return ms;
        };

        std::string label =
            damped.empty() ? "no-damping" : detail::damped_label(damped);

        if (!gamma_dep) {
          // Surviving block-X stabilizers resolve the remaining freedom.
          std::vector<const PauliOperator*> survivors;
          for (const auto& x : xels) {
            bool touched = false;
            for (int q : damped)
              if (x.x_at(q)) { touched = true; break; }
            if (!touched) survivors.push_back(&x);
          }
          // Keep an independent generating set (at most 2 of the 3).
          if (survivors.size() == 3) survivors.pop_back();
          int lowest_intact = -1;
          for (int blk = 0; blk < 3 && lowest_intact < 0; ++blk)
            if (conds[blk] == 0)
              lowest_intact = detail::ShorBlocks::first[blk];
          Eigen::MatrixXcd img = damping_product_apply(n, mask, v);
          auto basis = detail::damped_basis(img);
          size_t nsub = size_t(1) << survivors.size();
          for (size_t out = 0; out < nsub; ++out) {
            // Pauli correction returning this X-outcome to the reachable
            // branch: flip per -1 outcome with a Z on a suitable block.
            PauliOperator corr = PauliOperator::identity(n);
            std::string tag;
            for (size_t i = 0; i < survivors.size(); ++i) {
              bool neg = out >> i & 1;
              tag += neg ? '-' : '+';
              if (!neg) continue;
              int zq;
              if (survivors.size() == 2) {
                // Outcomes (e1,e2) of (X 1-6, X 4-9): Z1 flips e1, Z7 flips
                // e2, Z4 flips both (used for the (-,-) case below).
                zq = (i == 0) ? 1 : 7;
              } else {
                zq = lowest_intact;
              }
              corr = corr * PauliOperator::single(n, zq, 'Z');
            }
            if (survivors.size() == 2 && out == 3)
              corr = PauliOperator::single(n, 4, 'Z');
            detail::DampedBasis corrected = basis;
            for (auto& col : corrected.columns) col = corr.apply(col);
            auto el = detail::element_from_basis(
                corrected, k, n, label + (tag.empty() ? "" : ":" + tag));
            el.damped = damped;
            el.measured = base_measured();
            for (size_t i = 0; i < survivors.size(); ++i)
              el.measured.emplace_back(*survivors[i],
                                       (out >> i & 1) ? -1 : +1);
            rec.elements.push_back(std::move(el));
          }
        } else {
          // Gamma-dependent branch: decode the E_0-dressed images.
          Eigen::MatrixXcd img(v.rows(), v.cols());
          img.setZero();
          for (int b = 0; b < v.cols(); ++b)
            for (Eigen::Index rr = 0; rr < v.rows(); ++rr) {
              if (v(rr, b) == cxd(0)) continue;
              uint64_t row = static_cast<uint64_t>(rr);
              if ((row & mask) != mask) continue;
              img(row & ~mask, b) +=
                  v(rr, b) * std::pow(c, std::popcount(row & ~mask));
            }
          std::vector<int> alive;
          for (int b = 0; b < img.cols(); ++b)
            if (img.col(b).norm() > 1e-12) alive.push_back(b);
          RecoveryElement el;
          el.label = label + ":gamma";
          el.damped = damped;
          el.measured = base_measured();
          if (alive.empty()) {
            // At gamma = 1 the dressed image can vanish entirely; the
            // branch then recovers nothing.
            el.op = SparseOp(1 << k, Eigen::Index(1) << n);
            el.residual_dim = 0;
            rec.elements.push_back(std::move(el));
            continue;
          }
          bool parallel = false;
          if (alive.size() == 2) {
            double ov = std::abs(img.col(alive[0]).normalized().dot(
                img.col(alive[1]).normalized()));
            parallel = ov > 1.0 - 1e-9;
          }
          if (alive.size() < 2 || parallel) {
            // Collapsed ray: decode onto the adjoint-image direction.
            Eigen::VectorXcd col = img.col(alive[0]).normalized();
            Eigen::VectorXcd t = Eigen::VectorXcd::Zero(1 << k);
            for (int b = 0; b < img.cols(); ++b)
              t[b] = std::conj(col.dot(img.col(b)));
            t.normalize();
            Eigen::MatrixXcd rmat = t * col.adjoint();
            el.op = detail::to_sparse(rmat);
            el.residual_dim = 1;
          } else {
            // Symmetric orthogonalization of the perturbed basis: R =
            // G^(-1/2) B^dag is the closest isometric decode to the
            // E_0-dressed images and reduces to the row-normalized form
            // when they are orthogonal.
            Eigen::MatrixXcd b(v.rows(), alive.size());
            for (size_t i = 0; i < alive.size(); ++i) b.col(i) = img.col(alive[i]);
            Eigen::MatrixXcd gram = b.adjoint() * b;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
            Eigen::MatrixXcd dec = es.operatorInverseSqrt() * b.adjoint();
            Eigen::MatrixXcd rmat = Eigen::MatrixXcd::Zero(1 << k, v.rows());
            for (size_t i = 0; i < alive.size(); ++i)
              rmat.row(alive[i]) = dec.row(i);
            el.op = detail::to_sparse(rmat);
            el.residual_dim = static_cast<int>(alive.size());
          }
          rec.elements.push_back(std::move(el));
        }
      }
  return rec;
}

inline RecoveryOperation shor_recovery(RecoveryMode mode,
                                       std::optional<double> gamma = {}) {
  return shor_recovery(shor_91(), mode, gamma);
}

}  // namespace adqec
