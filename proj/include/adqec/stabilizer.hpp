#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "adqec/pauli.hpp"

namespace adqec {

namespace detail {

/// GF(2) row-echelon solver over symplectic (x|z) vectors with combination
/// tracking, used for independence checks and signed group membership.
class Gf2Solver {
public:
  explicit Gf2Solver(const std::vector<PauliOperator>& basis) {
    for (size_t i = 0; i < basis.size(); ++i)
      insert(basis[i].x_bits(), basis[i].z_bits(), uint64_t(1) << i);
  }

  int rank() const { return static_cast<int>(rows_.size()); }

  /// Subset mask of basis elements whose product has the given bare bits.
  std::optional<uint64_t> express(uint64_t x, uint64_t z) const {
    uint64_t combo = 0;
    for (const auto& r : rows_) {
      if (leading(x, z) == leading(r.x, r.z) && leading(x, z) >= 0) {
        x ^= r.x; z ^= r.z; combo ^= r.combo;
      }
    }
    // Second pass for rows whose pivot sits below bits introduced later.
    bool changed = true;
    while (changed && (x | z)) {
      changed = false;
      for (const auto& r : rows_) {
        int lv = leading(x, z);
        if (lv >= 0 && lv == leading(r.x, r.z)) {
          x ^= r.x; z ^= r.z; combo ^= r.combo;
          changed = true;
        }
      }
    }
    if (x == 0 && z == 0) return combo;
    return std::nullopt;
  }

  /// Kernel combinations discovered while inserting (one per dependent row).
  const std::vector<uint64_t>& kernel_combos() const { return kernel_; }

private:
  struct Row { uint64_t x, z, combo; };

  static int leading(uint64_t x, uint64_t z) {
    if (x) return 64 + (63 - std::countl_zero(x));
    if (z) return 63 - std::countl_zero(z);
    return -1;
  }

  void insert(uint64_t x, uint64_t z, uint64_t combo) {
    for (const auto& r : rows_) {
      if (leading(x, z) == leading(r.x, r.z)) {
        x ^= r.x; z ^= r.z; combo ^= r.combo;
      }
    }
    if (x == 0 && z == 0) {
      kernel_.push_back(combo);
      return;
    }
    rows_.push_back({x, z, combo});
    std::sort(rows_.begin(), rows_.end(), [](const Row& a, const Row& b) {
      return leading(a.x, a.z) > leading(b.x, b.z);
    });
  }

  std::vector<Row> rows_;
  std::vector<uint64_t> kernel_;
};

inline PauliOperator subset_product(const std::vector<PauliOperator>& gens,
                                    uint64_t combo, int n) {
  PauliOperator p = PauliOperator::identity(n);
  for (size_t i = 0; i < gens.size(); ++i)
    if (combo & (uint64_t(1) << i)) p = p * gens[i];
  return p;
}

}  // namespace detail

struct StabilizerGroup {
  int n = 1;
  std::vector<PauliOperator> generators;
};

inline int symplectic_rank(const std::vector<PauliOperator>& gens) {
  return detail::Gf2Solver(gens).rank();
}

inline void validate_group(const StabilizerGroup& g) {
  if (g.n < 1 || g.n > 64) throw std::invalid_argument("bad qubit count");
  if (g.generators.size() > 64)
    throw std::invalid_argument("too many generators");
  for (const auto& p : g.generators) {
    if (p.n() != g.n)
      throw std::invalid_argument("generator length mismatch");
    if (!p.is_hermitian())
      throw std::invalid_argument("generator phase must be +1 or -1");
  }
  for (size_t i = 0; i < g.generators.size(); ++i)
    for (size_t j = i + 1; j < g.generators.size(); ++j)
      if (!g.generators[i].commutes_with(g.generators[j]))
        throw std::invalid_argument("generators " + g.generators[i].str() +
                                    " and " + g.generators[j].str() +
                                    " anticommute");
  if (symplectic_rank(g.generators) !=
      static_cast<int>(g.generators.size()))
    throw std::invalid_argument("generators are dependent");
}

/// All 2^r signed elements of the group.
inline std::vector<PauliOperator> group_elements(const StabilizerGroup& g) {
  size_t r = g.generators.size();
  if (r > 20) throw std::invalid_argument("group too large to enumerate");
  std::vector<PauliOperator> out;
  out.reserve(size_t(1) << r);
  PauliOperator cur = PauliOperator::identity(g.n);
  out.push_back(cur);
  for (uint64_t i = 1; i < (uint64_t(1) << r); ++i) {
    cur = cur * g.generators[std::countr_zero(i)];  // Gray-code walk
    out.push_back(cur);
  }
  return out;
}

/// Signed group element with the given bare bits, if one exists.
inline std::optional<PauliOperator> group_element_matching(
    const StabilizerGroup& g, uint64_t x, uint64_t z) {
  detail::Gf2Solver solver(g.generators);
  auto combo = solver.express(x, z);
  if (!combo) return std::nullopt;
  return detail::subset_product(g.generators, *combo, g.n);
}

/// Product of (I + g_i)/2 as a dense matrix; trace = 2^(n - r).
inline Eigen::MatrixXcd projector(const StabilizerGroup& g) {
  if (g.n > 12) throw std::invalid_argument("projector limited to n <= 12");
  validate_group(g);
  Eigen::Index dim = Eigen::Index(1) << g.n;
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
  auto elems = group_elements(g);
  double scale = 1.0 / static_cast<double>(elems.size());
  for (const auto& e : elems)
    for (uint64_t c = 0; c < static_cast<uint64_t>(dim); ++c) {
      auto [r, coeff] = e.apply_to_basis(c);
      p(r, c) += coeff * scale;
    }
  return p;
}

/// Stabilizer group of the image of the group's subspace under the damping
/// operator (X_q + iY_q)/2.  Generators keep their original order: commuting
/// generators survive, a generator with Z at the column survives with its
/// sign flipped, generators with X (or Y) at the column are removed, and Z_q
/// is appended unless already implied.
inline StabilizerGroup damped_subspace(const StabilizerGroup& g, int qubit) {
  validate_group(g);
  if (qubit < 1 || qubit > g.n) throw std::out_of_range("qubit out of range");
  std::vector<PauliOperator> gens = g.generators;

  // Symplectic elimination restricted to the target column: at most one
  // generator keeps an X component there and at most one a Z component.
  int xp = -1;
  for (size_t i = 0; i < gens.size(); ++i)
    if (gens[i].x_at(qubit)) {
      if (xp < 0) xp = static_cast<int>(i);
      else gens[i] = gens[i] * gens[xp];
    }
  int zp = -1;
  for (size_t i = 0; i < gens.size(); ++i) {
    if (static_cast<int>(i) == xp) continue;
    if (gens[i].z_at(qubit)) {
      if (zp < 0) zp = static_cast<int>(i);
      else gens[i] = gens[i] * gens[zp];
    }
  }
  // Y at the column reduces to the X case; with a Z pivot present the
  // product keeps a real sign, otherwise the generator is dropped anyway.
  if (xp >= 0 && zp >= 0 && gens[xp].z_at(qubit))
    gens[xp] = gens[xp] * gens[zp];

  StabilizerGroup out{g.n, {}};
  for (const auto& p : gens) {
    switch (p.letter_at(qubit)) {
      case 'I': out.generators.push_back(p); break;
      case 'Z': out.generators.push_back(p.negated()); break;
      default: break;  // X or Y: removed
    }
  }
  PauliOperator zq = PauliOperator::single(g.n, qubit, 'Z');
  if (auto e = group_element_matching(out, zq.x_bits(), zq.z_bits())) {
    if (e->phase_pow() != 0)
      throw std::domain_error("damped subspace is empty: qubit " +
                              std::to_string(qubit) + " is pinned to |0>");
    // +Z_q already implied; subspace dimension is preserved.
  } else {
    out.generators.push_back(zq);
  }
  validate_group(out);
  return out;
}

/// True iff the stabilized subspaces are orthogonal: some element g
/// stabilizes one subspace while -g stabilizes the other.
inline bool orthogonal(const StabilizerGroup& a, const StabilizerGroup& b) {
  if (a.n != b.n) throw std::invalid_argument("qubit count mismatch");
  validate_group(a);
  validate_group(b);
  std::vector<PauliOperator> stacked = a.generators;
  stacked.insert(stacked.end(), b.generators.begin(), b.generators.end());
  detail::Gf2Solver solver(stacked);
  size_t ra = a.generators.size();
  for (uint64_t combo : solver.kernel_combos()) {
    uint64_t ca = combo & ((uint64_t(1) << ra) - 1);
    uint64_t cb = combo >> ra;
    PauliOperator pa = detail::subset_product(a.generators, ca, a.n);
    PauliOperator pb = detail::subset_product(b.generators, cb, b.n);
    if (pa.phase_pow() != pb.phase_pow()) return true;
  }
  return false;
}

struct StabilizerCode {
  StabilizerGroup group;
  std::vector<PauliOperator> logical_x, logical_z;
  std::string name;

  int n() const { return group.n; }
  int k() const {
    return group.n - static_cast<int>(group.generators.size());
  }
};

inline void validate_code(const StabilizerCode& code) {
  validate_group(code.group);
  int k = code.k();
  if (static_cast<int>(code.logical_x.size()) != k ||
      static_cast<int>(code.logical_z.size()) != k)
    throw std::invalid_argument("logical operator count must equal k");
  auto check_vs_group = [&](const PauliOperator& p) {
    if (!p.is_hermitian())
      throw std::invalid_argument("logical operator must have phase +/-1");
    for (const auto& gen : code.group.generators)
      if (!p.commutes_with(gen))
        throw std::invalid_argument("logical " + p.str() +
                                    " anticommutes with a generator");
  };
  for (const auto& p : code.logical_x) check_vs_group(p);
  for (const auto& p : code.logical_z) check_vs_group(p);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      bool anti = !code.logical_x[i].commutes_with(code.logical_z[j]);
      if (anti != (i == j))
        throw std::invalid_argument("logical X/Z commutation is wrong");
      if (!code.logical_x[i].commutes_with(code.logical_x[j]) ||
          !code.logical_z[i].commutes_with(code.logical_z[j]))
        throw std::invalid_argument("logical pairs must commute");
    }
}

/// Ordered codeword basis.  The vector indexed by bit string b (b_1 is the
/// most significant bit) is the joint +1 eigenvector of the generators with
/// logical-Z eigenvalues (-1)^{b_i}; the first nonzero amplitude in
/// computational-basis order is made real positive.
inline std::vector<Eigen::VectorXcd> codewords(const StabilizerCode& code) {
  if (code.n() > 12)
    throw std::invalid_argument("codewords limited to n <= 12");
  validate_code(code);
  int k = code.k();
  uint64_t dim = uint64_t(1) << code.n();
  std::vector<Eigen::VectorXcd> basis;
  basis.reserve(size_t(1) << k);
  for (uint64_t b = 0; b < (uint64_t(1) << k); ++b) {
    StabilizerGroup full = code.group;
    for (int i = 0; i < k; ++i) {
      bool minus = (b >> (k - 1 - i)) & 1;
      full.generators.push_back(minus ? code.logical_z[i].negated()
                                      : code.logical_z[i]);
    }
    auto elems = group_elements(full);
    double scale = 1.0 / static_cast<double>(elems.size());
    Eigen::VectorXcd v;
    bool found = false;
    for (uint64_t seed = 0; seed < dim && !found; ++seed) {
      // <seed|P|seed> = ||P seed||^2; diagonal elements decide cheaply.
      double diag = 0;
      for (const auto& e : elems) {
        if (e.x_bits() != 0) continue;
        auto [r, coeff] = e.apply_to_basis(seed);
        diag += coeff.real();
      }
      if (diag * scale < 1e-9) continue;
      v = Eigen::VectorXcd::Zero(dim);
      for (const auto& e : elems) {
        auto [r, coeff] = e.apply_to_basis(seed);
        v[r] += coeff * scale;
      }
      found = true;
    }
    if (!found) throw std::runtime_error("codeword projector is zero");
    v.normalize();
    for (uint64_t i = 0; i < dim; ++i) {
      if (std::abs(v[i]) > 1e-8) {
        v *= std::conj(v[i]) / std::abs(v[i]);
        break;
      }
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Encoding isometry: columns are the codewords.
inline Eigen::MatrixXcd codeword_matrix(const StabilizerCode& code) {
  auto cw = codewords(code);
  Eigen::MatrixXcd v(cw.front().size(), cw.size());
  for (size_t i = 0; i < cw.size(); ++i) v.col(i) = cw[i];
  return v;
}

struct KLReport {
  bool correctable = false;
  Eigen::MatrixXcd gram;      // C_ab estimates, Hermitian
  double max_violation = 0.0;
};

/// Knill-Laflamme check from precomputed error images E_a V.
inline KLReport kl_from_images(const std::vector<Eigen::MatrixXcd>& images,
                               double tol) {
  if (tol <= 0) throw std::invalid_argument("tol must be positive");
  size_t m = images.size();
  int k_dim = images.empty() ? 0 : static_cast<int>(images[0].cols());
  KLReport rep;
  rep.gram = Eigen::MatrixXcd::Zero(m, m);
  rep.max_violation = 0.0;
  Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(k_dim, k_dim);
  for (size_t a = 0; a < m; ++a)
    for (size_t b = a; b < m; ++b) {
      Eigen::MatrixXcd block = images[a].adjoint() * images[b];
      cxd c = block.trace() / static_cast<double>(k_dim);
      rep.gram(a, b) = c;
      rep.gram(b, a) = std::conj(c);
      double viol = (block - c * eye).cwiseAbs().maxCoeff();
      rep.max_violation = std::max(rep.max_violation, viol);
    }
  rep.correctable = rep.max_violation < tol;
  return rep;
}

inline KLReport check_knill_laflamme(const StabilizerCode& code,
                                     const std::vector<Eigen::MatrixXcd>& errors,
                                     double tol = 1e-9) {
  Eigen::MatrixXcd v = codeword_matrix(code);
  std::vector<Eigen::MatrixXcd> images;
  images.reserve(errors.size());
  for (const auto& e : errors) {
    if (e.rows() != v.rows() || e.cols() != v.rows())
      throw std::invalid_argument("error matrix dimension mismatch");
    images.push_back(e * v);
  }
  return kl_from_images(images, tol);
}

/// Deterministic symplectic completion of logical operators: each logical is
/// the first Pauli in (weight, lexicographic) order satisfying the
/// commutation constraints.  swap_roles yields a second, different
/// completion by exchanging the X and Z roles.
inline std::pair<std::vector<PauliOperator>, std::vector<PauliOperator>>
complete_logicals(const StabilizerGroup& group, bool swap_roles = false) {
  validate_group(group);
  int n = group.n;
  if (n > 9)
    throw std::invalid_argument("logical completion limited to n <= 9");
  int k = n - static_cast<int>(group.generators.size());
  // All bare Paulis ordered by weight then text (I < X < Y < Z).
  std::vector<PauliOperator> cands;
  cands.reserve((size_t(1) << (2 * n)) - 1);
  for (uint64_t code_bits = 1; code_bits < (uint64_t(1) << (2 * n));
       ++code_bits) {
    uint64_t x = code_bits & ((uint64_t(1) << n) - 1);
    uint64_t z = code_bits >> n;
    cands.emplace_back(n, x, z, 0);
  }
  std::sort(cands.begin(), cands.end(),
            [](const PauliOperator& a, const PauliOperator& b) {
              if (a.weight() != b.weight()) return a.weight() < b.weight();
              for (int q = 1; q <= a.n(); ++q) {
                char ca = a.letter_at(q), cb = b.letter_at(q);
                if (ca != cb) return ca < cb;
              }
              return false;
            });

  auto commutes_with_group = [&](const PauliOperator& p) {
    for (const auto& g : group.generators)
      if (!p.commutes_with(g)) return false;
    return true;
  };

  std::vector<PauliOperator> zbar;
  for (int i = 0; i < k; ++i) {
    for (const auto& p : cands) {
      if (!commutes_with_group(p)) continue;
      bool ok = true;
      for (const auto& z : zbar)
        if (!p.commutes_with(z)) { ok = false; break; }
      if (!ok) continue;
      std::vector<PauliOperator> span = group.generators;
      span.insert(span.end(), zbar.begin(), zbar.end());
      if (detail::Gf2Solver(span).express(p.x_bits(), p.z_bits()))
        continue;  // already in the span
      zbar.push_back(p);
      break;
    }
    if (static_cast<int>(zbar.size()) != i + 1)
      throw std::runtime_error("logical completion failed");
  }

  std::vector<PauliOperator> xbar;
  for (int i = 0; i < k; ++i) {
    for (const auto& p : cands) {
      if (!commutes_with_group(p)) continue;
      bool ok = true;
      for (int j = 0; j < k; ++j) {
        bool anti = !p.commutes_with(zbar[j]);
        if (anti != (j == i)) { ok = false; break; }
      }
      if (!ok) continue;
      for (const auto& x : xbar)
        if (!p.commutes_with(x)) { ok = false; break; }
      if (!ok) continue;
      xbar.push_back(p);
      break;
    }
    if (static_cast<int>(xbar.size()) != i + 1)
      throw std::runtime_error("logical completion failed");
  }

  if (swap_roles) return {zbar, xbar};
  return {xbar, zbar};
}

}  // namespace adqec
