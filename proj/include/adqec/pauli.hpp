#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace adqec {

using cxd = std::complex<double>;

/// Phase-tracked n-qubit Pauli operator in symplectic (X-bits, Z-bits) form.
///
/// Qubit q (1-based, leftmost character of the text form) carries
/// I/X/Y/Z exactly when (x_q, z_q) = (0,0)/(1,0)/(1,1)/(0,1).  The operator
/// equals phase() times the Kronecker product of the literal single-qubit
/// Pauli matrices, with qubit 1 as the leftmost (most significant) factor.
/// Basis states are indexed so that qubit 1 is the most significant bit,
/// i.e. |q1 q2 ... qn> has index sum_q q_i 2^(n-i).
class PauliOperator {
public:
  PauliOperator() = default;

  PauliOperator(int n, uint64_t x_mask, uint64_t z_mask, int phase_pow = 0)
      : n_(n), x_(x_mask), z_(z_mask), phase_pow_(((phase_pow % 4) + 4) % 4) {
    check_n(n);
    if (n < 64 && ((x_ | z_) >> n) != 0)
      throw std::invalid_argument("Pauli bit mask exceeds qubit count");
  }

  static PauliOperator identity(int n) { return PauliOperator(n, 0, 0, 0); }

  /// Single-qubit Pauli at 1-based position q, identity elsewhere.
  static PauliOperator single(int n, int q, char letter) {
    check_n(n);
    if (q < 1 || q > n) throw std::out_of_range("qubit index out of range");
    uint64_t m = bit(n, q);
    switch (letter) {
      case 'X': return PauliOperator(n, m, 0, 0);
      case 'Y': return PauliOperator(n, m, m, 0);
      case 'Z': return PauliOperator(n, 0, m, 0);
      case 'I': return identity(n);
    }
    throw std::invalid_argument("unknown Pauli letter");
  }

  /// Parses "-ZZII", "XXXX", "+iXY", "-iY", ... .  The optional n argument
  /// cross-checks the string length.
  static PauliOperator parse(const std::string& text, int n = 0) {
    size_t pos = 0;
    int ph = 0;
    if (text.compare(0, 2, "+i") == 0) { ph = 1; pos = 2; }
    else if (text.compare(0, 2, "-i") == 0) { ph = 3; pos = 2; }
    else if (!text.empty() && text[0] == '-') { ph = 2; pos = 1; }
    else if (!text.empty() && text[0] == '+') { pos = 1; }
    std::string body = text.substr(pos);
    if (body.empty()) throw std::invalid_argument("empty Pauli string");
    if (n != 0 && static_cast<int>(body.size()) != n)
      throw std::invalid_argument("Pauli string length mismatch: " + text);
    int nn = static_cast<int>(body.size());
    check_n(nn);
    uint64_t x = 0, z = 0;
    for (int i = 0; i < nn; ++i) {
      uint64_t m = bit(nn, i + 1);
      switch (body[i]) {
        case 'I': break;
        case 'X': x |= m; break;
        case 'Y': x |= m; z |= m; break;
        case 'Z': z |= m; break;
        default:
          throw std::invalid_argument(std::string("bad Pauli character '") +
                                      body[i] + "' in " + text);
      }
    }
    return PauliOperator(nn, x, z, ph);
  }

  std::string str() const {
    static const char* prefix[4] = {"", "+i", "-", "-i"};
    std::string s = prefix[phase_pow_];
    for (int q = 1; q <= n_; ++q) {
      bool xb = x_ & bit(n_, q), zb = z_ & bit(n_, q);
      s += xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
    }
    return s;
  }

  int n() const { return n_; }
  uint64_t x_bits() const { return x_; }
  uint64_t z_bits() const { return z_; }
  int phase_pow() const { return phase_pow_; }
  cxd phase() const {
    static const cxd tab[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return tab[phase_pow_];
  }
  bool is_hermitian() const { return phase_pow_ % 2 == 0; }
  bool is_identity_bits() const { return x_ == 0 && z_ == 0; }
  int weight() const { return std::popcount(x_ | z_); }

  char letter_at(int q) const {
    bool xb = x_ & bit(n_, q), zb = z_ & bit(n_, q);
    return xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
  }
  bool x_at(int q) const { return x_ & bit(n_, q); }
  bool z_at(int q) const { return z_ & bit(n_, q); }

  PauliOperator with_phase_pow(int ph) const {
    return PauliOperator(n_, x_, z_, ph);
  }
  PauliOperator negated() const { return with_phase_pow(phase_pow_ + 2); }

  friend PauliOperator operator*(const PauliOperator& a,
                                 const PauliOperator& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("Pauli length mismatch");
    // i-exponent of the single-qubit product, indexed by x1 + 2 z1 + 4 x2 + 8 z2.
    static constexpr int tbl[16] = {0, 0, 0, 0, 0, 0, 1, 3,
                                    0, 3, 0, 1, 0, 1, 3, 0};
    int ph = a.phase_pow_ + b.phase_pow_;
    uint64_t rest = a.x_ | a.z_ | b.x_ | b.z_;
    while (rest) {
      int p = std::countr_zero(rest);
      rest &= rest - 1;
      uint64_t m = uint64_t(1) << p;
      int idx = (a.x_ & m ? 1 : 0) | (a.z_ & m ? 2 : 0) | (b.x_ & m ? 4 : 0) |
                (b.z_ & m ? 8 : 0);
      ph += tbl[idx];
    }
    return PauliOperator(a.n_, a.x_ ^ b.x_, a.z_ ^ b.z_, ph);
  }

  bool commutes_with(const PauliOperator& o) const {
    if (n_ != o.n_) throw std::invalid_argument("Pauli length mismatch");
    int s = std::popcount(x_ & o.z_) + std::popcount(z_ & o.x_);
    return s % 2 == 0;
  }

  bool operator==(const PauliOperator& o) const {
    return n_ == o.n_ && x_ == o.x_ && z_ == o.z_ && phase_pow_ == o.phase_pow_;
  }
  bool same_bits(const PauliOperator& o) const {
    return n_ == o.n_ && x_ == o.x_ && z_ == o.z_;
  }

  /// P|c> = coeff * |c ^ x_bits>.
  std::pair<uint64_t, cxd> apply_to_basis(uint64_t c) const {
    int ph = phase_pow_ + std::popcount(x_ & z_);  // i per Y site
    ph += 2 * std::popcount(z_ & c);               // (-1) per Z/Y site hit on |1>
    static const cxd tab[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return {c ^ x_, tab[ph % 4]};
  }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const {
    if (v.size() != (Eigen::Index(1) << n_))
      throw std::invalid_argument("state dimension mismatch");
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
    for (uint64_t c = 0; c < static_cast<uint64_t>(v.size()); ++c) {
      if (v[c] == cxd(0)) continue;
      auto [r, coeff] = apply_to_basis(c);
      out[r] += coeff * v[c];
    }
    return out;
  }

  Eigen::MatrixXcd to_dense() const {
    if (n_ > 12) throw std::invalid_argument("to_dense limited to n <= 12");
    Eigen::Index dim = Eigen::Index(1) << n_;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (uint64_t c = 0; c < static_cast<uint64_t>(dim); ++c) {
      auto [r, coeff] = apply_to_basis(c);
      m(r, c) = coeff;
    }
    return m;
  }

private:
  static void check_n(int n) {
    if (n < 1 || n > 64) throw std::invalid_argument("qubit count must be 1..64");
  }
  // Qubit 1 is the most significant of the n used bits.
  static uint64_t bit(int n, int q) { return uint64_t(1) << (n - q); }

  int n_ = 1;
  uint64_t x_ = 0, z_ = 0;
  int phase_pow_ = 0;
};

inline std::vector<PauliOperator> parse_paulis(
    const std::vector<std::string>& rows, int n = 0) {
  std::vector<PauliOperator> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(PauliOperator::parse(r, n));
  return out;
}

}  // namespace adqec
