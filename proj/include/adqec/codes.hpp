#pragma once

#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "adqec/stabilizer.hpp"

namespace adqec {

/// The [4,1] amplitude damping code with the logical operators used in the
/// original presentation (Xbar = XXII, Zbar = ZIZI).
inline StabilizerCode leung_41() {
  StabilizerCode code;
  code.group = {4, parse_paulis({"XXXX", "ZZII", "IIZZ"})};
  code.logical_x = parse_paulis({"XXII"});
  code.logical_z = parse_paulis({"ZIZI"});
  code.name = "leung41";
  validate_code(code);
  return code;
}

/// Standard-form qubit pairing of the [2(M+1),M] family: (1,2), then
/// (j, 2M+5-j) for j = 3..M+2.
inline std::vector<std::pair<int, int>> pair_code_pairing(int m) {
  std::vector<std::pair<int, int>> pairs{{1, 2}};
  for (int j = 3; j <= m + 2; ++j) pairs.emplace_back(j, 2 * m + 5 - j);
  return pairs;
}

/// The [2(M+1),M] code in standard form: an all-X generator, M+1 Z-pair
/// generators, and systematic logical operators.
inline StabilizerCode pair_code(int m) {
  if (m < 1 || m > 4)
    throw std::invalid_argument("pair code supports M = 1..4");
  int n = 2 * (m + 1);
  auto pair_z = [&](int i, int j) {
    return PauliOperator::single(n, i, 'Z') * PauliOperator::single(n, j, 'Z');
  };
  StabilizerCode code;
  code.group.n = n;
  code.group.generators.push_back(
      PauliOperator(n, (uint64_t(1) << n) - 1, 0, 0));  // X...X
  for (auto [i, j] : pair_code_pairing(m))
    code.group.generators.push_back(pair_z(i, j));
  for (int i = 1; i <= m; ++i) {
    int a = m + 3 - i, b = m + 2 + i;
    code.logical_x.push_back(PauliOperator::single(n, a, 'X') *
                             PauliOperator::single(n, b, 'X'));
    code.logical_z.push_back(pair_z(1, m + 2 + i));
  }
  code.name = "pair:" + std::to_string(m);
  validate_code(code);
  return code;
}

/// [7,3] linear amplitude damping code: Hamming parity checks as Z rows plus
/// an all-X generator.  Logical operators come from the deterministic
/// completion.
inline StabilizerCode hamming_73() {
  StabilizerCode code;
  code.group = {7, parse_paulis({"IIIZZZZ", "IZZIIZZ", "ZIZIZIZ", "XXXXXXX"})};
  std::tie(code.logical_x, code.logical_z) = complete_logicals(code.group);
  code.name = "hamming73";
  validate_code(code);
  return code;
}

/// Gottesman's generic [8,3] code.
inline StabilizerCode gottesman_83() {
  StabilizerCode code;
  code.group = {8, parse_paulis({"XXXXXXXX", "ZZZZZZZZ", "IXIXYZYZ",
                                 "IXZYIXZY", "IYXZXZIY"})};
  std::tie(code.logical_x, code.logical_z) = complete_logicals(code.group);
  code.name = "gottesman83";
  validate_code(code);
  return code;
}

/// [9,1] Shor code: Z pairs within each block of three, then the two
/// block-X generators.
inline StabilizerCode shor_91() {
  StabilizerCode code;
  code.group = {9, parse_paulis({"ZZIIIIIII", "IZZIIIIII", "IIIZZIIII",
                                 "IIIIZZIII", "IIIIIIZZI", "IIIIIIIZZ",
                                 "XXXXXXIII", "IIIXXXXXX"})};
  std::tie(code.logical_x, code.logical_z) = complete_logicals(code.group);
  code.name = "shor91";
  validate_code(code);
  return code;
}

struct ParityCheckMatrix {
  int n = 0;                          // columns
  std::vector<uint64_t> rows;         // bit i of a row = column i+1 (from the left)

  bool bit(int r, int c) const { return rows[r] >> (n - c) & 1; }
};

inline ParityCheckMatrix parity_check_from_strings(
    const std::vector<std::string>& lines) {
  ParityCheckMatrix h;
  for (const auto& line : lines) {
    std::string bits;
    for (char ch : line)
      if (ch == '0' || ch == '1') bits += ch;
    if (bits.empty()) continue;
    if (h.n == 0) h.n = static_cast<int>(bits.size());
    if (static_cast<int>(bits.size()) != h.n)
      throw std::invalid_argument("ragged parity check matrix");
    uint64_t row = 0;
    for (char ch : bits) row = (row << 1) | (ch == '1');
    h.rows.push_back(row);
  }
  if (h.n == 0 || h.rows.empty())
    throw std::invalid_argument("empty parity check matrix");
  if (h.n > 12) throw std::invalid_argument("parity check limited to n <= 12");
  return h;
}

/// Builds an [n, k-1] quantum code from the parity check matrix of a
/// single-error-correcting classical [n, k] code: each row becomes a Z
/// string and X^n is appended.  Rejects inputs where X^n would anticommute
/// (a row of odd weight), where column syndromes collide, or where no
/// encoded qubit would remain.
inline StabilizerCode from_parity_check(const ParityCheckMatrix& h) {
  int n = h.n;
  int r = static_cast<int>(h.rows.size());
  for (const auto& row : h.rows)
    if (std::popcount(row) % 2 != 0)
      throw std::invalid_argument(
          "odd-weight parity check row: the all-X generator would "
          "anticommute (classical code violates the even-parity premise)");
  for (int c = 1; c <= n; ++c) {
    uint64_t syn = 0;
    for (int i = 0; i < r; ++i) syn = (syn << 1) | h.bit(i, c);
    if (syn == 0)
      throw std::invalid_argument("zero column " + std::to_string(c) +
                                  ": classical code cannot correct 1 error");
    for (int c2 = 1; c2 < c; ++c2) {
      uint64_t syn2 = 0;
      for (int i = 0; i < r; ++i) syn2 = (syn2 << 1) | h.bit(i, c2);
      if (syn == syn2)
        throw std::invalid_argument(
            "repeated columns " + std::to_string(c2) + "," +
            std::to_string(c) + ": classical code cannot correct 1 error");
    }
  }
  StabilizerCode code;
  code.group.n = n;
  for (const auto& row : h.rows)
    code.group.generators.push_back(PauliOperator(n, 0, row, 0));
  code.group.generators.push_back(
      PauliOperator(n, (uint64_t(1) << n) - 1, 0, 0));
  if (symplectic_rank(code.group.generators) != r + 1)
    throw std::invalid_argument("parity check rows are dependent");
  if (n - (r + 1) < 1)
    throw std::invalid_argument(
        "construction yields an [" + std::to_string(n) +
        ",0] code with no encoded qubits");
  std::tie(code.logical_x, code.logical_z) = complete_logicals(code.group);
  code.name = "from-parity-check[" + std::to_string(n) + "," +
              std::to_string(n - r - 1) + "]";
  validate_code(code);
  return code;
}

struct StandardFormResult {
  StabilizerCode code;
  bool is_pair_family = false;
  bool changed = false;
  std::vector<int> permutation;  // permutation[i-1] = new position of qubit i
};

/// Reduces a pair-family code to the standard form by a qubit
/// permutation; other codes are returned unchanged with a flag.
inline StandardFormResult standard_form(const StabilizerCode& code) {
  validate_code(code);
  StandardFormResult res;
  res.code = code;
  int n = code.n();
  if (n % 2 != 0 ||
      static_cast<int>(code.group.generators.size()) != n / 2 + 1)
    return res;
  uint64_t full = (uint64_t(1) << n) - 1;
  std::vector<std::pair<int, int>> pairs;
  bool saw_all_x = false;
  for (const auto& g : code.group.generators) {
    if (g.phase_pow() != 0) return res;
    if (g.x_bits() == full && g.z_bits() == 0) {
      saw_all_x = true;
      continue;
    }
    if (g.x_bits() != 0 || std::popcount(g.z_bits()) != 2) return res;
    int a = 0, b = 0;
    for (int q = 1; q <= n; ++q)
      if (g.z_at(q)) (a == 0 ? a : b) = q;
    pairs.emplace_back(a, b);
  }
  if (!saw_all_x || static_cast<int>(pairs.size()) != n / 2) return res;
  std::set<int> covered;
  for (auto [a, b] : pairs) {
    covered.insert(a);
    covered.insert(b);
  }
  if (static_cast<int>(covered.size()) != n) return res;

  int m = n / 2 - 1;
  res.is_pair_family = true;
  std::sort(pairs.begin(), pairs.end());
  auto target = pair_code_pairing(m);
  res.permutation.assign(n, 0);
  for (size_t i = 0; i < pairs.size(); ++i) {
    res.permutation[pairs[i].first - 1] = target[i].first;
    res.permutation[pairs[i].second - 1] = target[i].second;
  }
  std::vector<int> ident(n);
  std::iota(ident.begin(), ident.end(), 1);
  res.changed = !std::equal(ident.begin(), ident.end(),
                            res.permutation.begin(),
                            [](int a, int b) { return a == b; });
  res.code = pair_code(m);
  std::string perm;
  for (int i = 0; i < n; ++i)
    perm += (i ? "," : "") + std::to_string(res.permutation[i]);
  res.code.name = code.name + " -> standard form (qubit map " + perm + ")";
  return res;
}

inline StabilizerCode code_by_name(const std::string& name) {
  if (name == "leung41") return leung_41();
  if (name.rfind("pair:", 0) == 0) {
    int m = std::stoi(name.substr(5));
    return pair_code(m);
  }
  if (name == "hamming73") return hamming_73();
  if (name == "gottesman83") return gottesman_83();
  if (name == "shor91") return shor_91();
  throw std::invalid_argument("unknown code '" + name +
                              "' (try: leung41, pair:1..pair:4, hamming73, "
                              "gottesman83, shor91)");
}

inline std::vector<std::string> code_catalog() {
  return {"leung41", "pair:1", "pair:2", "pair:3", "pair:4",
          "hamming73", "gottesman83", "shor91"};
}

}  // namespace adqec
