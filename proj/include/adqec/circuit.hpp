#pragma once

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adqec/codes.hpp"

namespace adqec {

struct Gate {
  enum class Kind { H, X, Z, CNOT, MeasureZ };
  Kind kind;
  int q = 0;       // target (1-based)
  int q2 = 0;      // CNOT target when kind == CNOT (q is the control)
  int cbit = 0;    // classical bit for MeasureZ
};

/// Gate list on data qubits 1..num_data_qubits followed by ancillas.
struct Circuit {
  int num_data_qubits = 0;
  int num_ancilla = 0;
  int num_cbits = 0;
  std::vector<Gate> gates;

  int total_qubits() const { return num_data_qubits + num_ancilla; }

  void check_qubit(int q) const {
    if (q < 1 || q > total_qubits())
      throw std::out_of_range("qubit index out of range");
  }
  void h(int q) { check_qubit(q); gates.push_back({Gate::Kind::H, q}); }
  void x(int q) { check_qubit(q); gates.push_back({Gate::Kind::X, q}); }
  void z(int q) { check_qubit(q); gates.push_back({Gate::Kind::Z, q}); }
  void cx(int c, int t) {
    check_qubit(c);
    check_qubit(t);
    if (c == t) throw std::invalid_argument("CNOT control equals target");
    gates.push_back({Gate::Kind::CNOT, c, t});
  }
  void measure(int q, int cbit) {
    check_qubit(q);
    if (cbit < 1 || cbit > num_cbits)
      throw std::out_of_range("classical bit out of range");
    gates.push_back({Gate::Kind::MeasureZ, q, 0, cbit});
  }

  int count(Gate::Kind k) const {
    int c = 0;
    for (const auto& g : gates) c += g.kind == k;
    return c;
  }
};

struct SimBranch {
  std::vector<int> bits;       // indexed by classical bit, 0 <-> +1 outcome
  Eigen::VectorXcd state;      // full register, ancillas collapsed
  double probability = 0.0;
};

namespace detail {

inline void apply_gate(const Gate& g, Eigen::VectorXcd& s, int total) {
  uint64_t dim = uint64_t(1) << total;
  uint64_t mq = uint64_t(1) << (total - g.q);
  switch (g.kind) {
    case Gate::Kind::H: {
      const double inv = 1.0 / std::sqrt(2.0);
      for (uint64_t i = 0; i < dim; ++i) {
        if (i & mq) continue;
        cxd a = s[i], b = s[i | mq];
        s[i] = inv * (a + b);
        s[i | mq] = inv * (a - b);
      }
      break;
    }
    case Gate::Kind::X:
      for (uint64_t i = 0; i < dim; ++i)
        if (!(i & mq)) std::swap(s[i], s[i | mq]);
      break;
    case Gate::Kind::Z:
      for (uint64_t i = 0; i < dim; ++i)
        if (i & mq) s[i] = -s[i];
      break;
    case Gate::Kind::CNOT: {
      uint64_t mt = uint64_t(1) << (total - g.q2);
      for (uint64_t i = 0; i < dim; ++i)
        if ((i & mq) && !(i & mt)) std::swap(s[i], s[i | mt]);
      break;
    }
    case Gate::Kind::MeasureZ:
      throw std::logic_error("measurement must branch");
  }
}

inline void simulate_rec(const Circuit& c, size_t gi, Eigen::VectorXcd state,
                         std::vector<int> bits, double prob,
                         std::vector<SimBranch>& out) {
  int total = c.total_qubits();
  for (size_t i = gi; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    if (g.kind != Gate::Kind::MeasureZ) {
      apply_gate(g, state, total);
      continue;
    }
    uint64_t mq = uint64_t(1) << (total - g.q);
    for (int outcome : {0, 1}) {
      Eigen::VectorXcd proj = state;
      for (uint64_t idx = 0; idx < static_cast<uint64_t>(proj.size()); ++idx)
        if (((idx & mq) != 0) != (outcome == 1)) proj[idx] = 0;
      double p = proj.squaredNorm();
      if (p < 1e-12) continue;
      proj /= std::sqrt(p);
      auto nb = bits;
      nb[g.cbit - 1] = outcome;
      simulate_rec(c, i + 1, std::move(proj), std::move(nb), prob * p, out);
    }
    return;
  }
  out.push_back({std::move(bits), std::move(state), prob});
}

}  // namespace detail

/// Exact statevector simulation.  The input covers the data qubits;
/// ancillas start in |0>.  Branches are enumerated depth-first with the +1
/// (bit 0) outcome explored first.
inline std::vector<SimBranch> simulate(const Circuit& c,
                                       const Eigen::VectorXcd& data_input) {
  int total = c.total_qubits();
  if (total > 12) throw std::invalid_argument("simulation limited to 12 qubits");
  if (data_input.size() != (Eigen::Index(1) << c.num_data_qubits))
    throw std::invalid_argument("input dimension mismatch");
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(Eigen::Index(1) << total);
  for (uint64_t i = 0; i < static_cast<uint64_t>(data_input.size()); ++i)
    full[i << c.num_ancilla] = data_input[i];
  std::vector<SimBranch> out;
  detail::simulate_rec(c, 0, std::move(full),
                       std::vector<int>(c.num_cbits, 0), 1.0, out);
  return out;
}

/// Dense unitary of a measurement-free circuit.
inline Eigen::MatrixXcd circuit_unitary(const Circuit& c) {
  int total = c.total_qubits();
  if (total > 12) throw std::invalid_argument("limited to 12 qubits");
  uint64_t dim = uint64_t(1) << total;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& g : c.gates) {
    if (g.kind == Gate::Kind::MeasureZ)
      throw std::invalid_argument("circuit_unitary: circuit measures");
    for (uint64_t col = 0; col < dim; ++col) {
      Eigen::VectorXcd v = u.col(col);
      detail::apply_gate(g, v, total);
      u.col(col) = v;
    }
  }
  return u;
}

/// Encoder for the [2(M+1),M] standard-form code: one CNOT per
/// data qubit into its partner, a Hadamard on qubit 1, then a CNOT fan-out
/// from qubit 1.  Data input sits on qubits M+3..2M+2.
inline Circuit build_encoding_circuit(int m) {
  if (m < 1 || m > 4) throw std::invalid_argument("M must be 1..4");
  int n = 2 * (m + 1);
  Circuit c;
  c.num_data_qubits = n;
  for (int j = 1; j <= m; ++j) c.cx(m + 2 + j, m + 3 - j);
  c.h(1);
  for (int t = 2; t <= n; ++t) c.cx(1, t);
  return c;
}

/// The encoder's action on the data block: column b is the encoding of the
/// logical basis state |b>.
inline Eigen::MatrixXcd encoder_isometry(int m) {
  Circuit c = build_encoding_circuit(m);
  Eigen::MatrixXcd u = circuit_unitary(c);
  return u.leftCols(Eigen::Index(1) << m);
}

/// Three-step damped-syndrome recovery: H on the lowest damped qubit, CNOT
/// fan-out from it, then X on every damped qubit.
inline Circuit build_recovery_circuit(int m, const std::vector<int>& damped) {
  if (m < 1 || m > 4) throw std::invalid_argument("M must be 1..4");
  int n = 2 * (m + 1);
  if (damped.empty()) throw std::invalid_argument("no damped qubits");
  auto pairing = pair_code_pairing(m);
  std::vector<int> pair_of(n + 1, 0);
  for (size_t p = 0; p < pairing.size(); ++p) {
    pair_of[pairing[p].first] = static_cast<int>(p) + 1;
    pair_of[pairing[p].second] = static_cast<int>(p) + 1;
  }
  std::vector<int> seen(pairing.size() + 1, 0);
  for (int q : damped) {
    if (q < 1 || q > n) throw std::out_of_range("damped qubit out of range");
    if (seen[pair_of[q]]++)
      throw std::invalid_argument(
          "two dampings on one Z-pair is not a recoverable circuit syndrome");
  }
  std::vector<int> d = damped;
  std::sort(d.begin(), d.end());
  Circuit c;
  c.num_data_qubits = n;
  int i1 = d.front();
  c.h(i1);
  for (int t = 1; t <= n; ++t)
    if (t != i1) c.cx(i1, t);
  for (int q : d) c.x(q);
  return c;
}

enum class SyndromeStage { z_pairs, no_damping_x, per_pair_z, hamming_bits };

inline SyndromeStage syndrome_stage_from_string(const std::string& s) {
  if (s == "z_pairs") return SyndromeStage::z_pairs;
  if (s == "no_damping_x") return SyndromeStage::no_damping_x;
  if (s == "per_pair_z") return SyndromeStage::per_pair_z;
  if (s == "hamming_bits") return SyndromeStage::hamming_bits;
  throw std::invalid_argument("unknown syndrome stage '" + s + "'");
}

namespace detail {

inline void add_parity_check(Circuit& c, const std::vector<int>& qubits,
                             int anc) {
  for (int q : qubits) c.cx(q, anc);
}

inline void add_x_check(Circuit& c, const std::vector<int>& qubits, int anc) {
  c.h(anc);
  for (int q : qubits) c.cx(anc, q);
  c.h(anc);
}

}  // namespace detail

/// Ancilla-coupled syndrome measurement circuits.  The measured ancilla bit
/// is 0 for a +1 outcome.  per_pair_z measures Z on the given qubit.
inline Circuit build_syndrome_circuit(const std::string& code_name,
                                      SyndromeStage stage, int qubit = 0) {
  auto zpair_circuit = [](int n, const std::vector<std::pair<int, int>>& prs) {
    Circuit c;
    c.num_data_qubits = n;
    c.num_ancilla = static_cast<int>(prs.size());
    c.num_cbits = c.num_ancilla;
    for (size_t p = 0; p < prs.size(); ++p)
      detail::add_parity_check(c, {prs[p].first, prs[p].second},
                               n + static_cast<int>(p) + 1);
    for (size_t p = 0; p < prs.size(); ++p)
      c.measure(n + static_cast<int>(p) + 1, static_cast<int>(p) + 1);
    return c;
  };
  auto x_circuit = [](int n, const std::vector<std::vector<int>>& checks) {
    Circuit c;
    c.num_data_qubits = n;
    c.num_ancilla = static_cast<int>(checks.size());
    c.num_cbits = c.num_ancilla;
    for (size_t i = 0; i < checks.size(); ++i)
      detail::add_x_check(c, checks[i], n + static_cast<int>(i) + 1);
    for (size_t i = 0; i < checks.size(); ++i)
      c.measure(n + static_cast<int>(i) + 1, static_cast<int>(i) + 1);
    return c;
  };
  auto single_z = [](int n, int q) {
    Circuit c;
    c.num_data_qubits = n;
    c.num_ancilla = 1;
    c.num_cbits = 1;
    c.cx(q, n + 1);
    c.measure(n + 1, 1);
    return c;
  };

  bool is_pair = code_name == "leung41" || code_name.rfind("pair:", 0) == 0;
  int n = 0;
  std::vector<std::pair<int, int>> prs;
  if (is_pair) {
    int m = code_name == "leung41" ? 1 : std::stoi(code_name.substr(5));
    n = 2 * (m + 1);
    prs = pair_code_pairing(m);
  } else if (code_name == "hamming73") {
    n = 7;
  } else if (code_name == "shor91") {
    n = 9;
    prs = {{1, 2}, {2, 3}, {4, 5}, {5, 6}, {7, 8}, {8, 9}};
  } else {
    throw std::invalid_argument("no syndrome circuit for code " + code_name);
  }

  switch (stage) {
    case SyndromeStage::z_pairs:
      if (prs.empty())
        throw std::invalid_argument("code has no Z-pair stabilizers");
      return zpair_circuit(n, prs);
    case SyndromeStage::per_pair_z:
      if (qubit < 1 || qubit > n)
        throw std::invalid_argument("per_pair_z needs a qubit index");
      return single_z(n, qubit);
    case SyndromeStage::no_damping_x: {
      std::vector<std::vector<int>> checks;
      if (code_name == "shor91")
        checks = {{1, 2, 3, 4, 5, 6}, {4, 5, 6, 7, 8, 9}};
      else {
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 1);
        checks = {all};
      }
      return x_circuit(n, checks);
    }
    case SyndromeStage::hamming_bits: {
      if (code_name != "hamming73")
        throw std::invalid_argument("hamming_bits applies to hamming73");
      Circuit c;
      c.num_data_qubits = 7;
      c.num_ancilla = 4;
      c.num_cbits = 4;
      const std::vector<std::vector<int>> rows = {
          {4, 5, 6, 7}, {2, 3, 6, 7}, {1, 3, 5, 7}};
      for (int j = 0; j < 3; ++j)
        detail::add_parity_check(c, rows[j], 8 + j);
      detail::add_x_check(c, {1, 2, 3, 4, 5, 6, 7}, 11);
      for (int j = 1; j <= 4; ++j) c.measure(7 + j, j);
      return c;
    }
  }
  throw std::logic_error("unreachable");
}

/// Line-per-gate text form with a one-line header; 1-based indices.
inline std::string emit_text(const Circuit& c) {
  std::ostringstream os;
  os << "qubits " << c.total_qubits() << " cbits " << c.num_cbits << "\n";
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case Gate::Kind::H: os << "h q[" << g.q << "]\n"; break;
      case Gate::Kind::X: os << "x q[" << g.q << "]\n"; break;
      case Gate::Kind::Z: os << "z q[" << g.q << "]\n"; break;
      case Gate::Kind::CNOT:
        os << "cx q[" << g.q << "],q[" << g.q2 << "]\n";
        break;
      case Gate::Kind::MeasureZ:
        os << "measure q[" << g.q << "] -> c[" << g.cbit << "]\n";
        break;
    }
  }
  return os.str();
}

inline Circuit parse_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  Circuit c;
  bool have_header = false;
  auto bracket = [](const std::string& tok, char reg) {
    size_t l = tok.find(reg + std::string("[")), r = tok.find(']', l);
    if (l == std::string::npos || r == std::string::npos)
      throw std::invalid_argument("bad operand: " + tok);
    return std::stoi(tok.substr(l + 2, r - l - 2));
  };
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string op;
    ls >> op;
    if (op == "qubits") {
      std::string cb;
      int nq = 0, ncb = 0;
      ls >> nq >> cb >> ncb;
      if (cb != "cbits") throw std::invalid_argument("bad header: " + line);
      c.num_data_qubits = nq;
      c.num_cbits = ncb;
      have_header = true;
    } else if (!have_header) {
      throw std::invalid_argument("missing circuit header");
    } else if (op == "h" || op == "x" || op == "z") {
      std::string t;
      ls >> t;
      int q = bracket(t, 'q');
      if (op == "h") c.h(q);
      else if (op == "x") c.x(q);
      else c.z(q);
    } else if (op == "cx") {
      std::string t;
      ls >> t;
      size_t comma = t.find(',');
      if (comma == std::string::npos)
        throw std::invalid_argument("bad cx line: " + line);
      c.cx(bracket(t.substr(0, comma), 'q'), bracket(t.substr(comma + 1), 'q'));
    } else if (op == "measure") {
      std::string t, arrow, cb;
      ls >> t >> arrow >> cb;
      if (arrow != "->") throw std::invalid_argument("bad measure: " + line);
      c.measure(bracket(t, 'q'), bracket(cb, 'c'));
    } else {
      throw std::invalid_argument("unknown op in line: " + line);
    }
  }
  if (!have_header) throw std::invalid_argument("missing circuit header");
  return c;
}

}  // namespace adqec
