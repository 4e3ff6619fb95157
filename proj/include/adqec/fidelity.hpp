#pragma once

#include <cstdio>
#include <functional>
#include <future>
#include <ostream>
#include <thread>

#include "adqec/recovery.hpp"

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include <json.hpp>
#endif

namespace adqec {

/// Default channel truncation: exact up to 8 qubits, order 5 above.
inline int default_truncation(int n) { return n <= 8 ? -1 : 5; }

/// Entanglement fidelity of encode -> damp -> recover at rho = I/2^k, plus
/// a rigorous upper bound on the truncation error.
inline std::pair<double, double> pipeline_fidelity(const StabilizerCode& code,
                                                   const RecoveryOperation& rec,
                                                   double gamma,
                                                   int truncation = -1) {
  if (rec.n != code.n() || rec.k != code.k())
    throw std::invalid_argument("recovery does not match code dimensions");
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("gamma must lie in [0,1]");
  auto res = composite_fidelity(codeword_matrix(code), rec.ops(), gamma,
                                truncation);
  return {res.fidelity, res.bound};
}

/// ((1 + sqrt(1-gamma))/2)^(2k): k unencoded qubits through the channel.
inline double baseline_unencoded(int k, double gamma) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  double f1 = (1.0 + std::sqrt(1.0 - gamma)) / 2.0;
  return std::pow(f1, 2.0 * k);
}

/// Partial fidelity per damping order; values sum to the total.
inline std::map<int, double> syndrome_contributions(const StabilizerCode& code,
                                                    const RecoveryOperation& rec,
                                                    double gamma,
                                                    int truncation = -1) {
  auto res = composite_fidelity(codeword_matrix(code), rec.ops(), gamma,
                                truncation);
  return res.contributions;
}

struct FidelityCurve {
  std::string code;
  std::string recovery_mode;
  int k = 1;
  int truncation_order = -1;  // -1: untruncated
  std::vector<double> gammas, fidelity, normalized, bounds;
};

inline std::vector<double> gamma_grid(double lo, double hi, int steps,
                                      bool log_spaced = false) {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (lo < 0.0 || hi > 1.0 || lo > hi)
    throw std::invalid_argument("gamma range must lie in [0,1]");
  if (log_spaced && lo <= 0.0)
    throw std::invalid_argument("log grid needs gamma > 0");
  std::vector<double> g(steps);
  for (int i = 0; i < steps; ++i) {
    double t = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
    g[i] = log_spaced ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo);
  }
  return g;
}

/// Evaluates a curve over the grid; gamma-dependent recoveries are rebuilt
/// per point.  Points are independent and evaluated in parallel with
/// deterministic output ordering.
inline FidelityCurve sweep(
    const StabilizerCode& code, const std::string& mode_label,
    const std::function<RecoveryOperation(double)>& recovery_factory,
    const std::vector<double>& gammas, int truncation = -1) {
  FidelityCurve curve;
  curve.code = code.name;
  curve.recovery_mode = mode_label;
  curve.k = code.k();
  curve.truncation_order = truncation;
  curve.gammas = gammas;
  curve.fidelity.resize(gammas.size());
  curve.normalized.resize(gammas.size());
  curve.bounds.resize(gammas.size());

  Eigen::MatrixXcd v = codeword_matrix(code);
  auto eval = [&](size_t i) {
    RecoveryOperation rec = recovery_factory(gammas[i]);
    auto res = composite_fidelity(v, rec.ops(), gammas[i], truncation);
    curve.fidelity[i] = res.fidelity;
    curve.normalized[i] = std::pow(res.fidelity, 1.0 / curve.k);
    curve.bounds[i] = res.bound;
  };

  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  size_t workers = std::min<size_t>(hw, gammas.size());
  if (workers <= 1) {
    for (size_t i = 0; i < gammas.size(); ++i) eval(i);
  } else {
    std::vector<std::future<void>> futs;
    for (size_t w = 0; w < workers; ++w)
      futs.push_back(std::async(std::launch::async, [&, w] {
        for (size_t i = w; i < gammas.size(); i += workers) eval(i);
      }));
    for (auto& f : futs) f.get();
  }
  return curve;
}

/// %.12g: shortest fixed formatting that round-trips at 12 significant
/// digits; keeps golden CSV files byte-stable.
inline std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_curves_csv(std::ostream& os,
                             const std::vector<FidelityCurve>& curves) {
  os << "gamma,code,recovery_mode,k,fidelity,normalized_fidelity,"
        "truncation_order,truncation_bound\n";
  size_t rows = 0;
  for (const auto& c : curves) rows = std::max(rows, c.gammas.size());
  for (size_t i = 0; i < rows; ++i)
    for (const auto& c : curves) {
      if (i >= c.gammas.size()) continue;
      os << fmt12(c.gammas[i]) << ',' << c.code << ',' << c.recovery_mode
         << ',' << c.k << ',' << fmt12(c.fidelity[i]) << ','
         << fmt12(c.normalized[i]) << ','
         << (c.truncation_order < 0 ? std::string("none")
                                    : std::to_string(c.truncation_order))
         << ',' << fmt12(c.bounds[i]) << '\n';
    }
}

inline nlohmann::json curves_to_json(const std::vector<FidelityCurve>& curves) {
  nlohmann::json rows = nlohmann::json::array();
  size_t count = 0;
  for (const auto& c : curves) count = std::max(count, c.gammas.size());
  for (size_t i = 0; i < count; ++i)
    for (const auto& c : curves) {
      if (i >= c.gammas.size()) continue;
      nlohmann::json row{{"gamma", c.gammas[i]},
                         {"code", c.code},
                         {"recovery_mode", c.recovery_mode},
                         {"k", c.k},
                         {"fidelity", c.fidelity[i]},
                         {"normalized_fidelity", c.normalized[i]},
                         {"truncation_bound", c.bounds[i]}};
      if (c.truncation_order < 0) row["truncation_order"] = "none";
      else row["truncation_order"] = c.truncation_order;
      rows.push_back(row);
    }
  return rows;
}

/// Recovery selector shared by the CLI and tests.  Mode spellings:
///   leung41: projection | perturbed | sweep
///   pair:M, hamming73: projection | perturbed
///   shor91: stabilizer | gamma-dependent
///   gottesman83: generic | adapted
inline RecoveryOperation recovery_by_name(const std::string& code,
                                          const std::string& mode,
                                          std::optional<double> gamma = {}) {
  auto bad_mode = [&]() {
    return std::invalid_argument("unknown recovery mode '" + mode +
                                 "' for code " + code);
  };
  if (code == "leung41") {
    if (mode == "projection") return leung41_recovery(RecoveryMode::projection);
    if (mode == "perturbed")
      return leung41_recovery(RecoveryMode::perturbed, gamma);
    if (mode == "sweep" || mode == "sweep_optimized")
      return leung41_recovery(RecoveryMode::sweep_optimized, gamma);
    throw bad_mode();
  }
  if (code.rfind("pair:", 0) == 0) {
    int m = std::stoi(code.substr(5));
    if (mode == "projection")
      return pair_code_recovery(m, RecoveryMode::projection);
    if (mode == "perturbed")
      return pair_code_recovery(m, RecoveryMode::perturbed, gamma);
    throw bad_mode();
  }
  if (code == "hamming73") {
    if (mode == "projection")
      return hamming73_recovery(RecoveryMode::projection);
    if (mode == "perturbed")
      return hamming73_recovery(RecoveryMode::perturbed, gamma);
    throw bad_mode();
  }
  if (code == "shor91") {
    if (mode == "stabilizer")
      return shor_recovery(RecoveryMode::adapted_stabilizer);
    if (mode == "gamma-dependent" || mode == "gamma_dependent")
      return shor_recovery(RecoveryMode::perturbed, gamma);
    throw bad_mode();
  }
  if (code == "gottesman83") {
    if (mode == "generic") return generic_stabilizer_recovery(gottesman_83(), false);
    if (mode == "adapted") return generic_stabilizer_recovery(gottesman_83(), true);
    throw bad_mode();
  }
  throw std::invalid_argument("unknown code '" + code + "'");
}

inline std::string default_recovery_mode(const std::string& code) {
  if (code == "shor91") return "stabilizer";
  if (code == "gottesman83") return "adapted";
  return "projection";
}

/// True when rebuilding per gamma changes the recovery.
inline bool mode_is_gamma_dependent(const std::string& mode) {
  return mode == "perturbed" || mode == "sweep" || mode == "sweep_optimized" ||
         mode == "gamma-dependent" || mode == "gamma_dependent";
}

}  // namespace adqec
