// Command-line front end: code catalog, Knill-Laflamme checks,
// damped-subspace inspection, fidelity sweeps, syndrome-contribution
// breakdowns, recovery tables and circuit emission.

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "adqec/circuit.hpp"
#include "adqec/fidelity.hpp"

using namespace adqec;

namespace {

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stoi(tok));
  return out;
}

std::vector<std::string> parse_str_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

void print_code(std::ostream& os, const StabilizerCode& code) {
  os << code.name << "  [" << code.n() << "," << code.k() << "]\n";
  os << "stabilizers:\n";
  for (const auto& g : code.group.generators) os << "  " << g.str() << "\n";
  os << "logical operators:\n";
  for (size_t i = 0; i < code.logical_x.size(); ++i)
    os << "  X" << i + 1 << " = " << code.logical_x[i].str() << "\n";
  for (size_t i = 0; i < code.logical_z.size(); ++i)
    os << "  Z" << i + 1 << " = " << code.logical_z[i].str() << "\n";
}

int parse_truncation(const std::string& s, int n) {
  if (s.empty()) return default_truncation(n);
  if (s == "none") return -1;
  int t = std::stoi(s);
  if (t < 0) throw std::invalid_argument("truncation order must be >= 0");
  return t;
}

struct CurveRequest {
  std::string code;
  std::string mode;
  double gmin = 0.0, gmax = 0.3;
  int steps = 31;
  bool log_grid = false;
  std::string truncate;
};

FidelityCurve run_curve(const CurveRequest& req) {
  StabilizerCode code = code_by_name(req.code);
  auto grid = gamma_grid(req.gmin, req.gmax, req.steps, req.log_grid);
  int trunc = parse_truncation(req.truncate, code.n());
  if (mode_is_gamma_dependent(req.mode)) {
    recovery_by_name(req.code, req.mode, grid.front());  // reject bad modes now
    return sweep(code, req.mode,
                 [&](double g) { return recovery_by_name(req.code, req.mode, g); },
                 grid, trunc);
  }
  RecoveryOperation rec = recovery_by_name(req.code, req.mode);
  return sweep(code, req.mode, [&](double) { return rec; }, grid, trunc);
}

void write_output(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + out);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"channel-adapted amplitude damping codes"};
  app.require_subcommand(1);

  // codes -------------------------------------------------------------
  auto* codes = app.add_subcommand("codes", "code catalog");
  codes->require_subcommand(1);
  codes->add_subcommand("list", "list built-in codes");
  std::string show_name;
  auto* codes_show = codes->add_subcommand("show", "print a stabilizer table");
  codes_show->add_option("name", show_name)->required();
  std::string pcm_path;
  auto* codes_pcm = codes->add_subcommand(
      "from-parity-check", "build a code from a 0/1 parity check matrix file");
  codes_pcm->add_option("--file", pcm_path)->required();

  // kl-check ----------------------------------------------------------
  auto* kl = app.add_subcommand("kl-check",
                                "Knill-Laflamme check for damping products");
  std::string kl_code, kl_errors = "dampings:1";
  double kl_gamma = 0.1, kl_tol = 1e-9;
  kl->add_option("--code", kl_code)->required();
  kl->add_option("--errors", kl_errors, "dampings:ORDER");
  kl->add_option("--gamma", kl_gamma);
  kl->add_option("--tol", kl_tol);

  // damped-subspace -----------------------------------------------------
  auto* ds = app.add_subcommand("damped-subspace",
                                "stabilizer of a damped subspace");
  std::string ds_code, ds_qubits;
  ds->add_option("--code", ds_code)->required();
  ds->add_option("--qubits", ds_qubits, "comma-separated, 1-based")->required();

  // recovery ------------------------------------------------------------
  auto* rshow = app.add_subcommand("recovery", "recovery operations");
  rshow->require_subcommand(1);
  auto* rshow_show = rshow->add_subcommand("show", "print the syndrome table");
  std::string r_code, r_mode;
  double r_gamma = -1.0;
  rshow_show->add_option("--code", r_code)->required();
  rshow_show->add_option("--mode", r_mode)->required();
  rshow_show->add_option("--gamma", r_gamma);

  // fidelity ------------------------------------------------------------
  auto* fid = app.add_subcommand("fidelity", "entanglement-fidelity sweep");
  CurveRequest freq;
  std::string f_out, f_json;
  fid->add_option("--code", freq.code)->required();
  fid->add_option("--recovery", freq.mode)->required();
  fid->add_option("--gamma-min", freq.gmin)->required();
  fid->add_option("--gamma-max", freq.gmax)->required();
  fid->add_option("--steps", freq.steps)->required();
  fid->add_flag("--log", freq.log_grid, "log-spaced gamma grid");
  fid->add_option("--truncate", freq.truncate, "damping order cap or 'none'");
  fid->add_option("--out", f_out, "CSV path (default stdout)");
  fid->add_option("--json", f_json, "also write a JSON mirror");

  // contributions ---------------------------------------------------------
  auto* contrib = app.add_subcommand("contributions",
                                     "per-order fidelity contributions");
  std::string c_code, c_mode, c_trunc, c_json;
  double c_gamma = 0.1;
  contrib->add_option("--code", c_code)->required();
  contrib->add_option("--recovery", c_mode)->required();
  contrib->add_option("--gamma", c_gamma)->required();
  contrib->add_option("--truncate", c_trunc);
  contrib->add_option("--json", c_json);

  // emit-circuit ------------------------------------------------------------
  auto* emit = app.add_subcommand("emit-circuit", "emit a circuit as text");
  std::string e_code, e_kind, e_damped, e_out;
  int e_qubit = 0;
  emit->add_option("--code", e_code)->required();
  emit->add_option("--kind", e_kind,
                   "encode | recovery | syndrome:z_pairs | "
                   "syndrome:no_damping_x | syndrome:per_pair_z | "
                   "syndrome:hamming_bits")
      ->required();
  emit->add_option("--damped", e_damped, "for recovery circuits");
  emit->add_option("--qubit", e_qubit, "for syndrome:per_pair_z");
  emit->add_option("--out", e_out);

  // compare -------------------------------------------------------------
  auto* cmp = app.add_subcommand("compare", "sweep several codes side by side");
  std::string m_codes, m_trunc, m_out, m_json;
  double m_gmin = 0.01, m_gmax = 0.3;
  int m_steps = 30;
  bool m_norm = false;
  cmp->add_option("--codes", m_codes)->required();
  cmp->add_option("--gamma-min", m_gmin);
  cmp->add_option("--gamma-max", m_gmax);
  cmp->add_option("--steps", m_steps);
  cmp->add_flag("--normalize", m_norm,
                "per-qubit comparison (normalized column is always emitted)");
  cmp->add_option("--truncate", m_trunc);
  cmp->add_option("--out", m_out);
  cmp->add_option("--json", m_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (codes->parsed()) {
      if (codes->get_subcommand("list")->parsed()) {
        for (const auto& name : code_catalog()) {
          StabilizerCode c = code_by_name(name);
          std::cout << name << "  [" << c.n() << "," << c.k() << "]\n";
        }
      } else if (codes_show->parsed()) {
        print_code(std::cout, code_by_name(show_name));
      } else if (codes_pcm->parsed()) {
        std::ifstream f(pcm_path);
        if (!f) throw std::runtime_error("cannot read " + pcm_path);
        std::vector<std::string> lines;
        std::string line;
        while (std::getline(f, line)) lines.push_back(line);
        StabilizerCode c = from_parity_check(parity_check_from_strings(lines));
        print_code(std::cout, c);
      }
      return 0;
    }

    if (kl->parsed()) {
      if (kl_errors.rfind("dampings:", 0) != 0)
        throw std::invalid_argument("--errors must be dampings:ORDER");
      int order = std::stoi(kl_errors.substr(9));
      StabilizerCode code = code_by_name(kl_code);
      int n = code.n();
      Eigen::MatrixXcd v = codeword_matrix(code);
      std::vector<Eigen::MatrixXcd> images;
      for (uint64_t mask = 0; mask < (uint64_t(1) << n); ++mask) {
        int w = std::popcount(mask);
        if (w > order) continue;
        images.push_back(damping_product_apply(
            n, mask, v, std::pow(std::sqrt(kl_gamma), w)));
      }
      KLReport rep = kl_from_images(images, kl_tol);
      std::cout << "code: " << kl_code << "\nerrors: damping products up to order "
                << order << " at gamma=" << fmt12(kl_gamma) << " ("
                << images.size() << " operators)\n"
                << "correctable: " << (rep.correctable ? "true" : "false")
                << "\nmax_violation: " << fmt12(rep.max_violation) << "\n";
      return 0;
    }

    if (ds->parsed()) {
      StabilizerCode code = code_by_name(ds_code);
      auto qubits = parse_int_list(ds_qubits);
      if (qubits.empty()) throw std::invalid_argument("no qubits given");
      StabilizerGroup g;
      if (ds_code == "shor91") {
        g = shor_damped_presentation(
            std::set<int>(qubits.begin(), qubits.end()));
      } else {
        g = code.group;
        for (int q : qubits) g = damped_subspace(g, q);
      }
      for (const auto& gen : g.generators) std::cout << gen.str() << "\n";
      return 0;
    }

    if (rshow->parsed()) {
      std::optional<double> g;
      if (r_gamma >= 0) g = r_gamma;
      RecoveryOperation rec = recovery_by_name(r_code, r_mode, g);
      std::cout << "code: " << r_code << "  mode: " << mode_name(rec.mode);
      if (rec.gamma) std::cout << "  gamma: " << fmt12(*rec.gamma);
      std::cout << "\nelements: " << rec.elements.size() << "\n";
      for (const auto& el : rec.elements) {
        std::cout << el.label << "  (residual dim " << el.residual_dim << ")\n";
        for (const auto& [gen, sign] : el.measured)
          std::cout << "    " << (sign > 0 ? "+1 " : "-1 ") << gen.str()
                    << "\n";
      }
      std::cout << "completeness deficit: " << fmt12(rec.completeness_deficit())
                << "\n";
      return 0;
    }

    if (fid->parsed()) {
      FidelityCurve curve = run_curve(freq);
      std::ostringstream os;
      write_curves_csv(os, {curve});
      write_output(f_out, os.str());
      if (!f_json.empty())
        write_output(f_json, curves_to_json({curve}).dump(2) + "\n");
      return 0;
    }

    if (contrib->parsed()) {
      StabilizerCode code = code_by_name(c_code);
      int trunc = parse_truncation(c_trunc, code.n());
      std::optional<double> g;
      if (mode_is_gamma_dependent(c_mode)) g = c_gamma;
      RecoveryOperation rec = recovery_by_name(c_code, c_mode, g);
      auto parts = syndrome_contributions(code, rec, c_gamma, trunc);
      double total = 0.0;
      for (const auto& [order, val] : parts) total += val;
      std::cout << "order,contribution\n";
      for (const auto& [order, val] : parts)
        std::cout << order << "," << fmt12(val) << "\n";
      std::cout << "total," << fmt12(total) << "\n";
      if (!c_json.empty()) {
        nlohmann::json j{{"gamma", c_gamma},
                         {"code", c_code},
                         {"recovery_mode", c_mode},
                         {"k", code.k()},
                         {"fidelity", total}};
        for (const auto& [order, val] : parts)
          j["contributions"][std::to_string(order)] = val;
        write_output(c_json, j.dump(2) + "\n");
      }
      return 0;
    }

    if (emit->parsed()) {
      Circuit c;
      if (e_kind == "encode") {
        if (e_code == "leung41") c = build_encoding_circuit(1);
        else if (e_code.rfind("pair:", 0) == 0)
          c = build_encoding_circuit(std::stoi(e_code.substr(5)));
        else
          throw std::invalid_argument("encode circuits exist for pair codes");
      } else if (e_kind == "recovery") {
        int m;
        if (e_code == "leung41") m = 1;
        else if (e_code.rfind("pair:", 0) == 0) m = std::stoi(e_code.substr(5));
        else throw std::invalid_argument("recovery circuits exist for pair codes");
        c = build_recovery_circuit(m, parse_int_list(e_damped));
      } else if (e_kind.rfind("syndrome:", 0) == 0) {
        c = build_syndrome_circuit(
            e_code, syndrome_stage_from_string(e_kind.substr(9)), e_qubit);
      } else {
        throw std::invalid_argument("unknown --kind " + e_kind);
      }
      write_output(e_out, emit_text(c));
      return 0;
    }

    if (cmp->parsed()) {
      std::vector<FidelityCurve> curves;
      for (const auto& name : parse_str_list(m_codes)) {
        CurveRequest req;
        req.code = name;
        req.mode = default_recovery_mode(name);
        req.gmin = m_gmin;
        req.gmax = m_gmax;
        req.steps = m_steps;
        req.truncate = m_trunc;
        curves.push_back(run_curve(req));
      }
      (void)m_norm;  // normalized_fidelity is always part of the schema
      std::ostringstream os;
      write_curves_csv(os, curves);
      write_output(m_out, os.str());
      if (!m_json.empty())
        write_output(m_json, curves_to_json(curves).dump(2) + "\n");
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "computation failed: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
