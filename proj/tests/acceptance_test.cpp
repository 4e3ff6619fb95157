// Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

#include <gtest/gtest.h>

#include <chrono>

#include "adqec/circuit.hpp"
#include "adqec/fidelity.hpp"
#include "oracles.hpp"

using namespace adqec;

namespace {

void report(int idx, const std::string& name) {
  printf("ACCEPTANCE %d (%s): %s\n", idx, name.c_str(),
         ::testing::Test::HasFailure() ? "FAIL" : "PASS");
}

std::vector<std::string> strs(const StabilizerGroup& g) {
  std::vector<std::string> out;
  for (const auto& gen : g.generators) out.push_back(gen.str());
  return out;
}

TEST(Acceptance, C1_KnillLaflammeExactness) {
  for (double gamma : {0.05, 0.1, 0.3}) {
    for (const auto& name :
         {"leung41", "pair:2", "pair:3", "pair:4", "hamming73"}) {
      StabilizerCode code = code_by_name(name);
      int n = code.n();
      Eigen::MatrixXcd v = codeword_matrix(code);
      std::vector<Eigen::MatrixXcd> images{v};
      for (int q = 1; q <= n; ++q)
        images.push_back(damping_product_apply(n, uint64_t(1) << (n - q), v,
                                               std::sqrt(gamma)));
      KLReport rep = kl_from_images(images, 1e-9);
      EXPECT_TRUE(rep.correctable) << name << " gamma=" << gamma;
      EXPECT_LT(rep.max_violation, 1e-9) << name << " gamma=" << gamma;
    }
    // Shor code: all damping products up to order 2.
    StabilizerCode shor = shor_91();
    Eigen::MatrixXcd v = codeword_matrix(shor);
    std::vector<Eigen::MatrixXcd> images;
    for (uint64_t mask = 0; mask < (1u << 9); ++mask) {
      int w = std::popcount(mask);
      if (w > 2) continue;
      images.push_back(
          damping_product_apply(9, mask, v, std::pow(std::sqrt(gamma), w)));
    }
    KLReport rep = kl_from_images(images, 1e-9);
    EXPECT_TRUE(rep.correctable) << "shor91 gamma=" << gamma;
    EXPECT_LT(rep.max_violation, 1e-9);
  }
  report(1, "Knill-Laflamme exactness");
}

TEST(Acceptance, C2_DampedSubspaceOracle) {
  for (const auto& name : code_catalog()) {
    StabilizerCode code = code_by_name(name);
    Eigen::MatrixXcd v = codeword_matrix(code);
    for (int q = 1; q <= code.n(); ++q) {
      StabilizerGroup dg = damped_subspace(code.group, q);
      Eigen::MatrixXcd derived = projector(dg);
      Eigen::MatrixXcd oracle_proj = oracle::column_space_projector(
          oracle::damping_rep(code.n(), q) * v);
      EXPECT_LT((derived - oracle_proj).norm(), 1e-10)
          << name << " qubit " << q;
    }
  }
  // Single-damping generator lists of the [4,1] code, verbatim.
  StabilizerGroup g41 = leung_41().group;
  EXPECT_EQ(strs(damped_subspace(g41, 1)),
            (std::vector<std::string>{"-ZZII", "IIZZ", "ZIII"}));
  EXPECT_EQ(strs(damped_subspace(g41, 2)),
            (std::vector<std::string>{"-ZZII", "IIZZ", "IZII"}));
  EXPECT_EQ(strs(damped_subspace(g41, 3)),
            (std::vector<std::string>{"ZZII", "-IIZZ", "IIZI"}));
  EXPECT_EQ(strs(damped_subspace(g41, 4)),
            (std::vector<std::string>{"ZZII", "-IIZZ", "IIIZ"}));

  // Three Shor damped-subspace presentations, verbatim and vs the oracle.
  const std::vector<std::pair<std::set<int>, std::vector<std::string>>> cases{
      {{1},
       {"-ZZIIIIIII", "IZZIIIIII", "IIIZZIIII", "IIIIZZIII", "IIIIIIZZI",
        "IIIIIIIZZ", "IIIXXXXXX", "ZIIIIIIII"}},
      {{2, 3},
       {"-ZZIIIIIII", "IZZIIIIII", "IIIZZIIII", "IIIIZZIII", "IIIIIIZZI",
        "IIIIIIIZZ", "IIIXXXXXX", "-ZIIIIIIII"}},
      {{1, 7},
       {"-ZZIIIIIII", "IZZIIIIII", "IIIZZIIII", "IIIIZZIII", "-IIIIIIZZI",
        "IIIIIIIZZ", "ZIIIIIIII", "IIIIIIZII"}},
  };
  Eigen::MatrixXcd vshor = codeword_matrix(shor_91());
  for (const auto& [damped, want] : cases) {
    StabilizerGroup pres = shor_damped_presentation(damped);
    EXPECT_EQ(strs(pres), want);
    Eigen::MatrixXcd img = vshor;
    for (int q : damped) img = oracle::damping_rep(9, q) * img;
    EXPECT_LT((projector(pres) - oracle::column_space_projector(img)).norm(),
              1e-10);
  }
  report(2, "damped-subspace oracle equivalence, tables verbatim");
}

TEST(Acceptance, C3_CircuitAlgebraConsistency) {
  for (int m = 1; m <= 4; ++m) {
    Circuit enc = build_encoding_circuit(m);
    EXPECT_EQ(enc.count(Gate::Kind::CNOT), 3 * m + 1);
    EXPECT_EQ(enc.count(Gate::Kind::H), 1);
    Eigen::MatrixXcd v_circ = encoder_isometry(m);
    Eigen::MatrixXcd v_code = codeword_matrix(pair_code(m));
    for (int b = 0; b < v_code.cols(); ++b) {
      cxd phase = v_code.col(b).dot(v_circ.col(b));
      double overlap = std::abs(phase);
      EXPECT_NEAR(overlap, 1.0, 1e-10) << m;
      EXPECT_LT((v_circ.col(b) - phase * v_code.col(b)).norm(), 1e-10) << m;
    }
  }
  // The two-damping recovery circuit equals the matrix element on its
  // syndrome subspace.
  StabilizerCode code = pair_code(2);
  Eigen::MatrixXcd v = codeword_matrix(code);
  RecoveryOperation rec = pair_code_recovery(2, RecoveryMode::projection);
  StabilizerGroup dg = damped_subspace(damped_subspace(code.group, 1), 5);
  Eigen::MatrixXcd pd = projector(dg);
  Eigen::MatrixXcd u = circuit_unitary(build_recovery_circuit(2, {1, 5}));
  const RecoveryElement* el = nullptr;
  for (const auto& e : rec.elements)
    if (e.label == "damped{1,5}") el = &e;
  ASSERT_NE(el, nullptr);
  EXPECT_LT((u * pd - v * Eigen::MatrixXcd(el->op) * pd).cwiseAbs().maxCoeff(),
            1e-10);
  report(3, "encoder isometries, gate census, recovery circuit");
}

TEST(Acceptance, C4_FiveCaseCorrectness) {
  for (int m = 1; m <= 4; ++m) {
    StabilizerCode code = pair_code(m);
    int n = code.n();
    Eigen::MatrixXcd v = codeword_matrix(code);
    RecoveryOperation rec = pair_code_recovery(m, RecoveryMode::projection);
    int damped_sets = 0;
    for (const auto& el : rec.elements) {
      if (el.damped.empty()) continue;
      ++damped_sets;
      uint64_t mask = 0;
      for (int q : el.damped) mask |= uint64_t(1) << (n - q);
      Eigen::MatrixXcd comp =
          Eigen::MatrixXcd(el.op) * damping_product_apply(n, mask, v);
      int mcount = static_cast<int>(el.damped.size());
      // Surviving logical projector and the scalar multiple.
      Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(1 << m, 1 << m);
      int surv = 0;
      for (int b = 0; b < (1 << m); ++b)
        if (std::abs(comp(b, b)) > 1e-9) {
          p(b, b) = 1.0;
          ++surv;
        }
      ASSERT_GT(surv, 0) << el.label;
      cxd c = comp.trace() / static_cast<double>(surv);
      EXPECT_LT((comp - c * p).cwiseAbs().maxCoeff(), 1e-10)
          << "M=" << m << " " << el.label;
      EXPECT_EQ(surv, 1 << (m + 1 - mcount)) << "M=" << m << " " << el.label;
      // All logical-Z expectations are preserved on the surviving subspace.
      for (int i = 0; i < m; ++i) {
        Eigen::MatrixXcd zi = Eigen::MatrixXcd::Zero(1 << m, 1 << m);
        for (int b = 0; b < (1 << m); ++b)
          zi(b, b) = (b >> (m - 1 - i)) & 1 ? -1.0 : 1.0;
        EXPECT_LT((comp * zi - zi * comp).cwiseAbs().maxCoeff(), 1e-10);
      }
    }
    EXPECT_EQ(damped_sets, static_cast<int>(std::pow(3, m + 1)) - 1);
  }
  report(4, "five-case syndrome recovery correctness");
}

TEST(Acceptance, C5_DistortionFormula) {
  StabilizerCode code = leung_41();
  Eigen::MatrixXcd v = codeword_matrix(code);
  RecoveryOperation rec = leung41_recovery(RecoveryMode::projection);
  for (double gamma : {0.1, 0.25}) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd(rec.elements[0].op) *
                         DampingKraus(4, 0, gamma).to_dense() * v;
    EXPECT_LT(std::abs(m(0, 0) - (1.0 - gamma + gamma * gamma / 2.0)), 1e-12);
    EXPECT_LT(std::abs(m(1, 1) - (1.0 - gamma)), 1e-12);
    EXPECT_LT(std::abs(m(0, 1)) + std::abs(m(1, 0)), 1e-12);
  }
  report(5, "no-damping distortion amplitudes");
}

TEST(Acceptance, C6_ScalingExponents) {
  auto grid = gamma_grid(1e-3, 1e-2, 8, true);
  auto slope_for = [&](const std::string& code_name, const std::string& mode) {
    StabilizerCode code = code_by_name(code_name);
    RecoveryOperation rec = recovery_by_name(code_name, mode);
    std::vector<double> loss;
    for (double g : grid)
      loss.push_back(1.0 - pipeline_fidelity(code, rec, g).first);
    return oracle::loglog_slope(grid, loss);
  };
  EXPECT_NEAR(slope_for("leung41", "projection"), 2.0, 0.15);
  EXPECT_NEAR(slope_for("pair:2", "projection"), 2.0, 0.15);
  EXPECT_NEAR(slope_for("hamming73", "projection"), 2.0, 0.15);
  EXPECT_NEAR(slope_for("shor91", "stabilizer"), 3.0, 0.2);
  std::vector<double> bl;
  for (double g : grid) bl.push_back(1.0 - baseline_unencoded(1, g));
  EXPECT_NEAR(oracle::loglog_slope(grid, bl), 1.0, 0.1);
  report(6, "loss scaling exponents");
}

TEST(Acceptance, C7_FigureShapeOrderings) {
  auto grid = gamma_grid(0.01, 0.3, 30);

  // [4,1]: sweep >= perturbed >= projection at every grid point.
  StabilizerCode l41 = leung_41();
  RecoveryOperation proj41 = leung41_recovery(RecoveryMode::projection);
  for (double g : grid) {
    double fp = pipeline_fidelity(l41, proj41, g).first;
    double fpert = pipeline_fidelity(
        l41, leung41_recovery(RecoveryMode::perturbed, g), g).first;
    double fs = pipeline_fidelity(
        l41, leung41_recovery(RecoveryMode::sweep_optimized, g), g).first;
    EXPECT_GE(fs, fpert - 1e-12) << g;
    EXPECT_GE(fpert, fp - 1e-12) << g;
  }

  // [7,3] stays above the [8,3] pair code.
  StabilizerCode h73 = hamming_73();
  StabilizerCode p83 = pair_code(3);
  RecoveryOperation rh = hamming73_recovery(RecoveryMode::projection);
  RecoveryOperation rp = pair_code_recovery(3, RecoveryMode::projection);
  for (double g : grid)
    EXPECT_GE(pipeline_fidelity(h73, rh, g).first,
              pipeline_fidelity(p83, rp, g).first - 1e-12)
        << g;

  // Gottesman adapted above non-adapted.
  StabilizerCode gott = gottesman_83();
  RecoveryOperation ga = generic_stabilizer_recovery(gott, true);
  RecoveryOperation gn = generic_stabilizer_recovery(gott, false);
  for (double g : grid)
    EXPECT_GE(pipeline_fidelity(gott, ga, g).first,
              pipeline_fidelity(gott, gn, g).first - 1e-12)
        << g;

  // Shor gamma-dependent strictly above the stabilizer recovery
  // for gamma >= 0.05.
  StabilizerCode shor = shor_91();
  RecoveryOperation rs = shor_recovery(RecoveryMode::adapted_stabilizer);
  for (double g : grid) {
    double fs = pipeline_fidelity(shor, rs, g).first;
    double fg = pipeline_fidelity(
        shor, shor_recovery(RecoveryMode::perturbed, g), g).first;
    EXPECT_GE(fg, fs - 1e-12) << g;
    if (g >= 0.05) { EXPECT_GT(fg, fs) << g; }
  }

  // Every adapted code beats k unencoded qubits up to gamma = 0.2.
  for (const auto& name :
       {"leung41", "pair:2", "pair:3", "pair:4", "hamming73"}) {
    StabilizerCode code = code_by_name(name);
    RecoveryOperation rec = recovery_by_name(name, "projection");
    int trunc = default_truncation(code.n());
    for (double g : grid) {
      if (g > 0.2 + 1e-12) break;
      EXPECT_GE(pipeline_fidelity(code, rec, g, trunc).first,
                baseline_unencoded(code.k(), g) - 1e-12)
          << name << " " << g;
    }
  }
  report(7, "curve orderings across recoveries and codes");
}

TEST(Acceptance, C8_ContributionDecomposition) {
  double gamma = 0.1;
  {
    StabilizerCode code = pair_code(3);
    RecoveryOperation rec = pair_code_recovery(3, RecoveryMode::projection);
    auto parts = syndrome_contributions(code, rec, gamma);
    double total = 0.0;
    for (const auto& [o, val] : parts) total += val;
    EXPECT_NEAR(total, pipeline_fidelity(code, rec, gamma).first, 1e-12);
    EXPECT_GT(parts[0], 0.0);
    EXPECT_GT(parts[1], 0.0);
    EXPECT_GT(parts[2], 0.0);
    double high = 0.0;
    for (const auto& [o, val] : parts)
      if (o >= 3) high += val;
    EXPECT_LT(high, parts[2]);
  }
  {
    StabilizerCode code = hamming_73();
    RecoveryOperation rec = hamming73_recovery(RecoveryMode::projection);
    auto parts = syndrome_contributions(code, rec, gamma);
    double total = 0.0;
    for (const auto& [o, val] : parts) total += val;
    EXPECT_NEAR(total, pipeline_fidelity(code, rec, gamma).first, 1e-12);
    EXPECT_NEAR(parts[2], 0.0, 1e-12);
  }
  report(8, "syndrome-contribution decomposition");
}

TEST(Acceptance, C9_ComparePerformance) {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<FidelityCurve> curves;
  auto grid = gamma_grid(0.01, 0.3, 30);
  for (const auto& name : {"pair:1", "pair:2", "pair:3", "pair:4"}) {
    StabilizerCode code = code_by_name(name);
    RecoveryOperation rec = recovery_by_name(name, "projection");
    curves.push_back(sweep(code, "projection", [&](double) { return rec; },
                           grid, default_truncation(code.n())));
  }
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  EXPECT_LT(elapsed, 300.0);
  // Exact evaluation up to n = 8; truncated with a reported bound at n = 10.
  for (const auto& c : curves) {
    for (size_t i = 0; i < c.gammas.size(); ++i) {
      if (c.code == "pair:4") {
        EXPECT_EQ(c.truncation_order, 5);
        if (std::abs(c.gammas[i] - 0.1) < 1e-9) {
          EXPECT_LT(c.bounds[i], 1e-4) << "bound at gamma=0.1";
        }
      } else {
        EXPECT_EQ(c.bounds[i], 0.0);
      }
    }
  }
  printf("  compare over four family codes took %.2f s\n", elapsed);
  report(9, "compare performance and truncation bound");
}

}  // namespace
