#include "adqec/pauli.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using adqec::cxd;
using adqec::PauliOperator;

namespace {

double dist(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

TEST(Pauli, SingleQubitAlgebra) {
  auto x = PauliOperator::parse("X");
  auto z = PauliOperator::parse("Z");
  auto xz = x * z;
  // X * Z = -i Y
  EXPECT_EQ(xz.str(), "-iY");
  EXPECT_LT(dist(xz.to_dense(), oracle::dense_pauli(x) * oracle::dense_pauli(z)),
            1e-15);
}

TEST(Pauli, IdentityIsNeutral) {
  for (const char* s : {"XYZI", "-ZZII", "YYYY"}) {
    auto g = PauliOperator::parse(s);
    auto id = PauliOperator::identity(4);
    EXPECT_EQ((g * id).str(), g.str());
    EXPECT_EQ((id * g).str(), g.str());
  }
}

TEST(Pauli, ProductIdentityFromRecoveryChain) {
  // XXXXXX * YYXXXX carries the sign that keeps the recovery-chain groups
  // equal: the product is -ZZIIII, and <XXXXXX, YYXXXX> equals
  // <XXXXXX, -ZZIIII> at the projector level.
  auto a = PauliOperator::parse("XXXXXX");
  auto b = PauliOperator::parse("YYXXXX");
  auto prod = a * b;
  EXPECT_EQ(prod.str(), "-ZZIIII");

  Eigen::MatrixXcd da = oracle::dense_pauli(a);
  Eigen::MatrixXcd db = oracle::dense_pauli(b);
  Eigen::MatrixXcd dp = oracle::dense_pauli(prod);
  Eigen::Index dim = da.rows();
  Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(dim, dim);
  Eigen::MatrixXcd p1 = (eye + da) / 2 * ((eye + db) / 2);
  Eigen::MatrixXcd p2 = (eye + da) / 2 * ((eye + dp) / 2);
  EXPECT_LT(dist(p1, p2), 1e-12);
}

TEST(Pauli, ExhaustiveDenseAgreementUpToN3) {
  for (int n = 1; n <= 3; ++n) {
    std::vector<PauliOperator> all;
    for (uint64_t x = 0; x < (uint64_t(1) << n); ++x)
      for (uint64_t z = 0; z < (uint64_t(1) << n); ++z)
        for (int ph : {0, 1, 2, 3}) all.emplace_back(n, x, z, ph);
    // Dense cache for speed.
    std::vector<Eigen::MatrixXcd> dense;
    dense.reserve(all.size());
    for (const auto& p : all) dense.push_back(oracle::dense_pauli(p));
    for (size_t i = 0; i < all.size(); ++i) {
      ASSERT_LT(dist(all[i].to_dense(), dense[i]), 1e-15) << all[i].str();
      for (size_t j = 0; j < all.size(); ++j) {
        auto prod = all[i] * all[j];
        ASSERT_LT(dist(prod.to_dense(), dense[i] * dense[j]), 1e-14)
            << all[i].str() << " * " << all[j].str();
        bool comm = all[i].commutes_with(all[j]);
        double comm_norm = dist(dense[i] * dense[j], dense[j] * dense[i]);
        ASSERT_EQ(comm, comm_norm < 1e-12);
      }
    }
  }
}

TEST(Pauli, SquareIsPhaseSquared) {
  for (int n = 1; n <= 3; ++n)
    for (uint64_t x = 0; x < (uint64_t(1) << n); ++x)
      for (uint64_t z = 0; z < (uint64_t(1) << n); ++z)
        for (int ph : {0, 1, 2, 3}) {
          PauliOperator p(n, x, z, ph);
          auto sq = p * p;
          EXPECT_TRUE(sq.is_identity_bits());
          EXPECT_EQ(sq.phase(), p.phase() * p.phase());
          // Hermitian Paulis square to +I.
          if (p.is_hermitian()) { EXPECT_EQ(sq.phase(), cxd(1, 0)); }
        }
}

TEST(Pauli, CommutationExamples) {
  EXPECT_TRUE(PauliOperator::parse("XXXX").commutes_with(
      PauliOperator::parse("ZZII")));
  EXPECT_FALSE(PauliOperator::parse("ZIII").commutes_with(
      PauliOperator::parse("XXXX")));
  EXPECT_FALSE(PauliOperator::single(4, 1, 'X').commutes_with(
      PauliOperator::parse("ZZII")));
}

TEST(Pauli, ParseFormatExamples) {
  auto p = PauliOperator::parse("-ZZII");
  EXPECT_EQ(p.phase(), cxd(-1, 0));
  EXPECT_EQ(p.z_bits(), 0b1100u);
  EXPECT_EQ(p.x_bits(), 0u);

  auto allx = PauliOperator::parse("XXXXXXXX");
  EXPECT_EQ(allx.x_bits(), 0xffu);
  EXPECT_EQ(allx.weight(), 8);

  EXPECT_EQ(PauliOperator::parse("-IIZZ").str(), "-IIZZ");
  EXPECT_EQ(PauliOperator::parse("+iXY").str(), "+iXY");
  EXPECT_THROW(PauliOperator::parse("XQZZ"), std::invalid_argument);
  EXPECT_THROW(PauliOperator::parse("XX", 4), std::invalid_argument);
}

TEST(Pauli, RoundTripProperty) {
  std::mt19937 rng(7);
  for (int it = 0; it < 500; ++it) {
    int n = 1 + rng() % 10;
    PauliOperator p(n, rng() & ((uint64_t(1) << n) - 1),
                    rng() & ((uint64_t(1) << n) - 1), rng() % 4);
    EXPECT_EQ(PauliOperator::parse(p.str()), p);
  }
}

TEST(Pauli, DenseGuards) {
  EXPECT_EQ(PauliOperator::parse("I").to_dense(),
            Eigen::MatrixXcd::Identity(2, 2));
  Eigen::MatrixXcd mz = PauliOperator::parse("-Z").to_dense();
  EXPECT_EQ(mz(0, 0), cxd(-1, 0));
  EXPECT_EQ(mz(1, 1), cxd(1, 0));
  Eigen::MatrixXcd y = PauliOperator::parse("Y").to_dense();
  EXPECT_EQ(y(0, 1), cxd(0, -1));
  EXPECT_EQ(y(1, 0), cxd(0, 1));
  EXPECT_THROW(PauliOperator(13, 0, 0, 0).to_dense(), std::invalid_argument);
}

}  // namespace
