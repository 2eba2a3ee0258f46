#include <gtest/gtest.h>

#include <cmath>

#include "cirs/linalg/random.hpp"
#include "cirs/smoothing/cirs.hpp"
#include "cirs/smoothing/srs.hpp"
#include "drivers.hpp"

using namespace cirs;

namespace {

ProblemOperator tridiagonal_op(std::size_t n) {
  return ProblemOperator::standard(drivers::graded_tridiagonal(n));
}

}  // namespace

TEST(Cirs, EtaOneReturnsSmoothedPair) {
  // A = I and P = S: U is proportional to S, so eta = 1 and zeta = 0.
  const auto op = ProblemOperator::standard(SparseMatrix::identity(6));
  const Block b = random_block(6, 2, 3);
  CirsSmoother sm(Block(6, 2), b);
  const auto next = sm.step(b, op);
  EXPECT_EQ(sm.state().eta_hat, 1.0);
  EXPECT_EQ(next.x, sm.state().y_hat);
  EXPECT_EQ(next.r, sm.state().s_hat);
}

TEST(Cirs, ReturnedPairIsRecombinedFromState) {
  const auto op = tridiagonal_op(40);
  const Block b = random_block(40, 3, 11);
  CirsSmoother sm(Block(40, 3), b);
  Block r = b;
  for (int k = 0; k < 15; ++k) {
    const auto next = sm.step(0.7 * r, op);
    const auto& st = sm.state();
    EXPECT_EQ(next.x, st.y_hat + st.zeta_hat * st.v_hat);
    EXPECT_EQ(next.r, st.s_hat - st.zeta_hat * st.u_hat);
    EXPECT_EQ(st.zeta_hat, 1.0 - st.eta_hat);
    r = next.r;
  }
}

TEST(Cirs, SmoothedResidualIsMonotoneAndBelowPrimary) {
  const auto op = tridiagonal_op(100);
  const auto t = drivers::cirs_vs_srs(op, random_block(100, 4, 2), 60);
  double prev = frobenius_norm(random_block(100, 4, 2));
  bool primary_rose = false;
  for (std::size_t k = 0; k < t.s_norm.size(); ++k) {
    EXPECT_LE(t.s_norm[k], prev * (1 + 1e-12)) << "k " << k;
    EXPECT_LE(t.s_norm[k], t.r_norm[k] * (1 + 1e-12)) << "k " << k;
    if (k > 0 && t.r_norm[k] > t.r_norm[k - 1]) primary_rose = true;
    prev = t.s_norm[k];
  }
  EXPECT_TRUE(primary_rose) << "driver should be non-monotone";
}

TEST(Cirs, EtaMinimizesOverGridScan) {
  const auto op = tridiagonal_op(30);
  const Block b = random_block(30, 2, 8);
  CirsSmoother sm(Block(30, 2), b);
  Block r = b;
  for (int k = 0; k < 10; ++k) {
    const Block s_prev = sm.state().s_hat;
    const auto next = sm.step(0.9 * r, op);
    const auto& st = sm.state();
    auto residual = [&](double eta) { return frobenius_norm(s_prev - eta * st.u_hat); };
    const double at_eta = residual(st.eta_hat);
    for (int g = -2000; g <= 2000; ++g) {
      const double eta = st.eta_hat + g * 1e-3;
      EXPECT_GE(residual(eta), at_eta * (1 - 1e-12));
    }
    EXPECT_NEAR(st.eta_hat, frobenius_inner(s_prev, st.u_hat) /
                                frobenius_inner(st.u_hat, st.u_hat), 1e-6);
    r = next.r;
  }
}

TEST(Cirs, AgreesWithSimpleSmoothing) {
  const auto op = tridiagonal_op(100);
  const auto t = drivers::cirs_vs_srs(op, random_block(100, 4, 21), 50);
  for (std::size_t k = 0; k < t.y_cirs.size(); ++k) {
    EXPECT_LE(frobenius_norm(t.y_cirs[k] - t.y_srs[k]), 1e-10 * frobenius_norm(t.y_cirs[k]));
    EXPECT_LE(frobenius_norm(t.s_cirs[k] - t.s_srs[k]), 1e-10 * frobenius_norm(t.s_cirs[k]));
    EXPECT_NEAR(t.eta_cirs[k], t.eta_srs[k], 1e-10 * std::abs(t.eta_cirs[k]));
  }
}

TEST(Cirs, AnnihilatedDirectionIsBreakdown) {
  const auto op = tridiagonal_op(5);
  CirsSmoother sm(Block(5, 1), random_block(5, 1, 1));
  EXPECT_THROW(sm.step(Block(5, 1), op), BreakdownError);
}

TEST(Cirs, ResynchronizeResetsState) {
  const auto op = tridiagonal_op(10);
  CirsSmoother sm(Block(10, 2), random_block(10, 2, 4));
  sm.step(random_block(10, 2, 5), op);
  const Block x = random_block(10, 2, 6), r = random_block(10, 2, 7);
  sm.resynchronize(x, r);
  EXPECT_EQ(sm.state().y_hat, x);
  EXPECT_EQ(sm.state().s_hat, r);
  EXPECT_EQ(frobenius_norm(sm.state().v_hat), 0.0);
  EXPECT_EQ(sm.state().eta_hat, 0.0);
}

TEST(Srs, CoincidingResidualGivesEtaOne) {
  const Block x = random_block(8, 2, 1), r = random_block(8, 2, 2);
  SimpleSmoother srs(x, r);
  EXPECT_EQ(srs.step(x, r), 1.0);
  EXPECT_EQ(srs.state().s, r);
}

TEST(Srs, StepMinimizesCombination) {
  const Block r0 = random_block(12, 3, 1), r1 = random_block(12, 3, 2);
  SimpleSmoother srs(Block(12, 3), r0);
  const double eta = srs.step(Block(12, 3), r1);
  auto f = [&](double e) { return frobenius_norm((1 - e) * r0 + e * r1); };
  EXPECT_LE(f(eta), f(eta + 1e-4));
  EXPECT_LE(f(eta), f(eta - 1e-4));
  EXPECT_LE(frobenius_norm(srs.state().s), std::min(frobenius_norm(r0), frobenius_norm(r1)));
}
