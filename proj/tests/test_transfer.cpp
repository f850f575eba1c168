#include "oqis/transfer.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace oqis;

namespace {

QPolicy pol(const Params& P) { return policy_of(P); }

// tr_0 of a 4x4 operator on C^2 (x) C^2 by index loops
Mat trace_first(const Mat& M) {
  Mat R = Mat::Zero(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int a = 0; a < 2; ++a) R(i, j) += M(2 * a + i, 2 * a + j);
  return R;
}

// Q by dense matrices at a fixed cutoff, no gauge or level bookkeeping
Mat dense_q(cplx x, const ChainSpec& c, int N, const Params& P) {
  auto d = chain_dims(N, c.L);
  Mat Kc = k_operator_mat(KOpKind::KcheckBar, 1, 1.0 / x, N, P);
  TensorOp M = embed(TensorOp(Kc, {N}), {0}, d) * dressed_k_Q(1, x, c, N, P);
  return partial_trace(M, 0).data;
}

// diag(q, 1/q)^e per site, from the site bits
Mat eta_oracle(int L, int e, const Params& P) {
  Mat D = Mat::Identity(1, 1);
  Mat site = Mat::Zero(2, 2);
  site(0, 0) = std::pow(P.q(), double(e));
  site(1, 1) = std::pow(P.q(), double(-e));
  for (int k = 0; k < L; ++k) D = kron_mat(D, site);
  return D;
}

// both sides of the TQ-relation assembled here, with the eta exponent as a parameter
std::pair<Mat, Mat> tq_sides(cplx x, const ChainSpec& c, const Params& P, int eta_exp) {
  cplx q = P.q(), p = P.p;
  int s = P.s();
  Omegas w = omegas(x, P);
  cplx chi1 = std::pow(q, double(c.L)), chi2 = chi1;
  for (cplx z : c.xi) {
    chi1 *= (1.0 - std::pow(x * z, -s) / (q * q)) * (1.0 - std::pow(x / z, -s) / (q * q));
    chi2 *= (1.0 - std::pow(x * z, -s)) * (1.0 - std::pow(x / z, -s));
  }
  auto Q = [&](cplx y) { return q_operator(1, y, c, P, pol(P)).Q.data; };
  Mat T = t_operator(x, c, P).data;
  Mat lhs = (q * q - std::pow(q, 4.0) * std::pow(x, 2 * s)) * Q(p * x) * T;
  Mat rhs = w.w1 * w.wb1 * chi1 * Q(x / p) * eta_oracle(c.L, eta_exp, P) +
            w.w2 * w.wb2 * chi2 * Q(p * p * p * x) * eta_oracle(c.L, -eta_exp, P);
  return {lhs, rhs};
}

}  // namespace

TEST(TOperator, SingleSiteAgainstBruteForce) {
  Params P;
  cplx x(0.93, 0.2), xi(1.05, -0.1);
  ChainSpec c{1, {xi}};
  Mat I = Mat::Identity(2, 2);
  Mat M = kron_mat(kbar_matrix(1.0 / x, P).data, I) * r_matrix(1.0 / (x * xi), P).data *
          kron_mat(k_matrix(x, P).data, I) * rbar_matrix(x / xi, P).data;
  Mat T = t_operator(x, c, P).data;
  EXPECT_EQ(T.rows(), 2);
  EXPECT_LT(rel_residual(T, trace_first(M)), 1e-14);
}

TEST(TOperator, EigenvalueSumIsTrace) {
  Params P;
  ChainSpec c = default_chain(2);
  Mat T = t_operator(cplx(0.9, 0.3), c, P).data;
  Eigen::ComplexEigenSolver<Mat> es(T);
  EXPECT_LT(std::abs(es.eigenvalues().sum() - T.trace()), 1e-12 * std::max(1.0, std::abs(T.trace())));
}

TEST(TOperator, CartanAndTransportSymmetries) {
  Params P;
  for (int L = 1; L <= 3; ++L) {
    EXPECT_TRUE(check_sz(false, L, P).pass) << L;
    EXPECT_TRUE(check_invT(L, P).pass) << L;
  }
}

TEST(QOperator, MatchesDenseTrace) {
  Params P;
  cplx x(0.95, 0.15);
  for (int L : {1, 2}) {
    ChainSpec c = default_chain(L);
    Mat ref = dense_q(x, c, 40, P);
    Mat fast = q_operator_at(1, x, c, 40, P).Q.data;
    EXPECT_LT(strict_rel(fast, ref), 1e-12) << L;
  }
}

TEST(QOperator, CutoffDoublingStabilises) {
  Params P;
  EXPECT_TRUE(check_qcutoff(2, P, pol(P)).pass);
  QResult r = q_operator(1, cplx(1.0, 0.1), default_chain(2), P, pol(P));
  EXPECT_LT(r.stabilization, 1e-8);
  EXPECT_LE(r.N, 192);
}

TEST(QOperator, CommutesWithTotalSpin) {
  Params P;
  EXPECT_TRUE(check_sz(true, 2, P, pol(P)).pass);
}

TEST(QOperator, SecondFlavorFromFirst) {
  Params P;
  for (int L = 1; L <= 2; ++L) EXPECT_TRUE(check_Q1toQ2(L, P, pol(P)).pass) << L;
}

TEST(QOperator, DivergentTraceDetected) {
  Params P;
  P.p = cplx(0.62, 0.21);
  P.eps_minus = cplx(0.3, 0.1);
  P.epsbar_minus = cplx(0.2, -0.05);
  try {
    q_operator(1, cplx(0.9, 0.1), default_chain(2), P, pol(P));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TraceDiverging);
  }
}

TEST(QOperator, CapReached) {
  Params P;
  QPolicy tight = pol(P);
  tight.cap = tight.N0;  // no room to double
  try {
    q_operator(1, cplx(0.9, 0.1), default_chain(1), P, tight);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TruncationNotConverged);
  }
}

TEST(TQ, ChiAtSingleHomogeneousSite) {
  Params P;
  cplx x(0.9, 0.4), q = P.q();
  TQCoefficients k = tq_coefficients(1, x, ChainSpec{1, {1.0}}, P);
  cplx expect = q * std::pow(1.0 - std::pow(x, -P.s()) / (q * q), 2);
  EXPECT_LT(std::abs(k.chi1 - expect), 1e-14 * std::abs(expect));
}

TEST(TQ, IndependentAssemblyAgrees) {
  Params P;
  cplx x(0.97, -0.2);
  for (int L : {1, 2}) {
    ChainSpec c = default_chain(L);
    auto [lhs, rhs] = tq_sides(x, c, P, 1);
    EXPECT_LT(strict_rel(lhs, rhs), 1e-8) << L;
    EXPECT_LT(tq_residual_at(1, x, c, P, pol(P)), 1e-8) << L;
  }
}

TEST(TQ, WrongEtaExponentFails) {
  Params P;
  cplx x(0.97, -0.2);
  ChainSpec c = default_chain(2);
  auto [lhs, rhs] = tq_sides(x, c, P, -1);
  EXPECT_GT(strict_rel(lhs, rhs), 1e-3);
}

TEST(TQ, DefaultPointAllLengthsBothFlavors) {
  Params P;
  for (int a : {1, 2})
    for (int L = 1; L <= 3; ++L) {
      IdentityReport r = check_tq(a, L, P, pol(P));
      EXPECT_TRUE(r.pass) << r.id << " " << r.max_residual;
    }
}

TEST(TQ, SecondFlavorMatchesTransportedFirst) {
  Params P;
  cplx x(0.91, 0.27);
  ChainSpec c = default_chain(2);
  double r1 = tq_residual_at(1, x, c, P, pol(P));
  double r2 = tq_residual_at(2, x, c, zeta_params(P), pol(P));
  EXPECT_LT(std::abs(r1 - r2), 1e-10);
}

TEST(TQ, FailsInsideUnitDisc) {
  Params P;
  P.p = cplx(0.62, 0.21);
  P.eps_minus = cplx(0.3, 0.1);
  P.epsbar_minus = cplx(0.2, -0.05);
  IdentityReport r = check_tq(1, 1, P, pol(P));
  EXPECT_FALSE(r.pass);
}

TEST(Commutators, AllPairs) {
  Params P;
  for (int L = 1; L <= 3; ++L) {
    EXPECT_TRUE(check_commutator(CommPair::TT, L, P).pass) << L;
    for (int a : {1, 2}) {
      EXPECT_TRUE(check_commutator(CommPair::QT, L, P, a, pol(P)).pass) << L << " " << a;
      EXPECT_TRUE(check_commutator(CommPair::QQ, L, P, a, pol(P)).pass) << L << " " << a;
    }
  }
}

TEST(Commutators, EqualPointsExactlyZero) {
  Params P;
  cplx x(0.9, 0.2);
  EXPECT_EQ(commutator_at(CommPair::TT, x, x, 1, default_chain(2), P, pol(P)), 0.0);
}

TEST(Spectrum, PerEigenpairResiduals) {
  Params P;
  SpectrumReport r = spectrum(default_grid(20), 1, default_chain(2), P, pol(P));
  EXPECT_FALSE(r.degenerate);
  EXPECT_EQ(r.rows.size(), 80u);
  EXPECT_LT(r.max_tq, 1e-7);
  EXPECT_LT(r.leakage, 1e-8);
  for (const auto& row : r.rows) EXPECT_LT(row.tq, 1e-7);
}

TEST(Spectrum, EmptyGrid) {
  Params P;
  SpectrumReport r = spectrum({}, 1, default_chain(2), P, pol(P));
  EXPECT_TRUE(r.rows.empty());
  std::ostringstream os;
  write_spectrum(os, r);
  EXPECT_EQ(os.str(), "# eig_index re(T) im(T) re(Q) im(Q) tq_residual\n");
}

TEST(Spectrum, DegenerateParametersTakeCommutatorPath) {
  Params P;
  P.eps_minus = P.eps_plus;
  P.epsbar_minus = P.epsbar_plus;
  ChainSpec c{2, {1.0, 1.0}};
  SpectrumReport r = spectrum(default_grid(4), 1, c, P, pol(P));
  EXPECT_TRUE(r.degenerate);
  EXPECT_LT(r.commutator, 1e-9);
}
