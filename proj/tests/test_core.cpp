#include "oqis/core.hpp"

#include <gtest/gtest.h>

using namespace oqis;

namespace {

Params small_q() {
  Params P;
  P.p = cplx(0.6, 0.0);
  P.s0 = 1;
  P.s1 = 0;
  return P;
}

}  // namespace

TEST(QBracket, SmallIntegers) {
  Params P;
  cplx q = P.q();
  EXPECT_LT(std::abs(q_bracket(0L, P)), 1e-15);
  EXPECT_LT(std::abs(q_bracket(1L, P) - 1.0), 1e-15);
  EXPECT_LT(std::abs(q_bracket(2L, P) - (q + 1.0 / q)), 1e-14);
  EXPECT_LT(std::abs(q_bracket(3L, P) - (q * q + 1.0 + 1.0 / (q * q))), 1e-13);
}

TEST(QBracket, Antisymmetric) {
  Params P;
  for (double v : {0.5, 1.7, -2.3})
    EXPECT_LT(std::abs(q_bracket(cplx(v), P) + q_bracket(cplx(-v), P)), 1e-13);
}

TEST(QPochhammer, FiniteAndInfinite) {
  cplx q(0.5, 0.2);
  EXPECT_EQ(q_pochhammer(cplx(0.3, 0.1), q, 0), cplx(1.0));
  EXPECT_LT(std::abs(q_pochhammer(q, q, 2) - (1.0 - q) * (1.0 - q * q)), 1e-15);
  EXPECT_EQ(q_pochhammer(cplx(0.0), q, -1), cplx(1.0));
  // Euler: (z;q)_inf = sum_k (-1)^k q^{k(k-1)/2} z^k / (q;q)_k
  cplx z(0.4, -0.3), sum(0.0);
  for (int k = 0; k < 80; ++k)
    sum += ((k % 2) ? -1.0 : 1.0) * ipow(q, k * (k - 1) / 2) * ipow(z, k) / q_pochhammer(q, q, k);
  EXPECT_LT(std::abs(q_pochhammer(z, q, -1) - sum), 1e-13);
}

TEST(QPochhammer, InfiniteOutsideDiscThrows) {
  EXPECT_THROW(q_pochhammer(cplx(0.1), cplx(1.2), -1), Error);
}

TEST(QExp, ZeroIsOne) {
  Params P;
  for (cplx b : {P.qp(2), P.qp(-2)}) EXPECT_LT(std::abs(q_exp(0.0, b, P) - 1.0), 1e-15);
}

TEST(QExp, SeriesMatchesProductSmallQ) {
  Params P = small_q();
  ASSERT_LT(std::abs(std::abs(P.q()) - 0.6), 1e-15);
  cplx z(0.3, 0.1);
  for (cplx b : {P.qp(2), P.qp(-2)}) {
    // direct summation of z^k / (k)_b! with 2000 terms
    cplx sum(1.0), term(1.0);
    for (int k = 1; k < 2000; ++k) {
      term *= z * (1.0 - b) / (1.0 - ipow(b, k));
      sum += term;
    }
    EXPECT_LT(std::abs(q_exp_product(z, b, P) - sum), 1e-12);
  }
}

TEST(QExp, InverseFlag) {
  Params P;
  cplx z(0.2, -0.4), b = P.qp(2);
  EXPECT_LT(std::abs(q_exp(z, b, P) * q_exp(z, b, P, true) - 1.0), 1e-13);
}

TEST(QExp, InvariantSuites) {
  Params P;
  EXPECT_TRUE(check_qexp_inverse(P).pass);
  EXPECT_TRUE(check_qexp_series(P).pass);
  EXPECT_TRUE(check_norm_identity(P).pass);
}

TEST(NormFunctions, Phi1Identity) {
  Params P;
  cplx x = std::polar(0.3, 0.7);
  cplx lhs = phi1_fn(x, P) * phi1_check_fn(x, P);
  cplx rhs = 1.0 - 1.0 / (P.q() * ipow(x, P.s()));
  EXPECT_LT(std::abs(lhs - rhs) / std::abs(rhs), 1e-12);
}

TEST(NormFunctions, Phi1TendsToOne) {
  Params P;
  EXPECT_LT(std::abs(phi1_fn(cplx(1e-9, 0.0), P) - 1.0), 1e-12);
}

TEST(NormFunctions, PhiAgainstDirectSum) {
  // phi(x) = exp(-Lambda(x^s/q)), Lambda(y) = sum_k (q^{2k}+q^{-2k}) y^k / (k (q^k+q^{-k}))
  Params P;
  P.p = cplx(std::sqrt(0.6), 0.0);
  P.s0 = 1;
  P.s1 = 1;
  cplx q = P.q();
  cplx x(0.4, 0.0), y = ipow(x, P.s()) / q, lam(0.0);
  for (int k = 1; k <= 500; ++k) lam += (ipow(q, 2 * k) + ipow(q, -2 * k)) * ipow(y, k) / (double(k) * (ipow(q, k) + ipow(q, -k)));
  EXPECT_LT(std::abs(phi_fn(x, P) - std::exp(-lam)), 1e-12);
}

TEST(Params, Validation) {
  Params P;
  EXPECT_NO_THROW(P.validate());
  Params Z = P;
  Z.eps_plus = 0.0;
  EXPECT_THROW(Z.validate(), Error);
  Z = P;
  Z.p = std::polar(1.0, 0.3);
  EXPECT_THROW(Z.validate(), Error);
  Z = P;
  Z.s0 = 0;
  Z.s1 = 0;
  EXPECT_THROW(Z.validate(), Error);
}

TEST(Params, ZetaIsInvolution) {
  Params P;
  P.s1 = 2;
  Params Z = zeta_params(zeta_params(P));
  EXPECT_EQ(canonical_text(Z), canonical_text(P));
  EXPECT_EQ(zeta_params(P).s0, 2);
  EXPECT_EQ(zeta_params(P).eps_plus, P.eps_minus);
}

TEST(Digest, StableAndSensitive) {
  Params P;
  EXPECT_EQ(digest(P), digest(P));
  Params Q = P;
  Q.rng_seed += 1;
  EXPECT_NE(digest(P), digest(Q));
}

TEST(Residual, Normalisation) {
  Mat A = Mat::Identity(2, 2);
  EXPECT_EQ(rel_residual(A, A), 0.0);
  EXPECT_NEAR(rel_residual(Mat::Zero(2, 2), A), 1.0, 1e-15);
  Mat B = A;
  B(0, 1) = 1e-12;
  EXPECT_NEAR(rel_residual(B, A), 1e-12 / std::sqrt(2.0), 1e-18);
}

TEST(Sampler, Reproducible) {
  Sampler a(7), b(7);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(a.gaussian_c(), b.gaussian_c());
}

TEST(IdentityReport, PassIffBelowThreshold) {
  IdentityReport r;
  r.threshold = 1e-10;
  r.max_residual = 1e-10;
  r.finish();
  EXPECT_FALSE(r.pass);
  r.max_residual = 9e-11;
  r.finish();
  EXPECT_TRUE(r.pass);
}

TEST(IdentityReport, ErrorsBecomeInfiniteResidual) {
  Params P;
  IdentityReport r = run_identity("probe", P, 1.0, 3, [](Sampler&) -> double {
    throw Error(ErrorCode::PoleHit, "boom");
  });
  EXPECT_TRUE(r.error);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.threshold, 1.0);
  EXPECT_TRUE(std::isinf(r.max_residual));
}
