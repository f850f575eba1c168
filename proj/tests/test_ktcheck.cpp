#include "oqis/ktcheck.hpp"

#include <gtest/gtest.h>

using namespace oqis;

namespace {

Params mixed_s() {
  Params P;
  P.s0 = 2;
  P.s1 = 1;
  P.p = cplx(1.07, 0.05);
  return P;
}

Mat E() { return unit(1, 2); }

Mat qh2(cplx q, int k) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = std::pow(q, double(k));
  m(1, 1) = std::pow(q, double(-k));
  return m;
}

}  // namespace

TEST(Casimir, FundamentalValue) {
  Params P;
  cplx q = P.q(), lam = P.lam();
  auto [fe, ef] = casimir_forms(P);
  Mat C = (q * q + 1.0 / (q * q)) / (lam * lam) * Mat::Identity(2, 2);
  EXPECT_LT(strict_rel(fe, C), 1e-14);
  EXPECT_LT(strict_rel(ef, C), 1e-14);
  EXPECT_TRUE(check_casimir(P).pass);
}

TEST(CentralElements, ClosedForm) {
  for (const Params& P : {Params{}, mixed_s()}) {
    cplx q = P.q();
    auto C = central_ck(8, P);
    EXPECT_LT(std::abs(C[1] - P.lam() * P.lam() * casimir_fundamental(P)), 1e-13);
    for (int k = 1; k <= 8; ++k) {
      cplx expect = std::pow(q, 2.0 * k) + std::pow(q, -2.0 * k);
      EXPECT_LT(std::abs(C[k] - expect) / std::abs(expect), 1e-13) << k;
    }
    EXPECT_TRUE(check_ck(P).pass);
  }
}

TEST(CentralElements, RealForRealQ) {
  Params P;
  P.p = cplx(1.15, 0.0);
  for (cplx c : central_ck(8, P)) EXPECT_EQ(c.imag(), 0.0);
}

TEST(SeriesHelpers, LogExpRoundTrip) {
  std::vector<cplx> c{1.0, cplx(0.3, 0.1), cplx(-0.2, 0.05), 0.7, cplx(0.0, 0.4)};
  auto l = kt::series_log(c, 4, cplx(0.0));
  auto back = kt::series_exp(l, 4, cplx(0.0), cplx(1.0));
  for (int k = 1; k <= 4; ++k) EXPECT_LT(std::abs(back[k] - c[k]), 1e-15) << k;
}

TEST(RootVectors, PrintedClosedForms) {
  Params P = mixed_s();
  cplx x(0.8, 0.45), q = P.q();
  EXPECT_LT(strict_rel(root_vector_image(Root::EA, 0, x, false, P), Mat(x * E())), 1e-15);
  for (int k = 0; k <= 4; ++k) {
    double sg = (k % 2) ? -1.0 : 1.0;
    Mat expect = sg * std::pow(x, double(-3 * k - 2)) * qh2(q, k) * E();
    EXPECT_LT(strict_rel(root_vector_image(Root::FD, k, x, false, P), expect), 1e-13) << k;
  }
}

TEST(RootVectors, ClosedMatchesRecursive) {
  for (const Params& P : {Params{}, mixed_s()}) {
    IdentityReport r = check_rootvec(P);
    EXPECT_TRUE(r.pass) << r.max_residual;
  }
  Params P;
  cplx x(0.9, -0.3);
  for (Root rt : all_roots())
    for (int k = imaginary_root(rt) ? 1 : 0; k <= 8; ++k)
      EXPECT_LT(strict_rel(root_vector_image(rt, k, x, true, P), root_vector_image(rt, k, x, false, P)), 1e-10)
          << root_name(rt) << " " << k;
}

TEST(RootVectors, ImaginaryStartAtOne) {
  Params P;
  EXPECT_THROW(root_closed(Root::EDelta, 0, 1.0, P), Error);
}

TEST(Reconstruction, RAtHalf) {
  Params P;
  cplx x(0.5, 0.0);
  EXPECT_LT(strict_rel(reconstruct_r(x, 40, P).data, r_matrix(x, P).data), 1e-8);
}

TEST(Reconstruction, L1AtHalf) {
  Params P;
  cplx x(0.5, 0.0);
  int N = 12;
  FockRep rep = build_fock(1, N, P);
  EXPECT_LT(trimmed_residual(reconstruct_l1(x, N, 40, P), l_operator(LaxKind::L, x, rep, P), 1), 1e-8);
}

TEST(Reconstruction, ResidualFallsWithKmax) {
  Params P;
  double rate = std::abs(P.q());
  cplx x = std::sqrt(std::polar(0.5 / rate, 0.7));  // edge of the sampled region
  double prev = INFINITY;
  for (int K : {2, 5, 10, 20, 40}) {
    double r = strict_rel(reconstruct_r(x, K, P, false).data, r_matrix(x, P).data);
    EXPECT_LE(r, prev * (1.0 + 1e-9) + 1e-15) << K;
    prev = r;
  }
  EXPECT_LT(prev, 1e-8);
}

TEST(Reconstruction, ShortProductRejected) {
  Params P;
  cplx x = std::sqrt(std::polar(0.5 / std::abs(P.q()), 0.7));
  try {
    reconstruct_r(x, 3, P);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TailTooLarge);
  }
}

TEST(Reconstruction, SuitesOnSampledRegion) {
  for (const Params& P : {Params{}, mixed_s()}) {
    IdentityReport a = check_reconR(P), b = check_reconL1(P);
    EXPECT_TRUE(a.pass) << a.max_residual << " " << a.note;
    EXPECT_TRUE(b.pass) << b.max_residual << " " << b.note;
  }
}

TEST(Reconstruction, DiagonalBlocksOfProduct) {
  // (1,1) block q^{h/2}, (2,2) block q^{-h/2} - q^{-1} x^s q^{h/2}
  Params P;
  cplx x(0.4, 0.1), q = P.q(), xs = std::pow(x, P.s());
  int N = 8;
  TensorOp L = reconstruct_l1(x, N, 40, P);
  for (int n = 0; n < N - 1; ++n) {
    cplx a11 = std::pow(q, double(-n)), a22 = std::pow(q, double(n)) - xs / q * std::pow(q, double(-n));
    EXPECT_LT(std::abs(L.data(2 * n, 2 * n) - a11) / std::abs(a11), 1e-12) << n;
    EXPECT_LT(std::abs(L.data(2 * n + 1, 2 * n + 1) - a22) / std::abs(a22), 1e-12) << n;
  }
}
