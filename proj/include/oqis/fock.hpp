#pragma once

#include "oqis/tensor.hpp"

#include <functional>

namespace oqis {

// Truncated Fock representation. Basis |n>, n = 0..N-1.
// flavor 1: f|n> = |n+1>, e|n> = a_n |n-1>, h|n> = -2n|n>
// flavor 2: e2 = f1, f2 = e1, h2 = -h1
struct FockRep {
  int flavor = 1;
  int N = 0;
  Mat E;
  Mat F;
  std::vector<int> levels;  // eigenvalue of h on |n>
  Vec a;                    // a_n = q(1-q^{-2n})/lambda^2, a_0 = 0
};

inline cplx fock_a(int n, const Params& P) {
  cplx q = P.q(), lam = P.lam();
  return q * (1.0 - ipow(q, -2L * n)) / (lam * lam);
}

inline FockRep build_fock(int flavor, int N, const Params& P) {
  if (N < 2) throw Error(ErrorCode::ShapeMismatch, "Fock cutoff must be at least 2");
  if (flavor != 1 && flavor != 2) throw Error(ErrorCode::ShapeMismatch, "flavor must be 1 or 2");
  if (std::abs(P.lam()) < 1e-14) throw Error(ErrorCode::DegenerateQ, "q - 1/q vanishes");
  FockRep r;
  r.flavor = flavor;
  r.N = N;
  Mat e = Mat::Zero(N, N), f = Mat::Zero(N, N);
  r.a = Vec::Zero(N);
  for (int n = 1; n < N; ++n) {
    r.a(n) = fock_a(n, P);
    e(n - 1, n) = r.a(n);
    f(n, n - 1) = 1.0;
  }
  r.levels.resize(N);
  for (int n = 0; n < N; ++n) r.levels[n] = (flavor == 1 ? -2 : 2) * n;
  if (flavor == 1) {
    r.E = e;
    r.F = f;
  } else {
    r.E = f;
    r.F = e;
  }
  return r;
}

// diagonal with entries f(n, h_n); throws PoleHit on non-finite values
inline Mat cartan_diag(const FockRep& rep, const std::function<cplx(int, int)>& f) {
  Mat D = Mat::Zero(rep.N, rep.N);
  for (int n = 0; n < rep.N; ++n) {
    cplx v = f(n, rep.levels[n]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error(ErrorCode::PoleHit, "cartan function not finite at level " + std::to_string(n));
    D(n, n) = v;
  }
  return D;
}

// q^{(num/den) h}; the exponent num*s*h/den must be an integer power of p
inline Mat qh(const FockRep& rep, const Params& P, long num, long den = 1) {
  return cartan_diag(rep, [&](int, int h) {
    long k = num * P.s() * h;
    if (k % den != 0) throw Error(ErrorCode::ShapeMismatch, "fractional power of p in q^{xi h}");
    return P.pw(k / den);
  });
}

// level ratios t_n = d_n/d_{n-1} (n >= 1) of the diagonal conjugator D with D^{-1} X^T D = X^t
inline Vec t_ratios(const FockRep& rep, const Params& P) {
  Vec t = Vec::Ones(rep.N);
  cplx q = P.q();
  for (int n = 1; n < rep.N; ++n) t(n) = fock_a(n, P) * ipow(q, 1 - 2L * n);
  return t;
}

// d_b/d_a as a product of neighbouring ratios
inline cplx t_weight(const Vec& t, int a, int b) {
  cplx w(1.0);
  if (b > a)
    for (int n = a + 1; n <= b; ++n) w *= t(n);
  else
    for (int n = b + 1; n <= a; ++n) w /= t(n);
  return w;
}

// D itself for small cutoffs; entries grow like |q|^{n^2}
inline Mat t_conjugator(const FockRep& rep, const Params& P) {
  Vec t = t_ratios(rep, P);
  Mat D = Mat::Zero(rep.N, rep.N);
  cplx d(1.0);
  for (int n = 0; n < rep.N; ++n) {
    if (n > 0) d *= t(n);
    if (!std::isfinite(std::abs(d))) throw Error(ErrorCode::NoSolution, "t-conjugator overflows");
    D(n, n) = d;
  }
  return D;
}

// anti-involution t on a Fock-only matrix
inline Mat t_fock(const Mat& X, const FockRep& rep, const Params& P) {
  Vec t = t_ratios(rep, P);
  Mat R(rep.N, rep.N);
  for (int b = 0; b < rep.N; ++b)
    for (int a = 0; a < rep.N; ++a) {
      cplx v = X(b, a);
      R(a, b) = (v == 0.0) ? v : v * t_weight(t, a, b);
    }
  return R;
}

// anti-involution t on the Fock slot of a tensor operator
inline TensorOp t_slot(const TensorOp& A, int slot, const FockRep& rep, const Params& P) {
  if (A.dims[slot] != rep.N) throw Error(ErrorCode::ShapeMismatch, "t_slot: slot is not the Fock slot");
  Vec t = t_ratios(rep, P);
  return slot_transpose_weighted(A, slot, [&](int a, int b) { return t_weight(t, a, b); });
}

}  // namespace oqis

namespace oqis {

// rows/cols whose Fock-slot level is below keep; Fock slot must be slot 0
inline Mat fock_trim(const TensorOp& A, int keep) {
  long rest = A.side() / A.dims[0];
  long k = std::min<long>(keep, A.dims[0]) * rest;
  return A.data.topLeftCorner(k, k);
}

// residual on the trimmed level range
inline double trimmed_residual(const TensorOp& A, const TensorOp& B, int margin = 4) {
  same_dims(A, B);
  return rel_residual(fock_trim(A, A.dims[0] - margin), fock_trim(B, B.dims[0] - margin));
}

// trimmed residual after rescaling each Fock-level row block of both sides by the size
// of that block of B; used where diagonal level weights span many orders of magnitude
inline double balanced_residual(const TensorOp& A, const TensorOp& B, int margin = 4) {
  same_dims(A, B);
  Mat a = fock_trim(A, A.dims[0] - margin), b = fock_trim(B, B.dims[0] - margin);
  long rest = A.side() / A.dims[0];
  for (long n = 0; n * rest < b.rows(); ++n) {
    double s = std::max(b.middleRows(n * rest, rest).norm(), 1e-300);
    a.middleRows(n * rest, rest) /= s;
    b.middleRows(n * rest, rest) /= s;
  }
  return rel_residual(a, b);
}

}  // namespace oqis
