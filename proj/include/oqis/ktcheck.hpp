#pragma once

#include "oqis/lax.hpp"

namespace oqis {

namespace kt {

inline Mat E2() { return unit(1, 2); }
inline Mat F2() { return unit(2, 1); }
inline Mat H2() {
  Mat h = Mat::Zero(2, 2);
  h(0, 0) = 1.0;
  h(1, 1) = -1.0;
  return h;
}
inline Mat qH(cplx q, long k) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = ipow(q, k);
  m(1, 1) = ipow(q, -k);
  return m;
}
inline Mat qcomm(const Mat& a, const Mat& b, cplx c) { return a * b - c * b * a; }

// log(1 + sum_{k>=1} c_k z^{-k}) coefficients up to order K, for commuting coefficients
template <class T>
std::vector<T> series_log(const std::vector<T>& c, int K, const T& zero) {
  std::vector<T> l(K + 1, zero);
  for (int k = 1; k <= K; ++k) {
    T acc = c[k];
    for (int j = 1; j < k; ++j) acc -= (static_cast<double>(j) / k) * (l[j] * c[k - j]);
    l[k] = acc;
  }
  return l;
}

// exp of sum_{k>=1} l_k z^{-k} as 1 + sum c_k z^{-k}, up to order K
template <class T>
std::vector<T> series_exp(const std::vector<T>& l, int K, const T& zero, const T& one) {
  std::vector<T> c(K + 1, zero);
  c[0] = one;
  for (int k = 1; k <= K; ++k) {
    T acc = zero;
    for (int j = 1; j <= k; ++j) acc += (static_cast<double>(j) / k) * (l[j] * c[k - j]);
    c[k] = acc;
  }
  return c;
}

}  // namespace kt

// FE-form and EF-form of the Casimir element in the fundamental representation
inline std::pair<Mat, Mat> casimir_forms(const Params& P) {
  using namespace kt;
  cplx q = P.q(), l2 = P.lam() * P.lam();
  Mat a = F2() * E2() + (q * qH(q, 1) + qH(q, -1) / q) / l2;
  Mat b = E2() * F2() + (qH(q, 1) / q + q * qH(q, -1)) / l2;
  return {a, b};
}

inline cplx casimir_fundamental(const Params& P) { return casimir_forms(P).first(0, 0); }

// C_1 .. C_K from sum (-1)^{k-1} C_k z^{-k}/k = log(1 + lambda^2 C z^{-1} + z^{-2})
inline std::vector<cplx> central_ck(int K, const Params& P) {
  cplx C = casimir_fundamental(P), l2 = P.lam() * P.lam();
  std::vector<cplx> a(K + 1, 0.0);
  if (K >= 1) a[1] = l2 * C;
  if (K >= 2) a[2] = 1.0;
  auto b = kt::series_log(a, K, cplx(0.0));
  std::vector<cplx> c(K + 1, 0.0);
  for (int k = 1; k <= K; ++k) c[k] = ((k % 2) ? 1.0 : -1.0) * static_cast<double>(k) * b[k];
  return c;
}

enum class Root { EA, ED, FA, FD, EPrime, EDelta, FPrime, FDelta };

inline const char* root_name(Root r) {
  switch (r) {
    case Root::EA: return "e_alpha";
    case Root::ED: return "e_delta-alpha";
    case Root::FA: return "f_alpha";
    case Root::FD: return "f_delta-alpha";
    case Root::EPrime: return "e'_delta";
    case Root::EDelta: return "e_delta";
    case Root::FPrime: return "f'_delta";
    case Root::FDelta: return "f_delta";
  }
  return "?";
}

inline const std::vector<Root>& all_roots() {
  static const std::vector<Root> r{Root::EA, Root::ED, Root::FA, Root::FD, Root::EPrime, Root::EDelta, Root::FPrime, Root::FDelta};
  return r;
}

inline bool imaginary_root(Root r) { return r == Root::EPrime || r == Root::EDelta || r == Root::FPrime || r == Root::FDelta; }

// closed-form evaluation images
inline Mat root_closed(Root r, int k, cplx x, const Params& P) {
  using namespace kt;
  cplx q = P.q(), lam = P.lam();
  int s = P.s(), s0 = P.s0, s1 = P.s1;
  double sg = (k % 2 == 0) ? 1.0 : -1.0;  // (-1)^k
  Mat I = Mat::Identity(2, 2);
  if (imaginary_root(r) && k < 1) throw Error(ErrorCode::ShapeMismatch, "imaginary root vectors start at k=1");
  switch (r) {
    case Root::EA: return sg * ipow(x, long(k) * s + s1) * qH(q, -k) * E2();
    case Root::ED: return sg * ipow(x, long(k) * s + s0) * F2() * qH(q, -k);
    case Root::FA: return sg * ipow(x, -long(k) * s - s1) * F2() * qH(q, k);
    case Root::FD: return sg * ipow(x, -long(k) * s - s0) * qH(q, k) * E2();
    case Root::EPrime: {
      cplx C = casimir_fundamental(P);
      return -sg * ipow(x, long(k) * s) * ipow(q, -k) * qH(q, -(k - 1)) *
             (lam * q_bracket(k, P) * C * I - (q_bracket(k - 1, P) * qH(q, 1) + q_bracket(k + 1, P) * qH(q, -1)) / lam);
    }
    case Root::EDelta: {
      cplx Ck = central_ck(k, P)[k];
      return -sg * ipow(q, -k) * ipow(x, long(k) * s) / (lam * double(k)) * (Ck * I - (ipow(q, k) + ipow(q, -k)) * qH(q, -k));
    }
    case Root::FPrime: {
      cplx C = casimir_fundamental(P);
      return -sg * ipow(x, -long(k) * s) * ipow(q, k) * qH(q, k - 1) *
             (-lam * q_bracket(k, P) * C * I + (q_bracket(k + 1, P) * qH(q, 1) + q_bracket(k - 1, P) * qH(q, -1)) / lam);
    }
    case Root::FDelta: {
      cplx Ck = central_ck(k, P)[k];
      return sg * ipow(q, k) * ipow(x, -long(k) * s) / (lam * double(k)) * (Ck * I - (ipow(q, k) + ipow(q, -k)) * qH(q, k));
    }
  }
  return {};
}

// images built from e0, e1, f0, f1 by the q-commutator recursion and the log generating functions
struct RootTable {
  std::vector<Mat> ea, ed, fa, fd, ep, ek, fp, fk;

  const Mat& get(Root r, int k) const {
    const std::vector<Mat>* v = nullptr;
    switch (r) {
      case Root::EA: v = &ea; break;
      case Root::ED: v = &ed; break;
      case Root::FA: v = &fa; break;
      case Root::FD: v = &fd; break;
      case Root::EPrime: v = &ep; break;
      case Root::EDelta: v = &ek; break;
      case Root::FPrime: v = &fp; break;
      case Root::FDelta: v = &fk; break;
    }
    if (k < 0 || k >= static_cast<int>(v->size()) || (imaginary_root(r) && k < 1))
      throw Error(ErrorCode::ShapeMismatch, "root vector index out of range");
    return (*v)[k];
  }
};

inline RootTable root_recursive(int K, cplx x, const Params& P) {
  using namespace kt;
  cplx q = P.q(), lam = P.lam();
  cplx b2 = q_bracket(2, P);
  Mat Z = Mat::Zero(2, 2);
  Mat e1 = ipow(x, P.s1) * E2(), e0 = ipow(x, P.s0) * F2();
  Mat f1 = ipow(x, -P.s1) * F2(), f0 = ipow(x, -P.s0) * E2();
  RootTable t;
  t.ea = {e1};
  t.ed = {e0};
  t.fa = {f1};
  t.fd = {f0};
  t.ep = {Z, qcomm(e1, e0, 1.0 / (q * q))};
  t.fp = {Z, qcomm(f0, f1, q * q)};
  for (int k = 1; k <= K; ++k) {
    t.ea.push_back((t.ea[k - 1] * t.ep[1] - t.ep[1] * t.ea[k - 1]) / b2);
    t.ed.push_back((t.ep[1] * t.ed[k - 1] - t.ed[k - 1] * t.ep[1]) / b2);
    t.fa.push_back((t.fp[1] * t.fa[k - 1] - t.fa[k - 1] * t.fp[1]) / b2);
    t.fd.push_back((t.fd[k - 1] * t.fp[1] - t.fp[1] * t.fd[k - 1]) / b2);
    if (k >= 2) {
      t.ep.push_back(qcomm(t.ea[k - 1], e0, 1.0 / (q * q)));
      t.fp.push_back(qcomm(f0, t.fa[k - 1], q * q));
    }
  }
  std::vector<Mat> ce(K + 1, Z), cf(K + 1, Z);
  for (int k = 1; k <= K; ++k) {
    ce[k] = lam * t.ep[k];
    cf[k] = -lam * t.fp[k];
  }
  auto le = series_log(ce, K, Z), lf = series_log(cf, K, Z);
  t.ek.assign(K + 1, Z);
  t.fk.assign(K + 1, Z);
  for (int k = 1; k <= K; ++k) {
    t.ek[k] = le[k] / lam;
    t.fk[k] = -lf[k] / lam;
  }
  return t;
}

inline Mat root_vector_image(Root r, int k, cplx x, bool recursive, const Params& P, int K = 12) {
  if (k > K) throw Error(ErrorCode::ShapeMismatch, "root vector order above the supported maximum");
  if (!recursive) return root_closed(r, k, x, P);
  return root_recursive(std::max(k, 1), x, P).get(r, k);
}

inline constexpr double kTailBound = 1e-10;

// product formula for R(x) with the k-product truncated at Kmax
inline TensorOp reconstruct_r(cplx x, int Kmax, const Params& P, bool strict = true) {
  cplx q = P.q(), lam = P.lam();
  cplx phi = phi_fn(x, P);
  Mat I4 = Mat::Identity(4, 4);
  Mat Rp = I4, Rm = I4;
  double tail = 0.0;
  for (int k = 0; k <= Kmax; ++k) {
    Mat a = lam * kron_mat(root_closed(Root::EA, k, x, P), root_closed(Root::FA, k, 1.0, P));
    Mat b = lam * kron_mat(root_closed(Root::ED, k, x, P), root_closed(Root::FD, k, 1.0, P));
    Rp = Rp * (I4 + a);
    Rm = (I4 + b) * Rm;
    if (k == Kmax) tail = std::max(a.norm(), b.norm());
  }
  Vec X = Vec::Zero(4);
  for (int k = 1; k <= Kmax; ++k) {
    Mat t = lam * double(k) / q_bracket(2 * k, P) * kron_mat(root_closed(Root::EDelta, k, x, P), root_closed(Root::FDelta, k, 1.0, P));
    X += t.diagonal();
    if (k == Kmax) tail = std::max(tail, t.norm());
  }
  if (strict && (!std::isfinite(tail) || tail > kTailBound))
    throw Error(ErrorCode::TailTooLarge, "last product factor not close to identity");
  Mat R0 = X.array().exp().matrix().asDiagonal();
  Vec hh(4);
  hh << q, 1.0, 1.0, q;
  Mat R = phi * Rp * R0 * Rm * Mat(hh.asDiagonal());
  return TensorOp(R, {2, 2});
}

// product formula for L^{(1)}(x) with the second slot in the fundamental representation
inline TensorOp reconstruct_l1(cplx x, int N, int Kmax, const Params& P, bool strict = true) {
  cplx q = P.q(), lam = P.lam();
  int s = P.s();
  FockRep rep = build_fock(1, N, P);
  Mat IN = Mat::Identity(N, N), I2N = Mat::Identity(2 * N, 2 * N);
  Mat A = I2N + lam * ipow(x, P.s1) * kron_mat(rep.E, kt::F2());
  Vec Y = Vec::Zero(2);
  double tail = 0.0;
  for (int k = 1; k <= Kmax; ++k) {
    Vec t = ((k % 2) ? 1.0 : -1.0) * ipow(x, long(s) * k) / q_bracket(2 * k, P) * root_closed(Root::FDelta, k, 1.0, P).diagonal();
    Y += t;
    if (k == Kmax) tail = t.norm();
  }
  if (strict && (!std::isfinite(tail) || tail > kTailBound)) throw Error(ErrorCode::TailTooLarge, "last series term not small");
  Mat Bm = kron_mat(IN, Mat(Y.array().exp().matrix().asDiagonal()));
  Mat Cm = I2N + lam * ipow(x, P.s0) * kron_mat(rep.F, kt::E2());
  Vec d(2 * N);
  for (int n = 0; n < N; ++n) {
    d(2 * n) = ipow(q, -n);
    d(2 * n + 1) = ipow(q, n);
  }
  Mat L = phi1_fn(x, P) * A * Bm * Cm * Mat(d.asDiagonal());
  return TensorOp(L, {N, 2});
}

// ---------------------------------------------------------------- identities

inline IdentityReport check_casimir(const Params& P) {
  return run_identity("kt.casimir", P, 1e-14, 1, [&](Sampler&) {
    auto [a, b] = casimir_forms(P);
    cplx C = (P.qp(2) + P.qp(-2)) / (P.lam() * P.lam());
    Mat CI = C * Mat::Identity(2, 2);
    // sigma: E <-> F, H -> -H
    Mat sa = kt::E2() * kt::F2() + (P.q() * kt::qH(P.q(), -1) + kt::qH(P.q(), 1) / P.q()) / (P.lam() * P.lam());
    return std::max({strict_rel(a, b), strict_rel(a, CI), strict_rel(sa, CI)});
  });
}

inline IdentityReport check_ck(const Params& P, int order = 8) {
  return run_identity("kt.ck", P, 1e-12, 1, [&](Sampler&) {
    auto C = central_ck(order, P);
    cplx Cas = casimir_fundamental(P), l2 = P.lam() * P.lam();
    double r = std::abs(C[1] - l2 * Cas) / std::abs(l2 * Cas);
    std::vector<cplx> l(order + 1, 0.0);
    for (int k = 1; k <= order; ++k) l[k] = ((k % 2) ? 1.0 : -1.0) * C[k] / double(k);
    auto c = kt::series_exp(l, order, cplx(0.0), cplx(1.0));
    std::vector<cplx> want(order + 1, 0.0);
    want[0] = 1.0;
    want[1] = l2 * Cas;
    if (order >= 2) want[2] = 1.0;
    double sc = std::abs(l2 * Cas) + 1.0;
    for (int k = 0; k <= order; ++k) r = std::max(r, std::abs(c[k] - want[k]) / sc);
    return r;
  });
}

inline IdentityReport check_rootvec(const Params& P, int K = 8) {
  return run_identity("kt.rootvec", P, 1e-10, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S);
    RootTable t = root_recursive(K, x, P);
    double r = 0.0;
    for (Root rt : all_roots())
      for (int k = imaginary_root(rt) ? 1 : 0; k <= K; ++k) r = std::max(r, strict_rel(t.get(rt, k), root_closed(rt, k, x, P)));
    return r;
  });
}

// |x^s| max(|q|,1/|q|) <= 0.5, i.e. |x^s q^-1| <= 0.5 for |q| < 1 and its mirror |x^s q| <= 0.5 for |q| > 1;
// the first sample sits on the edge
inline cplx draw_small_x(Sampler& S, const Params& P, bool edge = false) {
  double rate = std::max(std::abs(P.q()), 1.0 / std::abs(P.q()));
  double rmax = 0.5 / rate;
  double r = edge ? rmax : rmax * std::sqrt(S.uniform());
  return std::pow(std::polar(r, (2.0 * S.uniform() - 1.0) * M_PI), 1.0 / P.s());
}

inline IdentityReport check_reconR(const Params& P, int Kmax = 40) {
  int k = 0;
  return run_identity("kt.reconR", P, 1e-8, P.sample_count, [&](Sampler& S) {
    cplx x = draw_small_x(S, P, k++ == 0);
    return strict_rel(reconstruct_r(x, Kmax, P).data, r_matrix(x, P).data);
  });
}

// the top Fock level of the product lacks its upper neighbour, so it is trimmed
inline IdentityReport check_reconL1(const Params& P, int Kmax = 40, int N = 12) {
  int k = 0;
  return run_identity("kt.reconL1", P, 1e-8, P.sample_count, [&](Sampler& S) {
    cplx x = draw_small_x(S, P, k++ == 0);
    FockRep rep = build_fock(1, N, P);
    return trimmed_residual(reconstruct_l1(x, N, Kmax, P), l_operator(LaxKind::L, x, rep, P), 1);
  });
}

}  // namespace oqis
