#pragma once

#include "oqis/lax.hpp"

namespace oqis {

inline TensorOp k_matrix(cplx x, const Params& P) {
  Mat K = Mat::Zero(2, 2);
  K(0, 0) = ipow(x, P.s0) * P.eps_plus + ipow(x, -P.s1) * P.eps_minus;
  K(1, 1) = ipow(x, -P.s0) * P.eps_plus + ipow(x, P.s1) * P.eps_minus;
  return op2(K);
}

inline TensorOp kbar_matrix(cplx x, const Params& P) {
  cplx q = P.q();
  Mat K = Mat::Zero(2, 2);
  K(0, 0) = ipow(x, P.s0) * P.epsbar_plus / q + q * ipow(x, -P.s1) * P.epsbar_minus;
  K(1, 1) = q * ipow(x, -P.s0) * P.epsbar_plus + ipow(x, P.s1) * P.epsbar_minus / q;
  return op2(K);
}

enum class KOpKind { K, KcheckBar };

// Level-diagonal K-operators, normalised so that the infinite q-exponential products
// reduce to finite ones per level:
//   K       level n: x^{-2 s0 n} prod_{j<n} (1 + q r x^s q^{2j}),         r = eps-/eps+
//   KcheckBar level n: x^{-2 s0 n} q^{2n} / prod_{j<=n} (1 + q rb x^{-s} q^{2j}), rb = epsbar-/epsbar+
// Flavor 2 uses the zeta-swapped parameters on the same level index.
struct KOperator {
  KOpKind kind = KOpKind::K;
  int flavor = 1;
  Vec diag;    // level entries (may overflow for large cutoffs; see ratio)
  Vec ratio;   // ratio(n) = entry(n+1)/entry(n), n = 0..N-2
  cplx first;  // entry(0)
};

inline constexpr double kPoleGuard = 1e-8;

inline KOperator k_operator(KOpKind kind, int flavor, cplx x, int N, const Params& P0, bool with_diag = true) {
  const Params P = flavor == 1 ? P0 : zeta_params(P0);
  cplx q = P.q();
  int s = P.s();
  KOperator K;
  K.kind = kind;
  K.flavor = flavor;
  K.ratio = Vec::Zero(std::max(N - 1, 0));
  cplx x2 = ipow(x, -2L * P.s0);
  if (kind == KOpKind::K) {
    cplx z = q * (P.eps_minus / P.eps_plus) * ipow(x, s);
    K.first = 1.0;
    cplx q2j(1.0);
    for (int n = 0; n + 1 < N; ++n) {
      cplx fac = 1.0 + z * q2j;
      if (std::abs(fac) < kPoleGuard) throw Error(ErrorCode::PoleHit, "K-operator factor vanishes");
      K.ratio(n) = x2 * fac;
      q2j *= q * q;
    }
  } else {
    cplx z = q * (P.epsbar_minus / P.epsbar_plus) * ipow(x, -s);
    cplx f0 = 1.0 + z;
    if (std::abs(f0) < kPoleGuard) throw Error(ErrorCode::PoleHit, "K-operator factor vanishes");
    K.first = 1.0 / f0;
    cplx q2j = q * q;
    for (int n = 0; n + 1 < N; ++n) {
      cplx fac = 1.0 + z * q2j;
      if (std::abs(fac) < kPoleGuard) throw Error(ErrorCode::PoleHit, "K-operator factor vanishes");
      K.ratio(n) = x2 * q * q / fac;
      q2j *= q * q;
    }
  }
  if (with_diag) {
    K.diag = Vec::Zero(N);
    cplx v = K.first;
    for (int n = 0; n < N; ++n) {
      if (n > 0) v *= K.ratio(n - 1);
      K.diag(n) = v;
    }
  }
  return K;
}

inline Mat k_operator_mat(KOpKind kind, int flavor, cplx x, int N, const Params& P) {
  KOperator K = k_operator(kind, flavor, x, N, P);
  for (int n = 0; n < N; ++n)
    if (!std::isfinite(std::abs(K.diag(n))))
      throw Error(ErrorCode::PoleHit, "K-operator entry overflows at this cutoff");
  return K.diag.asDiagonal();
}

// G, G^{-1}, Gbar, Gbar^{-1} on Fock (x) C^2 (flavor-1 oscillators)
inline TensorOp dressing_g(const FockRep& rep, bool barred, bool inverse, const Params& P) {
  if (rep.flavor != 1) throw Error(ErrorCode::ShapeMismatch, "dressing elements live in the flavor-1 oscillators");
  cplx lam = P.lam();
  int ss = barred ? P.s1 : P.s0;
  Mat hp = qh(rep, P, 1, 2), hm = qh(rep, P, -1, 2);
  Mat Z = Mat::Zero(rep.N, rep.N);
  if (!inverse) return blocks2(hm, -lam * P.pw(-ss) * hm * rep.F, Z, hp);
  return blocks2(hp, lam * P.pw(-ss) / P.q() * hm * rep.F, Z, hm);
}

struct ChainSpec {
  int L = 1;
  std::vector<cplx> xi{cplx(1.0)};

  void validate(bool strict = true) const {
    if (L < 1 || static_cast<int>(xi.size()) != L) throw Error(ErrorCode::ConfigInvalid, "chain length and xi disagree");
    if (strict && L > 5) throw Error(ErrorCode::ConfigInvalid, "chain length above 5");
    for (cplx z : xi)
      if (std::abs(z) < 0.5 || std::abs(z) > 2.0) throw Error(ErrorCode::ConfigInvalid, "|xi| outside [0.5, 2]");
  }
};

inline std::vector<int> chain_dims(int aux, int L) {
  std::vector<int> d{aux};
  for (int k = 0; k < L; ++k) d.push_back(2);
  return d;
}

// R(1/(x xi_L)) ... R(1/(x xi_1)) K(x) Rbar(x/xi_1) ... Rbar(x/xi_L) on C^2 (x) (C^2)^L
inline TensorOp dressed_k_T(cplx x, const ChainSpec& c, const Params& P) {
  auto d = chain_dims(2, c.L);
  TensorOp M = embed(k_matrix(x, P), {0}, d);
  for (int k = 0; k < c.L; ++k) {
    M = embed(r_matrix(1.0 / (x * c.xi[k]), P), {0, k + 1}, d) * M;
    M = M * embed(rbar_matrix(x / c.xi[k], P), {0, k + 1}, d);
  }
  return M;
}

// L(1/(x xi_L)) ... K^{(a)}(x) ... Lbar(x/xi_L) on Fock (x) (C^2)^L
inline TensorOp dressed_k_Q(int flavor, cplx x, const ChainSpec& c, int N, const Params& P) {
  FockRep rep = build_fock(flavor, N, P);
  auto d = chain_dims(N, c.L);
  TensorOp M = embed(TensorOp(k_operator_mat(KOpKind::K, flavor, x, N, P), {N}), {0}, d);
  for (int k = 0; k < c.L; ++k) {
    M = embed(l_operator(LaxKind::L, 1.0 / (x * c.xi[k]), rep, P), {0, k + 1}, d) * M;
    M = M * embed(l_operator(LaxKind::Lbar, x / c.xi[k], rep, P), {0, k + 1}, d);
  }
  return M;
}

// ---------------------------------------------------------------- affine generators

// images of e0, e1, f0, f1, q^{xi h0}, q^{xi h1} with xi = k/s, and 1
enum class Gen { One, E0, E1, F0, F1, QH0, QH1 };

struct GenTerm {
  Gen g;
  long k = 0;  // p-power exponent for QH0/QH1 (xi = k/s)
};

// oscillator image rho_x (flavor 1)
inline Mat rho_image(GenTerm t, cplx x, const FockRep& rep, const Params& P) {
  switch (t.g) {
    case Gen::One: return Mat::Identity(rep.N, rep.N);
    case Gen::E0: return ipow(x, P.s0) * rep.F;
    case Gen::E1: return ipow(x, P.s1) * rep.E;
    case Gen::F0: return ipow(x, -P.s0) * rep.E;
    case Gen::F1: return ipow(x, -P.s1) * rep.F;
    case Gen::QH0: return cartan_diag(rep, [&](int, int h) { return P.pw(-t.k * h); });
    case Gen::QH1: return cartan_diag(rep, [&](int, int h) { return P.pw(t.k * h); });
  }
  return {};
}

// fundamental evaluation image pi_x
inline Mat pi_image(GenTerm t, cplx x, const Params& P) {
  Mat E = unit(1, 2), F = unit(2, 1);
  switch (t.g) {
    case Gen::One: return Mat::Identity(2, 2);
    case Gen::E0: return ipow(x, P.s0) * F;
    case Gen::E1: return ipow(x, P.s1) * E;
    case Gen::F0: return ipow(x, -P.s0) * E;
    case Gen::F1: return ipow(x, -P.s1) * F;
    case Gen::QH0: {
      Mat m = Mat::Zero(2, 2);
      m(0, 0) = P.pw(-t.k);
      m(1, 1) = P.pw(t.k);
      return m;
    }
    case Gen::QH1: {
      Mat m = Mat::Zero(2, 2);
      m(0, 0) = P.pw(t.k);
      m(1, 1) = P.pw(-t.k);
      return m;
    }
  }
  return {};
}

// coproduct images: Delta(e_i) = e_i (x) 1 + q^{-h_i} (x) e_i, Delta(f_i) = f_i (x) q^{h_i} + 1 (x) f_i,
// Delta(q^{xi h}) = q^{xi h} (x) q^{xi h}; opposite = swap of the tensor factors
inline std::vector<std::pair<GenTerm, GenTerm>> coproduct(GenTerm a, const Params& P, bool opposite) {
  std::vector<std::pair<GenTerm, GenTerm>> t;
  long s = P.s();
  switch (a.g) {
    case Gen::One: t = {{{Gen::One}, {Gen::One}}}; break;
    case Gen::E0: t = {{{Gen::E0}, {Gen::One}}, {{Gen::QH0, -s}, {Gen::E0}}}; break;
    case Gen::E1: t = {{{Gen::E1}, {Gen::One}}, {{Gen::QH1, -s}, {Gen::E1}}}; break;
    case Gen::F0: t = {{{Gen::F0}, {Gen::QH0, s}}, {{Gen::One}, {Gen::F0}}}; break;
    case Gen::F1: t = {{{Gen::F1}, {Gen::QH1, s}}, {{Gen::One}, {Gen::F1}}}; break;
    case Gen::QH0:
    case Gen::QH1: t = {{a, a}}; break;
  }
  if (opposite)
    for (auto& pr : t) std::swap(pr.first, pr.second);
  return t;
}

// (rho_x (x) pi_y) Delta(a) on Fock (x) C^2
inline TensorOp delta_image(GenTerm a, cplx x, cplx y, const FockRep& rep, const Params& P, bool opposite) {
  Mat M = Mat::Zero(2 * rep.N, 2 * rep.N);
  for (auto& [l, r] : coproduct(a, P, opposite)) M += kron_mat(rho_image(l, x, rep, P), pi_image(r, y, P));
  return TensorOp(M, {rep.N, 2});
}

// ---------------------------------------------------------------- identity registry

struct BoundaryOptions {
  int N = 32;
  int margin = 4;
};

inline IdentityReport check_refeq0(const Params& P) {
  return run_identity("bnd.refeq0", P, 1e-12, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S), y = draw_x(S);
    TensorOp K1 = kron(k_matrix(x, P), op2(Mat::Identity(2, 2))), K2 = kron(op2(Mat::Identity(2, 2)), k_matrix(y, P));
    TensorOp lhs = r_matrix(y / x, P) * K1 * rbar_matrix(x * y, P) * K2;
    TensorOp rhs = K2 * r_matrix(1.0 / (x * y), P) * K1 * rbar_matrix(x / y, P);
    return rel_residual(lhs, rhs);
  });
}

inline IdentityReport check_refeqdual(const Params& P) {
  return run_identity("bnd.refeqdual", P, 1e-12, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S), y = draw_x(S);
    TensorOp I = op2(Mat::Identity(2, 2));
    TensorOp K1 = slot_transpose(kron(kbar_matrix(x, P), I), 0);
    TensorOp K2 = slot_transpose(kron(I, kbar_matrix(y, P)), 1);
    TensorOp g2 = kron(I, op2(g_matrix(P))), g2i = kron(I, op2(g_matrix(P).inverse()));
    TensorOp lhs = r_matrix(y / x, P) * K1 * g2 * rbar_matrix(x * y * P.pw(-4), P) * g2i * K2;
    TensorOp rhs = K2 * g2i * r_matrix(P.pw(4) / (x * y), P) * g2 * K1 * rbar_matrix(x / y, P);
    return rel_residual(lhs, rhs);
  });
}

// Kbar(x) = K^t(x q^{-2/s}) g at eps = epsbar
inline IdentityReport check_kbar_transform(const Params& P) {
  return run_identity("bnd.kbar_transform", P, 1e-12, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S);
    Params B = P;
    B.eps_plus = P.epsbar_plus;
    B.eps_minus = P.epsbar_minus;
    Mat rhs = k_matrix(x * P.pw(-2), B).data.transpose() * g_matrix(P);
    return rel_residual(kbar_matrix(x, P).data, rhs);
  });
}

// zeta o sigma invariance of K and Kbar
inline IdentityReport check_inv1(const Params& P) {
  return run_identity("bnd.inv1", P, 1e-12, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S);
    Params Z = zeta_params(P);
    return std::max(rel_residual(sigma_map(k_matrix(x, Z), 0), k_matrix(x, P)),
                    rel_residual(sigma_map(kbar_matrix(x, Z), 0), kbar_matrix(x, P)));
  });
}

// KcheckBar(x) = (1 + epsbar- x^{-s} q / epsbar+)^{-1} K^t(x^{-1} q^{2/s})^{-1} q^{(s0-s1) h/s} at eps = epsbar
inline IdentityReport check_kcheck_transform(const Params& P, const BoundaryOptions& o = {}) {
  return run_identity("bnd.kcheck_transform", P, P.tol_exact, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S);
    int N = o.N;
    Params B = P;
    B.eps_plus = P.epsbar_plus;
    B.eps_minus = P.epsbar_minus;
    FockRep rep = build_fock(1, N, P);
    Mat Kt = t_fock(k_operator_mat(KOpKind::K, 1, P.pw(2) / x, N, B), rep, P);
    cplx pre = 1.0 / (1.0 + P.epsbar_minus * ipow(x, -P.s()) * P.q() / P.epsbar_plus);
    Mat rhs = pre * Mat(Kt.inverse()) * qh(rep, P, P.s0 - P.s1, P.s());
    TensorOp a(k_operator_mat(KOpKind::KcheckBar, 1, x, N, P), {N}), b(rhs, {N});
    return balanced_residual(a, b, o.margin);
  });
}

// L12(y/x) K1(x) Lbar12(xy) K2(y) = K2(y) L12(1/(xy)) K1(x) Lbar12(x/y), both flavors
inline IdentityReport check_refeqlim1(const Params& P, const BoundaryOptions& o = {}) {
  return run_identity("bnd.refeqlim1", P, P.tol_exact, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S), y = draw_x(S);
    double r = 0.0;
    for (int a = 1; a <= 2; ++a) {
      FockRep rep = build_fock(a, o.N, P);
      TensorOp K1(kron_mat(k_operator_mat(KOpKind::K, a, x, o.N, P), Mat::Identity(2, 2)), {o.N, 2});
      TensorOp K2 = on_aux(k_matrix(y, P).data, o.N);
      TensorOp lhs = l_operator(LaxKind::L, y / x, rep, P) * K1 * l_operator(LaxKind::Lbar, x * y, rep, P) * K2;
      TensorOp rhs = K2 * l_operator(LaxKind::L, 1.0 / (x * y), rep, P) * K1 * l_operator(LaxKind::Lbar, x / y, rep, P);
      r = std::max(r, balanced_residual(lhs, rhs, o.margin));
    }
    return r;
  });
}

// dual Fock-level reflection equation with Lcheck, Lcheckbar, KcheckBar, Kbar, both flavors
inline IdentityReport check_refeqlim2(const Params& P, const BoundaryOptions& o = {}) {
  return run_identity("bnd.refeqlim2", P, P.tol_exact, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S), y = draw_x(S);
    double r = 0.0;
    for (int a = 1; a <= 2; ++a) {
      FockRep rep = build_fock(a, o.N, P);
      TensorOp K1(kron_mat(k_operator_mat(KOpKind::KcheckBar, a, x, o.N, P), Mat::Identity(2, 2)), {o.N, 2});
      K1 = t_slot(K1, 0, rep, P);
      TensorOp K2 = slot_transpose(on_aux(kbar_matrix(y, P).data, o.N), 1);
      TensorOp g2 = on_aux(g_matrix(P), o.N), g2i = on_aux(g_matrix(P).inverse(), o.N);
      TensorOp lhs = l_operator(LaxKind::Lcheck, y / x, rep, P) * K1 * g2 *
                     l_operator(LaxKind::Lcheckbar, x * y * P.pw(-4), rep, P) * g2i * K2;
      TensorOp rhs = K2 * g2i * l_operator(LaxKind::Lcheck, P.pw(4) / (x * y), rep, P) * g2 * K1 *
                     l_operator(LaxKind::Lcheckbar, x / y, rep, P);
      r = std::max(r, balanced_residual(lhs, rhs, o.margin));
    }
    return r;
  });
}

inline TensorOp level_conj(const TensorOp& A, const Mat& C) {
  Mat c = kron_mat(C, Mat::Identity(2, 2));
  return TensorOp(c * A.data * c.inverse(), A.dims);
}

// The eight conjugations of coproduct images by G and Gbar. The first slot carries
// rho at x q^{-1/s} (Delta, G) or x q^{1/s} (Delta', Gbar); the second slot carries pi_x.
inline IdentityReport check_deltaconj(const std::string& gen, const Params& P, const BoundaryOptions& o = {}) {
  struct Spec {
    Gen g;
    bool prime;
    int d1, d2;  // p-power shifts of xi inside a1 = q^{xi(h + d1)}, a2 = q^{xi(h + d2)}
  };
  Spec sp;
  if (gen == "qh0") sp = {Gen::QH0, false, -1, 1};
  else if (gen == "qh1") sp = {Gen::QH1, false, 1, -1};
  else if (gen == "e0") sp = {Gen::E0, false, 0, 0};
  else if (gen == "e1") sp = {Gen::E1, false, 0, 0};
  else if (gen == "qh0p") sp = {Gen::QH0, true, -1, 1};
  else if (gen == "qh1p") sp = {Gen::QH1, true, 1, -1};
  else if (gen == "f0") sp = {Gen::F0, true, 0, 0};
  else if (gen == "f1") sp = {Gen::F1, true, 0, 0};
  else throw Error(ErrorCode::UnknownIdentity, "deltaconj generator " + gen);
  std::string id = "bnd.deltaconj." + gen;
  return run_identity(id, P, P.tol_exact, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S);
    long k = std::array<long, 3>{1, 2, -1}[static_cast<int>(S.uniform() * 3) % 3];
    FockRep rep = build_fock(1, o.N, P);
    bool bar = sp.prime;
    TensorOp G = dressing_g(rep, bar, false, P), Gi = dressing_g(rep, bar, true, P);
    GenTerm a{sp.g, k};
    cplx xl = bar ? x * P.p : x / P.p;
    TensorOp lhs = Gi * delta_image(a, xl, x, rep, P, sp.prime) * G;
    // conjugator q^{c h/(2s)} with c = s0-s1 (Delta) or s1-s0 (Delta')
    long c = bar ? (P.s1 - P.s0) : (P.s0 - P.s1);
    Mat C = qh(rep, P, c, 2 * P.s());
    cplx x1 = bar ? x / P.p : x * P.p;
    cplx x2 = bar ? x * ipow(P.p, 3) : x * ipow(P.p, -3);
    Mat a1, a2;
    if (sp.g == Gen::QH0 || sp.g == Gen::QH1) {
      // q^{xi(h_i + d)}: rho of q^{xi h_i} times q^{xi d} = p^{k d}
      a1 = rho_image(a, x1, rep, P) * P.pw(k * sp.d1);
      a2 = rho_image(a, x2, rep, P) * P.pw(k * sp.d2);
    } else {
      a1 = rho_image(a, x1, rep, P);
      a2 = rho_image(a, x2, rep, P);
    }
    Mat Ci = C.inverse();
    Mat rhs = kron_mat(C * a1 * Ci, unit(1, 1)) + kron_mat(Ci * a2 * C, unit(2, 2));
    if (sp.g == Gen::E0) rhs += ipow(x, P.s0) * kron_mat(Mat::Identity(o.N, o.N), unit(2, 1));
    if (sp.g == Gen::F1) rhs += ipow(x, -P.s1) * kron_mat(Mat::Identity(o.N, o.N), unit(2, 1));
    return trimmed_residual(lhs, TensorOp(rhs, {o.N, 2}), o.margin);
  });
}

inline const std::vector<std::string>& deltaconj_gens() {
  static const std::vector<std::string> g{"qh0", "qh1", "e0", "e1", "qh0p", "qh1p", "f0", "f1"};
  return g;
}

// Fock (x) C^2 (aux) (x) C^2 (fundamental)
inline TensorOp slots13(const TensorOp& A) { return embed(A, {0, 2}, {A.dims[0], 2, 2}); }
inline TensorOp slots12(const TensorOp& A) { return embed(A, {0, 1}, {A.dims[0], 2, 2}); }

// G^{-1}_{12} L_{13}(x q^{-1/s}) R_{23}(x) G_{12} and the barred analogue, fully evaluated
inline IdentityReport check_GL(bool barred, const Params& P, const BoundaryOptions& o = {}) {
  std::string id = barred ? "bnd.GLb1LbG" : "bnd.GL1LG";
  return run_identity(id, P, P.tol_exact, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S);
    int N = o.N;
    FockRep rep = build_fock(1, N, P);
    cplx q = P.q(), lam = P.lam();
    int s = P.s();
    long c = barred ? (P.s1 - P.s0) : (P.s0 - P.s1);
    Mat C = qh(rep, P, c, 2 * s), Ci = C.inverse();
    Mat I2 = Mat::Identity(2, 2);
    Mat piHp = Mat::Zero(2, 2), piHm = Mat::Zero(2, 2);
    piHp(0, 0) = 1.0;
    piHp(1, 1) = 1.0 / q;
    piHm(0, 0) = 1.0;
    piHm(1, 1) = q;
    Mat qmh = qh(rep, P, -1);
    auto left = [&](const Mat& m) { return TensorOp(kron_mat(kron_mat(m, I2), I2), {N, 2, 2}); };
    auto right = [&](const Mat& m, const Mat& a, const Mat& b) { return TensorOp(kron_mat(kron_mat(m, a), b), {N, 2, 2}); };
    TensorOp G = slots12(dressing_g(rep, barred, false, P)), Gi = slots12(dressing_g(rep, barred, true, P));
    TensorOp lhs, rhs;
    if (!barred) {
      lhs = Gi * slots13(l_operator(LaxKind::L, x / P.p, rep, P)) * fund3(r_matrix(x, P), N) * G;
      cplx xs = ipow(x, s);
      rhs = (q - xs / q) * (left(C) * slots13(l_operator(LaxKind::L, x * P.p, rep, P)) * right(Ci, unit(1, 1), piHp)) +
            (1.0 - xs) * (left(Ci) * slots13(l_operator(LaxKind::L, x * ipow(P.p, -3), rep, P)) * right(C, unit(2, 2), piHm)) +
            (lam * ipow(x, P.s0)) *
                (left(Ci) * slots13(l_operator(LaxKind::L, x * ipow(P.p, -3), rep, P)) * right(C * qmh, unit(2, 1), unit(1, 2)));
    } else {
      lhs = Gi * slots13(l_operator(LaxKind::Lbar, x * P.p, rep, P)) * fund3(rbar_matrix(x, P), N) * G;
      cplx xs = ipow(x, -s);
      rhs = (q - xs / q) * (left(C) * slots13(l_operator(LaxKind::Lbar, x / P.p, rep, P)) * right(Ci, unit(1, 1), piHp)) +
            (1.0 - xs) * (left(Ci) * slots13(l_operator(LaxKind::Lbar, x * ipow(P.p, 3), rep, P)) * right(C, unit(2, 2), piHm)) +
            (lam * ipow(x, -P.s1)) *
                (left(Ci) * slots13(l_operator(LaxKind::Lbar, x * ipow(P.p, 3), rep, P)) * right(C * qmh, unit(2, 1), unit(1, 2)));
    }
    return trimmed_residual(lhs, rhs, o.margin);
  });
}

struct Omegas {
  cplx w1, w2, wb1, wb2;
};

// coefficient functions of the TQ-relation for flavor 1; flavor 2 uses zeta(P)
inline Omegas omegas(cplx x, const Params& P) {
  cplx q = P.q();
  int s = P.s(), s0 = P.s0, s1 = P.s1;
  Omegas w;
  w.w1 = P.eps_plus * ipow(x, s0) + P.eps_minus * ipow(x, -s1);
  w.w2 = (1.0 - ipow(x, -2 * s)) * (P.eps_plus * ipow(x, -s0) + P.eps_minus * q * q * ipow(x, s1)) / (q * q);
  w.wb1 = (1.0 - ipow(x, 2 * s) * ipow(q, 4)) * (P.epsbar_plus * ipow(x, -s0) + P.epsbar_minus * ipow(x, s1)) / q;
  w.wb2 = -ipow(x, 2 * s) * (P.epsbar_plus * ipow(x, s0) + P.epsbar_minus * ipow(x, -s1) / (q * q)) * ipow(q, 7);
  return w;
}

inline cplx omega21(cplx x, const Params& P) {
  return P.lam() * ipow(x, -P.s()) * (P.eps_plus * ipow(x, P.s1) + P.eps_minus * ipow(x, -P.s0)) * P.pw(-P.s0);
}

inline cplx omegabar12(cplx x, const Params& P) {
  cplx q = P.q();
  return P.lam() * ipow(x, 2 * P.s1) * (P.epsbar_plus * q * ipow(x, P.s0) + P.epsbar_minus / q * ipow(x, -P.s1)) *
         P.pw(P.s1);
}

// G^{-1} K(x q^{1/s}) Lbar(x^2 q^{1/s}) K_2(x) Gbar = diagonal parts with omega1, omega2 plus the E21 term
inline IdentityReport check_GKLbKG(const Params& P, const BoundaryOptions& o = {}) {
  return run_identity("bnd.GKLbKG", P, P.tol_exact, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S);
    int N = o.N;
    FockRep rep = build_fock(1, N, P);
    Mat I2 = Mat::Identity(2, 2);
    auto Kop = [&](cplx y) { return k_operator_mat(KOpKind::K, 1, y, N, P); };
    TensorOp lhs = dressing_g(rep, false, true, P) * TensorOp(kron_mat(Kop(x * P.p), I2), {N, 2}) *
                   l_operator(LaxKind::Lbar, x * x * P.p, rep, P) * on_aux(k_matrix(x, P).data, N) *
                   dressing_g(rep, true, false, P);
    Omegas w = omegas(x, P);
    // q^{(2 s0/s - 1/2) h}
    Mat A = cartan_diag(rep, [&](int, int h) { return P.pw(2L * P.s0 * h) * ipow(P.q(), -h / 2); });
    Mat rhs = w.w1 * kron_mat(A * Kop(x / P.p), unit(1, 1)) + w.w2 * kron_mat(A.inverse() * Kop(x * ipow(P.p, 3)), unit(2, 2)) +
              omega21(x, P) * kron_mat(qh(rep, P, -1, 2) * Kop(x * P.p) * rep.E, unit(2, 1));
    return balanced_residual(lhs, TensorOp(rhs, {N, 2}), o.margin);
  });
}

// G^{t1t2} KcheckBar(x^{-1}q^{-1/s}) g2 Lcheckbar(x^{-2} q^{-5/s}) g2^{-1} Kbar^{t2}(x^{-1}) (Gbar^{-1})^{t1t2}
inline IdentityReport check_GKbLbKbG(const Params& P, const BoundaryOptions& o = {}) {
  return run_identity("bnd.GKbLbKbG", P, P.tol_exact, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S);
    int N = o.N;
    FockRep rep = build_fock(1, N, P);
    Mat I2 = Mat::Identity(2, 2);
    auto Kcb = [&](cplx y) { return k_operator_mat(KOpKind::KcheckBar, 1, y, N, P); };
    TensorOp Gtt = t1t2(dressing_g(rep, false, false, P), rep, P);
    TensorOp Gbitt = t1t2(dressing_g(rep, true, true, P), rep, P);
    TensorOp g2 = on_aux(g_matrix(P), N), g2i = on_aux(g_matrix(P).inverse(), N);
    TensorOp lhs = Gtt * TensorOp(kron_mat(Kcb(1.0 / (x * P.p)), I2), {N, 2}) * g2 *
                   l_operator(LaxKind::Lcheckbar, ipow(x, -2) * ipow(P.p, -5), rep, P) * g2i *
                   slot_transpose(on_aux(kbar_matrix(1.0 / x, P).data, N), 1) * Gbitt;
    Omegas w = omegas(x, P);
    Mat A = cartan_diag(rep, [&](int, int h) { return P.pw(2L * P.s0 * h) * ipow(P.q(), -h / 2); });
    Mat rhs = w.wb1 * kron_mat(A.inverse() * Kcb(P.p / x), unit(1, 1)) +
              w.wb2 * kron_mat(A * Kcb(1.0 / (x * ipow(P.p, 3))), unit(2, 2)) +
              omegabar12(x, P) * kron_mat(qh(rep, P, -3, 2) * Kcb(1.0 / (x * P.p)) * rep.F, unit(1, 2));
    return balanced_residual(lhs, TensorOp(rhs, {N, 2}), o.margin);
  });
}

// dressed reflection equation for T-type dressing; aux slots 0,1 and an L=2 quantum space
inline IdentityReport check_dressT(const Params& P) {
  return run_identity("bnd.dressT", P, P.tol_exact, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S), y = draw_x(S);
    ChainSpec c{2, {S.spectral(0.8, 1.25), S.spectral(0.8, 1.25)}};
    std::vector<int> d{2, 2, 2, 2};
    TensorOp K13 = embed(dressed_k_T(x, c, P), {0, 2, 3}, d);
    TensorOp K23 = embed(dressed_k_T(y, c, P), {1, 2, 3}, d);
    auto R12 = [&](const TensorOp& R) { return embed(R, {0, 1}, d); };
    TensorOp lhs = R12(r_matrix(y / x, P)) * K13 * R12(rbar_matrix(x * y, P)) * K23;
    TensorOp rhs = K23 * R12(r_matrix(1.0 / (x * y), P)) * K13 * R12(rbar_matrix(x / y, P));
    return rel_residual(lhs, rhs);
  });
}

// dressed reflection equation for Q-type dressing; Fock, aux C^2, one quantum site
inline IdentityReport check_dressQ(const Params& P, const BoundaryOptions& o = {}) {
  return run_identity("bnd.dressQ", P, P.tol_exact, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S), y = draw_x(S);
    ChainSpec c{1, {S.spectral(0.8, 1.25)}};
    int N = o.N;
    double r = 0.0;
    for (int a = 1; a <= 2; ++a) {
      FockRep rep = build_fock(a, N, P);
      std::vector<int> d{N, 2, 2};
      TensorOp K13 = embed(dressed_k_Q(a, x, c, N, P), {0, 2}, d);
      TensorOp K23 = embed(dressed_k_T(y, c, P), {1, 2}, d);
      auto L12 = [&](LaxKind k, cplx z) { return embed(l_operator(k, z, rep, P), {0, 1}, d); };
      TensorOp lhs = L12(LaxKind::L, y / x) * K13 * L12(LaxKind::Lbar, x * y) * K23;
      TensorOp rhs = K23 * L12(LaxKind::L, 1.0 / (x * y)) * K13 * L12(LaxKind::Lbar, x / y);
      r = std::max(r, balanced_residual(lhs, rhs, o.margin + 2));
    }
    return r;
  });
}

}  // namespace oqis
