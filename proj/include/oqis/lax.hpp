#pragma once

#include "oqis/fock.hpp"

namespace oqis {

inline TensorOp r_matrix(cplx x, const Params& P) {
  cplx q = P.q(), lam = P.lam(), xs = ipow(x, P.s());
  cplx a = q - xs / q, b = 1.0 - xs;
  Mat R = Mat::Zero(4, 4);
  R(0, 0) = a;
  R(3, 3) = a;
  R(1, 1) = b;
  R(2, 2) = b;
  R(1, 2) = lam * ipow(x, P.s1);
  R(2, 1) = lam * ipow(x, P.s0);
  return TensorOp(R, {2, 2});
}

inline TensorOp rbar_matrix(cplx x, const Params& P) {
  cplx q = P.q(), lam = P.lam(), xs = ipow(x, -P.s());
  cplx a = q - xs / q, b = 1.0 - xs;
  Mat R = Mat::Zero(4, 4);
  R(0, 0) = a;
  R(3, 3) = a;
  R(1, 1) = b;
  R(2, 2) = b;
  R(1, 2) = lam * ipow(x, -P.s0);
  R(2, 1) = lam * ipow(x, -P.s1);
  return TensorOp(R, {2, 2});
}

// g = diag(q^{(s0-s1)/s}, q^{-(s0-s1)/s})
inline Mat g_matrix(const Params& P) {
  Mat g = Mat::Zero(2, 2);
  g(0, 0) = P.pw(P.s0 - P.s1);
  g(1, 1) = P.pw(P.s1 - P.s0);
  return g;
}

inline Mat flip2() {
  Mat m = Mat::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

inline TensorOp sigma_map(const TensorOp& A, int slot) { return flip_slot(A, slot); }

enum class LaxKind { L, Lbar, Lcheck, Lcheckbar };

inline const char* lax_name(LaxKind k) {
  switch (k) {
    case LaxKind::L: return "L";
    case LaxKind::Lbar: return "Lbar";
    case LaxKind::Lcheck: return "Lcheck";
    case LaxKind::Lcheckbar: return "Lcheckbar";
  }
  return "?";
}

inline TensorOp blocks2(const Mat& a11, const Mat& a12, const Mat& a21, const Mat& a22) {
  return TensorOp(kron_mat(a11, unit(1, 1)) + kron_mat(a12, unit(1, 2)) + kron_mat(a21, unit(2, 1)) +
                      kron_mat(a22, unit(2, 2)),
                  {static_cast<int>(a11.rows()), 2});
}

// Oscillator L-operators on Fock (x) C^2; the flavor is that of rep.
inline TensorOp l_operator(LaxKind kind, cplx x, const FockRep& rep, const Params& P) {
  cplx q = P.q(), lam = P.lam();
  int s = P.s();
  Mat hp = qh(rep, P, 1, 2), hm = qh(rep, P, -1, 2);
  bool bar = kind == LaxKind::Lbar || kind == LaxKind::Lcheckbar;
  bool check = kind == LaxKind::Lcheck || kind == LaxKind::Lcheckbar;
  cplx X = bar ? 1.0 / x : x;
  Mat a12 = bar ? Mat(lam * ipow(x, -P.s1) * rep.F * hm) : Mat(lam * ipow(x, P.s0) * rep.F * hm);
  Mat a21 = bar ? Mat(lam * ipow(x, -P.s0) * rep.E * hp) : Mat(lam * ipow(x, P.s1) * rep.E * hp);
  cplx c = ipow(X, s) / q;
  Mat a11, a22;
  if (rep.flavor == 1) {
    if (!check) {
      a11 = hp;
      a22 = hm - c * hp;
    } else {
      a11 = hp - c * hm;
      a22 = -c * hp;
    }
  } else {
    if (!check) {
      a11 = hp - c * hm;
      a22 = hm;
    } else {
      a11 = -c * hm;
      a22 = hm - c * hp;
    }
  }
  return blocks2(a11, a12, a21, a22);
}

// 1 (x) X on Fock (x) C^2
inline TensorOp on_aux(const Mat& X, int N) { return TensorOp(kron_mat(Mat::Identity(N, N), X), {N, 2}); }

// full transposition t1 t2 on Fock (x) C^2
inline TensorOp t1t2(const TensorOp& A, const FockRep& rep, const Params& P) {
  return slot_transpose(t_slot(A, 0, rep, P), 1);
}

// ---------------------------------------------------------------- identity registry

struct LaxOptions {
  int N = 32;
  int margin = 4;
};

inline cplx draw_x(Sampler& S) { return S.spectral(); }

namespace lax_detail {

inline double both_flavors(const Params& P, int N, const std::function<double(const FockRep&)>& f) {
  double r = 0.0;
  for (int a = 1; a <= 2; ++a) r = std::max(r, f(build_fock(a, N, P)));
  return r;
}

}  // namespace lax_detail

// L Lcheckbar = Lcheckbar L = 1 - q^{-1} x^{-s}
inline IdentityReport check_LLcb(const Params& P, const LaxOptions& o = {}) {
  return run_identity("lax.LLcb", P, P.tol_exact, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S);
    return lax_detail::both_flavors(P, o.N, [&](const FockRep& rep) {
      TensorOp A = l_operator(LaxKind::L, x, rep, P), B = l_operator(LaxKind::Lcheckbar, x, rep, P);
      TensorOp c = (1.0 - ipow(x, -P.s()) / P.q()) * TensorOp::identity(A.dims);
      return std::max(trimmed_residual(A * B, c, o.margin), trimmed_residual(B * A, c, o.margin));
    });
  });
}

// Lcheck Lbar = Lbar Lcheck = 1 - q^{-1} x^{s}
inline IdentityReport check_LcLb(const Params& P, const LaxOptions& o = {}) {
  return run_identity("lax.LcLb", P, P.tol_exact, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S);
    return lax_detail::both_flavors(P, o.N, [&](const FockRep& rep) {
      TensorOp A = l_operator(LaxKind::Lcheck, x, rep, P), B = l_operator(LaxKind::Lbar, x, rep, P);
      TensorOp c = (1.0 - ipow(x, P.s()) / P.q()) * TensorOp::identity(A.dims);
      return std::max(trimmed_residual(A * B, c, o.margin), trimmed_residual(B * A, c, o.margin));
    });
  });
}

// g2 L(x q^{4/s})^{t2} g2^{-1} Lcheckbar(x)^{t2} = q^2 - q^{-1} x^{-s}, both orders
inline IdentityReport check_LcbLs(const Params& P, const LaxOptions& o = {}) {
  return run_identity("lax.LcbLs", P, P.tol_exact, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S);
    return lax_detail::both_flavors(P, o.N, [&](const FockRep& rep) {
      TensorOp g2 = on_aux(g_matrix(P), rep.N), g2i = on_aux(g_matrix(P).inverse(), rep.N);
      TensorOp A = g2 * slot_transpose(l_operator(LaxKind::L, x * P.pw(4), rep, P), 1) * g2i;
      TensorOp B = slot_transpose(l_operator(LaxKind::Lcheckbar, x, rep, P), 1);
      cplx q = P.q();
      TensorOp c = (q * q - ipow(x, -P.s()) / q) * TensorOp::identity(A.dims);
      return std::max(trimmed_residual(A * B, c, o.margin), trimmed_residual(B * A, c, o.margin));
    });
  });
}

// g2 Lcheck(x q^{4/s})^{t2} g2^{-1} Lbar(x)^{t2} = q^2 - q^3 x^{s}, both orders
inline IdentityReport check_LbLcs(const Params& P, const LaxOptions& o = {}) {
  return run_identity("lax.LbLcs", P, P.tol_exact, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S);
    return lax_detail::both_flavors(P, o.N, [&](const FockRep& rep) {
      TensorOp g2 = on_aux(g_matrix(P), rep.N), g2i = on_aux(g_matrix(P).inverse(), rep.N);
      TensorOp A = g2 * slot_transpose(l_operator(LaxKind::Lcheck, x * P.pw(4), rep, P), 1) * g2i;
      TensorOp B = slot_transpose(l_operator(LaxKind::Lbar, x, rep, P), 1);
      cplx q = P.q();
      TensorOp c = (q * q - q * q * q * ipow(x, P.s())) * TensorOp::identity(A.dims);
      return std::max(trimmed_residual(A * B, c, o.margin), trimmed_residual(B * A, c, o.margin));
    });
  });
}

// L^{t1 t2}(x) = Lbar(1/x) and the three companions
inline IdentityReport check_tt(const Params& P, const LaxOptions& o = {}) {
  return run_identity("lax.tt", P, P.tol_exact, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S);
    return lax_detail::both_flavors(P, o.N, [&](const FockRep& rep) {
      const std::pair<LaxKind, LaxKind> pairs[] = {{LaxKind::L, LaxKind::Lbar},
                                                   {LaxKind::Lbar, LaxKind::L},
                                                   {LaxKind::Lcheck, LaxKind::Lcheckbar},
                                                   {LaxKind::Lcheckbar, LaxKind::Lcheck}};
      double r = 0.0;
      for (auto [a, b] : pairs)
        r = std::max(r, trimmed_residual(t1t2(l_operator(a, x, rep, P), rep, P), l_operator(b, 1.0 / x, rep, P),
                                         o.margin));
      return r;
    });
  });
}

// L-operator acting on slots (0, k) of Fock (x) C^2 (x) C^2
inline TensorOp fock3(const TensorOp& A, int k) { return embed(A, {0, k}, {A.dims[0], 2, 2}); }
inline TensorOp fund3(const TensorOp& R, int N) { return embed(R, {1, 2}, {N, 2, 2}); }

// Yang-Baxter images with all slots finite; slots: Fock, C^2 at y, C^2 at z
inline IdentityReport check_RLL(int which, const Params& P, const LaxOptions& o = {}) {
  std::string id = "lax.RLL" + std::to_string(which);
  return run_identity(id, P, P.tol_exact, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S), y = draw_x(S), z = draw_x(S);
    return lax_detail::both_flavors(P, o.N, [&](const FockRep& rep) {
      int N = rep.N;
      TensorOp lhs, rhs;
      if (which == 1) {
        TensorOp A = fock3(l_operator(LaxKind::L, x / y, rep, P), 1);
        TensorOp B = fock3(l_operator(LaxKind::L, x / z, rep, P), 2);
        TensorOp C = fund3(r_matrix(y / z, P), N);
        lhs = A * B * C;
        rhs = C * B * A;
      } else if (which == 2) {
        TensorOp A = fock3(l_operator(LaxKind::Lbar, x / y, rep, P), 1);
        TensorOp B = fock3(l_operator(LaxKind::Lbar, x / z, rep, P), 2);
        TensorOp C = fund3(r_matrix(y / z, P), N);
        lhs = C * A * B;
        rhs = B * A * C;
      } else if (which == 3) {
        TensorOp A = fock3(l_operator(LaxKind::L, x / y, rep, P), 1);
        TensorOp B = fock3(l_operator(LaxKind::L, x / z, rep, P), 2);
        TensorOp C = fund3(rbar_matrix(y / z, P), N);
        lhs = B * A * C;
        rhs = C * A * B;
      } else {
        TensorOp A = fock3(l_operator(LaxKind::Lbar, x / y, rep, P), 1);
        TensorOp B = fock3(l_operator(LaxKind::Lbar, x / z, rep, P), 2);
        TensorOp C = fund3(rbar_matrix(y / z, P), N);
        lhs = C * B * A;
        rhs = A * B * C;
      }
      return trimmed_residual(lhs, rhs, o.margin);
    });
  });
}

// R(x) Rbar(x) = Rbar(x) R(x) = (q^2 + q^-2 - x^s - x^-s) Id
inline IdentityReport check_runitarity(const Params& P) {
  return run_identity("lax.runitarity", P, P.tol_exact, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S);
    TensorOp R = r_matrix(x, P), Rb = rbar_matrix(x, P);
    cplx q = P.q();
    TensorOp c = (q * q + 1.0 / (q * q) - ipow(x, P.s()) - ipow(x, -P.s())) * TensorOp::identity({2, 2});
    return std::max(rel_residual(R * Rb, c), rel_residual(Rb * R, c));
  });
}

// flavor-2 operators equal the zeta o (1 (x) sigma) images of flavor-1 ones
inline IdentityReport check_L2L1(const Params& P, const LaxOptions& o = {}) {
  return run_identity("lax.L2L1", P, P.tol_exact, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S);
    Params Z = zeta_params(P);
    FockRep r1 = build_fock(1, o.N, Z), r2 = build_fock(2, o.N, P);
    double r = 0.0;
    for (LaxKind k : {LaxKind::L, LaxKind::Lbar, LaxKind::Lcheck, LaxKind::Lcheckbar})
      r = std::max(r, rel_residual(l_operator(k, x, r2, P), sigma_map(l_operator(k, x, r1, Z), 1)));
    return r;
  });
}

}  // namespace oqis
