#pragma once

#include "oqis/boundary.hpp"

#include <Eigen/Eigenvalues>

#include <optional>

namespace oqis {

inline ChainSpec default_chain(int L) {
  static const std::vector<cplx> xi{{1.1, 0.1}, {0.8, -0.2}, {1.05, 0.25}, {0.9, 0.15}, {1.2, -0.1}};
  if (L < 1 || L > static_cast<int>(xi.size())) throw Error(ErrorCode::ConfigInvalid, "chain length out of range");
  return ChainSpec{L, std::vector<cplx>(xi.begin(), xi.begin() + L)};
}

inline ChainSpec sample_chain(Sampler& S, int L) {
  ChainSpec c{L, {}};
  for (int k = 0; k < L; ++k) c.xi.push_back(S.spectral(0.8, 1.25));
  return c;
}

inline std::vector<int> quantum_dims(int L) { return std::vector<int>(L, 2); }

inline TensorOp flip_all(const TensorOp& A) {
  TensorOp B = A;
  for (int k = 0; k < A.slots(); ++k) B = flip_slot(B, k);
  return B;
}

// sum of sigma^3 over the sites, diagonal
inline TensorOp total_sz(int L) {
  long n = 1L << L;
  Mat D = Mat::Zero(n, n);
  for (long i = 0; i < n; ++i) {
    int up = 0;
    for (int k = 0; k < L; ++k) up += ((i >> k) & 1) ? -1 : 1;
    D(i, i) = static_cast<double>(up);
  }
  return TensorOp(D, quantum_dims(L));
}

// diag(q, 1/q) on every site, raised to the power e
inline TensorOp eta_matrix(int L, int e, const Params& P) {
  long n = 1L << L;
  Mat D = Mat::Zero(n, n);
  for (long i = 0; i < n; ++i) {
    long k = 0;
    for (int j = 0; j < L; ++j) k += ((i >> j) & 1) ? -1 : 1;
    D(i, i) = ipow(P.q(), k * e);
  }
  return TensorOp(D, quantum_dims(L));
}

inline TensorOp t_operator(cplx x, const ChainSpec& c, const Params& P) {
  c.validate(false);
  auto d = chain_dims(2, c.L);
  TensorOp M = embed(kbar_matrix(1.0 / x, P), {0}, d) * dressed_k_T(x, c, P);
  return partial_trace(M, 0);
}

struct QPolicy {
  int N0 = 24;
  int cap = 192;
  double tol = 1e-8;
};

struct QResult {
  TensorOp Q;
  int N = 0;
  double stabilization = 0.0;  // |Q_N - Q_2N| / |Q_2N| at the accepted cutoff
  std::vector<double> level_weight;
};

namespace qdetail {

// L-operator on Fock (x) C^2 with entry (a,b) of the Fock slot scaled by K_b/K_a
inline TensorOp gauge_lax(TensorOp L, const KOperator& K) {
  auto st = strides_of(L.dims);
  for (long i = 0; i < L.side(); ++i)
    for (long j = 0; j < L.side(); ++j) {
      cplx& v = L.data(i, j);
      if (v == 0.0) continue;
      int a = static_cast<int>(i / st[0]), b = static_cast<int>(j / st[0]);
      if (b == a + 1) v *= K.ratio(a);
      else if (b == a - 1) v /= K.ratio(b);
      else if (b != a) throw Error(ErrorCode::ShapeMismatch, "Lax operator couples distant levels");
    }
  return L;
}

inline void check_tail(const std::vector<double>& w, int L) {
  int N = static_cast<int>(w.size());
  int hi = N - L - 2, lo = (3 * N) / 4;
  for (double v : w)
    if (!std::isfinite(v)) throw Error(ErrorCode::TraceDiverging, "level weights overflow");
  if (hi <= lo) return;
  if (w[hi] > w[lo] && w[hi] > 0.0) throw Error(ErrorCode::TraceDiverging, "level weights grow over the top quartile");
}

}  // namespace qdetail

// Fock trace at a fixed cutoff. The K-operators are moved next to each other by
// conjugating the left string, so only level ratios and the product K(x) KcheckBar(1/x) appear.
inline QResult q_operator_at(int flavor, cplx x, const ChainSpec& c, int N, const Params& P) {
  FockRep rep = build_fock(flavor, N, P);
  KOperator K = k_operator(KOpKind::K, flavor, x, N, P, false);
  KOperator Kc = k_operator(KOpKind::KcheckBar, flavor, 1.0 / x, N, P, false);
  auto d = chain_dims(N, c.L);
  long D = 1L << c.L;
  long n = N * D;
  SpMat A(n, n), B(n, n);
  A.setIdentity();
  B.setIdentity();
  for (int k = c.L - 1; k >= 0; --k) {
    TensorOp Lk = qdetail::gauge_lax(l_operator(LaxKind::L, 1.0 / (x * c.xi[k]), rep, P), K);
    SpMat t = A * embed_sparse(Lk, {0, k + 1}, d);
    A = t;
  }
  for (int k = 0; k < c.L; ++k) {
    SpMat t = B * embed_sparse(l_operator(LaxKind::Lbar, x / c.xi[k], rep, P), {0, k + 1}, d);
    B = t;
  }
  SpMat M = A * B;
  QResult r;
  r.N = N;
  Mat Q = Mat::Zero(D, D);
  cplx W = K.first * Kc.first;
  for (int lev = 0; lev < N; ++lev) {
    if (lev > 0) W *= K.ratio(lev - 1) * Kc.ratio(lev - 1);
    Mat blk = Mat::Zero(D, D);
    for (long i = 0; i < D; ++i) {
      long row = lev * D + i;
      for (SpMat::InnerIterator it(M, row); it; ++it) {
        long col = it.col() - lev * D;
        if (col >= 0 && col < D) blk(i, col) = it.value();
      }
    }
    double wn = std::abs(W) * blk.norm();
    r.level_weight.push_back(wn);
    if (W != 0.0) Q += W * blk;
  }
  qdetail::check_tail(r.level_weight, c.L);
  r.Q = TensorOp(Q, quantum_dims(c.L));
  return r;
}

inline QResult q_operator(int flavor, cplx x, const ChainSpec& c, const Params& P, const QPolicy& pol = {}) {
  c.validate(false);
  int N = pol.N0;
  QResult prev = q_operator_at(flavor, x, c, N, P);
  while (true) {
    if (2 * N > pol.cap) throw Error(ErrorCode::TruncationNotConverged, "Fock cutoff cap reached");
    N *= 2;
    QResult next = q_operator_at(flavor, x, c, N, P);
    next.stabilization = (prev.Q.data - next.Q.data).norm() / std::max(next.Q.data.norm(), 1e-300);
    if (next.stabilization < pol.tol) return next;
    prev = std::move(next);
  }
}

inline QPolicy policy_of(const Params& P) {
  QPolicy q;
  q.tol = P.tol_trace;
  return q;
}

struct TQCoefficients {
  Omegas w;
  cplx chi1, chi2;
  TensorOp eta, eta_inv;  // eta^{3-2a} and its inverse
};

inline TQCoefficients tq_coefficients(int flavor, cplx x, const ChainSpec& c, const Params& P) {
  TQCoefficients t;
  t.w = omegas(x, flavor == 1 ? P : zeta_params(P));
  cplx q = P.q();
  int s = P.s();
  t.chi1 = ipow(q, c.L);
  t.chi2 = ipow(q, c.L);
  for (cplx z : c.xi) {
    cplx a = ipow(x * z, -s), b = ipow(x / z, -s);
    t.chi1 *= (1.0 - a / (q * q)) * (1.0 - b / (q * q));
    t.chi2 *= (1.0 - a) * (1.0 - b);
  }
  int e = flavor == 1 ? 1 : -1;
  t.eta = eta_matrix(c.L, e, P);
  t.eta_inv = eta_matrix(c.L, -e, P);
  return t;
}

struct TQTerms {
  TensorOp lhs, rhs;
};

// (q^2 - q^4 x^{2s}) Q(px) T(x) against w1 wb1 chi1 Q(x/p) eta^{3-2a} + w2 wb2 chi2 Q(p^3 x) eta^{2a-3}
inline TQTerms tq_terms(int flavor, cplx x, const ChainSpec& c, const Params& P, const QPolicy& pol) {
  cplx q = P.q(), p = P.p;
  TQCoefficients k = tq_coefficients(flavor, x, c, P);
  TensorOp T = t_operator(x, c, P);
  TensorOp Qp = q_operator(flavor, p * x, c, P, pol).Q;
  TensorOp Qm = q_operator(flavor, x / p, c, P, pol).Q;
  TensorOp Q3 = q_operator(flavor, ipow(p, 3) * x, c, P, pol).Q;
  TQTerms r;
  r.lhs = (q * q - ipow(q, 4) * ipow(x, 2 * P.s())) * (Qp * T);
  r.rhs = (k.w.w1 * k.w.wb1 * k.chi1) * (Qm * k.eta) + (k.w.w2 * k.w.wb2 * k.chi2) * (Q3 * k.eta_inv);
  return r;
}

inline double strict_residual(const Mat& A, const Mat& B) { return strict_rel(A, B); }

inline double tq_residual_at(int flavor, cplx x, const ChainSpec& c, const Params& P, const QPolicy& pol) {
  TQTerms t = tq_terms(flavor, x, c, P, pol);
  return strict_residual(t.lhs.data, t.rhs.data);
}

// flavor 2 is evaluated at zeta(P), where its Fock trace converges
inline IdentityReport check_tq(int flavor, int L, const Params& P, QPolicy pol = {}) {
  std::string id = "transfer.tq.a" + std::to_string(flavor) + ".L" + std::to_string(L);
  const Params Pe = flavor == 1 ? P : zeta_params(P);
  pol.tol = P.tol_trace;
  return run_identity(id, P, P.tol_trace, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S);
    ChainSpec c = sample_chain(S, L);
    return tq_residual_at(flavor, x, c, Pe, pol);
  });
}

inline double comm_residual(const TensorOp& A, const TensorOp& B) { return strict_residual((A * B).data, (B * A).data); }

enum class CommPair { TT, QT, QQ };

inline double commutator_at(CommPair pr, cplx x, cplx y, int flavor, const ChainSpec& c, const Params& P, const QPolicy& pol) {
  switch (pr) {
    case CommPair::TT: return comm_residual(t_operator(x, c, P), t_operator(y, c, P));
    case CommPair::QT: return comm_residual(q_operator(flavor, x, c, P, pol).Q, t_operator(y, c, P));
    case CommPair::QQ: return comm_residual(q_operator(flavor, x, c, P, pol).Q, q_operator(flavor, y, c, P, pol).Q);
  }
  return 0.0;
}

inline IdentityReport check_commutator(CommPair pr, int L, const Params& P, int flavor = 1, QPolicy pol = {}) {
  static const char* nm[] = {"TT", "QT", "QQ"};
  std::string id = std::string("transfer.comm.") + nm[static_cast<int>(pr)] + (pr == CommPair::TT ? "" : ".a" + std::to_string(flavor)) +
                   ".L" + std::to_string(L);
  const Params Pe = flavor == 1 ? P : zeta_params(P);
  pol.tol = P.tol_trace;
  return run_identity(id, P, 1e-9, 3, [&](Sampler& S) {
    cplx x = draw_x(S), y = draw_x(S);
    ChainSpec c = sample_chain(S, L);
    return commutator_at(pr, x, y, flavor, c, Pe, pol);
  });
}

// T(x; zeta P) = sigma T(x; P) sigma
inline IdentityReport check_invT(int L, const Params& P) {
  return run_identity("transfer.invT.L" + std::to_string(L), P, 1e-9, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S);
    ChainSpec c = sample_chain(S, L);
    return strict_residual(t_operator(x, c, zeta_params(P)).data, flip_all(t_operator(x, c, P)).data);
  });
}

// Q2(x; zeta P) = sigma Q1(x; P) sigma
inline IdentityReport check_Q1toQ2(int L, const Params& P, QPolicy pol = {}) {
  pol.tol = P.tol_trace;
  return run_identity("transfer.Q1toQ2.L" + std::to_string(L), P, 1e-9, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S);
    ChainSpec c = sample_chain(S, L);
    TensorOp Q2 = q_operator(2, x, c, zeta_params(P), pol).Q;
    return strict_residual(Q2.data, flip_all(q_operator(1, x, c, P, pol).Q).data);
  });
}

inline IdentityReport check_sz(bool q_side, int L, const Params& P, QPolicy pol = {}) {
  std::string id = std::string(q_side ? "transfer.szQ" : "transfer.szT") + ".L" + std::to_string(L);
  pol.tol = P.tol_trace;
  return run_identity(id, P, q_side ? 1e-10 : 1e-12, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S);
    ChainSpec c = sample_chain(S, L);
    TensorOp A = q_side ? q_operator(1, x, c, P, pol).Q : t_operator(x, c, P);
    return comm_residual(A, total_sz(L));
  });
}

// |Q_N - Q_2N| / |Q_2N| at the initial cutoff
inline IdentityReport check_qcutoff(int L, const Params& P, QPolicy pol = {}) {
  return run_identity("transfer.qcutoff.L" + std::to_string(L), P, P.tol_trace, P.sample_count, [&](Sampler& S) {
    cplx x = draw_x(S);
    ChainSpec c = sample_chain(S, L);
    TensorOp a = q_operator_at(1, x, c, pol.N0, P).Q, b = q_operator_at(1, x, c, 2 * pol.N0, P).Q;
    return (a.data - b.data).norm() / std::max(b.data.norm(), 1e-300);
  });
}

// ---------------------------------------------------------------- spectrum

struct SpectrumRow {
  int point = 0;
  cplx x;
  int eig = 0;
  cplx t, q;
  double tq = 0.0;
};

struct BetheCandidate {
  int eig = 0;
  cplx xs;  // x^s at a local minimum of |Q eigenvalue| along the grid
  double abs_q = 0.0;
};

struct SpectrumReport {
  bool degenerate = false;
  double separation = 0.0;
  double leakage = 0.0;
  double max_tq = 0.0;
  double commutator = 0.0;  // worst [T,T] / [Q,T] residual against the reference point
  std::vector<SpectrumRow> rows;
  std::vector<BetheCandidate> bethe;
};

inline std::vector<cplx> default_grid(int n) {
  std::vector<cplx> g;
  for (int j = 0; j < n; ++j) {
    double u = n > 1 ? static_cast<double>(j) / (n - 1) : 0.5;
    g.push_back(std::polar(0.85 + 0.3 * u, -1.2 + 2.4 * u));
  }
  return g;
}

inline double offdiag_ratio(const Mat& M) {
  Mat d = M.diagonal().asDiagonal();
  return (M - d).norm() / std::max(d.norm(), 1e-300);
}

inline SpectrumReport spectrum(const std::vector<cplx>& grid, int flavor, const ChainSpec& c, const Params& P0,
                               QPolicy pol = {}, cplx x_ref = cplx(0.97, 0.13)) {
  SpectrumReport rep;
  if (grid.empty()) return rep;
  const Params P = flavor == 1 ? P0 : zeta_params(P0);
  pol.tol = P0.tol_trace;
  TensorOp T0 = t_operator(x_ref, c, P);
  std::optional<TensorOp> Q0;
  std::optional<Error> qerr;
  try {
    Q0 = q_operator(flavor, x_ref, c, P, pol).Q;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TraceDiverging && e.code() != ErrorCode::TruncationNotConverged) throw;
    qerr = e;
  }
  // a generic combination with Q separates eigenvalues shared by T alone
  Mat M = T0.data;
  if (Q0) M += cplx(0.37, 0.21) * T0.data.norm() / std::max(Q0->data.norm(), 1e-300) * Q0->data;
  Eigen::ComplexEigenSolver<Mat> es(M);
  Vec ev = es.eigenvalues();
  double scale = ev.cwiseAbs().maxCoeff(), sep = std::numeric_limits<double>::infinity();
  for (long i = 0; i < ev.size(); ++i)
    for (long j = i + 1; j < ev.size(); ++j) sep = std::min(sep, std::abs(ev(i) - ev(j)));
  rep.separation = sep / std::max(scale, 1e-300);
  if (rep.separation < 1e-6) {
    rep.degenerate = true;
    for (cplx x : grid) {
      rep.commutator = std::max(rep.commutator, commutator_at(CommPair::TT, x, x_ref, flavor, c, P, pol));
      if (Q0) rep.commutator = std::max(rep.commutator, commutator_at(CommPair::QT, x, x_ref, flavor, c, P, pol));
    }
    return rep;
  }
  if (qerr) throw *qerr;
  Mat V = es.eigenvectors();
  Eigen::PartialPivLU<Mat> lu(V);
  auto to_basis = [&](const TensorOp& A) { return Mat(lu.solve(A.data * V)); };
  TQCoefficients k0 = tq_coefficients(flavor, grid[0], c, P);
  Vec eta = to_basis(k0.eta).diagonal();
  cplx q = P.q(), p = P.p;
  long D = V.cols();
  std::vector<std::vector<double>> absq(D);
  for (size_t g = 0; g < grid.size(); ++g) {
    cplx x = grid[g];
    TQCoefficients k = tq_coefficients(flavor, x, c, P);
    Mat T = to_basis(t_operator(x, c, P));
    Mat Qx = to_basis(q_operator(flavor, x, c, P, pol).Q);
    Mat Qp = to_basis(q_operator(flavor, p * x, c, P, pol).Q);
    Mat Qm = to_basis(q_operator(flavor, x / p, c, P, pol).Q);
    Mat Q3 = to_basis(q_operator(flavor, ipow(p, 3) * x, c, P, pol).Q);
    for (const Mat* m : {&T, &Qx, &Qp, &Qm, &Q3}) rep.leakage = std::max(rep.leakage, offdiag_ratio(*m));
    cplx c0 = q * q - ipow(q, 4) * ipow(x, 2 * P.s());
    cplx c1 = k.w.w1 * k.w.wb1 * k.chi1, c2 = k.w.w2 * k.w.wb2 * k.chi2;
    for (long i = 0; i < D; ++i) {
      cplx et = flavor == 1 ? eta(i) : 1.0 / eta(i);
      cplx lhs = c0 * Qp(i, i) * T(i, i);
      cplx a = c1 * Qm(i, i) * et, b = c2 * Q3(i, i) / et;
      double res = std::abs(lhs - a - b) / std::max({std::abs(lhs), std::abs(a), std::abs(b), 1e-300});
      rep.rows.push_back({static_cast<int>(g), x, static_cast<int>(i), T(i, i), Qx(i, i), res});
      rep.max_tq = std::max(rep.max_tq, res);
      absq[i].push_back(std::abs(Qx(i, i)));
    }
  }
  for (long i = 0; i < D; ++i)
    for (size_t g = 1; g + 1 < grid.size(); ++g)
      if (absq[i][g] < absq[i][g - 1] && absq[i][g] < absq[i][g + 1])
        rep.bethe.push_back({static_cast<int>(i), ipow(grid[g], P.s()), absq[i][g]});
  return rep;
}

inline void write_spectrum(std::ostream& os, const SpectrumReport& r) {
  os << "# eig_index re(T) im(T) re(Q) im(Q) tq_residual\n";
  if (r.degenerate) os << "# degenerate spectrum; commutator residual " << fmt_double(r.commutator) << '\n';
  int last = -1;
  for (const auto& row : r.rows) {
    if (row.point != last) {
      os << "# point " << row.point << " x " << fmt_cplx(row.x) << '\n';
      last = row.point;
    }
    os << row.eig << ' ' << fmt_double(row.t.real()) << ' ' << fmt_double(row.t.imag()) << ' ' << fmt_double(row.q.real())
       << ' ' << fmt_double(row.q.imag()) << ' ' << fmt_double(row.tq) << '\n';
  }
  if (!r.rows.empty()) os << "# leakage " << fmt_double(r.leakage) << " max_tq " << fmt_double(r.max_tq) << '\n';
  for (const auto& b : r.bethe)
    os << "# bethe_candidate eig " << b.eig << " xs " << fmt_cplx(b.xs) << " absQ " << fmt_double(b.abs_q) << '\n';
}

}  // namespace oqis
