#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace oqis {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

enum class ErrorCode {
  DegenerateQ,
  SeriesNotConverged,
  PoleHit,
  ShapeMismatch,
  NoSolution,
  UnknownIdentity,
  TruncationNotConverged,
  TraceDiverging,
  TailTooLarge,
  DegenerateSpectrum,
  ConfigInvalid,
  UnknownObject,
};

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::DegenerateQ: return "DegenerateQ";
    case ErrorCode::SeriesNotConverged: return "SeriesNotConverged";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::UnknownIdentity: return "UnknownIdentity";
    case ErrorCode::TruncationNotConverged: return "TruncationNotConverged";
    case ErrorCode::TraceDiverging: return "TraceDiverging";
    case ErrorCode::TailTooLarge: return "TailTooLarge";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::UnknownObject: return "UnknownObject";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode c, const std::string& what)
      : std::runtime_error(std::string(error_name(c)) + ": " + what), code_(c) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// z^k for integer k by repeated squaring, so results are reproducible bit for bit
inline cplx ipow(cplx z, long k) {
  if (k < 0) return cplx(1.0) / ipow(z, -k);
  cplx r(1.0), b = z;
  while (k) {
    if (k & 1) r *= b;
    b *= b;
    k >>= 1;
  }
  return r;
}

struct Params {
  cplx p{1.1, 0.12};
  int s0 = 1;
  int s1 = 1;
  cplx eps_plus{1.0, 0.0};
  cplx eps_minus{0.02, 0.01};
  cplx epsbar_plus{1.0, 0.0};
  cplx epsbar_minus{0.5, -0.2};
  double tol_exact = 1e-10;
  double tol_trace = 1e-8;
  int series_cap = 4000;
  std::uint64_t rng_seed = 20240917;
  int sample_count = 5;
  bool allow_general_s = false;

  int s() const { return s0 + s1; }
  cplx q() const { return ipow(p, s()); }
  cplx lam() const { return q() - 1.0 / q(); }
  // p^k = q^{k/s}
  cplx pw(long k) const { return ipow(p, k); }
  // q^k
  cplx qp(long k) const { return ipow(p, k * s()); }

  void validate() const {
    if (!allow_general_s && (s0 < 0 || s1 < 0))
      throw Error(ErrorCode::ConfigInvalid, "s0 and s1 must be nonnegative");
    if (s() < 1) throw Error(ErrorCode::ConfigInvalid, "s = s0+s1 must be at least 1");
    if (std::abs(p) == 0.0 || !std::isfinite(std::abs(p)))
      throw Error(ErrorCode::ConfigInvalid, "p must be finite and nonzero");
    if (std::abs(std::abs(q()) - 1.0) < 1e-6)
      throw Error(ErrorCode::ConfigInvalid, "|q| must stay away from the unit circle");
    if (eps_plus == 0.0 || eps_minus == 0.0 || epsbar_plus == 0.0 || epsbar_minus == 0.0)
      throw Error(ErrorCode::ConfigInvalid, "boundary scalars must be nonzero");
    if (tol_exact <= 0 || tol_trace <= 0) throw Error(ErrorCode::ConfigInvalid, "tolerances must be positive");
    if (series_cap < 16) throw Error(ErrorCode::ConfigInvalid, "series_cap too small");
    if (sample_count < 1) throw Error(ErrorCode::ConfigInvalid, "sample_count must be positive");
  }
};

// swaps s0<->s1, eps+<->eps-, epsbar+<->epsbar-
inline Params zeta_params(const Params& P) {
  Params Z = P;
  std::swap(Z.s0, Z.s1);
  std::swap(Z.eps_plus, Z.eps_minus);
  std::swap(Z.epsbar_plus, Z.epsbar_minus);
  return Z;
}

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_cplx(cplx z) {
  std::string s = fmt_double(z.real());
  if (!std::signbit(z.imag())) s += "+";
  return s + fmt_double(z.imag()) + "j";
}

inline std::string canonical_text(const Params& P) {
  std::ostringstream o;
  o << "p=" << fmt_cplx(P.p) << ";s0=" << P.s0 << ";s1=" << P.s1
    << ";eps_plus=" << fmt_cplx(P.eps_plus) << ";eps_minus=" << fmt_cplx(P.eps_minus)
    << ";epsbar_plus=" << fmt_cplx(P.epsbar_plus) << ";epsbar_minus=" << fmt_cplx(P.epsbar_minus)
    << ";tol_exact=" << fmt_double(P.tol_exact) << ";tol_trace=" << fmt_double(P.tol_trace)
    << ";series_cap=" << P.series_cap << ";rng_seed=" << P.rng_seed
    << ";sample_count=" << P.sample_count << ";allow_general_s=" << P.allow_general_s;
  return o.str();
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string digest(const Params& P, const std::string& extra = "") {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(canonical_text(P) + extra)));
  return buf;
}

// Frobenius-norm relative residual |A-B| / max(1,|B|)
// Frobenius-norm relative residual |A-B| / max(1,|B|)
inline double rel_residual(const Mat& A, const Mat& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw Error(ErrorCode::ShapeMismatch, "rel_residual operands differ in shape");
  return (A - B).norm() / std::max(1.0, B.norm());
}

inline double rel_residual(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// |A-B| relative to the larger of |A|, |B|
inline double strict_rel(const Mat& A, const Mat& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw Error(ErrorCode::ShapeMismatch, "strict_rel operands differ in shape");
  return (A - B).norm() / std::max({A.norm(), B.norm(), 1e-300});
}

struct IdentityReport {
  std::string id;
  std::string digest;
  int samples = 0;
  double max_residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
  long ms = 0;
  std::string note;
  bool error = false;  // computation aborted; max_residual is inf

  void finish() { pass = std::isfinite(max_residual) && max_residual < threshold; }
};

// Seeded generator with a portable mapping to doubles.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  // |x| log-uniform in [rmin, rmax], argument uniform in [-amax, amax]
  cplx spectral(double rmin = 0.8, double rmax = 1.25, double amax = M_PI) {
    double r = rmin * std::exp(uniform() * std::log(rmax / rmin));
    double a = uniform(-amax, amax);
    return std::polar(r, a);
  }
  cplx gaussian_c() {
    double u1 = std::max(uniform(), 1e-300), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(2 * M_PI * u2), r * std::sin(2 * M_PI * u2)};
  }
  Mat random_matrix(int r, int c) {
    Mat m(r, c);
    for (int j = 0; j < c; ++j)
      for (int i = 0; i < r; ++i) m(i, j) = gaussian_c();
    return m;
  }

 private:
  std::mt19937_64 eng_;
};

inline std::uint64_t seed_for(const Params& P, const std::string& id) {
  return P.rng_seed ^ fnv1a(id);
}

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  long ms() const {
    return static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - t0_)
                                 .count());
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

// Runs f(sampler) -> residual over `samples` seeded draws and keeps the worst.
template <class F>
IdentityReport run_identity(const std::string& id, const Params& P, double threshold, int samples, F&& f) {
  Stopwatch sw;
  IdentityReport r;
  r.id = id;
  r.digest = digest(P);
  r.threshold = threshold;
  Sampler S(seed_for(P, id));
  try {
    for (int k = 0; k < samples; ++k) {
      double v = f(S);
      if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
      r.max_residual = std::max(r.max_residual, v);
      ++r.samples;
    }
  } catch (const Error& e) {
    r.max_residual = std::numeric_limits<double>::infinity();
    r.note = e.what();
    r.error = true;
  }
  r.ms = sw.ms();
  r.finish();
  return r;
}

// [x]_q = (q^x - q^-x)/(q - q^-1); q^x taken as exp(x log q), integer x exact
inline cplx q_bracket(cplx x, const Params& P) {
  cplx q = P.q();
  cplx lam = q - 1.0 / q;
  if (std::abs(lam) < 1e-14) throw Error(ErrorCode::DegenerateQ, "q - 1/q vanishes");
  double xr = x.real();
  if (x.imag() == 0.0 && xr == std::round(xr) && std::abs(xr) < 1e6) {
    long k = static_cast<long>(xr);
    return (ipow(q, k) - ipow(q, -k)) / lam;
  }
  cplx lq = std::log(q);
  return (std::exp(x * lq) - std::exp(-x * lq)) / lam;
}

inline cplx q_bracket(long k, const Params& P) { return q_bracket(cplx(double(k)), P); }

// (a;b)_n, n < 0 means n = infinity
inline cplx q_pochhammer(cplx a, cplx b, long n, int cap = 100000) {
  if (n >= 0) {
    cplx r(1.0), bj(1.0);
    for (long j = 0; j < n; ++j) {
      r *= 1.0 - a * bj;
      bj *= b;
    }
    return r;
  }
  if (std::abs(b) >= 1.0)
    throw Error(ErrorCode::SeriesNotConverged, "infinite q-Pochhammer needs |base| < 1");
  cplx r(1.0), t = a;
  for (int j = 0; j < cap; ++j) {
    if (std::abs(t) < 1e-18) return r;
    r *= 1.0 - t;
    t *= b;
  }
  throw Error(ErrorCode::SeriesNotConverged, "infinite q-Pochhammer hit the term cap");
}

// (k)_b = (1-b^k)/(1-b)
inline cplx q_number(long k, cplx b) { return (1.0 - ipow(b, k)) / (1.0 - b); }

// truncated defining series of exp_b(z); throws if terms do not fall below 1e-18
inline cplx q_exp_series(cplx z, cplx b, int cap) {
  cplx sum(1.0), term(1.0);
  for (long k = 1; k <= cap; ++k) {
    term *= z / q_number(k, b);
    sum += term;
    if (!std::isfinite(std::abs(sum))) break;
    if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum))) return sum;
  }
  throw Error(ErrorCode::SeriesNotConverged, "q-exponential series did not converge");
}

// exp_b(z) from the infinite product on whichever side of the unit circle b lies
inline cplx q_exp_product(cplx z, cplx b, const Params& P) {
  double ab = std::abs(b);
  if (std::abs(ab - 1.0) < 1e-12) throw Error(ErrorCode::SeriesNotConverged, "q-exponential base on the unit circle");
  if (ab < 1.0) {
    cplx den = q_pochhammer((1.0 - b) * z, b, -1, P.series_cap);
    if (std::abs(den) < 1e-12) throw Error(ErrorCode::PoleHit, "q-exponential pole");
    return 1.0 / den;
  }
  return q_pochhammer((1.0 / b - 1.0) * z, 1.0 / b, -1, P.series_cap);
}

// exp_b(z) from the product form; inverse=true returns exp_{1/b}(-z) = 1/exp_b(z).
// When the defining series converges fast it is used as a cross-check.
inline cplx q_exp(cplx z, cplx b, const Params& P, bool inverse = false) {
  if (inverse) return q_exp(-z, 1.0 / b, P, false);
  cplx val = q_exp_product(z, b, P);
  double ab = std::abs(b);
  bool series_ok = (ab > 1.0 && std::abs(z) < 10.0) || std::abs((1.0 - b) * z) < 0.5;
  if (series_ok) {
    cplx s = q_exp_series(z, b, P.series_cap);
    if (std::abs(s - val) > 1e-9 * std::max(1.0, std::abs(val)))
      throw Error(ErrorCode::SeriesNotConverged, "q-exponential series and product disagree");
  }
  return val;
}

// sum_{k>=1} c_k y^k with c_k supplied; stops when terms drop below 1e-17 relative
template <class Coef>
cplx power_series(cplx y, Coef coef, int cap, const char* what) {
  cplx sum(0.0), yk(1.0);
  int small = 0;
  for (int k = 1; k <= cap; ++k) {
    yk *= y;
    cplx t = coef(k) * yk;
    sum += t;
    if (!std::isfinite(std::abs(sum))) break;
    if (std::abs(t) < 1e-17 * std::max(1.0, std::abs(sum))) {
      if (++small >= 3) return sum;
    } else {
      small = 0;
    }
  }
  throw Error(ErrorCode::SeriesNotConverged, what);
}

// radius-of-convergence guard: coefficients grow like rate^k
inline void require_disc(cplx y, double rate, const char* what) {
  if (std::abs(y) * rate >= 1.0) throw Error(ErrorCode::SeriesNotConverged, what);
}

struct NormFunctions {
  cplx phi;
  cplx phi1;
  cplx phi1_check;
};

// Lambda(y) = sum (q^{2k}+q^{-2k}) y^k / (k (q^k+q^{-k}))
inline cplx Lambda_fn(cplx y, const Params& P) {
  cplx q = P.q();
  double rate = std::max(std::abs(q), 1.0 / std::abs(q));
  require_disc(y, rate, "Lambda series outside its disc");
  return power_series(
      y, [&](int k) { return (ipow(q, 2 * k) + ipow(q, -2 * k)) / (double(k) * (ipow(q, k) + ipow(q, -k))); },
      P.series_cap, "Lambda series did not converge");
}

// Phi(y) = sum y^k / (k (q^k+q^{-k}))
inline cplx Phi_fn(cplx y, const Params& P) {
  cplx q = P.q();
  double rate = std::min(std::abs(q), 1.0 / std::abs(q));
  require_disc(y, rate, "Phi series outside its disc");
  return power_series(
      y, [&](int k) { return 1.0 / (double(k) * (ipow(q, k) + ipow(q, -k))); }, P.series_cap,
      "Phi series did not converge");
}

inline cplx phi_fn(cplx x, const Params& P) { return std::exp(-Lambda_fn(ipow(x, P.s()) / P.q(), P)); }
inline cplx phi1_fn(cplx x, const Params& P) { return std::exp(-Phi_fn(ipow(x, P.s()), P)); }
inline cplx phi1_check_fn(cplx x, const Params& P) {
  cplx xs = ipow(x, P.s());
  cplx q = P.q();
  return (-1.0 / (xs * q)) * std::exp(-Phi_fn(xs * q * q, P));
}

inline NormFunctions norm_functions(cplx x, const Params& P) {
  return {phi_fn(x, P), phi1_fn(x, P), phi1_check_fn(x, P)};
}

inline IdentityReport check_qexp_inverse(const Params& P) {
  return run_identity("core.qexp_inverse", P, 1e-12, 100, [&](Sampler& S) {
    cplx z = S.gaussian_c();
    cplx q2 = P.qp(2);
    double r = 0.0;
    for (cplx b : {q2, 1.0 / q2}) r = std::max(r, rel_residual(q_exp(z, b, P) * q_exp(-z, 1.0 / b, P), cplx(1.0)));
    return r;
  });
}

inline IdentityReport check_qexp_series(const Params& P) {
  return run_identity("core.qexp_series", P, 1e-12, P.sample_count, [&](Sampler& S) {
    cplx z = 0.3 * S.gaussian_c();
    cplx q2 = P.qp(2);
    double r = 0.0;
    for (cplx b : {q2, 1.0 / q2}) {
      cplx v = q_exp_product(z, b, P);
      r = std::max(r, std::abs(v - q_exp_series(z, b, P.series_cap)) / std::max(1.0, std::abs(v)));
    }
    return r;
  });
}

// phi1(x) phi1check(x) = 1 - q^{-1} x^{-s}
inline IdentityReport check_norm_identity(const Params& P) {
  return run_identity("core.norm_identity", P, 1e-12, 20, [&](Sampler& S) {
    double aq = std::abs(P.q());
    double m = 0.5 * std::min(aq, 1.0 / aq);
    double r = std::pow(m * S.uniform(0.5, 1.0), 1.0 / P.s());
    cplx x = std::polar(r, S.uniform(-M_PI, M_PI));
    cplx want = 1.0 - ipow(x, -P.s()) / P.q();
    return std::abs(phi1_fn(x, P) * phi1_check_fn(x, P) - want) / std::abs(want);
  });
}

}  // namespace oqis
