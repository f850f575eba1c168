#pragma once

#include "oqis/config.hpp"
#include "oqis/ktcheck.hpp"

#include <fnmatch.h>

#include <atomic>
#include <filesystem>
#include <functional>
#include <thread>

namespace oqis {

struct RegistryEntry {
  std::string id;
  std::function<IdentityReport(const RunConfig&)> run;
};

inline IdentityReport spectrum_report(const std::string& id, const RunConfig& c, bool leakage) {
  Stopwatch sw;
  IdentityReport r;
  r.id = id;
  r.digest = digest(c.params);
  r.threshold = leakage ? 1e-8 : 1e-7;
  try {
    SpectrumReport s = spectrum(default_grid(20), 1, default_chain(2), c.params, c.qpolicy);
    r.samples = 20;
    r.max_residual = s.degenerate ? std::numeric_limits<double>::infinity() : (leakage ? s.leakage : s.max_tq);
    if (s.degenerate) r.note = "degenerate spectrum";
  } catch (const Error& e) {
    r.max_residual = std::numeric_limits<double>::infinity();
    r.note = e.what();
    r.error = true;
  }
  r.ms = sw.ms();
  r.finish();
  return r;
}

inline const std::vector<RegistryEntry>& registry() {
  static const std::vector<RegistryEntry> reg = [] {
    std::vector<RegistryEntry> v;
    auto add = [&](std::string id, std::function<IdentityReport(const RunConfig&)> f) { v.push_back({std::move(id), std::move(f)}); };
    auto lax = [](const RunConfig& c) { return LaxOptions{c.fock_cutoff, 4}; };
    auto bnd = [](const RunConfig& c) { return BoundaryOptions{c.fock_cutoff, 4}; };

    add("core.qexp_inverse", [](const RunConfig& c) { return check_qexp_inverse(c.params); });
    add("core.qexp_series", [](const RunConfig& c) { return check_qexp_series(c.params); });
    add("core.norm_identity", [](const RunConfig& c) { return check_norm_identity(c.params); });

    add("lax.LLcb", [=](const RunConfig& c) { return check_LLcb(c.params, lax(c)); });
    add("lax.LcLb", [=](const RunConfig& c) { return check_LcLb(c.params, lax(c)); });
    add("lax.LcbLs", [=](const RunConfig& c) { return check_LcbLs(c.params, lax(c)); });
    add("lax.LbLcs", [=](const RunConfig& c) { return check_LbLcs(c.params, lax(c)); });
    add("lax.tt", [=](const RunConfig& c) { return check_tt(c.params, lax(c)); });
    for (int k = 1; k <= 4; ++k)
      add("lax.RLL" + std::to_string(k), [=](const RunConfig& c) { return check_RLL(k, c.params, lax(c)); });
    add("lax.runitarity", [](const RunConfig& c) { return check_runitarity(c.params); });
    add("lax.L2L1", [=](const RunConfig& c) { return check_L2L1(c.params, lax(c)); });

    add("bnd.refeq0", [](const RunConfig& c) { return check_refeq0(c.params); });
    add("bnd.refeqdual", [](const RunConfig& c) { return check_refeqdual(c.params); });
    add("bnd.kbar_transform", [](const RunConfig& c) { return check_kbar_transform(c.params); });
    add("bnd.kcheck_transform", [=](const RunConfig& c) { return check_kcheck_transform(c.params, bnd(c)); });
    add("bnd.inv1", [](const RunConfig& c) { return check_inv1(c.params); });
    add("bnd.refeqlim1", [=](const RunConfig& c) { return check_refeqlim1(c.params, bnd(c)); });
    add("bnd.refeqlim2", [=](const RunConfig& c) { return check_refeqlim2(c.params, bnd(c)); });
    for (const auto& g : deltaconj_gens())
      add("bnd.deltaconj." + g, [=](const RunConfig& c) { return check_deltaconj(g, c.params, bnd(c)); });
    add("bnd.GL1LG", [=](const RunConfig& c) { return check_GL(false, c.params, bnd(c)); });
    add("bnd.GLb1LbG", [=](const RunConfig& c) { return check_GL(true, c.params, bnd(c)); });
    add("bnd.GKLbKG", [=](const RunConfig& c) { return check_GKLbKG(c.params, bnd(c)); });
    add("bnd.GKbLbKbG", [=](const RunConfig& c) { return check_GKbLbKbG(c.params, bnd(c)); });
    add("bnd.dressT", [](const RunConfig& c) { return check_dressT(c.params); });
    add("bnd.dressQ", [=](const RunConfig& c) { return check_dressQ(c.params, bnd(c)); });

    for (int a = 1; a <= 2; ++a)
      for (int L = 1; L <= 3; ++L) {
        std::string id = "transfer.tq.a" + std::to_string(a) + ".L" + std::to_string(L);
        add(id, [=](const RunConfig& c) { return check_tq(a, L, c.params, c.qpolicy); });
      }
    for (int L = 1; L <= 3; ++L) {
      std::string l = ".L" + std::to_string(L);
      add("transfer.comm.TT" + l, [=](const RunConfig& c) { return check_commutator(CommPair::TT, L, c.params, 1, c.qpolicy); });
      for (int a = 1; a <= 2; ++a) {
        std::string fa = ".a" + std::to_string(a);
        add("transfer.comm.QT" + fa + l, [=](const RunConfig& c) { return check_commutator(CommPair::QT, L, c.params, a, c.qpolicy); });
        add("transfer.comm.QQ" + fa + l, [=](const RunConfig& c) { return check_commutator(CommPair::QQ, L, c.params, a, c.qpolicy); });
      }
    }
    for (int L = 1; L <= 3; ++L) {
      std::string l = ".L" + std::to_string(L);
      add("transfer.invT" + l, [=](const RunConfig& c) { return check_invT(L, c.params); });
      add("transfer.Q1toQ2" + l, [=](const RunConfig& c) { return check_Q1toQ2(L, c.params, c.qpolicy); });
      add("transfer.szT" + l, [=](const RunConfig& c) { return check_sz(false, L, c.params, c.qpolicy); });
      add("transfer.szQ" + l, [=](const RunConfig& c) { return check_sz(true, L, c.params, c.qpolicy); });
    }
    add("transfer.qcutoff.L2", [](const RunConfig& c) { return check_qcutoff(2, c.params, c.qpolicy); });
    add("transfer.spectrum.tq", [](const RunConfig& c) { return spectrum_report("transfer.spectrum.tq", c, false); });
    add("transfer.spectrum.leakage", [](const RunConfig& c) { return spectrum_report("transfer.spectrum.leakage", c, true); });

    add("kt.casimir", [](const RunConfig& c) { return check_casimir(c.params); });
    add("kt.ck", [](const RunConfig& c) { return check_ck(c.params); });
    add("kt.rootvec", [](const RunConfig& c) { return check_rootvec(c.params); });
    add("kt.reconR", [](const RunConfig& c) { return check_reconR(c.params, c.kmax); });
    add("kt.reconL1", [](const RunConfig& c) { return check_reconL1(c.params, c.kmax); });
    return v;
  }();
  return reg;
}

inline bool glob_match(const std::string& pattern, const std::string& id) {
  return fnmatch(pattern.c_str(), id.c_str(), 0) == 0;
}

// registry order, each entry at most once
inline std::vector<const RegistryEntry*> select_identities(const std::vector<std::string>& globs) {
  std::vector<const RegistryEntry*> out;
  for (const auto& e : registry())
    for (const auto& g : globs)
      if (glob_match(g, e.id)) {
        out.push_back(&e);
        break;
      }
  return out;
}

struct RunOutcome {
  std::vector<IdentityReport> reports;
  bool compute_error = false;
  bool all_pass = true;
};

inline IdentityReport run_entry(const RegistryEntry& e, const RunConfig& c) {
  IdentityReport r;
  try {
    r = e.run(c);
  } catch (const Error& err) {
    r = IdentityReport{};
    r.id = e.id;
    r.digest = digest(c.params);
    r.max_residual = std::numeric_limits<double>::infinity();
    r.note = err.what();
    r.error = true;
    r.finish();
  }
  if (!c.timing) r.ms = 0;
  return r;
}

// entries run on a small pool; the report keeps selection order
inline RunOutcome run_identities(const std::vector<const RegistryEntry*>& sel, const RunConfig& c,
                                 const std::function<void(const IdentityReport&)>& progress = {}, unsigned workers = 0) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, std::max<size_t>(1, sel.size()));
  RunOutcome out;
  out.reports.resize(sel.size());
  if (workers == 1) {
    for (size_t k = 0; k < sel.size(); ++k) {
      out.reports[k] = run_entry(*sel[k], c);
      if (progress) progress(out.reports[k]);
    }
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t k; (k = next++) < sel.size();) out.reports[k] = run_entry(*sel[k], c);
      });
    for (auto& t : pool) t.join();
    if (progress)
      for (const auto& r : out.reports) progress(r);
  }
  for (const auto& r : out.reports) {
    out.compute_error = out.compute_error || r.error;
    out.all_pass = out.all_pass && r.pass;
  }
  return out;
}

inline void write_tsv(std::ostream& os, const std::vector<IdentityReport>& rs) {
  os << "id\tdigest\tsamples\tmax_residual\tthreshold\tpass\tms\n";
  for (const auto& r : rs)
    os << r.id << '\t' << r.digest << '\t' << r.samples << '\t' << fmt_double(r.max_residual) << '\t' << fmt_double(r.threshold)
       << '\t' << (r.pass ? "pass" : "fail") << '\t' << r.ms << '\n';
}

// write to a sibling temporary and rename, so readers never see a partial file
inline void write_atomic(const std::string& path, const std::function<void(std::ostream&)>& body) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) throw Error(ErrorCode::ConfigInvalid, "cannot write " + tmp.string());
    body(o);
    o.flush();
    if (!o) throw Error(ErrorCode::ConfigInvalid, "write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

// identities of the tq command: fixed chain from the config, n seeded spectral points
inline std::vector<RegistryEntry> tq_suite(int points) {
  std::vector<RegistryEntry> v;
  for (int a = 1; a <= 2; ++a)
    v.push_back({"tq.chain.a" + std::to_string(a), [=](const RunConfig& c) {
                   const Params Pe = a == 1 ? c.params : zeta_params(c.params);
                   QPolicy pol = c.qpolicy;
                   pol.tol = c.params.tol_trace;
                   return run_identity("tq.chain.a" + std::to_string(a), c.params, c.params.tol_trace, points,
                                       [&](Sampler& S) { return tq_residual_at(a, draw_x(S), c.chain, Pe, pol); });
                 }});
  struct Pair {
    const char* name;
    CommPair pr;
    int a;
  };
  for (Pair p : {Pair{"TT", CommPair::TT, 1}, Pair{"QT.a1", CommPair::QT, 1}, Pair{"QT.a2", CommPair::QT, 2},
                 Pair{"QQ.a1", CommPair::QQ, 1}, Pair{"QQ.a2", CommPair::QQ, 2}}) {
    std::string id = std::string("comm.chain.") + p.name;
    v.push_back({id, [=](const RunConfig& c) {
                   const Params Pe = p.a == 1 ? c.params : zeta_params(c.params);
                   QPolicy pol = c.qpolicy;
                   pol.tol = c.params.tol_trace;
                   return run_identity(id, c.params, 1e-9, points, [&](Sampler& S) {
                     cplx x = draw_x(S), y = draw_x(S);
                     return commutator_at(p.pr, x, y, p.a, c.chain, Pe, pol);
                   });
                 }});
  }
  return v;
}

inline const std::vector<std::string>& dump_objects() {
  static const std::vector<std::string> n{"R", "Rbar", "g", "K", "Kbar",
                                          "L1", "Lbar1", "Lcheck1", "Lcheckbar1", "L2", "Lbar2", "Lcheck2", "Lcheckbar2",
                                          "Kop1", "Kop2", "Kcheckbar1", "Kcheckbar2", "G", "Gbar", "T", "Q1", "Q2"};
  return n;
}

inline TensorOp dump_object(const std::string& name, cplx x, const RunConfig& c) {
  const Params& P = c.params;
  int N = c.fock_cutoff;
  auto lax = [&](LaxKind k, int flavor) { return l_operator(k, x, build_fock(flavor, N, P), P); };
  if (name == "R") return r_matrix(x, P);
  if (name == "Rbar") return rbar_matrix(x, P);
  if (name == "g") return op2(g_matrix(P));
  if (name == "K") return k_matrix(x, P);
  if (name == "Kbar") return kbar_matrix(x, P);
  static const std::vector<std::pair<std::string, LaxKind>> kinds{
      {"L", LaxKind::L}, {"Lbar", LaxKind::Lbar}, {"Lcheck", LaxKind::Lcheck}, {"Lcheckbar", LaxKind::Lcheckbar}};
  for (const auto& [nm, k] : kinds)
    for (int a = 1; a <= 2; ++a)
      if (name == nm + std::to_string(a)) return lax(k, a);
  for (int a = 1; a <= 2; ++a) {
    if (name == "Kop" + std::to_string(a)) return TensorOp(k_operator_mat(KOpKind::K, a, x, N, P), {N});
    if (name == "Kcheckbar" + std::to_string(a)) return TensorOp(k_operator_mat(KOpKind::KcheckBar, a, x, N, P), {N});
  }
  if (name == "G") return dressing_g(build_fock(1, N, P), false, false, P);
  if (name == "Gbar") return dressing_g(build_fock(1, N, P), true, false, P);
  QPolicy pol = c.qpolicy;
  pol.tol = P.tol_trace;
  if (name == "T") return t_operator(x, c.chain, P);
  if (name == "Q1") return q_operator(1, x, c.chain, P, pol).Q;
  if (name == "Q2") return q_operator(2, x, c.chain, P, pol).Q;
  throw Error(ErrorCode::UnknownObject, "unknown object " + name);
}

// "<n>" for the default n-point grid, otherwise a comma-separated list of complex points
inline std::vector<cplx> parse_grid(const std::string& spec) {
  std::string t = cfg::trim(spec);
  if (t.empty()) return {};
  if (std::all_of(t.begin(), t.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
    long n = cfg::to_long(t, "grid");
    if (n > 1000) cfg::bad("grid too large");
    return default_grid(static_cast<int>(n));
  }
  std::vector<cplx> g;
  for (const auto& s : cfg::split(t, ',')) g.push_back(parse_complex(s, "grid"));
  return g;
}

}  // namespace oqis
