#include "oqis/registry.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

using namespace oqis;

namespace {

enum Exit { kPass = 0, kFail = 1, kConfig = 2, kCompute = 3 };

int log_level() {
  const char* v = std::getenv("OQIS_LOG");
  if (!v) return 1;
  std::string s(v);
  if (s == "quiet") return 0;
  if (s == "debug") return 2;
  return 1;
}

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::UnknownObject:
    case ErrorCode::UnknownIdentity: return kConfig;
    default: return kCompute;
  }
}

void print_report(const IdentityReport& r) {
  if (log_level() == 0) return;
  std::cout << (r.pass ? "PASS " : "FAIL ") << r.id << "  residual " << fmt_double(r.max_residual) << "  threshold "
            << fmt_double(r.threshold) << "  " << r.ms << " ms";
  if (!r.note.empty()) std::cout << "  (" << r.note << ")";
  std::cout << '\n' << std::flush;
}

int finish_run(const RunOutcome& out, const std::string& report) {
  write_atomic(report, [&](std::ostream& o) { write_tsv(o, out.reports); });
  if (log_level() > 0) {
    int npass = 0;
    for (const auto& r : out.reports) npass += r.pass;
    std::cout << npass << "/" << out.reports.size() << " identities passed; report " << report << '\n';
  }
  if (out.compute_error) return kCompute;
  return out.all_pass ? kPass : kFail;
}

void emit(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    return;
  }
  write_atomic(path, body);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification runner for open-boundary TQ identities"};
  app.require_subcommand(1);

  std::string config, report, suite, object, xval = "1", grid = "20", out;
  int points = 5;
  bool no_timing = false;

  auto* verify = app.add_subcommand("verify", "run identity suites");
  verify->add_option("--config", config, "config file")->required();
  verify->add_option("--suite", suite, "comma-separated identity globs");
  verify->add_option("--report", report, "machine report path (overrides the config)");
  verify->add_flag("--no-timing", no_timing, "write ms = 0 in the report");

  auto* tq = app.add_subcommand("tq", "TQ and commutator residuals on the configured chain");
  tq->add_option("--config", config, "config file")->required();
  tq->add_option("--points", points, "number of seeded spectral points")->check(CLI::Range(1, 1000));
  tq->add_option("--report", report, "machine report path (overrides the config)");
  tq->add_flag("--no-timing", no_timing, "write ms = 0 in the report");

  auto* dump = app.add_subcommand("dump", "write one operator in the tensor dump format");
  dump->add_option("--config", config, "config file")->required();
  dump->add_option("--object", object, "object name")->required();
  dump->add_option("--x", xval, "spectral parameter, re+imj");
  dump->add_option("--out", out, "output file (default: config out, else stdout)");

  auto* spec = app.add_subcommand("spectrum", "eigenvalue-level TQ check on a grid");
  spec->add_option("--config", config, "config file")->required();
  spec->add_option("--grid", grid, "point count or comma-separated complex points");
  spec->add_option("--out", out, "output file (default: config out, else stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  RunConfig cfg;
  try {
    cfg = load_config(config);
    if (no_timing) cfg.timing = false;
    if (!report.empty()) cfg.report = report;
    if (!out.empty()) cfg.out = out;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  }

  try {
    if (*verify) {
      std::vector<std::string> globs = suite.empty() ? cfg.suites : cfg::split(suite, ',');
      auto sel = select_identities(globs);
      if (sel.empty()) std::cerr << "warning: no identity matches the selection\n";
      return finish_run(run_identities(sel, cfg, print_report), cfg.report);
    }
    if (*tq) {
      auto suite_entries = tq_suite(points);
      std::vector<const RegistryEntry*> sel;
      for (const auto& e : suite_entries) sel.push_back(&e);
      return finish_run(run_identities(sel, cfg, print_report), cfg.report);
    }
    if (*dump) {
      TensorOp A = dump_object(object, parse_complex(xval, "x"), cfg);
      emit(cfg.out, [&](std::ostream& o) { oqis::dump(o, A); });
      return kPass;
    }
    if (*spec) {
      SpectrumReport r = spectrum(parse_grid(grid), cfg.flavor, cfg.chain, cfg.params, cfg.qpolicy);
      emit(cfg.out, [&](std::ostream& o) { write_spectrum(o, r); });
      if (log_level() > 0 && !cfg.out.empty()) {
        std::cout << (r.degenerate ? "degenerate spectrum, commutator residual " + fmt_double(r.commutator)
                                   : "max tq residual " + fmt_double(r.max_tq) + ", leakage " + fmt_double(r.leakage))
                  << '\n';
      }
      if (r.degenerate) return r.commutator < 1e-9 ? kPass : kFail;
      return (r.max_tq < 1e-7 && r.leakage < 1e-8) ? kPass : kFail;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCompute;
  }
  return kPass;
}
