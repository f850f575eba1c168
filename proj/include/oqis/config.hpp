#pragma once

#include "oqis/transfer.hpp"

#include <fstream>
#include <map>

namespace oqis {

struct RunConfig {
  Params params;
  ChainSpec chain = ChainSpec{2, {{1.1, 0.1}, {0.8, -0.2}}};
  std::vector<std::string> suites{"*"};
  std::string report = "oqis_report.tsv";
  std::string out;  // spectrum / dump target; empty means stdout
  int fock_cutoff = 32;
  QPolicy qpolicy;
  int kmax = 40;
  int flavor = 1;
  bool timing = true;
};

namespace cfg {

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n"), b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

[[noreturn]] inline void bad(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

inline double to_double(const std::string& s, const std::string& key) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    bad("not a number for " + key + ": " + s);
  }
  if (pos != s.size()) bad("trailing characters for " + key + ": " + s);
  return v;
}

inline long to_long(const std::string& s, const std::string& key) {
  size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    bad("not an integer for " + key + ": " + s);
  }
  if (pos != s.size()) bad("trailing characters for " + key + ": " + s);
  return v;
}

inline bool to_bool(const std::string& s, const std::string& key) {
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  bad("not a boolean for " + key + ": " + s);
}

}  // namespace cfg

// re, imj, re+imj or re-imj
inline cplx parse_complex(const std::string& text, const std::string& key = "value") {
  std::string s;
  for (char c : text)
    if (c != ' ' && c != '\t') s += c;
  if (s.empty()) cfg::bad("empty complex value for " + key);
  if (s.back() != 'j' && s.back() != 'i') return {cfg::to_double(s, key), 0.0};
  s.pop_back();
  size_t split = std::string::npos;
  for (size_t k = s.size(); k-- > 1;)
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  if (split == std::string::npos) {
    if (s.empty() || s == "+") return {0.0, 1.0};
    if (s == "-") return {0.0, -1.0};
    return {0.0, cfg::to_double(s, key)};
  }
  std::string re = s.substr(0, split), im = s.substr(split);
  if (im == "+") im = "1";
  if (im == "-") im = "-1";
  return {cfg::to_double(re, key), cfg::to_double(im, key)};
}

inline RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::string section, line;
  int lineno = 0;
  bool have_xi = false, have_L = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = cfg::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') cfg::bad("line " + std::to_string(lineno) + ": malformed section header");
      section = cfg::trim(line.substr(1, line.size() - 2));
      if (section != "params" && section != "chain" && section != "run")
        cfg::bad("line " + std::to_string(lineno) + ": unknown section " + section);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) cfg::bad("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = cfg::trim(line.substr(0, eq)), val = cfg::trim(line.substr(eq + 1));
    Params& P = c.params;
    if (section == "params") {
      if (key == "p") P.p = parse_complex(val, key);
      else if (key == "s0") P.s0 = static_cast<int>(cfg::to_long(val, key));
      else if (key == "s1") P.s1 = static_cast<int>(cfg::to_long(val, key));
      else if (key == "eps_plus") P.eps_plus = parse_complex(val, key);
      else if (key == "eps_minus") P.eps_minus = parse_complex(val, key);
      else if (key == "epsbar_plus") P.epsbar_plus = parse_complex(val, key);
      else if (key == "epsbar_minus") P.epsbar_minus = parse_complex(val, key);
      else if (key == "tol_exact") P.tol_exact = cfg::to_double(val, key);
      else if (key == "tol_trace") P.tol_trace = cfg::to_double(val, key);
      else if (key == "series_cap") P.series_cap = static_cast<int>(cfg::to_long(val, key));
      else if (key == "rng_seed") P.rng_seed = static_cast<std::uint64_t>(cfg::to_long(val, key));
      else if (key == "sample_count") P.sample_count = static_cast<int>(cfg::to_long(val, key));
      else if (key == "allow_general_s") P.allow_general_s = cfg::to_bool(val, key);
      else cfg::bad("unknown key params." + key);
    } else if (section == "chain") {
      if (key == "L") {
        c.chain.L = static_cast<int>(cfg::to_long(val, key));
        have_L = true;
      } else if (key == "xi") {
        c.chain.xi.clear();
        for (auto& t : cfg::split(val, ',')) c.chain.xi.push_back(parse_complex(t, key));
        have_xi = true;
      } else {
        cfg::bad("unknown key chain." + key);
      }
    } else if (section == "run") {
      if (key == "suite") c.suites = cfg::split(val, ',');
      else if (key == "report") c.report = val;
      else if (key == "out") c.out = val;
      else if (key == "fock_cutoff") c.fock_cutoff = static_cast<int>(cfg::to_long(val, key));
      else if (key == "n0") c.qpolicy.N0 = static_cast<int>(cfg::to_long(val, key));
      else if (key == "cap") c.qpolicy.cap = static_cast<int>(cfg::to_long(val, key));
      else if (key == "kmax") c.kmax = static_cast<int>(cfg::to_long(val, key));
      else if (key == "flavor") c.flavor = static_cast<int>(cfg::to_long(val, key));
      else if (key == "timing") c.timing = cfg::to_bool(val, key);
      else cfg::bad("unknown key run." + key);
    } else {
      cfg::bad("line " + std::to_string(lineno) + ": key outside a section");
    }
  }
  if (have_L && !have_xi) {
    if (c.chain.L < 1 || c.chain.L > 5) cfg::bad("chain.L must be in 1..5");
    c.chain = default_chain(c.chain.L);
  }
  if (have_xi && !have_L) c.chain.L = static_cast<int>(c.chain.xi.size());
  return c;
}

inline void validate_config(const RunConfig& c) {
  c.params.validate();
  c.chain.validate();
  if (c.fock_cutoff < 8 || c.fock_cutoff > 192) cfg::bad("fock_cutoff must be in 8..192");
  if (c.qpolicy.N0 < 8 || c.qpolicy.cap < c.qpolicy.N0 || c.qpolicy.cap > 192) cfg::bad("cutoff policy needs 8 <= n0 <= cap <= 192");
  if (c.kmax < 1 || c.kmax > 200) cfg::bad("kmax must be in 1..200");
  if (c.flavor != 1 && c.flavor != 2) cfg::bad("flavor must be 1 or 2");
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) cfg::bad("cannot open config " + path);
  RunConfig c = parse_config(in);
  validate_config(c);
  return c;
}

}  // namespace oqis
