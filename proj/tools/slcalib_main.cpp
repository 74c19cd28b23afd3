// Command-line front end: family evaluation, flow integration, validation,
// classification, normal forms, periodicity tables, and OBJ export.
//
// Exit codes: 0 success, 1 validation failure, 2 bad input, 3 numerical
// failure.  All file output is byte-deterministic: fixed iteration order,
// %.17g floats, LF newlines, and timing_ms pinned to 0 unless --timing.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "slcalib/analysis.hpp"
#include "slcalib/cgeom.hpp"
#include "slcalib/errors.hpp"
#include "slcalib/families.hpp"
#include "slcalib/flow.hpp"
#include "slcalib/parallel.hpp"
#include "slcalib/symmetry.hpp"
#include "slcalib/version.hpp"

namespace {

using slcalib::Complex;
using slcalib::Complex3;
using slcalib::invalid_params;
using slcalib::numerical_error;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  if (t.empty()) throw invalid_params(what + ": empty numeric field");
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    throw invalid_params(what + ": cannot parse number '" + t + "'");
  return v;
}

/** Flat `key = value` parameter/state file; '#' starts a comment.  Values
 *  must be finite numbers (a non-finite entry is a caller error). */
std::map<std::string, double> read_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_params("cannot open file: " + path);
  std::map<std::string, double> kv;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = line;
    std::size_t hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw invalid_params(path + ":" + std::to_string(lineno) +
                           ": expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    if (key.empty())
      throw invalid_params(path + ":" + std::to_string(lineno) + ": empty key");
    double v = parse_double(s.substr(eq + 1),
                            path + ":" + std::to_string(lineno));
    if (!std::isfinite(v))
      throw invalid_params(path + ":" + std::to_string(lineno) +
                           ": non-finite value for key '" + key + "'");
    if (!kv.emplace(key, v).second)
      throw invalid_params(path + ":" + std::to_string(lineno) +
                           ": duplicate key '" + key + "'");
  }
  return kv;
}

slcalib::GridAxis parse_axis(const std::string& spec, const std::string& flag) {
  slcalib::GridAxis ax;
  char extra = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%d%c", &ax.min, &ax.max, &ax.n,
                  &extra) != 3 ||
      ax.n < 1)
    throw invalid_params(flag + ": expected min:max:n with n >= 1, got '" +
                         spec + "'");
  if (!std::isfinite(ax.min) || !std::isfinite(ax.max))
    throw invalid_params(flag + ": non-finite bound in '" + spec + "'");
  return ax;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw invalid_params("cannot open output file: " + path);
  out << content;
  if (!out) throw invalid_params("write failed: " + path);
}

void write_manifest(const std::string& out_path, const std::string& command,
                    const std::map<std::string, std::string>& params,
                    const std::map<std::string, std::string>& tolerances,
                    const std::map<std::string, std::string>& residuals,
                    bool timing, double elapsed_ms) {
  nlohmann::json j;
  j["command"] = command;
  j["params"] = params;
  j["tolerances"] = tolerances;
  j["residuals"] = residuals;
  j["timing_ms"] = timing ? static_cast<long>(std::llround(elapsed_ms)) : 0L;
  j["version"] = slcalib::version;
  write_file(out_path + ".manifest.json", j.dump(2) + "\n");
}

/* ------------------------------------------------------------------ */
/* Family construction from a flat key -> value record                  */
/* ------------------------------------------------------------------ */

struct FamilyBundle {
  std::function<Complex3(double, double, double)> point;  // (u1, u2, t)
  slcalib::FrameFn frame;
  bool xy_names = false;  // degree-k families label the surface axes x, y
  std::map<std::string, std::string> record;  // effective parameters
};

double kv_get(const std::map<std::string, double>& kv, const std::string& key,
              double dflt = 0.0) {
  auto it = kv.find(key);
  return it == kv.end() ? dflt : it->second;
}

Complex kv_get_c(const std::map<std::string, double>& kv,
                 const std::string& base) {
  return {kv_get(kv, base + ".re"), kv_get(kv, base + ".im")};
}

void require_keys_subset(const std::map<std::string, double>& kv,
                         const std::set<std::string>& allowed,
                         const std::string& family) {
  for (const auto& [k, v] : kv) {
    (void)v;
    if (!allowed.count(k))
      throw invalid_params("unknown parameter '" + k + "' for family " +
                           family);
  }
}

long kv_get_integer(const std::map<std::string, double>& kv,
                    const std::string& key) {
  double v = kv.at(key);
  long n = std::llround(v);
  if (std::abs(v - static_cast<double>(n)) > 1e-9)
    throw invalid_params("parameter '" + key + "' must be an integer");
  return n;
}

/** Builds the evaluator bundle for a named family.  t_extent bounds the
 *  |t| range the caller will query (used to size the case-a quadrature
 *  checkpoints). */
FamilyBundle make_family(const std::string& name,
                         const std::map<std::string, double>& kv,
                         double t_extent) {
  using namespace slcalib;
  FamilyBundle b;
  auto rec = [&b](const std::string& key, double v) {
    b.record[key] = fmt17(v);
  };
  auto rec_c = [&](const std::string& base, Complex v) {
    rec(base + ".re", v.real());
    rec(base + ".im", v.imag());
  };
  b.record["family"] = name;

  if (name == "case-iii") {
    require_keys_subset(kv,
                        {"A.re", "A.im", "B.re", "B.im", "D.re", "D.im",
                         "E.re", "E.im"},
                        name);
    CaseIIIParams P(kv_get_c(kv, "A"), kv_get_c(kv, "B"), kv_get_c(kv, "D"),
                    kv_get_c(kv, "E"));
    rec_c("A", P.A);
    rec_c("B", P.B);
    rec_c("D", P.D);
    rec_c("E", P.E);
    auto fam = [P](double t) { return caseiii_state(t, P); };
    b.point = [P](double y1, double y2, double t) {
      return caseiii_point(y1, y2, t, P);
    };
    b.frame = frame_from_z_family(fam);
    return b;
  }

  if (name == "case-a") {
    require_keys_subset(kv, {"B", "C", "E", "F", "Bp", "Cp", "Ep", "Fp"},
                        name);
    CaseAParams P(kv_get(kv, "B"), kv_get(kv, "C"), kv_get(kv, "E"),
                  kv_get(kv, "F"), kv_get(kv, "Bp"), kv_get(kv, "Cp"),
                  kv_get(kv, "Ep"), kv_get(kv, "Fp"));
    rec("B", P.B);
    rec("C", P.C);
    rec("E", P.E);
    rec("F", P.F);
    rec("Bp", P.Bp);
    rec("Cp", P.Cp);
    rec("Ep", P.Ep);
    rec("Fp", P.Fp);
    auto ev = std::make_shared<CaseAFamily>(P, std::max(0.5, t_extent + 0.5));
    auto fam = [ev](double t) { return ev->state(t); };
    b.point = [fam](double y1, double y2, double t) {
      return assemble_phi(fam(t), y1, y2);
    };
    b.frame = frame_from_wpqr_family(fam);
    return b;
  }

  if (name == "case-b") {
    require_keys_subset(kv, {"alpha1", "alpha2", "alpha3"}, name);
    AlphaTriple al(kv_get(kv, "alpha1"), kv_get(kv, "alpha2"),
                   kv_get(kv, "alpha3"));
    rec("alpha1", al.a1);
    rec("alpha2", al.a2);
    rec("alpha3", al.a3);
    (void)caseb_w(0.0, al);  // validates alpha2 < alpha3 up front
    auto fam = [al](double t) {
      WPQRState s;
      s.w = caseb_w(t, al).cast<Complex>();
      return s;
    };
    b.point = [fam](double y1, double y2, double t) {
      return assemble_phi(fam(t), y1, y2);
    };
    b.frame = frame_from_wpqr_family(fam);
    return b;
  }

  if (name == "case-c") {
    require_keys_subset(kv, {"alpha1", "alpha2", "alpha3", "A", "theta1_0"},
                        name);
    AlphaTriple al(kv_get(kv, "alpha1"), kv_get(kv, "alpha2"),
                   kv_get(kv, "alpha3"));
    double A = kv_get(kv, "A");
    double th0 = kv.count("theta1_0") ? kv.at("theta1_0")
                                      : 1.5707963267948966;
    rec("alpha1", al.a1);
    rec("alpha2", al.a2);
    rec("alpha3", al.a3);
    rec("A", A);
    rec("theta1_0", th0);
    (void)casec_wu(0.0, al, A, th0);  // validates the parameter range
    auto fam = [al, A, th0](double t) {
      WPQRState s;
      s.w = casec_wu(t, al, A, th0).w;
      return s;
    };
    b.point = [fam](double y1, double y2, double t) {
      return assemble_phi(fam(t), y1, y2);
    };
    b.frame = frame_from_wpqr_family(fam);
    return b;
  }

  if (name == "case-d") {
    require_keys_subset(
        kv, {"p",     "q",     "alpha1", "alpha2", "alpha3", "C.re",  "C.im",
             "D.re",  "D.im",  "Cp.re",  "Cp.im",  "Dp.re",  "Dp.im", "E1.re",
             "E1.im", "E2.re", "E2.im",  "E3.re",  "E3.im"},
        name);
    bool has_pq = kv.count("p") || kv.count("q");
    bool has_alpha =
        kv.count("alpha1") || kv.count("alpha2") || kv.count("alpha3");
    if (has_pq == has_alpha)
      throw invalid_params(
          "case-d takes either p,q or alpha1,alpha2,alpha3 (exactly one of "
          "the two)");
    std::optional<AlphaTriple> al;
    if (has_pq) {
      if (!kv.count("p") || !kv.count("q"))
        throw invalid_params("case-d rational mode needs both p and q");
      long p = kv_get_integer(kv, "p"), q = kv_get_integer(kv, "q");
      auto [spec, alpha] = periodicity_from_pq(p, q);
      al.emplace(alpha);
      b.record["p"] = std::to_string(spec.p);
      b.record["q"] = std::to_string(spec.q);
    } else {
      al.emplace(kv_get(kv, "alpha1"), kv_get(kv, "alpha2"),
                 kv_get(kv, "alpha3"));
    }
    rec("alpha1", al->a1);
    rec("alpha2", al->a2);
    rec("alpha3", al->a3);
    CaseDParams P(*al, kv_get_c(kv, "C"), kv_get_c(kv, "D"),
                  kv_get_c(kv, "Cp"), kv_get_c(kv, "Dp"), kv_get_c(kv, "E1"),
                  kv_get_c(kv, "E2"), kv_get_c(kv, "E3"));
    rec_c("C", P.C);
    rec_c("D", P.D);
    rec_c("Cp", P.Cp);
    rec_c("Dp", P.Dp);
    rec_c("E1", P.E1);
    rec_c("E2", P.E2);
    rec_c("E3", P.E3);
    (void)cased_state(0.0, P);  // surfaces resonant denominators up front
    auto fam = [P](double t) { return cased_state(t, P); };
    b.point = [fam](double y1, double y2, double t) {
      return assemble_phi(fam(t), y1, y2);
    };
    b.frame = frame_from_wpqr_family(fam);
    return b;
  }

  if (name == "k") {
    if (!kv.count("k"))
      throw invalid_params("family k requires the parameter k");
    long k = kv_get_integer(kv, "k");
    if (k < 1 || k > 16)
      throw invalid_params("family k requires 1 <= k <= 16");
    std::set<std::string> allowed = {"k"};
    for (long j = 1; j <= k; ++j)
      for (const char* part : {".re", ".im"}) {
        allowed.insert("A" + std::to_string(j) + part);
        allowed.insert("B" + std::to_string(j) + part);
      }
    require_keys_subset(kv, allowed, name);
    std::vector<Complex> A(k + 1, Complex(0.0)), B(k + 1, Complex(0.0));
    for (long j = 1; j <= k; ++j) {
      A[j] = kv_get_c(kv, "A" + std::to_string(j));
      B[j] = kv_get_c(kv, "B" + std::to_string(j));
    }
    KFamilyParams P(static_cast<int>(k), A, B);
    b.record["k"] = std::to_string(k);
    for (long j = 1; j <= k; ++j) {
      rec_c("A" + std::to_string(j), P.A[j]);
      rec_c("B" + std::to_string(j), P.B[j]);
    }
    KFourierSolution sol = generic_k_solve(P);
    auto fam = [sol](double t) { return kfamily_state(t, sol); };
    b.point = [fam](double x, double y, double t) {
      return assemble_phi(fam(t), x, y);
    };
    b.frame = frame_from_pq_family(fam);
    b.xy_names = true;
    return b;
  }

  throw invalid_params("unknown family '" + name +
                       "' (expected case-iii, case-a, case-b, case-c, "
                       "case-d or k)");
}

/* ------------------------------------------------------------------ */
/* Shared CLI option groups                                             */
/* ------------------------------------------------------------------ */

struct FamilyCliOpts {
  std::string family;
  std::string params_file;
  std::map<std::string, double> flag_kv;
};

void add_family_options(CLI::App* sc, FamilyCliOpts& o, bool required) {
  auto* fo = sc->add_option("--family", o.family,
                            "family name: case-iii, case-a, case-b, case-c, "
                            "case-d or k");
  if (required) fo->required();
  sc->add_option("--params", o.params_file,
                 "flat key = value parameter file (keys match flag names)");
  static const char* keys[] = {
      "A.re",  "A.im",  "B.re",   "B.im",   "D.re",   "D.im",  "E.re",
      "E.im",  "B",     "C",      "E",      "F",      "Bp",    "Cp",
      "Ep",    "Fp",    "alpha1", "alpha2", "alpha3", "A",     "theta1_0",
      "p",     "q",     "C.re",   "C.im",   "Cp.re",  "Cp.im", "D.re",
      "Dp.re", "Dp.im", "E1.re",  "E1.im",  "E2.re",  "E2.im", "E3.re",
      "E3.im", "k"};
  std::set<std::string> seen;
  for (const char* key : keys) {
    if (!seen.insert(key).second) continue;
    std::string name = std::string("--") + key;
    sc->add_option_function<double>(
        name,
        [&o, key = std::string(key)](double v) { o.flag_kv[key] = v; },
        "family parameter " + std::string(key));
  }
}

std::map<std::string, double> effective_kv(const FamilyCliOpts& o) {
  std::map<std::string, double> kv;
  if (!o.params_file.empty()) kv = read_kv_file(o.params_file);
  for (const auto& [k, v] : o.flag_kv) kv[k] = v;  // flags win over the file
  return kv;
}

struct GridCliOpts {
  std::string y1, y2, x, y, t;
};

void add_grid_options(CLI::App* sc, GridCliOpts& o) {
  sc->add_option("--y1", o.y1, "y1 axis as min:max:n");
  sc->add_option("--y2", o.y2, "y2 axis as min:max:n");
  sc->add_option("--x", o.x, "x axis as min:max:n (degree-k families)");
  sc->add_option("--y", o.y, "y axis as min:max:n (degree-k families)");
  sc->add_option("--t", o.t, "t axis as min:max:n");
}

/** Resolves the two surface axes, enforcing the y1/y2 naming for the
 *  quadratic families and x/y for degree-k families. */
std::pair<slcalib::GridAxis, slcalib::GridAxis> surface_axes(
    const GridCliOpts& g, bool xy_names) {
  if (xy_names) {
    if (!g.y1.empty() || !g.y2.empty())
      throw invalid_params("family k uses --x/--y, not --y1/--y2");
    if (g.x.empty() || g.y.empty())
      throw invalid_params("family k needs --x and --y grid axes");
    return {parse_axis(g.x, "--x"), parse_axis(g.y, "--y")};
  }
  if (!g.x.empty() || !g.y.empty())
    throw invalid_params("this family uses --y1/--y2, not --x/--y");
  if (g.y1.empty() || g.y2.empty())
    throw invalid_params("need --y1 and --y2 grid axes");
  return {parse_axis(g.y1, "--y1"), parse_axis(g.y2, "--y2")};
}

double axis_extent(const slcalib::GridAxis& ax) {
  return std::max(std::abs(ax.min), std::abs(ax.max));
}

void record_grid(std::map<std::string, std::string>& record,
                 const GridCliOpts& g, bool xy_names) {
  if (xy_names) {
    record["x"] = g.x;
    record["y"] = g.y;
  } else {
    record["y1"] = g.y1;
    record["y2"] = g.y2;
  }
  record["t"] = g.t;
}

/* ------------------------------------------------------------------ */
/* State file <-> flow states                                           */
/* ------------------------------------------------------------------ */

const char* z_tokens[6] = {"z1", "z2", "z3", "z4", "z5", "z6"};

Complex3 read_vec(const std::map<std::string, double>& kv,
                  const std::string& base) {
  Complex3 v;
  for (int c = 0; c < 3; ++c)
    v[c] = Complex(kv_get(kv, "re_" + base + "_" + std::to_string(c + 1)),
                   kv_get(kv, "im_" + base + "_" + std::to_string(c + 1)));
  return v;
}

Complex read_scalar(const std::map<std::string, double>& kv,
                    const std::string& name) {
  return {kv_get(kv, "re_" + name), kv_get(kv, "im_" + name)};
}

void check_state_keys(const std::map<std::string, double>& kv,
                      const std::set<std::string>& allowed,
                      const std::string& what) {
  for (const auto& [k, v] : kv) {
    (void)v;
    if (!allowed.count(k))
      throw invalid_params(what + ": unknown state entry '" + k + "'");
  }
}

std::set<std::string> vec_tokens(const std::string& base) {
  std::set<std::string> s;
  for (int c = 1; c <= 3; ++c) {
    s.insert("re_" + base + "_" + std::to_string(c));
    s.insert("im_" + base + "_" + std::to_string(c));
  }
  return s;
}

std::set<std::string> scalar_tokens(const std::string& name) {
  return {"re_" + name, "im_" + name};
}

slcalib::ZState zstate_from_kv(const std::map<std::string, double>& kv,
                               const std::string& what) {
  std::set<std::string> allowed;
  for (const char* tok : z_tokens) allowed.merge(vec_tokens(tok));
  check_state_keys(kv, allowed, what);
  slcalib::ZState s;
  s.z1 = read_vec(kv, "z1");
  s.z2 = read_vec(kv, "z2");
  s.z3 = read_vec(kv, "z3");
  s.z4 = read_vec(kv, "z4");
  s.z5 = read_vec(kv, "z5");
  s.z6 = read_vec(kv, "z6");
  return s;
}

slcalib::PQState pqstate_from_kv(const std::map<std::string, double>& kv,
                                 const std::string& what) {
  if (!kv.count("k")) throw invalid_params(what + ": missing k entry");
  long k = kv_get_integer(kv, "k");
  if (k < 1 || k > 16) throw invalid_params(what + ": need 1 <= k <= 16");
  std::set<std::string> allowed = {"k"};
  for (long j = 0; j <= k; ++j) allowed.merge(vec_tokens("p" + std::to_string(j)));
  allowed.merge(vec_tokens("q1"));
  allowed.merge(vec_tokens("q2"));
  check_state_keys(kv, allowed, what);
  slcalib::PQState s(static_cast<int>(k));
  for (long j = 0; j <= k; ++j) s.p[j] = read_vec(kv, "p" + std::to_string(j));
  s.q1 = read_vec(kv, "q1");
  s.q2 = read_vec(kv, "q2");
  return s;
}

Complex3 wvec_from_kv(const std::map<std::string, double>& kv,
                      const std::string& what) {
  std::set<std::string> allowed;
  for (const char* n : {"w1", "w2", "w3"}) allowed.merge(scalar_tokens(n));
  check_state_keys(kv, allowed, what);
  return {read_scalar(kv, "w1"), read_scalar(kv, "w2"), read_scalar(kv, "w3")};
}

slcalib::WPQRState wpqr_from_kv(const std::map<std::string, double>& kv,
                                const std::string& what) {
  std::set<std::string> allowed;
  for (const char* n : {"w1", "w2", "w3", "p1", "p2", "p3", "q1", "q2", "q3",
                        "r1", "r2", "r3"})
    allowed.merge(scalar_tokens(n));
  check_state_keys(kv, allowed, what);
  slcalib::WPQRState s;
  for (int c = 0; c < 3; ++c) {
    std::string i = std::to_string(c + 1);
    s.w[c] = read_scalar(kv, "w" + i);
    s.p[c] = read_scalar(kv, "p" + i);
    s.q[c] = read_scalar(kv, "q" + i);
    s.r[c] = read_scalar(kv, "r" + i);
  }
  return s;
}

void append_complex(std::string& row, Complex v) {
  row += ',';
  row += fmt17(v.real());
  row += ',';
  row += fmt17(v.imag());
}

std::string z_csv_header() {
  std::string h = "t";
  for (const char* tok : z_tokens)
    for (int c = 1; c <= 3; ++c) {
      h += std::string(",re_") + tok + "_" + std::to_string(c);
      h += std::string(",im_") + tok + "_" + std::to_string(c);
    }
  return h;
}

/* ------------------------------------------------------------------ */
/* Subcommand argument bags                                             */
/* ------------------------------------------------------------------ */

struct EvalArgs {
  FamilyCliOpts fam;
  GridCliOpts grid;
  std::string out;
  bool timing = false;
};

struct EvolveArgs {
  std::string system;
  std::string init_file;
  double t0 = 0, t1 = 0;
  std::string method = "rk4";
  double step = 1e-3, tol = 1e-10;
  long max_steps = 20000000;
  std::string out;
  bool timing = false;
};

struct ValidateArgs {
  FamilyCliOpts fam;
  GridCliOpts grid;
  std::string trajectory;
  long samples = 1000;
  double tol = 1e-9;
};

struct InitArgs {
  std::string init_file;
};

struct NormalizeArgs {
  std::string init_file;
  std::string target = "auto";
};

struct PeriodicityArgs {
  long p = 0, q = 0, scan_qmax = 0;
  std::string out;
};

struct MeshArgs {
  FamilyCliOpts fam;
  GridCliOpts grid;
  std::string coords = "re1,re2,re3";
  std::string out;
  bool timing = false;
};

/* ------------------------------------------------------------------ */
/* family-eval                                                          */
/* ------------------------------------------------------------------ */

int run_family_eval(const EvalArgs& a) {
  auto start = std::chrono::steady_clock::now();
  bool xy = (a.fam.family == "k");
  auto [ax1, ax2] = surface_axes(a.grid, xy);
  if (a.grid.t.empty()) throw invalid_params("need a --t grid axis");
  slcalib::GridAxis axt = parse_axis(a.grid.t, "--t");

  FamilyBundle fam =
      make_family(a.fam.family, effective_kv(a.fam), axis_extent(axt));
  std::vector<double> u1s = slcalib::linspace(ax1),
                      u2s = slcalib::linspace(ax2),
                      ts = slcalib::linspace(axt);
  const long n1 = static_cast<long>(u1s.size()),
             n2 = static_cast<long>(u2s.size()),
             nt = static_cast<long>(ts.size());
  const long total = nt * n1 * n2;

  std::vector<Complex3> pts(total);
  slcalib::parallel_for(total, [&](long idx) {
    long it = idx / (n1 * n2), r = idx % (n1 * n2);
    long i1 = r / n2, i2 = r % n2;
    pts[idx] = fam.point(u1s[i1], u2s[i2], ts[it]);
  });

  std::string csv = xy ? "x,y,t" : "y1,y2,t";
  csv += ",re_z1,im_z1,re_z2,im_z2,re_z3,im_z3\n";
  for (long idx = 0; idx < total; ++idx) {
    long it = idx / (n1 * n2), r = idx % (n1 * n2);
    long i1 = r / n2, i2 = r % n2;
    std::string row = fmt17(u1s[i1]);
    row += ',';
    row += fmt17(u2s[i2]);
    row += ',';
    row += fmt17(ts[it]);
    for (int c = 0; c < 3; ++c) {
      row += ',';
      row += fmt17(pts[idx][c].real());
      row += ',';
      row += fmt17(pts[idx][c].imag());
    }
    csv += row;
    csv += '\n';
  }
  write_file(a.out, csv);

  auto record = fam.record;
  record_grid(record, a.grid, xy);
  record["out"] = a.out;
  if (!a.fam.params_file.empty()) record["params_file"] = a.fam.params_file;
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  write_manifest(a.out, "family-eval", record,
                 {{"family_params", fmt17(slcalib::family_params_tol)}},
                 {{"rows", std::to_string(total)}}, a.timing, ms);
  return 0;
}

/* ------------------------------------------------------------------ */
/* evolve                                                               */
/* ------------------------------------------------------------------ */

slcalib::IntegratorCfg cfg_from_args(const EvolveArgs& a) {
  slcalib::IntegratorCfg cfg;
  if (a.method == "rk4")
    cfg.method = slcalib::IntegratorCfg::Method::rk4;
  else if (a.method == "rk45")
    cfg.method = slcalib::IntegratorCfg::Method::rk45;
  else
    throw invalid_params("unknown --method '" + a.method +
                         "' (expected rk4 or rk45)");
  cfg.step = a.step;
  cfg.tol = a.tol;
  cfg.max_steps = a.max_steps;
  return cfg;
}

/** Conserved quantities of the diagonal background alone:
 *  |w1|^2 + |w2|^2, |w1|^2 + |w3|^2 and Im(w1 w2 w3). */
std::vector<double> w_invariants(const Complex3& w) {
  return {std::norm(w[0]) + std::norm(w[1]), std::norm(w[0]) + std::norm(w[2]),
          std::imag(w[0] * w[1] * w[2])};
}

int run_evolve(const EvolveArgs& a) {
  auto start = std::chrono::steady_clock::now();
  auto kv = read_kv_file(a.init_file);
  slcalib::IntegratorCfg cfg = cfg_from_args(a);

  std::string header;
  std::vector<double> ts;
  std::vector<std::string> rows;
  std::vector<std::vector<double>> invariants;  // invariants[i] over time

  auto track = [&invariants](const std::vector<double>& vals) {
    if (invariants.empty()) invariants.resize(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i)
      invariants[i].push_back(vals[i]);
  };

  if (a.system == "z") {
    slcalib::ZState init = zstate_from_kv(kv, a.init_file);
    auto samples = slcalib::integrate_z(init, a.t0, a.t1, cfg);
    header = z_csv_header();
    for (const auto& s : samples) {
      std::string row = fmt17(s.t);
      const Complex3* vs[6] = {&s.state.z1, &s.state.z2, &s.state.z3,
                               &s.state.z4, &s.state.z5, &s.state.z6};
      for (const Complex3* v : vs)
        for (int c = 0; c < 3; ++c) append_complex(row, (*v)[c]);
      rows.push_back(std::move(row));
      auto res = slcalib::constraint_residuals_z(s.state);
      track(std::vector<double>(res.begin(), res.end()));
    }
  } else if (a.system == "pq") {
    slcalib::PQState init = pqstate_from_kv(kv, a.init_file);
    auto samples = slcalib::integrate_pq(init, a.t0, a.t1, cfg);
    header = "t";
    for (int j = 0; j <= init.k; ++j)
      for (int c = 1; c <= 3; ++c) {
        header += ",re_p" + std::to_string(j) + "_" + std::to_string(c);
        header += ",im_p" + std::to_string(j) + "_" + std::to_string(c);
      }
    for (const char* qn : {"q1", "q2"})
      for (int c = 1; c <= 3; ++c) {
        header += std::string(",re_") + qn + "_" + std::to_string(c);
        header += std::string(",im_") + qn + "_" + std::to_string(c);
      }
    for (const auto& s : samples) {
      std::string row = fmt17(s.t);
      for (int j = 0; j <= s.state.k; ++j)
        for (int c = 0; c < 3; ++c) append_complex(row, s.state.p[j][c]);
      for (int c = 0; c < 3; ++c) append_complex(row, s.state.q1[c]);
      for (int c = 0; c < 3; ++c) append_complex(row, s.state.q2[c]);
      rows.push_back(std::move(row));
      track(slcalib::constraint_residuals_pq(s.state));
    }
  } else if (a.system == "w") {
    Complex3 w0 = wvec_from_kv(kv, a.init_file);
    slcalib::WPQRState init;
    init.w = w0;
    auto samples = slcalib::integrate_wpqr(init, a.t0, a.t1, cfg);
    header = "t,re_w1,im_w1,re_w2,im_w2,re_w3,im_w3";
    for (const auto& s : samples) {
      std::string row = fmt17(s.t);
      for (int c = 0; c < 3; ++c) append_complex(row, s.state.w[c]);
      rows.push_back(std::move(row));
      track(w_invariants(s.state.w));
    }
  } else if (a.system == "wpqr") {
    slcalib::WPQRState init = wpqr_from_kv(kv, a.init_file);
    auto samples = slcalib::integrate_wpqr(init, a.t0, a.t1, cfg);
    header = "t";
    for (const char* n : {"w", "p", "q", "r"})
      for (int c = 1; c <= 3; ++c) {
        header += std::string(",re_") + n + std::to_string(c);
        header += std::string(",im_") + n + std::to_string(c);
      }
    for (const auto& s : samples) {
      std::string row = fmt17(s.t);
      const Complex3* vs[4] = {&s.state.w, &s.state.p, &s.state.q, &s.state.r};
      for (const Complex3* v : vs)
        for (int c = 0; c < 3; ++c) append_complex(row, (*v)[c]);
      rows.push_back(std::move(row));
      auto res = slcalib::pairing_invariants(s.state);
      track(std::vector<double>(res.begin(), res.end()));
    }
  } else {
    throw invalid_params("unknown --system '" + a.system +
                         "' (expected z, pq, w or wpqr)");
  }

  std::string csv = header + "\n";
  for (const std::string& r : rows) {
    csv += r;
    csv += '\n';
  }
  write_file(a.out, csv);

  double max_drift = 0.0;
  std::string report = "system = " + a.system + "\n";
  report += "steps = " + std::to_string(rows.size() - 1) + "\n";
  for (std::size_t i = 0; i < invariants.size(); ++i) {
    double d = 0.0;
    for (double v : invariants[i]) d = std::max(d, std::abs(v - invariants[i][0]));
    report += "invariant_drift_" + std::to_string(i + 1) + " = " + fmt17(d) +
              "\n";
    max_drift = std::max(max_drift, d);
  }
  report += "max_drift = " + fmt17(max_drift) + "\n";
  std::cout << report;

  std::map<std::string, std::string> record = {
      {"system", a.system},   {"init", a.init_file},
      {"t0", fmt17(a.t0)},    {"t1", fmt17(a.t1)},
      {"method", a.method},   {"step", fmt17(a.step)},
      {"tol", fmt17(a.tol)},  {"max_steps", std::to_string(a.max_steps)},
      {"out", a.out}};
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  write_manifest(a.out, "evolve", record,
                 {{"admissibility", fmt17(slcalib::admissibility_tol)}},
                 {{"max_drift", fmt17(max_drift)},
                  {"rows", std::to_string(rows.size())}},
                 a.timing, ms);
  return 0;
}

/* ------------------------------------------------------------------ */
/* validate                                                             */
/* ------------------------------------------------------------------ */

/** Reads a z-system trajectory CSV produced by evolve. */
std::vector<std::pair<double, slcalib::ZState>> read_z_trajectory(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_params("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw invalid_params(path + ": empty trajectory file");
  if (trim(line) != z_csv_header())
    throw invalid_params(path + ": not a z-system trajectory (bad header)");
  std::vector<std::pair<double, slcalib::ZState>> rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ','))
      vals.push_back(
          parse_double(field, path + ":" + std::to_string(lineno)));
    if (vals.size() != 37)
      throw invalid_params(path + ":" + std::to_string(lineno) +
                           ": expected 37 fields, got " +
                           std::to_string(vals.size()));
    for (double v : vals)
      if (!std::isfinite(v))
        throw invalid_params(path + ":" + std::to_string(lineno) +
                             ": non-finite value");
    slcalib::ZState s;
    Complex3* vs[6] = {&s.z1, &s.z2, &s.z3, &s.z4, &s.z5, &s.z6};
    for (int i = 0; i < 6; ++i)
      for (int c = 0; c < 3; ++c)
        (*vs[i])[c] = Complex(vals[1 + 6 * i + 2 * c], vals[2 + 6 * i + 2 * c]);
    rows.emplace_back(vals[0], s);
  }
  if (rows.empty()) throw invalid_params(path + ": trajectory has no rows");
  return rows;
}

int run_validate(const ValidateArgs& a) {
  if (a.trajectory.empty() == a.fam.family.empty())
    throw invalid_params(
        "validate takes either --family or --trajectory (exactly one)");
  if (a.samples < 1) throw invalid_params("--samples must be >= 1");
  int per_axis = std::max(
      2, static_cast<int>(std::llround(std::cbrt(static_cast<double>(a.samples)))));

  slcalib::SLResidualReport rep;
  if (!a.fam.family.empty()) {
    bool xy = (a.fam.family == "k");
    slcalib::Grid3 grid;
    const char* f1 = xy ? "--x" : "--y1";
    const char* f2 = xy ? "--y" : "--y2";
    const std::string& s1 = xy ? a.grid.x : a.grid.y1;
    const std::string& s2 = xy ? a.grid.y : a.grid.y2;
    if ((!a.grid.y1.empty() || !a.grid.y2.empty()) && xy)
      throw invalid_params("family k uses --x/--y, not --y1/--y2");
    if ((!a.grid.x.empty() || !a.grid.y.empty()) && !xy)
      throw invalid_params("this family uses --y1/--y2, not --x/--y");
    grid.u1 = s1.empty() ? slcalib::GridAxis{-2, 2, per_axis}
                         : parse_axis(s1, f1);
    grid.u2 = s2.empty() ? slcalib::GridAxis{-2, 2, per_axis}
                         : parse_axis(s2, f2);
    grid.t = a.grid.t.empty()
                 ? slcalib::GridAxis{0, 4 * 3.14159265358979324, per_axis}
                 : parse_axis(a.grid.t, "--t");
    FamilyBundle fam = make_family(a.fam.family, effective_kv(a.fam),
                                   axis_extent(grid.t));
    rep = slcalib::sl_residual(fam.frame, grid);
  } else {
    auto rows = read_z_trajectory(a.trajectory);
    long nt = std::min<long>(per_axis, static_cast<long>(rows.size()));
    slcalib::GridAxis yax{-2, 2, per_axis};
    if (!a.grid.y1.empty()) yax = parse_axis(a.grid.y1, "--y1");
    slcalib::GridAxis yax2 = yax;
    if (!a.grid.y2.empty()) yax2 = parse_axis(a.grid.y2, "--y2");
    for (long j = 0; j < nt; ++j) {
      long idx = (nt == 1) ? 0
                           : std::llround(static_cast<double>(j) *
                                          (rows.size() - 1) / (nt - 1));
      const auto& [t, state] = rows[idx];
      auto frame =
          slcalib::frame_from_z_family([state](double) { return state; });
      slcalib::Grid3 g3{yax, yax2, {t, t, 1}};
      slcalib::SLResidualReport r = slcalib::sl_residual(frame, g3);
      rep.max_omega = std::max(rep.max_omega, r.max_omega);
      rep.max_im_volume = std::max(rep.max_im_volume, r.max_im_volume);
      rep.max_cross_defect = std::max(rep.max_cross_defect, r.max_cross_defect);
      rep.samples += r.samples;
      rep.degenerate += r.degenerate;
    }
  }

  bool pass = rep.max_omega <= a.tol && rep.max_im_volume <= a.tol &&
              rep.max_cross_defect <= a.tol;
  std::cout << "samples = " << rep.samples << "\n"
            << "degenerate = " << rep.degenerate << "\n"
            << "max_omega = " << fmt17(rep.max_omega) << "\n"
            << "max_im_volume = " << fmt17(rep.max_im_volume) << "\n"
            << "max_cross_defect = " << fmt17(rep.max_cross_defect) << "\n"
            << "tol = " << fmt17(a.tol) << "\n"
            << "result = " << (pass ? "pass" : "fail") << "\n";
  return pass ? 0 : 1;
}

/* ------------------------------------------------------------------ */
/* classify / normalize                                                 */
/* ------------------------------------------------------------------ */

int run_classify(const InitArgs& a) {
  auto kv = read_kv_file(a.init_file);
  slcalib::ZState s = zstate_from_kv(kv, a.init_file);
  slcalib::Classification c = slcalib::classify_case(s.z1, s.z2, s.z3);
  std::cout << "label = " << slcalib::to_string(c.label) << "\n"
            << "span_dim = " << c.span_dim << "\n"
            << "form_tag = " << (c.form_tag.empty() ? "none" : c.form_tag)
            << "\n";
  return 0;
}

int run_normalize(const NormalizeArgs& a) {
  auto kv = read_kv_file(a.init_file);
  slcalib::ZState s = zstate_from_kv(kv, a.init_file);
  std::string target = a.target;
  if (target == "auto") {
    slcalib::Classification c = slcalib::classify_case(s.z1, s.z2, s.z3);
    if (c.label == slcalib::CaseLabel::III)
      target = "iii";
    else if (c.label == slcalib::CaseLabel::IV)
      target = "iv";
    else
      throw invalid_params(
          "normal forms are available for background spans of dimension 2 "
          "(iii) or 3 (iv); classified as " + slcalib::to_string(c.label));
  }
  slcalib::Normalization n;
  if (target == "iii")
    n = slcalib::normalize_case_iii(s);
  else if (target == "iv")
    n = slcalib::normalize_case_iv(s);
  else
    throw invalid_params("unknown --target '" + a.target +
                         "' (expected auto, iii or iv)");

  slcalib::ZState out =
      slcalib::rotate_state(n.unitary, slcalib::gl2_act_state(n.g, s));
  std::cout << "target = " << target << "\n";
  std::cout << "g.a = " << fmt17(n.g.a) << "\n"
            << "g.b = " << fmt17(n.g.b) << "\n"
            << "g.c = " << fmt17(n.g.c) << "\n"
            << "g.d = " << fmt17(n.g.d) << "\n"
            << "g.e = " << fmt17(n.g.e) << "\n"
            << "g.f = " << fmt17(n.g.f) << "\n";
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      std::cout << "u" << (r + 1) << (c + 1) << " = "
                << fmt17(n.unitary(r, c).real()) << " "
                << fmt17(n.unitary(r, c).imag()) << "\n";
  const Complex3* vs[6] = {&out.z1, &out.z2, &out.z3,
                           &out.z4, &out.z5, &out.z6};
  for (int i = 0; i < 6; ++i) {
    std::cout << "z" << (i + 1) << " =";
    for (int c = 0; c < 3; ++c)
      std::cout << " " << fmt17((*vs[i])[c].real()) << " "
                << fmt17((*vs[i])[c].imag());
    std::cout << "\n";
  }
  return 0;
}

/* ------------------------------------------------------------------ */
/* periodicity                                                          */
/* ------------------------------------------------------------------ */

int run_periodicity(const PeriodicityArgs& a) {
  bool single = (a.p != 0 || a.q != 0);
  bool scan = (a.scan_qmax != 0);
  if (single == scan)
    throw invalid_params(
        "periodicity takes either --p/--q or --scan-qmax (exactly one)");
  std::vector<std::pair<slcalib::PeriodicitySpec, slcalib::AlphaTriple>> rows;
  if (single) {
    rows.push_back(slcalib::periodicity_from_pq(a.p, a.q));
  } else {
    for (const auto& spec : slcalib::periodicity_scan(a.scan_qmax))
      rows.push_back(slcalib::periodicity_from_pq(spec.p, spec.q));
  }
  std::string table =
      "p,q,sigma,tau,a1,a2,a3,lambda,alpha1,alpha2,alpha3\n";
  for (const auto& [spec, alpha] : rows) {
    table += std::to_string(spec.p) + "," + std::to_string(spec.q) + "," +
             fmt17(spec.sigma) + "," + fmt17(spec.tau) + "," +
             std::to_string(spec.a1) + "," + std::to_string(spec.a2) + "," +
             std::to_string(spec.a3) + "," + std::to_string(spec.lambda) +
             "," + fmt17(alpha.a1) + "," + fmt17(alpha.a2) + "," +
             fmt17(alpha.a3) + "\n";
  }
  if (a.out.empty())
    std::cout << table;
  else
    write_file(a.out, table);
  return 0;
}

/* ------------------------------------------------------------------ */
/* mesh                                                                 */
/* ------------------------------------------------------------------ */

int run_mesh(const MeshArgs& a) {
  auto start = std::chrono::steady_clock::now();
  bool xy = (a.fam.family == "k");
  auto [ax1, ax2] = surface_axes(a.grid, xy);
  if (a.grid.t.empty()) throw invalid_params("need a --t grid axis");
  slcalib::GridAxis axt = parse_axis(a.grid.t, "--t");

  // parse the projection: three of re1, im1, re2, im2, re3, im3
  std::vector<int> comp;  // 2*component + (0 re | 1 im)
  {
    std::stringstream ss(a.coords);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      static const std::map<std::string, int> names = {
          {"re1", 0}, {"im1", 1}, {"re2", 2},
          {"im2", 3}, {"re3", 4}, {"im3", 5}};
      auto it = names.find(tok);
      if (it == names.end())
        throw invalid_params("--coords: unknown coordinate '" + tok +
                             "' (expected re1, im1, re2, im2, re3, im3)");
      comp.push_back(it->second);
    }
    if (comp.size() != 3)
      throw invalid_params("--coords: need exactly three coordinates");
  }
  auto project = [&comp](const Complex3& z, int i) {
    int c = comp[i] / 2;
    return comp[i] % 2 == 0 ? z[c].real() : z[c].imag();
  };

  FamilyBundle fam =
      make_family(a.fam.family, effective_kv(a.fam), axis_extent(axt));
  std::vector<double> u1s = slcalib::linspace(ax1),
                      u2s = slcalib::linspace(ax2),
                      ts = slcalib::linspace(axt);
  const long n1 = static_cast<long>(u1s.size()),
             n2 = static_cast<long>(u2s.size()),
             nt = static_cast<long>(ts.size());
  const long total = nt * n1 * n2;
  std::vector<Complex3> pts(total);
  slcalib::parallel_for(total, [&](long idx) {
    long it = idx / (n1 * n2), r = idx % (n1 * n2);
    long i1 = r / n2, i2 = r % n2;
    pts[idx] = fam.point(u1s[i1], u2s[i2], ts[it]);
  });

  // vertex (it, i1, i2) has 1-based OBJ index it*n1*n2 + i1*n2 + i2 + 1
  std::string obj;
  for (long idx = 0; idx < total; ++idx) {
    obj += "v ";
    obj += fmt17(project(pts[idx], 0));
    obj += ' ';
    obj += fmt17(project(pts[idx], 1));
    obj += ' ';
    obj += fmt17(project(pts[idx], 2));
    obj += '\n';
  }
  auto vid = [n1, n2](long it, long i1, long i2) {
    return it * n1 * n2 + i1 * n2 + i2 + 1;
  };
  long faces = 0;
  for (long it = 0; it + 1 < nt; ++it) {
    // quads over y2-direction lattice edges, then y1-direction edges
    for (long i1 = 0; i1 < n1; ++i1)
      for (long i2 = 0; i2 + 1 < n2; ++i2) {
        obj += "f " + std::to_string(vid(it, i1, i2)) + " " +
               std::to_string(vid(it, i1, i2 + 1)) + " " +
               std::to_string(vid(it + 1, i1, i2 + 1)) + " " +
               std::to_string(vid(it + 1, i1, i2)) + "\n";
        ++faces;
      }
    for (long i1 = 0; i1 + 1 < n1; ++i1)
      for (long i2 = 0; i2 < n2; ++i2) {
        obj += "f " + std::to_string(vid(it, i1, i2)) + " " +
               std::to_string(vid(it, i1 + 1, i2)) + " " +
               std::to_string(vid(it + 1, i1 + 1, i2)) + " " +
               std::to_string(vid(it + 1, i1, i2)) + "\n";
        ++faces;
      }
  }
  write_file(a.out, obj);

  auto record = fam.record;
  record_grid(record, a.grid, xy);
  record["coords"] = a.coords;
  record["out"] = a.out;
  if (!a.fam.params_file.empty()) record["params_file"] = a.fam.params_file;
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  write_manifest(a.out, "mesh", record,
                 {{"family_params", fmt17(slcalib::family_params_tol)}},
                 {{"vertices", std::to_string(total)},
                  {"faces", std::to_string(faces)}},
                 a.timing, ms);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slcalib: special Lagrangian evolution-family toolkit"};
  app.require_subcommand(1);

  EvalArgs eval_args;
  CLI::App* sc_eval = app.add_subcommand(
      "family-eval", "evaluate a closed-form family on a grid (CSV)");
  add_family_options(sc_eval, eval_args.fam, true);
  add_grid_options(sc_eval, eval_args.grid);
  sc_eval->add_option("--out", eval_args.out, "output CSV path")->required();
  sc_eval->add_flag("--timing", eval_args.timing,
                    "record real elapsed time in the manifest");

  EvolveArgs evolve_args;
  CLI::App* sc_evolve = app.add_subcommand(
      "evolve", "integrate an evolution system from an initial state file");
  sc_evolve->add_option("--system", evolve_args.system,
                        "z, pq, w or wpqr")->required();
  sc_evolve->add_option("--init", evolve_args.init_file,
                        "initial state file (key = value)")->required();
  sc_evolve->add_option("--t0", evolve_args.t0, "start time")->required();
  sc_evolve->add_option("--t1", evolve_args.t1, "end time")->required();
  sc_evolve->add_option("--method", evolve_args.method, "rk4 or rk45");
  sc_evolve->add_option("--step", evolve_args.step, "rk4 step size");
  sc_evolve->add_option("--tol", evolve_args.tol, "rk45 local error tolerance");
  sc_evolve->add_option("--max-steps", evolve_args.max_steps,
                        "step budget");
  sc_evolve->add_option("--out", evolve_args.out, "trajectory CSV path")
      ->required();
  sc_evolve->add_flag("--timing", evolve_args.timing,
                      "record real elapsed time in the manifest");

  ValidateArgs validate_args;
  CLI::App* sc_validate = app.add_subcommand(
      "validate", "check the defining residuals of a family or trajectory");
  add_family_options(sc_validate, validate_args.fam, false);
  add_grid_options(sc_validate, validate_args.grid);
  sc_validate->add_option("--trajectory", validate_args.trajectory,
                          "z-system trajectory CSV to validate");
  sc_validate->add_option("--samples", validate_args.samples,
                          "approximate total sample count");
  sc_validate->add_option("--tol", validate_args.tol,
                          "residual tolerance for pass/fail");

  InitArgs classify_args;
  CLI::App* sc_classify = app.add_subcommand(
      "classify", "classify a six-vector state by its background span");
  sc_classify->add_option("--init", classify_args.init_file,
                          "state file (key = value)")->required();

  NormalizeArgs normalize_args;
  CLI::App* sc_normalize = app.add_subcommand(
      "normalize", "compute the normalising transform of a state");
  sc_normalize->add_option("--init", normalize_args.init_file,
                           "state file (key = value)")->required();
  sc_normalize->add_option("--target", normalize_args.target,
                           "auto, iii or iv");

  PeriodicityArgs periodicity_args;
  CLI::App* sc_periodicity = app.add_subcommand(
      "periodicity", "rational rotation-rate table for the case-d family");
  sc_periodicity->add_option("--p", periodicity_args.p, "numerator p");
  sc_periodicity->add_option("--q", periodicity_args.q, "denominator q");
  sc_periodicity->add_option("--scan-qmax", periodicity_args.scan_qmax,
                             "enumerate all coprime pairs with q <= qmax");
  sc_periodicity->add_option("--out", periodicity_args.out,
                             "write the table to a file instead of stdout");

  MeshArgs mesh_args;
  CLI::App* sc_mesh = app.add_subcommand(
      "mesh", "export a sampled surface patch as an OBJ quad mesh");
  add_family_options(sc_mesh, mesh_args.fam, true);
  add_grid_options(sc_mesh, mesh_args.grid);
  sc_mesh->add_option("--coords", mesh_args.coords,
                      "three of re1, im1, re2, im2, re3, im3 (comma separated)");
  sc_mesh->add_option("--out", mesh_args.out, "output OBJ path")->required();
  sc_mesh->add_flag("--timing", mesh_args.timing,
                    "record real elapsed time in the manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(sc_eval)) return run_family_eval(eval_args);
    if (app.got_subcommand(sc_evolve)) return run_evolve(evolve_args);
    if (app.got_subcommand(sc_validate)) return run_validate(validate_args);
    if (app.got_subcommand(sc_classify)) return run_classify(classify_args);
    if (app.got_subcommand(sc_normalize)) return run_normalize(normalize_args);
    if (app.got_subcommand(sc_periodicity))
      return run_periodicity(periodicity_args);
    if (app.got_subcommand(sc_mesh)) return run_mesh(mesh_args);
  } catch (const invalid_params& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const numerical_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
