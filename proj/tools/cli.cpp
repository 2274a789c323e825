#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "eecrmt/eec.hpp"
#include "eecrmt/errors.hpp"
#include "eecrmt/limits.hpp"
#include "eecrmt/mc.hpp"
#include "eecrmt/painleve.hpp"
#include "eecrmt/skewortho.hpp"

#ifndef EECRMT_VERSION
#define EECRMT_VERSION "unknown"
#endif

namespace eecrmt::cli {

namespace {

using json = nlohmann::json;

constexpr std::size_t kMaxGrid = 100000;

std::string number(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

json maybe(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

std::string csv_field(std::optional<double> v) { return v ? number(*v) : ""; }

struct Common {
  std::string out = "-";
  std::string format = "json";
  int digits = 15;
};

struct EnsembleArgs {
  std::string name;
  int n = 0;
  double alpha = 0;
  double beta = 0;

  EnsembleSpec spec() const {
    EnsembleSpec e;
    e.kind = ensemble_from_name(name);
    if (e.kind == EnsembleKind::CustomSym || e.kind == EnsembleKind::CustomHerm)
      throw ParamError("custom ensembles are available through skewpoly only");
    e.n = n;
    e.alpha = alpha;
    e.beta_param = beta;
    e.validate();
    return e;
  }
};

void add_ensemble(CLI::App* cmd, EnsembleArgs& a) {
  cmd->add_option("--ensemble", a.name, "goe, gue, wishart, cwishart, beta, cbeta or condgoe")
      ->required()
      ->check(CLI::IsMember({"goe", "gue", "wishart", "cwishart", "beta", "cbeta", "condgoe"}));
  cmd->add_option("--n", a.n, "matrix size")->required();
  cmd->add_option("--alpha", a.alpha, "Wishart / Beta degrees offset");
  cmd->add_option("--beta", a.beta, "second Beta degrees offset");
}

void add_common(CLI::App* cmd, Common& c, bool digits) {
  cmd->add_option("--out", c.out, "result path, - for standard output");
  cmd->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  if (digits) cmd->add_option("--digits", c.digits, "working decimal digits (>= 15)");
}

PrecisionContext context(int digits) {
  PrecisionContext ctx;
  if (digits != ctx.digits) ctx = PrecisionContext::with_digits(digits);
  ctx.validate();
  return ctx;
}

json ensemble_json(const EnsembleSpec& e) {
  return {{"kind", ensemble_name(e.kind)}, {"n", e.n}, {"alpha", e.alpha}, {"beta", e.beta_param}};
}

json make_manifest(const std::string& command, const std::vector<std::string>& args, json ensemble,
                   const std::vector<double>& grid, int digits, std::optional<std::uint64_t> seed,
                   const Common& c) {
  json outputs = json::array();
  if (c.out != "-") {
    outputs.push_back(c.out);
    if (c.format == "csv") outputs.push_back(c.out + ".manifest.json");
  }
  return {{"command", command},
          {"argv", args},
          {"ensemble", std::move(ensemble)},
          {"grid", grid},
          {"digits", digits},
          {"seed", seed ? json(*seed) : json(nullptr)},
          {"outputs", outputs},
          {"version", EECRMT_VERSION}};
}

void check_manifest(const json& m) {
  auto need = [&](const char* key, bool ok) {
    if (!m.contains(key) || !ok) throw ParamError(std::string("manifest: missing or malformed '") + key + "'");
  };
  need("command", m.contains("command") && m["command"].is_string());
  need("argv", m.contains("argv") && m["argv"].is_array());
  need("ensemble", m.contains("ensemble") && (m["ensemble"].is_object() || m["ensemble"].is_null()));
  need("grid", m.contains("grid") && m["grid"].is_array());
  need("digits", m.contains("digits") && m["digits"].is_number_integer());
  need("seed", m.contains("seed") && (m["seed"].is_number_unsigned() || m["seed"].is_null()));
  need("outputs", m.contains("outputs") && m["outputs"].is_array());
  need("version", m.contains("version") && m["version"].is_string());
  for (const auto& a : m["argv"])
    if (!a.is_string()) throw ParamError("manifest: argv entries must be strings");
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParamError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw ParamError("write to '" + path + "' failed");
}

// JSON: manifest embedded. CSV: manifest written next to the file.
void emit(const Common& c, json doc, const std::string& csv, std::ostream& out) {
  check_manifest(doc["manifest"]);
  if (c.format == "json") {
    write_text(c.out, doc.dump(2) + "\n", out);
    return;
  }
  write_text(c.out, csv, out);
  if (c.out != "-") write_text(c.out + ".manifest.json", doc["manifest"].dump(2) + "\n", out);
}

// eec --------------------------------------------------------------------

struct EecArgs {
  EnsembleArgs ens;
  Common common;
  std::string x_grid, s_grid;
  bool clamp = false;
};

void cmd_eec(const EecArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const EnsembleSpec e = a.ens.spec();
  const PrecisionContext ctx = context(a.common.digits);
  const bool scaled = !a.s_grid.empty();
  const auto grid = parse_grid(scaled ? a.s_grid : a.x_grid);

  json rows = json::array();
  std::ostringstream csv;
  csv << "x,s,value,method,err\n";
  for (double g : grid) {
    EECResult r = scaled ? eec_scaled(e, g, ctx) : eec(e, g, ctx);
    const double value = a.clamp ? std::clamp(r.value, 0.0, 1.0) : r.value;
    rows.push_back({{"x", r.x},
                    {"s", scaled ? json(g) : json(nullptr)},
                    {"value", value},
                    {"method", method_name(r.method)},
                    {"err", r.err_est}});
    csv << number(r.x) << ',' << (scaled ? number(g) : "") << ',' << number(value) << ','
        << method_name(r.method) << ',' << number(r.err_est) << '\n';
  }
  json doc{{"manifest", make_manifest("eec", args, ensemble_json(e), grid, ctx.digits, std::nullopt, a.common)},
           {"rows", rows}};
  emit(a.common, std::move(doc), csv.str(), out);
}

// limit ------------------------------------------------------------------

struct LimitArgs {
  Common common;
  int cls = 1;
  std::string s_grid;
  bool with_tw = false;
  bool with_delta = false;
};

void cmd_limit(const LimitArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const PrecisionContext ctx = context(a.common.digits);
  const auto grid = parse_grid(a.s_grid);
  std::optional<PainleveSolution> sol;
  if (a.with_tw || a.with_delta) {
    const double s_min = *std::min_element(grid.begin(), grid.end());
    // Measured deltas need at least 30 digits in the solution.
    const int digits = a.with_delta ? std::max(30, ctx.digits) : ctx.digits;
    sol = solve_hastings_mcleod(s_min, PrecisionContext::with_digits(digits));
  }

  json rows = json::array();
  std::ostringstream csv;
  csv << "s,f_hat,tw_upper,delta_measured,delta_asymptote\n";
  for (double s : grid) {
    const double f = f_hat(a.cls, s, ctx);
    std::optional<double> tw, delta;
    if (a.with_tw) tw = tw_upper(a.cls, s, *sol);
    if (a.with_delta) {
      try {
        delta = measured_delta(a.cls, s, *sol, ctx);
      } catch (const PrecisionError&) {
        // Unresolved difference: reported as empty.
      }
    }
    // The asymptote is a large-s expansion, defined for s > 0 only.
    const std::optional<double> asym = s > 0 ? std::optional<double>(delta_asymptote(a.cls, s)) : std::nullopt;
    rows.push_back({{"x", s},
                    {"s", s},
                    {"value", f},
                    {"err", ctx.abs_tol},
                    {"f_hat", f},
                    {"tw_upper", maybe(tw)},
                    {"delta_measured", maybe(delta)},
                    {"delta_asymptote", maybe(asym)}});
    csv << number(s) << ',' << number(f) << ',' << csv_field(tw) << ',' << csv_field(delta) << ','
        << csv_field(asym) << '\n';
  }
  json ens{{"class", a.cls}};
  json doc{{"manifest", make_manifest("limit", args, ens, grid, ctx.digits, std::nullopt, a.common)}, {"rows", rows}};
  emit(a.common, std::move(doc), csv.str(), out);
}

// mc ---------------------------------------------------------------------

struct McArgs {
  EnsembleArgs ens;
  Common common;
  long long reps = 0;
  std::uint64_t seed = 0;
  std::string x_grid;
  bool per_k = false;
  int streams = 8;
  std::string sampler = "auto";
};

void cmd_mc(const McArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  SampleConfig cfg;
  cfg.ensemble = a.ens.spec();
  cfg.reps = a.reps;
  cfg.seed = a.seed;
  cfg.streams = a.streams;
  cfg.sampler = a.sampler == "dense" ? Sampler::dense
                : a.sampler == "tridiagonal" ? Sampler::tridiagonal
                                             : Sampler::automatic;
  if (cfg.reps < 100) throw ParamError("mc: --reps must be >= 100");
  const auto grid = parse_grid(a.x_grid);
  const McSummary m = run_mc(cfg, grid);
  const int n = cfg.ensemble.n;

  json rows = json::array();
  std::ostringstream csv;
  csv << "x,p_hat_max,stderr,chi_hat,chi_stderr";
  if (a.per_k)
    for (int k = 1; k <= n; ++k) csv << ",p_hat_" << k << ",stderr_" << k;
  csv << '\n';
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const TailEstimate& top = m.tails.largest(j);
    json row{{"x", grid[j]},
             {"s", nullptr},
             {"value", top.p_hat},
             {"err", top.std_error},
             {"chi_hat", m.euler[j].mean},
             {"chi_stderr", m.euler[j].std_error}};
    csv << number(grid[j]) << ',' << number(top.p_hat) << ',' << number(top.std_error) << ','
        << number(m.euler[j].mean) << ',' << number(m.euler[j].std_error);
    if (a.per_k) {
      json ks = json::array();
      for (int k = 1; k <= n; ++k) {
        const TailEstimate& t = m.tails.p[k - 1][j];
        ks.push_back({{"k", k}, {"p_hat", t.p_hat}, {"stderr", t.std_error}});
        csv << ',' << number(t.p_hat) << ',' << number(t.std_error);
      }
      row["per_k"] = ks;
    }
    csv << '\n';
    rows.push_back(row);
  }
  json doc{{"manifest", make_manifest("mc", args, ensemble_json(cfg.ensemble), grid, 15, a.seed, a.common)},
           {"diagnostics",
            {{"reps", cfg.reps},
             {"streams", cfg.streams},
             {"proposals", m.tails.proposals},
             {"acceptance_rate", m.tails.acceptance_rate()}}},
           {"rows", rows}};
  emit(a.common, std::move(doc), csv.str(), out);
}

// skewpoly ---------------------------------------------------------------

struct SkewArgs {
  Common common;
  std::string weight;
  std::string spec_file;
  int n = 0;
};

double bound(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ParamError("weight spec: support bounds must be numbers, \"inf\" or \"-inf\"");
}

// { "support": [a, b], "expr": {"power_lower", "power_upper", "exp_linear",
//   "exp_quadratic"}, "moments": [mu_0, ...] } with every key of expr optional.
WeightSpec load_weight(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParamError("cannot read weight spec '" + path + "'");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& ex) {
    throw ParamError("weight spec '" + path + "': " + ex.what());
  }
  WeightSpec w;
  if (!j.contains("support") || !j["support"].is_array() || j["support"].size() != 2)
    throw ParamError("weight spec: 'support' must be [lower, upper]");
  w.lower = bound(j["support"][0]);
  w.upper = bound(j["support"][1]);
  if (j.contains("expr")) {
    const json& e = j["expr"];
    if (!e.is_object()) throw ParamError("weight spec: 'expr' must be an object");
    for (const auto& [key, value] : e.items()) {
      if (!value.is_number()) throw ParamError("weight spec: expr." + key + " must be a number");
      const double v = value.get<double>();
      if (key == "power_lower") w.power_lower = v;
      else if (key == "power_upper") w.power_upper = v;
      else if (key == "exp_linear") w.exp_linear = v;
      else if (key == "exp_quadratic") w.exp_quadratic = v;
      else throw ParamError("weight spec: unknown expr key '" + key + "'");
    }
  }
  if (j.contains("moments")) {
    if (!j["moments"].is_array()) throw ParamError("weight spec: 'moments' must be an array");
    for (const auto& m : j["moments"]) {
      if (!m.is_number()) throw ParamError("weight spec: moments must be numbers");
      w.moments.push_back(m.get<double>());
    }
  }
  w.validate();
  return w;
}

void cmd_skewpoly(const SkewArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  if (a.common.format != "json") throw ParamError("skewpoly: only --format json is supported");
  const PrecisionContext ctx = context(a.common.digits);
  ScopedDigits guard(ctx.digits + 10);
  std::unique_ptr<MomentProvider<mp_real>> moments;
  json weight;
  if (a.weight == "condgoe") {
    moments = cond_goe_moments<mp_real>(ctx);
    weight = "condgoe";
  } else {
    if (a.spec_file.empty()) throw ParamError("skewpoly: --weight spec needs --spec FILE");
    moments = weight_spec_moments<mp_real>(load_weight(a.spec_file), ctx);
    weight = {{"spec", a.spec_file}};
  }
  SkewOrthoSystem<mp_real> sys;
  try {
    sys = build_system(*moments, a.n);
  } catch (const PivotError& ex) {
    throw PivotError(std::string(ex.what()) + "; raise --digits", ex.size());
  }

  const int shown = ctx.digits + 2;
  auto str = [&](const mp_real& v) { return v.str(shown); };
  auto polys = [&](const std::vector<MonicPoly<mp_real>>& ps) {
    json arr = json::array();
    for (const auto& p : ps) {
      json c = json::array();
      for (int i = 0; i <= p.degree(); ++i) c.push_back(str(p.coeff(i)));
      arr.push_back(c);
    }
    return arr;
  };
  json sigma = json::array(), gamma = json::array();
  for (const auto& s : sys.sigma) sigma.push_back(str(s));
  for (const auto& g : sys.gamma) gamma.push_back(str(g));

  json doc{{"manifest", make_manifest("skewpoly", args, {{"weight", weight}, {"n", a.n}}, {}, ctx.digits,
                                      std::nullopt, a.common)},
           {"n", a.n},
           {"digits", ctx.digits},
           {"coefficient_order", "ascending powers of x"},
           {"phi", polys(sys.phi)},
           {"phi_hat", polys(sys.phi_hat)},
           {"sigma", sigma},
           {"gamma", gamma}};
  emit(a.common, std::move(doc), "", out);
}

// rerun ------------------------------------------------------------------

std::vector<std::string> manifest_argv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParamError("cannot read manifest '" + path + "'");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& ex) {
    throw ParamError("manifest '" + path + "': " + ex.what());
  }
  if (j.contains("manifest")) j = j["manifest"];
  check_manifest(j);
  auto argv = j["argv"].get<std::vector<std::string>>();
  if (argv.empty() || argv.front() == "rerun") throw ParamError("manifest: argv does not name a command");
  return argv;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) throw ParamError("grid: cannot parse '" + text + "'");
    return v;
  };
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() == 1) return {to_double(parts[0])};
  if (parts.size() != 3) throw ParamError("grid: expected a:b:step, got '" + text + "'");
  const double a = to_double(parts[0]), b = to_double(parts[1]), step = to_double(parts[2]);
  if (!(step > 0)) throw ParamError("grid: step must be positive");
  if (b < a) throw ParamError("grid: upper end below lower end");
  const double count = std::round((b - a) / step) + 1;
  if (count > static_cast<double>(kMaxGrid)) throw ParamError("grid: more than 100000 points");
  const auto m = static_cast<std::size_t>(count);
  std::vector<double> g(m);
  for (std::size_t i = 0; i < m; ++i) g[i] = m == 1 ? a : a + (b - a) * static_cast<double>(i) / (m - 1);
  return g;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Expected Euler characteristic approximations for largest-eigenvalue tails", "eecrmt"};
  app.set_version_flag("--version", EECRMT_VERSION);
  app.require_subcommand(1);

  EecArgs eec_a;
  auto* eec_cmd = app.add_subcommand("eec", "EEC curve of a finite-n ensemble");
  add_ensemble(eec_cmd, eec_a.ens);
  add_common(eec_cmd, eec_a.common, true);
  auto* xg = eec_cmd->add_option("--x-grid", eec_a.x_grid, "thresholds a:b:step");
  auto* sg = eec_cmd->add_option("--s-grid", eec_a.s_grid, "edge-scaled thresholds a:b:step");
  xg->excludes(sg);
  eec_cmd->add_flag("--clamp", eec_a.clamp, "clamp values to [0, 1]");

  LimitArgs lim_a;
  auto* lim_cmd = app.add_subcommand("limit", "n -> infinity limit of the edge-scaled EEC");
  lim_cmd->add_option("--class", lim_a.cls, "1 real symmetric, 2 Hermitian")->required()->check(CLI::IsMember({1, 2}));
  lim_cmd->add_option("--s-grid", lim_a.s_grid, "a:b:step")->required();
  lim_cmd->add_flag("--with-tw", lim_a.with_tw, "add the Tracy-Widom upper tail");
  lim_cmd->add_flag("--with-delta", lim_a.with_delta, "add the measured relative difference (>= 30 digits)");
  add_common(lim_cmd, lim_a.common, true);

  McArgs mc_a;
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo tails and Euler characteristic");
  add_ensemble(mc_cmd, mc_a.ens);
  add_common(mc_cmd, mc_a.common, false);
  mc_cmd->add_option("--reps", mc_a.reps, "replications (>= 100)")->required();
  mc_cmd->add_option("--seed", mc_a.seed, "64-bit seed")->required();
  mc_cmd->add_option("--x-grid", mc_a.x_grid, "thresholds a:b:step")->required();
  mc_cmd->add_flag("--per-k", mc_a.per_k, "tails of every order statistic");
  mc_cmd->add_option("--streams", mc_a.streams, "parallel lanes");
  mc_cmd->add_option("--sampler", mc_a.sampler, "auto, dense or tridiagonal")
      ->check(CLI::IsMember({"auto", "dense", "tridiagonal"}));

  SkewArgs skew_a;
  skew_a.common.digits = 50;
  auto* skew_cmd = app.add_subcommand("skewpoly", "skew-orthogonal polynomials of a weight");
  skew_cmd->add_option("--weight", skew_a.weight, "condgoe or spec")
      ->required()
      ->check(CLI::IsMember({"condgoe", "spec"}));
  skew_cmd->add_option("--spec", skew_a.spec_file, "weight spec JSON file");
  skew_cmd->add_option("--n", skew_a.n, "number of polynomials")->required();
  add_common(skew_cmd, skew_a.common, true);

  std::string manifest_path;
  auto* rerun_cmd = app.add_subcommand("rerun", "repeat the run recorded in a manifest");
  rerun_cmd->add_option("manifest", manifest_path, "result JSON or manifest file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::string context_name;
  try {
    if (eec_cmd->parsed()) {
      context_name = "eec";
      if (eec_a.x_grid.empty() && eec_a.s_grid.empty()) throw ParamError("one of --x-grid, --s-grid is required");
      cmd_eec(eec_a, args, out);
    } else if (lim_cmd->parsed()) {
      context_name = "limit";
      cmd_limit(lim_a, args, out);
    } else if (mc_cmd->parsed()) {
      context_name = "mc";
      cmd_mc(mc_a, args, out);
    } else if (skew_cmd->parsed()) {
      context_name = "skewpoly";
      cmd_skewpoly(skew_a, args, out);
    } else {
      context_name = "rerun";
      return run(manifest_argv(manifest_path), out, err);
    }
  } catch (const RejectionBudgetError& e) {
    err << context_name << ": " << e.what() << '\n';
    return kExitBudget;
  } catch (const ParamError& e) {
    err << context_name << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << context_name << ": " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace eecrmt::cli
