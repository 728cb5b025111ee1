#pragma once

// Command-line front end. Every subcommand maps onto one library operation
// and writes a single artifact (CSV or JSON) preceded by its run manifest.
//
// Exit status: 0 success, 1 numeric/domain error, 2 usage error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lmbd/lmbd.hpp"

namespace lmbd::cli {

using ordered_json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Optional directory prefix for relative --out paths.
inline constexpr const char* kOutputDirEnv = "LMBD_OUTPUT_DIR";

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Non-finite values become JSON null.
inline ordered_json json_number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::optional<std::uint64_t> seed;
  std::string version{kVersion};
  std::string output = "-";

  void add(std::string key, std::string value) { parameters.emplace_back(std::move(key), std::move(value)); }
  void add(std::string key, double value) { add(std::move(key), format_double(value)); }
  void add(std::string key, int value) { add(std::move(key), std::to_string(value)); }

  std::string csv_header() const {
    std::ostringstream os;
    os << "# lmbd " << version << "\n# command: " << command << "\n";
    for (const auto& [k, v] : parameters) os << "# " << k << ": " << v << "\n";
    if (seed) os << "# seed: " << *seed << "\n";
    os << "# output: " << output << "\n";
    return os.str();
  }

  ordered_json to_json() const {
    ordered_json j;
    j["tool"] = "lmbd";
    j["version"] = version;
    j["command"] = command;
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : parameters) params[k] = v;
    j["parameters"] = params;
    if (seed) j["seed"] = *seed;
    j["output"] = output;
    return j;
  }
};

enum class Format { csv, json };

struct Artifact {
  std::string body;
  std::string summary;
};

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns) {
    for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
    os_ << "\n";
  }

  template <class... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(fields), first = false), ...);
    os_ << "\n";
  }

  std::string str() const { return os_.str(); }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long long v) { return std::to_string(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }

  std::ostringstream os_;
};

inline std::string render(const RunManifest& m, Format fmt, const std::string& csv_body, const ordered_json& result) {
  if (fmt == Format::csv) return m.csv_header() + csv_body;
  ordered_json doc;
  doc["manifest"] = m.to_json();
  doc["result"] = result;
  return doc.dump(2) + "\n";
}

inline std::string omega_edge_name(OmegaEdge e) { return e == OmegaEdge::to_zero ? "zero" : "inf"; }

inline std::string psi_edge_name(PsiEdge e) {
  switch (e) {
    case PsiEdge::none: return "none";
    case PsiEdge::to_zero: return "zero";
    case PsiEdge::to_one: return "one";
  }
  return "none";
}

inline ordered_json law_json(const LimitLaw& law) {
  ordered_json arr = ordered_json::array();
  for (const auto& [y, mass] : law) arr.push_back({{"y", y}, {"mass", mass}});
  return arr;
}

/// Holds the parsed flags shared across subcommands.
struct Options {
  int n = 1;
  double psi = 0.5;
  double omega = 1.0;
  std::string format;
  std::string out;
  std::optional<int> y;
  std::optional<int> r;
  std::string omega_edge = "zero";
  std::string psi_edge = "none";
  std::vector<double> probes;
  std::vector<int> ns{10, 40, 160};
  double psi_min = 0.01;
  double psi_max = 0.99;
  int psi_steps = 101;
  double omega_min = 0.05;
  double omega_max = 2.0;
  int omega_steps = 101;
  std::string in;
  std::size_t count = 1000;
  std::uint64_t seed = 1;
  bool raw = false;
};

inline Format resolve_format(const std::string& requested, Format fallback) {
  if (requested.empty()) return fallback;
  return requested == "json" ? Format::json : Format::csv;
}

inline CountSample read_sample(const Options& o) {
  std::ifstream in(o.in);
  if (!in) throw std::runtime_error("cannot open input file '" + o.in + "'");
  return CountSample::from_csv(in, o.n);
}

inline RunManifest base_manifest(const std::string& command, const Options& o) {
  RunManifest m;
  m.command = command;
  m.add("n", o.n);
  m.add("psi", o.psi);
  m.add("omega", o.omega);
  return m;
}

inline std::string grid_manifest_summary(const RegionGrid& g) {
  std::size_t flagged = 0;
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& c : g.cells) {
    if (c.flag) ++flagged;
    if (g.kind == GridKind::delta && c.flag) lo = std::min(lo, c.value);
  }
  std::ostringstream os;
  os << g.cells.size() << " cells, " << flagged << (g.kind == GridKind::delta ? " defined" : " with tau1 <= 1");
  if (g.kind == GridKind::delta) os << ", min Delta " << format_double(lo);
  return os.str();
}

inline Artifact run_command(const std::string& cmd, const Options& o, RunManifest& m) {
  Artifact a;
  if (cmd == "pmf") {
    const auto t = pmf(ModelParams(o.n, o.psi, o.omega));
    const auto fmt = resolve_format(o.format, Format::csv);
    CsvWriter csv({"y", "prob", "log_prob"});
    ordered_json probs = ordered_json::array(), logs = ordered_json::array();
    for (int y = 0; y <= t.n(); ++y) {
      csv.row(y, t.prob(y), t.log_prob(y));
      probs.push_back(t.prob(y));
      logs.push_back(json_number(t.log_prob(y)));
    }
    a.body = render(m, fmt, csv.str(), {{"log_normalizer", t.log_normalizer()}, {"prob", probs}, {"log_prob", logs}});
    a.summary = "pmf: " + std::to_string(t.n() + 1) + " support points";
  } else if (cmd == "cdf") {
    const auto t = pmf(ModelParams(o.n, o.psi, o.omega));
    const auto fmt = resolve_format(o.format, Format::csv);
    CsvWriter csv({"y", "cdf"});
    ordered_json rows = ordered_json::array();
    const int lo = o.y ? *o.y : 0;
    const int hi = o.y ? *o.y : t.n();
    if (o.y) m.add("y", *o.y);
    for (int y = lo; y <= hi; ++y) {
      csv.row(y, t.cdf(y));
      rows.push_back({{"y", y}, {"cdf", t.cdf(y)}});
    }
    a.body = render(m, fmt, csv.str(), rows);
    a.summary = o.y ? "cdf(" + std::to_string(*o.y) + ") = " + format_double(t.cdf(*o.y)) : "cdf: full table";
  } else if (cmd == "moments") {
    const auto s = moments(ModelParams(o.n, o.psi, o.omega));
    const auto fmt = resolve_format(o.format, Format::json);
    CsvWriter csv({"quantity", "value"});
    const std::pair<const char*, double> fields[] = {{"tau1", s.tau1}, {"tau2", s.tau2}, {"eta", s.eta},
                                                     {"mean", s.mean}, {"variance", s.variance}, {"pi", s.pi}};
    ordered_json j;
    for (const auto& [k, v] : fields) {
      csv.row(k, v);
      j[k] = v;
    }
    a.body = render(m, fmt, csv.str(), j);
    a.summary = "moments: mean " + format_double(s.mean) + ", variance " + format_double(s.variance);
  } else if (cmd == "tau") {
    const ModelParams p(o.n, o.psi, o.omega);
    const auto fmt = resolve_format(o.format, Format::csv);
    CsvWriter csv({"r", "tau"});
    ordered_json rows = ordered_json::array();
    const int lo = o.r ? *o.r : 1;
    const int hi = o.r ? *o.r : p.n();
    if (o.r) m.add("r", *o.r);
    for (int r = lo; r <= hi; ++r) {
      const double t = tau(r, p);
      csv.row(r, t);
      rows.push_back({{"r", r}, {"tau", json_number(t)}});
    }
    a.body = render(m, fmt, csv.str(), rows);
    a.summary = "tau: " + std::to_string(hi - lo + 1) + " ratios";
  } else if (cmd == "limits") {
    LimitRegime regime;
    regime.n = o.n;
    if (o.omega_edge != "zero" && o.omega_edge != "inf") throw std::invalid_argument("--omega-edge must be zero or inf");
    regime.omega_edge = o.omega_edge == "zero" ? OmegaEdge::to_zero : OmegaEdge::to_infinity;
    if (o.psi_edge == "none") regime.psi_edge = PsiEdge::none;
    else if (o.psi_edge == "zero") regime.psi_edge = PsiEdge::to_zero;
    else if (o.psi_edge == "one") regime.psi_edge = PsiEdge::to_one;
    else throw std::invalid_argument("--psi-edge must be none, zero or one");
    const auto probes = o.probes.empty() ? default_probes(regime.omega_edge) : o.probes;
    m.parameters.erase(m.parameters.begin() + 2);  // omega is the probed axis
    m.add("omega_edge", omega_edge_name(regime.omega_edge));
    m.add("psi_edge", psi_edge_name(regime.psi_edge));
    std::string probe_list;
    for (double p : probes) probe_list += (probe_list.empty() ? "" : ";") + format_double(p);
    m.add("probes", probe_list);
    const auto rep = convergence_report(regime, o.psi, probes);
    const auto fmt = resolve_format(o.format, Format::json);
    CsvWriter csv({"omega", "tv", "slope"});
    ordered_json ev = ordered_json::array();
    for (const auto& pr : rep.numeric_evidence) {
      csv.row(pr.omega, pr.tv, pr.slope);
      ev.push_back({{"omega", pr.omega}, {"tv", pr.tv}, {"slope", json_number(pr.slope)}});
    }
    ordered_json j{{"limit_mean", rep.limit_mean},
                   {"limit_variance", rep.limit_variance},
                   {"limit_distribution", law_json(rep.limit_distribution)},
                   {"monotone", rep.monotone},
                   {"numeric_evidence", ev}};
    a.body = render(m, fmt, csv.str(), j);
    a.summary = "limits: final TV " + format_double(rep.numeric_evidence.back().tv);
  } else if (cmd == "clt") {
    m.parameters.erase(m.parameters.begin());  // n is replaced by the scan list
    std::string list;
    for (int n : o.ns) list += (list.empty() ? "" : ";") + std::to_string(n);
    m.add("ns", list);
    const auto rows = clt_scan(o.ns, o.psi, o.omega);
    const auto fmt = resolve_format(o.format, Format::csv);
    CsvWriter csv({"n", "psi", "omega", "ks_distance"});
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
      csv.row(r.n, r.psi, r.omega, r.ks_distance);
      arr.push_back({{"n", r.n}, {"psi", r.psi}, {"omega", r.omega}, {"ks_distance", r.ks_distance}});
    }
    a.body = render(m, fmt, csv.str(), arr);
    a.summary = "clt: " + std::to_string(rows.size()) + " rows";
  } else if (cmd == "delta-grid" || cmd == "tau1-grid") {
    m.parameters.erase(m.parameters.begin() + 1, m.parameters.end());
    m.add("psi_min", o.psi_min);
    m.add("psi_max", o.psi_max);
    m.add("psi_steps", o.psi_steps);
    m.add("omega_min", o.omega_min);
    m.add("omega_max", o.omega_max);
    m.add("omega_steps", o.omega_steps);
    const auto spec = GridSpec::uniform(o.n, o.psi_min, o.psi_max, o.psi_steps, o.omega_min, o.omega_max, o.omega_steps);
    const auto g = cmd == "delta-grid" ? delta_grid(spec) : tau1_region_grid(spec);
    CsvWriter csv({"psi", "omega", "value", "flag"});
    ordered_json arr = ordered_json::array();
    for (const auto& c : g.cells) {
      csv.row(c.psi, c.omega, c.value, c.flag ? 1 : 0);
      arr.push_back({{"psi", c.psi}, {"omega", c.omega}, {"value", json_number(c.value)}, {"flag", c.flag}});
    }
    a.body = render(m, resolve_format(o.format, Format::csv), csv.str(), arr);
    a.summary = cmd + ": " + grid_manifest_summary(g);
  } else if (cmd == "dn") {
    const ModelParams p(o.n, o.psi, o.omega);
    const auto d = delta(p);
    ordered_json j{{"d_n", d_n(p)}, {"factor_product", factor_product(p)},
                   {"delta", d ? json_number(*d) : ordered_json(nullptr)}, {"singular", !d.has_value()},
                   {"tau1", tau(1, p)}, {"tau1_at_most_one", tau1_at_most_one(tau(1, p))}};
    if (p.n() >= 2 && p.n() <= DeltaPolynomial::kMaxTrials) {
      if (const auto poly = DeltaPolynomial::factor(p.n())) j["delta_polynomial"] = poly->evaluate(p.psi(), p.omega());
    }
    CsvWriter csv({"quantity", "value"});
    csv.row("d_n", d_n(p));
    csv.row("factor_product", factor_product(p));
    csv.row("delta", d.value_or(std::numeric_limits<double>::quiet_NaN()));
    a.body = render(m, resolve_format(o.format, Format::json), csv.str(), j);
    a.summary = "dn: D_n = " + format_double(d_n(p));
  } else if (cmd == "accuracy") {
    const ModelParams p(o.n, o.psi, o.omega);
    const double acc = ensemble_accuracy(p);
    const double pi = marginal_pi(p);
    const auto order = psi_pi_ordering(p);
    ordered_json j{{"q", majority_threshold(p.n())},
                   {"accuracy", acc},
                   {"pi", pi},
                   {"binomial_accuracy_at_pi", binomial_accuracy(p.n(), pi)},
                   {"psi_greater_than_pi", order.psi_vs_pi == Ordering::greater}};
    CsvWriter csv({"quantity", "value"});
    csv.row("q", majority_threshold(p.n()));
    csv.row("accuracy", acc);
    csv.row("pi", pi);
    csv.row("binomial_accuracy_at_pi", binomial_accuracy(p.n(), pi));
    a.body = render(m, resolve_format(o.format, Format::json), csv.str(), j);
    a.summary = "accuracy: " + format_double(acc);
  } else if (cmd == "fit" || cmd == "compare") {
    m.parameters = {{"n", std::to_string(o.n)}, {"input", o.in}};
    const auto s = read_sample(o);
    if (cmd == "fit") {
      const auto f = fit_mle(s);
      ordered_json j{{"psi_hat", f.psi_hat},           {"omega_hat", f.omega_hat}, {"log_likelihood", f.log_likelihood},
                     {"converged", f.converged},       {"boundary", f.boundary},   {"iterations", f.iterations},
                     {"score_norm", f.score_norm}};
      j["standard_errors"] = f.standard_errors
                                 ? ordered_json{{"psi", f.standard_errors->first}, {"omega", f.standard_errors->second}}
                                 : ordered_json(nullptr);
      CsvWriter csv({"quantity", "value"});
      csv.row("psi_hat", f.psi_hat);
      csv.row("omega_hat", f.omega_hat);
      csv.row("log_likelihood", f.log_likelihood);
      csv.row("converged", f.converged ? 1 : 0);
      a.body = render(m, resolve_format(o.format, Format::json), csv.str(), j);
      a.summary = "fit: psi " + format_double(f.psi_hat) + ", omega " + format_double(f.omega_hat) +
                  (f.converged ? "" : " (not converged)");
    } else {
      const auto rep = model_comparison(s);
      ordered_json models = ordered_json::array();
      CsvWriter csv({"model", "parameters", "log_likelihood", "aic", "predicted_accuracy"});
      for (const auto& mf : rep.models) {
        ordered_json est;
        for (const auto& [k, v] : mf.estimates) est[k] = v;
        models.push_back({{"model", mf.name},
                          {"parameter_count", mf.parameter_count},
                          {"estimates", est},
                          {"log_likelihood", mf.log_likelihood},
                          {"aic", mf.aic},
                          {"predicted_accuracy", mf.predicted_accuracy},
                          {"converged", mf.converged}});
        csv.row(mf.name, mf.parameter_count, mf.log_likelihood, mf.aic, mf.predicted_accuracy);
      }
      ordered_json j{{"observations", rep.observations},
                     {"empirical_accuracy", rep.empirical_accuracy},
                     {"best_by_aic", rep.best_by_aic},
                     {"models", models}};
      a.body = render(m, resolve_format(o.format, Format::json), csv.str(), j);
      a.summary = "compare: best by AIC is " + rep.best_by_aic;
    }
  } else if (cmd == "sample") {
    const ModelParams p(o.n, o.psi, o.omega);
    m.add("count", std::to_string(o.count));
    m.seed = o.seed;
    const auto draws = sample(p, o.count, o.seed);
    const auto fmt = resolve_format(o.format, Format::csv);
    ordered_json j;
    std::string body;
    if (o.raw) {
      CsvWriter csv({"y"});
      for (int y : draws) csv.row(y);
      body = csv.str();
      j["draws"] = draws;
    } else {
      const auto s = CountSample::from_draws(p.n(), draws);
      CsvWriter csv({"y", "count"});
      ordered_json counts = ordered_json::array();
      for (int y = 0; y <= p.n(); ++y) {
        csv.row(y, static_cast<long long>(s.count(y)));
        counts.push_back({{"y", y}, {"count", s.count(y)}});
      }
      body = csv.str();
      j["counts"] = counts;
    }
    a.body = render(m, fmt, body, j);
    a.summary = "sample: " + std::to_string(draws.size()) + " draws";
  } else {
    throw std::logic_error("unhandled subcommand " + cmd);
  }
  return a;
}

inline std::filesystem::path resolve_output(const std::string& out) {
  std::filesystem::path p(out);
  if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir && p.is_relative()) p = std::filesystem::path(dir) / p;
  return p;
}

/// Runs one invocation. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"LMBD multiplicative binomial distribution toolkit", "lmbd"};
  app.require_subcommand(1);
  Options o;

  auto model_flags = [&](CLI::App* sub) {
    sub->add_option("--n", o.n, "number of trials")->required();
    sub->add_option("--psi", o.psi, "independence marginal probability (default 0.5)");
    sub->add_option("--omega", o.omega, "intra-units association (default 1)");
  };
  auto io_flags = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", o.out, "output file (default stdout)");
  };
  auto grid_flags = [&](CLI::App* sub) {
    sub->add_option("--n", o.n, "number of trials")->required();
    sub->add_option("--psi-min", o.psi_min, "default 0.01");
    sub->add_option("--psi-max", o.psi_max, "default 0.99");
    sub->add_option("--psi-steps", o.psi_steps, "default 101");
    sub->add_option("--omega-min", o.omega_min, "default 0.05");
    sub->add_option("--omega-max", o.omega_max, "default 2");
    sub->add_option("--omega-steps", o.omega_steps, "default 101");
    io_flags(sub);
  };

  for (const char* name : {"pmf", "moments", "dn", "accuracy"}) {
    auto* sub = app.add_subcommand(name);
    model_flags(sub);
    io_flags(sub);
  }
  app.get_subcommand("pmf")->description("probability table of Y_n");
  app.get_subcommand("moments")->description("tau1, tau2, eta, mean, variance, marginal pi");
  app.get_subcommand("dn")->description("D_n, its factor product and Delta");
  app.get_subcommand("accuracy")->description("majority-vote ensemble accuracy");

  auto* cdf_cmd = app.add_subcommand("cdf", "cumulative distribution");
  model_flags(cdf_cmd);
  io_flags(cdf_cmd);
  cdf_cmd->add_option("--y", o.y, "single support point (default: whole table)");

  auto* tau_cmd = app.add_subcommand("tau", "ratios tau_r = K_{n-r} / K_n");
  model_flags(tau_cmd);
  io_flags(tau_cmd);
  tau_cmd->add_option("--r", o.r, "single r (default: 1..n)");

  auto* limits_cmd = app.add_subcommand("limits", "limit law and numeric convergence as omega -> 0 or inf");
  limits_cmd->add_option("--n", o.n, "number of trials")->required();
  limits_cmd->add_option("--psi", o.psi, "fixed psi for the exact pmf (default 0.5)");
  limits_cmd->add_option("--omega-edge", o.omega_edge, "zero or inf")->check(CLI::IsMember({"zero", "inf"}));
  limits_cmd->add_option("--psi-edge", o.psi_edge, "none, zero or one")->check(CLI::IsMember({"none", "zero", "one"}));
  limits_cmd->add_option("--probes", o.probes, "omega probe points (default 10^-1..10^-8 or 10^1..10^8)")
      ->delimiter(',');
  io_flags(limits_cmd);

  auto* clt_cmd = app.add_subcommand("clt", "KS distance of standardised Y_n to N(0,1) along n");
  clt_cmd->add_option("--ns", o.ns, "increasing trial counts (default 10,40,160)")->delimiter(',');
  clt_cmd->add_option("--psi", o.psi, "default 0.5");
  clt_cmd->add_option("--omega", o.omega, "default 1");
  io_flags(clt_cmd);

  grid_flags(app.add_subcommand("delta-grid", "Delta over a (psi, omega) grid"));
  grid_flags(app.add_subcommand("tau1-grid", "tau1 and the tau1 <= 1 flag over a (psi, omega) grid"));

  for (const char* name : {"fit", "compare"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--in", o.in, "CSV with header y,count")->required();
    sub->add_option("--n", o.n, "support bound")->required();
    io_flags(sub);
  }
  app.get_subcommand("fit")->description("maximum-likelihood (psi, omega) from observed counts");
  app.get_subcommand("compare")->description("LMBD vs Binomial vs Beta-Binomial by AIC and predicted accuracy");

  auto* sample_cmd = app.add_subcommand("sample", "seeded i.i.d. draws of Y_n");
  model_flags(sample_cmd);
  io_flags(sample_cmd);
  sample_cmd->add_option("--count", o.count, "number of draws (default 1000)");
  sample_cmd->add_option("--seed", o.seed, "64-bit seed (default 1)");
  sample_cmd->add_flag("--raw", o.raw, "one draw per row instead of y,count frequencies");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "lmbd: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    RunManifest m = base_manifest(cmd, o);
    std::filesystem::path target;
    if (!o.out.empty()) {
      target = resolve_output(o.out);
      m.output = target.string();
    }
    const Artifact a = run_command(cmd, o, m);
    if (o.out.empty()) {
      out << a.body;
      err << a.summary << "\n";
    } else {
      std::ofstream f(target, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write '" + target.string() + "'");
      f << a.body;
      if (!f) throw std::runtime_error("write to '" + target.string() + "' failed");
      out << a.summary << " -> " << target.string() << "\n";
    }
  } catch (const std::exception& e) {
    err << "lmbd " << cmd << ": " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace lmbd::cli
