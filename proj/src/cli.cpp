#include "willmore/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "willmore/errors.hpp"
#include "willmore/io.hpp"
#include "willmore/minimizer.hpp"
#include "willmore/stability.hpp"
#include "willmore/verify.hpp"

namespace willmore {

namespace {

constexpr double kPi2 = 9.86960440108935861883;
constexpr double kCgTol = 1e-12;

double parse_real(const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw UsageError("not a number: '" + s + "'");
  }
  return v;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_real(v[i]);
  return out;
}

std::string opt_str(const std::optional<double>& v) { return v ? format_real(*v) : "none"; }

OutputHeader make_header(const RunConfig& c) {
  OutputHeader h;
  h.command = c.command;
  h.config = {{"b", format_real(c.b)},
              {"alpha", opt_str(c.alpha)},
              {"beta", opt_str(c.beta)},
              {"a", opt_str(c.a)},
              {"a-max", format_real(c.a_max)},
              {"kmax", std::to_string(c.K)},
              {"n", std::to_string(c.n)},
              {"a-grid", join(c.a_grid)},
              {"surface", c.surface},
              {"path", c.path},
              {"init", c.init.empty() ? "none" : c.init},
              {"format", c.format},
              {"warm-start", c.warm_start ? "true" : "false"}};
  h.tolerances = {{"cg", kCgTol}};
  return h;
}

void emit(const RunConfig& cfg, std::ostream& fallback, const std::function<void(std::ostream&)>& w) {
  if (cfg.out.empty()) {
    w(fallback);
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw UsageError("cannot open output file '" + cfg.out + "'");
  w(f);
  if (!f) throw UsageError("failed writing '" + cfg.out + "'");
}

void write_json(std::ostream& os, const Json& j) { os << j.dump(2) << '\n'; }

ThresholdPath threshold_path(const std::string& s) {
  if (s == "analytic") return ThresholdPath::Analytic;
  if (s == "numeric") return ThresholdPath::Numeric;
  return ThresholdPath::Auto;
}

}  // namespace

std::vector<double> parse_range(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.size() != 3) throw UsageError("range must be start:stop:count");
    double a = parse_real(parts[0]), b = parse_real(parts[1]);
    double cnt = parse_real(parts[2]);
    if (cnt < 1 || cnt != std::floor(cnt) || cnt > 10000) throw UsageError("range count must be a positive integer");
    int n = static_cast<int>(cnt);
    if (n == 1) return {a};
    for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
    return out;
  }
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ',')) out.push_back(parse_real(p));
  if (out.empty()) throw UsageError("empty list");
  return out;
}

void RunConfig::finalize() {
  static const std::map<std::string, std::pair<int, int>> defaults = {
      {"threshold", {8, 64}}, {"energy", {0, 128}},    {"spectrum", {4, 64}},
      {"minimize", {4, 32}},  {"omega-table", {4, 32}}, {"verify", {0, 0}}};
  auto d = defaults.find(command);
  if (d == defaults.end()) throw UsageError("unknown command '" + command + "'");
  if (K == 0) K = d->second.first;
  if (n == 0) n = d->second.second;
  if (format != "csv" && format != "json") throw UsageError("format must be csv or json");
  if (threads < 1 || threads > 256) throw UsageError("threads must lie in [1, 256]");
  for (double t : {tol, kernel_tol, constraint_tol, stationarity_tol, concavity_budget}) {
    if (!(t > 0.0 && t < 1.0)) throw UsageError("tolerances must lie in (0, 1)");
  }
  if (max_iterations < 1 || max_iterations > 100000) throw UsageError("max-iterations out of range");
  if (command == "verify") return;
  if (command == "energy") {
    if (!(b > 0.0 && b <= 100.0)) throw UsageError("b must lie in (0, 100]");
    if (surface != "homogeneous" && surface != "equivariant12") {
      throw UsageError("surface must be homogeneous or equivariant12");
    }
  } else if (!(b >= 0.8 && b <= 1.25)) {
    throw UsageError("b must lie in [0.8, 1.25]");
  }
  if (n < 16 || n > 1024 || n % 2 != 0) throw UsageError("n must be even and in [16, 1024]");
  if (command != "energy" && (K < 1 || K > 8)) throw UsageError("kmax must lie in [1, 8]");
  if (command == "threshold" && K < 4) throw UsageError("threshold needs kmax >= 4");
  if (path != "auto" && path != "analytic" && path != "numeric") {
    throw UsageError("path must be auto, analytic or numeric");
  }
  if (command == "spectrum" && !alpha) throw UsageError("spectrum needs --alpha");
  if (command == "minimize") {
    if (alpha.has_value() == a.has_value()) throw UsageError("minimize needs exactly one of --alpha, --a");
    if (a && !(*a >= 0.0 && *a <= 0.05)) throw UsageError("a must lie in [0, 0.05]");
    if (!(a_max > 0.0 && a_max <= 0.05)) throw UsageError("a-max must lie in (0, 0.05]");
    if (K < 2) throw UsageError("minimize needs kmax >= 2");
  }
  if (command == "omega-table") {
    if (a_grid.empty()) throw UsageError("omega-table needs --a-grid");
    for (std::size_t i = 0; i < a_grid.size(); ++i) {
      if (!(a_grid[i] >= 0.0 && a_grid[i] <= 0.05)) throw UsageError("a-grid must lie in [0, 0.05]");
      if (i && !(a_grid[i] > a_grid[i - 1])) throw UsageError("a-grid must increase");
    }
    if (K < 2) throw UsageError("omega-table needs kmax >= 2");
  }
  for (double v : {alpha.value_or(0.0), beta.value_or(0.0)}) {
    if (!std::isfinite(v) || std::abs(v) > 1e4) throw UsageError("multipliers must be finite and |.| <= 1e4");
  }
}

void apply_config_file(RunConfig& cfg, const std::string& path, const std::set<std::string>& skip) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  auto real = [](const Json& v, const std::string& k) {
    if (!v.is_number()) throw UsageError("config key '" + k + "' must be a number");
    return v.get<double>();
  };
  auto integer = [](const Json& v, const std::string& k) {
    if (!v.is_number_integer()) throw UsageError("config key '" + k + "' must be an integer");
    return v.get<int>();
  };
  auto text = [](const Json& v, const std::string& k) {
    if (!v.is_string()) throw UsageError("config key '" + k + "' must be a string");
    return v.get<std::string>();
  };
  for (const auto& [k, v] : j.items()) {
    if (skip.count(k)) continue;
    if (k == "b") cfg.b = real(v, k);
    else if (k == "alpha") cfg.alpha = real(v, k);
    else if (k == "beta") cfg.beta = real(v, k);
    else if (k == "a") cfg.a = real(v, k);
    else if (k == "a-max") cfg.a_max = real(v, k);
    else if (k == "kmax") cfg.K = integer(v, k);
    else if (k == "n") cfg.n = integer(v, k);
    else if (k == "a-grid") {
      if (v.is_string()) {
        cfg.a_grid = parse_range(v.get<std::string>());
      } else if (v.is_array()) {
        cfg.a_grid.clear();
        for (const Json& x : v) cfg.a_grid.push_back(real(x, k));
      } else {
        throw UsageError("config key 'a-grid' must be a range string or an array");
      }
    } else if (k == "tol") cfg.tol = real(v, k);
    else if (k == "kernel-tol") cfg.kernel_tol = real(v, k);
    else if (k == "constraint-tol") cfg.constraint_tol = real(v, k);
    else if (k == "stationarity-tol") cfg.stationarity_tol = real(v, k);
    else if (k == "concavity-budget") cfg.concavity_budget = real(v, k);
    else if (k == "max-iterations") cfg.max_iterations = integer(v, k);
    else if (k == "surface") cfg.surface = text(v, k);
    else if (k == "path") cfg.path = text(v, k);
    else if (k == "init") cfg.init = text(v, k);
    else if (k == "out") cfg.out = text(v, k);
    else if (k == "format") cfg.format = text(v, k);
    else if (k == "threads") cfg.threads = integer(v, k);
    else if (k == "warm-start") {
      if (!v.is_boolean()) throw UsageError("config key 'warm-start' must be a boolean");
      cfg.warm_start = v.get<bool>();
    } else {
      throw UsageError("unknown config key '" + k + "'");
    }
  }
}

int cmd_threshold(const RunConfig& cfg, std::ostream& out) {
  ThresholdOptions o;
  o.K = cfg.K;
  o.tol = cfg.tol;
  o.path = threshold_path(cfg.path);
  o.n = cfg.n;
  o.threads = cfg.threads;
  ThresholdResult r = alpha_threshold(cfg.b, o);
  OutputHeader h = make_header(cfg);
  h.tolerances.push_back({"bisection", cfg.tol});
  h.tolerances.push_back({"kernel", 10.0 * cfg.tol});
  emit(cfg, out, [&](std::ostream& os) {
    if (cfg.format == "json") {
      write_json(os, {{"header", header_json(h)}, {"result", threshold_json(r)}});
      return;
    }
    write_csv_header(os, h);
    os << "# alpha_b " << format_real(r.alpha_b) << '\n';
    os << "# alpha_b_over_pi2 " << format_real(r.alpha_b / kPi2) << '\n';
    os << "# beta_b " << format_real(r.beta_b) << '\n';
    os << "# path " << (r.analytic ? "analytic" : "numeric") << '\n';
    for (const KernelEntry& e : r.kernel) {
      os << "# kernel " << e.mode.k << ' ' << e.mode.l << ' ' << pattern_name(e.pattern) << '\n';
    }
    for (const std::string& w : r.warnings) os << "# warning " << w << '\n';
    write_margin_csv(os, r.margins);
  });
  return 0;
}

int cmd_energy(const RunConfig& cfg, std::ostream& out) {
  TorusImmersion f = cfg.surface == "equivariant12" ? TorusImmersion::equivariant12(cfg.b)
                                                    : TorusImmersion::homogeneous(cfg.b);
  double w = willmore_energy(f, cfg.n);
  OutputHeader h = make_header(cfg);
  emit(cfg, out, [&](std::ostream& os) {
    if (cfg.format == "json") {
      write_json(os, {{"header", header_json(h)},
                      {"result", {{"surface", cfg.surface}, {"b", json_real(cfg.b)},
                                  {"n", cfg.n}, {"W", json_real(w)}}}});
      return;
    }
    write_csv_header(os, h);
    os << "surface,b,n,W\n"
       << cfg.surface << ',' << format_real(cfg.b) << ',' << cfg.n << ',' << format_real(w) << '\n';
  });
  return 0;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  bool analytic = cfg.path == "analytic" || (cfg.path == "auto" && cfg.b == 1.0);
  std::vector<MarginRow> rows;
  double beta = 0.0;
  if (analytic) {
    if (cfg.b != 1.0) throw DomainError("the analytic spectrum is only available at b = 1");
    if (cfg.beta && *cfg.beta != 0.0) throw DomainError("the analytic spectrum has beta = 0");
    rows = margin_table_clifford(cfg.K, *cfg.alpha);
  } else {
    ModeScan scan = scan_modes(cfg.b, cfg.K, cfg.n, cfg.threads);
    beta = cfg.beta.value_or(scan.beta);
    rows = margin_table(scan, *cfg.alpha, beta);
  }
  std::vector<const MarginRow*> near;
  for (const MarginRow& r : rows) {
    if (!r.invariance && std::abs(r.margin) <= cfg.kernel_tol) near.push_back(&r);
  }
  OutputHeader h = make_header(cfg);
  h.tolerances.push_back({"kernel", cfg.kernel_tol});
  emit(cfg, out, [&](std::ostream& os) {
    if (cfg.format == "json") {
      Json nz = Json::array();
      for (const MarginRow* r : near) {
        nz.push_back({{"k", r->k}, {"l", r->l}, {"pattern", pattern_name(r->pattern)}});
      }
      write_json(os, {{"header", header_json(h)},
                      {"result", {{"path", analytic ? "analytic" : "numeric"},
                                  {"beta", json_real(beta)},
                                  {"near_zero", nz},
                                  {"margins", margins_json(rows)}}}});
      return;
    }
    write_csv_header(os, h);
    os << "# path " << (analytic ? "analytic" : "numeric") << '\n';
    os << "# beta " << format_real(beta) << '\n';
    for (const MarginRow* r : near) {
      os << "# near_zero " << r->k << ' ' << r->l << ' ' << pattern_name(r->pattern) << '\n';
    }
    write_margin_csv(os, rows);
  });
  return 0;
}

int cmd_minimize(const RunConfig& cfg, std::ostream& out) {
  MinimizationProblem p = cfg.a ? MinimizationProblem::pinned(cfg.b, *cfg.a, cfg.K)
                                : MinimizationProblem::penalized(cfg.b, *cfg.alpha, cfg.K);
  p.a_max = cfg.a_max;
  p.n = cfg.n;
  p.threads = cfg.threads;
  p.settings.max_iterations = cfg.max_iterations;
  p.settings.constraint_tol = cfg.constraint_tol;
  p.settings.stationarity_tol = cfg.stationarity_tol;
  if (!cfg.init.empty()) {
    std::ifstream f(cfg.init);
    if (!f) throw UsageError("cannot open init file '" + cfg.init + "'");
    Json j;
    try {
      j = Json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("init file is not valid JSON: ") + e.what());
    }
    p.init = coefficients_from_json(j.contains("result") ? j["result"]["coefficients"]
                                    : j.contains("coefficients") ? j["coefficients"] : j);
  }
  MinimizerResult r = minimize(p);
  OutputHeader h = make_header(cfg);
  h.tolerances.push_back({"constraint", cfg.constraint_tol});
  h.tolerances.push_back({"stationarity", cfg.stationarity_tol});
  h.tolerances.push_back({"fd_step", p.settings.fd_step});
  emit(cfg, out, [&](std::ostream& os) {
    if (cfg.format == "json") {
      write_json(os, {{"header", header_json(h)}, {"result", minimizer_json(r)}});
      return;
    }
    write_csv_header(os, h);
    os << "# W " << format_real(r.W) << '\n';
    os << "# objective " << format_real(r.objective) << '\n';
    os << "# pi " << format_real(r.pi.a) << ' ' << format_real(r.pi.b) << '\n';
    os << "# alpha_hat " << format_real(r.alpha_hat) << '\n';
    os << "# beta_hat " << format_real(r.beta_hat) << '\n';
    os << "# alpha_determined " << (r.kkt.alpha_determined ? 1 : 0) << '\n';
    os << "# converged " << (r.report.converged ? 1 : 0) << ' ' << r.report.message << '\n';
    os << "# constant " << format_real(r.coefficients.constant) << '\n';
    os << "k,l,sc,cs,cc,ss\n";
    for (const FourierMode& m : r.coefficients.modes) {
      if (m.is_zero()) continue;
      os << m.k << ',' << m.l << ',' << format_real(m.c_sc) << ',' << format_real(m.c_cs) << ','
         << format_real(m.c_cc) << ',' << format_real(m.c_ss) << '\n';
    }
  });
  return r.report.converged ? 0 : 1;
}

int cmd_omega_table(const RunConfig& cfg, std::ostream& out) {
  OmegaOptions o;
  o.n = cfg.n;
  o.threads = cfg.threads;
  o.warm_start = cfg.warm_start;
  o.settings.max_iterations = cfg.max_iterations;
  o.settings.constraint_tol = cfg.constraint_tol;
  o.settings.stationarity_tol = cfg.stationarity_tol;
  EnergyTable t = omega_table(cfg.b, cfg.a_grid, cfg.K, o);
  std::vector<SlopeCheck> slopes = slope_checks(t);
  std::optional<ConcavityReport> conc;
  int converged = 0;
  for (const EnergyRow& r : t.rows) converged += r.converged ? 1 : 0;
  if (converged >= 3) conc = concavity_check(t, cfg.concavity_budget);
  OutputHeader h = make_header(cfg);
  h.tolerances.push_back({"constraint", cfg.constraint_tol});
  h.tolerances.push_back({"stationarity", cfg.stationarity_tol});
  h.tolerances.push_back({"concavity_budget", cfg.concavity_budget});
  emit(cfg, out, [&](std::ostream& os) {
    if (cfg.format == "json") {
      Json j = energy_table_json(t);
      Json s = Json::array();
      for (const SlopeCheck& c : slopes) {
        s.push_back({{"a_left", json_real(c.a_left)}, {"a_right", json_real(c.a_right)},
                     {"slope", json_real(c.slope)}, {"alpha_mid", json_real(c.alpha_mid)},
                     {"relative_error", json_real(c.relative_error)}});
      }
      j["slope_checks"] = s;
      if (conc) {
        j["concavity"] = {{"passed", conc->passed},
                          {"max_positive_second_difference",
                           json_real(conc->max_positive_second_difference)}};
      } else {
        j["concavity"] = nullptr;
      }
      write_json(os, {{"header", header_json(h)}, {"result", j}});
      return;
    }
    write_csv_header(os, h);
    for (const SlopeCheck& c : slopes) {
      os << "# slope " << format_real(c.a_left) << ' ' << format_real(c.a_right) << ' '
         << format_real(c.slope) << ' ' << format_real(c.alpha_mid) << ' '
         << format_real(c.relative_error) << '\n';
    }
    if (conc) {
      os << "# concavity " << (conc->passed ? "pass" : "fail") << ' '
         << format_real(conc->max_positive_second_difference) << '\n';
    } else {
      os << "# concavity skipped (fewer than 3 converged rows)\n";
    }
    write_energy_table_csv(os, t);
  });
  return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  VerifyOptions o;
  o.threads = cfg.threads;
  o.only = cfg.only;
  auto results = run_acceptance(o, [&](const CriterionResult& r) {
    log << (r.passed ? "PASS " : "FAIL ") << r.id << ' ' << r.name << ": " << r.detail << '\n';
    log.flush();
  });
  bool all = true;
  for (const CriterionResult& r : results) all = all && r.passed;
  OutputHeader h = make_header(cfg);
  emit(cfg, out, [&](std::ostream& os) {
    if (cfg.format == "json") {
      Json a = Json::array();
      for (const CriterionResult& r : results) {
        a.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed},
                     {"value", json_real(r.value)}, {"tolerance", json_real(r.tolerance)},
                     {"detail", r.detail}});
      }
      write_json(os, {{"header", header_json(h)}, {"passed", all}, {"criteria", a}});
      return;
    }
    write_csv_header(os, h);
    os << "id,passed,value,tolerance\n";
    for (const CriterionResult& r : results) {
      os << r.id << ',' << (r.passed ? 1 : 0) << ',' << format_real(r.value) << ','
         << format_real(r.tolerance) << '\n';
    }
  });
  return all ? 0 : 1;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string a_grid, config_file;
  bool no_warm = false;
  CLI::App app{"Constrained Willmore tori: thresholds, spectra and minimizers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  std::map<std::string, CLI::Option*> flags;
  auto common = [&](CLI::App* s) {
    flags["out"] = s->add_option("--out", cfg.out, "Output file (default stdout)");
    flags["format"] = s->add_option("--format", cfg.format, "csv or json");
    flags["threads"] = s->add_option("--threads", cfg.threads, "Worker threads");
    s->add_option("--config", config_file, "JSON file with flag values");
  };
  auto geometry = [&](CLI::App* s) {
    flags["b"] = s->add_option("--b", cfg.b, "Conformal parameter b = s/r");
    flags["n"] = s->add_option("--n", cfg.n, "Grid size");
  };
  auto add_real = [&](CLI::App* s, const std::string& name, double& target, const std::string& help) {
    flags[name] = s->add_option("--" + name, target, help);
  };

  CLI::App* th = app.add_subcommand("threshold", "Stability threshold alpha^b");
  geometry(th);
  common(th);
  flags["kmax"] = th->add_option("--kmax", cfg.K, "Mode cutoff K");
  add_real(th, "tol", cfg.tol, "Bisection tolerance");
  flags["path"] = th->add_option("--path", cfg.path, "auto, analytic or numeric");

  CLI::App* en = app.add_subcommand("energy", "Willmore energy of an analytic torus");
  geometry(en);
  common(en);
  flags["surface"] = en->add_option("--surface", cfg.surface, "homogeneous or equivariant12");

  double alpha = 0.0, beta = 0.0, a = 0.0;
  CLI::App* sp = app.add_subcommand("spectrum", "Margin table of the penalized second variation");
  geometry(sp);
  common(sp);
  flags["kmax"] = sp->add_option("--kmax", cfg.K, "Mode cutoff K");
  add_real(sp, "alpha", alpha, "Multiplier alpha");
  add_real(sp, "beta", beta, "Multiplier beta (default: fitted)");
  add_real(sp, "kernel-tol", cfg.kernel_tol, "Near-zero margin tolerance");
  flags["path"] = sp->add_option("--path", cfg.path, "auto, analytic or numeric");

  CLI::App* mn = app.add_subcommand("minimize", "Penalized or pinned minimization");
  geometry(mn);
  common(mn);
  flags["kmax"] = mn->add_option("--kmax", cfg.K, "Mode cutoff K");
  add_real(mn, "alpha", alpha, "Penalized run with multiplier alpha");
  add_real(mn, "a", a, "Pinned run with Pi1 = a");
  add_real(mn, "a-max", cfg.a_max, "Upper bound on Pi1 in penalized runs");
  add_real(mn, "constraint-tol", cfg.constraint_tol, "Constraint tolerance");
  add_real(mn, "stationarity-tol", cfg.stationarity_tol, "Relative stationarity tolerance");
  flags["max-iterations"] = mn->add_option("--max-iterations", cfg.max_iterations, "Iteration budget");
  flags["init"] = mn->add_option("--init", cfg.init, "Coefficient JSON to start from");

  CLI::App* om = app.add_subcommand("omega-table", "Minimal energy over a grid of a");
  geometry(om);
  common(om);
  flags["kmax"] = om->add_option("--kmax", cfg.K, "Mode cutoff K");
  flags["a-grid"] = om->add_option("--a-grid", a_grid, "start:stop:count or a,b,c");
  add_real(om, "constraint-tol", cfg.constraint_tol, "Constraint tolerance");
  add_real(om, "stationarity-tol", cfg.stationarity_tol, "Relative stationarity tolerance");
  add_real(om, "concavity-budget", cfg.concavity_budget, "Second-difference budget");
  flags["max-iterations"] = om->add_option("--max-iterations", cfg.max_iterations, "Iteration budget");
  om->add_flag("--no-warm-start", no_warm, "Solve rows independently");

  CLI::App* vf = app.add_subcommand("verify", "Run the acceptance suite");
  common(vf);
  vf->add_option("--only", cfg.only, "Criterion ids to run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : static_cast<int>(ExitCode::UsageError);
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    auto given = [&](const std::string& name) {
      const CLI::Option* o = sub->get_option_no_throw("--" + name);
      return o != nullptr && o->count() > 0;
    };
    if (given("alpha")) cfg.alpha = alpha;
    if (given("beta")) cfg.beta = beta;
    if (given("a")) cfg.a = a;
    if (given("a-grid")) cfg.a_grid = parse_range(a_grid);
    if (no_warm) cfg.warm_start = false;
    if (!config_file.empty()) {
      std::set<std::string> explicit_keys;
      for (const auto& entry : flags) {
        if (given(entry.first)) explicit_keys.insert(entry.first);
      }
      if (no_warm) explicit_keys.insert("warm-start");
      apply_config_file(cfg, config_file, explicit_keys);
    }
    cfg.finalize();
    if (cfg.command == "threshold") return cmd_threshold(cfg, out);
    if (cfg.command == "energy") return cmd_energy(cfg, out);
    if (cfg.command == "spectrum") return cmd_spectrum(cfg, out);
    if (cfg.command == "minimize") return cmd_minimize(cfg, out);
    if (cfg.command == "omega-table") return cmd_omega_table(cfg, out);
    return cmd_verify(cfg, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::UsageError);
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::UsageError);
  } catch (const InvalidLattice& e) {
    err << "usage error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::UsageError);
  } catch (const UnsupportedKind& e) {
    err << "usage error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::UsageError);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::NumericalFailure);
  }
}

}  // namespace willmore
