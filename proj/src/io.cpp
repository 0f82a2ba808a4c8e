#include "willmore/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "willmore/errors.hpp"

#ifndef WILLMORE_VERSION
#define WILLMORE_VERSION "0.0.0"
#endif

namespace willmore {

namespace {

std::vector<double> parse_row(const std::string& line, std::size_t expected) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str()) throw UsageError("malformed number '" + cell + "'");
    out.push_back(v);
  }
  if (out.size() != expected) throw UsageError("malformed row: " + line);
  return out;
}

// Reads "# key v1 v2 ..." comment lines until the column header.
std::vector<std::pair<std::string, std::vector<double>>> read_comment_block(std::istream& is,
                                                                            std::string* header) {
  std::vector<std::pair<std::string, std::vector<double>>> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("#", 0) != 0) {
      *header = line;
      return out;
    }
    std::stringstream ss(line.substr(1));
    std::string key;
    ss >> key;
    std::vector<double> vals;
    double v;
    while (ss >> v) vals.push_back(v);
    out.emplace_back(key, vals);
  }
  throw UsageError("missing column header");
}

const std::vector<double>& comment_value(
    const std::vector<std::pair<std::string, std::vector<double>>>& block, const std::string& key,
    std::size_t count) {
  for (const auto& [k, v] : block) {
    if (k == key && v.size() == count) return v;
  }
  throw UsageError("missing '# " + key + "' line");
}

Complex grid_point(const Lattice& L, int n, int i, int j) {
  return (static_cast<double>(i) / n) * L.gen1 + (static_cast<double>(j) / n) * L.gen2;
}

Field4 sampled_points(const TorusImmersion& f, int n) {
  if (!f.analytic() && f.native_grid() != n) {
    throw DomainError("sampled immersion only available at its native grid");
  }
  return f.sample(n).p;
}

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw UsageError("truncated binary dump");
  return v;
}

}  // namespace

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

Json json_real(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::strtod(format_real(x).c_str(), nullptr);
}

std::string version_string() { return WILLMORE_VERSION; }

void write_csv_header(std::ostream& os, const OutputHeader& h) {
  os << "# willmore " << version_string() << '\n';
  os << "# command " << h.command << '\n';
  for (const auto& [k, v] : h.config) os << "# config " << k << ' ' << v << '\n';
  for (const auto& [k, v] : h.tolerances) os << "# tolerance " << k << ' ' << format_real(v) << '\n';
}

Json header_json(const OutputHeader& h) {
  Json j;
  j["version"] = version_string();
  j["command"] = h.command;
  Json cfg = Json::object();
  for (const auto& [k, v] : h.config) cfg[k] = v;
  j["config"] = cfg;
  Json tol = Json::object();
  for (const auto& [k, v] : h.tolerances) tol[k] = json_real(v);
  j["tolerances"] = tol;
  return j;
}

void write_immersion_csv(std::ostream& os, const TorusImmersion& f, int n) {
  Field4 p = sampled_points(f, n);
  const Lattice& L = f.domain();
  os << "# lattice " << format_real(L.gen1.real()) << ' ' << format_real(L.gen1.imag()) << ' '
     << format_real(L.gen2.real()) << ' ' << format_real(L.gen2.imag()) << '\n';
  os << "# n " << n << '\n';
  os << "x,y,p0,p1,p2,p3\n";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Complex z = grid_point(L, n, i, j);
      std::size_t k = static_cast<std::size_t>(i) * n + j;
      os << format_real(z.real()) << ',' << format_real(z.imag());
      for (int c = 0; c < 4; ++c) os << ',' << format_real(p.c[c][k]);
      os << '\n';
    }
  }
}

TorusImmersion read_immersion_csv(std::istream& is) {
  std::string header;
  auto block = read_comment_block(is, &header);
  const auto& lat = comment_value(block, "lattice", 4);
  int n = static_cast<int>(comment_value(block, "n", 1)[0]);
  if (header != "x,y,p0,p1,p2,p3") throw UsageError("unexpected immersion CSV columns");
  if (n < 4) throw UsageError("invalid grid size in immersion CSV");
  Lattice L = make_lattice({lat[0], lat[1]}, {lat[2], lat[3]});
  Field4 p;
  p.resize(static_cast<std::size_t>(n) * n);
  std::string line;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!std::getline(is, line)) throw UsageError("immersion CSV has too few rows");
    auto row = parse_row(line, 6);
    for (int c = 0; c < 4; ++c) p.c[c][k] = row[2 + c];
  }
  return TorusImmersion::grid_sampled(L, n, std::move(p));
}

void write_immersion_binary(std::ostream& os, const TorusImmersion& f, int n) {
  Field4 p = sampled_points(f, n);
  const Lattice& L = f.domain();
  os.write("WTGS", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(n));
  for (double v : {L.gen1.real(), L.gen1.imag(), L.gen2.real(), L.gen2.imag()}) put(os, v);
  for (std::size_t k = 0; k < p.size(); ++k) {
    for (int c = 0; c < 4; ++c) put(os, p.c[c][k]);
  }
}

TorusImmersion read_immersion_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "WTGS", 4) != 0) {
    throw UsageError("not a torus grid dump");
  }
  if (get<std::uint32_t>(is) != 1) throw UsageError("unsupported dump version");
  int n = static_cast<int>(get<std::uint32_t>(is));
  if (n < 4 || n > 1 << 14) throw UsageError("invalid grid size in dump");
  double g[4];
  for (double& v : g) v = get<double>(is);
  Field4 p;
  p.resize(static_cast<std::size_t>(n) * n);
  for (std::size_t k = 0; k < p.size(); ++k) {
    for (int c = 0; c < 4; ++c) p.c[c][k] = get<double>(is);
  }
  return TorusImmersion::grid_sampled(make_lattice({g[0], g[1]}, {g[2], g[3]}), n, std::move(p));
}

void write_metric_csv(std::ostream& os, const MetricGrid& m, const Lattice& domain) {
  m.validate();
  os << "# lattice " << format_real(domain.gen1.real()) << ' ' << format_real(domain.gen1.imag())
     << ' ' << format_real(domain.gen2.real()) << ' ' << format_real(domain.gen2.imag()) << '\n';
  os << "# n " << m.n << '\n';
  os << "x,y,E,F,G\n";
  for (int i = 0; i < m.n; ++i) {
    for (int j = 0; j < m.n; ++j) {
      Complex z = grid_point(domain, m.n, i, j);
      std::size_t k = static_cast<std::size_t>(i) * m.n + j;
      os << format_real(z.real()) << ',' << format_real(z.imag()) << ',' << format_real(m.E[k])
         << ',' << format_real(m.F[k]) << ',' << format_real(m.G[k]) << '\n';
    }
  }
}

std::pair<Lattice, MetricGrid> read_metric_csv(std::istream& is) {
  std::string header;
  auto block = read_comment_block(is, &header);
  const auto& lat = comment_value(block, "lattice", 4);
  int n = static_cast<int>(comment_value(block, "n", 1)[0]);
  if (header != "x,y,E,F,G") throw UsageError("unexpected metric CSV columns");
  MetricGrid m;
  m.n = n;
  std::size_t count = static_cast<std::size_t>(n) * n;
  m.E.resize(count);
  m.F.resize(count);
  m.G.resize(count);
  std::string line;
  for (std::size_t k = 0; k < count; ++k) {
    if (!std::getline(is, line)) throw UsageError("metric CSV has too few rows");
    auto row = parse_row(line, 5);
    m.E[k] = row[2];
    m.F[k] = row[3];
    m.G[k] = row[4];
  }
  m.validate();
  return {make_lattice({lat[0], lat[1]}, {lat[2], lat[3]}), std::move(m)};
}

void write_margin_csv(std::ostream& os, const std::vector<MarginRow>& rows) {
  os << "k,l,pattern,Q_alpha_value,margin\n";
  for (const MarginRow& r : rows) {
    os << r.k << ',' << r.l << ',' << pattern_name(r.pattern) << ',' << format_real(r.q_value)
       << ',' << format_real(r.margin) << '\n';
  }
}

Json margins_json(const std::vector<MarginRow>& rows) {
  Json a = Json::array();
  for (const MarginRow& r : rows) {
    a.push_back({{"k", r.k},
                 {"l", r.l},
                 {"pattern", pattern_name(r.pattern)},
                 {"Q_alpha_value", json_real(r.q_value)},
                 {"margin", json_real(r.margin)},
                 {"invariance", r.invariance}});
  }
  return a;
}

Json threshold_json(const ThresholdResult& r) {
  Json j;
  j["b"] = json_real(r.b);
  j["alpha_b"] = json_real(r.alpha_b);
  j["beta_b"] = json_real(r.beta_b);
  j["path"] = r.analytic ? "analytic" : "numeric";
  j["K"] = r.K;
  j["tol"] = json_real(r.tol);
  Json kernel = Json::array();
  for (const KernelEntry& e : r.kernel) {
    kernel.push_back({{"k", e.mode.k}, {"l", e.mode.l}, {"pattern", pattern_name(e.pattern)}});
  }
  j["kernel"] = kernel;
  j["warnings"] = r.warnings;
  j["margins"] = margins_json(r.margins);
  return j;
}

void write_energy_table_csv(std::ostream& os, const EnergyTable& t) {
  os << "a,omega,alpha_hat,beta_hat,converged\n";
  for (const EnergyRow& r : t.rows) {
    os << format_real(r.a) << ',' << format_real(r.omega) << ',' << format_real(r.alpha_hat) << ','
       << format_real(r.beta_hat) << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

Json energy_table_json(const EnergyTable& t) {
  Json j;
  j["b"] = json_real(t.b);
  j["K"] = t.K;
  j["n"] = t.n;
  Json rows = Json::array();
  for (const EnergyRow& r : t.rows) {
    rows.push_back({{"a", json_real(r.a)},
                    {"omega", json_real(r.omega)},
                    {"alpha_hat", json_real(r.alpha_hat)},
                    {"beta_hat", json_real(r.beta_hat)},
                    {"converged", r.converged},
                    {"iterations", r.iterations},
                    {"kkt_residual", json_real(r.kkt_residual)}});
  }
  j["rows"] = rows;
  return j;
}

Json coefficients_json(const ModeCoefficients& c, int K) {
  Json j;
  j["K"] = K;
  j["constant"] = json_real(c.constant);
  Json modes = Json::array();
  for (const FourierMode& m : c.modes) {
    if (m.is_zero()) continue;
    modes.push_back({{"k", m.k},          {"l", m.l},          {"sc", json_real(m.c_sc)},
                     {"cs", json_real(m.c_cs)}, {"cc", json_real(m.c_cc)}, {"ss", json_real(m.c_ss)}});
  }
  j["modes"] = modes;
  return j;
}

ModeCoefficients coefficients_from_json(const Json& j) {
  try {
    ModeCoefficients c;
    c.constant = j.at("constant").get<double>();
    for (const Json& m : j.at("modes")) {
      FourierMode f{m.at("k").get<int>(), m.at("l").get<int>(), m.at("sc").get<double>(),
                    m.at("cs").get<double>(), m.at("cc").get<double>(), m.at("ss").get<double>()};
      f.validate();
      c.modes.push_back(f);
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed coefficient file: ") + e.what());
  }
}

Json minimizer_json(const MinimizerResult& r) {
  Json j;
  j["b"] = json_real(r.b);
  j["K"] = r.K;
  j["n"] = r.n;
  if (r.kind == ConstraintKind::Pinned) {
    j["constraint"] = {{"kind", "pinned"}, {"a_target", json_real(r.a_target)}};
  } else {
    j["constraint"] = {
        {"kind", "penalized"}, {"alpha", json_real(r.alpha)}, {"a_max", json_real(r.a_max)}};
  }
  j["W"] = json_real(r.W);
  j["objective"] = json_real(r.objective);
  j["pi"] = {json_real(r.pi.a), json_real(r.pi.b)};
  j["alpha_hat"] = json_real(r.alpha_hat);
  j["beta_hat"] = json_real(r.beta_hat);
  j["multiplier_fit"] = {{"alpha", json_real(r.kkt.alpha)},
                         {"beta", json_real(r.kkt.beta)},
                         {"alpha_determined", r.kkt.alpha_determined},
                         {"residual", json_real(r.kkt.residual)}};
  j["coefficient_norm"] = json_real(r.coefficient_norm());
  j["report"] = {{"converged", r.report.converged},
                 {"iterations", r.report.iterations},
                 {"outer_iterations", r.report.outer_iterations},
                 {"evaluations", r.report.evaluations},
                 {"constraint_violation", json_real(r.report.constraint_violation)},
                 {"stationarity", json_real(r.report.stationarity)},
                 {"message", r.report.message}};
  j["coefficients"] = coefficients_json(r.coefficients, r.K);
  return j;
}

}  // namespace willmore
