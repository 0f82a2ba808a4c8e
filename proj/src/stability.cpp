#include "willmore/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "willmore/errors.hpp"
#include "willmore/numerics.hpp"
#include "willmore/perturbation.hpp"
#include "willmore/spectral_grid.hpp"

namespace willmore {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPi2 = kPi * kPi;

double mode_step(int k, int l) {
  double n = static_cast<double>(k * k + l * l);
  return 2e-3 * std::min(1.0, std::sqrt(5.0 / std::max(n, 1.0)));
}

// Richardson-refined five-point second derivative.
double second_derivative(double fm2, double fm1, double f0, double fp1, double fp2, double h) {
  double d1 = (fp1 - 2.0 * f0 + fm1) / (h * h);
  double d2 = (fp2 - 2.0 * f0 + fm2) / (4.0 * h * h);
  return (4.0 * d1 - d2) / 3.0;
}

SecondVariations second_variations_on(PerturbationEvaluator& ev, const std::vector<double>& phi,
                                      double h, const FunctionalValues& base) {
  std::vector<double> scaled(phi.size());
  auto at = [&](double t) {
    for (std::size_t i = 0; i < phi.size(); ++i) scaled[i] = t * phi[i];
    return ev.evaluate(scaled);
  };
  FunctionalValues m2 = at(-2.0 * h), m1 = at(-h), p1 = at(h), p2 = at(2.0 * h);
  SecondVariations out;
  out.W = second_derivative(m2.W, m1.W, base.W, p1.W, p2.W, h);
  out.pi1 = second_derivative(m2.pi1, m1.pi1, base.pi1, p1.pi1, p2.pi1, h);
  out.pi2 = second_derivative(m2.pi2, m1.pi2, base.pi2, p1.pi2, p2.pi2, h);
  out.norm2 = ev.l2_norm2(phi);
  return out;
}

void validate_b(double b) {
  if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("b must be positive");
}

}  // namespace

double mode_norm2(const FourierMode& m, double b) {
  auto [r, s] = product_radii(b);
  return 4.0 * kPi2 * r * s * m.mean_square();
}

double d2W_clifford(const FourierMode& m) {
  m.validate();
  double n = static_cast<double>(m.k * m.k + m.l * m.l);
  return (2.0 * n * n - 6.0 * n + 4.0) * mode_norm2(m, 1.0);
}

double d2Pi1_clifford(const FourierMode& m) {
  m.validate();
  if (m.boundary()) return 0.0;
  double sum = m.active_norm2();
  if (sum == 0.0) return 0.0;
  double k = m.k, l = m.l, n = k * k + l * l;
  double ratio = (2.0 * m.c_sc * m.c_cs - 2.0 * m.c_cc * m.c_ss) / sum;
  return (1.0 / kPi2) * (2.0 * k * l - 4.0 * k * l / n) * ratio * mode_norm2(m, 1.0);
}

FourierMode eta_correction(const FourierMode& m) {
  m.validate();
  FourierMode out{m.k, m.l, 0.0, 0.0, 0.0, 0.0};
  if (m.boundary()) return out;
  double k = m.k, l = m.l;
  double f = 2.0 * k * l / (k * k + l * l);
  // d1 d2 of sin cos = -kl cos sin, cos sin -> -kl sin cos,
  // cos cos -> kl sin sin, sin sin -> kl cos cos.
  out.c_cs = -f * m.c_sc;
  out.c_sc = -f * m.c_cs;
  out.c_ss = f * m.c_cc;
  out.c_cc = f * m.c_ss;
  return out;
}

double d2Pi2_homogeneous(const FourierMode& m, double b) {
  m.validate();
  validate_b(b);
  auto [r, s] = product_radii(b);
  double k = m.k, l = m.l;
  double r2 = r * r, s2 = s * s;
  double cr = (k * k * s2 - l * l * r2) / (k * k * s2 + l * l * r2);
  double nrm = mode_norm2(m, b);
  // d11 Phi - d22 Phi = (l^2/s^2 - k^2/r^2) Phi on every mode function.
  double term1 = (1.0 / (4.0 * kPi2 * r2)) * (l * l / s2 - k * k / r2) * nrm;
  double term2 = (r2 - s2) / (4.0 * kPi2 * r2 * r2 * s2) * nrm;
  double term3 = -(2.0 * (r2 - s2) + cr) / (4.0 * kPi2 * r2 * r2 * s2) * nrm;
  return term1 + term2 + term3;
}

double default_step(const std::vector<double>& phi, int n) {
  SpectralGrid grid(n);
  std::vector<SpectralGrid::Complex> spec(grid.modes());
  grid.forward(phi.data(), spec.data());
  const int h = grid.half();
  double power = 0.0, weighted = 0.0;
  for (int i = 0; i < n; ++i) {
    int ki = i <= n / 2 ? i : i - n;
    for (int j = 0; j < h; ++j) {
      double p = grid.column_weight(j) * std::norm(spec[static_cast<std::size_t>(i) * h + j]);
      power += p;
      weighted += p * static_cast<double>(ki * ki + j * j);
    }
  }
  double w2 = power > 0.0 ? weighted / power : 0.0;
  return 2e-3 * std::min(1.0, std::sqrt(5.0 / std::max(w2, 1e-300)));
}

SecondVariations second_variations(const TorusImmersion& f, const NormalField& v, double h) {
  if (h <= 0.0) h = default_step(v.phi, v.n);
  PerturbationEvaluator ev(f, v.n);
  FunctionalValues base = ev.base_values();
  return second_variations_on(ev, v.phi, h, base);
}

double quadratic_form_numeric(const Functional& functional,
                              std::shared_ptr<const TorusImmersion> f, const NormalField& v,
                              double h) {
  SecondVariations d = second_variations(*f, v, h);
  switch (functional.kind) {
    case FunctionalKind::W: return d.W;
    case FunctionalKind::Pi1: return d.pi1;
    case FunctionalKind::Pi2: return d.pi2;
    case FunctionalKind::Penalized:
      return d.W - functional.form.alpha * d.pi1 - functional.form.beta * d.pi2;
  }
  return d.W;
}

double g_polynomial(double at, double c, double l) {
  double c1 = c * c + 1.0;
  double l2 = l * l;
  return 2.0 * c1 * c1 * l2 * l2 - (6.0 * c1 + 8.0 * at * c) * l2 + 4.0 + 16.0 * at * c / c1;
}

GRoots g_roots(double at, double c) {
  if (!(c >= 1.0)) throw DomainError("g_roots needs c >= 1");
  double c1 = c * c + 1.0;
  GRoots out;
  out.l2_first = 2.0 / c1;
  out.l2_second = 1.0 / c1 + 4.0 * at * c / (c1 * c1);
  out.first_real = out.l2_first >= 0.0;
  out.second_real = out.l2_second >= 0.0;
  return out;
}

double clifford_critical_alpha(int k, int l) {
  if (k < 1 || l < 1) throw DomainError("critical alpha needs k, l >= 1");
  // The second root 1/(c^2+1) + 4 a c/(c^2+1)^2 of g meets the mode's l^2
  // (with c = k/l) at a = (l^2 (c^2+1) - 1)(c^2+1)/(4c); alpha = 4 pi^2 a.
  // g is symmetric under (k, l) -> (l, k), so use c = max/min >= 1.
  double hi = std::max(k, l), lo = std::min(k, l);
  double c = hi / lo;
  double c1 = c * c + 1.0;
  double at = (lo * lo * c1 - 1.0) * c1 / (4.0 * c);
  return 4.0 * kPi2 * at;
}

std::vector<MarginRow> margin_table_clifford(int K, double alpha) {
  std::vector<MarginRow> rows;
  for (int k = 0; k <= K; ++k) {
    for (int l = 0; l <= K; ++l) {
      if (k == 0 && l == 0) continue;
      for (ModePattern p : patterns_for(k, l)) {
        FourierMode m = pattern_mode(k, l, p);
        MarginRow row;
        row.k = k;
        row.l = l;
        row.pattern = p;
        row.norm2 = mode_norm2(m, 1.0);
        row.q_value = d2W_clifford(m) - alpha * d2Pi1_clifford(m);
        row.margin = row.q_value / row.norm2;
        row.invariance = is_invariance_mode(k, l);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

double fit_beta(double b, int n, int threads, double* residual) {
  auto base = std::make_shared<const TorusImmersion>(TorusImmersion::homogeneous(b));
  ModeBasis basis(base, n, 2, true, false);
  EvaluatorPool pool(*base, n, threads);
  ProbeGradients g = probe_gradients(pool, basis, Eigen::VectorXd::Zero(
                                                      static_cast<Eigen::Index>(basis.size())),
                                     1e-3, true);
  MultiplierFit fit = fit_multipliers(g);
  if (residual) *residual = fit.residual;
  return fit.beta;
}

ModeScan scan_modes(double b, int K, int n, int threads) {
  validate_b(b);
  auto base = std::make_shared<const TorusImmersion>(TorusImmersion::homogeneous(b));
  ModeBasis basis(base, n, K, false, true);
  EvaluatorPool pool(*base, n, threads);
  FunctionalValues f0 = pool.main().base_values();
  ModeScan scan;
  scan.b = b;
  scan.K = K;
  scan.n = n;
  scan.rows.resize(basis.size());
  int workers = pool.threads();
  std::size_t d = basis.size();
  parallel_for(static_cast<std::size_t>(workers), workers, [&](std::size_t w) {
    for (std::size_t s = d * w / workers; s < d * (w + 1) / workers; ++s) {
      const BasisSlot& sl = basis.slot(s);
      ModeScanRow& row = scan.rows[s];
      row.k = sl.k;
      row.l = sl.l;
      row.pattern = sl.pattern;
      row.d2 = second_variations_on(pool.at(w), basis.grid(s), mode_step(sl.k, sl.l), f0);
    }
  });
  scan.beta = fit_beta(b, n, threads, &scan.beta_residual);
  return scan;
}

std::vector<MarginRow> margin_table(const ModeScan& scan, double alpha, double beta) {
  std::vector<MarginRow> rows;
  rows.reserve(scan.rows.size());
  for (const ModeScanRow& r : scan.rows) {
    MarginRow row;
    row.k = r.k;
    row.l = r.l;
    row.pattern = r.pattern;
    row.norm2 = r.d2.norm2;
    row.q_value = r.d2.W - alpha * r.d2.pi1 - beta * r.d2.pi2;
    row.margin = row.q_value / row.norm2;
    row.invariance = is_invariance_mode(r.k, r.l);
    rows.push_back(row);
  }
  return rows;
}

namespace {

double min_margin(const std::vector<MarginRow>& rows) {
  double m = std::numeric_limits<double>::infinity();
  for (const MarginRow& r : rows) {
    if (!r.invariance) m = std::min(m, r.margin);
  }
  return m;
}

void collect_kernel(ThresholdResult& res) {
  int at_cutoff = 0;
  for (const MarginRow& r : res.margins) {
    if (r.invariance || std::abs(r.margin) > 10.0 * res.tol) continue;
    res.kernel.push_back({pattern_mode(r.k, r.l, r.pattern), r.pattern});
    if (r.k == res.K || r.l == res.K) ++at_cutoff;
  }
  if (at_cutoff > 0) {
    res.warnings.push_back("a kernel mode lies at the cutoff K; increase K to confirm the threshold");
  }
}

}  // namespace

ThresholdResult threshold_from_scan(const ModeScan& scan, double tol) {
  ThresholdResult res;
  res.b = scan.b;
  res.K = scan.K;
  res.tol = tol;
  res.analytic = false;
  res.beta_b = scan.beta;
  double lo = 0.0, hi = 12.0 * kPi2;
  auto f = [&](double a) { return min_margin(margin_table(scan, a, scan.beta)); };
  if (f(lo) < -tol) {
    throw BracketFailure("second variation is already negative at alpha = 0",
                         margin_table(scan, lo, scan.beta));
  }
  if (f(hi) >= -tol) {
    throw BracketFailure("no threshold below alpha = 12 pi^2", margin_table(scan, hi, scan.beta));
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) >= -tol) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  res.alpha_b = lo;
  res.margins = margin_table(scan, lo, scan.beta);
  collect_kernel(res);
  if (scan.beta_residual > 1e-3) {
    std::ostringstream os;
    os << "beta fit residual " << scan.beta_residual << " exceeds 1e-3";
    res.warnings.push_back(os.str());
  }
  return res;
}

ThresholdResult alpha_threshold(double b, const ThresholdOptions& opts) {
  validate_b(b);
  if (b < 0.8 || b > 1.25) throw DomainError("alpha_threshold needs b in [0.8, 1.25]");
  if (opts.K < 4) throw DomainError("alpha_threshold needs K >= 4");
  if (!(opts.tol > 0.0)) throw DomainError("tolerance must be positive");
  bool analytic = opts.path == ThresholdPath::Analytic ||
                  (opts.path == ThresholdPath::Auto && b == 1.0);
  if (!analytic) {
    return threshold_from_scan(scan_modes(b, opts.K, opts.n, opts.threads), opts.tol);
  }
  if (b != 1.0) throw DomainError("the analytic threshold path is only available at b = 1");
  ThresholdResult res;
  res.b = 1.0;
  res.K = opts.K;
  res.tol = opts.tol;
  res.analytic = true;
  res.beta_b = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= opts.K; ++k) {
    for (int l = 1; l <= opts.K; ++l) {
      if (is_invariance_mode(k, l)) continue;
      best = std::min(best, clifford_critical_alpha(k, l));
    }
  }
  res.alpha_b = best;
  res.margins = margin_table_clifford(opts.K, best);
  collect_kernel(res);
  return res;
}

ThresholdResult alpha_threshold(double b, int K, double tol) {
  ThresholdOptions opts;
  opts.K = K;
  opts.tol = tol;
  return alpha_threshold(b, opts);
}

ChartFunction mode_transfer(const FourierMode& m, double b) {
  m.validate();
  auto [r, s] = product_radii(b);
  return {m, r, s};
}

PhaseShift combine_phases(double c1, double c2) {
  if (c1 == 0.0 && c2 == 0.0) throw DomainError("combine_phases needs a nonzero amplitude");
  return {std::hypot(c1, c2), std::atan2(c2, c1)};
}

double KernelProfile::operator()(double xt) const { return std::sin(frequency * xt); }

KernelProfile equivariant_kernel_profile(double b) {
  validate_b(b);
  if (b == 1.0) {
    throw DomainError("kernel profile is ambiguous at b = 1 (two-dimensional kernel)");
  }
  // b < 1 is the mirror case: chart directions swap, i.e. b -> 1/b.
  double bb = b > 1.0 ? b : 1.0 / b;
  auto [r, s] = product_radii(bb);
  return {s / r + 4.0 * r / s};
}

}  // namespace willmore
