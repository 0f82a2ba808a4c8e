#include "willmore/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "willmore/conformal.hpp"
#include "willmore/errors.hpp"
#include "willmore/immersion.hpp"
#include "willmore/minimizer.hpp"
#include "willmore/stability.hpp"

namespace willmore {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPi2 = kPi * kPi;

// Pinned tolerances, one block per criterion.
constexpr double kC1AnalyticTol = 1e-9;
constexpr double kC1NumericRel = 1e-2;
constexpr double kC1Seconds = 30.0;
constexpr double kC2Tol = 1e-8;
constexpr double kC2Seconds = 1.0;
constexpr double kC3NumericRel = 1e-4;
constexpr double kC4WRel = 1e-3;
constexpr double kC4Pi1Rel = 1e-2;
constexpr double kC4Seconds = 120.0;
constexpr double kC5RootTol = 1e-12;
constexpr double kC5ExactTol = 1e-15;
constexpr double kC7Rel = 1e-3;
constexpr double kC7Step = 0.02;
constexpr double kC8Rel = 0.05;
constexpr double kC8Seconds = 900.0;
constexpr double kC9Budget = 1e-3;
constexpr double kC10FlatTol = 1e-10;
constexpr double kC10HomogTol = 1e-6;
constexpr double kC10QuadRel = 2e-2;
constexpr double kC11Descent = 1e-6;
constexpr double kC11ZeroNorm = 1e-5;

constexpr int kStabilityGrid = 64;
constexpr int kMinimizerGrid = 32;
constexpr int kMinimizerK = 6;

using Clock = std::chrono::steady_clock;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

std::shared_ptr<const TorusImmersion> homog(double b) {
  return std::make_shared<const TorusImmersion>(TorusImmersion::homogeneous(b));
}

// The (1,2) kernel field at the Clifford torus, sin(x + 2y) in chart angles.
NormalField phi1_field(int n) {
  return mode_normal_field(pattern_mode(1, 2, ModePattern::SinPlus), homog(1.0), n);
}

double area_norm2(const NormalField& v) {
  PerturbationEvaluator ev(*v.ref, v.n);
  return ev.l2_norm2(v.phi);
}

struct Shared {
  int threads = 1;
  bool have_table = false;
  EnergyTable table;
  bool table_failed = false;
  std::string table_error;
  double seconds = 0.0;

  const EnergyTable& omega() {
    if (!have_table && !table_failed) {
      auto t0 = Clock::now();
      try {
        OmegaOptions o;
        o.n = kMinimizerGrid;
        o.threads = threads;
        table = omega_table(1.05, {0.0, 0.005, 0.01, 0.02}, kMinimizerK, o);
        have_table = true;
      } catch (const std::exception& e) {
        table_failed = true;
        table_error = e.what();
      }
      seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    }
    if (table_failed) throw NumericalFailure("omega table failed: " + table_error, 0.0);
    return table;
  }
};

void c1(CriterionResult& r, Shared& sh) {
  r.name = "threshold constant 10 pi^2 (analytic and numeric)";
  auto t0 = Clock::now();
  ThresholdOptions a;
  a.path = ThresholdPath::Analytic;
  a.K = 8;
  double ana = alpha_threshold(1.0, a).alpha_b;
  ThresholdOptions nopt;
  nopt.path = ThresholdPath::Numeric;
  nopt.K = 8;
  nopt.n = kStabilityGrid;
  nopt.threads = sh.threads;
  double num = alpha_threshold(1.0, nopt).alpha_b;
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  double err_a = std::abs(ana - 10 * kPi2);
  double err_n = std::abs(num - 10 * kPi2) / (10 * kPi2);
  r.value = err_a;
  r.tolerance = kC1AnalyticTol;
  r.passed = err_a <= kC1AnalyticTol && err_n <= kC1NumericRel && secs < kC1Seconds;
  if (secs >= kC1Seconds) r.detail = "runtime limit exceeded; ";
  r.detail += "analytic " + fmt(ana) + ", numeric " + fmt(num) + " (rel " + fmt(err_n) + ")";
}

void c2(CriterionResult& r, Shared&) {
  r.name = "Clifford energy 2 pi^2";
  auto t0 = Clock::now();
  double w = willmore_energy(TorusImmersion::homogeneous(1.0), 128);
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  r.value = std::abs(w - 2 * kPi2);
  r.tolerance = kC2Tol;
  r.passed = r.value <= kC2Tol && secs < kC2Seconds;
  r.detail = (secs >= kC2Seconds ? "runtime limit exceeded; W = " : "W = ") + fmt(w);
}

void c3(CriterionResult& r, Shared&) {
  r.name = "zero modes (1,1), (1,0), (0,1)";
  auto f = homog(1.0);
  bool exact = true;
  double worst = 0.0;
  for (auto [k, l] : {std::pair{1, 1}, std::pair{1, 0}, std::pair{0, 1}}) {
    for (ModePattern p : patterns_for(k, l)) {
      FourierMode m = pattern_mode(k, l, p);
      if (d2W_clifford(m) != 0.0) exact = false;
      SecondVariations sv = second_variations(*f, mode_normal_field(m, f, kStabilityGrid));
      worst = std::max(worst, std::abs(sv.W) / sv.norm2);
    }
  }
  r.value = worst;
  r.tolerance = kC3NumericRel;
  r.passed = exact && worst < kC3NumericRel;
  r.detail = std::string("analytic exact zero: ") + (exact ? "yes" : "no") +
             ", max |W''|/|phi|^2 = " + fmt(worst);
}

void c4(CriterionResult& r, Shared&) {
  r.name = "analytic vs numeric second variations at b = 1, k,l <= 3";
  auto t0 = Clock::now();
  auto f = homog(1.0);
  double worst_w = 0.0, worst_p = 0.0;
  for (int k = 0; k <= 3; ++k) {
    for (int l = 0; l <= 3; ++l) {
      if (k == 0 && l == 0) continue;
      for (ModePattern p : {ModePattern::SinPlus, ModePattern::CosPlus}) {
        FourierMode m = pattern_mode(k, l, p);
        SecondVariations sv = second_variations(*f, mode_normal_field(m, f, kStabilityGrid));
        double aw = d2W_clifford(m), ap = d2Pi1_clifford(m);
        worst_w = std::max(worst_w, std::abs(sv.W - aw) / std::max(std::abs(aw), sv.norm2));
        worst_p = std::max(worst_p,
                           std::abs(sv.pi1 - ap) / std::max(std::abs(ap), sv.norm2 / kPi2));
      }
    }
  }
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  r.value = worst_w;
  r.tolerance = kC4WRel;
  r.passed = worst_w <= kC4WRel && worst_p <= kC4Pi1Rel && secs < kC4Seconds;
  if (secs >= kC4Seconds) r.detail = "runtime limit exceeded; ";
  r.detail += "max rel err W " + fmt(worst_w) + ", Pi1 " + fmt(worst_p);
}

void c5(CriterionResult& r, Shared&) {
  r.name = "root identities of g";
  std::mt19937_64 rng(20240531);
  std::uniform_real_distribution<double> at(0.0, 10.0), cc(1.0, 4.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    double a = at(rng), c = cc(rng);
    GRoots g = g_roots(a, c);
    double c1 = c * c + 1.0;
    for (double l2 : {g.l2_first, g.l2_second}) {
      double scale = std::max({1.0, 2 * c1 * c1 * l2 * l2, (6 * c1 + 8 * a * c) * l2,
                               16 * a * c / c1});
      worst = std::max(worst, std::abs(g_polynomial(a, c, std::sqrt(l2))) / scale);
    }
  }
  double e1 = std::abs(g_roots(2.5, 2.0).l2_second - 1.0);
  double e2 = std::abs(g_roots(3.5, 1.0).l2_second - 4.0) / 4.0;
  r.value = worst;
  r.tolerance = kC5RootTol;
  r.passed = worst <= kC5RootTol && e1 <= kC5ExactTol && e2 <= kC5ExactTol;
  r.detail = "max scaled |g| " + fmt(worst) + ", boundary errors " + fmt(e1) + ", " + fmt(e2);
}

void c6(CriterionResult& r, Shared& sh) {
  r.name = "threshold collapse for b != 1";
  bool ok = true;
  std::ostringstream os;
  double worst = 0.0;
  for (double b0 : {1.02, 1.05, 1.1}) {
    for (double b : {b0, 1.0 / b0}) {
      ThresholdOptions o;
      o.path = ThresholdPath::Numeric;
      o.n = kStabilityGrid;
      o.threads = sh.threads;
      ThresholdResult t = alpha_threshold(b, o);
      int want_k = b > 1 ? 1 : 2, want_l = b > 1 ? 2 : 1;
      bool kernel_ok = !t.kernel.empty();
      for (const KernelEntry& e : t.kernel) {
        if (e.mode.k != want_k || e.mode.l != want_l) kernel_ok = false;
      }
      ok = ok && kernel_ok && t.alpha_b < 10 * kPi2;
      worst = std::max(worst, t.alpha_b / (10 * kPi2));
      os << "b=" << fmt(b) << " alpha/pi^2=" << fmt(t.alpha_b / kPi2) << " kernel=" << t.kernel.size()
         << (kernel_ok ? "" : "(wrong type)") << "; ";
    }
  }
  r.value = worst;
  r.tolerance = 1.0;
  r.passed = ok;
  r.detail = os.str();
}

void c7(CriterionResult& r, Shared&) {
  r.name = "third derivative of the penalized profile vanishes";
  NormalField v = phi1_field(kStabilityGrid);
  double h = kC7Step;
  std::vector<double> ts{-2 * h, -h, 0.0, h, 2 * h};
  auto prof = directional_profile(1.0, {10 * kPi2, 0.0}, v, ts);
  double d3 = (prof[4].second - 2 * prof[3].second + 2 * prof[1].second - prof[0].second) /
              (2 * h * h * h);
  double scale = std::pow(area_norm2(v), 1.5);
  r.value = std::abs(d3) / scale;
  r.tolerance = kC7Rel;
  r.passed = r.value <= kC7Rel;
  r.detail = "d3 = " + fmt(d3) + ", scale " + fmt(scale);
}

void c8(CriterionResult& r, Shared& sh) {
  r.name = "omega slopes match alpha_hat (b = 1.05, K = 6)";
  const EnergyTable& t = sh.omega();
  bool all_conv = true;
  for (const EnergyRow& row : t.rows) all_conv = all_conv && row.converged;
  double worst = 0.0;
  std::ostringstream os;
  auto checks = slope_checks(t);
  for (const SlopeCheck& c : checks) {
    worst = std::max(worst, std::isfinite(c.relative_error) ? c.relative_error : 1e300);
    os << "[" << fmt(c.a_left) << "," << fmt(c.a_right) << "] slope/pi^2=" << fmt(c.slope / kPi2)
       << " alpha/pi^2=" << fmt(c.alpha_mid / kPi2) << "; ";
  }
  r.value = worst;
  r.tolerance = kC8Rel;
  r.passed = all_conv && checks.size() == 3 && worst <= kC8Rel && sh.seconds < kC8Seconds;
  r.detail = std::string(all_conv ? "" : "unconverged rows; ") +
             (sh.seconds < kC8Seconds ? "" : "runtime limit exceeded; ") + os.str();
}

void c9(CriterionResult& r, Shared& sh) {
  r.name = "concavity of omega";
  ConcavityReport rep = concavity_check(sh.omega(), kC9Budget);
  r.value = rep.max_positive_second_difference;
  r.tolerance = kC9Budget;
  r.passed = rep.passed;
  std::ostringstream os;
  os << "second differences:";
  for (double d : rep.second_differences) os << ' ' << fmt(d);
  r.detail = os.str();
}

void c10(CriterionResult& r, Shared&) {
  r.name = "conformal projector";
  double flat = 0.0;
  for (Complex tau : {Complex(0.0, 1.0), Complex(0.3, 1.2), Complex(-0.45, 0.95),
                      Complex(0.1, 2.5)}) {
    Lattice L = make_lattice(2 * kPi, 2 * kPi * tau);
    TeichmullerPoint p = project_conformal_class(flat_metric(L, 32), L);
    TeichmullerPoint want = marked_chart(tau);
    flat = std::max({flat, std::abs(p.a - want.a), std::abs(p.b - want.b)});
  }
  double homo = 0.0;
  for (double b : {0.9, 1.0, 1.1}) {
    TeichmullerPoint p = project_immersion(TorusImmersion::homogeneous(b), 64);
    homo = std::max({homo, std::abs(p.a), std::abs(p.b - b)});
  }
  NormalField v = phi1_field(kStabilityGrid);
  double t = 1e-2;
  auto f = v.ref;
  double plus = project_immersion(*exp_normal(f, v, t), kStabilityGrid).a;
  double minus = project_immersion(*exp_normal(f, v, -t), kStabilityGrid).a;
  double coef = 0.5 * (plus + minus) / (t * t);
  double want = 0.5 * d2Pi1_clifford(pattern_mode(1, 2, ModePattern::SinPlus));
  double quad = std::abs(coef - want) / std::abs(want);
  r.value = flat;
  r.tolerance = kC10FlatTol;
  r.passed = flat <= kC10FlatTol && homo <= kC10HomogTol && quad <= kC10QuadRel;
  r.detail = "flat err " + fmt(flat) + ", homogeneous err " + fmt(homo) + ", quadratic coef " +
             fmt(coef) + " vs " + fmt(want);
}

void c11(CriterionResult& r, Shared& sh) {
  r.name = "descent past threshold at b = 1.05";
  ThresholdOptions o;
  o.path = ThresholdPath::Numeric;
  o.n = kStabilityGrid;
  o.threads = sh.threads;
  double ab = alpha_threshold(1.05, o).alpha_b;
  double w0 = willmore_energy(TorusImmersion::homogeneous(1.05), kMinimizerGrid);
  auto run = [&](double factor) {
    MinimizationProblem p = MinimizationProblem::penalized(1.05, factor * ab, kMinimizerK);
    p.n = kMinimizerGrid;
    p.threads = sh.threads;
    return minimize(p);
  };
  MinimizerResult above = run(1.02);
  MinimizerResult below = run(0.9);
  double drop = w0 - above.objective;
  double norm = below.coefficient_norm();
  r.value = drop;
  r.tolerance = kC11Descent;
  r.passed = drop > kC11Descent && norm < kC11ZeroNorm;
  r.detail = "W_alpha drop at 1.02 alpha_b: " + fmt(drop) + ", |coeffs| at 0.9 alpha_b: " +
             fmt(norm);
}

using Runner = void (*)(CriterionResult&, Shared&);
constexpr Runner kRunners[] = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11};

}  // namespace

int acceptance_count() { return static_cast<int>(std::size(kRunners)); }

std::vector<CriterionResult> run_acceptance(
    const VerifyOptions& opts, const std::function<void(const CriterionResult&)>& on_result) {
  Shared sh;
  sh.threads = opts.threads;
  std::vector<CriterionResult> out;
  for (int i = 0; i < acceptance_count(); ++i) {
    int id = i + 1;
    if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), id) == opts.only.end()) {
      continue;
    }
    CriterionResult r;
    r.id = id;
    auto t0 = Clock::now();
    try {
      kRunners[i](r, sh);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (on_result) on_result(r);
    out.push_back(r);
  }
  return out;
}

}  // namespace willmore
