#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "willmore/errors.hpp"
#include "willmore/stability.hpp"

using namespace willmore;

namespace {
const double kPi = std::acos(-1.0);
const double kPi2 = kPi * kPi;

std::shared_ptr<const TorusImmersion> homog(double b) {
  return std::make_shared<const TorusImmersion>(TorusImmersion::homogeneous(b));
}

// Mode value in the unit-frequency chart, differentiated by central
// differences (an oracle independent of the coefficient algebra).
double laplace_fd(const FourierMode& m, double x, double y, double h) {
  return (m.value(x + h, y) + m.value(x - h, y) + m.value(x, y + h) + m.value(x, y - h) -
          4 * m.value(x, y)) /
         (h * h);
}
double mixed_fd(const FourierMode& m, double x, double y, double h) {
  return (m.value(x + h, y + h) - m.value(x + h, y - h) - m.value(x - h, y + h) +
          m.value(x - h, y - h)) /
         (4 * h * h);
}

FourierMode random_mode(std::mt19937_64& rng, int kmax) {
  std::uniform_int_distribution<int> ki(0, kmax);
  std::uniform_real_distribution<double> c(-1, 1);
  FourierMode m{0, 0, 0, 0, 0, 0};
  while (m.k == 0 && m.l == 0) {
    m.k = ki(rng);
    m.l = ki(rng);
  }
  m.c_sc = c(rng);
  m.c_cs = c(rng);
  m.c_cc = c(rng);
  m.c_ss = c(rng);
  return m;
}
}  // namespace

TEST_CASE("second variation of W at the Clifford torus") {
  CHECK(d2W_clifford(FourierMode{1, 1, 0.3, -0.7, 0.2, 1.1}) == 0.0);
  CHECK(d2W_clifford(FourierMode{0, 1, 1, 0, 0.5, 0}) == 0.0);
  CHECK(d2W_clifford(FourierMode{1, 0, 0, 1, 0.5, 0}) == 0.0);
  FourierMode phi1 = pattern_mode(1, 2, ModePattern::SinPlus);
  CHECK(mode_norm2(phi1, 1.0) == doctest::Approx(kPi2));
  CHECK(d2W_clifford(phi1) == doctest::Approx(24 * kPi2));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    FourierMode m = random_mode(rng, 6);
    int n = m.k * m.k + m.l * m.l;
    double factor = 2.0 * n * n - 6.0 * n + 4.0;
    CHECK(d2W_clifford(m) == doctest::Approx(factor * mode_norm2(m, 1.0)));
    if (n >= 4) CHECK(d2W_clifford(m) > 0.0);
  }
}

TEST_CASE("second variation of Pi1 at the Clifford torus") {
  CHECK(d2Pi1_clifford(FourierMode{1, 2, 1, 1, 0, 0}) == doctest::Approx(12.0 / 5.0));
  CHECK(d2Pi1_clifford(FourierMode{1, 2, 1, -1, 0, 0}) == doctest::Approx(-12.0 / 5.0));
  CHECK(d2Pi1_clifford(FourierMode{0, 1, 1, 0, 1, 0}) == 0.0);
  CHECK(d2Pi1_clifford(FourierMode{3, 0, 1, 0, 1, 0}) == 0.0);
  // Bound with equality exactly in the equality-case patterns.
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    FourierMode m = random_mode(rng, 5);
    if (m.boundary()) continue;
    int n = m.k * m.k + m.l * m.l;
    double bound = (2.0 * m.k * m.l - 4.0 * m.k * m.l / n) / kPi2 * mode_norm2(m, 1.0);
    CHECK(d2Pi1_clifford(m) <= bound + 1e-12 * std::abs(bound));
    FourierMode eq{m.k, m.l, m.c_sc, m.c_sc, m.c_cc, -m.c_cc};
    double beq = (2.0 * m.k * m.l - 4.0 * m.k * m.l / n) / kPi2 * mode_norm2(eq, 1.0);
    CHECK(d2Pi1_clifford(eq) == doctest::Approx(beq));
  }
}

TEST_CASE("eta correction solves its Poisson equation") {
  FourierMode ss{1, 1, 0, 0, 0, 1};
  FourierMode e = eta_correction(ss);
  CHECK(e.c_cc == doctest::Approx(1.0));
  CHECK(e.c_sc == 0.0);
  CHECK(e.c_cs == 0.0);
  CHECK(e.c_ss == 0.0);
  FourierMode sc{1, 2, 1, 0, 0, 0};
  FourierMode e2 = eta_correction(sc);
  CHECK(e2.c_cs == doctest::Approx(-4.0 / 5.0));
  CHECK(e2.c_sc == 0.0);
  CHECK(eta_correction(FourierMode{2, 3, 0, 0, 0, 0}).is_zero());
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0, 2 * kPi);
  for (int i = 0; i < 50; ++i) {
    FourierMode m = random_mode(rng, 4);
    if (m.boundary()) continue;
    FourierMode eta = eta_correction(m);
    for (int j = 0; j < 5; ++j) {
      double x = u(rng), y = u(rng), h = 1e-3;
      double res = laplace_fd(eta, x, y, h) + 2 * mixed_fd(m, x, y, h);
      CHECK(std::abs(res) < 1e-4 * (1 + m.k * m.l));
    }
  }
}

TEST_CASE("D2 Pi2 at homogeneous tori") {
  // At b = 1 the (1,1) mode has c_r = 0; the value reduces to the (k,l)-symmetric part.
  FourierMode a = pattern_mode(1, 2, ModePattern::SinPlus);
  FourierMode b = pattern_mode(2, 1, ModePattern::SinPlus);
  double va = d2Pi2_homogeneous(a, 1.0), vb = d2Pi2_homogeneous(b, 1.0);
  CHECK(std::isfinite(va));
  CHECK(va == doctest::Approx(-vb).epsilon(1e-12).scale(1));
  CHECK(d2Pi2_homogeneous(pattern_mode(1, 1, ModePattern::SinPlus), 1.0) == 0.0);
  CHECK(d2Pi2_homogeneous(a, 1.05) > d2Pi2_homogeneous(b, 1.05));
  // Numeric cross-check of the closed form.
  for (double bb : {1.0, 1.05}) {
    auto f = homog(bb);
    for (FourierMode m : {a, b, pattern_mode(2, 2, ModePattern::CosPlus)}) {
      SecondVariations sv = second_variations(*f, mode_normal_field(m, f, 64));
      CHECK(sv.pi2 == doctest::Approx(d2Pi2_homogeneous(m, bb)).epsilon(1e-4).scale(1e-3));
    }
  }
}

TEST_CASE("numeric quadratic forms at the Clifford torus") {
  auto f = homog(1.0);
  NormalField v = mode_normal_field(pattern_mode(1, 2, ModePattern::SinPlus), f, 64);
  double w = quadratic_form_numeric(Functional::willmore(), f, v);
  CHECK(std::abs(w - 24 * kPi2) / (24 * kPi2) < 1e-3);
  NormalField m11 = mode_normal_field(pattern_mode(1, 1, ModePattern::SinPlus), f, 64);
  CHECK(std::abs(quadratic_form_numeric(Functional::pi1(), f, m11)) < 1e-5);
  double pen = quadratic_form_numeric(Functional::penalized({10 * kPi2, 0.0}), f, v);
  CHECK(std::abs(pen) < 1e-4 * kPi2);
}

TEST_CASE("g polynomial and its roots") {
  CHECK(std::abs(g_polynomial(2.5, 2.0, 1.0)) < 1e-12);
  CHECK(std::abs(g_polynomial(3.5, 1.0, 2.0)) < 1e-12);
  for (double at : {0.0, 1.3, 4.0}) {
    for (double c : {1.0, 2.5}) {
      CHECK(g_polynomial(at, c, 0.0) == doctest::Approx(4 + 16 * at * c / (c * c + 1)));
    }
  }
  GRoots r1 = g_roots(2.5, 2.0);
  CHECK(r1.l2_first == doctest::Approx(0.4));
  CHECK(r1.l2_second == doctest::Approx(1.0));
  GRoots r2 = g_roots(3.5, 1.0);
  CHECK(r2.l2_first == doctest::Approx(1.0));
  CHECK(r2.l2_second == doctest::Approx(4.0));
  GRoots r3 = g_roots(0.0, 1.0);
  CHECK(r3.l2_first == doctest::Approx(1.0));
  CHECK(r3.l2_second == doctest::Approx(0.5));
  GRoots neg = g_roots(-2.0, 1.0);
  CHECK_FALSE(neg.second_real);
  CHECK_THROWS_AS(g_roots(1.0, 0.5), DomainError);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ua(0, 5), uc(1, 4);
  for (int i = 0; i < 100; ++i) {
    double at = ua(rng), c = uc(rng);
    GRoots g = g_roots(at, c);
    for (double l2 : {g.l2_first, g.l2_second}) {
      double scale = std::max(1.0, 2 * std::pow(c * c + 1, 2) * l2 * l2);
      CHECK(std::abs(g_polynomial(at, c, std::sqrt(l2))) / scale < 1e-12);
    }
  }
}

TEST_CASE("critical alpha of the Clifford modes") {
  CHECK(clifford_critical_alpha(1, 2) == doctest::Approx(10 * kPi2));
  CHECK(clifford_critical_alpha(2, 1) == doctest::Approx(10 * kPi2));
  for (int k = 1; k <= 6; ++k) {
    for (int l = 1; l <= 6; ++l) {
      if (is_invariance_mode(k, l)) continue;
      CHECK(clifford_critical_alpha(k, l) >= 10 * kPi2 * (1 - 1e-14));
      // At the critical alpha the equality-case margin vanishes.
      FourierMode m = pattern_mode(k, l, ModePattern::SinPlus);
      double q = d2W_clifford(m) - clifford_critical_alpha(k, l) * d2Pi1_clifford(m);
      CHECK(std::abs(q) < 1e-9 * d2W_clifford(m));
    }
  }
}

TEST_CASE("threshold at the Clifford torus") {
  ThresholdResult t = alpha_threshold(1.0, 8, 1e-6);
  CHECK(t.analytic);
  CHECK(std::abs(t.alpha_b - 10 * kPi2) < 1e-9);
  CHECK(t.beta_b == 0.0);
  REQUIRE(t.kernel.size() == 4);
  int found = 0;
  for (const KernelEntry& e : t.kernel) {
    bool kl = (e.mode.k == 1 && e.mode.l == 2) || (e.mode.k == 2 && e.mode.l == 1);
    bool pat = e.pattern == ModePattern::SinPlus || e.pattern == ModePattern::CosPlus;
    found += kl && pat;
  }
  CHECK(found == 4);
  for (const MarginRow& r : t.margins) {
    bool kernel = std::abs(r.margin) <= 10 * t.tol;
    if (!kernel && !r.invariance) CHECK(r.margin > 0.0);
  }
}

TEST_CASE("numeric threshold away from the Clifford torus") {
  ThresholdOptions o;
  o.path = ThresholdPath::Numeric;
  o.n = 64;
  ThresholdResult up = alpha_threshold(1.05, o);
  ThresholdResult down = alpha_threshold(0.95, o);
  CHECK(up.alpha_b < 10 * kPi2);
  CHECK(down.alpha_b < 10 * kPi2);
  REQUIRE_FALSE(up.kernel.empty());
  REQUIRE_FALSE(down.kernel.empty());
  for (const KernelEntry& e : up.kernel) {
    CHECK(e.mode.k == 1);
    CHECK(e.mode.l == 2);
  }
  for (const KernelEntry& e : down.kernel) {
    CHECK(e.mode.k == 2);
    CHECK(e.mode.l == 1);
  }
  // beta^b matches the derivative of the homogeneous energy, 1 - 1/b^2 in pi^2 units.
  CHECK(up.beta_b / kPi2 == doctest::Approx(1 - 1 / (1.05 * 1.05)).epsilon(1e-4));
  for (const MarginRow& r : up.margins) {
    if (!r.invariance && std::abs(r.margin) > 10 * up.tol) CHECK(r.margin > 0.0);
  }
  // Numeric path at b = 1 agrees with the closed form.
  ThresholdResult one = alpha_threshold(1.0, o);
  CHECK(std::abs(one.alpha_b - 10 * kPi2) / (10 * kPi2) < 1e-6);
}

TEST_CASE("reflection symmetry of the threshold") {
  ThresholdOptions o;
  o.path = ThresholdPath::Numeric;
  o.n = 64;
  o.K = 4;
  for (double b : {1.02, 1.1}) {
    double ab = alpha_threshold(b, o).alpha_b;
    double ainv = alpha_threshold(1 / b, o).alpha_b;
    CHECK(ainv == doctest::Approx(b * b * ab).epsilon(1e-7));
    CHECK(ab <= 10 * kPi2);
  }
}

TEST_CASE("threshold preconditions") {
  CHECK_THROWS_AS(alpha_threshold(0.5, 8, 1e-6), DomainError);
  CHECK_THROWS_AS(alpha_threshold(1.3, 8, 1e-6), DomainError);
  CHECK_THROWS_AS(alpha_threshold(1.0, 3, 1e-6), DomainError);
  ThresholdOptions o;
  o.path = ThresholdPath::Analytic;
  CHECK_THROWS_AS(alpha_threshold(1.05, o), DomainError);
}

TEST_CASE("margin table with a bad bracket reports the margins") {
  ModeScan scan = scan_modes(1.0, 4, 32, 1);
  // A beta far from the multiplier makes some margin negative already at alpha = 0.
  ModeScan shifted = scan;
  shifted.beta = 50.0;
  try {
    threshold_from_scan(shifted, 1e-6);
    FAIL("expected a bracket failure");
  } catch (const BracketFailure& e) {
    CHECK_FALSE(e.margins().empty());
  }
}

TEST_CASE("mode transfer") {
  FourierMode m = pattern_mode(1, 2, ModePattern::SinPlus);
  ChartFunction id = mode_transfer(m, 1.0);
  ChartFunction tb = mode_transfer(m, 1.1);
  ChartFunction t21 = mode_transfer(pattern_mode(2, 1, ModePattern::SinPlus), 1.1);
  ProductRadii pr = product_radii(1.1);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 50; ++i) {
    double x = u(rng), y = u(rng);
    CHECK(id(x, y) == doctest::Approx(std::sin(std::sqrt(2.0) * (x + 2 * y))));
    CHECK(tb(x, y) == doctest::Approx(std::sin(x / pr.r + 2 * y / pr.s)));
    CHECK(t21(x, y) == doctest::Approx(std::sin(2 * x / pr.r + y / pr.s)));
  }
}

TEST_CASE("phase combination") {
  PhaseShift a = combine_phases(1, 0);
  CHECK(a.d1 == doctest::Approx(1));
  CHECK(a.d2 == doctest::Approx(0));
  PhaseShift b = combine_phases(0, 1);
  CHECK(b.d1 == doctest::Approx(1));
  CHECK(b.d2 == doctest::Approx(kPi / 2));
  PhaseShift c = combine_phases(3, 4);
  CHECK(c.d1 == doctest::Approx(5));
  CHECK(c.d2 == doctest::Approx(std::atan2(4, 3)));
  CHECK_THROWS_AS(combine_phases(0, 0), DomainError);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 20; ++i) {
    double c1 = u(rng), c2 = u(rng);
    PhaseShift p = combine_phases(c1, c2);
    for (int j = 0; j < 64; ++j) {
      double th = 2 * kPi * j / 64;
      CHECK(std::abs(c1 * std::sin(th) + c2 * std::cos(th) - p.d1 * std::sin(th + p.d2)) < 1e-12);
    }
    // c1 Phi + c2 Phi~ is a translate of Phi for the kernel pair sin/cos(x + 2y).
    double x = u(rng), y = u(rng);
    double lhs = c1 * std::sin(x + 2 * y) + c2 * std::cos(x + 2 * y);
    CHECK(std::abs(lhs - p.d1 * std::sin((x + p.d2) + 2 * y)) < 1e-12);
  }
}

TEST_CASE("equivariant kernel profile") {
  KernelProfile p = equivariant_kernel_profile(1.1);
  CHECK(p.frequency == doctest::Approx(1.1 + 4 / 1.1));
  CHECK(p.frequency == doctest::Approx(4.7364).epsilon(1e-4));
  CHECK(p(0.3) == doctest::Approx(std::sin(p.frequency * 0.3)));
  CHECK_THROWS_AS(equivariant_kernel_profile(1.0), DomainError);
  KernelProfile mirror = equivariant_kernel_profile(1 / 1.1);
  CHECK(mirror.frequency == doctest::Approx(p.frequency));
  KernelProfile four = equivariant_kernel_profile(4.0);
  CHECK(four.frequency == doctest::Approx(5.0));
  CHECK(four(0.7 + 2 * kPi) == doctest::Approx(four(0.7)));
  // Near b = 1 the frequency tends to 5.
  CHECK(equivariant_kernel_profile(1.0 + 1e-9).frequency == doctest::Approx(5.0));
}
