#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "willmore/conformal.hpp"
#include "willmore/errors.hpp"
#include "willmore/immersion.hpp"
#include "willmore/stability.hpp"

using namespace willmore;

namespace {
const double kPi = std::acos(-1.0);

std::shared_ptr<const TorusImmersion> homog(double b) {
  return std::make_shared<const TorusImmersion>(TorusImmersion::homogeneous(b));
}

NormalField phi1(std::shared_ptr<const TorusImmersion> f, int n) {
  return mode_normal_field(pattern_mode(1, 2, ModePattern::SinPlus), f, n);
}

// Induced metric (domain coordinates) of f^1 pushed along Phi_1.
MetricGrid bumped_metric(double t, int n) {
  auto f = homog(1.0);
  return metric_from_geometry(fundamental_forms(*exp_normal(f, phi1(f, n), t), n));
}
}  // namespace

TEST_CASE("flat metrics reproduce their lattice class") {
  Lattice L = make_lattice(2 * kPi, 2 * kPi * Complex(0.1, 1.05));
  TeichmullerPoint p = project_conformal_class(flat_metric(L, 32), L);
  CHECK(std::abs(p.a - 0.1) < 1e-10);
  CHECK(std::abs(p.b - 1.05) < 1e-10);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 30; ++i) {
    Complex g1(u(rng), u(rng)), g2(u(rng), u(rng));
    if (std::abs(g1) < 0.2 || std::abs(std::imag(g2 / g1)) < 0.2) continue;
    Lattice M{g1, g2};
    TeichmullerPoint q = project_conformal_class(flat_metric(M, 16), M);
    TeichmullerPoint want = marked_modulus(M);
    CHECK(std::abs(q.a - want.a) < 1e-10);
    CHECK(std::abs(q.b - want.b) < 1e-10);
  }
}

TEST_CASE("homogeneous and equivariant tori are rectangular") {
  for (double b : {0.9, 1.0, 1.1}) {
    TeichmullerPoint p = project_immersion(TorusImmersion::homogeneous(b), 32);
    CHECK(std::abs(p.a) < 1e-6);
    CHECK(std::abs(p.b - b) < 1e-6);
  }
  TeichmullerPoint e = project_immersion(TorusImmersion::equivariant12(1.05), 32);
  CHECK(std::abs(e.a) < 1e-10);
  CHECK(std::abs(e.b - 1.05) < 1e-10);
}

TEST_CASE("quadratic response of Pi1 along the kernel mode") {
  auto f = homog(1.0);
  int n = 32;
  NormalField v = phi1(f, n);
  double want = 0.5 * d2Pi1_clifford(pattern_mode(1, 2, ModePattern::SinPlus));
  CHECK(want == doctest::Approx(1.2));
  // Least-squares fit Pi1 = c t^2 over t in [0.01, 0.08].
  double num = 0.0, den = 0.0;
  std::vector<std::pair<double, double>> samples;
  for (double t = 0.01; t <= 0.0801; t += 0.01) {
    double a = project_immersion(*exp_normal(f, v, t), n).a;
    samples.emplace_back(t, a);
    num += a * t * t;
    den += t * t * t * t;
  }
  double c = num / den;
  double worst = 0.0;
  for (auto [t, a] : samples) worst = std::max(worst, std::abs(a - c * t * t) / (c * t * t));
  CHECK(worst < 0.02);
  CHECK(std::abs(c - want) / want < 0.02);
  // t = 0.05: Pi1 ~ 1.2 t^2 <phi,phi>/pi^2 with <phi,phi> = pi^2.
  double a5 = project_immersion(*exp_normal(f, v, 0.05), n).a;
  CHECK(a5 == doctest::Approx(1.2 * 0.05 * 0.05).epsilon(0.02));
}

TEST_CASE("conformal invariance of the projection") {
  int n = 32;
  MetricGrid m = bumped_metric(0.08, n);
  Lattice L = homog(1.0)->domain();
  TeichmullerPoint p = project_conformal_class(m, L);
  CHECK(std::abs(p.a) > 1e-3);
  MetricGrid w = m;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double u = double(i) / n, v = double(j) / n;
      double lam = std::exp(0.4 * std::sin(2 * kPi * (u + v)) + 0.2 * std::cos(2 * kPi * 2 * v));
      std::size_t k = std::size_t(i) * n + j;
      w.E[k] *= lam;
      w.F[k] *= lam;
      w.G[k] *= lam;
    }
  }
  TeichmullerPoint q = project_conformal_class(w, L);
  CHECK(std::abs(q.a - p.a) < 1e-8);
  CHECK(std::abs(q.b - p.b) < 1e-8);
}

TEST_CASE("grid translation leaves the class unchanged") {
  int n = 32;
  MetricGrid m = bumped_metric(0.06, n);
  Lattice L = homog(1.0)->domain();
  TeichmullerPoint p = project_conformal_class(m, L);
  for (auto [di, dj] : {std::pair{3, 0}, std::pair{0, 5}, std::pair{7, 11}}) {
    MetricGrid s = m;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        std::size_t from = std::size_t((i + di) % n) * n + (j + dj) % n, to = std::size_t(i) * n + j;
        s.E[to] = m.E[from];
        s.F[to] = m.F[from];
        s.G[to] = m.G[from];
      }
    }
    TeichmullerPoint q = project_conformal_class(s, L);
    CHECK(std::abs(q.a - p.a) < 1e-8);
    CHECK(std::abs(q.b - p.b) < 1e-8);
  }
}

TEST_CASE("solver failure carries the residual") {
  int n = 16;
  std::vector<double> E(n * n), F(n * n, 0.0), G(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      E[i * n + j] = 1.0 + 0.5 * std::sin(2 * kPi * (i + 2 * j) / n);
      G[i * n + j] = 1.0 + 0.4 * std::cos(2 * kPi * (3 * i - j) / n);
    }
  }
  ConformalProjector bad(n, 1e-14, 1);
  try {
    bad.solve_uv(E.data(), F.data(), G.data());
    FAIL("expected a numerical failure");
  } catch (const NumericalFailure& e) {
    CHECK(e.residual() > 1e-14);
  }
  ConformalProjector good(n);
  ProjectionResult r = good.solve_uv(E.data(), F.data(), G.data());
  CHECK(r.residual <= 1e-12);
  CHECK(r.iterations <= 10 * n);
}

TEST_CASE("invalid metrics are rejected") {
  MetricGrid m = flat_metric(make_lattice(1.0, Complex(0, 1)), 16);
  m.G[5] = -1.0;
  CHECK_THROWS(m.validate());
}

TEST_CASE("directional derivatives of Pi") {
  auto f = homog(1.1);
  int n = 32;
  NormalField v = mode_normal_field(FourierMode{2, 1, 0.3, -0.2, 0.5, 0.1}, f, n);
  auto d = dPi_directional(f, v, 1e-3);
  CHECK(std::abs(d.first) < 1e-6);

  auto f1 = homog(1.0);
  NormalField c = field_from_function(f1, n, [](double, double) { return 1.0; });
  auto dc = dPi_directional(f1, c, 1e-3);
  CHECK(std::abs(dc.first) < 1e-6);
  // Radii move as (r cos t - s sin t, s cos t + r sin t), so db/dt = 1 + b^2.
  CHECK(dc.second == doctest::Approx(2.0).epsilon(1e-6));

  auto bent = exp_normal(f1, phi1(f1, n), 0.1);
  NormalField w = field_from_function(bent, n, [](double x, double y) {
    return std::sin(std::sqrt(2.0) * (x + 2 * y));
  });
  CHECK(dPi_directional(bent, w, 1e-3).first > 0.0);
}
