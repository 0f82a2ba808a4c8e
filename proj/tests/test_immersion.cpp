#include <cmath>
#include <memory>

#include "doctest.h"
#include "willmore/errors.hpp"
#include "willmore/fourier_mode.hpp"
#include "willmore/immersion.hpp"

using namespace willmore;

namespace {
const double kPi = std::acos(-1.0);
const double kPi2 = kPi * kPi;

std::shared_ptr<const TorusImmersion> homog(double b) {
  return std::make_shared<const TorusImmersion>(TorusImmersion::homogeneous(b));
}

// Domain point of grid index (i, j).
Complex grid_z(const Lattice& L, int n, int i, int j) {
  return (double(i) / n) * L.gen1 + (double(j) / n) * L.gen2;
}

double max_abs_unit_residual(const Field4& p) {
  double worst = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) worst = std::max(worst, std::abs(p.at(k).norm() - 1.0));
  return worst;
}
}  // namespace

TEST_CASE("product radii from an independent solve") {
  for (double b : {0.8, 1.0, 1.2}) {
    double r = std::cos(std::atan(b)), s = std::sin(std::atan(b));
    ProductRadii pr = product_radii(b);
    CHECK(pr.r == doctest::Approx(r).epsilon(1e-14));
    CHECK(pr.s == doctest::Approx(s).epsilon(1e-14));
  }
  ProductRadii c = product_radii(1.2);
  CHECK(c.r == doctest::Approx(0.640184).epsilon(1e-6));
  CHECK(c.s == doctest::Approx(0.768221).epsilon(1e-6));
  CHECK_THROWS_AS(product_radii(0.0), DomainError);
  CHECK_THROWS_AS(TorusImmersion::homogeneous(-1.0), DomainError);
  CHECK_THROWS_AS(TorusImmersion::equivariant12(0.0), DomainError);
}

TEST_CASE("homogeneous torus samples lie on the sphere with the stated lattice") {
  TorusImmersion f = TorusImmersion::homogeneous(1.2);
  ProductRadii pr = product_radii(1.2);
  CHECK(std::abs(f.domain().gen1 - Complex(2 * kPi * pr.r, 0)) < 1e-14);
  CHECK(std::abs(f.domain().gen2 - Complex(0, 2 * kPi * pr.s)) < 1e-14);
  CHECK(max_abs_unit_residual(f.sample(32).p) < 1e-12);
  // Doubly periodic.
  Vec4 p0 = f.evaluate(0.3, 0.7);
  CHECK((f.evaluate(0.3 + f.domain().gen1.real(), 0.7) - p0).norm() < 1e-12);
  CHECK((f.evaluate(0.3, 0.7 + f.domain().gen2.imag()) - p0).norm() < 1e-12);
}

TEST_CASE("Clifford torus is minimal with an orthonormal chart") {
  GeometryFields g = fundamental_forms(TorusImmersion::homogeneous(1.0), 32);
  for (std::size_t k = 0; k < g.H.size(); ++k) {
    CHECK(std::abs(g.H[k]) < 1e-10);
    CHECK(g.E[k] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.G[k] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(g.F[k]) < 1e-12);
    CHECK(std::abs(g.K[k]) < 1e-10);
  }
}

TEST_CASE("mean curvature of f^b against a finite-difference oracle") {
  for (double b : {0.8, 1.1, 1.25}) {
    TorusImmersion f = TorusImmersion::homogeneous(b);
    ProductRadii pr = product_radii(b);
    double r = pr.r, s = pr.s;
    GeometryFields g = fundamental_forms(f, 16);
    double mean = 0.0, var = 0.0;
    for (double h : g.H) mean += h / g.H.size();
    for (double h : g.H) var += (h - mean) * (h - mean) / g.H.size();
    CHECK(var < 1e-10);
    CHECK(std::abs(std::abs(mean) - std::abs(s * s - r * r) / (2 * r * s)) < 1e-9);
    // Independent oracle at one point: second differences of the analytic
    // map projected on the normal (-s e^{ix/r}, r e^{iy/s}).
    double x = 0.37, y = 1.21, h = 1e-3;
    Vec4 n(-s * std::cos(x / r), -s * std::sin(x / r), r * std::cos(y / s), r * std::sin(y / s));
    Vec4 pxx = (f.evaluate(x + h, y) - 2 * f.evaluate(x, y) + f.evaluate(x - h, y)) / (h * h);
    Vec4 pyy = (f.evaluate(x, y + h) - 2 * f.evaluate(x, y) + f.evaluate(x, y - h)) / (h * h);
    double H_fd = 0.5 * (pxx.dot(n) + pyy.dot(n));
    CHECK(std::abs(std::abs(H_fd) - std::abs(mean)) < 1e-6);
  }
}

TEST_CASE("unit normal follows the fixed convention") {
  double b = 1.1;
  auto f = homog(b);
  ProductRadii pr = product_radii(b);
  int n = 16;
  Field4 nn = unit_normals(*f, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Complex z = grid_z(f->domain(), n, i, j);
      double x = z.real(), y = z.imag();
      Vec4 want(-pr.s * std::cos(x / pr.r), -pr.s * std::sin(x / pr.r), pr.r * std::cos(y / pr.s),
                pr.r * std::sin(y / pr.s));
      CHECK((nn.at(std::size_t(i) * n + j) - want).norm() < 1e-12);
    }
  }
}

TEST_CASE("normal-field consistency on analytic and perturbed surfaces") {
  auto base = homog(1.05);
  NormalField v = mode_normal_field(pattern_mode(1, 2, ModePattern::SinPlus), base, 32);
  auto pert = exp_normal(base, v, 0.05);
  auto eq = std::make_shared<const TorusImmersion>(TorusImmersion::equivariant12(1.05));
  for (auto f : {base, eq, pert}) {
    SurfaceSamples s = f->sample(32);
    GeometryFields g = fundamental_forms(s);
    for (std::size_t k = 0; k < s.p.size(); ++k) {
      Vec4 nn = g.unit_normal.at(k);
      CHECK(std::abs(nn.norm() - 1.0) < 1e-10);
      CHECK(std::abs(nn.dot(s.p.at(k))) < 1e-10);
      CHECK(std::abs(nn.dot(s.pu.at(k))) < 1e-10 * (1 + s.pu.at(k).norm()));
      CHECK(std::abs(nn.dot(s.pv.at(k))) < 1e-10 * (1 + s.pv.at(k).norm()));
    }
  }
}

TEST_CASE("Willmore energy values") {
  CHECK(std::abs(willmore_energy(TorusImmersion::homogeneous(1.0), 128) - 2 * kPi2) < 1e-8);
  double w12 = willmore_energy(TorusImmersion::homogeneous(1.2), 128);
  ProductRadii pr = product_radii(1.2);
  CHECK(w12 == doctest::Approx(20.0682).epsilon(1e-5));
  CHECK(std::abs(w12 - kPi2 / (pr.r * pr.s)) < 1e-8);
  CHECK(std::abs(willmore_energy(TorusImmersion::equivariant12(1.2), 128) - w12) < 1e-8);
}

TEST_CASE("energy formula, parametrization invariance and quadrature convergence") {
  for (double b : {0.8, 0.9, 1.0, 1.05, 1.1, 1.2, 1.25}) {
    double rs = b / (1 + b * b);
    CHECK(std::abs(willmore_energy(TorusImmersion::homogeneous(b), 64) - kPi2 / rs) < 1e-8);
  }
  for (double b : {1.0, 1.05, 1.1, 1.2}) {
    CHECK(std::abs(willmore_energy(TorusImmersion::homogeneous(b), 64) -
                   willmore_energy(TorusImmersion::equivariant12(b), 64)) < 1e-8);
  }
  double prev = 1e300;
  for (int n : {32, 64, 128}) {
    double err = std::abs(willmore_energy(TorusImmersion::homogeneous(1.0), n) - 2 * kPi2);
    CHECK(err <= std::max(prev, 1e-12));
    prev = err;
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("equivariant torus at b = 1 has the Clifford image") {
  TorusImmersion f = TorusImmersion::equivariant12(1.0);
  SurfaceSamples s = f.sample(64);
  double r = 1 / std::sqrt(2.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < s.p.size(); ++k) {
    Vec4 p = s.p.at(k);
    // Distance to the product of circles |z1| = |z2| = r.
    double d1 = std::hypot(p[0], p[1]) - r, d2 = std::hypot(p[2], p[3]) - r;
    worst = std::max(worst, std::hypot(d1, d2));
  }
  CHECK(worst < 1e-10);
  CHECK(max_abs_unit_residual(s.p) < 1e-12);
}

TEST_CASE("duplicated columns give a degenerate immersion") {
  TorusImmersion f = TorusImmersion::homogeneous(1.0);
  int n = 16;
  Field4 p = f.sample(n).p;
  for (int i = 0; i < n; ++i) {
    for (int j = 1; j < n; ++j) {
      for (int c = 0; c < 4; ++c) p.c[c][std::size_t(i) * n + j] = p.c[c][std::size_t(i) * n];
    }
  }
  TorusImmersion g = TorusImmersion::grid_sampled(f.domain(), n, p);
  CHECK_THROWS_AS(fundamental_forms(g, n), DegenerateImmersion);
  CHECK_THROWS_AS(willmore_energy(g, n), DegenerateImmersion);
}

TEST_CASE("grid-sampled copy reproduces the analytic geometry") {
  TorusImmersion f = TorusImmersion::equivariant12(1.1);
  TorusImmersion g = TorusImmersion::grid_sampled(f.domain(), 64, f.sample(64).p);
  CHECK(willmore_energy(g, 64) == doctest::Approx(willmore_energy(f, 64)).epsilon(1e-11));
  CHECK_THROWS_AS(g.sample(32), DomainError);
  CHECK_THROWS_AS(TorusImmersion::grid_sampled(f.domain(), 15, Field4{}), DomainError);
}

TEST_CASE("exp_normal basics") {
  auto f = homog(1.0);
  int n = 32;
  NormalField zero = field_from_function(f, n, [](double, double) { return 0.3; });
  auto same = exp_normal(f, zero, 0.0);
  CHECK(same.get() == f.get());

  // Constant offset: another product torus, |z1| and |z2| constant.
  auto g = exp_normal(f, zero, 0.4);
  Field4 p = g->sample(n).p;
  double z1 = std::hypot(p.c[0][0], p.c[1][0]);
  for (std::size_t k = 0; k < p.size(); ++k) {
    CHECK(std::abs(std::hypot(p.c[0][k], p.c[1][k]) - z1) < 1e-12);
    CHECK(std::abs(p.at(k).norm() - 1.0) < 1e-12);
  }
  CHECK(std::abs(z1 - 1 / std::sqrt(2.0)) > 1e-3);

  NormalField v = field_from_function(f, n, [](double x, double y) {
    return std::sin(std::sqrt(2.0) * (x + 2 * y));
  });
  CHECK(max_abs_unit_residual(exp_normal(f, v, 0.05)->sample(n).p) < 1e-12);

  NormalField other = field_from_function(homog(1.0), n, [](double, double) { return 1.0; });
  CHECK_THROWS_AS(exp_normal(f, other, 0.1), DomainError);
}

TEST_CASE("exp_normal first-order consistency") {
  auto f = homog(1.05);
  int n = 16;
  NormalField v = mode_normal_field(pattern_mode(2, 1, ModePattern::CosPlus), f, n);
  Field4 p = f->sample(n).p, nn = unit_normals(*f, n);
  auto err = [&](double t, bool central) {
    Field4 a = exp_normal(f, v, t)->sample(n).p;
    Field4 b = central ? exp_normal(f, v, -t)->sample(n).p : p;
    double worst = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      Vec4 q = (a.at(k) - b.at(k)) / (central ? 2 * t : t);
      worst = std::max(worst, (q - v.phi[k] * nn.at(k)).norm());
    }
    return worst;
  };
  // One-sided quotient: O(t). Central quotient: O(t^2).
  CHECK(err(1e-2, false) / err(1e-3, false) == doctest::Approx(10).epsilon(0.05));
  double c2 = err(1e-2, true), c3 = err(1e-3, true);
  CHECK(c2 / c3 == doctest::Approx(100).epsilon(0.05));
  CHECK(c3 < 1e-6);
}

TEST_CASE("mode normal fields") {
  auto f1 = homog(1.0);
  int n = 16;
  NormalField v = mode_normal_field(pattern_mode(1, 2, ModePattern::SinPlus), f1, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Complex z = grid_z(f1->domain(), n, i, j);
      CHECK(std::abs(v.phi[std::size_t(i) * n + j] -
                     std::sin(std::sqrt(2.0) * (z.real() + 2 * z.imag()))) < 1e-12);
    }
  }
  NormalField zero = mode_normal_field(FourierMode{1, 2, 0, 0, 0, 0}, f1, n);
  for (double x : zero.phi) CHECK(x == 0.0);

  auto fb = homog(1.1);
  ProductRadii pr = product_radii(1.1);
  NormalField w = mode_normal_field(pattern_mode(1, 2, ModePattern::SinPlus), fb, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Complex z = grid_z(fb->domain(), n, i, j);
      CHECK(std::abs(w.phi[std::size_t(i) * n + j] -
                     std::sin(z.real() / pr.r + 2 * z.imag() / pr.s)) < 1e-12);
    }
  }
  auto grid = std::make_shared<const TorusImmersion>(
      TorusImmersion::grid_sampled(fb->domain(), n, fb->sample(n).p));
  CHECK_THROWS_AS(mode_normal_field(pattern_mode(1, 2, ModePattern::SinPlus), grid, n),
                  UnsupportedKind);
}
