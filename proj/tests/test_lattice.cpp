#include <cmath>
#include <random>

#include "doctest.h"
#include "willmore/errors.hpp"
#include "willmore/lattice.hpp"

using namespace willmore;

namespace {
const double kPi = std::acos(-1.0);
const double kSqrt2Pi = std::sqrt(2.0) * kPi;

void check_point(TeichmullerPoint p, double a, double b, double tol = 1e-12) {
  CHECK(std::abs(p.a - a) <= tol);
  CHECK(std::abs(p.b - b) <= tol);
}
}  // namespace

TEST_CASE("modulus of the square lattice is (0, 1)") {
  check_point(modulus_from_lattice(make_lattice(kSqrt2Pi, Complex(0, kSqrt2Pi))), 0.0, 1.0);
}

TEST_CASE("shear by a lattice translation is removed") {
  check_point(modulus_from_lattice(make_lattice(1.0, Complex(3, 1))), 0.0, 1.0);
}

TEST_CASE("reduced generators are returned unchanged") {
  double s = 2 * kPi * 0.64;
  check_point(modulus_from_lattice(make_lattice(s, s * Complex(0.03, 1.05))), 0.03, 1.05);
}

TEST_CASE("collinear generators are rejected") {
  CHECK_THROWS_AS(make_lattice(1.0, 2.0), InvalidLattice);
  CHECK_THROWS_AS(modulus_from_lattice(Lattice{Complex(1, 1), Complex(-2, -2)}), InvalidLattice);
  CHECK_THROWS_AS(make_lattice(0.0, Complex(0, 1)), InvalidLattice);
}

TEST_CASE("lattice_for_class examples") {
  Lattice sq = lattice_for_class({0.0, 1.0}, kSqrt2Pi);
  CHECK(sq.gen1 == Complex(kSqrt2Pi, 0));
  CHECK(std::abs(sq.gen2 - Complex(0, kSqrt2Pi)) < 1e-15);
  Lattice sh = lattice_for_class({0.1, 1.05}, 2 * kPi);
  CHECK(std::abs(sh.gen2 - 2 * kPi * Complex(0.1, 1.05)) < 1e-14);
  Lattice rect = lattice_for_class({0.0, 1.2}, 1.0);
  CHECK(rect.gen1 == Complex(1, 0));
  CHECK(std::abs(rect.gen2 - Complex(0, 1.2)) < 1e-15);
  CHECK_THROWS_AS(lattice_for_class({0.0, -1.0}, 1.0), DomainError);
  CHECK_THROWS_AS(lattice_for_class({0.0, 1.0}, 0.0), DomainError);
}

TEST_CASE("round trip on the fundamental domain") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(0.0, 0.3), ub(0.8, 1.25), us(0.01, 100.0);
  int tested = 0;
  for (int i = 0; i < 500; ++i) {
    TeichmullerPoint p{ua(rng), ub(rng)};
    double s = us(rng);
    Lattice L = lattice_for_class(p, s);
    // The marked chart round-trips everywhere in the desk range.
    TeichmullerPoint m = marked_modulus(L);
    CHECK(std::abs(m.a - p.a) < 1e-12);
    CHECK(std::abs(m.b - p.b) < 1e-12);
    if (p.a * p.a + p.b * p.b < 1.0) continue;
    TeichmullerPoint q = modulus_from_lattice(L);
    CHECK(std::abs(q.a - p.a) < 1e-12);
    CHECK(std::abs(q.b - p.b) < 1e-12);
    ++tested;
  }
  CHECK(tested > 200);
}

TEST_CASE("modular, swap and scale invariance") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> shift(-5, 5);
  for (int i = 0; i < 200; ++i) {
    Complex g1(u(rng), u(rng)), g2(u(rng), u(rng));
    if (std::abs(std::imag(g2 / g1)) < 0.05) continue;
    TeichmullerPoint p = modulus_from_lattice(Lattice{g1, g2});
    CHECK(p.b > 0);
    CHECK(p.a >= 0);
    CHECK(p.a <= 0.5 + 1e-12);
    CHECK(p.a * p.a + p.b * p.b >= 1.0 - 1e-12);
    auto same = [&](const Lattice& L) {
      TeichmullerPoint q = modulus_from_lattice(L);
      CHECK(std::abs(q.a - p.a) < 1e-12);
      CHECK(std::abs(q.b - p.b) < 1e-12);
    };
    same({g1, g2 + static_cast<double>(shift(rng)) * g1});
    same({g2, g1});
    same({-g1, g2});
    same({g1, -g2});
    Complex w(u(rng), u(rng));
    if (std::abs(w) > 0.1) same({w * g1, w * g2});
  }
}

TEST_CASE("boundary representatives are deterministic") {
  // tau and its mirror image on the unit circle reduce to the same point.
  double t = 0.3;
  Complex tau(t, std::sqrt(1 - t * t));
  TeichmullerPoint a = reduce_modulus(tau);
  TeichmullerPoint b = reduce_modulus(Complex(-t, tau.imag()));
  CHECK(a.a == doctest::Approx(b.a));
  CHECK(a.b == doctest::Approx(b.b));
  TeichmullerPoint c = reduce_modulus(Complex(-0.5, std::sqrt(3.0) / 2));
  CHECK(c.a == doctest::Approx(0.5));
  CHECK(c.b == doctest::Approx(std::sqrt(3.0) / 2));
}

TEST_CASE("marked chart keeps the orientation and the sign of a") {
  TeichmullerPoint p = marked_chart(Complex(-0.2, 0.9));
  CHECK(p.a == doctest::Approx(-0.2));
  CHECK(p.b == doctest::Approx(0.9));
  TeichmullerPoint q = marked_chart(Complex(1.3, 1.1));
  CHECK(q.a == doctest::Approx(0.3));
  TeichmullerPoint r = marked_chart(Complex(0.1, -1.2));
  CHECK(r.a == doctest::Approx(-0.1));
  CHECK(r.b == doctest::Approx(1.2));
}
