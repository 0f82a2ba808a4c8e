#pragma once

#include <complex>

namespace willmore {

using Complex = std::complex<double>;

struct TeichmullerPoint {
  double a = 0.0;
  double b = 1.0;
};

// Periods of a flat torus C / (gen1 Z + gen2 Z).
struct Lattice {
  Complex gen1{1.0, 0.0};
  Complex gen2{0.0, 1.0};

  // Throws InvalidLattice when the generators are (numerically) collinear.
  void validate() const;
  // gen1 x gen2 as real vectors; positive for positively oriented bases.
  double oriented_area() const;
};

Lattice make_lattice(Complex gen1, Complex gen2);

// Full reduction of tau = gen2/gen1 to |a| <= 1/2, a^2 + b^2 >= 1, then a -> |a|.
TeichmullerPoint modulus_from_lattice(const Lattice& lat);
TeichmullerPoint reduce_modulus(Complex tau);

// Keeps the marking: tau = gen2/gen1 with the sign of gen2 fixed so that
// b > 0, shifted by an integer into |a| <= 1/2. No inversion, no reflection,
// so a is signed and b may be below 1.
TeichmullerPoint marked_modulus(const Lattice& lat);
TeichmullerPoint marked_chart(Complex tau);

Lattice lattice_for_class(TeichmullerPoint p, double scale);

}  // namespace willmore
