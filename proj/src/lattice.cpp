#include "willmore/lattice.hpp"

#include <cmath>

#include "willmore/errors.hpp"

namespace willmore {

double Lattice::oriented_area() const {
  return gen1.real() * gen2.imag() - gen1.imag() * gen2.real();
}

void Lattice::validate() const {
  double scale = std::abs(gen1) * std::abs(gen2);
  if (!(scale > 0.0) || !std::isfinite(scale) ||
      std::abs(oriented_area()) <= 1e-14 * scale) {
    throw InvalidLattice("lattice generators are collinear or degenerate");
  }
}

Lattice make_lattice(Complex gen1, Complex gen2) {
  Lattice lat{gen1, gen2};
  lat.validate();
  return lat;
}

TeichmullerPoint reduce_modulus(Complex tau) {
  if (tau.imag() < 0.0) tau = -tau;
  if (!(tau.imag() > 0.0)) throw InvalidLattice("modulus on the real axis");
  for (int iter = 0; iter < 200; ++iter) {
    tau -= std::round(tau.real());
    if (std::norm(tau) < 1.0 - 1e-15) {
      tau = -1.0 / tau;
      continue;
    }
    break;
  }
  return {std::abs(tau.real()), tau.imag()};
}

TeichmullerPoint modulus_from_lattice(const Lattice& lat) {
  lat.validate();
  return reduce_modulus(lat.gen2 / lat.gen1);
}

TeichmullerPoint marked_chart(Complex tau) {
  if (tau.imag() < 0.0) tau = -tau;
  if (!(tau.imag() > 0.0)) throw InvalidLattice("modulus on the real axis");
  tau -= std::round(tau.real());
  return {tau.real(), tau.imag()};
}

TeichmullerPoint marked_modulus(const Lattice& lat) {
  lat.validate();
  return marked_chart(lat.gen2 / lat.gen1);
}

Lattice lattice_for_class(TeichmullerPoint p, double scale) {
  if (!(p.b > 0.0)) throw DomainError("Teichmuller point needs b > 0");
  if (!(scale > 0.0)) throw DomainError("lattice scale must be positive");
  return make_lattice(Complex(scale, 0.0), scale * Complex(p.a, p.b));
}

}  // namespace willmore
