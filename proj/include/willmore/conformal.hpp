#pragma once

#include <complex>
#include <memory>
#include <utility>
#include <vector>

#include "willmore/immersion.hpp"
#include "willmore/lattice.hpp"
#include "willmore/spectral_grid.hpp"

namespace willmore {

// Metric components in the domain coordinates (x, y) of a reference lattice,
// sampled on the n x n grid z = (i/n) gen1 + (j/n) gen2.
struct MetricGrid {
  int n = 0;
  std::vector<double> E, F, G;

  void validate() const;
};

MetricGrid metric_from_geometry(const GeometryFields& g);
MetricGrid flat_metric(const Lattice& ref, int n);

struct ProjectionResult {
  Complex tau;             // marked modulus B/A before the chart shift
  TeichmullerPoint point;  // marked chart value (signed a)
  int iterations = 0;
  double residual = 0.0;
};

// Conformal class of a periodic metric on the unit (u, v) square.
// Solves -div(A grad psi) = div(A e_u) for A = sqrt(g) g^{-1}, which is
// invariant under conformal rescaling, by preconditioned CG in Fourier
// space; psi + u is then the harmonic coordinate and its periods give tau.
class ConformalProjector {
 public:
  explicit ConformalProjector(int n, double tol = 1e-12, int max_iterations = 0);

  int n() const { return grid_.n(); }
  double tolerance() const { return tol_; }

  // Metric coefficients with respect to (u, v).
  ProjectionResult solve_uv(const double* E, const double* F, const double* G);

 private:
  void apply_operator(const std::vector<Complex>& x, std::vector<Complex>& out);
  void precondition(const std::vector<Complex>& r, std::vector<Complex>& z) const;
  double dot(const std::vector<Complex>& a, const std::vector<Complex>& b) const;
  void gradient(const std::vector<Complex>& x, double* gu, double* gv);

  SpectralGrid grid_;
  double tol_;
  int max_iterations_;
  std::vector<double> auu_, auv_, avv_, gu_, gv_, fu_, fv_;
  std::vector<Complex> spec_u_, spec_v_, tmp_;
  double mean_uu_ = 0.0, mean_uv_ = 0.0, mean_vv_ = 0.0;
};

// Metric in domain coordinates of ref, converted to (u, v) internally.
TeichmullerPoint project_conformal_class(const MetricGrid& m, const Lattice& ref);
ProjectionResult project_conformal_class_detailed(const MetricGrid& m, const Lattice& ref,
                                                  double tol = 1e-12);
TeichmullerPoint project_immersion(const TorusImmersion& f, int n);

// Central difference of Pi along exp_normal(f, v, +-h), Richardson-refined
// with step h/2.
std::pair<double, double> dPi_directional(std::shared_ptr<const TorusImmersion> f,
                                          const NormalField& v, double h = 1e-3);

}  // namespace willmore
