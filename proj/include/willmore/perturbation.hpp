#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "willmore/conformal.hpp"
#include "willmore/fourier_mode.hpp"
#include "willmore/immersion.hpp"
#include "willmore/spectral_grid.hpp"

namespace willmore {

struct FunctionalValues {
  double W = 0.0;
  double pi1 = 0.0;
  double pi2 = 0.0;
};

// Evaluates W and Pi on normal graphs q = cos(Phi) p + sin(Phi) n over a
// fixed base immersion, reusing the base samples and FFT plans. Produces the
// same numbers as exp_normal followed by willmore_energy / projection, but
// without rebuilding the base geometry each time. Not thread-safe; use one
// instance per thread.
class PerturbationEvaluator {
 public:
  PerturbationEvaluator(const TorusImmersion& base, int n, double cg_tol = 1e-12);

  int n() const { return grid_.n(); }
  std::size_t points() const { return grid_.points(); }

  // phi is the full normal displacement (amplitude included) on the n-grid.
  FunctionalValues evaluate(const std::vector<double>& phi);
  FunctionalValues base_values();

  // Integral of phi^2 over the base surface.
  double l2_norm2(const std::vector<double>& phi) const;

  int last_iterations() const { return last_iterations_; }

 private:
  SpectralGrid grid_;
  ConformalProjector projector_;
  Field4 p_, nrm_;
  std::vector<double> base_dA_;  // sqrt(g) on the unit square
  Field4 q_, qu_, qv_, quu_, quv_, qvv_;
  std::vector<double> w_, e_, f_, g_;
  int last_iterations_ = 0;
};

// One coordinate direction of a truncated normal-mode space: either the
// constant offset or a pattern function of mode (k, l).
struct BasisSlot {
  int k = 0;
  int l = 0;
  ModePattern pattern = ModePattern::SinPlus;
  bool constant = false;

  FourierMode mode(double coefficient) const;
};

// Patterns spanning A_{k,l}: four for interior modes, two (sin, cos) on the
// boundary k = 0 or l = 0.
std::vector<ModePattern> patterns_for(int k, int l);

// Grid samples of the slots over an analytic base, sorted by (k, l, pattern).
class ModeBasis {
 public:
  ModeBasis(std::shared_ptr<const TorusImmersion> base, int n, int K, bool include_constant,
            bool include_invariance);

  std::size_t size() const { return slots_.size(); }
  const BasisSlot& slot(std::size_t i) const { return slots_[i]; }
  const std::vector<double>& grid(std::size_t i) const { return grids_[i]; }
  int n() const { return n_; }
  int cutoff() const { return K_; }
  std::shared_ptr<const TorusImmersion> base() const { return base_; }

  std::vector<double> field(const Eigen::VectorXd& x) const;
  // Modes with summed (sc, cs, cc, ss) coefficients; constant offset separate.
  std::vector<FourierMode> to_modes(const Eigen::VectorXd& x, double* constant) const;
  Eigen::VectorXd from_modes(const std::vector<FourierMode>& modes, double constant) const;

 private:
  std::shared_ptr<const TorusImmersion> base_;
  int n_;
  int K_;
  std::vector<BasisSlot> slots_;
  std::vector<std::vector<double>> grids_;
};

// One evaluator per worker thread over the same base.
class EvaluatorPool {
 public:
  EvaluatorPool(const TorusImmersion& base, int n, int threads, double cg_tol = 1e-12);
  int threads() const { return static_cast<int>(pool_.size()); }
  PerturbationEvaluator& at(std::size_t i) { return *pool_[i]; }
  PerturbationEvaluator& main() { return *pool_[0]; }

 private:
  std::vector<std::unique_ptr<PerturbationEvaluator>> pool_;
};

struct ProbeGradients {
  Eigen::VectorXd dW, dPi1, dPi2;
};

// Central differences of (W, Pi1, Pi2) at coefficients x along every slot;
// with richardson the steps h and h/2 are combined.
ProbeGradients probe_gradients(EvaluatorPool& pool, const ModeBasis& basis,
                               const Eigen::VectorXd& x, double h, bool richardson);

struct MultiplierFit {
  double alpha = 0.0;
  double beta = 0.0;
  bool alpha_determined = false;
  double residual = 0.0;  // relative to |dW|
};

// Least squares dW = alpha dPi1 + beta dPi2. When dPi1 is (numerically) in the
// span of dPi2, alpha is undetermined and only beta is fitted.
MultiplierFit fit_multipliers(const ProbeGradients& g);

}  // namespace willmore
