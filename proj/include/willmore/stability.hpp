#pragma once

#include <memory>
#include <string>
#include <vector>

#include "willmore/errors.hpp"
#include "willmore/fourier_mode.hpp"
#include "willmore/immersion.hpp"

namespace willmore {

struct PenalizedForm {
  double alpha = 0.0;
  double beta = 0.0;
};

enum class FunctionalKind { W, Pi1, Pi2, Penalized };

struct Functional {
  FunctionalKind kind = FunctionalKind::W;
  PenalizedForm form;

  static Functional willmore() { return {FunctionalKind::W, {}}; }
  static Functional pi1() { return {FunctionalKind::Pi1, {}}; }
  static Functional pi2() { return {FunctionalKind::Pi2, {}}; }
  static Functional penalized(PenalizedForm f) { return {FunctionalKind::Penalized, f}; }
};

// <phi, phi> of the mode on the homogeneous torus T^2_b (area 4 pi^2 r s).
double mode_norm2(const FourierMode& m, double b);

// Closed forms at the Clifford torus and at f^b.
double d2W_clifford(const FourierMode& m);
double d2Pi1_clifford(const FourierMode& m);
// (2/(k^2+l^2)) d1 d2 Phi in the unit-frequency chart sin(kx)cos(ly), where
// Laplace(eta) + 2 d1 d2 Phi = 0 holds exactly.
FourierMode eta_correction(const FourierMode& m);
double d2Pi2_homogeneous(const FourierMode& m, double b);

// Second derivatives at t = 0 of W, Pi1, Pi2 along t -> exp_normal(f, v, t),
// by five-point second differences with Richardson extrapolation.
struct SecondVariations {
  double W = 0.0;
  double pi1 = 0.0;
  double pi2 = 0.0;
  double norm2 = 0.0;  // integral of Phi^2 over f
};

// Step used when h <= 0: 2e-3, shrunk for fields with high frequency content.
double default_step(const std::vector<double>& phi, int n);
SecondVariations second_variations(const TorusImmersion& f, const NormalField& v,
                                   double h = 0.0);
double quadratic_form_numeric(const Functional& functional,
                              std::shared_ptr<const TorusImmersion> f, const NormalField& v,
                              double h = 0.0);

double g_polynomial(double alpha_tilde, double c, double l);

struct GRoots {
  double l2_first = 0.0;   // 2/(c^2+1)
  double l2_second = 0.0;  // 1/(c^2+1) + 4 alpha~ c/(c^2+1)^2
  bool first_real = true;
  bool second_real = true;
};
GRoots g_roots(double alpha_tilde, double c);

// alpha at which the mode (k, l) with equality-case coefficients becomes
// neutral at the Clifford torus, from the second branch of g_roots.
double clifford_critical_alpha(int k, int l);

struct MarginRow {
  int k = 0;
  int l = 0;
  ModePattern pattern = ModePattern::SinPlus;
  double q_value = 0.0;  // Q_{alpha,beta}(phi, phi)
  double margin = 0.0;   // q_value / <phi, phi>
  double norm2 = 0.0;
  bool invariance = false;
};

// Cached numeric second variations at f^b for every pattern of every mode up
// to K; rows sorted by (k, l, pattern).
struct ModeScanRow {
  int k = 0;
  int l = 0;
  ModePattern pattern = ModePattern::SinPlus;
  SecondVariations d2;
};

struct ModeScan {
  double b = 1.0;
  int K = 0;
  int n = 0;
  double beta = 0.0;           // multiplier fit at f^b
  double beta_residual = 0.0;
  std::vector<ModeScanRow> rows;
};

ModeScan scan_modes(double b, int K, int n, int threads);
double fit_beta(double b, int n, int threads, double* residual = nullptr);
std::vector<MarginRow> margin_table(const ModeScan& scan, double alpha, double beta);
std::vector<MarginRow> margin_table_clifford(int K, double alpha);

enum class ThresholdPath { Auto, Analytic, Numeric };

struct ThresholdOptions {
  int K = 8;
  double tol = 1e-6;
  ThresholdPath path = ThresholdPath::Auto;
  int n = 64;
  int threads = 1;
};

struct KernelEntry {
  FourierMode mode;
  ModePattern pattern;
};

struct ThresholdResult {
  double b = 1.0;
  double alpha_b = 0.0;
  double beta_b = 0.0;
  bool analytic = true;
  int K = 0;
  double tol = 0.0;
  std::vector<KernelEntry> kernel;
  std::vector<MarginRow> margins;  // at alpha_b
  std::vector<std::string> warnings;
};

// Raised when [0, 12 pi^2] does not bracket the threshold.
class BracketFailure : public NumericalFailure {
 public:
  BracketFailure(const std::string& what, std::vector<MarginRow> margins)
      : NumericalFailure(what, 0.0), margins_(std::move(margins)) {}
  const std::vector<MarginRow>& margins() const { return margins_; }

 private:
  std::vector<MarginRow> margins_;
};

ThresholdResult alpha_threshold(double b, int K = 8, double tol = 1e-6);
ThresholdResult alpha_threshold(double b, const ThresholdOptions& opts);
// Threshold from an existing scan (numeric path).
ThresholdResult threshold_from_scan(const ModeScan& scan, double tol);

// Mode function on T^2_b in domain coordinates (x, y).
struct ChartFunction {
  FourierMode mode;
  double r = 0.0;
  double s = 0.0;
  double operator()(double x, double y) const { return mode.value(x / r, y / s); }
};
ChartFunction mode_transfer(const FourierMode& m, double b);

struct PhaseShift {
  double d1 = 0.0;
  double d2 = 0.0;
};
// c1 sin(t) + c2 cos(t) = d1 sin(t + d2).
PhaseShift combine_phases(double c1, double c2);

// x~ -> sin(frequency x~) with frequency s/r + 4r/s: the kernel function in
// the (2,-1) chart, independent of the second chart coordinate.
struct KernelProfile {
  double frequency = 0.0;
  double operator()(double xt) const;
};
KernelProfile equivariant_kernel_profile(double b);

}  // namespace willmore
