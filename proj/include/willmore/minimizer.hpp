#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "willmore/fourier_mode.hpp"
#include "willmore/immersion.hpp"
#include "willmore/lattice.hpp"
#include "willmore/perturbation.hpp"
#include "willmore/stability.hpp"

namespace willmore {

enum class ConstraintKind { Penalized, Pinned };

struct OptimizerSettings {
  int max_iterations = 500;        // quasi-Newton iterations over all outer rounds
  int max_outer = 40;
  double constraint_tol = 1e-6;
  double stationarity_tol = 1e-5;  // relative to max(1, |dW|)
  double fd_step = 1e-4;
  double armijo = 1e-4;
  double backtrack = 0.5;
  double initial_penalty = 1e2;
};

// Coefficients of a normal perturbation of f^b: one FourierMode per (k, l)
// plus the constant normal offset.
struct ModeCoefficients {
  std::vector<FourierMode> modes;
  double constant = 0.0;
};

struct MinimizationProblem {
  double b = 1.0;
  int K = 4;
  ConstraintKind kind = ConstraintKind::Pinned;
  double alpha = 0.0;      // penalized
  double a_target = 0.0;   // pinned
  double a_max = 0.02;     // penalized: 0 <= Pi1 <= a_max
  double seed_fraction = 0.25;  // penalized seed puts Pi1 near seed_fraction * a_max
  int n = 32;
  int threads = 1;
  OptimizerSettings settings;
  std::optional<ModeCoefficients> init;
  // Optional multiplier warm start (alpha, beta) for pinned runs.
  std::optional<std::pair<double, double>> multipliers;

  static MinimizationProblem pinned(double b, double a, int K);
  static MinimizationProblem penalized(double b, double alpha, int K);
  void validate() const;
};

struct ConvergenceReport {
  bool converged = false;
  int iterations = 0;
  int outer_iterations = 0;
  long evaluations = 0;
  double constraint_violation = 0.0;
  double stationarity = 0.0;  // relative KKT residual
  std::string message;
};

struct MinimizerResult {
  double b = 1.0;
  int K = 0;
  int n = 0;
  ConstraintKind kind = ConstraintKind::Pinned;
  double alpha = 0.0;
  double a_target = 0.0;
  double a_max = 0.0;
  ModeCoefficients coefficients;
  Eigen::VectorXd slots;  // coefficients in the internal pattern basis
  double W = 0.0;
  double objective = 0.0;  // W for pinned, W - alpha Pi1 for penalized
  TeichmullerPoint pi;
  double alpha_hat = 0.0;  // augmented-Lagrangian estimates
  double beta_hat = 0.0;
  MultiplierFit kkt;       // least-squares cross-check
  ProbeGradients gradients;  // Richardson gradients at the result
  ConvergenceReport report;

  double coefficient_norm() const;
};

MinimizerResult minimize(const MinimizationProblem& p);

MultiplierFit multiplier_estimate(const MinimizerResult& r);
// Fit at an arbitrary perturbation of f^b, probing all slots up to K.
MultiplierFit multiplier_estimate_at(double b, const ModeCoefficients& c, int K, int n,
                                     int threads = 1);

struct EnergyRow {
  double a = 0.0;
  double omega = 0.0;
  double alpha_hat = 0.0;  // NaN when undetermined
  double beta_hat = 0.0;
  bool converged = false;
  int iterations = 0;
  double kkt_residual = 0.0;
};

struct EnergyTable {
  double b = 1.0;
  int K = 0;
  int n = 0;
  std::vector<EnergyRow> rows;

  void validate() const;
};

struct OmegaOptions {
  int n = 32;
  int threads = 1;
  bool warm_start = true;
  OptimizerSettings settings;
};

EnergyTable omega_table(double b, const std::vector<double>& a_grid, int K,
                        const OmegaOptions& opts = {});

// (omega(a2) - omega(a1)) / (a2 - a1) against the multiplier at the midpoint.
struct SlopeCheck {
  double a_left = 0.0;
  double a_right = 0.0;
  double slope = 0.0;
  double alpha_mid = 0.0;
  double relative_error = 0.0;
};
std::vector<SlopeCheck> slope_checks(const EnergyTable& t);

std::vector<std::pair<double, double>> directional_profile(double b, const PenalizedForm& form,
                                                           const NormalField& v,
                                                           const std::vector<double>& t_grid);

struct ConcavityReport {
  bool passed = false;
  double budget = 0.0;
  double max_positive_second_difference = 0.0;
  std::vector<double> second_differences;
};

ConcavityReport concavity_check(const EnergyTable& t, double budget = 1e-3);

}  // namespace willmore
