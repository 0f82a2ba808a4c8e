#include "willmore/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "willmore/errors.hpp"
#include "willmore/numerics.hpp"

namespace willmore {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Truncated normal-mode space over f^b with a pool of evaluators.
struct Model {
  std::shared_ptr<const TorusImmersion> base;
  ModeBasis basis;
  EvaluatorPool pool;
  long evaluations = 0;

  Model(double b, int K, int n, int threads)
      : base(std::make_shared<const TorusImmersion>(TorusImmersion::homogeneous(b))),
        basis(base, n, K, true, false),
        pool(*base, n, threads) {}

  std::size_t dim() const { return basis.size(); }

  FunctionalValues eval(const VectorXd& x) {
    ++evaluations;
    return pool.main().evaluate(basis.field(x));
  }

  ProbeGradients grad(const VectorXd& x, double h, bool richardson) {
    evaluations += static_cast<long>(2 * dim() * (richardson ? 2 : 1));
    return probe_gradients(pool, basis, x, h, richardson);
  }
};

// First and second derivatives of W, Pi1, Pi2 along each slot at f^b.
struct DiagonalModel {
  FunctionalValues f0;
  VectorXd gW, gP1, gP2, dW, dP1, dP2;
};

DiagonalModel diagonal_model(Model& m) {
  const std::size_t d = m.dim();
  DiagonalModel out;
  VectorXd zero = VectorXd::Zero(static_cast<Eigen::Index>(d));
  out.f0 = m.eval(zero);
  for (VectorXd* v : {&out.gW, &out.gP1, &out.gP2, &out.dW, &out.dP1, &out.dP2}) {
    v->resize(static_cast<Eigen::Index>(d));
  }
  int workers = m.pool.threads();
  parallel_for(static_cast<std::size_t>(workers), workers, [&](std::size_t w) {
    PerturbationEvaluator& ev = m.pool.at(w);
    std::vector<double> phi;
    for (std::size_t s = d * w / workers; s < d * (w + 1) / workers; ++s) {
      const BasisSlot& sl = m.basis.slot(s);
      double n2 = static_cast<double>(sl.k * sl.k + sl.l * sl.l);
      double h = 1e-2 * std::min(1.0, std::sqrt(5.0 / std::max(n2, 1.0)));
      const auto& g = m.basis.grid(s);
      phi.resize(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) phi[i] = h * g[i];
      FunctionalValues p = ev.evaluate(phi);
      for (std::size_t i = 0; i < g.size(); ++i) phi[i] = -h * g[i];
      FunctionalValues q = ev.evaluate(phi);
      auto e = static_cast<Eigen::Index>(s);
      out.gW[e] = (p.W - q.W) / (2 * h);
      out.gP1[e] = (p.pi1 - q.pi1) / (2 * h);
      out.gP2[e] = (p.pi2 - q.pi2) / (2 * h);
      out.dW[e] = (p.W - 2 * out.f0.W + q.W) / (h * h);
      out.dP1[e] = (p.pi1 - 2 * out.f0.pi1 + q.pi1) / (h * h);
      out.dP2[e] = (p.pi2 - 2 * out.f0.pi2 + q.pi2) / (h * h);
    }
  });
  m.evaluations += static_cast<long>(2 * d);
  return out;
}

// Augmented Lagrangian of one problem: equality constraints c = 0 and
// inequalities g >= 0 (PHR form).
struct Lagrangian {
  const MinimizationProblem& p;
  VectorXd lam;  // equality multipliers
  VectorXd nu;   // inequality multipliers
  double mu = 1.0;

  bool pinned() const { return p.kind == ConstraintKind::Pinned; }

  double objective(const FunctionalValues& f) const {
    return pinned() ? f.W : f.W - p.alpha * f.pi1;
  }
  VectorXd eq(const FunctionalValues& f) const {
    if (pinned()) return (VectorXd(2) << f.pi1 - p.a_target, f.pi2 - p.b).finished();
    return (VectorXd(1) << f.pi2 - p.b).finished();
  }
  VectorXd ineq(const FunctionalValues& f) const {
    if (pinned()) return VectorXd(0);
    return (VectorXd(2) << f.pi1, p.a_max - f.pi1).finished();
  }
  VectorXd grad_objective(const ProbeGradients& g) const {
    return pinned() ? VectorXd(g.dW) : VectorXd(g.dW - p.alpha * g.dPi1);
  }
  MatrixXd grad_eq(const ProbeGradients& g) const {
    MatrixXd j(g.dW.size(), pinned() ? 2 : 1);
    if (pinned()) {
      j.col(0) = g.dPi1;
      j.col(1) = g.dPi2;
    } else {
      j.col(0) = g.dPi2;
    }
    return j;
  }
  MatrixXd grad_ineq(const ProbeGradients& g) const {
    if (pinned()) return MatrixXd(g.dW.size(), 0);
    MatrixXd j(g.dW.size(), 2);
    j.col(0) = g.dPi1;
    j.col(1) = -g.dPi1;
    return j;
  }

  bool active(double g, double n) const { return mu * g < n; }

  double value(const FunctionalValues& f) const {
    VectorXd c = eq(f), gi = ineq(f);
    double v = objective(f) - lam.dot(c) + 0.5 * mu * c.squaredNorm();
    for (Eigen::Index j = 0; j < gi.size(); ++j) {
      v += active(gi[j], nu[j]) ? -nu[j] * gi[j] + 0.5 * mu * gi[j] * gi[j]
                                : -nu[j] * nu[j] / (2.0 * mu);
    }
    return v;
  }

  VectorXd gradient(const FunctionalValues& f, const ProbeGradients& g) const {
    VectorXd c = eq(f), gi = ineq(f);
    VectorXd out = grad_objective(g) + grad_eq(g) * (mu * c - lam);
    MatrixXd jg = grad_ineq(g);
    for (Eigen::Index j = 0; j < gi.size(); ++j) {
      if (active(gi[j], nu[j])) out += (mu * gi[j] - nu[j]) * jg.col(j);
    }
    return out;
  }

  double violation(const FunctionalValues& f) const {
    VectorXd c = eq(f), gi = ineq(f);
    double v = c.size() ? c.cwiseAbs().maxCoeff() : 0.0;
    for (Eigen::Index j = 0; j < gi.size(); ++j) {
      v = std::max(v, std::abs(std::min(gi[j], nu[j] / mu)));
    }
    return v;
  }

  void update(const FunctionalValues& f) {
    lam -= mu * eq(f);
    VectorXd gi = ineq(f);
    for (Eigen::Index j = 0; j < gi.size(); ++j) nu[j] = std::max(0.0, nu[j] - mu * gi[j]);
  }

  // (alpha_hat, beta_hat) in the convention dW = alpha dPi1 + beta dPi2.
  std::pair<double, double> multipliers() const {
    if (pinned()) return {lam[0], lam[1]};
    return {p.alpha + nu[0] - nu[1], lam[0]};
  }

  // Initial quasi-Newton matrix: Lagrangian diagonal at f^b plus the
  // penalty's Gauss-Newton part at the current point.
  MatrixXd initial_hessian(const DiagonalModel& dm, const FunctionalValues& f,
                           const ProbeGradients& g) const {
    auto [ah, bh] = multipliers();
    VectorXd diag = dm.dW - ah * dm.dP1 - bh * dm.dP2;
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
      double floor = 1e-2 * std::abs(dm.dW[i]) + 1e-6;
      diag[i] = std::max(diag[i], floor);
    }
    MatrixXd b = diag.asDiagonal();
    MatrixXd je = grad_eq(g);
    b += mu * je * je.transpose();
    VectorXd gi = ineq(f);
    MatrixXd jg = grad_ineq(g);
    for (Eigen::Index j = 0; j < gi.size(); ++j) {
      if (active(gi[j], nu[j])) b += mu * jg.col(j) * jg.col(j).transpose();
    }
    return b;
  }
};

double safe_value(Model& m, const Lagrangian& lag, const VectorXd& x, FunctionalValues* f) {
  try {
    *f = m.eval(x);
    double v = lag.value(*f);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  } catch (const DegenerateImmersion&) {
    return std::numeric_limits<double>::infinity();
  } catch (const NumericalFailure&) {
    return std::numeric_limits<double>::infinity();
  }
}

std::size_t seed_slot(const DiagonalModel& dm, double beta, const Model& m, double* quotient) {
  std::size_t best = m.dim();
  double best_q = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < m.dim(); ++s) {
    auto e = static_cast<Eigen::Index>(s);
    if (m.basis.slot(s).constant || !(dm.dP1[e] > 1e-8)) continue;
    double q = (dm.dW[e] - beta * dm.dP2[e]) / dm.dP1[e];
    if (q < best_q) {
      best_q = q;
      best = s;
    }
  }
  if (quotient) *quotient = best_q;
  return best;
}

}  // namespace

MinimizationProblem MinimizationProblem::pinned(double b, double a, int K) {
  MinimizationProblem p;
  p.b = b;
  p.K = K;
  p.kind = ConstraintKind::Pinned;
  p.a_target = a;
  return p;
}

MinimizationProblem MinimizationProblem::penalized(double b, double alpha, int K) {
  MinimizationProblem p;
  p.b = b;
  p.K = K;
  p.kind = ConstraintKind::Penalized;
  p.alpha = alpha;
  return p;
}

void MinimizationProblem::validate() const {
  if (!(b >= 0.8 && b <= 1.25)) throw DomainError("b must lie in [0.8, 1.25]");
  if (K < 2 || K > 8) throw DomainError("mode cutoff K must lie in [2, 8]");
  if (n < 16 || n % 2 != 0) throw DomainError("grid size must be even and >= 16");
  if (threads < 1) throw DomainError("threads must be >= 1");
  if (kind == ConstraintKind::Pinned) {
    if (!(a_target >= 0.0 && a_target <= 0.05)) throw DomainError("a_target must lie in [0, 0.05]");
  } else {
    if (!std::isfinite(alpha)) throw DomainError("alpha must be finite");
    if (!(a_max > 0.0 && a_max <= 0.05)) throw DomainError("a_max must lie in (0, 0.05]");
    if (!(seed_fraction > 0.0 && seed_fraction < 1.0)) {
      throw DomainError("seed_fraction must lie in (0, 1)");
    }
  }
  const OptimizerSettings& s = settings;
  if (s.max_iterations < 1 || s.max_outer < 1 || !(s.constraint_tol > 0) ||
      !(s.stationarity_tol > 0) || !(s.fd_step > 0) || !(s.initial_penalty > 0) ||
      !(s.armijo > 0 && s.armijo < 0.5) || !(s.backtrack > 0 && s.backtrack < 1)) {
    throw DomainError("invalid optimizer settings");
  }
}

double MinimizerResult::coefficient_norm() const { return slots.norm(); }

MinimizerResult minimize(const MinimizationProblem& p) {
  p.validate();
  const OptimizerSettings& st = p.settings;
  Model m(p.b, p.K, p.n, p.threads);
  const std::size_t d = m.dim();
  DiagonalModel dm = diagonal_model(m);
  // Constant offset is slot 0; it carries the beta estimate at f^b.
  double beta0 = dm.gP2[0] != 0.0 ? dm.gW[0] / dm.gP2[0] : 0.0;
  double q_seed = 0.0;
  std::size_t seed = seed_slot(dm, beta0, m, &q_seed);

  VectorXd x = VectorXd::Zero(static_cast<Eigen::Index>(d));
  if (p.init) {
    x = m.basis.from_modes(p.init->modes, p.init->constant);
  } else {
    double target = p.kind == ConstraintKind::Pinned ? p.a_target : p.seed_fraction * p.a_max;
    if (target > 0.0) {
      if (seed == d) throw Infeasible("no mode up to K increases Pi1; constraint infeasible");
      x[static_cast<Eigen::Index>(seed)] =
          std::sqrt(2.0 * target / dm.dP1[static_cast<Eigen::Index>(seed)]);
    }
  }

  Lagrangian lag{p, VectorXd(), VectorXd(), st.initial_penalty};
  FunctionalValues f = m.eval(x);
  ProbeGradients g = m.grad(x, st.fd_step, false);
  if (lag.pinned()) {
    lag.lam = VectorXd(2);
    if (p.multipliers) {
      lag.lam << p.multipliers->first, p.multipliers->second;
    } else {
      MultiplierFit fit = fit_multipliers(g);
      lag.lam << (fit.alpha_determined ? fit.alpha : q_seed), fit.beta;
    }
    lag.nu = VectorXd(0);
  } else {
    lag.lam = (VectorXd(1) << beta0).finished();
    lag.nu = VectorXd::Zero(2);
  }

  ConvergenceReport rep;
  double prev_violation = std::numeric_limits<double>::infinity();
  double accept_violation = 1e-3;
  double scale = std::max(1.0, g.dW.norm());
  double inner_tol = 1e-2 * scale;
  bool budget_exhausted = false;
  for (int outer = 0; outer < st.max_outer && !budget_exhausted; ++outer) {
    rep.outer_iterations = outer + 1;
    MatrixXd B = lag.initial_hessian(dm, f, g);
    double L = lag.value(f);
    VectorXd gl = lag.gradient(f, g);
    bool fresh = true;
    for (;;) {
      scale = std::max(1.0, g.dW.norm());
      if (gl.norm() <= std::max(inner_tol, 0.5 * st.stationarity_tol * scale)) break;
      if (rep.iterations >= st.max_iterations) {
        budget_exhausted = true;
        break;
      }
      VectorXd dir = B.ldlt().solve(-gl);
      if (!(dir.dot(gl) < 0.0) || !dir.allFinite()) {
        B = lag.initial_hessian(dm, f, g);
        dir = B.ldlt().solve(-gl);
        fresh = true;
        if (!(dir.dot(gl) < 0.0)) dir = -gl;
      }
      double cap = 0.05 / std::max(dir.cwiseAbs().maxCoeff(), 1e-300);
      double t = std::min(1.0, cap);
      FunctionalValues fn;
      VectorXd xn;
      double Ln = 0.0;
      bool accepted = false;
      for (int ls = 0; ls < 40; ++ls) {
        xn = x + t * dir;
        Ln = safe_value(m, lag, xn, &fn);
        if (Ln <= L + st.armijo * t * dir.dot(gl)) {
          accepted = true;
          break;
        }
        t *= st.backtrack;
      }
      ++rep.iterations;
      if (!accepted) {
        if (fresh) break;  // stalled at noise level
        B = lag.initial_hessian(dm, f, g);
        fresh = true;
        continue;
      }
      ProbeGradients gn = m.grad(xn, st.fd_step, false);
      VectorXd gln = lag.gradient(fn, gn);
      VectorXd s = xn - x, y = gln - gl;
      VectorXd bs = B * s;
      double sbs = s.dot(bs), sy = s.dot(y);
      if (sbs > 0.0) {
        if (sy < 0.2 * sbs) {
          double theta = 0.8 * sbs / (sbs - sy);
          y = theta * y + (1.0 - theta) * bs;
          sy = s.dot(y);
        }
        B += (y * y.transpose()) / sy - (bs * bs.transpose()) / sbs;
      }
      x = xn;
      f = fn;
      g = gn;
      L = Ln;
      gl = gln;
      fresh = false;
    }
    double viol = lag.violation(f);
    double stat = gl.norm() / std::max(1.0, g.dW.norm());
    rep.constraint_violation = viol;
    rep.stationarity = stat;
    if (viol <= st.constraint_tol && stat <= st.stationarity_tol) {
      lag.update(f);
      rep.converged = true;
      break;
    }
    // Multipliers move only once the constraints are nearly met; otherwise
    // a large violation would be read as a large multiplier.
    if (viol <= accept_violation) {
      lag.update(f);
      accept_violation = std::max(0.1 * accept_violation, 0.1 * st.constraint_tol);
      if (viol > 0.25 * prev_violation) lag.mu = std::min(10.0 * lag.mu, 1e10);
      prev_violation = viol;
    } else {
      lag.mu = std::min(10.0 * lag.mu, 1e10);
    }
    inner_tol = std::max(0.1 * inner_tol, 0.5 * st.stationarity_tol * scale);
  }

  MinimizerResult r;
  r.b = p.b;
  r.K = p.K;
  r.n = p.n;
  r.kind = p.kind;
  r.alpha = p.alpha;
  r.a_target = p.a_target;
  r.a_max = p.a_max;
  r.slots = x;
  r.coefficients.modes = m.basis.to_modes(x, &r.coefficients.constant);
  r.W = f.W;
  r.objective = lag.objective(f);
  r.pi = {f.pi1, f.pi2};
  std::tie(r.alpha_hat, r.beta_hat) = lag.multipliers();
  r.gradients = m.grad(x, st.fd_step, true);
  r.kkt = fit_multipliers(r.gradients);
  // KKT residual with the augmented-Lagrangian multipliers.
  VectorXd res = r.gradients.dW - r.alpha_hat * r.gradients.dPi1 - r.beta_hat * r.gradients.dPi2;
  double stat = res.norm() / std::max(1.0, r.gradients.dW.norm());
  rep.stationarity = stat;
  rep.constraint_violation = lag.violation(f);
  rep.converged = rep.converged && rep.constraint_violation <= st.constraint_tol &&
                  stat <= st.stationarity_tol;
  rep.evaluations = m.evaluations;
  if (rep.converged) {
    rep.message = "converged";
  } else if (budget_exhausted) {
    rep.message = "iteration budget exhausted";
  } else {
    rep.message = "tolerances not reached";
  }
  r.report = rep;
  return r;
}

MultiplierFit multiplier_estimate(const MinimizerResult& r) {
  if (r.gradients.dW.size() > 0) return fit_multipliers(r.gradients);
  return multiplier_estimate_at(r.b, r.coefficients, r.K, r.n);
}

MultiplierFit multiplier_estimate_at(double b, const ModeCoefficients& c, int K, int n,
                                     int threads) {
  Model m(b, K, n, threads);
  VectorXd x = m.basis.from_modes(c.modes, c.constant);
  return fit_multipliers(m.grad(x, 1e-4, true));
}

void EnergyTable::validate() const {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].a > rows[i - 1].a)) throw DomainError("energy table a values must increase");
  }
  for (const EnergyRow& r : rows) {
    if (r.converged && !std::isfinite(r.omega)) {
      throw DomainError("converged energy row has non-finite omega");
    }
  }
}

EnergyTable omega_table(double b, const std::vector<double>& a_grid, int K,
                        const OmegaOptions& opts) {
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    if (!(a_grid[i] >= 0.0 && a_grid[i] <= 0.05)) throw DomainError("a grid must lie in [0, 0.05]");
    if (i > 0 && !(a_grid[i] > a_grid[i - 1])) throw DomainError("a grid must be increasing");
  }
  EnergyTable t;
  t.b = b;
  t.K = K;
  t.n = opts.n;
  std::optional<MinimizerResult> prev;
  for (double a : a_grid) {
    MinimizationProblem p = MinimizationProblem::pinned(b, a, K);
    p.n = opts.n;
    p.threads = opts.threads;
    p.settings = opts.settings;
    if (opts.warm_start && prev && prev->report.converged && prev->a_target > 0.0 && a > 0.0) {
      double ratio = std::sqrt(a / prev->a_target);
      ModeCoefficients c = prev->coefficients;
      for (FourierMode& fm : c.modes) {
        fm.c_sc *= ratio;
        fm.c_cs *= ratio;
        fm.c_cc *= ratio;
        fm.c_ss *= ratio;
      }
      c.constant *= ratio;
      p.init = c;
      p.multipliers = std::make_pair(prev->alpha_hat, prev->beta_hat);
    }
    MinimizerResult r = minimize(p);
    EnergyRow row;
    row.a = a;
    row.omega = r.W;
    row.alpha_hat = r.kkt.alpha_determined ? r.alpha_hat : kNaN;
    row.beta_hat = r.beta_hat;
    row.converged = r.report.converged;
    row.iterations = r.report.iterations;
    row.kkt_residual = r.report.stationarity;
    t.rows.push_back(row);
    prev = std::move(r);
  }
  return t;
}

std::vector<SlopeCheck> slope_checks(const EnergyTable& t) {
  std::vector<const EnergyRow*> rows;
  for (const EnergyRow& r : t.rows) {
    if (r.converged) rows.push_back(&r);
  }
  std::vector<const EnergyRow*> determined;
  for (const EnergyRow* r : rows) {
    if (std::isfinite(r->alpha_hat)) determined.push_back(r);
  }
  auto alpha_at = [&](double a) {
    if (determined.empty()) return kNaN;
    if (determined.size() == 1) return determined[0]->alpha_hat;
    // Linear interpolation between the bracketing determined rows,
    // extrapolation from the nearest pair outside their range.
    std::size_t i = 1;
    while (i + 1 < determined.size() && determined[i]->a < a) ++i;
    const EnergyRow* lo = determined[i - 1];
    const EnergyRow* hi = determined[i];
    double w = (a - lo->a) / (hi->a - lo->a);
    return lo->alpha_hat + w * (hi->alpha_hat - lo->alpha_hat);
  };
  std::vector<SlopeCheck> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    SlopeCheck c;
    c.a_left = rows[i - 1]->a;
    c.a_right = rows[i]->a;
    c.slope = (rows[i]->omega - rows[i - 1]->omega) / (c.a_right - c.a_left);
    bool both = std::isfinite(rows[i - 1]->alpha_hat) && std::isfinite(rows[i]->alpha_hat);
    c.alpha_mid = both ? 0.5 * (rows[i - 1]->alpha_hat + rows[i]->alpha_hat)
                       : alpha_at(0.5 * (c.a_left + c.a_right));
    c.relative_error = std::abs(c.slope - c.alpha_mid) / std::abs(c.alpha_mid);
    out.push_back(c);
  }
  return out;
}

std::vector<std::pair<double, double>> directional_profile(double b, const PenalizedForm& form,
                                                           const NormalField& v,
                                                           const std::vector<double>& t_grid) {
  if (!v.ref || v.ref->kind() != ImmersionKind::Homogeneous || std::abs(v.ref->b() - b) > 1e-14) {
    throw DomainError("directional profile needs a normal field on homogeneous_torus(b)");
  }
  for (double t : t_grid) {
    bool mirrored = std::any_of(t_grid.begin(), t_grid.end(),
                                [&](double s) { return std::abs(s + t) <= 1e-15 * (1 + std::abs(t)); });
    if (!mirrored) throw DomainError("t grid must be symmetric about 0");
  }
  PerturbationEvaluator ev(*v.ref, v.n);
  std::vector<std::pair<double, double>> out;
  std::vector<double> phi(v.phi.size());
  for (double t : t_grid) {
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = t * v.phi[i];
    FunctionalValues f = ev.evaluate(phi);
    out.emplace_back(t, f.W - form.alpha * f.pi1 - form.beta * f.pi2);
  }
  return out;
}

ConcavityReport concavity_check(const EnergyTable& t, double budget) {
  t.validate();
  std::vector<const EnergyRow*> rows;
  for (const EnergyRow& r : t.rows) {
    if (r.converged) rows.push_back(&r);
  }
  if (rows.size() < 3) throw DomainError("concavity check needs at least 3 converged rows");
  ConcavityReport rep;
  rep.budget = budget;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    double a0 = rows[i - 1]->a, a1 = rows[i]->a, a2 = rows[i + 1]->a;
    double w = (a2 - a1) / (a2 - a0);
    double interp = w * rows[i - 1]->omega + (1.0 - w) * rows[i + 1]->omega;
    double sd = 2.0 * (interp - rows[i]->omega);
    rep.second_differences.push_back(sd);
    worst = std::max(worst, sd);
  }
  rep.max_positive_second_difference = worst;
  rep.passed = worst <= budget;
  return rep;
}

}  // namespace willmore
