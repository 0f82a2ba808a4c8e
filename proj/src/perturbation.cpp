#include "willmore/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "willmore/numerics.hpp"

namespace willmore {

PerturbationEvaluator::PerturbationEvaluator(const TorusImmersion& base, int n, double cg_tol)
    : grid_(n), projector_(n, cg_tol) {
  SurfaceSamples s = base.sample(n);
  GeometryFields g = fundamental_forms(s);
  p_ = s.p;
  nrm_ = g.unit_normal;
  double jdet = std::abs(s.domain.oriented_area());
  base_dA_.resize(grid_.points());
  for (std::size_t i = 0; i < base_dA_.size(); ++i) base_dA_[i] = g.dA[i] * jdet;
  for (Field4* f : {&q_, &qu_, &qv_, &quu_, &quv_, &qvv_}) f->resize(grid_.points());
  for (auto* v : {&w_, &e_, &f_, &g_}) v->assign(grid_.points(), 0.0);
}

double PerturbationEvaluator::l2_norm2(const std::vector<double>& phi) const {
  std::vector<double> w(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) w[i] = phi[i] * phi[i] * base_dA_[i];
  return mean(w);
}

FunctionalValues PerturbationEvaluator::base_values() {
  return evaluate(std::vector<double>(grid_.points(), 0.0));
}

FunctionalValues PerturbationEvaluator::evaluate(const std::vector<double>& phi) {
  const std::size_t np = grid_.points();
  for (std::size_t i = 0; i < np; ++i) {
    double c = std::cos(phi[i]), s = std::sin(phi[i]);
    for (int k = 0; k < 4; ++k) q_.c[k][i] = c * p_.c[k][i] + s * nrm_.c[k][i];
  }
  for (int k = 0; k < 4; ++k) {
    grid_.derivatives(q_.c[k].data(), qu_.c[k].data(), qv_.c[k].data(), quu_.c[k].data(),
                      quv_.c[k].data(), qvv_.c[k].data());
  }
  for (std::size_t i = 0; i < np; ++i) {
    PointGeometry pg = point_geometry(q_.at(i), qu_.at(i), qv_.at(i), quu_.at(i), quv_.at(i),
                                      qvv_.at(i));
    w_[i] = (pg.H * pg.H + 1.0) * pg.sqrtg;
    e_[i] = pg.E;
    f_[i] = pg.F;
    g_[i] = pg.G;
  }
  FunctionalValues out;
  out.W = mean(w_);
  ProjectionResult pr = projector_.solve_uv(e_.data(), f_.data(), g_.data());
  last_iterations_ = pr.iterations;
  out.pi1 = pr.point.a;
  out.pi2 = pr.point.b;
  return out;
}

}  // namespace willmore

namespace willmore {

FourierMode BasisSlot::mode(double coefficient) const {
  FourierMode m = pattern_mode(k, l, pattern);
  m.c_sc *= coefficient;
  m.c_cs *= coefficient;
  m.c_cc *= coefficient;
  m.c_ss *= coefficient;
  return m;
}

std::vector<ModePattern> patterns_for(int k, int l) {
  if (k == 0 || l == 0) return {ModePattern::SinPlus, ModePattern::CosPlus};
  return {ModePattern::SinPlus, ModePattern::CosPlus, ModePattern::SinMinus,
          ModePattern::CosMinus};
}

ModeBasis::ModeBasis(std::shared_ptr<const TorusImmersion> base, int n, int K,
                     bool include_constant, bool include_invariance)
    : base_(std::move(base)), n_(n), K_(K) {
  if (include_constant) {
    BasisSlot c;
    c.constant = true;
    slots_.push_back(c);
    grids_.emplace_back(static_cast<std::size_t>(n) * n, 1.0);
  }
  for (int k = 0; k <= K; ++k) {
    for (int l = 0; l <= K; ++l) {
      if (k == 0 && l == 0) continue;
      if (!include_invariance && is_invariance_mode(k, l)) continue;
      for (ModePattern p : patterns_for(k, l)) {
        BasisSlot s{k, l, p, false};
        slots_.push_back(s);
        grids_.push_back(mode_normal_field(pattern_mode(k, l, p), base_, n).phi);
      }
    }
  }
}

std::vector<double> ModeBasis::field(const Eigen::VectorXd& x) const {
  std::vector<double> phi(static_cast<std::size_t>(n_) * n_, 0.0);
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    double c = x[static_cast<Eigen::Index>(s)];
    if (c == 0.0) continue;
    const auto& g = grids_[s];
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] += c * g[i];
  }
  return phi;
}

std::vector<FourierMode> ModeBasis::to_modes(const Eigen::VectorXd& x, double* constant) const {
  std::vector<FourierMode> out;
  if (constant) *constant = 0.0;
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    const BasisSlot& sl = slots_[s];
    double c = x[static_cast<Eigen::Index>(s)];
    if (sl.constant) {
      if (constant) *constant = c;
      continue;
    }
    FourierMode m = sl.mode(c);
    if (out.empty() || out.back().k != sl.k || out.back().l != sl.l) {
      out.push_back(m);
    } else {
      out.back().c_sc += m.c_sc;
      out.back().c_cs += m.c_cs;
      out.back().c_cc += m.c_cc;
      out.back().c_ss += m.c_ss;
    }
  }
  return out;
}

Eigen::VectorXd ModeBasis::from_modes(const std::vector<FourierMode>& modes,
                                      double constant) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(slots_.size()));
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    const BasisSlot& sl = slots_[s];
    if (sl.constant) {
      x[static_cast<Eigen::Index>(s)] = constant;
      continue;
    }
    for (const FourierMode& m : modes) {
      if (m.k != sl.k || m.l != sl.l) continue;
      // Patterns are orthogonal in coefficient space; boundary modes use the
      // active coefficients only.
      FourierMode p = pattern_mode(sl.k, sl.l, sl.pattern);
      double dotp = m.c_sc * p.c_sc + m.c_cs * p.c_cs + m.c_cc * p.c_cc + m.c_ss * p.c_ss;
      double pn = p.c_sc * p.c_sc + p.c_cs * p.c_cs + p.c_cc * p.c_cc + p.c_ss * p.c_ss;
      if (sl.k == 0) {
        dotp = sl.pattern == ModePattern::SinPlus ? m.c_cs : m.c_cc;
        pn = 1.0;
      } else if (sl.l == 0) {
        dotp = sl.pattern == ModePattern::SinPlus ? m.c_sc : m.c_cc;
        pn = 1.0;
      }
      x[static_cast<Eigen::Index>(s)] += dotp / pn;
    }
  }
  return x;
}

EvaluatorPool::EvaluatorPool(const TorusImmersion& base, int n, int threads, double cg_tol) {
  int t = std::max(1, threads);
  for (int i = 0; i < t; ++i) {
    pool_.push_back(std::make_unique<PerturbationEvaluator>(base, n, cg_tol));
  }
}

ProbeGradients probe_gradients(EvaluatorPool& pool, const ModeBasis& basis,
                               const Eigen::VectorXd& x, double h, bool richardson) {
  const std::size_t d = basis.size();
  std::vector<double> phi0 = basis.field(x);
  ProbeGradients out;
  out.dW.resize(static_cast<Eigen::Index>(d));
  out.dPi1.resize(static_cast<Eigen::Index>(d));
  out.dPi2.resize(static_cast<Eigen::Index>(d));
  int workers = pool.threads();
  parallel_for(static_cast<std::size_t>(workers), workers, [&](std::size_t w) {
    PerturbationEvaluator& ev = pool.at(w);
    std::vector<double> phi(phi0.size());
    for (std::size_t s = d * w / workers; s < d * (w + 1) / workers; ++s) {
      const auto& g = basis.grid(s);
      auto central = [&](double step) {
        for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = phi0[i] + step * g[i];
        FunctionalValues plus = ev.evaluate(phi);
        for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = phi0[i] - step * g[i];
        FunctionalValues minus = ev.evaluate(phi);
        return FunctionalValues{(plus.W - minus.W) / (2.0 * step),
                                (plus.pi1 - minus.pi1) / (2.0 * step),
                                (plus.pi2 - minus.pi2) / (2.0 * step)};
      };
      FunctionalValues d1 = central(h);
      if (richardson) {
        FunctionalValues d2 = central(h / 2.0);
        d1 = {(4.0 * d2.W - d1.W) / 3.0, (4.0 * d2.pi1 - d1.pi1) / 3.0,
              (4.0 * d2.pi2 - d1.pi2) / 3.0};
      }
      auto e = static_cast<Eigen::Index>(s);
      out.dW[e] = d1.W;
      out.dPi1[e] = d1.pi1;
      out.dPi2[e] = d1.pi2;
    }
  });
  return out;
}

MultiplierFit fit_multipliers(const ProbeGradients& g) {
  MultiplierFit fit;
  double n2 = g.dPi2.norm();
  double nw = g.dW.norm();
  Eigen::VectorXd p1_perp = g.dPi1;
  if (n2 > 0.0) p1_perp -= (g.dPi1.dot(g.dPi2) / (n2 * n2)) * g.dPi2;
  fit.alpha_determined = p1_perp.norm() > 1e-6 * std::max(1.0, n2);
  Eigen::VectorXd resid;
  if (fit.alpha_determined) {
    Eigen::MatrixXd a(g.dW.size(), 2);
    a.col(0) = g.dPi1;
    a.col(1) = g.dPi2;
    Eigen::Vector2d sol = a.colPivHouseholderQr().solve(g.dW);
    fit.alpha = sol[0];
    fit.beta = sol[1];
    resid = g.dW - a * sol;
  } else {
    fit.alpha = std::numeric_limits<double>::quiet_NaN();
    fit.beta = n2 > 0.0 ? g.dW.dot(g.dPi2) / (n2 * n2) : 0.0;
    resid = g.dW - fit.beta * g.dPi2;
  }
  fit.residual = nw > 0.0 ? resid.norm() / nw : resid.norm();
  return fit;
}

}  // namespace willmore
