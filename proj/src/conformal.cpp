#include "willmore/conformal.hpp"

#include <cmath>

#include "willmore/errors.hpp"
#include "willmore/numerics.hpp"

namespace willmore {

namespace {

const Complex kI(0.0, 1.0);

Eigen::Matrix2d jacobian(const Lattice& lat) {
  Eigen::Matrix2d j;
  j << lat.gen1.real(), lat.gen2.real(), lat.gen1.imag(), lat.gen2.imag();
  return j;
}

}  // namespace

void MetricGrid::validate() const {
  std::size_t np = static_cast<std::size_t>(n) * n;
  if (n < 4 || E.size() != np || F.size() != np || G.size() != np) {
    throw DomainError("metric grid has inconsistent size");
  }
  for (std::size_t i = 0; i < np; ++i) {
    if (!(E[i] * G[i] - F[i] * F[i] > 0.0) || !(E[i] > 0.0)) {
      throw DegenerateImmersion("metric grid is not positive definite");
    }
  }
}

MetricGrid metric_from_geometry(const GeometryFields& g) { return {g.n, g.E, g.F, g.G}; }

MetricGrid flat_metric(const Lattice& ref, int n) {
  ref.validate();
  std::size_t np = static_cast<std::size_t>(n) * n;
  return {n, std::vector<double>(np, 1.0), std::vector<double>(np, 0.0),
          std::vector<double>(np, 1.0)};
}

ConformalProjector::ConformalProjector(int n, double tol, int max_iterations)
    : grid_(n), tol_(tol), max_iterations_(max_iterations > 0 ? max_iterations : 10 * n) {
  std::size_t np = grid_.points(), nm = grid_.modes();
  for (auto* v : {&auu_, &auv_, &avv_, &gu_, &gv_, &fu_, &fv_}) v->assign(np, 0.0);
  for (auto* v : {&spec_u_, &spec_v_, &tmp_}) v->assign(nm, Complex());
}

double ConformalProjector::dot(const std::vector<Complex>& a,
                               const std::vector<Complex>& b) const {
  const int n = grid_.n(), h = grid_.half();
  std::vector<double> rows(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < h; ++j) {
      std::size_t idx = static_cast<std::size_t>(i) * h + j;
      s += grid_.column_weight(j) * (a[idx].real() * b[idx].real() + a[idx].imag() * b[idx].imag());
    }
    rows[static_cast<std::size_t>(i)] = s;
  }
  return pairwise_sum(rows);
}

void ConformalProjector::gradient(const std::vector<Complex>& x, double* gu, double* gv) {
  const int n = grid_.n(), h = grid_.half();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < h; ++j) {
      std::size_t idx = static_cast<std::size_t>(i) * h + j;
      tmp_[idx] = kI * grid_.ku(i) * x[idx];
    }
  }
  grid_.inverse(tmp_.data(), gu);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < h; ++j) {
      std::size_t idx = static_cast<std::size_t>(i) * h + j;
      tmp_[idx] = kI * grid_.kv(j) * x[idx];
    }
  }
  grid_.inverse(tmp_.data(), gv);
}

void ConformalProjector::apply_operator(const std::vector<Complex>& x,
                                        std::vector<Complex>& out) {
  gradient(x, gu_.data(), gv_.data());
  std::size_t np = grid_.points();
  for (std::size_t p = 0; p < np; ++p) {
    fu_[p] = auu_[p] * gu_[p] + auv_[p] * gv_[p];
    fv_[p] = auv_[p] * gu_[p] + avv_[p] * gv_[p];
  }
  grid_.forward(fu_.data(), spec_u_.data());
  grid_.forward(fv_.data(), spec_v_.data());
  const int n = grid_.n(), h = grid_.half();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < h; ++j) {
      std::size_t idx = static_cast<std::size_t>(i) * h + j;
      out[idx] = -kI * (grid_.ku(i) * spec_u_[idx] + grid_.kv(j) * spec_v_[idx]);
    }
  }
}

void ConformalProjector::precondition(const std::vector<Complex>& r,
                                      std::vector<Complex>& z) const {
  const int n = grid_.n(), h = grid_.half();
  for (int i = 0; i < n; ++i) {
    double ku = grid_.ku(i);
    for (int j = 0; j < h; ++j) {
      double kv = grid_.kv(j);
      double sigma = mean_uu_ * ku * ku + 2.0 * mean_uv_ * ku * kv + mean_vv_ * kv * kv;
      std::size_t idx = static_cast<std::size_t>(i) * h + j;
      z[idx] = sigma > 0.0 ? r[idx] / sigma : Complex();
    }
  }
}

ProjectionResult ConformalProjector::solve_uv(const double* E, const double* F,
                                              const double* G) {
  const std::size_t np = grid_.points(), nm = grid_.modes();
  const int n = grid_.n(), h = grid_.half();
  double a_norm2 = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    double det = E[p] * G[p] - F[p] * F[p];
    if (!(det > 0.0)) throw DegenerateImmersion("metric is not positive definite");
    double sg = std::sqrt(det);
    auu_[p] = G[p] / sg;
    auv_[p] = -F[p] / sg;
    avv_[p] = E[p] / sg;
    a_norm2 += auu_[p] * auu_[p] + auv_[p] * auv_[p] + avv_[p] * avv_[p];
  }
  mean_uu_ = mean(auu_);
  mean_uv_ = mean(auv_);
  mean_vv_ = mean(avv_);

  // Right-hand side div(A e_u).
  std::vector<Complex> b(nm), x(nm), r(nm), z(nm), p(nm), q(nm);
  grid_.forward(auu_.data(), spec_u_.data());
  grid_.forward(auv_.data(), spec_v_.data());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < h; ++j) {
      std::size_t idx = static_cast<std::size_t>(i) * h + j;
      b[idx] = kI * (grid_.ku(i) * spec_u_[idx] + grid_.kv(j) * spec_v_[idx]);
    }
  }
  // Rounding floor: spectral norm of div(A e_u) cannot exceed pi n^2 |A|.
  double floor = 1e-15 * M_PI * n * static_cast<double>(n) * std::sqrt(a_norm2);
  double b_norm = std::sqrt(dot(b, b));
  r = b;
  double r_norm = b_norm;
  int iterations = 0;
  if (r_norm > floor) {
    precondition(r, z);
    p = z;
    double rz = dot(r, z);
    while (true) {
      if (r_norm <= tol_ * b_norm || r_norm <= floor) break;
      if (iterations >= max_iterations_) {
        throw NumericalFailure("conformal solver did not converge", r_norm / b_norm);
      }
      apply_operator(p, q);
      double pq = dot(p, q);
      if (!(pq > 0.0)) {
        throw NumericalFailure("conformal solver lost positivity", r_norm / b_norm);
      }
      double alpha = rz / pq;
      for (std::size_t k = 0; k < nm; ++k) {
        x[k] += alpha * p[k];
        r[k] -= alpha * q[k];
      }
      ++iterations;
      r_norm = std::sqrt(dot(r, r));
      precondition(r, z);
      double rz_new = dot(r, z);
      double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t k = 0; k < nm; ++k) p[k] = z[k] + beta * p[k];
    }
  }

  gradient(x, gu_.data(), gv_.data());
  for (std::size_t k = 0; k < np; ++k) {
    double wu = 1.0 + gu_[k], wv = gv_[k];
    fu_[k] = auu_[k] * wu * wu + 2.0 * auv_[k] * wu * wv + avv_[k] * wv * wv;
    fv_[k] = -(auv_[k] * wu + avv_[k] * wv);
  }
  double c2 = mean(fu_);
  double c1 = mean(fv_);
  ProjectionResult out;
  out.tau = kI * c2 / (1.0 + kI * c1);
  out.point = marked_chart(out.tau);
  out.iterations = iterations;
  out.residual = b_norm > 0.0 ? r_norm / b_norm : 0.0;
  return out;
}

ProjectionResult project_conformal_class_detailed(const MetricGrid& m, const Lattice& ref,
                                                  double tol) {
  m.validate();
  ref.validate();
  Eigen::Matrix2d j = jacobian(ref);
  if (j.determinant() < 0.0) {
    // Orientation fix: use -gen2 so the (u, v) chart is positively oriented.
    Lattice flipped{ref.gen1, -ref.gen2};
    MetricGrid mm = m;
    // Sample (i, j) at -gen2 is sample (i, -j) of the original grid.
    const int n = m.n;
    for (int i = 0; i < n; ++i) {
      for (int jj = 0; jj < n; ++jj) {
        std::size_t dst = static_cast<std::size_t>(i) * n + jj;
        std::size_t src = static_cast<std::size_t>(i) * n + static_cast<std::size_t>((n - jj) % n);
        mm.E[dst] = m.E[src];
        mm.F[dst] = m.F[src];
        mm.G[dst] = m.G[src];
      }
    }
    return project_conformal_class_detailed(mm, flipped, tol);
  }
  const std::size_t np = static_cast<std::size_t>(m.n) * m.n;
  std::vector<double> eu(np), fu(np), gu(np);
  for (std::size_t p = 0; p < np; ++p) {
    Eigen::Matrix2d g;
    g << m.E[p], m.F[p], m.F[p], m.G[p];
    Eigen::Matrix2d guv = j.transpose() * g * j;
    eu[p] = guv(0, 0);
    fu[p] = guv(0, 1);
    gu[p] = guv(1, 1);
  }
  ConformalProjector proj(m.n, tol);
  return proj.solve_uv(eu.data(), fu.data(), gu.data());
}

TeichmullerPoint project_conformal_class(const MetricGrid& m, const Lattice& ref) {
  return project_conformal_class_detailed(m, ref).point;
}

TeichmullerPoint project_immersion(const TorusImmersion& f, int n) {
  GeometryFields g = fundamental_forms(f, n);
  return project_conformal_class(metric_from_geometry(g), g.domain);
}

std::pair<double, double> dPi_directional(std::shared_ptr<const TorusImmersion> f,
                                          const NormalField& v, double h) {
  auto pi_at = [&](double t) { return project_immersion(*exp_normal(f, v, t), v.n); };
  auto central = [&](double step) {
    TeichmullerPoint plus = pi_at(step), minus = pi_at(-step);
    return std::pair<double, double>{(plus.a - minus.a) / (2.0 * step),
                                     (plus.b - minus.b) / (2.0 * step)};
  };
  auto d1 = central(h);
  auto d2 = central(h / 2.0);
  return {(4.0 * d2.first - d1.first) / 3.0, (4.0 * d2.second - d1.second) / 3.0};
}

}  // namespace willmore
