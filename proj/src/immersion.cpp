#include "willmore/immersion.hpp"

#include <cmath>
#include <numbers>

#include "willmore/errors.hpp"
#include "willmore/numerics.hpp"
#include "willmore/spectral_grid.hpp"

namespace willmore {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::Matrix2d jacobian(const Lattice& lat) {
  Eigen::Matrix2d j;
  j << lat.gen1.real(), lat.gen2.real(), lat.gen1.imag(), lat.gen2.imag();
  return j;
}

double det3(double a0, double a1, double a2, double b0, double b1, double b2, double c0,
            double c1, double c2) {
  return a0 * (b1 * c2 - b2 * c1) - a1 * (b0 * c2 - b2 * c0) + a2 * (b0 * c1 - b1 * c0);
}

void check_grid(int n) {
  if (n < 16 || n % 2 != 0) throw DomainError("grid size must be even and >= 16");
}

}  // namespace

ProductRadii product_radii(double b) {
  if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("b must be positive");
  double r = 1.0 / std::sqrt(1.0 + b * b);
  return {r, b * r};
}

TorusImmersion TorusImmersion::homogeneous(double b) {
  auto [r, s] = product_radii(b);
  TorusImmersion f;
  f.kind_ = ImmersionKind::Homogeneous;
  f.b_ = b;
  f.r_ = r;
  f.s_ = s;
  f.domain_ = make_lattice(Complex(kTwoPi * r, 0.0), Complex(0.0, kTwoPi * s));
  f.phase_ << 1.0 / r, 0.0, 0.0, 1.0 / s;
  return f;
}

TorusImmersion TorusImmersion::equivariant12(double b) {
  auto [r, s] = product_radii(b);
  double d = r * r + 4.0 * s * s;
  TorusImmersion f;
  f.kind_ = ImmersionKind::Equivariant12;
  f.b_ = b;
  f.r_ = r;
  f.s_ = s;
  f.domain_ = make_lattice(kTwoPi * Complex(2.0 * r * s, r * r) / d,
                           kTwoPi * Complex(-r * s, 2.0 * s * s) / d);
  f.phase_ << 2.0 * s / r, 1.0, -r / s, 2.0;
  return f;
}

TorusImmersion TorusImmersion::grid_sampled(const Lattice& domain, int n, Field4 points) {
  domain.validate();
  check_grid(n);
  if (points.size() != static_cast<std::size_t>(n) * n) {
    throw DomainError("grid immersion needs n*n points");
  }
  TorusImmersion f;
  f.kind_ = ImmersionKind::GridSampled;
  f.domain_ = domain;
  f.native_n_ = n;
  f.grid_ = std::move(points);
  return f;
}

TorusImmersion TorusImmersion::perturbed(std::shared_ptr<const TorusImmersion> base,
                                         std::vector<double> phi, int n, double amplitude) {
  if (!base) throw DomainError("perturbation needs a base immersion");
  check_grid(n);
  if (base->native_grid() != 0 && base->native_grid() != n) {
    throw DomainError("normal field grid does not match the base grid");
  }
  if (phi.size() != static_cast<std::size_t>(n) * n) {
    throw DomainError("normal field needs n*n samples");
  }
  TorusImmersion f;
  f.kind_ = ImmersionKind::Perturbed;
  f.domain_ = base->domain();
  f.native_n_ = n;
  f.base_ = std::move(base);
  f.phi_ = std::move(phi);
  f.amplitude_ = amplitude;
  return f;
}

double TorusImmersion::b() const {
  if (analytic()) return b_;
  if (kind_ == ImmersionKind::Perturbed) return base_->b();
  throw UnsupportedKind("grid-sampled immersion has no parameter b");
}

Vec4 TorusImmersion::evaluate(double x, double y) const {
  if (!analytic()) throw UnsupportedKind("pointwise evaluation needs an analytic immersion");
  auto t = chart_angles(x, y);
  return {r_ * std::cos(t[0]), r_ * std::sin(t[0]), s_ * std::cos(t[1]), s_ * std::sin(t[1])};
}

std::array<double, 2> TorusImmersion::chart_angles(double x, double y) const {
  if (!analytic()) throw UnsupportedKind("chart angles need an analytic immersion");
  Eigen::Vector2d t = phase_ * Eigen::Vector2d(x, y);
  return {t[0], t[1]};
}

SurfaceSamples TorusImmersion::sample(int n) const {
  check_grid(n);
  SurfaceSamples out;
  out.n = n;
  out.domain = domain_;
  std::size_t np = static_cast<std::size_t>(n) * n;
  for (Field4* fld : {&out.p, &out.pu, &out.pv, &out.puu, &out.puv, &out.pvv}) {
    fld->resize(np);
  }

  if (analytic()) {
    Eigen::Matrix2d q = phase_ * jacobian(domain_);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double u = static_cast<double>(i) / n, v = static_cast<double>(j) / n;
        double t1 = q(0, 0) * u + q(0, 1) * v;
        double t2 = q(1, 0) * u + q(1, 1) * v;
        double c1 = std::cos(t1), s1 = std::sin(t1), c2 = std::cos(t2), s2 = std::sin(t2);
        std::size_t idx = static_cast<std::size_t>(i) * n + j;
        out.p.set(idx, Vec4(r_ * c1, r_ * s1, s_ * c2, s_ * s2));
        Vec4 d1(-r_ * s1, r_ * c1, 0.0, 0.0), d2(0.0, 0.0, -s_ * s2, s_ * c2);
        Vec4 dd1(-r_ * c1, -r_ * s1, 0.0, 0.0), dd2(0.0, 0.0, -s_ * c2, -s_ * s2);
        out.pu.set(idx, q(0, 0) * d1 + q(1, 0) * d2);
        out.pv.set(idx, q(0, 1) * d1 + q(1, 1) * d2);
        out.puu.set(idx, q(0, 0) * q(0, 0) * dd1 + q(1, 0) * q(1, 0) * dd2);
        out.puv.set(idx, q(0, 0) * q(0, 1) * dd1 + q(1, 0) * q(1, 1) * dd2);
        out.pvv.set(idx, q(0, 1) * q(0, 1) * dd1 + q(1, 1) * q(1, 1) * dd2);
      }
    }
    return out;
  }

  if (n != native_n_) throw DomainError("sampled immersion is only available at its grid size");
  if (kind_ == ImmersionKind::GridSampled) {
    out.p = grid_;
  } else {
    SurfaceSamples bs = base_->sample(n);
    GeometryFields bg = fundamental_forms(bs);
    out.p = exp_points(bs.p, bg.unit_normal, phi_, amplitude_);
  }
  SpectralGrid grid(n);
  for (int c = 0; c < 4; ++c) {
    grid.derivatives(out.p.c[c].data(), out.pu.c[c].data(), out.pv.c[c].data(),
                     out.puu.c[c].data(), out.puv.c[c].data(), out.pvv.c[c].data());
  }
  return out;
}

Vec4 cross4(const Vec4& a, const Vec4& b, const Vec4& c) {
  Vec4 x;
  for (int l = 0; l < 4; ++l) {
    int cols[3];
    int m = 0;
    for (int k = 0; k < 4; ++k) {
      if (k != l) cols[m++] = k;
    }
    double minor = det3(a[cols[0]], a[cols[1]], a[cols[2]], b[cols[0]], b[cols[1]], b[cols[2]],
                        c[cols[0]], c[cols[1]], c[cols[2]]);
    x[l] = ((3 + l) % 2 == 0) ? minor : -minor;
  }
  return x;
}

PointGeometry point_geometry(const Vec4& p, const Vec4& pu, const Vec4& pv, const Vec4& puu,
                             const Vec4& puv, const Vec4& pvv) {
  PointGeometry g;
  g.E = pu.dot(pu);
  g.F = pu.dot(pv);
  g.G = pv.dot(pv);
  double det = g.E * g.G - g.F * g.F;
  if (!(det > 1e-12 * g.E * g.G) || !(det > 0.0)) {
    throw DegenerateImmersion("induced metric is degenerate (EG - F^2 <= 0)");
  }
  Vec4 x = cross4(p, pu, pv);
  g.normal = -x / x.norm();
  g.L = puu.dot(g.normal);
  g.M = puv.dot(g.normal);
  g.N = pvv.dot(g.normal);
  g.H = (g.E * g.N - 2.0 * g.F * g.M + g.G * g.L) / (2.0 * det);
  g.K = (g.L * g.N - g.M * g.M) / det + 1.0;
  g.sqrtg = std::sqrt(det);
  return g;
}

GeometryFields fundamental_forms(const SurfaceSamples& s) {
  const int n = s.n;
  std::size_t np = static_cast<std::size_t>(n) * n;
  GeometryFields out;
  out.n = n;
  out.domain = s.domain;
  for (auto* v : {&out.E, &out.F, &out.G, &out.L, &out.M, &out.N2, &out.H, &out.K, &out.dA}) {
    v->resize(np);
  }
  out.point = s.p;
  out.unit_normal.resize(np);
  Eigen::Matrix2d jinv = jacobian(s.domain).inverse();
  double jdet = std::abs(jacobian(s.domain).determinant());
  for (std::size_t i = 0; i < np; ++i) {
    PointGeometry g = point_geometry(s.p.at(i), s.pu.at(i), s.pv.at(i), s.puu.at(i),
                                     s.puv.at(i), s.pvv.at(i));
    Eigen::Matrix2d first, second;
    first << g.E, g.F, g.F, g.G;
    second << g.L, g.M, g.M, g.N;
    Eigen::Matrix2d fx = jinv.transpose() * first * jinv;
    Eigen::Matrix2d sx = jinv.transpose() * second * jinv;
    out.E[i] = fx(0, 0);
    out.F[i] = fx(0, 1);
    out.G[i] = fx(1, 1);
    out.L[i] = sx(0, 0);
    out.M[i] = sx(0, 1);
    out.N2[i] = sx(1, 1);
    out.H[i] = g.H;
    out.K[i] = g.K;
    out.dA[i] = g.sqrtg / jdet;
    out.unit_normal.set(i, g.normal);
  }
  return out;
}

GeometryFields fundamental_forms(const TorusImmersion& f, int n) {
  return fundamental_forms(f.sample(n));
}

double willmore_energy(const GeometryFields& g) {
  std::vector<double> w(g.H.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = (g.H[i] * g.H[i] + 1.0) * g.dA[i];
  return std::abs(g.domain.oriented_area()) * mean(w);
}

double willmore_energy(const TorusImmersion& f, int n) {
  return willmore_energy(fundamental_forms(f, n));
}

Field4 unit_normals(const TorusImmersion& f, int n) {
  return fundamental_forms(f, n).unit_normal;
}

NormalField field_from_function(std::shared_ptr<const TorusImmersion> f, int n,
                                const std::function<double(double, double)>& phi_xy) {
  check_grid(n);
  NormalField v;
  v.n = n;
  v.phi.resize(static_cast<std::size_t>(n) * n);
  const Lattice& d = f->domain();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Complex z = (static_cast<double>(i) / n) * d.gen1 + (static_cast<double>(j) / n) * d.gen2;
      v.phi[static_cast<std::size_t>(i) * n + j] = phi_xy(z.real(), z.imag());
    }
  }
  v.ref = std::move(f);
  return v;
}

NormalField mode_normal_field(const FourierMode& m, std::shared_ptr<const TorusImmersion> f,
                              int n) {
  m.validate();
  if (!f->analytic()) {
    throw UnsupportedKind("mode fields need a homogeneous or (1,2)-equivariant torus");
  }
  const TorusImmersion* fp = f.get();
  return field_from_function(std::move(f), n, [&](double x, double y) {
    auto t = fp->chart_angles(x, y);
    return m.value(t[0], t[1]);
  });
}

Field4 exp_points(const Field4& p, const Field4& normal, const std::vector<double>& phi,
                  double t) {
  Field4 out;
  out.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    double c = std::cos(t * phi[i]), s = std::sin(t * phi[i]);
    for (int k = 0; k < 4; ++k) out.c[k][i] = c * p.c[k][i] + s * normal.c[k][i];
  }
  return out;
}

std::shared_ptr<const TorusImmersion> exp_normal(std::shared_ptr<const TorusImmersion> f,
                                                 const NormalField& v, double t) {
  if (v.ref.get() != f.get()) {
    throw DomainError("normal field belongs to a different immersion");
  }
  if (t == 0.0) return f;
  return std::make_shared<const TorusImmersion>(
      TorusImmersion::perturbed(std::move(f), v.phi, v.n, t));
}

}  // namespace willmore
