#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "willmore/fourier_mode.hpp"
#include "willmore/lattice.hpp"

namespace willmore {

using Vec4 = Eigen::Vector4d;

// Four scalar grids stored component-wise.
struct Field4 {
  std::array<std::vector<double>, 4> c;

  void resize(std::size_t n) {
    for (auto& v : c) v.assign(n, 0.0);
  }
  std::size_t size() const { return c[0].size(); }
  Vec4 at(std::size_t i) const { return {c[0][i], c[1][i], c[2][i], c[3][i]}; }
  void set(std::size_t i, const Vec4& v) {
    for (int k = 0; k < 4; ++k) c[k][i] = v[k];
  }
};

// Radii of the product torus with s/r = b on the unit sphere.
struct ProductRadii {
  double r;
  double s;
};
ProductRadii product_radii(double b);

// Immersion sampled with derivatives on the unit parameter square (u, v);
// the domain point is z = u * gen1 + v * gen2.
struct SurfaceSamples {
  int n = 0;
  Lattice domain;
  Field4 p, pu, pv, puu, puv, pvv;
};

enum class ImmersionKind { Homogeneous, Equivariant12, Perturbed, GridSampled };

class TorusImmersion {
 public:
  static TorusImmersion homogeneous(double b);
  static TorusImmersion equivariant12(double b);
  // Points on the n x n (u, v) grid of the given domain lattice.
  static TorusImmersion grid_sampled(const Lattice& domain, int n, Field4 points);
  static TorusImmersion perturbed(std::shared_ptr<const TorusImmersion> base,
                                  std::vector<double> phi, int n, double amplitude);

  ImmersionKind kind() const { return kind_; }
  const Lattice& domain() const { return domain_; }
  bool analytic() const {
    return kind_ == ImmersionKind::Homogeneous || kind_ == ImmersionKind::Equivariant12;
  }
  // Parameter b of analytic kinds and of perturbations of them.
  double b() const;
  // Grid resolution fixed by the data; 0 for analytic kinds.
  int native_grid() const { return native_n_; }
  const TorusImmersion* base() const { return base_.get(); }
  const std::vector<double>& phi() const { return phi_; }
  double amplitude() const { return amplitude_; }
  const Field4& grid_points() const { return grid_; }

  // Analytic kinds only.
  Vec4 evaluate(double x, double y) const;
  // Angles (t1, t2) of the image point on the product torus, analytic kinds only.
  std::array<double, 2> chart_angles(double x, double y) const;

  SurfaceSamples sample(int n) const;

 private:
  ImmersionKind kind_ = ImmersionKind::Homogeneous;
  Lattice domain_;
  double b_ = 1.0;
  double r_ = 0.0, s_ = 0.0;
  // Chart angles are phase * (x, y).
  Eigen::Matrix2d phase_ = Eigen::Matrix2d::Identity();
  int native_n_ = 0;
  Field4 grid_;
  std::shared_ptr<const TorusImmersion> base_;
  std::vector<double> phi_;
  double amplitude_ = 0.0;
};

struct GeometryFields {
  int n = 0;
  Lattice domain;
  // Components in the domain coordinates (x, y).
  std::vector<double> E, F, G, L, M, N2, H, K, dA;
  Field4 point;
  Field4 unit_normal;
};

GeometryFields fundamental_forms(const TorusImmersion& f, int n);
GeometryFields fundamental_forms(const SurfaceSamples& s);
double willmore_energy(const TorusImmersion& f, int n);
double willmore_energy(const GeometryFields& g);

// Pointwise geometry on the (u, v) chart. Normal oriented so that
// det[p, pu, pv, n] < 0.
struct PointGeometry {
  double E, F, G, L, M, N, H, K, sqrtg;
  Vec4 normal;
};
PointGeometry point_geometry(const Vec4& p, const Vec4& pu, const Vec4& pv,
                             const Vec4& puu, const Vec4& puv, const Vec4& pvv);
// X_l = eps_{ijkl} a_i b_j c_k, so that det[a, b, c, d] = d . X.
Vec4 cross4(const Vec4& a, const Vec4& b, const Vec4& c);

// Scalar normal speed Phi sampled on the (u, v) n-grid of ref.
struct NormalField {
  std::shared_ptr<const TorusImmersion> ref;
  int n = 0;
  std::vector<double> phi;
};

NormalField field_from_function(std::shared_ptr<const TorusImmersion> f, int n,
                                const std::function<double(double, double)>& phi_xy);
NormalField mode_normal_field(const FourierMode& m, std::shared_ptr<const TorusImmersion> f,
                              int n);
// Unit normals of f on its (u, v) n-grid.
Field4 unit_normals(const TorusImmersion& f, int n);

std::shared_ptr<const TorusImmersion> exp_normal(std::shared_ptr<const TorusImmersion> f,
                                                 const NormalField& v, double t);

// Pointwise cos(t Phi) p + sin(t Phi) n.
Field4 exp_points(const Field4& p, const Field4& normal, const std::vector<double>& phi,
                  double t);

}  // namespace willmore
