#include "willmore/spectral_grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "willmore/errors.hpp"

namespace willmore {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

SpectralGrid::SpectralGrid(int n) : n_(n) {
  if (n < 4 || n % 2 != 0) throw DomainError("spectral grid size must be even and >= 4");
  std::size_t np = points();
  std::size_t nm = modes();
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    real_buf_ = fftw_alloc_real(np);
    cplx_buf_ = reinterpret_cast<Complex*>(fftw_alloc_complex(nm));
    auto* c = reinterpret_cast<fftw_complex*>(cplx_buf_);
    plan_r2c_ = fftw_plan_dft_r2c_2d(n, n, real_buf_, c, FFTW_ESTIMATE);
    plan_c2r_ = fftw_plan_dft_c2r_2d(n, n, c, real_buf_, FFTW_ESTIMATE);
  }
  const double two_pi = 2.0 * std::numbers::pi;
  ku_.resize(static_cast<std::size_t>(n));
  ku_full_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int k = i <= n / 2 ? i : i - n;
    ku_full_[static_cast<std::size_t>(i)] = two_pi * k;
    ku_[static_cast<std::size_t>(i)] = (2 * i == n) ? 0.0 : two_pi * k;
  }
  kv_.resize(static_cast<std::size_t>(half()));
  kv_full_.resize(static_cast<std::size_t>(half()));
  for (int j = 0; j < half(); ++j) {
    kv_full_[static_cast<std::size_t>(j)] = two_pi * j;
    kv_[static_cast<std::size_t>(j)] = (2 * j == n) ? 0.0 : two_pi * j;
  }
  spec_.resize(nm);
}

SpectralGrid::~SpectralGrid() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_r2c_) fftw_destroy_plan(static_cast<fftw_plan>(plan_r2c_));
  if (plan_c2r_) fftw_destroy_plan(static_cast<fftw_plan>(plan_c2r_));
  fftw_free(real_buf_);
  fftw_free(cplx_buf_);
}

void SpectralGrid::forward(const double* field, Complex* spectrum) {
  std::copy(field, field + points(), real_buf_);
  fftw_execute(static_cast<fftw_plan>(plan_r2c_));
  std::copy(cplx_buf_, cplx_buf_ + modes(), spectrum);
}

void SpectralGrid::inverse(const Complex* spectrum, double* field) {
  std::copy(spectrum, spectrum + modes(), cplx_buf_);
  fftw_execute(static_cast<fftw_plan>(plan_c2r_));
  double scale = 1.0 / static_cast<double>(points());
  std::size_t np = points();
  for (std::size_t p = 0; p < np; ++p) field[p] = real_buf_[p] * scale;
}

// kind: 0 = d/du, 1 = d/dv, 2 = d2/du2, 3 = d2/dudv, 4 = d2/dv2
void SpectralGrid::apply_derivative(int kind, double* out) {
  const int h = half();
  const Complex I(0.0, 1.0);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < h; ++j) {
      std::size_t idx = static_cast<std::size_t>(i) * h + j;
      Complex m;
      switch (kind) {
        case 0: m = I * ku(i); break;
        case 1: m = I * kv(j); break;
        case 2: m = -ku_full(i) * ku_full(i); break;
        case 3: m = -ku(i) * kv(j); break;
        default: m = -kv_full(j) * kv_full(j); break;
      }
      cplx_buf_[idx] = m * spec_[idx];
    }
  }
  fftw_execute(static_cast<fftw_plan>(plan_c2r_));
  double scale = 1.0 / static_cast<double>(points());
  std::size_t np = points();
  for (std::size_t p = 0; p < np; ++p) out[p] = real_buf_[p] * scale;
}

void SpectralGrid::derivatives(const double* f, double* fu, double* fv, double* fuu,
                               double* fuv, double* fvv) {
  std::copy(f, f + points(), real_buf_);
  fftw_execute(static_cast<fftw_plan>(plan_r2c_));
  std::copy(cplx_buf_, cplx_buf_ + modes(), spec_.begin());
  double* outs[5] = {fu, fv, fuu, fuv, fvv};
  for (int kind = 0; kind < 5; ++kind) {
    if (outs[kind]) apply_derivative(kind, outs[kind]);
  }
}

}  // namespace willmore
