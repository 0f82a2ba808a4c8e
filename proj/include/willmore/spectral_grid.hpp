#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace willmore {

// FFT-based periodic calculus on an n x n grid over the unit square.
// Fields are row-major with index i * n + j, i along u and j along v.
// Spectra use the real-to-complex half layout, index i * (n/2 + 1) + j.
class SpectralGrid {
 public:
  using Complex = std::complex<double>;

  explicit SpectralGrid(int n);
  ~SpectralGrid();
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  int n() const { return n_; }
  std::size_t points() const { return static_cast<std::size_t>(n_) * n_; }
  std::size_t modes() const { return static_cast<std::size_t>(n_) * (n_ / 2 + 1); }
  int half() const { return n_ / 2 + 1; }

  // Unnormalized forward transform.
  void forward(const double* field, Complex* spectrum);
  // Inverse transform including the 1/n^2 factor, so inverse(forward(f)) = f.
  void inverse(const Complex* spectrum, double* field);

  // Angular wavenumbers 2*pi*k on the unit square. First-derivative versions
  // drop the Nyquist mode so that differentiation stays real and skew.
  double ku(int i) const { return ku_[static_cast<std::size_t>(i)]; }
  double kv(int j) const { return kv_[static_cast<std::size_t>(j)]; }
  double ku_full(int i) const { return ku_full_[static_cast<std::size_t>(i)]; }
  double kv_full(int j) const { return kv_full_[static_cast<std::size_t>(j)]; }

  // Any output pointer may be null.
  void derivatives(const double* f, double* fu, double* fv, double* fuu,
                   double* fuv, double* fvv);

  // Weight of a half-spectrum column in Parseval sums (1 or 2).
  double column_weight(int j) const { return (j == 0 || 2 * j == n_) ? 1.0 : 2.0; }

 private:
  void apply_derivative(int kind, double* out);

  int n_;
  double* real_buf_ = nullptr;
  Complex* cplx_buf_ = nullptr;
  void* plan_r2c_ = nullptr;
  void* plan_c2r_ = nullptr;
  std::vector<double> ku_, kv_, ku_full_, kv_full_;
  std::vector<Complex> spec_;
};

}  // namespace willmore
