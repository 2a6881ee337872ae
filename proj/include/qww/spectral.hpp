#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "qww/report.hpp"
#include "qww/types.hpp"

namespace qww {

/// Wave numbers k_m = 2 pi m' / n in (-pi, pi], stored in DFT index order
/// (m' = m for m <= n/2, m - n otherwise).
class BrillouinGrid {
 public:
  BrillouinGrid() = default;
  explicit BrillouinGrid(std::size_t n);

  std::size_t size() const { return n_; }
  double k(std::size_t m) const;
  /// Signed integer m' with k = 2 pi m' / n.
  long signed_index(std::size_t m) const;
  std::vector<double> values() const;
  /// |k_m| == pi/2 exactly (only possible for n divisible by 4).
  bool tan_singular(std::size_t m) const;

  bool operator==(const BrillouinGrid&) const = default;

 private:
  std::size_t n_ = 0;
};

struct SpectralField {
  BrillouinGrid grid;
  std::vector<cplx> amp;
};

/// hat h(k_m) = sum_n exp(+i k_m n) h_n. The +i kernel is used project-wide.
SpectralField dft_forward(std::span<const cplx> h);

/// h_n = (1/N) sum_m exp(-i k_m n) hat h(k_m). `expected_size` of 0 skips the
/// grid check.
std::vector<cplx> dft_inverse(const SpectralField& hhat, std::size_t expected_size = 0);

/// Bilinear pairing <f, h> = sum_n f_n h_n.
cplx pair(std::span<const cplx> f, std::span<const cplx> h);

/// Pairing on the spectral side, (1/N) sum_m fhat(k_m) hhat(k_m); equals
/// sum_n f_n h_{-n}.
cplx pair_spectral(const SpectralField& fhat, const SpectralField& hhat);

/// Checks the transform of F = D_n f on a periodic sequence against
///   "sin_form":  -i sin(k) fhat
///   "tan_form":  -i tan(k) (fhat + ghat), g = D_nn f, at |k| != pi/2
///   "tan_form_DnDn": same with g = D_n D_n f (expected to fail; recorded)
/// Notes: "tan_masked" (count of excluded grid points), "g_definition".
ResidualReport spectral_derivative_check(std::span<const cplx> f);

/// Continuum derivative of a sampled function in the scaled variable
/// K = k / eps: order 0/1 -> -i K fhat, order 2 -> -i K (1 - 2 eps^2 K^2 / 3) fhat.
SpectralField continuum_derivative_expansion(const SpectralField& fhat, double eps, int order);

/// -i tan(eps K) (1 - eps^2 K^2) / eps: the symbol of
/// eps fhat' = -i tan(eps K) (fhat + eps^2 fhat'') with fhat'' = -K^2 fhat.
cplx fourier_der1_symbol(double K, double eps);

/// -i sin(eps K) / eps: the exact symbol of D_n / eps.
cplx lattice_derivative_symbol(double K, double eps);

/// In-place 2-D transform with the +i kernel over (rows, cols), applied to
/// `batch` interleaved components (element (r, c, b) at (r * cols + c) * batch + b).
class Fft2 {
 public:
  Fft2(std::size_t rows, std::size_t cols, std::size_t batch);
  ~Fft2();
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t batch() const { return batch_; }

  void forward(std::span<cplx> data) const;

 private:
  std::size_t rows_, cols_, batch_;
  struct Plan;
  std::unique_ptr<Plan> plan_;
};

/// Reference O(rows cols (rows + cols)) transform with fixed summation order.
void dft2_plain(std::span<cplx> data, std::size_t rows, std::size_t cols, std::size_t batch);

}  // namespace qww
