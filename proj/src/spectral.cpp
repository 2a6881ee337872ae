#include "qww/spectral.hpp"

#include <cmath>
#include <mutex>

#include <fftw3.h>

namespace qww {

namespace {

// Exact twiddles e^{+i 2 pi r / n}, r = 0..n-1.
std::vector<cplx> twiddles(std::size_t n) {
  std::vector<cplx> t(n);
  for (std::size_t r = 0; r < n; ++r)
    t[r] = std::polar(1.0, 2.0 * pi * static_cast<double>(r) / static_cast<double>(n));
  return t;
}

std::vector<cplx> periodic_d1(std::span<const cplx> f) {
  const std::size_t n = f.size();
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (f[(i + 1) % n] - f[(i + n - 1) % n]);
  return out;
}

std::vector<cplx> periodic_d2(std::span<const cplx> f) {
  const std::size_t n = f.size();
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (f[(i + 1) % n] + f[(i + n - 1) % n] - 2.0 * f[i]);
  return out;
}

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

BrillouinGrid::BrillouinGrid(std::size_t n) : n_(n) {
  if (n == 0) throw PreconditionError("Brillouin grid needs at least one mode");
}

long BrillouinGrid::signed_index(std::size_t m) const {
  const long mm = static_cast<long>(m);
  const long n = static_cast<long>(n_);
  return 2 * mm <= n ? mm : mm - n;
}

double BrillouinGrid::k(std::size_t m) const {
  return 2.0 * pi * static_cast<double>(signed_index(m)) / static_cast<double>(n_);
}

std::vector<double> BrillouinGrid::values() const {
  std::vector<double> v(n_);
  for (std::size_t m = 0; m < n_; ++m) v[m] = k(m);
  return v;
}

bool BrillouinGrid::tan_singular(std::size_t m) const { return 4 * m == n_ || 4 * m == 3 * n_; }

SpectralField dft_forward(std::span<const cplx> h) {
  const std::size_t n = h.size();
  if (n == 0) throw PreconditionError("dft_forward of an empty sequence");
  const auto tw = twiddles(n);
  SpectralField out{BrillouinGrid(n), std::vector<cplx>(n)};
  for (std::size_t m = 0; m < n; ++m) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += tw[(m * i) % n] * h[i];
    out.amp[m] = s;
  }
  return out;
}

std::vector<cplx> dft_inverse(const SpectralField& hhat, std::size_t expected_size) {
  const std::size_t n = hhat.grid.size();
  if (n == 0 || hhat.amp.size() != n) throw PreconditionError("spectral field does not match its grid");
  if (expected_size != 0 && expected_size != n)
    throw PreconditionError("grid mismatch: spectral field has " + std::to_string(n) + " modes, expected " +
                            std::to_string(expected_size));
  const auto tw = twiddles(n);
  std::vector<cplx> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx s = 0.0;
    for (std::size_t m = 0; m < n; ++m) s += std::conj(tw[(m * i) % n]) * hhat.amp[m];
    h[i] = s / static_cast<double>(n);
  }
  return h;
}

cplx pair(std::span<const cplx> f, std::span<const cplx> h) {
  if (f.size() != h.size()) throw PreconditionError("pair: length mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * h[i];
  return s;
}

cplx pair_spectral(const SpectralField& fhat, const SpectralField& hhat) {
  if (!(fhat.grid == hhat.grid)) throw PreconditionError("pair_spectral: grid mismatch");
  return pair(fhat.amp, hhat.amp) / static_cast<double>(fhat.grid.size());
}

ResidualReport spectral_derivative_check(std::span<const cplx> f) {
  const std::size_t n = f.size();
  const SpectralField fh = dft_forward(f);
  const SpectralField Fh = dft_forward(periodic_d1(f));
  const SpectralField gh = dft_forward(periodic_d2(f));
  const auto dd = periodic_d1(periodic_d1(f));
  const SpectralField gh_wrong = dft_forward(dd);

  NormAccumulator sin_form, tan_form, tan_wrong;
  std::size_t masked = 0;
  for (std::size_t m = 0; m < n; ++m) {
    const double k = fh.grid.k(m);
    sin_form.add(Fh.amp[m] - (-I * std::sin(k) * fh.amp[m]));
    if (fh.grid.tan_singular(m)) {
      ++masked;
      continue;
    }
    const double t = std::tan(k);
    tan_form.add(Fh.amp[m] - (-I * t * (fh.amp[m] + gh.amp[m])));
    tan_wrong.add(Fh.amp[m] - (-I * t * (fh.amp[m] + gh_wrong.amp[m])));
  }
  ResidualReport rep("spectral_derivative_check");
  rep.add("sin_form", sin_form);
  rep.add("tan_form", tan_form);
  rep.add("tan_form_DnDn", tan_wrong);
  rep.note("tan_masked", std::to_string(masked));
  rep.note("g_definition", "g = D_nn f (half-normalised second difference); g = D_n D_n f does not satisfy the tan form");
  return rep;
}

SpectralField continuum_derivative_expansion(const SpectralField& fhat, double eps, int order) {
  if (order < 0 || order > 2) throw PreconditionError("continuum derivative expansion supports orders 0..2");
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  SpectralField out{fhat.grid, std::vector<cplx>(fhat.amp.size())};
  for (std::size_t m = 0; m < fhat.amp.size(); ++m) {
    const double K = fhat.grid.k(m) / eps;
    const double factor = order == 2 ? 1.0 - 2.0 * eps * eps * K * K / 3.0 : 1.0;
    out.amp[m] = -I * K * factor * fhat.amp[m];
  }
  return out;
}

cplx fourier_der1_symbol(double K, double eps) {
  return -I * std::tan(eps * K) * (1.0 - eps * eps * K * K) / eps;
}

cplx lattice_derivative_symbol(double K, double eps) { return -I * std::sin(eps * K) / eps; }

struct Fft2::Plan {
  fftw_plan plan = nullptr;
};

Fft2::Fft2(std::size_t rows, std::size_t cols, std::size_t batch)
    : rows_(rows), cols_(cols), batch_(batch), plan_(std::make_unique<Plan>()) {
  if (rows == 0 || cols == 0 || batch == 0) throw PreconditionError("Fft2 with empty extent");
  std::vector<cplx> scratch(rows * cols * batch);
  const int n[2] = {static_cast<int>(rows), static_cast<int>(cols)};
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard lock(planner_mutex());
  plan_->plan = fftw_plan_many_dft(2, n, static_cast<int>(batch), buf, nullptr, static_cast<int>(batch), 1, buf,
                                   nullptr, static_cast<int>(batch), 1, FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan_->plan) throw std::runtime_error("FFTW could not create a 2-D plan");
}

Fft2::~Fft2() {
  if (plan_ && plan_->plan) {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_->plan);
  }
}

void Fft2::forward(std::span<cplx> data) const {
  if (data.size() != rows_ * cols_ * batch_) throw PreconditionError("Fft2: buffer size mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan_->plan, buf, buf);
}

void dft2_plain(std::span<cplx> data, std::size_t rows, std::size_t cols, std::size_t batch) {
  if (data.size() != rows * cols * batch) throw PreconditionError("dft2_plain: buffer size mismatch");
  const auto tr = twiddles(rows);
  const auto tc = twiddles(cols);
  std::vector<cplx> tmp(std::max(rows, cols));
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t m = 0; m < cols; ++m) {
        cplx s = 0.0;
        for (std::size_t c = 0; c < cols; ++c) s += tc[(m * c) % cols] * data[(r * cols + c) * batch + b];
        tmp[m] = s;
      }
      for (std::size_t m = 0; m < cols; ++m) data[(r * cols + m) * batch + b] = tmp[m];
    }
    for (std::size_t c = 0; c < cols; ++c) {
      for (std::size_t m = 0; m < rows; ++m) {
        cplx s = 0.0;
        for (std::size_t r = 0; r < rows; ++r) s += tr[(m * r) % rows] * data[(r * cols + c) * batch + b];
        tmp[m] = s;
      }
      for (std::size_t m = 0; m < rows; ++m) data[(m * cols + c) * batch + b] = tmp[m];
    }
  }
}

}  // namespace qww
