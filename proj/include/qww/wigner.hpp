#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qww/report.hpp"
#include "qww/spectral.hpp"
#include "qww/types.hpp"
#include "qww/walk.hpp"

namespace qww {

enum class TaperKind { none, gaussian, raised_cosine };

/// Weight profile over the relative time n_j.
struct Taper {
  TaperKind kind = TaperKind::none;
  double width = 0.0;  // gaussian standard deviation in steps

  double weight(long n, long half) const;
  std::string name() const;
};

/// Smallest half-window with gaussian edge weight below 1e-12.
long gaussian_half_window(double width);

/// rows x cols grid of 2x2 spin blocks, element (r, c, A, B).
class SpinGrid {
 public:
  SpinGrid() = default;
  SpinGrid(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), v_(rows * cols * 4) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  cplx& operator()(std::size_t r, std::size_t c, int a, int b) { return v_[(r * cols_ + c) * 4 + 2 * a + b]; }
  const cplx& operator()(std::size_t r, std::size_t c, int a, int b) const {
    return v_[(r * cols_ + c) * 4 + 2 * a + b];
  }
  Mat2 cell(std::size_t r, std::size_t c) const;
  void set_cell(std::size_t r, std::size_t c, const Mat2& m);
  std::span<cplx> data() { return v_; }
  std::span<const cplx> data() const { return v_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<cplx> v_;
};

/// (M |> W)^{AB} = M^B_C W^{AC}: spin matrices act on the second index.
inline Mat2 right_action(const Mat2& m, const Mat2& w) {
  Mat2 r;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) r(a, b) = m(b, 0) * w(a, 0) + m(b, 1) * w(a, 1);
  return r;
}

/// Omega^{AB}[p][n_j][n_p] = conj(Psi^A_{j0-n_j, p-n_p}) Psi^B_{j0+n_j, p+n_p} at base
/// time j0, n_j in [-half, half] (row n_j + half), n_p over the full period,
/// multiplied by the taper profile.
struct OmegaTensor {
  long j0 = 0;
  long half = 0;
  std::size_t sites = 0;
  Taper taper;
  std::vector<SpinGrid> slices;  // per p
  double edge_magnitude = 0.0;   // max |Omega| at |n_j| = half
  bool edge_warning = false;     // edge magnitude > 1e-12 without a taper

  std::size_t window() const { return static_cast<std::size_t>(2 * half + 1); }
};

/// Values over (p, k_j, k_p) at base time j0; k indices in DFT order.
struct PhaseField {
  long j0 = 0;
  long half = 0;
  std::size_t sites = 0;
  BrillouinGrid kj;
  BrillouinGrid kp;
  std::vector<SpinGrid> slices;       // per p, rows = k_j, cols = k_p
  std::vector<std::uint8_t> masked;   // per (k_j, k_p): tan factor singular

  bool is_masked(std::size_t r, std::size_t c) const { return !masked.empty() && masked[r * kp.size() + c]; }
};

using WignerField = PhaseField;

/// Throws unless j0 - half >= 1 and j0 + half <= J - 2 and the lattice is
/// periodic with even N >= 4.
void check_window(const SpinorHistory& history, long j0, long half);

OmegaTensor build_omega(const SpinorHistory& history, long j0, long half, const Taper& taper = {});

/// 2-axis forward transform (+i kernel) over (n_j, n_p) for every (p, A, B).
WignerField wigner_transform(const OmegaTensor& omega);

/// Convenience: build_omega + wigner_transform.
WignerField wigner_at(const SpinorHistory& history, long j0, long half, const Taper& taper = {});

/// Real-space audit of (D_j + D_{n_j}) Omega = 2 Psi*_- (D_j Psi)_+ and the
/// spatial analogue. Entries: time_printed, time_corrected, time_cross_check,
/// space_printed, space_corrected, space_cross_check. Notes time_exact, space_exact.
ResidualReport omega_derivative_audit(const SpinorHistory& history, long j0, long half,
                                      double tolerance = 1e-13);

enum class MaskPolicy { mask, forbid };

/// K_c = -i (tan k_j - tan k_p (U s3) |>) W. Masked cells (|k| = pi/2) hold 0.
PhaseField kc_term(const WignerField& w, double theta, MaskPolicy policy = MaskPolicy::mask);

/// K_s = transform of -i (tan k_j D_{n_j n_j} - tan k_p (U s3) |> D_{n_p n_p}) Omega,
/// with the second differences taken on the periodic window.
PhaseField ks_term(const OmegaTensor& omega, double theta, MaskPolicy policy = MaskPolicy::mask);

/// M_c = c_m (U - 1) |> W.
PhaseField mc_term(const WignerField& w, double theta, double mass_coeff = 1.0);

/// M_s = -2 transform of Psi*_- ((D_jj - U D_pp) Psi)_+.
PhaseField ms_term(const SpinorHistory& history, long j0, long half, double theta, const Taper& taper = {});

/// Walk data and its lattice derivatives over the times a window at j0 touches.
/// Psi is kept for t in [j0 - half - 1, j0 + half + 1]; derivatives and
/// Y = (D_jj - U D_pp) Psi for t in [j0 - half, j0 + half].
struct WindowData {
  WindowData(const SpinorHistory& history, long j0, long half, double theta);

  const SpinorHistory* history;
  long j0, half;
  std::size_t sites;
  Mat2 u, us3;
  std::vector<Spinor> dj, djj, dp, dpp, y;

  const Spinor& psi(long t, long x) const { return history->at(static_cast<std::size_t>(t), x); }
  std::size_t index(long t, long x) const;
};

struct PointOptions {
  bool derivatives = true;  // D_j W, D_p W and the closure
  bool second = true;  // second differences of g Omega along n_j and n_p
  bool ms = true;
  bool cross = true;
};

/// Everything the transport equation needs at one site p, already in (k_j, k_p).
struct PointTerms {
  SpinGrid w;        // W(j0, p)
  SpinGrid dj_w;     // D_j W
  SpinGrid dp_w;     // D_p W
  SpinGrid closure;  // transform of D^circ_{n_j}(g Omega) - g D_{n_j} Omega
  SpinGrid d2j;      // transform of D^circ_{n_j n_j}(g Omega)
  SpinGrid d2p;      // transform of D_{n_p n_p}(g Omega)
  SpinGrid ms;       // M_s
  SpinGrid cross;    // transform of 2(D_jj Psi*)(D_j Psi) - 2(D_pp Psi*)((U s3) D_p Psi)
};

/// Builds PointTerms for one p; `fft` must be (2 half + 1) x N x 4.
PointTerms point_terms(const WindowData& data, long p, const Taper& taper, const Fft2& fft,
                       const PointOptions& opts = {});

/// Sign/coefficient variant of the transport equation
///   (D_j - (U s3)|> D_p) W - s (K_c + K_s) - c_m M_c - M_s - x X - T = 0.
struct TransportVariant {
  int k_sign = 1;
  int mass_coeff = 1;
  bool cross = false;

  std::string name() const;
  bool operator==(const TransportVariant&) const = default;
};

inline constexpr TransportVariant kPrintedTransport{1, 1, false};
// The variant the audit singles out on generic data.
inline constexpr TransportVariant kLedgerTransport{-1, 2, true};

std::vector<TransportVariant> transport_variants();

struct TransportAudit {
  ResidualReport report{"transport_audit"};
  std::vector<TransportVariant> exact;  // variants at or below tolerance
  bool unique = false;
  bool degenerate_mass = false;  // theta == 0: mass coefficients indistinguishable
};

/// Evaluates every variant over all (p, k_j, k_p) and identifies the exact one.
/// Throws AuditError if no variant is below 1e-8.
TransportAudit transport_audit(const SpinorHistory& history, long j0, long half, double theta,
                               const Taper& taper = {}, double tolerance = 1e-11);

}  // namespace qww
