#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qww/report.hpp"
#include "qww/types.hpp"
#include "qww/wigner.hpp"

namespace qww {

/// Lattices of one physical setup at several spacings eps: N = L / eps sites,
/// theta = eps m, packet bandwidth fixed in physical momentum.
struct ScalingFamily {
  std::vector<double> eps;
  double mass = 1.0;
  double box_length = 16.0;
  double t_final = 0.0;  // 0 picks the shortest history that holds the window
  double k0 = 0.0;       // physical packet momentum
  double sigma_k = 1.5;  // physical momentum spread
  double tau = 0.5;      // physical gaussian taper width along n_j
  std::size_t samples = 32;

  void validate() const;
};

struct MemberLayout {
  double eps = 0.0;
  double theta = 0.0;
  std::size_t sites = 0;
  std::size_t steps = 0;
  long half = 0;
  long j0 = 0;
  Taper taper;
};

MemberLayout member_layout(const ScalingFamily& family, double eps);

/// Second-order expansion [[1 - t^2/2, -i t], [-i t, 1 - t^2/2]].
Mat2 expand_coin(double theta);

enum class Correction { none, audited, printed };
std::string correction_name(Correction c);

/// Sign of the i(k_t - k_x s3) block and coefficient of the i m s1 block.
struct ContinuumVariant {
  int phase_sign = 1;
  int mass_coeff = 1;

  std::string name() const;
  bool operator==(const ContinuumVariant&) const = default;
};

inline constexpr ContinuumVariant kAuditContinuum{-1, 2};
inline constexpr ContinuumVariant kPrintedContinuum{1, 1};

std::vector<ContinuumVariant> continuum_variants();
inline constexpr Correction kCorrections[] = {Correction::none, Correction::audited, Correction::printed};

/// Entry name "<variant>/<correction>".
std::string residual_key(const ContinuumVariant& v, Correction c);

/// One cell of the continuous operator minus the correction:
///   (D_j W - s3|>D_p W - T) / eps + s i(k_t W - k_x s3|>W) + c i m s1|>W - C,
/// where dj, dp, closure are the lattice quantities (not yet divided by eps).
Mat2 continuum_operator(const Mat2& w, const Mat2& dj, const Mat2& dp, const Mat2& closure, double kt, double kx,
                        double eps, double mass, const ContinuumVariant& v, Correction c);

/// Residual of the continuous transport operator on three consecutive W slices,
/// with d_t, d_x realised as lattice d1 / eps (d_x across the p slices). No
/// finite-window closure is applied. Each entry's l2 is ||R|| / ||W|| over
/// cells with |W| > 1e-10 max|W|; max_abs is the largest |R|.
ResidualReport continuous_residual(const WignerField& prev, const WignerField& cur, const WignerField& next,
                                   double eps, double mass);

struct ResidualRow {
  ContinuumVariant variant;
  Correction correction = Correction::none;
  double norm = 0.0;
};

struct MemberResult {
  MemberLayout layout;
  std::vector<ResidualRow> rows;
  double ms_stated = 0.0;   // ||M_s + 2 eps^2 m^2 W|| / ||W||
  double ms_derived = 0.0;  // ||M_s - eps^2 m^2 W|| / ||W||
  double edge_magnitude = 0.0;

  double norm(const ContinuumVariant& v, Correction c) const;
};

/// Evolves a gaussian packet on one member and evaluates every variant with the
/// finite-window closure at `samples` evenly spaced sites.
MemberResult run_member(const ScalingFamily& family, double eps);

/// Members in the order of family.eps; computed concurrently.
std::vector<MemberResult> run_family(const ScalingFamily& family);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Least squares of log r against log eps. Needs >= 4 points, all r > 0.
SlopeFit convergence_order(std::span<const std::pair<double, double>> points);

}  // namespace qww
