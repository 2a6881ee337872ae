#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qww/report.hpp"
#include "qww/types.hpp"

namespace qww {

/// Constant coin U(theta) = [[cos, -i sin], [-i sin, cos]].
struct Coin {
  double theta = 0.0;

  Mat2 matrix() const;
};

/// One time slice: (psi^L_p, psi^R_p) over N periodic sites.
class SpinorState {
 public:
  SpinorState() = default;
  explicit SpinorState(std::size_t sites) : psi_(sites) {}

  std::size_t sites() const { return psi_.size(); }
  Spinor& operator[](std::size_t p) { return psi_[p]; }
  const Spinor& operator[](std::size_t p) const { return psi_[p]; }
  /// Periodic access.
  const Spinor& at(long p) const;

  std::span<Spinor> data() { return psi_; }
  std::span<const Spinor> data() const { return psi_; }

  double norm() const;
  /// Hilbert product sum_{A,p} conj(this^A_p) other^A_p.
  cplx inner(const SpinorState& other) const;
  void scale(cplx s);

 private:
  std::vector<Spinor> psi_;
};

struct Scaling {
  double eps = 0.0;
  double mass = 0.0;
};

/// Trajectory Psi_j for j = 0..J-1, stored contiguously.
class SpinorHistory {
 public:
  SpinorHistory() = default;
  SpinorHistory(std::size_t steps, std::size_t sites);

  std::size_t steps() const { return steps_; }
  std::size_t sites() const { return sites_; }

  /// Periodic in p, bounds-checked in j only by the caller.
  const Spinor& at(std::size_t j, long p) const {
    const long n = static_cast<long>(sites_);
    const long q = ((p % n) + n) % n;
    return data_[j * sites_ + static_cast<std::size_t>(q)];
  }
  Spinor& mut(std::size_t j, std::size_t p) { return data_[j * sites_ + p]; }

  SpinorState state(std::size_t j) const;
  void set_state(std::size_t j, const SpinorState& s);

  std::optional<Scaling> scaling;

 private:
  std::size_t steps_ = 0;
  std::size_t sites_ = 0;
  std::vector<Spinor> data_;
};

/// Psi_{j+1, p} = U (psi^L_{p+1}, psi^R_{p-1}).
SpinorState step(const SpinorState& state, const Coin& coin);

/// history[0] = initial, history[j+1] = step(history[j]); requires J >= 3.
SpinorHistory evolve(const SpinorState& initial, const Coin& coin, std::size_t steps);

enum class Branch { positive, negative };

struct DispersionMode {
  double omega = 0.0;    // signed quasi-energy; eigenvalue is exp(-i omega)
  cplx eigenvalue;
  Spinor eigenvector{};  // unit norm, smooth in k for theta != 0
};

/// Eigenstructure of the one-step operator U(theta) diag(e^{ik}, e^{-ik})
/// acting on plane waves e^{ikp}: cos(omega) = cos(theta) cos(k).
struct Dispersion {
  DispersionMode positive;  // omega in [0, pi]
  DispersionMode negative;  // -omega

  const DispersionMode& branch(Branch b) const { return b == Branch::positive ? positive : negative; }
};

Dispersion dispersion(double theta, double k);

/// d omega / d k of the positive branch.
double group_velocity(double theta, double k);

/// Unit-norm eigenmode chi e^{i k p} with k = 2 pi mode / N.
SpinorState plane_wave(std::size_t sites, long mode, Branch branch, const Coin& coin);

struct PacketParams {
  double k0 = 0.0;
  double sigma_k = 0.5;
  Branch branch = Branch::positive;
  double spin_mix = 0.0;  // probability weight moved onto the other branch
  double center = -1.0;   // site of the packet centre; negative means N/2
  bool check_tail = true;
};

/// Gaussian superposition of dispersion eigenstates, built in momentum
/// space. With check_tail, throws PreconditionError if the amplitude more
/// than N/4 sites from the centre exceeds 1e-14.
SpinorState gaussian_packet(std::size_t sites, const PacketParams& params, const Coin& coin);

/// Mean quasi-momentum of |psi(k)|^2 with psi_p = sum_k psi(k) e^{ikp}.
double mean_momentum(const SpinorState& state);

/// Normalised state with i.i.d. Gaussian real and imaginary parts.
SpinorState random_state(std::size_t sites, std::uint64_t seed);

/// Coin angle for which the plane wave of mode m0 has 2 omega on the k_j grid
/// of a (2 half + 1)-point time window, i.e. 2 omega = 2 pi m1 / (2 half + 1).
double commensurate_theta(std::size_t sites, long m0, long half, long m1);

enum class EomForm {
  printed,  // mass-term coefficient 1/2
  audit,  // coefficient 1, from substituting the walk rule
};

/// Max / L2 norm of D_j Psi - (U s3) D_p Psi - c (U - 1) Psi + D_jj Psi - U D_pp Psi
/// over interior times. Entry name: "eom_printed" or "eom_audit".
ResidualReport eom_residual(const SpinorHistory& history, const Coin& coin, EomForm form);

/// Both forms plus the identified exact one (note "exact_form").
ResidualReport eom_audit(const SpinorHistory& history, const Coin& coin, double tolerance = 1e-13);

}  // namespace qww
