#include "qww/walk.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qww/lattice.hpp"

namespace qww {

namespace {

double wrap_angle(double x) {
  double y = std::remainder(x, 2.0 * pi);
  if (y <= -pi) y += 2.0 * pi;
  return y;
}

Spinor normalised(Spinor v) {
  const double n = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
  return {v[0] / n, v[1] / n};
}

// Null vector of (A - lambda) for A = U diag(e^{ik}, e^{-ik}). The row-0 form
// (i sin, e^{ik}(cos e^{ik} - lambda)) is smooth in k and never vanishes
// while sin(theta) != 0.
Spinor eigenvector(double theta, double k, cplx lambda, Branch branch) {
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  if (s == 0.0) {
    // U = +-1: the shift alone is diagonal. Positive branch carries e^{-i|k|}.
    const bool right = (k > 0.0) == (branch == Branch::positive);
    const bool degenerate = (k == 0.0 || std::abs(k) == pi);
    if (degenerate) return branch == Branch::positive ? Spinor{0.0, 1.0} : Spinor{1.0, 0.0};
    return right ? Spinor{0.0, 1.0} : Spinor{1.0, 0.0};
  }
  const cplx eik = std::polar(1.0, k);
  return normalised({I * s, eik * (c * eik - lambda)});
}

}  // namespace

Mat2 Coin::matrix() const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return Mat2{{c, -I * s, -I * s, c}};
}

const Spinor& SpinorState::at(long p) const {
  const long n = static_cast<long>(psi_.size());
  return psi_[static_cast<std::size_t>(((p % n) + n) % n)];
}

double SpinorState::norm() const {
  double s = 0.0;
  for (const auto& v : psi_) s += std::norm(v[0]) + std::norm(v[1]);
  return std::sqrt(s);
}

cplx SpinorState::inner(const SpinorState& other) const {
  if (other.sites() != sites()) throw PreconditionError("inner product of states of different size");
  cplx s = 0.0;
  for (std::size_t p = 0; p < psi_.size(); ++p)
    s += std::conj(psi_[p][0]) * other.psi_[p][0] + std::conj(psi_[p][1]) * other.psi_[p][1];
  return s;
}

void SpinorState::scale(cplx s) {
  for (auto& v : psi_) {
    v[0] *= s;
    v[1] *= s;
  }
}

SpinorHistory::SpinorHistory(std::size_t steps, std::size_t sites)
    : steps_(steps), sites_(sites), data_(steps * sites) {}

SpinorState SpinorHistory::state(std::size_t j) const {
  SpinorState s(sites_);
  std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(j * sites_), sites_, s.data().begin());
  return s;
}

void SpinorHistory::set_state(std::size_t j, const SpinorState& s) {
  if (s.sites() != sites_) throw PreconditionError("state size does not match history");
  std::copy(s.data().begin(), s.data().end(), data_.begin() + static_cast<std::ptrdiff_t>(j * sites_));
}

SpinorState step(const SpinorState& state, const Coin& coin) {
  const std::size_t n = state.sites();
  if (n == 0) throw PreconditionError("empty state");
  const Mat2 u = coin.matrix();
  SpinorState out(n);
  for (std::size_t p = 0; p < n; ++p) {
    const Spinor shifted{state[(p + 1) % n][0], state[(p + n - 1) % n][1]};
    out[p] = u * shifted;
  }
  return out;
}

SpinorHistory evolve(const SpinorState& initial, const Coin& coin, std::size_t steps) {
  if (steps < 3) throw PreconditionError("evolve needs J >= 3 (got " + std::to_string(steps) + ")");
  SpinorHistory h(steps, initial.sites());
  SpinorState cur = initial;
  h.set_state(0, cur);
  for (std::size_t j = 1; j < steps; ++j) {
    cur = step(cur, coin);
    h.set_state(j, cur);
  }
  return h;
}

Dispersion dispersion(double theta, double k) {
  const double omega = std::acos(std::clamp(std::cos(theta) * std::cos(k), -1.0, 1.0));
  Dispersion d;
  d.positive.omega = omega;
  d.positive.eigenvalue = std::polar(1.0, -omega);
  d.positive.eigenvector = eigenvector(theta, k, d.positive.eigenvalue, Branch::positive);
  d.negative.omega = -omega;
  d.negative.eigenvalue = std::polar(1.0, omega);
  d.negative.eigenvector = eigenvector(theta, k, d.negative.eigenvalue, Branch::negative);
  return d;
}

double group_velocity(double theta, double k) {
  const double omega = std::acos(std::clamp(std::cos(theta) * std::cos(k), -1.0, 1.0));
  const double so = std::sin(omega);
  if (so == 0.0) return 0.0;
  return std::cos(theta) * std::sin(k) / so;
}

SpinorState plane_wave(std::size_t sites, long mode, Branch branch, const Coin& coin) {
  const double k = wrap_angle(2.0 * pi * static_cast<double>(mode) / static_cast<double>(sites));
  const Spinor chi = dispersion(coin.theta, k).branch(branch).eigenvector;
  const double amp = 1.0 / std::sqrt(static_cast<double>(sites));
  SpinorState s(sites);
  const long n = static_cast<long>(sites);
  for (std::size_t p = 0; p < sites; ++p) {
    // Reduce the phase index exactly so large N keeps full accuracy.
    const long ph = (mode * static_cast<long>(p)) % n;
    const cplx e = amp * std::polar(1.0, 2.0 * pi * static_cast<double>(ph) / static_cast<double>(n));
    s[p] = {e * chi[0], e * chi[1]};
  }
  return s;
}

SpinorState gaussian_packet(std::size_t sites, const PacketParams& params, const Coin& coin) {
  if (!(params.sigma_k > 0.0)) throw PreconditionError("packet sigma_k must be positive");
  if (params.k0 <= -pi || params.k0 > pi) throw PreconditionError("packet k0 must lie in (-pi, pi]");
  if (params.spin_mix < 0.0 || params.spin_mix > 1.0)
    throw PreconditionError("packet spin_mix must lie in [0, 1]");
  const std::size_t n = sites;
  const double center = params.center < 0.0 ? static_cast<double>(n / 2) : params.center;
  const Branch other = params.branch == Branch::positive ? Branch::negative : Branch::positive;
  const double w_main = std::sqrt(1.0 - params.spin_mix);
  const double w_other = std::sqrt(params.spin_mix);

  SpinorState s(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double k = wrap_angle(2.0 * pi * static_cast<double>(m) / static_cast<double>(n));
    const double d = wrap_angle(k - params.k0);
    const double a = std::exp(-d * d / (4.0 * params.sigma_k * params.sigma_k));
    if (a < 1e-300) continue;
    const Dispersion disp = dispersion(coin.theta, k);
    const Spinor& c1 = disp.branch(params.branch).eigenvector;
    const Spinor& c2 = disp.branch(other).eigenvector;
    const Spinor chi{w_main * c1[0] + w_other * c2[0], w_main * c1[1] + w_other * c2[1]};
    for (std::size_t p = 0; p < n; ++p) {
      const cplx e = a * std::polar(1.0, k * (static_cast<double>(p) - center));
      s[p][0] += e * chi[0];
      s[p][1] += e * chi[1];
    }
  }
  s.scale(1.0 / s.norm());

  double tail = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    double dist = std::abs(static_cast<double>(p) - center);
    dist = std::min(dist, static_cast<double>(n) - dist);
    if (dist > static_cast<double>(n) / 4.0)
      tail = std::max(tail, std::sqrt(std::norm(s[p][0]) + std::norm(s[p][1])));
  }
  if (params.check_tail && tail > 1e-14)
    throw PreconditionError("packet tail criterion unmet: amplitude " + std::to_string(tail) +
                            " beyond N/4 sites (sigma_k too small for N, or too broad for the zone)");
  return s;
}

double mean_momentum(const SpinorState& state) {
  const std::size_t n = state.sites();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double k = wrap_angle(2.0 * pi * static_cast<double>(m) / static_cast<double>(n));
    cplx a0 = 0.0, a1 = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const long ph = static_cast<long>((m * p) % n);
      const cplx e = std::polar(1.0, -2.0 * pi * static_cast<double>(ph) / static_cast<double>(n));
      a0 += e * state[p][0];
      a1 += e * state[p][1];
    }
    const double w = std::norm(a0) + std::norm(a1);
    num += k * w;
    den += w;
  }
  return num / den;
}

SpinorState random_state(std::size_t sites, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  SpinorState s(sites);
  for (std::size_t p = 0; p < sites; ++p)
    for (int a = 0; a < 2; ++a) {
      const double re = g(rng);
      const double im = g(rng);
      s[p][a] = cplx(re, im);
    }
  s.scale(1.0 / s.norm());
  return s;
}

double commensurate_theta(std::size_t sites, long m0, long half, long m1) {
  const double k0 = 2.0 * pi * static_cast<double>(m0) / static_cast<double>(sites);
  const double omega = pi * static_cast<double>(m1) / static_cast<double>(2 * half + 1);
  const double ck = std::cos(k0);
  if (ck == 0.0) throw PreconditionError("commensurate theta undefined at |k0| = pi/2");
  const double c = std::cos(omega) / ck;
  if (c < 0.0 || c > 1.0)
    throw PreconditionError("no coin angle in [0, pi/2] places this plane wave on the window grid");
  return std::acos(c);
}

namespace {

struct Components {
  LatticeField l;
  LatticeField r;
};

Components as_fields(const SpinorHistory& h) {
  std::vector<Axis> axes{{"time", h.steps(), Boundary::windowed}, {"space", h.sites(), Boundary::periodic}};
  Components c{LatticeField(axes), LatticeField(axes)};
  for (std::size_t j = 0; j < h.steps(); ++j)
    for (std::size_t p = 0; p < h.sites(); ++p) {
      const std::size_t f = j * h.sites() + p;
      c.l[f] = h.at(j, static_cast<long>(p))[0];
      c.r[f] = h.at(j, static_cast<long>(p))[1];
    }
  return c;
}

}  // namespace

ResidualReport eom_residual(const SpinorHistory& history, const Coin& coin, EomForm form) {
  if (history.steps() < 3) throw PreconditionError("eom residual needs J >= 3");
  const Components psi = as_fields(history);
  const Mat2 u = coin.matrix();
  const Mat2 us3 = u * pauli_z();
  const Mat2 mass = u - Mat2::identity();
  const double c = form == EomForm::printed ? 0.5 : 1.0;

  const LatticeField djl = d1(psi.l, "time"), djr = d1(psi.r, "time");
  const LatticeField djjl = d2(psi.l, "time"), djjr = d2(psi.r, "time");
  const LatticeField dpl = d1(psi.l, "space"), dpr = d1(psi.r, "space");
  const LatticeField dppl = d2(psi.l, "space"), dppr = d2(psi.r, "space");

  NormAccumulator acc;
  for (std::size_t f = 0; f < psi.l.size(); ++f) {
    if (!djl.is_valid(f) || !djjl.is_valid(f)) continue;
    const Spinor dj{djl[f], djr[f]}, djj{djjl[f], djjr[f]};
    const Spinor dp{dpl[f], dpr[f]}, dpp{dppl[f], dppr[f]}, v{psi.l[f], psi.r[f]};
    const Spinor a = us3 * dp, b = mass * v, d = u * dpp;
    for (int k = 0; k < 2; ++k) acc.add(dj[k] - a[k] - c * b[k] + djj[k] - d[k]);
  }
  ResidualReport rep("eom_residual");
  rep.add(form == EomForm::printed ? "eom_printed" : "eom_audit", acc);
  return rep;
}

ResidualReport eom_audit(const SpinorHistory& history, const Coin& coin, double tolerance) {
  ResidualReport rep("eom_audit");
  const ResidualEntry printed = eom_residual(history, coin, EomForm::printed).get("eom_printed");
  const ResidualEntry audit = eom_residual(history, coin, EomForm::audit).get("eom_audit");
  rep.add(printed.name, printed.max_abs, printed.l2, printed.count);
  rep.add(audit.name, audit.max_abs, audit.l2, audit.count);
  const bool pe = printed.max_abs <= tolerance;
  const bool ae = audit.max_abs <= tolerance;
  if (pe && ae) {
    rep.note("exact_form", "both");
    rep.note("degenerate", "mass-term coefficient indistinguishable (U = 1 or (U - 1) Psi = 0)");
  } else if (ae) {
    rep.note("exact_form", "audit");
  } else if (pe) {
    rep.note("exact_form", "printed");
  } else {
    rep.note("exact_form", "none");
  }
  return rep;
}

}  // namespace qww
