#include "qww/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "qww/walk.hpp"

namespace qww {

namespace {

double frob(const Mat2& m) {
  double s = 0.0;
  for (const auto& v : m.a) s += std::norm(v);
  return std::sqrt(s);
}

double frob_sq(const Mat2& m) {
  double s = 0.0;
  for (const auto& v : m.a) s += std::norm(v);
  return s;
}

// Squared residual sums for every (variant, correction) over the masked cells.
struct Sums {
  std::vector<ContinuumVariant> variants = continuum_variants();
  std::vector<double> num = std::vector<double>(variants.size() * 3, 0.0);
  std::vector<double> peak = std::vector<double>(variants.size() * 3, 0.0);
  double den = 0.0;
  std::size_t cells = 0;

  void add(const Mat2& w, const Mat2& dj, const Mat2& dp, const Mat2& closure, double kt, double kx, double eps,
           double m) {
    for (std::size_t v = 0; v < variants.size(); ++v) {
      for (Correction c : kCorrections) {
        const std::size_t i = v * 3 + static_cast<std::size_t>(c);
        const Mat2 rc = continuum_operator(w, dj, dp, closure, kt, kx, eps, m, variants[v], c);
        num[i] += frob_sq(rc);
        peak[i] = std::max(peak[i], max_abs(rc));
      }
    }
    den += frob_sq(w);
    ++cells;
  }
};

std::size_t corr_index(Correction c) { return static_cast<std::size_t>(c); }

}  // namespace

void ScalingFamily::validate() const {
  if (eps.empty()) throw PreconditionError("scaling family needs at least one eps");
  for (double e : eps) {
    if (!(e > 0.0)) throw PreconditionError("eps must be positive");
    if (!(e * mass < pi / 2)) throw PreconditionError("theta = eps m must stay below pi/2");
  }
  if (!(mass >= 0.0)) throw PreconditionError("mass must be non-negative");
  if (!(box_length > 0.0)) throw PreconditionError("box length must be positive");
  if (!(sigma_k > 0.0)) throw PreconditionError("packet sigma_k must be positive");
  if (!(tau > 0.0)) throw PreconditionError("taper width tau must be positive");
  if (samples == 0) throw PreconditionError("samples must be positive");
  if (t_final < 0.0) throw PreconditionError("t_final must be non-negative");
}

MemberLayout member_layout(const ScalingFamily& family, double eps) {
  MemberLayout l;
  l.eps = eps;
  l.theta = eps * family.mass;
  const double n = family.box_length / eps;
  const double nr = std::round(n);
  if (std::abs(n - nr) > 1e-9 * n) throw PreconditionError("box length is not a whole number of sites at this eps");
  l.sites = static_cast<std::size_t>(nr);
  if (l.sites < 4 || l.sites % 2 != 0) throw PreconditionError("N = L / eps must be even and >= 4");
  l.taper = Taper{TaperKind::gaussian, family.tau / eps};
  l.half = gaussian_half_window(l.taper.width);
  const std::size_t minimal = static_cast<std::size_t>(2 * l.half + 3);
  if (family.t_final > 0.0) {
    l.steps = static_cast<std::size_t>(std::llround(family.t_final / eps)) + 1;
    if (l.steps < minimal)
      throw PreconditionError("t_final too short for the time window: need " + std::to_string(minimal) +
                              " steps, have " + std::to_string(l.steps));
  } else {
    l.steps = minimal;
  }
  l.j0 = static_cast<long>((l.steps - 1) / 2);
  return l;
}

Mat2 expand_coin(double theta) {
  const cplx d = 1.0 - theta * theta / 2.0;
  return Mat2{{d, -I * theta, -I * theta, d}};
}

std::string correction_name(Correction c) {
  switch (c) {
    case Correction::none:
      return "none";
    case Correction::audited:
      return "audited";
    case Correction::printed:
      return "printed";
  }
  return "none";
}

std::string ContinuumVariant::name() const {
  if (*this == kAuditContinuum) return "audit";
  if (*this == kPrintedContinuum) return "printed";
  return "phase=" + std::to_string(phase_sign) + ",mass=" + std::to_string(mass_coeff);
}

std::vector<ContinuumVariant> continuum_variants() {
  std::vector<ContinuumVariant> v;
  for (int s : {1, -1})
    for (int m : {1, 2}) v.push_back({s, m});
  return v;
}

Mat2 continuum_operator(const Mat2& w, const Mat2& dj, const Mat2& dp, const Mat2& closure, double kt, double kx,
                        double eps, double mass, const ContinuumVariant& v, Correction c) {
  const Mat2 s3 = pauli_z();
  Mat2 r = cplx(1.0 / eps) * (dj - right_action(s3, dp) - closure) +
           cplx(v.phase_sign) * I * (cplx(kt) * w - cplx(kx) * right_action(s3, w)) +
           cplx(v.mass_coeff) * I * cplx(mass) * right_action(pauli_x(), w);
  if (c == Correction::none) return r;
  const Mat2 drift = cplx(eps * mass) * right_action(pauli_y(), cplx(1.0 / eps) * dp - I * kx * w);
  if (c == Correction::audited) return r + drift;
  return r - drift + cplx(2.5 * eps * mass * mass) * w;
}

std::string residual_key(const ContinuumVariant& v, Correction c) { return v.name() + "/" + correction_name(c); }

ResidualReport continuous_residual(const WignerField& prev, const WignerField& cur, const WignerField& next,
                                   double eps, double mass) {
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  for (const WignerField* f : {&prev, &next})
    if (!(f->kj == cur.kj) || !(f->kp == cur.kp) || f->slices.size() != cur.slices.size())
      throw PreconditionError("grid mismatch between the W time slices");
  const std::size_t P = cur.slices.size();
  if (P == 0) throw PreconditionError("empty W field");

  double wmax = 0.0;
  for (const auto& sl : cur.slices)
    for (std::size_t r = 0; r < sl.rows(); ++r)
      for (std::size_t c = 0; c < sl.cols(); ++c) wmax = std::max(wmax, frob(sl.cell(r, c)));

  Sums sums;
  for (std::size_t p = 0; p < P; ++p) {
    const SpinGrid& up = cur.slices[(p + 1) % P];
    const SpinGrid& dn = cur.slices[(p + P - 1) % P];
    for (std::size_t r = 0; r < cur.kj.size(); ++r) {
      for (std::size_t c = 0; c < cur.kp.size(); ++c) {
        const Mat2 w = cur.slices[p].cell(r, c);
        if (!(frob(w) > 1e-10 * wmax)) continue;
        const Mat2 dj = cplx(0.5) * (next.slices[p].cell(r, c) - prev.slices[p].cell(r, c));
        const Mat2 dp = cplx(0.5) * (up.cell(r, c) - dn.cell(r, c));
        sums.add(w, dj, dp, Mat2::zero(), cur.kj.k(r) / eps, cur.kp.k(c) / eps, eps, mass);
      }
    }
  }

  ResidualReport rep("continuous_residual");
  const double wn = std::sqrt(sums.den);
  for (std::size_t v = 0; v < sums.variants.size(); ++v)
    for (Correction c : kCorrections) {
      const std::size_t i = v * 3 + corr_index(c);
      rep.add(residual_key(sums.variants[v], c), sums.peak[i], wn > 0.0 ? std::sqrt(sums.num[i]) / wn : 0.0,
              sums.cells);
    }
  rep.note("closure", "none");
  return rep;
}

double MemberResult::norm(const ContinuumVariant& v, Correction c) const {
  for (const auto& r : rows)
    if (r.variant == v && r.correction == c) return r.norm;
  throw std::out_of_range("no residual row for " + residual_key(v, c));
}

MemberResult run_member(const ScalingFamily& family, double eps) {
  family.validate();
  MemberResult out;
  const MemberLayout l = member_layout(family, eps);
  out.layout = l;
  const Coin coin{l.theta};
  PacketParams pk;
  pk.k0 = eps * family.k0;
  pk.sigma_k = eps * family.sigma_k;
  pk.check_tail = false;
  SpinorHistory h = evolve(gaussian_packet(l.sites, pk, coin), coin, l.steps);
  h.scaling = Scaling{eps, family.mass};

  const WindowData data(h, l.j0, l.half, l.theta);
  const std::size_t L = static_cast<std::size_t>(2 * l.half + 1);
  const Fft2 fft(L, l.sites, 4);
  const BrillouinGrid kj(L), kp(l.sites);
  const std::size_t S = std::min(family.samples, l.sites);
  std::vector<long> ps(S);
  for (std::size_t i = 0; i < S; ++i) ps[i] = static_cast<long>(i * l.sites / S);

  double wmax = 0.0;
  for (long p : ps) {
    const PointTerms t = point_terms(data, p, l.taper, fft, {false, false, false, false});
    for (std::size_t r = 0; r < L; ++r)
      for (std::size_t c = 0; c < l.sites; ++c) wmax = std::max(wmax, frob(t.w.cell(r, c)));
  }

  const double m = family.mass;
  const double m2 = eps * eps * m * m;
  Sums sums;
  double ms_a = 0.0, ms_b = 0.0;
  for (long p : ps) {
    const PointTerms t = point_terms(data, p, l.taper, fft, {true, false, true, false});
    for (std::size_t r = 0; r < L; ++r) {
      for (std::size_t c = 0; c < l.sites; ++c) {
        const Mat2 w = t.w.cell(r, c);
        if (!(frob(w) > 1e-10 * wmax)) continue;
        sums.add(w, t.dj_w.cell(r, c), t.dp_w.cell(r, c), t.closure.cell(r, c), kj.k(r) / eps, kp.k(c) / eps, eps,
                 m);
        const Mat2 ms = t.ms.cell(r, c);
        ms_a += frob_sq(ms + cplx(2.0 * m2) * w);
        ms_b += frob_sq(ms - cplx(m2) * w);
      }
    }
    for (long n : {-l.half, l.half})
      for (long q = 0; q < static_cast<long>(l.sites); ++q) {
        const Spinor& a = data.psi(l.j0 - n, p - q);
        const Spinor& b = data.psi(l.j0 + n, p + q);
        const double g = l.taper.weight(n, l.half);
        for (int x = 0; x < 2; ++x)
          for (int y = 0; y < 2; ++y) out.edge_magnitude = std::max(out.edge_magnitude, g * std::abs(a[x] * b[y]));
      }
  }

  const double wn = std::sqrt(sums.den);
  for (std::size_t v = 0; v < sums.variants.size(); ++v)
    for (Correction c : kCorrections)
      out.rows.push_back({sums.variants[v], c, wn > 0.0 ? std::sqrt(sums.num[v * 3 + corr_index(c)]) / wn : 0.0});
  out.ms_stated = wn > 0.0 ? std::sqrt(ms_a) / wn : 0.0;
  out.ms_derived = wn > 0.0 ? std::sqrt(ms_b) / wn : 0.0;
  return out;
}

std::vector<MemberResult> run_family(const ScalingFamily& family) {
  family.validate();
  for (double e : family.eps) member_layout(family, e);
  std::vector<std::future<MemberResult>> jobs;
  for (double e : family.eps) jobs.push_back(std::async(std::launch::async, run_member, std::cref(family), e));
  std::vector<MemberResult> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

SlopeFit convergence_order(std::span<const std::pair<double, double>> points) {
  if (points.size() < 4) throw PreconditionError("convergence fit needs at least 4 points");
  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& [e, r] : points) {
    if (!(e > 0.0)) throw PreconditionError("eps must be positive");
    if (!(r > 0.0)) throw PreconditionError("residual must be positive for a log fit");
    sx += std::log(e);
    sy += std::log(r);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [e, r] : points) {
    const double dx = std::log(e) - mx, dy = std::log(r) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw PreconditionError("convergence fit needs distinct eps values");
  SlopeFit f;
  f.points = points.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

}  // namespace qww
