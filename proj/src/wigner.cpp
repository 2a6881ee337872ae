#include "qww/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qww/walk.hpp"

namespace qww {

namespace {

long wrap(long x, long n) { return ((x % n) + n) % n; }

// conj(u)^A v^B
Mat2 outer(const Spinor& u, const Spinor& v) {
  Mat2 m;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) m(a, b) = std::conj(u[a]) * v[b];
  return m;
}

Mat2 scaled(double s, const Mat2& m) { return cplx(s) * m; }

std::vector<double> profile(const Taper& taper, long half) {
  if (taper.kind == TaperKind::gaussian && !(taper.width > 0.0))
    throw PreconditionError("gaussian taper needs a positive width");
  std::vector<double> g(static_cast<std::size_t>(2 * half + 1));
  for (long n = -half; n <= half; ++n) g[static_cast<std::size_t>(n + half)] = taper.weight(n, half);
  return g;
}

std::vector<std::uint8_t> mask_of(const BrillouinGrid& kj, const BrillouinGrid& kp) {
  std::vector<std::uint8_t> m(kj.size() * kp.size(), 0);
  for (std::size_t r = 0; r < kj.size(); ++r)
    for (std::size_t c = 0; c < kp.size(); ++c) m[r * kp.size() + c] = kj.tan_singular(r) || kp.tan_singular(c);
  return m;
}

PhaseField empty_like(const PhaseField& w) {
  PhaseField out;
  out.j0 = w.j0;
  out.half = w.half;
  out.sites = w.sites;
  out.kj = w.kj;
  out.kp = w.kp;
  out.masked = w.masked;
  out.slices.assign(w.slices.size(), SpinGrid(w.kj.size(), w.kp.size()));
  return out;
}

PhaseField phase_shell(long j0, long half, std::size_t sites) {
  PhaseField f;
  f.j0 = j0;
  f.half = half;
  f.sites = sites;
  f.kj = BrillouinGrid(static_cast<std::size_t>(2 * half + 1));
  f.kp = BrillouinGrid(sites);
  f.masked = mask_of(f.kj, f.kp);
  return f;
}

// Fills an (L x N) grid from fn(n_j, n_p) with rows in DFT order and transforms it.
template <class Fn>
SpinGrid transformed(long half, std::size_t sites, const Fft2& fft, Fn&& fn) {
  const long L = 2 * half + 1;
  SpinGrid g(static_cast<std::size_t>(L), sites);
  for (long n = -half; n <= half; ++n) {
    const auto r = static_cast<std::size_t>(wrap(n, L));
    for (std::size_t q = 0; q < sites; ++q) g.set_cell(r, q, fn(n, static_cast<long>(q)));
  }
  fft.forward(g.data());
  return g;
}

void check_fft(const Fft2& fft, long half, std::size_t sites) {
  if (fft.rows() != static_cast<std::size_t>(2 * half + 1) || fft.cols() != sites || fft.batch() != 4)
    throw PreconditionError("transform plan does not match the window");
}

}  // namespace

double Taper::weight(long n, long half) const {
  switch (kind) {
    case TaperKind::none:
      return 1.0;
    case TaperKind::gaussian: {
      const double x = static_cast<double>(n) / width;
      return std::exp(-0.5 * x * x);
    }
    case TaperKind::raised_cosine:
      return 0.5 * (1.0 + std::cos(pi * static_cast<double>(n) / static_cast<double>(half + 1)));
  }
  return 1.0;
}

std::string Taper::name() const {
  switch (kind) {
    case TaperKind::none:
      return "none";
    case TaperKind::gaussian: {
      std::ostringstream os;
      os.precision(17);
      os << "gaussian(" << width << ")";
      return os.str();
    }
    case TaperKind::raised_cosine:
      return "raised_cosine";
  }
  return "none";
}

long gaussian_half_window(double width) {
  if (!(width > 0.0)) throw PreconditionError("gaussian taper needs a positive width");
  const Taper t{TaperKind::gaussian, width};
  long m = std::max(1L, static_cast<long>(std::floor(width * std::sqrt(24.0 * std::log(10.0)))) - 1);
  while (t.weight(m, m) >= 1e-12) ++m;
  return m;
}

Mat2 SpinGrid::cell(std::size_t r, std::size_t c) const {
  const cplx* p = v_.data() + (r * cols_ + c) * 4;
  return Mat2{{p[0], p[1], p[2], p[3]}};
}

void SpinGrid::set_cell(std::size_t r, std::size_t c, const Mat2& m) {
  cplx* p = v_.data() + (r * cols_ + c) * 4;
  for (int i = 0; i < 4; ++i) p[i] = m.a[i];
}

void check_window(const SpinorHistory& history, long j0, long half) {
  const long J = static_cast<long>(history.steps());
  const std::size_t N = history.sites();
  if (N < 4 || N % 2 != 0) throw PreconditionError("lattice needs an even number of sites >= 4");
  if (half < 1) throw PreconditionError("window half-width must be at least 1");
  if (j0 - half < 1 || j0 + half > J - 2)
    throw PreconditionError("window [" + std::to_string(j0 - half) + ", " + std::to_string(j0 + half) +
                            "] needs one spare step on each side inside 0.." + std::to_string(J - 1));
}

OmegaTensor build_omega(const SpinorHistory& history, long j0, long half, const Taper& taper) {
  check_window(history, j0, half);
  const auto g = profile(taper, half);
  const std::size_t N = history.sites();
  OmegaTensor om;
  om.j0 = j0;
  om.half = half;
  om.sites = N;
  om.taper = taper;
  om.slices.assign(N, SpinGrid(om.window(), N));
  for (std::size_t p = 0; p < N; ++p) {
    const long pp = static_cast<long>(p);
    for (long n = -half; n <= half; ++n) {
      const double w = g[static_cast<std::size_t>(n + half)];
      const auto r = static_cast<std::size_t>(n + half);
      for (std::size_t q = 0; q < N; ++q) {
        const long qq = static_cast<long>(q);
        const Mat2 m = scaled(w, outer(history.at(static_cast<std::size_t>(j0 - n), pp - qq),
                                       history.at(static_cast<std::size_t>(j0 + n), pp + qq)));
        om.slices[p].set_cell(r, q, m);
        if (n == -half || n == half) om.edge_magnitude = std::max(om.edge_magnitude, max_abs(m));
      }
    }
  }
  om.edge_warning = taper.kind == TaperKind::none && om.edge_magnitude > 1e-12;
  return om;
}

WignerField wigner_transform(const OmegaTensor& omega) {
  const std::size_t N = omega.sites;
  WignerField w = phase_shell(omega.j0, omega.half, N);
  const Fft2 fft(omega.window(), N, 4);
  w.slices.reserve(omega.slices.size());
  for (const auto& sl : omega.slices) {
    w.slices.push_back(transformed(omega.half, N, fft, [&](long n, long q) {
      return sl.cell(static_cast<std::size_t>(n + omega.half), static_cast<std::size_t>(q));
    }));
  }
  return w;
}

WignerField wigner_at(const SpinorHistory& history, long j0, long half, const Taper& taper) {
  return wigner_transform(build_omega(history, j0, half, taper));
}

WindowData::WindowData(const SpinorHistory& h, long j0_, long half_, double theta)
    : history(&h), j0(j0_), half(half_), sites(h.sites()) {
  check_window(h, j0, half);
  u = Coin{theta}.matrix();
  us3 = u * pauli_z();
  const std::size_t count = static_cast<std::size_t>(2 * half + 1) * sites;
  dj.resize(count);
  djj.resize(count);
  dp.resize(count);
  dpp.resize(count);
  y.resize(count);
  for (long t = j0 - half; t <= j0 + half; ++t) {
    for (long x = 0; x < static_cast<long>(sites); ++x) {
      const std::size_t i = index(t, x);
      const Spinor &c = psi(t, x), &tp = psi(t + 1, x), &tm = psi(t - 1, x);
      const Spinor &xp = psi(t, x + 1), &xm = psi(t, x - 1);
      for (int a = 0; a < 2; ++a) {
        dj[i][a] = 0.5 * (tp[a] - tm[a]);
        djj[i][a] = 0.5 * (tp[a] + tm[a] - 2.0 * c[a]);
        dp[i][a] = 0.5 * (xp[a] - xm[a]);
        dpp[i][a] = 0.5 * (xp[a] + xm[a] - 2.0 * c[a]);
      }
      const Spinor udpp = u * dpp[i];
      y[i] = {djj[i][0] - udpp[0], djj[i][1] - udpp[1]};
    }
  }
}

std::size_t WindowData::index(long t, long x) const {
  return static_cast<std::size_t>(t - (j0 - half)) * sites +
         static_cast<std::size_t>(wrap(x, static_cast<long>(sites)));
}

PointTerms point_terms(const WindowData& d, long p, const Taper& taper, const Fft2& fft, const PointOptions& opts) {
  const long h = d.half;
  const long j0 = d.j0;
  const std::size_t N = d.sites;
  const long Nl = static_cast<long>(N);
  const long L = 2 * h + 1;
  check_fft(fft, h, N);
  const auto g = profile(taper, h);
  auto gw = [&](long n) { return g[static_cast<std::size_t>(n + h)]; };
  auto omega = [&](long t, long pp, long n, long q) { return outer(d.psi(t - n, pp - q), d.psi(t + n, pp + q)); };

  // untapered Omega(j0, p) with one halo row on each side
  std::vector<Mat2> ext(static_cast<std::size_t>(L + 2) * N);
  auto ext_at = [&](long n, long q) -> Mat2& {
    return ext[static_cast<std::size_t>(n + h + 1) * N + static_cast<std::size_t>(wrap(q, Nl))];
  };
  for (long n = -h - 1; n <= h + 1; ++n)
    for (long q = 0; q < Nl; ++q) ext_at(n, q) = omega(j0, p, n, q);
  // tapered window values on the circle n -> n mod L
  auto G = [&](long n, long q) {
    const long m = wrap(n + h, L) - h;
    return scaled(gw(m), ext_at(m, q));
  };

  PointTerms t;
  t.w = transformed(h, N, fft, [&](long n, long q) { return G(n, q); });
  if (!opts.derivatives) return t;
  t.dj_w = transformed(h, N, fft, [&](long n, long q) {
    return scaled(0.5 * gw(n), omega(j0 + 1, p, n, q) - omega(j0 - 1, p, n, q));
  });
  t.dp_w = transformed(h, N, fft, [&](long n, long q) {
    return scaled(0.5 * gw(n), omega(j0, p + 1, n, q) - omega(j0, p - 1, n, q));
  });
  t.closure = transformed(h, N, fft, [&](long n, long q) {
    return scaled(0.5, G(n + 1, q) - G(n - 1, q)) - scaled(0.5 * gw(n), ext_at(n + 1, q) - ext_at(n - 1, q));
  });
  if (opts.second) {
    t.d2j = transformed(h, N, fft, [&](long n, long q) {
      return scaled(0.5, G(n + 1, q) + G(n - 1, q) - scaled(2.0, G(n, q)));
    });
    t.d2p = transformed(h, N, fft, [&](long n, long q) {
      return scaled(0.5, G(n, q + 1) + G(n, q - 1) - scaled(2.0, G(n, q)));
    });
  }
  if (opts.ms) {
    t.ms = transformed(h, N, fft, [&](long n, long q) {
      return scaled(-2.0 * gw(n), outer(d.psi(j0 - n, p - q), d.y[d.index(j0 + n, p + q)]));
    });
  }
  if (opts.cross) {
    t.cross = transformed(h, N, fft, [&](long n, long q) {
      const std::size_t lo = d.index(j0 - n, p - q), hi = d.index(j0 + n, p + q);
      return scaled(2.0 * gw(n), outer(d.djj[lo], d.dj[hi]) - outer(d.dpp[lo], d.us3 * d.dp[hi]));
    });
  }
  return t;
}

ResidualReport omega_derivative_audit(const SpinorHistory& history, long j0, long half, double tolerance) {
  const WindowData d(history, j0, half, 0.0);
  const long Nl = static_cast<long>(d.sites);
  auto omega = [&](long t, long p, long n, long q) { return outer(d.psi(t - n, p - q), d.psi(t + n, p + q)); };
  auto plus = [](const Spinor& a, const Spinor& b) { return Spinor{a[0] + b[0], a[1] + b[1]}; };

  NormAccumulator tp, tc, tx, sp, sc, sx;
  auto add = [](NormAccumulator& acc, const Mat2& m) {
    for (const auto& v : m.a) acc.add(v);
  };
  for (long p = 0; p < Nl; ++p) {
    for (long n = -half; n <= half; ++n) {
      for (long q = 0; q < Nl; ++q) {
        const std::size_t lo = d.index(j0 - n, p - q), hi = d.index(j0 + n, p + q);
        const Spinor& a = d.psi(j0 - n, p - q);
        const Spinor& b = d.psi(j0 + n, p + q);
        const Mat2 dt = scaled(0.5, omega(j0 + 1, p, n, q) - omega(j0 - 1, p, n, q));
        const Mat2 dnt = scaled(0.5, omega(j0, p, n + 1, q) - omega(j0, p, n - 1, q));
        const Mat2 dx = scaled(0.5, omega(j0, p + 1, n, q) - omega(j0, p - 1, n, q));
        const Mat2 dnx = scaled(0.5, omega(j0, p, n, q + 1) - omega(j0, p, n, q - 1));

        const Mat2 t_printed = scaled(2.0, outer(a, d.dj[hi]));
        add(tp, dt + dnt - t_printed);
        add(tc, dt + dnt - scaled(2.0, outer(plus(a, d.djj[lo]), d.dj[hi])));
        add(tx, dt - dnt - scaled(2.0, outer(d.dj[lo], plus(b, d.djj[hi]))));

        const Mat2 s_printed = scaled(2.0, outer(a, d.dp[hi]));
        add(sp, dx + dnx - s_printed);
        add(sc, dx + dnx - scaled(2.0, outer(plus(a, d.dpp[lo]), d.dp[hi])));
        add(sx, dx - dnx - scaled(2.0, outer(d.dp[lo], plus(b, d.dpp[hi]))));
      }
    }
  }
  ResidualReport rep("omega_derivative_audit");
  rep.add("time_printed", tp);
  rep.add("time_corrected", tc);
  rep.add("time_cross_check", tx);
  rep.add("space_printed", sp);
  rep.add("space_corrected", sc);
  rep.add("space_cross_check", sx);
  auto verdict = [&](const NormAccumulator& pr, const NormAccumulator& co) {
    const bool a = pr.max_abs <= tolerance, b = co.max_abs <= tolerance;
    return a && b ? "both" : b ? "corrected" : a ? "printed" : "none";
  };
  rep.note("time_exact", verdict(tp, tc));
  rep.note("space_exact", verdict(sp, sc));
  return rep;
}

PhaseField kc_term(const WignerField& w, double theta, MaskPolicy policy) {
  const Mat2 us3 = Coin{theta}.matrix() * pauli_z();
  PhaseField out = empty_like(w);
  for (std::size_t p = 0; p < w.slices.size(); ++p) {
    for (std::size_t r = 0; r < w.kj.size(); ++r) {
      for (std::size_t c = 0; c < w.kp.size(); ++c) {
        if (w.is_masked(r, c)) {
          if (policy == MaskPolicy::forbid) throw PreconditionError("tan factor is singular at |k| = pi/2");
          continue;
        }
        const Mat2 cell = w.slices[p].cell(r, c);
        out.slices[p].set_cell(r, c, -I * std::tan(w.kj.k(r)) * cell +
                                         I * std::tan(w.kp.k(c)) * right_action(us3, cell));
      }
    }
  }
  return out;
}

PhaseField ks_term(const OmegaTensor& omega, double theta, MaskPolicy policy) {
  const Mat2 us3 = Coin{theta}.matrix() * pauli_z();
  const long h = omega.half;
  const long L = 2 * h + 1;
  const long Nl = static_cast<long>(omega.sites);
  PhaseField out = phase_shell(omega.j0, h, omega.sites);
  if (policy == MaskPolicy::forbid && std::any_of(out.masked.begin(), out.masked.end(), [](auto m) { return m; }))
    throw PreconditionError("tan factor is singular at |k| = pi/2");
  const Fft2 fft(static_cast<std::size_t>(L), omega.sites, 4);
  out.slices.reserve(omega.slices.size());
  for (const auto& sl : omega.slices) {
    auto at = [&](long n, long q) {
      return sl.cell(static_cast<std::size_t>(wrap(n + h, L)), static_cast<std::size_t>(wrap(q, Nl)));
    };
    const SpinGrid sj = transformed(h, omega.sites, fft, [&](long n, long q) {
      return scaled(0.5, at(n + 1, q) + at(n - 1, q) - scaled(2.0, at(n, q)));
    });
    const SpinGrid sp = transformed(h, omega.sites, fft, [&](long n, long q) {
      return scaled(0.5, at(n, q + 1) + at(n, q - 1) - scaled(2.0, at(n, q)));
    });
    SpinGrid k(sj.rows(), sj.cols());
    for (std::size_t r = 0; r < k.rows(); ++r)
      for (std::size_t c = 0; c < k.cols(); ++c) {
        if (out.is_masked(r, c)) continue;
        k.set_cell(r, c, -I * std::tan(out.kj.k(r)) * sj.cell(r, c) +
                             I * std::tan(out.kp.k(c)) * right_action(us3, sp.cell(r, c)));
      }
    out.slices.push_back(std::move(k));
  }
  return out;
}

PhaseField mc_term(const WignerField& w, double theta, double mass_coeff) {
  const Mat2 m = Coin{theta}.matrix() - Mat2::identity();
  PhaseField out = empty_like(w);
  for (std::size_t p = 0; p < w.slices.size(); ++p)
    for (std::size_t r = 0; r < w.kj.size(); ++r)
      for (std::size_t c = 0; c < w.kp.size(); ++c)
        out.slices[p].set_cell(r, c, cplx(mass_coeff) * right_action(m, w.slices[p].cell(r, c)));
  return out;
}

PhaseField ms_term(const SpinorHistory& history, long j0, long half, double theta, const Taper& taper) {
  const WindowData d(history, j0, half, theta);
  const auto g = profile(taper, half);
  PhaseField out = phase_shell(j0, half, d.sites);
  const Fft2 fft(static_cast<std::size_t>(2 * half + 1), d.sites, 4);
  for (long p = 0; p < static_cast<long>(d.sites); ++p) {
    out.slices.push_back(transformed(half, d.sites, fft, [&](long n, long q) {
      return scaled(-2.0 * g[static_cast<std::size_t>(n + half)],
                    outer(d.psi(j0 - n, p - q), d.y[d.index(j0 + n, p + q)]));
    }));
  }
  return out;
}

std::string TransportVariant::name() const {
  return "k_sign=" + std::to_string(k_sign) + ",mass=" + std::to_string(mass_coeff) + ",cross=" + (cross ? "1" : "0");
}

std::vector<TransportVariant> transport_variants() {
  std::vector<TransportVariant> v;
  for (int s : {1, -1})
    for (int m : {1, 2})
      for (bool x : {false, true}) v.push_back({s, m, x});
  return v;
}

TransportAudit transport_audit(const SpinorHistory& history, long j0, long half, double theta, const Taper& taper,
                               double tolerance) {
  const WindowData d(history, j0, half, theta);
  const std::size_t N = d.sites;
  const Fft2 fft(static_cast<std::size_t>(2 * half + 1), N, 4);
  const BrillouinGrid kj(static_cast<std::size_t>(2 * half + 1)), kp(N);
  const Mat2 mass = d.u - Mat2::identity();
  const auto variants = transport_variants();

  std::vector<NormAccumulator> res(variants.size());
  NormAccumulator tw, tdj, tdp, tk, tm, tms, tx, tt;
  std::size_t masked = 0;
  auto add = [](NormAccumulator& acc, const Mat2& m) {
    for (const auto& v : m.a) acc.add(v);
  };
  for (long p = 0; p < static_cast<long>(N); ++p) {
    const PointTerms pt = point_terms(d, p, taper, fft);
    for (std::size_t r = 0; r < kj.size(); ++r) {
      const double a = kj.k(r);
      for (std::size_t c = 0; c < N; ++c) {
        const double b = kp.k(c);
        const Mat2 w = pt.w.cell(r, c);
        Mat2 k;
        if (kj.tan_singular(r) || kp.tan_singular(c)) {
          if (p == 0) ++masked;
          k = -I * std::sin(a) * w + I * std::sin(b) * right_action(d.us3, w);
        } else {
          k = -I * std::tan(a) * (w + pt.d2j.cell(r, c)) +
              I * std::tan(b) * right_action(d.us3, w + pt.d2p.cell(r, c));
        }
        const Mat2 mc = right_action(mass, w);
        const Mat2 x = pt.cross.cell(r, c);
        const Mat2 base = pt.dj_w.cell(r, c) - right_action(d.us3, pt.dp_w.cell(r, c)) - pt.ms.cell(r, c) -
                          pt.closure.cell(r, c);
        for (std::size_t v = 0; v < variants.size(); ++v) {
          const auto& var = variants[v];
          Mat2 rv = base - cplx(var.k_sign) * k - cplx(var.mass_coeff) * mc;
          if (var.cross) rv = rv - x;
          add(res[v], rv);
        }
        add(tw, w);
        add(tdj, pt.dj_w.cell(r, c));
        add(tdp, pt.dp_w.cell(r, c));
        add(tk, k);
        add(tm, mc);
        add(tms, pt.ms.cell(r, c));
        add(tx, x);
        add(tt, pt.closure.cell(r, c));
      }
    }
  }

  TransportAudit out;
  const double scale = std::max(1.0, tw.max_abs);
  out.report.add("W", tw);
  out.report.add("term_DjW", tdj);
  out.report.add("term_DpW", tdp);
  out.report.add("term_K", tk);
  out.report.add("term_Mc", tm);
  out.report.add("term_Ms", tms);
  out.report.add("term_X", tx);
  out.report.add("term_T", tt);
  double best = res.empty() ? 0.0 : res.front().max_abs;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    out.report.add(variants[v].name(), res[v]);
    best = std::min(best, res[v].max_abs);
    if (res[v].max_abs <= tolerance * scale) out.exact.push_back(variants[v]);
  }
  out.unique = out.exact.size() == 1;
  out.degenerate_mass = tm.max_abs <= tolerance * scale;
  out.report.note("taper", taper.name());
  out.report.note("masked_cells", std::to_string(masked));
  if (tw.max_abs == 0.0) out.report.note("degenerate", "zero field");
  if (out.degenerate_mass) out.report.note("degenerate_mass", "U - 1 annihilates W; mass coefficient not identifiable");
  std::string names;
  for (const auto& v : out.exact) names += (names.empty() ? "" : ";") + v.name();
  out.report.note("exact", names.empty() ? "none" : names);
  if (best > 1e-8 * scale)
    throw AuditError("no transport variant closes: smallest residual " + std::to_string(best));
  return out;
}

}  // namespace qww
