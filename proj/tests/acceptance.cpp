#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "qww/continuum.hpp"
#include "qww/experiment.hpp"
#include "qww/walk.hpp"
#include "qww/wigner.hpp"

using namespace qww;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void verdict(int n, bool pass, const std::string& what, const std::string& values) {
  std::printf("criterion %d %s %s (%s)\n", n, pass ? "PASS" : "FAIL", what.c_str(), values.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

SpinorState smooth_packet(std::size_t n, double theta, double k0, double sigma) {
  PacketParams pk;
  pk.k0 = k0;
  pk.sigma_k = sigma;
  pk.check_tail = false;
  return gaussian_packet(n, pk, Coin{theta});
}

void discrete_calculus() {
  const ResidualReport r = identity_suite(100, 64, 64, 20240601);
  const double inv = r.get("inversion").max_abs, prod = r.get("product_rule").max_abs;
  verdict(1, inv <= 1e-13 && prod <= 1e-13, "discrete calculus identities on 100 fields 64x64",
          "inversion=" + fmt(inv) + " product=" + fmt(prod));
}

void spectral_identity() {
  const ResidualReport r = spectral_suite(64, 20240601);
  const double s = r.get("sin_form").max_abs, t = r.get("tan_form").max_abs;
  const double slope = r.get("expansion_remainder_slope").max_abs;
  verdict(2, s <= 1e-12 && t <= 1e-10 && std::abs(slope - 4.0) <= 0.3, "spectral derivative identities",
          "sin=" + fmt(s) + " tan=" + fmt(t) + " remainder_slope=" + fmt(slope));
}

void walk_correctness() {
  SpinorState s = random_state(64, 1);
  for (int i = 0; i < 1000; ++i) s = step(s, Coin{0.3});
  const double drift = std::abs(s.norm() - 1.0);
  double err = 0.0;
  for (double th : {0.0, 0.3, pi / 4, pi / 2}) {
    for (std::size_t m = 0; m < 64; ++m) {
      const double k = 2.0 * pi * static_cast<double>(m) / 64.0;
      // one-step operator U diag(e^{ik}, e^{-ik}); its trace is 2 cos(theta) cos(k) and det 1
      const Mat2 t{{std::polar(1.0, k), 0.0, 0.0, std::polar(1.0, -k)}};
      const Mat2 a = Coin{th}.matrix() * t;
      const cplx tr = a(0, 0) + a(1, 1), dt = det(a);
      const cplx disc = std::sqrt(tr * tr - 4.0 * dt);
      const cplx e1 = 0.5 * (tr + disc), e2 = 0.5 * (tr - disc);
      const Dispersion d = dispersion(th, k);
      const double x = std::max(std::abs(e1 - d.positive.eigenvalue), std::abs(e2 - d.negative.eigenvalue));
      const double y = std::max(std::abs(e2 - d.positive.eigenvalue), std::abs(e1 - d.negative.eigenvalue));
      err = std::max(err, std::min(x, y));
      err = std::max(err, std::abs(std::cos(d.positive.omega) - std::cos(th) * std::cos(k)));
    }
  }
  verdict(3, drift <= 1e-12 && err <= 1e-12, "walk unitarity and dispersion",
          "norm_drift=" + fmt(drift) + " dispersion=" + fmt(err));
}

void eom() {
  const Coin coin{0.3};
  const SpinorHistory h = evolve(smooth_packet(64, 0.3, 0.5, 0.3), coin, 24);
  const ResidualReport r = eom_audit(h, coin);
  const double a = r.get("eom_audit").max_abs, p = r.get("eom_printed").max_abs;
  const bool one = (a <= 1e-13) != (p <= 1e-13);
  const double other = a <= 1e-13 ? p : a;
  verdict(4, one && other > 1e-4, "equation of motion: one coefficient exact",
          "exact=" + r.note_or("exact_form", "none") + " audit=" + fmt(a) + " printed=" + fmt(p));
}

void omega_identity() {
  const double th = 0.3;
  const SpinorHistory h = evolve(smooth_packet(32, th, 0.4, 0.5), Coin{th}, 21);
  const long j0 = 10, half = 8;
  const ResidualReport r = omega_derivative_audit(h, j0, half);
  const double pr = r.get("time_printed").max_abs, co = r.get("time_corrected").max_abs;
  const bool one = (pr <= 1e-13) != (co <= 1e-13);

  // printed minus corrected candidate against the closed-form 2 (D_jj Psi)*_- (D_j Psi)_+
  const WindowData d(h, j0, half, th);
  auto om = [&](long t, long p, long n, long q) {
    Mat2 m;
    const Spinor &a = h.at(static_cast<std::size_t>(t - n), p - q), &b = h.at(static_cast<std::size_t>(t + n), p + q);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) m(x, y) = std::conj(a[x]) * b[y];
    return m;
  };
  double cross = 0.0;
  for (long p = 0; p < 32; ++p)
    for (long n = -half; n <= half; ++n)
      for (long q = 0; q < 32; ++q) {
        const Mat2 lhs = cplx(0.5) * (om(j0 + 1, p, n, q) - om(j0 - 1, p, n, q) + om(j0, p, n + 1, q) -
                                      om(j0, p, n - 1, q));
        const std::size_t lo = d.index(j0 - n, p - q), hi = d.index(j0 + n, p + q);
        const Spinor &a = h.at(static_cast<std::size_t>(j0 - n), p - q);
        Mat2 printed, corrected, closed;
        for (int x = 0; x < 2; ++x)
          for (int y = 0; y < 2; ++y) {
            printed(x, y) = lhs(x, y) - 2.0 * std::conj(a[x]) * d.dj[hi][y];
            corrected(x, y) = lhs(x, y) - 2.0 * std::conj(a[x] + d.djj[lo][x]) * d.dj[hi][y];
            closed(x, y) = 2.0 * std::conj(d.djj[lo][x]) * d.dj[hi][y];
          }
        cross = std::max(cross, max_abs(printed - corrected - closed));
      }
  verdict(5, one && cross <= 1e-13, "omega identity: one candidate exact, difference is the cross term",
          "exact=" + r.note_or("time_exact", "none") + " printed=" + fmt(pr) + " corrected=" + fmt(co) +
              " cross_term=" + fmt(cross));
}

void transport() {
  bool pass = true;
  std::string values;
  for (double th : {0.3, 0.7}) {
    const SpinorHistory eig = evolve(plane_wave(16, 2, Branch::positive, Coin{th}), Coin{th}, 20);
    const SpinorHistory pkt = evolve(smooth_packet(16, th, 0.4, 0.5), Coin{th}, 20);
    for (const SpinorHistory* h : {&eig, &pkt}) {
      try {
        const TransportAudit a = transport_audit(*h, 10, 6, th);
        pass = pass && a.unique && a.exact.front() == kLedgerTransport;
        values += (values.empty() ? "" : " ") + std::string(h == &eig ? "eigenmode" : "packet") + "@" + fmt(th) +
                  "=" + a.report.note_or("exact", "none") + ":" + fmt(a.report.get(kLedgerTransport.name()).max_abs);
      } catch (const AuditError& e) {
        pass = false;
        values += std::string(" ") + e.what();
      }
    }
  }
  verdict(6, pass, "transport audit isolates one variant", values);
}

void wigner_structure() {
  const std::size_t N = 16;
  const long half = 8;
  const double th = commensurate_theta(N, 1, half, 3);
  const SpinorHistory h = evolve(plane_wave(N, 1, Branch::positive, Coin{th}), Coin{th}, 21);
  const WignerField w = wigner_at(h, 10, half);
  double worst = 1.0;
  for (const auto& sl : w.slices) {
    double total = 0.0, top = 0.0;
    for (std::size_t r = 0; r < sl.rows(); ++r)
      for (std::size_t c = 0; c < sl.cols(); ++c) {
        double m = 0.0;
        for (const auto& v : sl.cell(r, c).a) m += std::norm(v);
        total += m;
        top = std::max(top, m);
      }
    worst = std::min(worst, top / total);
  }
  const SpinorHistory rh = evolve(random_state(16, 3), Coin{0.5}, 20);
  const WignerField rw = wigner_at(rh, 10, 7);
  double herm = 0.0;
  for (const auto& sl : rw.slices)
    for (std::size_t r = 0; r < sl.rows(); ++r)
      for (std::size_t c = 0; c < sl.cols(); ++c) herm = std::max(herm, max_abs(sl.cell(r, c) - adjoint(sl.cell(r, c))));
  verdict(7, worst >= 0.999999 && herm <= 1e-12, "Wigner concentration and spin Hermiticity",
          "min_peak_fraction=" + std::to_string(worst) + " herm_dev=" + fmt(herm));
}

void convergence(const fs::path& out) {
  ExperimentConfig cfg = default_config("converge");
  cfg.out = (out / "converge").string();
  std::ostringstream log, err;
  const int code = run_experiment(cfg, log, err);
  std::string values = "exit=" + std::to_string(code);
  if (fs::exists(out / "converge" / "converge.json")) {
    const auto j = nlohmann::json::parse(slurp(out / "converge" / "converge.json"));
    for (const auto& c : j["checks"]) {
      values += " " + c["name"].get<std::string>() + "=" + fmt(c["value"].get<double>()) +
                (c["pass"].get<bool>() ? "" : "[fail]");
    }
    values += " ms_derived_slope=" + fmt(j["fits"]["ms_derived/none"]["slope"].get<double>());
  } else {
    values += " " + err.str();
  }
  verdict(8, code == kExitOk, "continuum convergence slopes", values);
}

void reproducibility(const fs::path& out) {
  bool same = true;
  std::string values;
  for (const char* cmd : {"identities", "audit", "dump-wigner"}) {
    ExperimentConfig cfg = default_config(cmd);
    cfg.out = (out / "repro" / cmd).string();
    cfg.seed = 7;
    if (std::string(cmd) == "identities") cfg.fields = 10;
    std::ostringstream log, err;
    run_experiment(cfg, log, err);
    std::vector<std::pair<fs::path, std::string>> first;
    for (const auto& e : fs::directory_iterator(cfg.out)) first.push_back({e.path(), slurp(e.path())});
    run_experiment(cfg, log, err);
    for (const auto& [p, text] : first) same = same && !text.empty() && slurp(p) == text;
    values += std::string(values.empty() ? "" : " ") + cmd + ":" + std::to_string(first.size()) + " files";
  }
  verdict(9, same, "byte-identical outputs for identical config and seed", values);
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::create_directories(out);
  discrete_calculus();
  spectral_identity();
  walk_correctness();
  eom();
  omega_identity();
  transport();
  wigner_structure();
  convergence(out);
  reproducibility(out);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
