#include <doctest.h>

#include <cmath>
#include <random>

#include "qww/lattice.hpp"

using namespace qww;

namespace {

LatticeField line(std::size_t n, Boundary b = Boundary::periodic) { return LatticeField({{"x", n, b}}); }

LatticeField random_plane(std::size_t J, std::size_t N, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  LatticeField f({{"time", J, Boundary::windowed}, {"space", N, Boundary::periodic}});
  for (auto& v : f.values()) v = cplx(nd(rng), nd(rng));
  return f;
}

// Value at (t, x) with x periodic; t must be in range.
cplx at(const LatticeField& f, long t, long x) {
  const long N = static_cast<long>(f.axes()[1].extent);
  return f[static_cast<std::size_t>(t) * f.stride(0) + static_cast<std::size_t>(((x % N) + N) % N)];
}

}  // namespace

TEST_SUITE("lattice") {
  TEST_CASE("d1 on simple periodic sequences") {
    const std::size_t n = 16;
    LatticeField c = line(n), e = line(n), alt = line(n);
    const double kappa = 2.0 * pi * 3.0 / n;
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = cplx(1.5, -0.25);
      e[i] = std::polar(1.0, kappa * static_cast<double>(i));
      alt[i] = i % 2 ? -1.0 : 1.0;
    }
    const LatticeField dc = d1(c, "x"), de = d1(e, "x"), da = d1(alt, "x");
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(dc[i]) == 0.0);
      CHECK(std::abs(de[i] - I * std::sin(kappa) * e[i]) < 1e-15);
      CHECK(std::abs(da[i]) == 0.0);
    }
  }

  TEST_CASE("d2 carries the one-half normalisation") {
    const std::size_t n = 12;
    LatticeField c = line(n), e = line(n), alt = line(n);
    const double kappa = 2.0 * pi * 5.0 / n;
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = 2.0;
      e[i] = std::polar(1.0, kappa * static_cast<double>(i));
      alt[i] = i % 2 ? -1.0 : 1.0;
    }
    const LatticeField dc = d2(c, 0), de = d2(e, 0), da = d2(alt, 0);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(dc[i]) == 0.0);
      CHECK(std::abs(de[i] - (std::cos(kappa) - 1.0) * e[i]) < 4e-15);
      CHECK(std::abs(da[i] - (-2.0) * alt[i]) < 1e-15);
    }
    // d1 composed with itself reaches two sites away
    LatticeField delta = line(n);
    delta[5] = 1.0;
    const LatticeField dd = d1(d1(delta, 0), 0), s = d2(delta, 0);
    CHECK(std::abs(dd[7] - 0.25) < 1e-15);
    CHECK(std::abs(s[7]) == 0.0);
    CHECK(std::abs(s[6] - 0.5) < 1e-15);
    CHECK(std::abs(s[5] + 1.0) < 1e-15);
  }

  TEST_CASE("windowed axis marks boundary entries invalid") {
    LatticeField f = line(6, Boundary::windowed);
    for (std::size_t i = 0; i < 6; ++i) f[i] = static_cast<double>(i * i);
    const LatticeField d = d1(f, 0), s = d2(f, 0);
    CHECK_FALSE(d.is_valid(0));
    CHECK_FALSE(d.is_valid(5));
    CHECK_FALSE(s.is_valid(0));
    for (std::size_t i = 1; i < 5; ++i) {
      CHECK(d.is_valid(i));
      CHECK(std::abs(d[i] - static_cast<double>(2 * i)) < 1e-15);
      CHECK(std::abs(s[i] - 1.0) < 1e-15);
    }
    // validity propagates through a second stencil
    const LatticeField dd = d1(d, 0);
    CHECK_FALSE(dd.is_valid(1));
    CHECK(dd.is_valid(2));
  }

  TEST_CASE("shift index algebra") {
    LatticeField f = line(8);
    f[0] = 1.0;
    const LatticeField s = shift(f, "x", 1);
    CHECK(std::abs(s[7] - 1.0) == 0.0);
    for (std::size_t i = 0; i < 7; ++i) CHECK(std::abs(s[i]) == 0.0);
    std::mt19937_64 rng(3);
    const LatticeField g = random_plane(5, 8, rng);
    CHECK(max_abs_diff(shift(g, "space", 0), g) == 0.0);
    CHECK(max_abs_diff(shift(shift(g, "space", 1), "space", -1), g) == 0.0);
    const LatticeField w = shift(g, "time", 2);
    CHECK_FALSE(w.is_valid(3 * w.stride(0)));
    CHECK(w[0] == g[2 * g.stride(0)]);
  }

  TEST_CASE("precondition errors") {
    LatticeField f = line(8);
    CHECK_THROWS_AS(d1(f, "y"), PreconditionError);
    CHECK_THROWS_AS(d2(f, 3), PreconditionError);
    CHECK_THROWS_AS(shift(f, "x", 8), PreconditionError);
    CHECK_THROWS_AS(shift(f, "x", -9), PreconditionError);
    CHECK_THROWS_AS(d1(line(2, Boundary::windowed), 0), PreconditionError);
    CHECK_THROWS_AS(f + line(9), PreconditionError);
    CHECK_THROWS_AS(LatticeField({{"x", 3, Boundary::periodic}}, std::vector<cplx>(4)), PreconditionError);
    CHECK_THROWS_AS((LatticeShape{8, 7}.validate()), PreconditionError);
    CHECK_THROWS_AS((LatticeShape{8, 2}.validate()), PreconditionError);
    CHECK_THROWS_AS((LatticeShape{2, 8}.validate()), PreconditionError);
    CHECK_NOTHROW((LatticeShape{3, 4}.validate()));
  }

  TEST_CASE("inversion identities against explicit neighbours") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
      const LatticeField f = random_plane(9, 10, rng);
      const LatticeField dt = d1(f, "time"), ddt = d2(f, "time");
      const LatticeField dx = d1(f, "space"), ddx = d2(f, "space");
      double err = 0.0;
      for (long t = 1; t < 8; ++t)
        for (long x = 0; x < 10; ++x) {
          const std::size_t i = static_cast<std::size_t>(t) * f.stride(0) + static_cast<std::size_t>(x);
          err = std::max(err, std::abs(at(f, t + 1, x) - (f[i] + dt[i] + ddt[i])));
          err = std::max(err, std::abs(at(f, t - 1, x) - (f[i] - dt[i] + ddt[i])));
          err = std::max(err, std::abs(at(f, t, x + 1) - (f[i] + dx[i] + ddx[i])));
          err = std::max(err, std::abs(at(f, t, x - 1) - (f[i] - dx[i] + ddx[i])));
        }
      CHECK(err <= 1e-13);
    }
  }

  TEST_CASE("product rule holds exactly on both axes") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 10; ++trial) {
      const LatticeField f = random_plane(7, 12, rng), g = random_plane(7, 12, rng);
      for (const char* ax : {"time", "space"}) {
        const LatticeField lhs = d1(f * g, ax);
        const LatticeField rhs = d1(f, ax) * g + f * d1(g, ax) + d1(f, ax) * d2(g, ax) + d2(f, ax) * d1(g, ax);
        CHECK(max_abs_diff(lhs, rhs) <= 1e-13);
        // without the cross terms the rule is visibly wrong
        CHECK(max_abs_diff(lhs, d1(f, ax) * g + f * d1(g, ax)) > 1e-3);
      }
    }
  }

  TEST_CASE("linearity and commutation with shifts") {
    std::mt19937_64 rng(13);
    const LatticeField f = random_plane(6, 8, rng), g = random_plane(6, 8, rng);
    const cplx a(0.3, -1.2), b(-2.0, 0.5);
    CHECK(max_abs_diff(d1(a * f + b * g, "space"), a * d1(f, "space") + b * d1(g, "space")) <= 1e-13);
    CHECK(max_abs_diff(d2(a * f + b * g, "time"), a * d2(f, "time") + b * d2(g, "time")) <= 1e-13);
    CHECK(max_abs_diff(d1(shift(f, "space", 3), "space"), shift(d1(f, "space"), "space", 3)) == 0.0);
    CHECK(max_abs_diff(d2(shift(f, "space", -2), "time"), shift(d2(f, "time"), "space", -2)) == 0.0);
  }

  TEST_CASE("d2 scale hook is visible to the identities") {
    std::mt19937_64 rng(14);
    const LatticeField f = random_plane(5, 6, rng);
    testing::set_d2_scale(2.0);
    const double err = max_abs_diff(shift(f, "space", 1), f + d1(f, "space") + d2(f, "space"));
    testing::set_d2_scale(1.0);
    CHECK(err > 1e-2);
    CHECK(max_abs_diff(shift(f, "space", 1), f + d1(f, "space") + d2(f, "space")) <= 1e-13);
  }
}
