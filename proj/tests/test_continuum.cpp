#include <doctest.h>

#include <cmath>
#include <random>

#include "qww/continuum.hpp"

using namespace qww;

namespace {

Mat2 random_mat(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Mat2 m;
  for (auto& v : m.a) v = cplx(nd(rng), nd(rng));
  return m;
}

ScalingFamily small_family(double mass) {
  ScalingFamily f;
  f.eps = {0.125};
  f.mass = mass;
  f.box_length = 4.0;
  f.samples = 8;
  return f;
}

}  // namespace

TEST_SUITE("continuum") {
  TEST_CASE("coin expansion") {
    CHECK(max_abs(expand_coin(0.0) - Mat2::identity()) == 0.0);
    const Mat2 e = expand_coin(0.2);
    CHECK(e(0, 0) == e(1, 1));
    CHECK(std::abs(e(0, 0) - 0.98) < 1e-15);
    CHECK(std::abs(e(0, 1) - cplx(0.0, -0.2)) < 1e-15);

    std::vector<std::pair<double, double>> pts;
    for (double t : {0.2, 0.1, 0.05, 0.025}) pts.push_back({t, max_abs(Coin{t}.matrix() - expand_coin(t))});
    CHECK(std::abs(convergence_order(pts).slope - 3.0) <= 0.2);
  }

  TEST_CASE("mass term against its expansion") {
    std::mt19937_64 rng(1);
    const Mat2 w = random_mat(rng);
    std::vector<std::pair<double, double>> pts;
    for (double t : {0.2, 0.1, 0.05, 0.025}) {
      const Mat2 exact = right_action(Coin{t}.matrix() - Mat2::identity(), w);
      const Mat2 approx = right_action(expand_coin(t) - Mat2::identity(), w);
      pts.push_back({t, max_abs(exact - approx)});
      // leading order is -i theta s1 |> W
      CHECK(max_abs(exact - (-I * t) * right_action(pauli_x(), w)) <= t * t * max_abs(w) * 2.0);
    }
    CHECK(std::abs(convergence_order(pts).slope - 3.0) <= 0.2);
  }

  TEST_CASE("slope fit") {
    std::vector<std::pair<double, double>> exact, noisy;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-0.01, 0.01);
    for (double e : {0.125, 0.0625, 0.03125, 0.015625}) {
      exact.push_back({e, 3.0 * e * e});
      noisy.push_back({e, 3.0 * e * e * (1.0 + u(rng))});
    }
    const SlopeFit f = convergence_order(exact);
    CHECK(std::abs(f.slope - 2.0) < 1e-12);
    CHECK(std::abs(std::exp(f.intercept) - 3.0) < 1e-10);
    CHECK(std::abs(f.r2 - 1.0) < 1e-12);
    CHECK(f.points == 4);
    CHECK(std::abs(convergence_order(noisy).slope - 2.0) < 0.03);

    CHECK_THROWS_AS(convergence_order(std::span(exact).first(3)), PreconditionError);
    auto bad = exact;
    bad[1].second = 0.0;
    CHECK_THROWS_AS(convergence_order(bad), PreconditionError);
    const std::vector<std::pair<double, double>> same(4, {0.1, 1.0});
    CHECK_THROWS_AS(convergence_order(same), PreconditionError);
  }

  TEST_CASE("continuum operator: variant and correction differences") {
    std::mt19937_64 rng(3);
    const double eps = 0.05, m = 1.3;
    for (int trial = 0; trial < 20; ++trial) {
      const Mat2 w = random_mat(rng), dj = random_mat(rng), dp = random_mat(rng), cl = random_mat(rng);
      const double kt = 2.1, kx = -0.7;
      auto op = [&](const ContinuumVariant& v, Correction c) {
        return continuum_operator(w, dj, dp, cl, kt, kx, eps, m, v, c);
      };
      const Mat2 phase = I * (cplx(kt) * w - cplx(kx) * right_action(pauli_z(), w));
      const Mat2 mass = I * cplx(m) * right_action(pauli_x(), w);
      const Mat2 diff = op(kPrintedContinuum, Correction::none) - op(kAuditContinuum, Correction::none);
      CHECK(max_abs(diff - (cplx(2.0) * phase - mass)) <= 1e-12);

      const Mat2 drift = cplx(eps * m) * right_action(pauli_y(), cplx(1.0 / eps) * dp - I * kx * w);
      CHECK(max_abs(op(kAuditContinuum, Correction::audited) - op(kAuditContinuum, Correction::none) - drift) <= 1e-12);
      CHECK(max_abs(op(kAuditContinuum, Correction::printed) - op(kAuditContinuum, Correction::none) + drift -
                    cplx(2.5 * eps * m * m) * w) <= 1e-12);

      const Mat2 base = cplx(1.0 / eps) * (dj - right_action(pauli_z(), dp) - cl);
      CHECK(max_abs(op(kAuditContinuum, Correction::none) - (base - phase + cplx(2.0) * mass)) <= 1e-12);
    }
    CHECK(kAuditContinuum.name() == "audit");
    CHECK(kPrintedContinuum.name() == "printed");
    CHECK(residual_key(ContinuumVariant{1, 2}, Correction::audited) == "phase=1,mass=2/audited");
    CHECK(continuum_variants().size() == 4);
  }

  TEST_CASE("continuous residual on a zero field and mismatched grids") {
    const SpinorHistory h = evolve(random_state(8, 4), Coin{0.2}, 14);
    const WignerField a = wigner_at(h, 6, 3), b = wigner_at(h, 7, 3), c = wigner_at(h, 8, 3);
    const ResidualReport r = continuous_residual(a, b, c, 0.2, 1.0);
    CHECK(r.entries().size() == 12);
    CHECK(r.note_or("closure", "") == "none");
    for (const auto& e : r.entries()) CHECK(std::isfinite(e.l2));

    const SpinorHistory z = evolve(SpinorState(8), Coin{0.2}, 14);
    const WignerField za = wigner_at(z, 6, 3), zb = wigner_at(z, 7, 3), zc = wigner_at(z, 8, 3);
    for (const auto& e : continuous_residual(za, zb, zc, 0.2, 1.0).entries()) CHECK(e.l2 == 0.0);

    const WignerField other = wigner_at(h, 7, 2);
    CHECK_THROWS_AS(continuous_residual(a, other, c, 0.2, 1.0), PreconditionError);
    CHECK_THROWS_AS(continuous_residual(a, b, c, 0.0, 1.0), PreconditionError);
  }

  TEST_CASE("member layout") {
    ScalingFamily f;
    f.eps = {0.125};
    const MemberLayout l = member_layout(f, 0.125);
    CHECK(l.sites == 128);
    CHECK(std::abs(l.theta - 0.125) < 1e-15);
    CHECK(l.taper.kind == TaperKind::gaussian);
    CHECK(std::abs(l.taper.width - 4.0) < 1e-15);
    CHECK(l.half == gaussian_half_window(4.0));
    CHECK(l.steps == static_cast<std::size_t>(2 * l.half + 3));
    CHECK(l.j0 == l.half + 1);

    CHECK_THROWS_AS(member_layout(f, 0.3), PreconditionError);
    f.box_length = 0.375;
    CHECK_THROWS_AS(member_layout(f, 0.125), PreconditionError);
    f.box_length = 16.0;
    f.t_final = 1.0;
    CHECK_THROWS_AS(member_layout(f, 0.125), PreconditionError);
    f.t_final = 100.0;
    CHECK(member_layout(f, 0.125).steps == 801);

    ScalingFamily g;
    CHECK_THROWS_AS(g.validate(), PreconditionError);
    g.eps = {2.0};
    CHECK_THROWS_AS(g.validate(), PreconditionError);
  }

  TEST_CASE("small member run") {
    const ScalingFamily f = small_family(1.0);
    const MemberResult r = run_member(f, 0.125);
    CHECK(r.rows.size() == 12);
    CHECK(r.norm(kAuditContinuum, Correction::audited) < r.norm(kPrintedContinuum, Correction::printed));
    CHECK(r.norm(kAuditContinuum, Correction::audited) < r.norm(kAuditContinuum, Correction::none));
    CHECK(r.edge_magnitude < 1e-10);
    CHECK(r.ms_stated > 0.0);

    const MemberResult again = run_member(f, 0.125);
    for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(again.rows[i].norm == r.rows[i].norm);
    CHECK(again.ms_derived == r.ms_derived);

    const std::vector<MemberResult> fam = run_family(f);
    REQUIRE(fam.size() == 1);
    CHECK(fam[0].rows[3].norm == r.rows[3].norm);
  }

  TEST_CASE("massless member: mass coefficient drops out") {
    const MemberResult r = run_member(small_family(0.0), 0.125);
    for (int s : {1, -1})
      for (Correction c : kCorrections)
        CHECK(r.norm(ContinuumVariant{s, 1}, c) == doctest::Approx(r.norm(ContinuumVariant{s, 2}, c)).epsilon(1e-14));
    CHECK(r.ms_stated == doctest::Approx(r.ms_derived).epsilon(1e-14));
  }
}
