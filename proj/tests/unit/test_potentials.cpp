#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "nlsv/error.hpp"
#include "nlsv/potentials.hpp"

using namespace nlsv;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE("potentials") {
  TEST_CASE("kato norm closed forms") {
    CHECK(kato_norm(PotentialSpec::ball_indicator(1.0, 1.0)) == doctest::Approx(2.0 * kPi).epsilon(1e-3));
    CHECK(kato_norm(PotentialSpec::yukawa(1.0, 1.0)) == doctest::Approx(4.0 * kPi).epsilon(1e-3));
    // Newton potential at the center: 2 pi |A| sigma^2 and 4 pi |A| / mu.
    CHECK(kato_norm(PotentialSpec::gaussian_well(-0.3, 1.7)) == doctest::Approx(2.0 * kPi * 0.3 * 1.7 * 1.7).epsilon(1e-9));
    CHECK(kato_norm(PotentialSpec::yukawa(-2.0, 0.5)) == doctest::Approx(16.0 * kPi).epsilon(1e-9));
    CHECK(kato_norm(PotentialSpec::ball_indicator(3.0, 0.5)) == doctest::Approx(2.0 * kPi * 3.0 * 0.25).epsilon(1e-9));
    CHECK(kato_norm(PotentialSpec::zero()) == 0.0);
  }

  TEST_CASE("kato norm is invariant under translation and critical rescaling") {
    const PotentialSpec v = PotentialSpec::gaussian_bump(1.3, 0.8);
    const double k = kato_norm(v);
    CHECK(kato_norm(PotentialSpec::gaussian_bump(1.3, 0.8, {1.0, -2.0, 0.5})) == doctest::Approx(k).epsilon(1e-9));
    for (double r : {0.5, 2.0, 3.7}) CHECK(kato_norm(v.rescaled(r)) == doctest::Approx(k).epsilon(1e-9));
    const PotentialSpec y = PotentialSpec::yukawa(0.7, 1.3);
    CHECK(kato_norm(y.rescaled(2.5)) == doctest::Approx(kato_norm(y)).epsilon(1e-8));
  }

  TEST_CASE("kato norm of separated members on the lattice path") {
    // Two unit gaussians 10 apart: the sup sits at a center, where the far
    // member adds its Newton potential pi^{3/2} erf(10) / 10.
    const PotentialSpec v = PotentialSpec::sum(
        {PotentialSpec::gaussian_bump(1.0, 1.0, {-5.0, 0.0, 0.0}), PotentialSpec::gaussian_bump(1.0, 1.0, {5.0, 0.0, 0.0})});
    CHECK_FALSE(v.common_center().has_value());
    const double oracle = 2.0 * kPi + std::pow(kPi, 1.5) * std::erf(10.0) / 10.0;
    CHECK(kato_norm(v) == doctest::Approx(oracle).epsilon(5e-3));
  }

  TEST_CASE("L^{3/2} norms") {
    CHECK(l32_norm(potential_profile(PotentialSpec::gaussian_bump(2.0, 1.5))) ==
          doctest::Approx(2.0 * kPi * 2.25 / 1.5).epsilon(1e-8));
    CHECK(l32_norm(potential_profile(PotentialSpec::ball_indicator(-1.5, 2.0))) ==
          doctest::Approx(1.5 * std::pow(4.0 * kPi * 8.0 / 3.0, 2.0 / 3.0)).epsilon(1e-8));
  }

  TEST_CASE("admissibility report") {
    const AdmissibilityReport zero = admissibility(PotentialSpec::zero());
    CHECK(zero.kato_norm == 0.0);
    CHECK(zero.repulsive);
    REQUIRE(zero.confining_kato.has_value());
    CHECK(*zero.confining_kato == 0.0);

    const AdmissibilityReport bump = admissibility(PotentialSpec::gaussian_bump(1.0, 1.0));
    CHECK(bump.repulsive);
    CHECK(bump.kato_norm_negative == 0.0);
    CHECK(bump.kato_norm_positive == doctest::Approx(bump.kato_norm));
    REQUIRE(bump.confining_kato.has_value());
    CHECK(*bump.confining_kato == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(bump.passes_confining_4pi.value());

    const double A = -0.5 / (2.0 * kPi * 0.25);
    const AdmissibilityReport well = admissibility(PotentialSpec::gaussian_well(A, 0.5));
    CHECK(well.kato_norm_negative == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(well.passes_small_negative);
    CHECK_FALSE(well.repulsive);
    // The center value of the Newton potential of (x.grad V)_+ bounds the sup.
    CHECK(*well.confining_kato >= 4.0 * kPi * std::abs(A) * 0.25 * (1.0 - 1e-9));

    const AdmissibilityReport ball = admissibility(PotentialSpec::ball_indicator(1.0, 1.0));
    CHECK_FALSE(ball.confining_kato.has_value());
    CHECK_FALSE(ball.repulsive);

    const AdmissibilityReport deep = admissibility(PotentialSpec::yukawa(-1.2, 1.0));
    CHECK_FALSE(deep.passes_small_negative);
    CHECK(admissibility(PotentialSpec::yukawa(0.8, 2.0)).repulsive);
  }

  TEST_CASE("sampling on the grid") {
    const Grid g(64, 16.0);
    const PotentialSpec v = PotentialSpec::gaussian_bump(2.0, 1.5, {0.5, 0.0, -1.0});
    const RealField f = evaluate(v, g);
    const std::size_t i = g.index(40, 20, 33);
    const Vec3 x = g.point(i) - Vec3{0.5, 0.0, -1.0};
    CHECK(f[i] == doctest::Approx(2.0 * std::exp(-dot(x, x) / 2.25)).epsilon(1e-14));
    CHECK(integrate(f) == doctest::Approx(2.0 * std::pow(kPi, 1.5) * std::pow(1.5, 3)).epsilon(1e-10));

    const RealField neg = evaluate(PotentialSpec::gaussian_well(-1.0, 1.0), g, Part::Negative);
    const RealField pos = evaluate(PotentialSpec::gaussian_well(-1.0, 1.0), g, Part::Positive);
    // V = V_+ + V_- with V_- <= 0.
    CHECK(integrate(neg) == doctest::Approx(-std::pow(kPi, 1.5)).epsilon(1e-10));
    CHECK(integrate(pos) == 0.0);

    // Cell averages keep the ball volume and the yukawa mass accurate.
    CHECK(integrate(evaluate(PotentialSpec::ball_indicator(1.0, 2.0), g)) ==
          doctest::Approx(4.0 * kPi * 8.0 / 3.0).epsilon(5e-3));
    CHECK(integrate(evaluate(PotentialSpec::yukawa(1.0, 1.0), g)) == doctest::Approx(4.0 * kPi).epsilon(5e-3));
  }

  TEST_CASE("gradient and x.grad V agree with differences of values") {
    const PotentialSpec v = PotentialSpec::sum(
        {PotentialSpec::gaussian_bump(1.0, 1.2, {0.3, 0.1, 0.0}), PotentialSpec::yukawa(0.5, 1.5, {0.3, 0.1, 0.0})});
    const Vec3 x{0.9, -0.4, 0.7};
    const double d = 1e-6;
    const Vec3 gv = v.gradient(x);
    CHECK(gv.x == doctest::Approx((v.value(x + Vec3{d, 0, 0}) - v.value(x - Vec3{d, 0, 0})) / (2 * d)).epsilon(1e-7));
    CHECK(gv.y == doctest::Approx((v.value(x + Vec3{0, d, 0}) - v.value(x - Vec3{0, d, 0})) / (2 * d)).epsilon(1e-7));
    CHECK(gv.z == doctest::Approx((v.value(x + Vec3{0, 0, d}) - v.value(x - Vec3{0, 0, d})) / (2 * d)).epsilon(1e-7));
    CHECK(v.x_dot_grad(x) == doctest::Approx(dot(x, gv)).epsilon(1e-12));
    CHECK_THROWS_AS(PotentialSpec::ball_indicator(1.0, 1.0).gradient(x), Error);
    CHECK_THROWS_AS(radial_derivative(PotentialSpec::ball_indicator(1.0, 1.0), Grid(16, 8.0)), Error);
  }

  TEST_CASE("rescaling and scaling") {
    const PotentialSpec v = PotentialSpec::gaussian_bump(1.5, 0.7);
    const PotentialSpec w = v.rescaled(2.0, {1.0, 0.0, 0.0});
    const Vec3 x{1.8, 0.4, -0.3};
    const Vec3 y = 0.5 * (x - Vec3{1.0, 0.0, 0.0});
    CHECK(w.value(x) == doctest::Approx(0.25 * v.value(y)).epsilon(1e-14));
    const PotentialSpec flipped = v.scaled(-1.0);
    CHECK(flipped.family() == PotentialFamily::GaussianWell);
    CHECK(flipped.value(x) == doctest::Approx(-v.value(x)));
    CHECK(v.scaled(0.0).is_zero());
  }

  TEST_CASE("construction contracts") {
    CHECK_THROWS_AS(PotentialSpec::gaussian_bump(-1.0, 1.0), Error);
    CHECK_THROWS_AS(PotentialSpec::gaussian_well(1.0, 1.0), Error);
    CHECK_THROWS_AS(PotentialSpec::ball_indicator(1.0, 0.0), Error);
    CHECK_THROWS_AS(PotentialSpec::yukawa(1.0, -1.0), Error);
    CHECK(PotentialSpec::yukawa(0.0, 1.0).is_zero());
    CHECK(std::string(to_string(PotentialFamily::BallIndicator)) == "ball_indicator");
  }
}
