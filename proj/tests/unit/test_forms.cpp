#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "nlsv/error.hpp"
#include "nlsv/forms.hpp"
#include "nlsv/ground_states.hpp"
#include "nlsv/potentials.hpp"

using namespace nlsv;
using testing::gaussian;

namespace {
constexpr double kPi = std::numbers::pi;

// e^{-|x|^2/w^2}: mass (pi/2)^{3/2} w^3, grad 3 (pi/2)^{3/2} w, L^4 (pi/4)^{3/2} w^3.
double gaussian_wv() { return std::pow(kPi / 4.0, 1.5) / (std::pow(3.0, 1.5) * std::pow(kPi / 2.0, 3.0)); }
}  // namespace

TEST_SUITE("forms_inequalities") {
  TEST_CASE("form values of a gaussian under a gaussian bump") {
    const Grid g(64, 16.0);
    const Field u = gaussian(g, 1.0, 1.0);
    const double A = 1.7, s = 1.3;
    const FormValues f = form_values(u, evaluate(PotentialSpec::gaussian_bump(A, s), g));
    const double c = std::pow(kPi / 2.0, 1.5);
    CHECK(f.mass == doctest::Approx(c).epsilon(1e-10));
    CHECK(f.grad_sq == doctest::Approx(3.0 * c).epsilon(1e-10));
    CHECK(f.l4_fourth == doctest::Approx(std::pow(kPi / 4.0, 1.5)).epsilon(1e-10));
    CHECK(f.potential_term == doctest::Approx(A * std::pow(kPi, 1.5) * std::pow(2.0 + 1.0 / (s * s), -1.5)).epsilon(1e-10));
    CHECK(f.h_form == doctest::Approx(f.grad_sq + f.potential_term).epsilon(1e-14));
    CHECK(energy(f) == doctest::Approx(0.5 * f.h_form - 0.25 * f.l4_fourth).epsilon(1e-14));
    CHECK(energy(f, -1.0) == doctest::Approx(0.5 * f.h_form + 0.25 * f.l4_fourth).epsilon(1e-14));
    CHECK(free_energy(f) == doctest::Approx(0.5 * f.grad_sq - 0.25 * f.l4_fourth).epsilon(1e-14));
  }

  TEST_CASE("plane wave on a 2 pi box") {
    const Grid g(16, 2.0 * kPi);
    const Field w = Field::from_function(g, [](const Vec3& x) { return std::exp(Complex(0.0, x.x - 2.0 * x.z)); });
    const FormValues f = form_values(w, RealField(g));
    const double L3 = std::pow(2.0 * kPi, 3);
    CHECK(f.mass == doctest::Approx(L3).epsilon(1e-12));
    CHECK(f.grad_sq == doctest::Approx(5.0 * L3).epsilon(1e-12));
    CHECK(f.l4_fourth == doctest::Approx(L3).epsilon(1e-12));
    CHECK(f.potential_term == 0.0);
  }

  TEST_CASE("W_V of a gaussian and its invariances") {
    const Grid g(64, 16.0);
    const RealField zero(g);
    const double w1 = wv(gaussian(g, 1.0, 1.0), zero);
    CHECK(w1 == doctest::Approx(gaussian_wv()).epsilon(1e-9));
    CHECK(wv(gaussian(g, 2.7, 1.0), zero) == doctest::Approx(w1).epsilon(1e-12));
    CHECK(wv(gaussian(g, 1.0, 1.4), zero) == doctest::Approx(w1).epsilon(1e-9));
    CHECK(wv(gaussian(g, 1.0, 1.0, {0.0, 0.0, 0.0}, {0.7, 0.0, 0.0}), zero) < w1);
    CHECK_THROWS_AS(wv(Field(g), zero), Error);
  }

  TEST_CASE("free ground state identities and sharpness against a gaussian") {
    const Grid g(64, 16.0);
    const FreeGroundState q = solve_free_ground_state(g);
    const RadialNorms& n = q.radial_norms;
    const double alpha = std::sqrt(n.mass * n.grad_sq);
    CHECK(n.grad_sq == doctest::Approx(3.0 * n.mass).epsilon(1e-6));
    CHECK(n.l4_fourth == doctest::Approx(4.0 * n.mass).epsilon(1e-6));
    const double w_q = n.l4_fourth / (std::sqrt(n.mass) * std::pow(n.grad_sq, 1.5));
    CHECK(w_q == doctest::Approx(4.0 / (3.0 * alpha)).epsilon(1e-6));
    CHECK(q.on_grid.wv_value == doctest::Approx(w_q).epsilon(1e-4));
    CHECK(gaussian_wv() < w_q);
    CHECK(wv(gaussian(g, 1.0, 1.0), RealField(g)) < q.on_grid.wv_value);
  }

  TEST_CASE("W_V refuses a non-coercive form") {
    FormValues f;
    f.mass = 1.0;
    f.grad_sq = 1.0;
    f.potential_term = -2.0;
    f.h_form = -1.0;
    f.l4_fourth = 1.0;
    try {
      wv(f);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Numerical);
    }
  }

  TEST_CASE("Kato positivity on random band-limited fields") {
    const Grid g(32, 16.0);
    const PotentialSpec y = PotentialSpec::yukawa(1.3, 0.9);
    const RealField V = evaluate(y, g);
    const double K = kato_norm(y);
    CHECK(K == doctest::Approx(4.0 * kPi * 1.3 / 0.9).epsilon(1e-9));
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> width(1.0, 1.6), offset(-1.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Field u = random_band_limited(g, rng, width(rng), {offset(rng), offset(rng), offset(rng)});
      const KatoPositivityCheck c = kato_positivity_check(u, V, K);
      CHECK(c.holds);
      worst = std::max(worst, c.lhs / c.rhs);
    }
    CHECK(worst < 1.0);
    CHECK_THROWS_AS(kato_positivity_check(gaussian(g, 1.0, 1.0), V, -1.0), Error);
  }

  TEST_CASE("Kato positivity fails with an undersized constant") {
    const Grid g(64, 16.0);
    const PotentialSpec v = PotentialSpec::gaussian_bump(1.0, 1.0);
    const KatoPositivityCheck c = kato_positivity_check(gaussian(g, 1.0, 1.0), evaluate(v, g), 0.1 * kato_norm(v));
    CHECK_FALSE(c.holds);
  }

  TEST_CASE("split inequality closed cases") {
    const SplitInequalityCheck ones = split_inequality_check(1, 1, 1, 1, 1, 1, 0.9);
    CHECK(ones.applicable);
    CHECK(ones.lhs == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(ones.rhs == doctest::Approx(0.8875).epsilon(1e-14));
    CHECK(ones.holds);

    const SplitInequalityCheck far = split_inequality_check(1, 10, 1, 1, 1, 1, 0.5);
    CHECK_FALSE(far.applicable);
    CHECK(far.holds);

    CHECK_THROWS_AS(split_inequality_check(0, 1, 1, 1, 1, 1, 0.5), Error);
    CHECK_THROWS_AS(split_inequality_check(1, 1, 1, -1, 1, 1, 0.5), Error);
    CHECK_THROWS_AS(split_inequality_check(1, 1, 1, 1, 1, 1, 1.0), Error);
  }

  TEST_CASE("split inequality on random sextuples") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> log10u(-2.0, 2.0), eps_u(0.01, 0.99);
    int applicable = 0;
    for (int t = 0; t < 20000; ++t) {
      const double eps = eps_u(rng);
      const double a1 = std::pow(10.0, log10u(rng));
      std::uniform_real_distribution<double> ratio(std::log(eps), -std::log(eps));
      const double a2 = a1 * std::exp(ratio(rng));
      const double b1 = std::pow(10.0, log10u(rng)), b2 = std::pow(10.0, log10u(rng));
      const double c1 = std::pow(10.0, log10u(rng)), c2 = std::pow(10.0, log10u(rng));
      const SplitInequalityCheck c = split_inequality_check(a1, a2, b1, b2, c1, c2, eps);
      applicable += c.applicable;
      if (!c.holds) {
        INFO("a=" << a1 << "," << a2 << " b=" << b1 << "," << b2 << " c=" << c1 << "," << c2 << " eps=" << eps);
        CHECK(c.holds);
      }
    }
    CHECK(applicable > 19000);
  }

  TEST_CASE("form sandwich") {
    const Grid g(64, 16.0);
    std::mt19937_64 rng(5);
    const PotentialSpec v = PotentialSpec::sum(
        {PotentialSpec::gaussian_well(-0.5 / (2.0 * kPi), 1.0), PotentialSpec::yukawa(0.4, 1.2, {1.0, 0.0, 0.0})});
    const RealField V = evaluate(v, g);
    const double k_neg = kato_norm(potential_profile(v, Part::Negative));
    const double k_tot = kato_norm(v);
    // The repulsive member only shrinks the negative part.
    CHECK(k_neg > 0.0);
    CHECK(k_neg <= 0.5 * (1.0 + 1e-6));
    for (int t = 0; t < 20; ++t) {
      const Field u = random_band_limited(g, rng, 2.0);
      const SandwichCheck s = form_sandwich(form_values(u, V), k_neg, k_tot);
      CHECK(s.holds);
      CHECK(s.lower <= s.h_form);
      CHECK(s.h_form <= s.upper);
    }
    FormValues bad;
    bad.grad_sq = 1.0;
    bad.h_form = 3.0;
    CHECK_FALSE(form_sandwich(bad, 0.0, 1.0).holds);
  }
}
