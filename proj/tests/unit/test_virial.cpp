#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "nlsv/error.hpp"
#include "nlsv/virial.hpp"

using namespace nlsv;
using testing::gaussian;

TEST_SUITE("virial_diagnostics") {
  TEST_CASE("radial cutoff profile") {
    for (double s : {0.0, 0.3, 0.999}) {
      const auto p = cutoff_radial(s);
      CHECK(p[0] == doctest::Approx(s * s).epsilon(1e-14));
      CHECK(p[1] == doctest::Approx(2.0 * s).epsilon(1e-14));
      CHECK(p[2] == doctest::Approx(2.0).epsilon(1e-14));
      CHECK(p[3] == doctest::Approx(0.0).epsilon(1e-14));
      CHECK(p[4] == doctest::Approx(0.0).epsilon(1e-14));
    }
    for (double s : {2.0, 2.5, 7.0})
      for (double v : cutoff_radial(s)) CHECK(v == 0.0);
    // C^4 across both joints: jumps shrink linearly with the offset, at the
    // rate of the fifth derivative (|phi^(5)| < 4e4 on [1, 2]).
    for (double joint : {1.0, 2.0})
      for (double d : {1e-7, 1e-9}) {
        const auto lo = cutoff_radial(joint - d);
        const auto hi = cutoff_radial(joint + d);
        for (int k = 0; k < 5; ++k) CHECK(std::abs(lo[k] - hi[k]) < 8e4 * d);
      }
    double top = 0.0;
    for (double s = 0.0; s <= 2.5; s += 1e-4) {
      const double v = cutoff_radial(s)[0];
      top = std::max(top, v);
      CHECK(v <= s * s + 1e-14);
    }
    CHECK(top <= kCutoffBound);
    CHECK(top > kCutoffBound - 0.05);
  }

  TEST_CASE("sampled cutoff fields") {
    const Grid g(64, 16.0);
    const double R = 3.0;
    const CutoffProfile c = build_cutoff(g, R);
    double int_lap = 0.0, int_bilap = 0.0, scale = 0.0, grad_err = 0.0, grad_scale = 0.0;
    Field chi(g);
    for (std::size_t i = 0; i < g.size(); ++i) chi[i] = c.chi[i];
    const auto dchi = spectral_gradient(chi);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Vec3 x = g.point(i);
      const double r2 = dot(x, x);
      CHECK(c.chi[i] <= std::min(r2, kCutoffBound * R * R) + 1e-12);
      if (r2 < 0.9 * R * R) {
        CHECK(c.chi[i] == doctest::Approx(r2).epsilon(1e-14));
        CHECK(c.lap[i] == doctest::Approx(6.0).epsilon(1e-12));
        CHECK(std::abs(c.bilap[i]) < 1e-10);
        CHECK(c.hess[0][i] == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(std::abs(c.hess[3][i]) < 1e-12);
      }
      if (r2 > 4.0 * R * R) CHECK(c.chi[i] == 0.0);
      int_lap += c.lap[i];
      int_bilap += c.bilap[i];
      scale += std::abs(c.bilap[i]);
      for (int k = 0; k < 3; ++k) {
        grad_err = std::max(grad_err, std::abs(dchi[k][i].real() - c.grad[k][i]));
        grad_scale = std::max(grad_scale, std::abs(c.grad[k][i]));
      }
    }
    // Compact support: the integrals of divergences vanish, up to the lattice
    // sum error of an integrand whose next derivative jumps at R and 2R.
    CHECK(std::abs(int_lap) < 1e-6 * scale);
    CHECK(std::abs(int_bilap) < 1e-3 * scale);
    CHECK(grad_err < 1e-3 * grad_scale);
    CHECK_THROWS_AS(build_cutoff(g, 4.0), Error);
    CHECK_THROWS_AS(build_cutoff(g, 0.0), Error);
  }

  TEST_CASE("first virial derivative: real data and boosts") {
    const Grid g(64, 16.0);
    const CutoffProfile c = build_cutoff(g, 3.5);
    CHECK(virial_first(gaussian(g, 1.0, 1.0, {0.7, -0.2, 0.0}), c) == 0.0);
    // u = a e^{i k x_1} with a centered at c_1: dz = 4 k c_1 ||a||^2 while the support sits where chi = |x|^2.
    const double k = 0.8, c1 = 0.6;
    const Field u = gaussian(g, 1.0, 1.0, {c1, 0.0, 0.0}, {k, 0.0, 0.0});
    const double mass = integrate_power(u, 2.0);
    CHECK(virial_first(u, c) == doctest::Approx(4.0 * k * c1 * mass).epsilon(1e-6));
    const Field in = gaussian(g, 1.0, 1.0, {c1, 0.0, 0.0}, {-k, 0.0, 0.0});
    CHECK(virial_first(in, c) < 0.0);
    CHECK(virial_z(u, c) == doctest::Approx(mass * (c1 * c1 + 0.75)).epsilon(1e-6));
  }

  TEST_CASE("second derivative reduces to the coercivity quantity for localized data") {
    const Grid g(64, 16.0);
    const CutoffProfile c = build_cutoff(g, 3.5);
    const Field u = gaussian(g, 1.3, 0.9, {0.2, 0.0, -0.1}, {0.3, 0.2, 0.0});
    const double zero_v = virial_second(u, PotentialSpec::zero(), c);
    const FormValues f = form_values(u, RealField(g));
    CHECK(zero_v == doctest::Approx(8.0 * f.grad_sq - 6.0 * f.l4_fourth).epsilon(1e-7));
    CHECK(coercivity_probe(u, PotentialSpec::zero()) == doctest::Approx(zero_v).epsilon(1e-7));
    const PotentialSpec bump = PotentialSpec::gaussian_bump(1.0, 0.6);
    CHECK(virial_second(u, bump, c) == doctest::Approx(coercivity_probe(u, bump)).epsilon(1e-6));
    CHECK(virial_second(u, bump, c, -1) == doctest::Approx(coercivity_probe(u, bump) + 12.0 * f.l4_fourth).epsilon(1e-6));
  }

  TEST_CASE("defocusing beta") {
    CHECK(defocusing_beta(admissibility(PotentialSpec::zero())) == doctest::Approx(8.0));
    const double b = defocusing_beta(admissibility(PotentialSpec::gaussian_bump(1.0, 1.0)));
    CHECK(b > 0.0);
    CHECK(b < 8.0);
    try {
      defocusing_beta(admissibility(PotentialSpec::ball_indicator(1.0, 1.0)));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Unsupported);
    }
  }

  TEST_CASE("finite differences of a synthetic series are second order") {
    auto errors = [](double h) {
      Trajectory t;
      for (int i = 0; i * h <= 2.0 + 1e-12; ++i) {
        FrameDiagnostics d;
        d.t = i * h;
        d.z = std::sin(d.t);
        d.dz = std::cos(d.t);
        d.d2z = -std::sin(d.t);
        t.frames.push_back(d);
      }
      return virial_errors(virial_series(t));
    };
    const VirialErrors a = errors(0.1), b = errors(0.05);
    CHECK(a.dz / b.dz == doctest::Approx(4.0).epsilon(0.05));
    CHECK(a.d2z / b.d2z == doctest::Approx(4.0).epsilon(0.05));
    Trajectory bare;
    bare.frames.resize(3);
    CHECK_THROWS_AS(virial_series(bare), Error);
  }

  TEST_CASE("hooked evolution agrees with finite differences") {
    const Grid g(32, 16.0);
    const PotentialSpec bump = PotentialSpec::gaussian_bump(1.0, 1.0);
    const CutoffProfile c = build_cutoff(g, 3.5);
    EvolutionConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.1;
    cfg.save_stride = 1;
    cfg.dealias = false;
    const Trajectory t = evolve(gaussian(g, 1.0, 1.2), evaluate(bump, g), cfg, virial_hook(bump, c, 1));
    REQUIRE_FALSE(t.aborted());
    for (const auto& f : t.frames) {
      CHECK(f.z.has_value());
      CHECK(f.coercivity.has_value());
    }
    const VirialErrors e = virial_errors(virial_series(t));
    CHECK(e.dz < 1e-3);
    CHECK(e.d2z < 1e-3);
  }
}
