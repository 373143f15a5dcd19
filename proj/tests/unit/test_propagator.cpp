#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "helpers.hpp"
#include "nlsv/error.hpp"
#include "nlsv/potentials.hpp"
#include "nlsv/propagator.hpp"

using namespace nlsv;
using testing::gaussian;

namespace {
constexpr double kPi = std::numbers::pi;

double l2_distance(const Field& a, const Field& b) { return std::sqrt(integrate_power(a - b, 2.0)); }

Trajectory synthetic(const std::vector<double>& times, auto&& linf_of_t, double lr = 1.0) {
  Trajectory t;
  for (double s : times) {
    FrameDiagnostics d;
    d.t = s;
    d.linf = linf_of_t(s);
    d.l3 = d.l4 = d.l5 = d.l6 = lr;
    t.frames.push_back(d);
  }
  return t;
}
}  // namespace

TEST_SUITE("propagator") {
  TEST_CASE("validation lists every offending key") {
    EvolutionConfig c;
    c.dt = 0.0;
    c.save_stride = 0;
    c.blowup_factor = 1.0;
    try {
      validate(c);
      FAIL("expected an error");
    } catch (const ConfigError& e) {
      CHECK(e.code() == ErrorCode::Config);
      std::vector<std::string> keys;
      for (const auto& v : e.violations()) keys.push_back(v.key);
      CHECK(std::find(keys.begin(), keys.end(), "evolution.dt") != keys.end());
      CHECK(std::find(keys.begin(), keys.end(), "evolution.save_stride") != keys.end());
      CHECK(std::find(keys.begin(), keys.end(), "evolution.blowup_factor") != keys.end());
    }
    EvolutionConfig ok;
    ok.t_end = 1.0;
    CHECK_NOTHROW(validate(ok));
  }

  TEST_CASE("free flow of a plane wave and of a gaussian") {
    const Grid g(32, 2.0 * kPi);
    const RealField zero(g);
    const Vec3 k{2.0, -1.0, 3.0};
    const Field w = Field::from_function(g, [&](const Vec3& x) { return std::exp(Complex(0.0, dot(k, x))); });
    const double t = 0.37;
    const Field wt = linear_flow(w, zero, t, 1.0);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(wt[i] - std::exp(Complex(0.0, -14.0 * t)) * w[i]));
    CHECK(err < 1e-12);

    // e^{-r^2} evolves to (1 + 4it)^{-3/2} e^{-r^2 / (1 + 4it)}; the box keeps images below 1e-12.
    const Grid h(128, 24.0);
    const Field u = linear_flow(gaussian(h, 1.0, 1.0), RealField(h), 0.5, 0.5);
    const Complex a = 1.0 + Complex(0.0, 2.0);
    double gerr = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      const Vec3 x = h.point(i);
      gerr = std::max(gerr, std::abs(u[i] - std::pow(a, -1.5) * std::exp(-dot(x, x) / a)));
    }
    CHECK(gerr < 1e-9);
  }

  TEST_CASE("mass conservation and time reversibility") {
    const Grid g(32, 16.0);
    const RealField V = evaluate(PotentialSpec::gaussian_bump(1.0, 1.5), g);
    const Field u0 = gaussian(g, 1.2, 1.5, {0.5, 0.0, 0.0}, {0.4, 0.0, 0.0});
    for (bool dealias : {false, true}) {
      const SplitStep fwd(V, 0.01, 1, dealias);
      const SplitStep back(V, -0.01, 1, dealias);
      Field u = u0;
      fwd.advance(u, 50);
      CHECK(integrate_power(u, 2.0) == doctest::Approx(integrate_power(u0, 2.0)).epsilon(1e-12));
      back.advance(u, 50);
      CHECK(l2_distance(u, u0) < 1e-11 * std::sqrt(integrate_power(u0, 2.0)));
    }
    // Fused steps equal repeated single steps.
    const SplitStep s(V, 0.01, 1, false);
    Field a = u0, b = u0;
    s.advance(a, 7);
    for (int i = 0; i < 7; ++i) s.advance(b);
    CHECK(l2_distance(a, b) < 1e-12);
  }

  TEST_CASE("second order in time") {
    const Grid g(32, 12.0);
    const RealField V = evaluate(PotentialSpec::gaussian_bump(1.0, 1.0), g);
    const Field u0 = gaussian(g, 1.0, 1.5);
    auto run = [&](double dt) {
      Field u = u0;
      SplitStep(V, dt, 1, false).advance(u, static_cast<int>(std::llround(0.5 / dt)));
      return u;
    };
    const Field ref = run(0.5 / 400);
    const double e1 = l2_distance(run(0.5 / 25), ref);
    const double e2 = l2_distance(run(0.5 / 50), ref);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
  }

  TEST_CASE("evolve records frames and conserves energy without dealiasing") {
    const Grid g(32, 16.0);
    const RealField V = evaluate(PotentialSpec::gaussian_bump(0.5, 1.0), g);
    EvolutionConfig c;
    c.dt = 0.01;
    c.t_end = 0.5;
    c.save_stride = 10;
    c.dealias = false;
    const Trajectory t = evolve(gaussian(g, 0.8, 1.5), V, c);
    CHECK_FALSE(t.aborted());
    REQUIRE(t.frames.size() == 6u);
    CHECK(t.frames.back().t == doctest::Approx(0.5));
    CHECK(t.frames.back().step == 50);
    for (const auto& f : t.frames) {
      CHECK(f.mass == doctest::Approx(t.frames[0].mass).epsilon(1e-12));
      CHECK(f.energy_v == doctest::Approx(t.frames[0].energy_v).epsilon(1e-3));
    }
  }

  TEST_CASE("resolution loss aborts and keeps the frames") {
    const Grid g(32, 16.0);
    EvolutionConfig c;
    c.dt = 1e-3;
    c.t_end = 1.0;
    c.save_stride = 5;
    c.blowup_factor = 1.5;
    const Trajectory t = evolve(gaussian(g, 4.0, 1.0), RealField(g), c);
    CHECK(t.status == EvolutionStatus::ResolutionLoss);
    CHECK(t.abort_step > 0);
    CHECK(t.frames.size() >= 2u);
    CHECK(t.frames.back().step == t.abort_step);
    CHECK(t.abort_reason.find("resolution loss") != std::string::npos);
    CHECK(std::string(to_string(t.status)) == "resolution_loss");
  }

  TEST_CASE("wraparound horizon of a gaussian") {
    // |u^|^2 of e^{-r^2/w^2} has per-axis variance 1/w^2.
    for (double w : {1.0, 1.5}) {
      const Grid g(64, 24.0);
      CHECK(wraparound_horizon(gaussian(g, 1.0, w)) == doctest::Approx(0.1 * 24.0 * w).epsilon(1e-8));
    }
  }

  TEST_CASE("decay probe on a synthetic power law") {
    std::vector<double> ts;
    for (double s = 0.5; s <= 10.0 + 1e-9; s += 0.25) ts.push_back(s);
    const Trajectory t = synthetic(ts, [](double s) { return 3.0 * std::pow(s, -1.5); });
    const DecayFit f = dispersive_decay_probe(t, 1.0, 10.0);
    CHECK(f.exponent == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(f.points == 37);
    CHECK_THROWS_AS(dispersive_decay_probe(t, 1.0, 9.0), Error);
    CHECK_THROWS_AS(dispersive_decay_probe(t, 0.0, 9.0), Error);
    CHECK_THROWS_AS(dispersive_decay_probe(t, 20.0, 300.0), Error);
  }

  TEST_CASE("admissible pairs and the S-norm proxy") {
    for (const auto& p : admissible_pairs()) CHECK(2.0 / p.q + 3.0 / p.r == doctest::Approx(1.0).epsilon(1e-15));
    std::vector<double> ts;
    for (int i = 0; i <= 20; ++i) ts.push_back(0.1 * i);
    const SNormProxy s = s_norm_proxy(synthetic(ts, [](double) { return 1.0; }, 2.0));
    // Constant norms c over [0, 2]: c 2^{1/q}, largest at the smallest q.
    CHECK(s.value == doctest::Approx(2.0 * std::pow(2.0, 0.25)).epsilon(1e-12));
    CHECK(s.per_pair[2] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(s.per_pair[0] == doctest::Approx(2.0 * std::pow(2.0, 0.2)).epsilon(1e-12));
  }

  TEST_CASE("scattering increments vanish for the linear flow") {
    const Grid g(32, 16.0);
    const RealField V = evaluate(PotentialSpec::gaussian_bump(1.0, 1.0), g);
    EvolutionConfig c;
    c.dt = 0.01;
    c.t_end = 0.4;
    c.sigma = 0;
    c.save_stride = 10;
    c.keep_fields = true;
    c.dealias = false;
    const Trajectory t = evolve(gaussian(g, 1.0, 1.5, {}, {0.5, 0.0, 0.0}), V, c);
    const ScatteringSeries s = scattering_extract(t, V);
    REQUIRE(s.cauchy_increments.size() == 4u);
    for (double inc : s.cauchy_increments) CHECK(inc < 1e-10);
    CHECK(l2_distance(scattering_state(t, V, 4), t.fields[0]) < 1e-10);
    Trajectory bare = t;
    bare.fields.clear();
    CHECK_THROWS_AS(scattering_extract(bare, V), Error);
  }

  TEST_CASE("trajectory CSV layout") {
    const auto dir = testing::temp_dir("trajectory_csv");
    const Grid g(16, 8.0);
    EvolutionConfig c;
    c.dt = 0.01;
    c.t_end = 0.05;
    c.save_stride = 1;
    const Trajectory t = evolve(gaussian(g, 0.5, 1.0), RealField(g), c);
    const std::string path = (dir / "traj.csv").string();
    write_trajectory_csv(t, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "# nlsv trajectory v1");
    std::getline(in, line);
    CHECK(line == "t,mass,E_V,E_0,L4,Linf,g,z_R,dz_analytic,d2z_analytic");
    int rows = 0;
    while (std::getline(in, line)) {
      CHECK(std::count(line.begin(), line.end(), ',') == 9);
      ++rows;
    }
    CHECK(rows == 6);
    CHECK_THROWS_AS(write_trajectory_csv(t, "/proc/nlsv/nope.csv"), Error);
  }
}
