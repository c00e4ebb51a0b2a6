#include <doctest.h>

#include <cmath>

#include "stpa/channel.hpp"
#include "stpa/rng.hpp"

using namespace stpa;

namespace {
constexpr double kTestPi = 3.141592653589793;
}

TEST_SUITE("jcas-channel") {
  TEST_CASE("steering vector phases") {
    const auto g = make_geometry({{0, 0}, {0.5, 0}, {0.3, 1.2}}, {});
    const auto a = steering_vector(g, 30.0, 40.0);
    const double u = std::cos(kTestPi / 6) * std::cos(40 * kTestPi / 180);
    const double v = std::cos(kTestPi / 6) * std::sin(40 * kTestPi / 180);
    for (int n = 0; n < 3; ++n) {
      CHECK(std::abs(a[n]) == doctest::Approx(1.0));
      const double expected = 2 * kTestPi * (u * g.elements[n].x + v * g.elements[n].y);
      CHECK(std::abs(a[n] - std::polar(1.0, expected)) < 1e-12);
    }
    const auto zenith = steering_vector(g, 90.0, 10.0);
    for (int n = 0; n < 3; ++n) CHECK(std::abs(zenith[n] - cdouble(1.0, 0.0)) < 1e-12);
    const auto doubled = steering_vector(g, 30.0, 40.0, 2.0);
    CHECK(std::abs(doubled[2] - a[2] * a[2]) < 1e-12);
  }

  TEST_CASE("LOS magnitude at 50 m and 28 GHz") {
    const auto g = make_uniform_grid(2, 2);
    const auto h = los_component(g, 50.0, 70.0, 50.0, g.design_wavelength_m());
    CHECK(std::abs(h[0]) == doctest::Approx(1.704e-5).epsilon(1e-3));
    CHECK(std::abs(h[3]) == doctest::Approx(std::abs(h[0])));
    CHECK_THROWS(los_component(g, 0.0, 70.0, 50.0, 0.01));
  }

  TEST_CASE("NLOS power is 10 dB below LOS on average") {
    const auto g = make_geometry({{0, 0}, {0.5, 0}}, {});
    const double p_los = 2.5e-9;
    ClusterSpec spec;
    double acc = 0.0;
    const int trials = 20000;
    for (int i = 0; i < trials; ++i) acc += sample_nlos_channel(g, spec, p_los, stream_seed(3, "nlos-test", i)).nlos.squaredNorm();
    const double ratio = acc / trials / (2.0 * p_los);
    CHECK(ratio == doctest::Approx(0.1).epsilon(0.02));
  }

  TEST_CASE("NLOS rays are drawn within the cluster spread and the hemisphere") {
    const auto g = make_uniform_grid(3, 3);
    ClusterSpec spec;
    const auto ch = sample_nlos_channel(g, spec, 1.0, 8);
    REQUIRE(ch.paths.size() == 80);
    for (int c = 0; c < 8; ++c)
      for (int r = 0; r < 10; ++r) {
        const auto& p = ch.paths[c * 10 + r];
        CHECK(p.theta_t_deg >= 0.0);
        CHECK(p.theta_t_deg <= 90.0);
        CHECK(p.phi_t_deg >= -180.0);
        CHECK(p.phi_t_deg < 180.0);
      }
    CHECK(sample_nlos_channel(g, spec, 1.0, 8).h == ch.h);
    spec.power_offset_db = -INFINITY;
    CHECK(sample_nlos_channel(g, spec, 1.0, 8).h.norm() == 0.0);
  }

  TEST_CASE("body reflection coefficient") {
    const cdouble eps(0.1, -2.33);
    // Normal incidence: (eps - sqrt(eps)) / (eps + sqrt(eps)).
    const cdouble r = std::sqrt(eps);
    const cdouble normal = (eps - r) / (eps + r);
    CHECK(std::abs(body_reflection_coeff(90.0, eps, 0.0, 1) - normal) < 1e-12);

    const double d = 40.0 * kTestPi / 180.0;
    const cdouble root = std::sqrt(eps - std::cos(d) * std::cos(d));
    const cdouble oblique = (eps * std::sin(d) - root) / (eps * std::sin(d) + root);
    CHECK(std::abs(body_reflection_coeff(40.0, eps, 0.0, 1) - oblique) < 1e-12);
    CHECK(std::abs(oblique) < 1.0);

    CHECK(sigma_db_to_linear(0.45) == doctest::Approx(std::pow(10.0, 0.0225) - 1.0));
    cdouble mean(0.0, 0.0);
    double var = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const cdouble g = body_reflection_coeff(40.0, eps, 0.45, stream_seed(9, "gamma", i));
      mean += g / static_cast<double>(n);
      var += std::norm(g - oblique) / n;
    }
    const double sigma = sigma_db_to_linear(0.45);
    CHECK(std::abs(mean - oblique) < 4.0 * sigma / std::sqrt(n));
    CHECK(var == doctest::Approx(sigma * sigma).epsilon(0.05));
    CHECK_THROWS(body_reflection_coeff(0.0, eps, 0.0, 1));
  }

  TEST_CASE("blockage geometry") {
    BlockageScenario s;
    const auto at_ue = blockage_target_ranges(s, s.theta_ue_deg);
    CHECK(at_ue.r_t == doctest::Approx(s.r_m));
    CHECK(at_ue.r_r == doctest::Approx(s.r_ue - s.r_m));
    const auto off = blockage_target_ranges(s, s.theta_ue_deg - 10.0);
    const double lateral = s.r_m * std::tan(10.0 * kTestPi / 180.0);
    CHECK(off.r_t == doctest::Approx(std::hypot(s.r_m, lateral)));
    CHECK(off.r_r == doctest::Approx(std::hypot(s.r_ue - s.r_m, lateral)));
    s.r_m = 80.0;
    CHECK_THROWS(s.validate());
  }

  TEST_CASE("blocked channel drops the LOS and uses the diffraction coefficient") {
    const auto g = make_uniform_grid(4, 4).centered();
    BlockageScenario s;
    const auto nlos = sample_nlos_channel(g, ClusterSpec{}, 1e-9, 2);
    const auto blocked = compose_blockage_channel(g, s, 70.0, nlos, true, 5);
    CHECK(blocked.los.norm() == 0.0);
    const double lambda = g.design_wavelength_m();
    const auto ranges = blockage_target_ranges(s, 70.0);
    const double expected = lambda / (4 * kTestPi * (ranges.r_t + ranges.r_r)) * 0.1;
    CHECK(std::abs(blocked.target[0]) == doctest::Approx(expected));
    const auto clear = compose_blockage_channel(g, s, 60.0, nlos, false, 5);
    CHECK(clear.los.norm() > 0.0);
    CHECK((clear.h - clear.los - clear.nlos - clear.target).norm() < 1e-20);
    CHECK(clear.paths.size() == nlos.paths.size() + 2);
  }

  TEST_CASE("channel scale normalizes to the port count") {
    const auto tiled = make_geometry({{0, 0}, {0.5, 0}, {0, 0.5}, {0.5, 0.5}}, {{0, 1}, {2, 3}});
    CHECK(port_count(tiled) == 2);
    CHECK(port_count(make_uniform_grid(3, 3)) == 9);
    const double s = channel_scale(tiled, 4.0, -10.0);
    CHECK(s * s * 4 * 4.0 * 1.1 == doctest::Approx(2.0));
    CHECK_THROWS(channel_scale(tiled, 0.0, -10.0));
  }
}
