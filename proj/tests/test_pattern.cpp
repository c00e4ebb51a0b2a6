#include <doctest.h>

#include <cmath>
#include <set>

#include "stpa/pattern.hpp"
#include "stpa/rng.hpp"
#include "stpa/tiling.hpp"

using namespace stpa;

namespace {
constexpr double kTestPi = 3.141592653589793;
}

TEST_SUITE("pattern-eval") {
  TEST_CASE("angle grid image is deduplicated and inside the unit disc") {
    AngleGridSpec coarse;
    coarse.step_deg = 90.0;
    CHECK(angle_grid_uv(coarse).size() == 5);  // 4 azimuths at theta 0 plus the single zenith point

    const auto fine = angle_grid_uv({});
    std::set<std::pair<long long, long long>> keys;
    for (const auto& p : fine) {
      CHECK(p.u * p.u + p.v * p.v <= 1.0 + 1e-12);
      keys.insert({std::llround(p.u * 1e9), std::llround(p.v * 1e9)});
    }
    CHECK(keys.size() == fine.size());
    CHECK(fine.size() == 90 * 360 + 1);
  }

  TEST_CASE("two-element field has the cosine closed form") {
    const double d = 0.7;
    const auto g = make_geometry({{0, 0}, {d, 0}}, {});
    for (double zeta : {1.0, 1.5, 2.0})
      for (double ratio : {1.0, 2.5})
        for (double u : {-0.9, -0.3, 0.0, 0.41, 0.77}) {
          const double expected = std::pow(std::cos(kTestPi * zeta * ratio * u * d), 2);
          CHECK(std::norm(expanded_field(g, zeta, u, 0.3, ratio)) == doctest::Approx(expected).epsilon(1e-12));
        }
  }

  TEST_CASE("expanded beam is unit at the origin and point symmetric") {
    const auto g = geometry_from_tiling(random_perfect_tiling(ElementGrid(8, 6), 1)).centered();
    CHECK(std::norm(expanded_field(g, 1.5, 0.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-14));
    Rng rng(1);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
      const double u = d(rng), v = d(rng);
      CHECK(std::abs(std::norm(expanded_field(g, 1.5, u, v)) - std::norm(expanded_field(g, 1.5, -u, -v))) < 1e-12);
    }
  }

  TEST_CASE("array factor with steering weights peaks at the scan direction") {
    const auto g = geometry_from_tiling(random_perfect_tiling(ElementGrid(6, 6), 2)).centered();
    const auto w = tile_steering_weights(g, 0.3, -0.2);
    CHECK(w.size() == g.tile_count());
    const double peak = std::abs(array_factor(g, w, 0.3, -0.2));
    CHECK(std::abs(array_factor(g, w, 0.0, 0.0)) < peak);
    // Tile phases are set at phase centers, so the peak is below 1 but close.
    CHECK(peak > 0.9);
    CHECK(peak <= 1.0 + 1e-12);

    const auto untiled = make_uniform_grid(4, 4);
    const auto wu = tile_steering_weights(untiled, 0.3, -0.2);
    CHECK(std::abs(array_factor(untiled, wu, 0.3, -0.2)) == doctest::Approx(1.0));
  }

  TEST_CASE("scanned pattern is normalized at the steering point") {
    const auto g = make_uniform_grid(6, 6).centered();
    AngleGridSpec grid;
    grid.step_deg = 5.0;
    const auto p = scanned_pattern(g, {0.2, 0.1}, grid);
    CHECK(p.evaluate(0.2, 0.1) == doctest::Approx(1.0));
    for (double v : p.values) CHECK(v <= 1.0 + 1e-9);
  }

  TEST_CASE("main beam radii of analytic profiles") {
    const double s = 0.05;
    const auto gauss = [s](double u, double v) { return std::exp(-(u * u + v * v) / (s * s)); };
    const auto beam = measure_main_beam(gauss, {0.0, 0.0});
    CHECK(beam.half_power_radius == doctest::Approx(s * std::sqrt(std::log(2.0))).epsilon(1e-4));

    const double a = 0.08;
    const auto sinc2 = [a](double u, double v) {
      const double x = kTestPi * std::hypot(u - 0.1, v - 0.2) / a;
      return x == 0.0 ? 1.0 : std::pow(std::sin(x) / x, 2);
    };
    const auto b2 = measure_main_beam(sinc2, {0.1, 0.2});
    CHECK(b2.first_null_radius == doctest::Approx(a).epsilon(1e-3));
    CHECK(b2.half_power_radius == doctest::Approx(0.4429 * a).epsilon(1e-3));
  }

  TEST_CASE("metrics report the full 3 dB width") {
    const auto g = make_uniform_grid(12, 12).centered();
    const auto m = extract_metrics(expanded_beam_pattern(g, 1.0, {}));
    CHECK(m.beamwidth_radius == doctest::Approx(2.0 * m.half_power_radius));
    CHECK(m.exclusion_radius > m.half_power_radius);
    CHECK(m.max_sll_db == doctest::Approx(-13.2).epsilon(0.05));  // square aperture first sidelobe
  }

  TEST_CASE("power in dB") {
    CHECK(power_db(1.0) == doctest::Approx(0.0));
    CHECK(power_db(0.5) == doctest::Approx(-3.0103).epsilon(1e-4));
  }

  TEST_CASE("pattern values do not depend on the thread count") {
    const auto g = geometry_from_tiling(random_perfect_tiling(ElementGrid(10, 10), 3)).centered();
    AngleGridSpec grid;
    grid.step_deg = 3.0;
    const auto samples = angle_grid_uv(grid);
    set_thread_count(1);
    const auto one = expanded_beam_values(g, 1.5, samples);
    set_thread_count(3);
    const auto three = expanded_beam_values(g, 1.5, samples);
    set_thread_count(0);
    CHECK(one == three);
  }

  TEST_CASE("frequency sweep rejects ratios below one") {
    const auto g = make_uniform_grid(4, 4);
    const std::vector<double> bad{0.5};
    CHECK_THROWS(frequency_sweep_sll(g, 2.0, bad));
  }
}
