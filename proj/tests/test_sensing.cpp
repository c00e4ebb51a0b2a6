#include <doctest.h>

#include <cmath>

#include "stpa/link.hpp"
#include "stpa/pattern.hpp"
#include "stpa/sensing.hpp"

using namespace stpa;

namespace {

constexpr double kC = 299792458.0;

/// Small numerology with the same subcarrier spacing rule T_s = N_sc / B.
OfdmParams small_params() {
  OfdmParams p;
  p.subcarriers = 128;
  p.symbol_time_s = 128 / p.bandwidth_hz;
  return p;
}

ScanSchedule small_schedule() {
  ScanSchedule s;
  s.dwell_symbols = 16;
  s.elevations_deg = {60.0, 70.0};
  s.azimuths_deg = {-10.0, 0.0, 10.0};
  return s;
}

AngleImage cut_image(std::vector<double> cut) {
  AngleImage img;
  img.theta_deg = {70.0};
  for (std::size_t i = 0; i < cut.size(); ++i) img.phi_deg.push_back(5.0 * static_cast<double>(i));
  img.power = std::move(cut);
  return img;
}

}  // namespace

TEST_SUITE("ofdm-sensing") {
  TEST_CASE("published numerology") {
    const OfdmParams p;
    CHECK_NOTHROW(p.validate());
    const auto c = check_numerology(p, 34);
    CHECK(c.ok);
    CHECK(c.range_resolution_m == doctest::Approx(3.75).epsilon(0.005));
    CHECK(c.velocity_resolution_mps == doctest::Approx(3.07).epsilon(0.005));
    CHECK(c.max_range_m == doctest::Approx(7680).epsilon(0.005));
    CHECK(c.max_velocity_mps == doctest::Approx(52.32).epsilon(0.005));
    OfdmParams bad;
    bad.symbol_time_s = 40e-6;
    CHECK_THROWS(bad.validate());
  }

  TEST_CASE("delay and Doppler of the reference target") {
    const OfdmParams p;
    const double tau = 2.0 * 70.0 / kC;
    CHECK(tau * p.bandwidth_hz == doctest::Approx(18.68).epsilon(1e-3));
    const double fd = 2.0 * 20.0 * p.carrier_hz / kC;
    CHECK(fd == doctest::Approx(3735.9).epsilon(1e-4));
    CHECK(fd * p.symbol_time_s * 34 == doctest::Approx(6.50).epsilon(1e-2));  // Doppler bins over one dwell
  }

  TEST_CASE("single noiseless target lands in the expected cell") {
    const auto g = make_uniform_grid(8, 8).centered();
    const OfdmParams p;
    ScanSchedule s;
    s.elevations_deg = {70.0};
    s.azimuths_deg = {0.0};
    SensingSetup setup;
    setup.add_noise = false;
    const EchoSynthesizer synth(g, {{70.0, 20.0, 70.0, 0.0}}, s, p, setup);
    const auto map = range_doppler_map(synth.dwell(0, 0), p);
    const auto [r, d] = map.argmax();
    CHECK(r == 19);
    CHECK(std::abs(map.range_of(r) - 70.0) <= p.range_resolution_m());
    CHECK(std::abs(map.velocity_of(d) - 20.0) <= p.velocity_resolution_mps(34));
  }

  TEST_CASE("echo model is linear in the targets") {
    const auto g = make_uniform_grid(4, 4).centered();
    const auto p = small_params();
    const auto s = small_schedule();
    SensingSetup setup;
    setup.add_noise = false;
    const SensingTarget a{40.0, 10.0, 70.0, 0.0}, b{90.0, -30.0, 60.0, 10.0};
    const auto ca = synthesize_rx(g, {a}, s, p, setup);
    const auto cb = synthesize_rx(g, {b}, s, p, setup);
    const auto cab = synthesize_rx(g, {a, b}, s, p, setup);
    REQUIRE(cab.values.size() == static_cast<std::size_t>(128 * 3 * 32));
    double scale = 0.0;
    for (const auto& v : cab.values) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < cab.values.size(); ++i)
      CHECK(std::abs(cab.values[i] - ca.values[i] - cb.values[i]) <= 1e-12 * scale);
  }

  TEST_CASE("range-Doppler transform preserves energy") {
    const auto g = make_uniform_grid(4, 4).centered();
    const auto p = small_params();
    const auto s = small_schedule();
    SensingSetup setup;
    setup.seed = 4;
    const auto cube = synthesize_rx(g, {{40.0, 10.0, 70.0, 0.0}}, s, p, setup);
    for (int a = 0; a < 3; ++a)
      for (int e = 0; e < 2; ++e) {
        const auto y = cube.dwell(a, e);
        const auto map = range_doppler_map(cube, a, e, p);
        CHECK(map.total_power() == doctest::Approx(y.squaredNorm()).epsilon(1e-10));
      }
  }

  TEST_CASE("noisy dwells are reproducible and set 10 dB below the echo") {
    const auto g = make_uniform_grid(4, 4).centered();
    const auto p = small_params();
    const auto s = small_schedule();
    SensingSetup setup;
    const std::vector<SensingTarget> t{{40.0, 10.0, 70.0, 0.0}};
    const EchoSynthesizer one(g, t, s, p, setup), two(g, t, s, p, setup);
    CHECK((one.dwell(2, 1) - two.dwell(2, 1)).norm() == 0.0);

    setup.add_noise = false;
    const EchoSynthesizer clean(g, t, s, p, setup);
    const auto echo = clean.dwell(1, 1);  // beam on the target
    const double per_sample = echo.squaredNorm() / static_cast<double>(echo.size());
    CHECK(one.noise_variance() == doctest::Approx(per_sample / 10.0).epsilon(0.05));
  }

  TEST_CASE("targets outside the unambiguous region are rejected") {
    const auto g = make_uniform_grid(2, 2);
    const auto p = small_params();
    const auto s = small_schedule();
    CHECK_THROWS(EchoSynthesizer(g, {{p.max_range_m() + 1.0, 0.0, 70.0, 0.0}}, s, p, SensingSetup{}));
    CHECK_THROWS(EchoSynthesizer(g, {{30.0, p.max_velocity_mps() + 1.0, 70.0, 0.0}}, s, p, SensingSetup{}));
  }

  TEST_CASE("schedules") {
    const auto full = ScanSchedule::full();
    CHECK(full.elevation_count() == 19);
    CHECK(full.azimuth_count() == 73);
    CHECK(full.symbols_per_packet() == 34 * 19);
    CHECK(ScanSchedule::azimuth_window(30.0).azimuth_count() == 13);
    ScanSchedule empty;
    CHECK_THROWS(empty.validate());
  }

  TEST_CASE("two-target resolution on synthetic cuts") {
    CHECK_FALSE(resolve_two_targets(cut_image({0.1, 0.4, 1.0, 0.4, 0.1}), 70.0).resolved);
    const auto two = resolve_two_targets(cut_image({0.1, 1.0, 0.3, 0.9, 0.1}), 70.0);
    CHECK(two.resolved);
    REQUIRE(two.peak_phi_deg.size() == 2);
    CHECK(two.peak_phi_deg[0] == 5.0);
    CHECK(two.peak_phi_deg[1] == 15.0);
    CHECK(two.pair_phi_deg == std::vector<double>{5.0, 15.0});
    const auto three = resolve_two_targets(cut_image({0.1, 1.0, 0.3, 0.9, 0.8, 0.1, 0.95}), 70.0);
    CHECK(three.resolved);
    CHECK(three.pair_phi_deg == std::vector<double>{5.0, 30.0});
    CHECK(resolve_two_targets(cut_image({0.1, 1.0, 0.9, 0.1}), 70.0).pair_phi_deg.empty());
    CHECK_FALSE(resolve_two_targets(cut_image({0.1, 1.0, 0.6, 0.9, 0.1}), 70.0).resolved);   // 1.8 dB dip
    CHECK_FALSE(resolve_two_targets(cut_image({0.1, 1.0, 0.01, 0.05, 0.01}), 70.0).resolved);  // weak ripple
    CHECK_FALSE(resolve_two_targets(cut_image({}), 70.0).resolved);
    CHECK_FALSE(resolve_two_targets(cut_image({0.0, 0.0, 0.0}), 70.0).resolved);
  }

  TEST_CASE("streamed sensing run matches the materialized cube and is thread independent") {
    const auto g = make_uniform_grid(6, 6).centered();
    const auto p = small_params();
    ScanSchedule s;
    s.dwell_symbols = 16;
    s.elevations_deg = {60.0, 70.0, 80.0};
    s.azimuths_deg = linspace_step(-30.0, 30.0, 10.0);
    SensingSetup setup;
    setup.w_c = comm_weight(g, steering_vector(g, 70.0, 50.0));
    const std::vector<SensingTarget> t{{40.0, 10.0, 70.0, 0.0}};

    set_thread_count(1);
    const auto a = run_sensing(g, t, s, p, setup);
    set_thread_count(3);
    const auto b = run_sensing(g, t, s, p, setup);
    set_thread_count(0);
    CHECK(a.image.power == b.image.power);
    CHECK(a.range_bin == b.range_bin);

    const auto cube = synthesize_rx(g, t, s, p, setup);
    const auto image = angle_image(cube, s, p, a.range_bin, a.doppler_bin);
    for (std::size_t i = 0; i < image.power.size(); ++i) CHECK(image.power[i] == doctest::Approx(a.image.power[i]));
    CHECK(a.peak_theta_deg == 70.0);
    CHECK(a.peak_phi_deg == 0.0);
    REQUIRE(a.detections.size() == 1);
    CHECK(std::abs(a.detections[0].range_m - 40.0) <= p.range_resolution_m());
    CHECK(std::abs(a.detections[0].velocity_mps - 10.0) <= p.velocity_resolution_mps(16));
  }

  TEST_CASE("monostatic gain") {
    CHECK(monostatic_gain(0.01, 10.0) == doctest::Approx(1e-4 / (std::pow(4 * 3.141592653589793, 1.5) * 100.0)));
    CHECK_THROWS(monostatic_gain(0.01, 0.0));
  }
}
