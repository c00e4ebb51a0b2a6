#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "stpa/geometry.hpp"
#include "stpa/geometry_io.hpp"
#include "stpa/rng.hpp"

using namespace stpa;

TEST_SUITE("array-geometry") {
  TEST_CASE("element grid indexing and positions") {
    const ElementGrid g(5, 3, 0.5);
    CHECK(g.size() == 15);
    CHECK(g.index(4, 2) == 14);
    CHECK(g.column(7) == 2);
    CHECK(g.row(7) == 1);
    CHECK(g.position(7) == Point2{1.0, 0.5});
    CHECK(g.centroid().x == doctest::Approx(1.0));
    CHECK(g.centroid().y == doctest::Approx(0.5));
    CHECK_THROWS_AS(ElementGrid(0, 3), GeometryError);
  }

  TEST_CASE("make_geometry enforces a partition") {
    const std::vector<Point2> pts{{0, 0}, {0.5, 0}, {1, 0}};
    CHECK_NOTHROW(make_geometry(pts, {{0, 1}, {2}}));
    CHECK_THROWS_AS(make_geometry(pts, {{0, 1}, {1, 2}}), GeometryError);
    CHECK_THROWS_AS(make_geometry(pts, {{0, 1}}), GeometryError);
    CHECK_THROWS_AS(make_geometry(pts, {{0, 3}, {1, 2}}), GeometryError);
    CHECK_THROWS_AS(make_geometry({}, {}), GeometryError);
    CHECK_THROWS_AS(make_geometry(pts, {{0, 1}, {2}}, {0}), GeometryError);
  }

  TEST_CASE("untiled apertures carry singleton tiles") {
    const auto g = make_uniform_grid(3, 2);
    CHECK(g.element_count() == 6);
    CHECK(g.tile_count() == 6);
    CHECK_FALSE(g.is_tiled());
    for (std::size_t t = 0; t < g.tile_count(); ++t) CHECK(g.phase_center(t) == g.elements[t]);
  }

  TEST_CASE("phase center is the mean element position") {
    const auto g = make_geometry({{0, 0}, {0.5, 0}, {3, 1}, {3, 1.5}}, {{0, 1}, {2, 3}});
    CHECK(g.is_tiled());
    CHECK(g.phase_center(0).x == doctest::Approx(0.25));
    CHECK(g.phase_center(1).y == doctest::Approx(1.25));
    const auto c = g.centered();
    CHECK(c.centroid().x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(c.centroid().y == doctest::Approx(0.0).epsilon(1e-15));
  }

  TEST_CASE("sunflower points follow the polar closed form") {
    const double s = 3.5, tau = 1.618;
    const auto pts = sunflower_centers(5, s, tau);
    REQUIRE(pts.size() == 5);
    for (int m = 1; m <= 5; ++m) {
      const double rho = s * std::sqrt(m / 3.141592653589793);
      const double psi = 2.0 * 3.141592653589793 * m * tau;
      CHECK(pts[m - 1].x == doctest::Approx(rho * std::cos(psi)));
      CHECK(pts[m - 1].y == doctest::Approx(rho * std::sin(psi)));
    }
    for (double radius : {1.0, 7.3, 20.0}) {
      const int count = sunflower_count_for_radius(radius, s);
      const auto all = sunflower_centers(count, s, tau);
      CHECK(std::hypot(all.back().x, all.back().y) > radius);
      if (count > 1) CHECK(std::hypot(all[count - 2].x, all[count - 2].y) <= radius);
    }
  }

  TEST_CASE("inter-subarray distance matches brute force") {
    Rng rng(7);
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    SubarrayLayout layout;
    for (int s = 0; s < 4; ++s) {
      Subarray sub{{d(rng), d(rng)}, {}};
      for (int t = 0; t < 3; ++t) sub.tiles.push_back({{{0.5 * t, 0.0}, {0.5 * t, 0.5}}});
      layout.subarrays.push_back(sub);
    }
    double best = 1e300;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        if (a == b) continue;
        for (const auto& ta : layout.subarrays[a].tiles)
          for (const auto& tb : layout.subarrays[b].tiles) {
            const Point2 pa = layout.subarrays[a].center + 0.5 * (ta.element_offsets[0] + ta.element_offsets[1]);
            const Point2 pb = layout.subarrays[b].center + 0.5 * (tb.element_offsets[0] + tb.element_offsets[1]);
            best = std::min(best, std::hypot(pa.x - pb.x, pa.y - pb.y));
          }
      }
    CHECK(min_inter_subarray_tile_distance(layout) == doctest::Approx(best).epsilon(1e-14));
    CHECK(layout.tile_count() == 12);
    CHECK(layout.element_count() == 24);
  }

  TEST_CASE("direction cosines and beam overlap") {
    const auto z = direction_cosines(90.0, 33.0);
    CHECK(std::abs(z.u) < 1e-15);
    CHECK(std::abs(z.v) < 1e-15);
    const auto x = direction_cosines(0.0, 0.0);
    CHECK(x.u == doctest::Approx(1.0));
    const auto p = direction_cosines(60.0, 90.0);
    CHECK(p.v == doctest::Approx(0.5));
    CHECK(beams_overlap(0, 0, 0.05, 0, 0.06));
    CHECK_FALSE(beams_overlap(0, 0, 0.06, 0, 0.06));
  }

  TEST_CASE("geometry JSON round trip") {
    const auto g = make_geometry({{0, 0}, {0.5, 0}, {3, 1}, {3, 1.5}, {4, 4}, {4.5, 4}}, {{0, 1}, {2, 3}, {4, 5}},
                                 {0, 1, 1}, 30e9);
    const auto doc = geometry_to_json(g);
    CHECK(doc.at("tiles").size() == 3);
    CHECK(doc.at("subarrays").size() == 2);
    CHECK(doc.at("subarrays")[1] == nlohmann::json::array({1, 2}));
    const auto back = geometry_from_json(doc);
    CHECK(back.elements == g.elements);
    CHECK(back.tiles == g.tiles);
    CHECK(back.subarray_of_tile == g.subarray_of_tile);
    CHECK(back.design_frequency_hz == 30e9);

    const auto flat = geometry_to_json(make_uniform_grid(2, 2));
    CHECK(flat.at("tiles").empty());
    CHECK(geometry_from_json(flat).tile_count() == 4);

    const auto path = std::filesystem::temp_directory_path() / "stpa_geometry_roundtrip.json";
    write_json_file(path, doc);
    CHECK(load_geometry(path.string()).elements == g.elements);
    std::filesystem::remove(path);
  }

  TEST_CASE("layout recovered from a grouped geometry keeps positions") {
    const auto g = make_geometry({{0, 0}, {0.5, 0}, {3, 1}, {3, 1.5}, {4, 4}, {4.5, 4}}, {{0, 1}, {2, 3}, {4, 5}},
                                 {0, 1, 1});
    const auto layout = layout_from_geometry(g);
    REQUIRE(layout.subarrays.size() == 2);
    const auto again = geometry_from_layout(layout);
    for (std::size_t e = 0; e < g.element_count(); ++e) {
      CHECK(again.elements[e].x == doctest::Approx(g.elements[e].x));
      CHECK(again.elements[e].y == doctest::Approx(g.elements[e].y));
    }
    CHECK_THROWS_AS(layout_from_geometry(make_uniform_grid(2, 2)), GeometryError);
  }

  TEST_CASE("built-in CUPA sources") {
    const auto g = load_geometry("cupa:3x2");
    CHECK(g.element_count() == 6);
    CHECK_THROWS_AS(load_geometry("cupa:3"), GeometryError);
    CHECK_THROWS_AS(load_geometry("cupa:0x4"), GeometryError);
  }
}
