#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "stpa/geometry_io.hpp"
#include "stpa/tiling.hpp"

using namespace stpa;

namespace {

/// Entropy of one coordinate of the phase centers, counted directly.
double coordinate_entropy(const DominoTiling& t, bool x_axis) {
  std::map<long, int> counts;
  for (std::size_t i = 0; i < t.tiles.size(); ++i) {
    const auto c = t.phase_center(i);
    counts[std::lround(4.0 * (x_axis ? c.x : c.y))]++;
  }
  double h = 0.0;
  for (const auto& [bin, n] : counts) {
    const double p = static_cast<double>(n) / t.tiles.size();
    h -= p * std::log(p);
  }
  return h;
}

std::set<std::vector<TilePair>> canonical(const std::vector<DominoTiling>& all) {
  std::set<std::vector<TilePair>> out;
  for (auto t : all) {
    for (auto& p : t.tiles)
      if (p[0] > p[1]) std::swap(p[0], p[1]);
    std::sort(t.tiles.begin(), t.tiles.end());
    out.insert(t.tiles);
  }
  return out;
}

}  // namespace

TEST_SUITE("entropy-tiling") {
  TEST_CASE("exhaustive enumeration matches known domino counts") {
    CHECK(enumerate_tilings(ElementGrid(2, 2)).size() == 2);
    CHECK(enumerate_tilings(ElementGrid(3, 2)).size() == 3);
    CHECK(enumerate_tilings(ElementGrid(4, 4)).size() == 36);
    CHECK(enumerate_tilings(ElementGrid(6, 4)).size() == 281);
    CHECK(enumerate_tilings(ElementGrid(3, 3)).empty());
  }

  TEST_CASE("every 4x4 tiling is a distinct perfect cover with bounded entropy") {
    const auto all = enumerate_tilings(ElementGrid(4, 4));
    CHECK(canonical(all).size() == all.size());
    for (const auto& t : all) {
      CHECK(is_perfect_cover(t));
      const auto h = tiling_entropy(t);
      CHECK(h.h_x == doctest::Approx(coordinate_entropy(t, true)));
      CHECK(h.h_y == doctest::Approx(coordinate_entropy(t, false)));
      CHECK(h.h_x >= 0.0);
      CHECK(h.h_x <= std::log(7.0) + 1e-12);
      CHECK(h.h_y <= std::log(7.0) + 1e-12);
      CHECK(h.total == doctest::Approx(h.h_x + h.h_y));
    }
  }

  TEST_CASE("entropy of a 2x2 grid with two horizontal dominoes") {
    const DominoTiling t{ElementGrid(2, 2), {{0, 1}, {2, 3}}};
    const auto h = tiling_entropy(t);
    CHECK(h.h_x == doctest::Approx(0.0));
    CHECK(h.h_y == doctest::Approx(std::log(2.0)));
  }

  TEST_CASE("cover validation rejects overlaps, gaps and diagonals") {
    const ElementGrid g(2, 2);
    CHECK_FALSE(is_perfect_cover({g, {{0, 1}, {1, 3}}}));
    CHECK_FALSE(is_perfect_cover({g, {{0, 1}}}));
    CHECK_FALSE(is_perfect_cover({g, {{0, 3}, {1, 2}}}));
    CHECK_FALSE(is_perfect_cover({ElementGrid(4, 1), {{1, 2}, {3, 0}}}));
    CHECK_THROWS_AS(validate_tiling({g, {{0, 3}, {1, 2}}}), GeometryError);
  }

  TEST_CASE("random tilings are valid and reproducible") {
    const ElementGrid g(10, 8);
    const auto a = random_perfect_tiling(g, 9);
    const auto b = random_perfect_tiling(g, 9);
    CHECK(is_perfect_cover(a));
    CHECK(a.tiles == b.tiles);
    CHECK(random_perfect_tiling(g, 10).tiles != a.tiles);
  }

  TEST_CASE("annealing reaches the exhaustive 4x4 optimum") {
    double best = 0.0;
    for (const auto& t : enumerate_tilings(ElementGrid(4, 4))) best = std::max(best, tiling_entropy(t).total);
    AnnealConfig cfg;
    cfg.iterations = 20000;
    cfg.initial_temperature = 1.0;  // above the 4x4 entropy step so the walk can leave local optima
    cfg.cooling_rate = 0.9995;
    const auto t = maximize_entropy_tiling(ElementGrid(4, 4), cfg);
    CHECK(is_perfect_cover(t));
    CHECK(tiling_entropy(t).total == doctest::Approx(best));
  }

  TEST_CASE("annealing never ends below its starting tiling") {
    const ElementGrid g(12, 12);
    AnnealConfig cfg;
    cfg.iterations = 5000;
    cfg.seed = 3;
    const auto start = random_perfect_tiling(g, cfg.seed);
    const auto t = maximize_entropy_tiling(g, cfg);
    CHECK(is_perfect_cover(t));
    CHECK(tiling_entropy(t).total >= tiling_entropy(start).total);
  }

  TEST_CASE("anneal configuration is validated") {
    AnnealConfig cfg;
    cfg.cooling_rate = 1.5;
    CHECK_THROWS(maximize_entropy_tiling(ElementGrid(4, 4), cfg));
    cfg = {};
    cfg.iterations = -1;
    CHECK_THROWS(maximize_entropy_tiling(ElementGrid(4, 4), cfg));
    CHECK_THROWS(maximize_entropy_tiling(ElementGrid(3, 3), AnnealConfig{}));
  }

  TEST_CASE("tiling survives a trip through the geometry JSON") {
    const auto t = random_perfect_tiling(ElementGrid(6, 4), 2);
    const auto doc = geometry_to_json(geometry_from_tiling(t), t.grid);
    const auto grid = grid_from_json(doc);
    REQUIRE(grid.has_value());
    const auto back = tiling_from_geometry(geometry_from_json(doc), *grid);
    CHECK(back.tiles == t.tiles);
  }
}
