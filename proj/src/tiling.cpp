#include "stpa/tiling.hpp"

#include <cmath>
#include <stdexcept>

#include "stpa/rng.hpp"

namespace stpa {

namespace {

double xlogx(double c) { return c > 0.0 ? c * std::log(c) : 0.0; }

void require_even(const ElementGrid& grid) {
  if (grid.size() % 2 != 0) throw GeometryError("grid with an odd element count has no perfect tiling");
}

// Tiling state as a partner map with per-axis histograms of half-step
// phase-center bins. Entropy per axis is ln T - S / T, S = sum c ln c.
class TilingState {
 public:
  explicit TilingState(const DominoTiling& tiling)
      : grid_(tiling.grid),
        partner_(tiling.grid.size(), -1),
        count_x_(2 * tiling.grid.nx - 1, 0),
        count_y_(2 * tiling.grid.ny - 1, 0),
        tiles_(static_cast<double>(tiling.tiles.size())) {
    for (const auto& [a, b] : tiling.tiles) {
      partner_[a] = b;
      partner_[b] = a;
      add(a, b, +1);
    }
  }

  EntropyScore score() const {
    EntropyScore s;
    s.h_x = std::log(tiles_) - sum_x_ / tiles_;
    s.h_y = std::log(tiles_) - sum_y_ / tiles_;
    // Rounding can leave a -1e-16 residue on degenerate histograms.
    if (s.h_x < 0.0) s.h_x = 0.0;
    if (s.h_y < 0.0) s.h_y = 0.0;
    s.total = s.h_x + s.h_y;
    return s;
  }

  double total() const { return score().total; }

  // 2x2 block with lower-left element (i, j): 0 = not flippable,
  // 1 = two horizontal dominoes, 2 = two vertical dominoes.
  int block_kind(int i, int j) const {
    const int a = grid_.index(i, j), b = grid_.index(i + 1, j);
    const int c = grid_.index(i, j + 1), d = grid_.index(i + 1, j + 1);
    if (partner_[a] == b && partner_[c] == d) return 1;
    if (partner_[a] == c && partner_[b] == d) return 2;
    return 0;
  }

  void flip(int i, int j) {
    const int a = grid_.index(i, j), b = grid_.index(i + 1, j);
    const int c = grid_.index(i, j + 1), d = grid_.index(i + 1, j + 1);
    if (block_kind(i, j) == 1) {
      add(a, b, -1);
      add(c, d, -1);
      link(a, c);
      link(b, d);
      add(a, c, +1);
      add(b, d, +1);
    } else {
      add(a, c, -1);
      add(b, d, -1);
      link(a, b);
      link(c, d);
      add(a, b, +1);
      add(c, d, +1);
    }
  }

  DominoTiling tiling() const {
    DominoTiling out{grid_, {}};
    out.tiles.reserve(grid_.size() / 2);
    for (int e = 0; e < grid_.size(); ++e)
      if (e < partner_[e]) out.tiles.push_back({e, partner_[e]});
    return out;
  }

 private:
  void link(int a, int b) {
    partner_[a] = b;
    partner_[b] = a;
  }

  void add(int a, int b, int delta) {
    const int bx = grid_.column(a) + grid_.column(b);
    const int by = grid_.row(a) + grid_.row(b);
    bump(count_x_[bx], sum_x_, delta);
    bump(count_y_[by], sum_y_, delta);
  }

  static void bump(int& count, double& sum, int delta) {
    sum -= xlogx(count);
    count += delta;
    sum += xlogx(count);
  }

  ElementGrid grid_;
  std::vector<int> partner_;
  std::vector<int> count_x_;
  std::vector<int> count_y_;
  double sum_x_ = 0.0;
  double sum_y_ = 0.0;
  double tiles_;
};

DominoTiling brick_tiling(const ElementGrid& grid) {
  require_even(grid);
  DominoTiling t{grid, {}};
  if (grid.nx % 2 == 0) {
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; i += 2) t.tiles.push_back({grid.index(i, j), grid.index(i + 1, j)});
  } else {
    for (int i = 0; i < grid.nx; ++i)
      for (int j = 0; j < grid.ny; j += 2) t.tiles.push_back({grid.index(i, j), grid.index(i, j + 1)});
  }
  return t;
}

}  // namespace

void AnnealConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("anneal iterations must be >= 1");
  if (!(cooling_rate > 0.0 && cooling_rate < 1.0))
    throw std::invalid_argument("cooling rate must lie in (0, 1)");
  if (!(initial_temperature >= 0.0)) throw std::invalid_argument("temperature must be >= 0");
}

EntropyScore tiling_entropy(const DominoTiling& tiling) {
  validate_tiling(tiling);
  return TilingState(tiling).score();
}

DominoTiling random_perfect_tiling(const ElementGrid& grid, std::uint64_t seed) {
  TilingState state(brick_tiling(grid));
  if (grid.nx < 2 || grid.ny < 2) return state.tiling();
  Rng rng(seed);
  std::uniform_int_distribution<int> pick_i(0, grid.nx - 2);
  std::uniform_int_distribution<int> pick_j(0, grid.ny - 2);
  const int moves = 20 * grid.size();
  for (int m = 0; m < moves; ++m) {
    const int i = pick_i(rng), j = pick_j(rng);
    if (state.block_kind(i, j) != 0) state.flip(i, j);
  }
  return state.tiling();
}

DominoTiling maximize_entropy_tiling(const ElementGrid& grid, const AnnealConfig& config) {
  config.validate();
  require_even(grid);
  TilingState state(random_perfect_tiling(grid, config.seed));
  if (grid.nx < 2 || grid.ny < 2) return state.tiling();

  Rng rng(splitmix64(config.seed));
  std::uniform_int_distribution<int> pick_i(0, grid.nx - 2);
  std::uniform_int_distribution<int> pick_j(0, grid.ny - 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  double current = state.total();
  double best = current;
  DominoTiling best_tiling = state.tiling();
  double temperature = config.initial_temperature;

  for (int it = 0; it < config.iterations; ++it, temperature *= config.cooling_rate) {
    const int i = pick_i(rng), j = pick_j(rng);
    if (state.block_kind(i, j) == 0) continue;
    state.flip(i, j);
    const double proposed = state.total();
    const double gain = proposed - current;
    const bool accept =
        gain >= 0.0 || (temperature > 0.0 && unit(rng) < std::exp(gain / temperature));
    if (!accept) {
      state.flip(i, j);  // the flipped block is flippable back
      continue;
    }
    current = proposed;
    if (current > best + 1e-12) {
      best = current;
      best_tiling = state.tiling();
    }
  }
  return best_tiling;
}

std::vector<DominoTiling> enumerate_tilings(const ElementGrid& grid, std::size_t limit) {
  std::vector<DominoTiling> out;
  if (grid.size() % 2 != 0) return out;
  std::vector<int> partner(grid.size(), -1);
  std::vector<TilePair> current;

  auto recurse = [&](auto&& self) -> void {
    if (out.size() >= limit) return;
    int first = -1;
    for (int e = 0; e < grid.size(); ++e)
      if (partner[e] == -1) {
        first = e;
        break;
      }
    if (first == -1) {
      out.push_back({grid, current});
      return;
    }
    const int i = grid.column(first), j = grid.row(first);
    const int candidates[2] = {i + 1 < grid.nx ? grid.index(i + 1, j) : -1,
                               j + 1 < grid.ny ? grid.index(i, j + 1) : -1};
    for (int other : candidates) {
      if (other < 0 || partner[other] != -1) continue;
      partner[first] = other;
      partner[other] = first;
      current.push_back({first, other});
      self(self);
      current.pop_back();
      partner[first] = partner[other] = -1;
    }
  };
  recurse(recurse);
  return out;
}

}  // namespace stpa
