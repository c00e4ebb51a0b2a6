#pragma once

#include <cstdint>
#include <vector>

#include "stpa/geometry.hpp"

namespace stpa {

/// Row/column entropy of tile phase centers, in nats.
struct EntropyScore {
  double h_x = 0.0;
  double h_y = 0.0;
  double total = 0.0;
};

struct AnnealConfig {
  int iterations = 200000;
  double initial_temperature = 0.05;
  double cooling_rate = 0.99997;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Phase centers binned on the half-step lattice along each axis
/// (2 nx - 1 bins in x, 2 ny - 1 in y); H = -sum p ln p over occupied bins.
EntropyScore tiling_entropy(const DominoTiling& tiling);

/// Brick-pattern start randomized by flip moves drawn from `seed`.
DominoTiling random_perfect_tiling(const ElementGrid& grid, std::uint64_t seed);

/// Simulated annealing over perfect tilings with the 2x2 flip move. Returns
/// the best tiling visited, which is never worse than the starting tiling.
DominoTiling maximize_entropy_tiling(const ElementGrid& grid, const AnnealConfig& config);

/// Every perfect domino tiling of a small grid (exhaustive backtracking).
std::vector<DominoTiling> enumerate_tilings(const ElementGrid& grid, std::size_t limit = 1000000);

}  // namespace stpa
