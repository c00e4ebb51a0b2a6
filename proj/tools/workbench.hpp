#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stpa/geometry.hpp"
#include "stpa/link.hpp"
#include "stpa/position_opt.hpp"
#include "stpa/sensing.hpp"
#include "stpa/thinning.hpp"
#include "stpa/tiling.hpp"

namespace workbench {

using nlohmann::json;

/// Complete default configuration; every key a stage reads is present.
json default_config();

/// Applies "a.b.c=value". The value is parsed as JSON when possible and
/// kept as a string otherwise; intermediate objects are created on demand.
void apply_override(json& config, const std::string& assignment);

/// Merges `user` into the defaults (objects recursively, everything else by
/// replacement), applies the overrides in order and rejects unknown keys.
json resolve_config(const std::optional<json>& user, const std::vector<std::string>& overrides);

/// 16 hex digits of FNV-1a over the compact, key-sorted dump.
std::string config_hash(const json& config);

std::string version();

/// Provenance block stamped into every output.
struct RunInfo {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;

  static RunInfo from(const json& config);
  json to_json() const;
  std::string csv_comment() const;
};

// In-memory stages, shared by the CLI and the acceptance checks.

stpa::ElementGrid element_grid(const json& config);
stpa::DominoTiling design_tiling(const json& config);
stpa::ThinningParams thinning_params(const json& config);
stpa::SubarrayLayout sparsify(const json& config, const stpa::DominoTiling& tiling);
stpa::PositionOptConfig position_config(const json& config);
stpa::PositionOptResult optimize(const json& config, const stpa::SubarrayLayout& layout);
stpa::LinkConfig link_config(const json& config);
stpa::BlockageScenario blockage_scenario(const json& config);
stpa::OfdmParams ofdm_params(const json& config);
stpa::ScanSchedule scan_schedule(const json& config);
std::vector<stpa::SensingTarget> sensing_targets(const json& config);
stpa::SensingSetup sensing_setup(const json& config, const stpa::ArrayGeometry& geometry);

/// Full 3 dB width of the zeta = 1 expanded beam, used as the beam radius
/// in the blockage overlap test.
double beam_radius(const stpa::ArrayGeometry& geometry);

// File-producing commands. Each returns the paths it wrote.

std::vector<std::filesystem::path> cmd_tile(const json& config);
std::vector<std::filesystem::path> cmd_sparsify(const json& config);
std::vector<std::filesystem::path> cmd_optimize(const json& config);
std::vector<std::filesystem::path> cmd_pattern(const json& config);
std::vector<std::filesystem::path> cmd_simulate_comm(const json& config);
std::vector<std::filesystem::path> cmd_simulate_sensing(const json& config);
/// tile -> sparsify -> optimize -> pattern -> simulate-comm -> simulate-sensing.
std::vector<std::filesystem::path> cmd_run(const json& config);

}  // namespace workbench
