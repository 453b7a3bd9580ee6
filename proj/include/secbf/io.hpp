#pragma once

// JSON forms of matrices, channels, configs and solve results.
//
// A complex matrix is {"re": [[...], ...], "im": [[...], ...]} in row-major
// nesting; "im" may be omitted for real data.

#include "json.hpp"
#include "secbf/bench.hpp"

namespace secbf {

/// {"rows", "cols", "re", "im"} with row-major nested arrays.
nlohmann::json matrix_to_json(const CMat& m);
/// "im" and the size fields are optional. Throws DataError on ragged rows,
/// mismatched shapes or non-numbers.
CMat matrix_from_json(const nlohmann::json& j);

/// {"h_info", "h_energy", "sigma2_info_dbm", "sigma2_energy_dbm", "zeta"} with raw channels.
nlohmann::json channels_to_json(const ChannelPair& ch);
ChannelPair channels_from_json(const nlohmann::json& j);

/// Keys match the CLI long flags with dashes replaced by underscores:
/// nt, ni, ne, streams, pt_dbm, pe_dbm, sigma2_dbm, zeta, pathloss_db, seeds,
/// method, eps, max_iter. Keys absent from j leave cfg unchanged; unknown keys
/// are ignored so one file can also carry CLI-only settings.
void apply_config_json(const nlohmann::json& j, ScenarioConfig& cfg);
nlohmann::json config_to_json(const ScenarioConfig& cfg);

nlohmann::json outcome_to_json(const ChannelPair& ch, const DesignBudget& budget, const SolveOutcome& out);

}  // namespace secbf
