// JSON/CSV serialization of reports, simulation outputs, configs and run
// manifests.  All byte output is deterministic for fixed inputs.
#pragma once

#include <string>
#include <vector>

#include "core/harness.hpp"

namespace vesd {

std::string fmt17(double v);  // %.17g, round-trip safe

std::string report_to_json(const EstimatorReport& rep, bool include_vesd);
std::string vesd_to_csv(const VesdEstimate& est);  // grid_point,mass,cdf

std::string rows_to_csv(const std::vector<BiasVarianceRow>& rows);
std::string cell_log_to_json(const ScenarioConfig& cfg, const CellResult& cell);

// Single-run estimation config; accepts  {"k":4,"delta":0.01,
// "interval":[0.3,5.0]|"heuristic","h":0.001|"auto","stabilized":true,
// "lp_iter_cap":20000}  with every key optional.
RunConfig run_config_from_json_text(const std::string& text);

// Batch simulation config: {"jobs":1,"defaults":{...},"scenarios":[{...}]}.
// Scenario keys: id, target, model, cov_case, vector_setting, n, cn, reps,
// seed, plus the single-run keys; custom cases add sigma_csv / vector /
// vector_csv.  Defaults fill any key a scenario omits.
BatchConfig batch_from_json_text(const std::string& text);

// 64-bit FNV-1a over the canonical (re-serialized) form of a JSON document.
std::string config_hash(const std::string& json_text);

struct ManifestInfo {
  std::string command;
  std::vector<std::string> argv;
  std::string config_hash;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool ok = true;
  int exit_code = 0;
  std::string error_message;
  std::vector<std::string> artifacts;
  double wall_time_sec = 0;
  std::vector<std::pair<std::string, double>> cell_timings;
};
std::string manifest_to_json(const ManifestInfo& info);

std::string library_version();

}  // namespace vesd
