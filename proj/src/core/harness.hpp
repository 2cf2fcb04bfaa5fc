// Replication harness: resolves a scenario cell, fans replications out over a
// worker pool, and aggregates bias/variance rows.  Results are byte-stable:
// every replication derives its RNG stream from (cell seed, replication
// index), and aggregation runs in index order, so the outputs are identical
// for any worker count.
#pragma once

#include <optional>

#include "core/pipelines.hpp"
#include "core/scenario.hpp"

namespace vesd {

struct ScenarioConfig {
  std::string id;
  std::string target = "tau";  // tau | sharpe | mcc
  SampleModel model = SampleModel::gaussian_iid;
  CovCase cov_case = CovCase::case1;
  VectorSetting vector_setting = VectorSetting::dense1;
  std::int64_t n = 0;
  double cn = 0;  // aspect ratio; p = round(cn * n)
  std::int64_t reps = 300;
  std::uint64_t seed = 0;
  RunConfig run;

  std::optional<Eigen::MatrixXd> custom_sigma;
  std::optional<Eigen::VectorXd> custom_vector;

  std::int64_t p() const {
    return static_cast<std::int64_t>(std::llround(cn * static_cast<double>(n)));
  }
};

struct RepOutcome {
  std::int64_t rep = 0;
  bool ok = false;
  double estimate = 0;
  double kappa = 0;
  double lp_residual = 0;
  int neg_moments = 0;
  std::string error;  // empty when ok
};

struct BiasVarianceRow {
  std::string id;
  std::string target, model, cov_case, vector_setting;
  std::int64_t n = 0, p = 0;
  double cn = 0;
  std::int64_t reps = 0, completed = 0, failed = 0;
  double truth = 0;
  double mean_estimate = 0;
  double bias = 0;
  double variance = 0;
  bool variance_single_rep = false;  // set when only one replication completed
  std::int64_t neg_moment_count = 0;
  double mean_lp_residual = 0;
  double wall_time_sec = 0;  // excluded from primary outputs (manifest only)
};

struct CellResult {
  BiasVarianceRow row;
  std::vector<RepOutcome> outcomes;
};

// Materialized inputs of one cell (exposed for tests and the acceptance
// suite, which reuse the resolution logic).
struct ResolvedCell {
  Eigen::MatrixXd sigma;       // sampling covariance (joint for mcc)
  Eigen::MatrixXd sigma_sqrt;
  Eigen::VectorXd direction;   // a / mu / sigma_xy depending on target
  Eigen::VectorXd mu;          // sampling mean (zero unless target == sharpe)
  double truth = 0;
};
ResolvedCell resolve_cell(const ScenarioConfig& cfg);

// One replication, pure in (cfg, resolved, rep index).
RepOutcome run_one_replication(const ScenarioConfig& cfg,
                               const ResolvedCell& cell, std::int64_t rep);

// Aggregation alone (index order, failures excluded from the moments but
// counted; more than fail_frac_abort failures raises an error).
BiasVarianceRow aggregate_outcomes(const ScenarioConfig& cfg, double truth,
                                   const std::vector<RepOutcome>& outcomes);

CellResult run_replications(const ScenarioConfig& cfg, int jobs);

struct BatchConfig {
  std::vector<ScenarioConfig> scenarios;
  int jobs = 1;
};

struct BatchResult {
  std::vector<CellResult> cells;  // scenario order
};

BatchResult run_batch(const BatchConfig& batch);

}  // namespace vesd
