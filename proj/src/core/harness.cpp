#include "core/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace vesd {

namespace {

Eigen::MatrixXd resolve_sigma_xx(const ScenarioConfig& cfg, std::int64_t p) {
  if (cfg.cov_case == CovCase::custom) {
    require(cfg.custom_sigma.has_value(), ErrorClass::invalid_input,
            "custom covariance case without a matrix");
    require(cfg.custom_sigma->rows() == p && cfg.custom_sigma->cols() == p,
            ErrorClass::invalid_input, "custom covariance has the wrong size");
    return *cfg.custom_sigma;
  }
  return make_covariance(cfg.cov_case, p);
}

Eigen::VectorXd resolve_direction(const ScenarioConfig& cfg, std::int64_t p) {
  if (cfg.vector_setting == VectorSetting::custom) {
    require(cfg.custom_vector.has_value(), ErrorClass::invalid_input,
            "custom vector setting without a vector");
    require(cfg.custom_vector->size() == p, ErrorClass::invalid_input,
            "custom vector has the wrong size");
    return *cfg.custom_vector;
  }
  return make_vector(cfg.vector_setting, p);
}

}  // namespace

ResolvedCell resolve_cell(const ScenarioConfig& cfg) {
  require(cfg.n >= 2, ErrorClass::invalid_input, "cell needs n >= 2");
  require(cfg.cn > 0, ErrorClass::invalid_input, "aspect ratio must be positive");
  require(cfg.reps >= 1, ErrorClass::invalid_input, "cell needs reps >= 1");
  require(cfg.target == "tau" || cfg.target == "sharpe" || cfg.target == "mcc",
          ErrorClass::invalid_input, "unknown target: " + cfg.target);
  const std::int64_t p = cfg.p();
  require(p >= 1, ErrorClass::invalid_input, "resolved dimension is empty");

  ResolvedCell cell;
  Eigen::MatrixXd sigma_xx = resolve_sigma_xx(cfg, p);
  cell.direction = resolve_direction(cfg, p);

  if (cfg.target == "mcc") {
    // response variance 1; sample is (p+1)-dimensional, response first
    cell.sigma = joint_covariance(sigma_xx, cell.direction);
    cell.mu = Eigen::VectorXd::Zero(p + 1);
    cell.truth = truth_quadratic_form(sigma_xx, cell.direction);  // sigma_yy = 1
  } else {
    cell.sigma = std::move(sigma_xx);
    cell.truth = truth_quadratic_form(cell.sigma, cell.direction);
    cell.mu = (cfg.target == "sharpe") ? cell.direction
                                       : Eigen::VectorXd::Zero(p);
  }
  cell.sigma_sqrt = covariance_sqrt(cell.sigma);
  return cell;
}

RepOutcome run_one_replication(const ScenarioConfig& cfg,
                               const ResolvedCell& cell, std::int64_t rep) {
  RepOutcome out;
  out.rep = rep;
  try {
    const std::uint64_t rep_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(rep));
    DataMatrix data = generate_sample_with_sqrt(cfg.model, cell.sigma_sqrt,
                                                 cell.mu, cfg.n, rep_seed);
    EstimatorReport rep_out;
    if (cfg.target == "tau") {
      rep_out = (cfg.vector_setting == VectorSetting::custom)
                    ? estimate_tau(data.x, cell.direction, cfg.run)
                    : estimate_tau_known_a(data.x, cell.direction, cfg.run);
    } else if (cfg.target == "sharpe") {
      rep_out = estimate_sharpe(data.x, cfg.run);
    } else {
      const Eigen::VectorXd y = data.x.col(0);
      const Eigen::MatrixXd x = data.x.rightCols(data.p() - 1);
      rep_out = estimate_mcc(x, y, cfg.run);
    }
    out.ok = true;
    out.estimate = rep_out.estimate;
    out.kappa = rep_out.kappa;
    out.lp_residual = rep_out.lp_residual;
    out.neg_moments = rep_out.neg_moment_count;
  } catch (const VesdError& e) {
    out.error = e.what();
  } catch (const std::exception& e) {
    out.error = std::string("unexpected: ") + e.what();
  }
  return out;
}

BiasVarianceRow aggregate_outcomes(const ScenarioConfig& cfg, double truth,
                                   const std::vector<RepOutcome>& outcomes) {
  BiasVarianceRow row;
  row.id = cfg.id;
  row.target = cfg.target;
  row.model = to_string(cfg.model);
  row.cov_case = to_string(cfg.cov_case);
  row.vector_setting = to_string(cfg.vector_setting);
  row.n = cfg.n;
  row.p = cfg.p();
  row.cn = cfg.cn;
  row.reps = static_cast<std::int64_t>(outcomes.size());
  row.truth = truth;

  double sum = 0;
  for (const auto& o : outcomes) {
    if (!o.ok) {
      ++row.failed;
      continue;
    }
    ++row.completed;
    sum += o.estimate;
    row.neg_moment_count += o.neg_moments;
    row.mean_lp_residual += o.lp_residual;
  }
  const double fail_frac =
      static_cast<double>(row.failed) / static_cast<double>(outcomes.size());
  if (fail_frac > tol::fail_frac_abort) {
    std::string first;
    for (const auto& o : outcomes)
      if (!o.ok) {
        first = o.error;
        break;
      }
    fail(ErrorClass::numerical,
         "cell '" + cfg.id + "' aborted: " + std::to_string(row.failed) + "/" +
             std::to_string(outcomes.size()) +
             " replications failed (first: " + first + ")");
  }
  require(row.completed >= 1, ErrorClass::numerical,
          "cell '" + cfg.id + "' completed no replications");

  const double m = static_cast<double>(row.completed);
  row.mean_estimate = sum / m;
  row.mean_lp_residual /= m;
  row.bias = row.mean_estimate - truth;
  if (row.completed >= 2) {
    double ss = 0;
    for (const auto& o : outcomes)
      if (o.ok) {
        const double d = o.estimate - row.mean_estimate;
        ss += d * d;
      }
    row.variance = ss / (m - 1.0);
  } else {
    row.variance = 0;
    row.variance_single_rep = true;  // zero by convention, flagged
  }
  return row;
}

CellResult run_replications(const ScenarioConfig& cfg, int jobs) {
  require(jobs >= 1, ErrorClass::invalid_input, "worker count must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  ResolvedCell cell = resolve_cell(cfg);

  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(cfg.reps));
  const int workers =
      static_cast<int>(std::min<std::int64_t>(jobs, cfg.reps));
  if (workers <= 1) {
    for (std::int64_t r = 0; r < cfg.reps; ++r)
      outcomes[static_cast<std::size_t>(r)] = run_one_replication(cfg, cell, r);
  } else {
    std::atomic<std::int64_t> next{0};
    auto worker = [&]() {
      while (true) {
        const std::int64_t r = next.fetch_add(1);
        if (r >= cfg.reps) break;
        outcomes[static_cast<std::size_t>(r)] = run_one_replication(cfg, cell, r);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  CellResult res;
  res.row = aggregate_outcomes(cfg, cell.truth, outcomes);
  res.outcomes = std::move(outcomes);
  res.row.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return res;
}

BatchResult run_batch(const BatchConfig& batch) {
  require(!batch.scenarios.empty(), ErrorClass::invalid_input,
          "batch has no scenarios");
  BatchResult out;
  out.cells.reserve(batch.scenarios.size());
  for (const auto& sc : batch.scenarios)
    out.cells.push_back(run_replications(sc, batch.jobs));
  return out;
}

}  // namespace vesd
