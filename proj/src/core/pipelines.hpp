// End-to-end estimators: known-direction precision quadratic form, optimal
// Sharpe ratio and multiple correlation coefficient, plus the degenerate
// pseudoinverse diagnostics that motivate them.
#pragma once

#include <optional>
#include <string>

#include "core/data_matrix.hpp"
#include "core/recovery.hpp"

namespace vesd {

struct RunConfig {
  int k = 4;                 // number of matched moments, 1..8
  double delta = 0.01;       // truncation slack
  double a0 = 0.3;           // support interval
  double b0 = 5.0;
  bool heuristic_interval = false;  // derive the interval from the spectrum
  double h = 0;              // grid step; 0 = automatic, always capped at 1/max(n,p)
  bool stabilized = true;    // truncation + weighted matching (tau only; the
                             // mean/covariance pipelines always stabilize)
  int lp_iter_cap = tol::lp_iter_cap;
};

struct EstimatorReport {
  std::string target;     // "tau" | "sharpe" | "mcc"
  double estimate = 0;    // final estimate (clamped to [0,1] for mcc)
  double raw_estimate = 0;  // kappa * plugin before any clamping
  double kappa = 1;       // scale factor (1 for a unit known direction)
  double plugin = 0;      // integral of 1/x against the recovered distribution

  MomentVector moments;
  VesdEstimate vesd;

  // diagnostics
  int neg_moment_count = 0;
  double lp_residual = 0;
  std::int64_t n = 0, p = 0, psi = 0;
  double cn = 0;
  double a0 = 0, b0 = 0, h = 0;
  bool heuristic_interval = false;
};

// Test support: pin the scale factor, replace the estimated direction, or
// drop the bias-correction terms so the mean/covariance pipelines degenerate
// to the known-direction one.
struct PipelineHooks {
  std::optional<Eigen::VectorXd> override_direction;
  std::optional<double> force_kappa;
  bool disable_bias_correction = false;
};

// U-statistic scale estimators.
double estimate_kappa_mu(const Eigen::MatrixXd& x_rows);
double estimate_kappa_sigma(const Eigen::MatrixXd& x_rows,
                            const Eigen::VectorXd& y);

// tau for a known unit direction (||a|| within 1e-10 of 1).
EstimatorReport estimate_tau_known_a(const Eigen::MatrixXd& x_rows,
                                     const Eigen::VectorXd& a,
                                     const RunConfig& cfg);
// tau for a general nonzero direction via the rescaling identity
// a^T S^{-1} a = ||a||^2 (a/||a||)^T S^{-1} (a/||a||); kappa = ||a||^2.
EstimatorReport estimate_tau(const Eigen::MatrixXd& x_rows,
                             const Eigen::VectorXd& a, const RunConfig& cfg);

EstimatorReport estimate_sharpe(const Eigen::MatrixXd& x_rows,
                                const RunConfig& cfg,
                                const PipelineHooks& hooks = {});

EstimatorReport estimate_mcc(const Eigen::MatrixXd& x_rows,
                             const Eigen::VectorXd& y, const RunConfig& cfg,
                             const PipelineHooks& hooks = {});

// Diagnostic: the naive plug-in R^2 through the Moore-Penrose inverse, which
// degenerates to 1 identically when p > n.  Requires p > n.  `fitted_out`
// receives the projection of the centered response onto the span of the
// centered data when provided.
double pseudo_r2_degenerate(const Eigen::MatrixXd& x_rows,
                            const Eigen::VectorXd& y,
                            Eigen::VectorXd* fitted_out = nullptr);

// a^T S^+ a for the sample covariance of the data.
double pseudoinverse_quadratic_form(const Eigen::MatrixXd& x_rows,
                                    const Eigen::VectorXd& a);

}  // namespace vesd
