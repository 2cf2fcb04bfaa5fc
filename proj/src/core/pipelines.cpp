#include "core/pipelines.hpp"

#include <cmath>

namespace vesd {

namespace {

struct ResolvedGrid {
  double a0, b0, h;
};

ResolvedGrid resolve_grid(const RunConfig& cfg, const SampleSpectrum& spec,
                          const CompanionZeros& roots) {
  double a0 = cfg.a0, b0 = cfg.b0;
  if (cfg.heuristic_interval) {
    a0 = 0.8 * roots.roots.back();
    b0 = 1.2 * spec.lambda_max();
    require(a0 > 0 && a0 < b0, ErrorClass::numerical,
            "heuristic support interval is degenerate");
  }
  require(0 < a0 && a0 < b0, ErrorClass::invalid_input,
          "support interval must satisfy 0 < a0 < b0");
  const double cap =
      1.0 / static_cast<double>(std::max(spec.n, spec.p));
  double h = (cfg.h > 0) ? std::min(cfg.h, cap) : cap;
  return {a0, b0, h};
}

void validate_config(const RunConfig& cfg) {
  require(cfg.k >= 1 && cfg.k <= tol::moment_cap, ErrorClass::invalid_input,
          "k must be between 1 and 8");
  require(cfg.delta > 0, ErrorClass::invalid_input, "delta must be positive");
  require(cfg.h >= 0 && std::isfinite(cfg.h), ErrorClass::invalid_input,
          "grid step must be finite and nonnegative");
  require(cfg.lp_iter_cap > 0, ErrorClass::invalid_input,
          "LP iteration cap must be positive");
}

int count_negative(const std::vector<double>& v) {
  int c = 0;
  for (double x : v)
    if (x < 0) ++c;
  return c;
}

// Shared tail: truncate if requested, run the LP, evaluate the plug-in.
EstimatorReport finish(std::string target, const SampleSpectrum& spec,
                       const CompanionZeros& roots, MomentVector moments,
                       double kappa, bool stabilized, const RunConfig& cfg) {
  EstimatorReport rep;
  rep.target = std::move(target);
  rep.kappa = kappa;
  rep.n = spec.n;
  rep.p = spec.p;
  rep.psi = spec.psi;
  rep.cn = spec.cn;

  const ResolvedGrid g = resolve_grid(cfg, spec, roots);
  rep.a0 = g.a0;
  rep.b0 = g.b0;
  rep.h = g.h;
  rep.heuristic_interval = cfg.heuristic_interval;

  if (stabilized) {
    moments.truncated = truncate_moments(moments.raw, g.a0, g.b0, cfg.delta);
    for (double t : *moments.truncated)
      require(t > 0, ErrorClass::numerical,
              "truncated moment is non-positive; support interval is likely "
              "misconfigured for this spectrum");
  }
  rep.neg_moment_count = count_negative(moments.raw);

  VesdGrid grid = VesdGrid::make(g.a0, g.b0, g.h);
  rep.vesd = solve_moment_lp(grid, moments, stabilized, cfg.lp_iter_cap);
  rep.lp_residual = rep.vesd.residual;
  rep.plugin = plugin_functional(rep.vesd, Functional::inverse);
  rep.raw_estimate = kappa * rep.plugin;
  rep.estimate = rep.raw_estimate;
  rep.moments = std::move(moments);
  return rep;
}

}  // namespace

double estimate_kappa_mu(const Eigen::MatrixXd& x_rows) {
  const Eigen::Index n = x_rows.rows();
  require(n >= 2, ErrorClass::invalid_input,
          "mean-scale estimator needs at least 2 observations");
  require(x_rows.allFinite(), ErrorClass::invalid_input,
          "data matrix contains non-finite values");
  const Eigen::VectorXd colsum = x_rows.colwise().sum();
  const double total = colsum.squaredNorm();
  const double diag = x_rows.rowwise().squaredNorm().sum();
  return std::abs(total - diag) /
         (static_cast<double>(n) * static_cast<double>(n - 1));
}

double estimate_kappa_sigma(const Eigen::MatrixXd& x_rows,
                            const Eigen::VectorXd& y) {
  const Eigen::Index n = x_rows.rows();
  require(n >= 3, ErrorClass::invalid_input,
          "covariance-scale estimator needs at least 3 observations");
  require(y.size() == n, ErrorClass::invalid_input,
          "response length must match the number of observations");
  require(x_rows.allFinite() && y.allFinite(), ErrorClass::invalid_input,
          "non-finite values in data");
  const Eigen::VectorXd yc = y.array() - y.mean();
  const double s_yy = yc.squaredNorm() / static_cast<double>(n - 1);
  require(s_yy > 0, ErrorClass::numerical, "constant response: zero variance");
  Eigen::MatrixXd xc = x_rows.rowwise() - x_rows.colwise().mean();
  const Eigen::VectorXd sxy_scaled = xc.transpose() * yc;  // (n-1) s_xy
  const double cross = sxy_scaled.squaredNorm();
  double diag = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    diag += yc(i) * yc(i) * xc.row(i).squaredNorm();
  return std::abs(cross - diag) /
         (static_cast<double>(n) * static_cast<double>(n - 1) * s_yy);
}

namespace {

// Core of the known-direction pipeline on an exactly-normalized direction.
EstimatorReport tau_core(const Eigen::MatrixXd& x_rows,
                         const Eigen::VectorXd& unit_a, const RunConfig& cfg) {
  SampleSpectrum spec = data_spectrum(x_rows, unit_a);
  CompanionZeros roots = find_companion_roots(spec);
  MomentVector mv = estimate_moments_known_a(spec, cfg.k, &roots);
  return finish("tau", spec, roots, std::move(mv), 1.0, cfg.stabilized, cfg);
}

}  // namespace

EstimatorReport estimate_tau_known_a(const Eigen::MatrixXd& x_rows,
                                     const Eigen::VectorXd& a,
                                     const RunConfig& cfg) {
  validate_config(cfg);
  const double norm = a.norm();
  require(std::abs(norm - 1.0) <= tol::unit_norm, ErrorClass::invalid_input,
          "direction must have unit norm (use the rescaling entry point for "
          "general vectors)");
  return tau_core(x_rows, a / norm, cfg);
}

EstimatorReport estimate_tau(const Eigen::MatrixXd& x_rows,
                             const Eigen::VectorXd& a, const RunConfig& cfg) {
  validate_config(cfg);
  const double norm = a.norm();
  require(norm > 0 && std::isfinite(norm), ErrorClass::invalid_input,
          "direction must be a nonzero finite vector");
  EstimatorReport rep = tau_core(x_rows, a / norm, cfg);
  rep.kappa = norm * norm;
  rep.raw_estimate = rep.kappa * rep.plugin;
  rep.estimate = rep.raw_estimate;
  return rep;
}

EstimatorReport estimate_sharpe(const Eigen::MatrixXd& x_rows,
                                const RunConfig& cfg,
                                const PipelineHooks& hooks) {
  validate_config(cfg);
  const double kappa = hooks.force_kappa ? *hooks.force_kappa
                                         : estimate_kappa_mu(x_rows);
  require(kappa >= tol::zero_signal, ErrorClass::zero_signal,
          "mean signal below detection threshold");
  const Eigen::VectorXd direction =
      hooks.override_direction ? *hooks.override_direction
                               : Eigen::VectorXd(x_rows.colwise().mean());
  SampleSpectrum spec = data_spectrum(x_rows, direction);
  CompanionZeros roots = find_companion_roots(spec);
  MomentVector mv;
  if (hooks.disable_bias_correction) {
    mv = estimate_moments_known_a(spec, cfg.k, &roots);
    for (auto& v : mv.raw) v /= kappa;
    mv.kind = MomentKind::sharpe;
  } else {
    mv = estimate_moments_sharpe(spec, kappa, cfg.k, &roots);
  }
  EstimatorReport rep =
      finish("sharpe", spec, roots, std::move(mv), kappa, true, cfg);
  return rep;
}

EstimatorReport estimate_mcc(const Eigen::MatrixXd& x_rows,
                             const Eigen::VectorXd& y, const RunConfig& cfg,
                             const PipelineHooks& hooks) {
  validate_config(cfg);
  const Eigen::Index n = x_rows.rows();
  const double kappa = hooks.force_kappa ? *hooks.force_kappa
                                         : estimate_kappa_sigma(x_rows, y);
  require(kappa >= tol::zero_signal, ErrorClass::zero_signal,
          "covariance signal below detection threshold");

  Eigen::VectorXd direction;
  if (hooks.override_direction) {
    direction = *hooks.override_direction;
  } else {
    const Eigen::VectorXd yc = y.array() - y.mean();
    const double s_yy = yc.squaredNorm() / static_cast<double>(n - 1);
    require(s_yy > 0, ErrorClass::numerical, "constant response: zero variance");
    Eigen::MatrixXd xc = x_rows.rowwise() - x_rows.colwise().mean();
    direction = (xc.transpose() * yc) /
                (static_cast<double>(n - 1) * std::sqrt(s_yy));
  }
  SampleSpectrum spec = data_spectrum(x_rows, direction);
  CompanionZeros roots = find_companion_roots(spec);
  MomentVector mv;
  if (hooks.disable_bias_correction) {
    mv = estimate_moments_known_a(spec, cfg.k, &roots);
    for (auto& v : mv.raw) v /= kappa;
    mv.kind = MomentKind::mcc;
  } else {
    mv = estimate_moments_mcc(spec, kappa, cfg.k, &roots);
  }
  EstimatorReport rep =
      finish("mcc", spec, roots, std::move(mv), kappa, true, cfg);
  // a squared correlation lives in [0, 1]; keep the raw value visible
  rep.estimate = std::min(std::max(rep.raw_estimate, 0.0), 1.0);
  return rep;
}

double pseudo_r2_degenerate(const Eigen::MatrixXd& x_rows,
                            const Eigen::VectorXd& y,
                            Eigen::VectorXd* fitted_out) {
  const Eigen::Index n = x_rows.rows();
  const Eigen::Index p = x_rows.cols();
  require(p > n, ErrorClass::invalid_input,
          "wrong regime: the pseudoinverse fit degenerates only when p > n");
  require(y.size() == n && n >= 2, ErrorClass::invalid_input,
          "response length must match the number of observations");
  const Eigen::VectorXd yc = y.array() - y.mean();
  const double ynorm = yc.squaredNorm();
  require(ynorm > 0, ErrorClass::numerical, "constant response: zero variance");

  Eigen::MatrixXd xc = x_rows.rowwise() - x_rows.colwise().mean();
  Eigen::MatrixXd gram = xc * xc.transpose();
  gram = ((gram + gram.transpose()) * 0.5).eval();
  EigenSym es = eigen_sym(gram);
  const double clamp = tol::rank_clamp_rel * es.values(n - 1);
  double acc = 0;
  Eigen::VectorXd fitted = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (es.values(i) <= clamp) continue;
    const double coef = es.vectors.col(i).dot(yc);
    acc += coef * coef;
    if (fitted_out) fitted += coef * es.vectors.col(i);
  }
  if (fitted_out) *fitted_out = fitted;
  return acc / ynorm;
}

double pseudoinverse_quadratic_form(const Eigen::MatrixXd& x_rows,
                                    const Eigen::VectorXd& a) {
  SampleSpectrum spec = data_spectrum(x_rows, a);
  return pseudoinverse_quadratic(spec);
}

}  // namespace vesd
