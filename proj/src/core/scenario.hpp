// Simulation designs: covariance families, direction settings, the two
// sampling models and closed-form ground truths.
#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "core/data_matrix.hpp"

namespace vesd {

enum class CovCase { case1, case2, case3, case4, custom };
enum class VectorSetting { dense1, sparse1, dense2, sparse2, custom };
enum class SampleModel { gaussian_iid, elliptical_gamma };

CovCase cov_case_from_string(const std::string& s);
VectorSetting vector_setting_from_string(const std::string& s);
SampleModel sample_model_from_string(const std::string& s);
std::string to_string(CovCase c);
std::string to_string(VectorSetting v);
std::string to_string(SampleModel m);

// case1: diag(2.5 + 2 i / p), i = 1..p
// case2: tridiagonal, 2.5 on the diagonal, 0.8 on the first off-diagonal
// case3: diag with the first p/2 entries 3 and the rest 1.5 (p even)
// case4: Toeplitz 2 * 0.3^|i-j|
Eigen::MatrixXd make_covariance(CovCase c, std::int64_t p);

// dense1 : sqrt(0.8/p) on the first p/2 coords, sqrt(1.2/p) on the rest (p even)
// sparse1: 1/sqrt(8) on the first 8 coords (p >= 8)
// dense2 : 1/sqrt(p) everywhere
// sparse2: (0.6, 0.8, 0, ...) (p >= 2)
Eigen::VectorXd make_vector(VectorSetting v, std::int64_t p);

// Symmetric PSD square root via eigendecomposition (fixed choice so sampled
// bytes are reproducible across code paths).
Eigen::MatrixXd covariance_sqrt(const Eigen::MatrixXd& sigma);

// x_i = mu + Sigma^{1/2} z_i with z iid standard normal (gaussian-iid) or
// z = xi * s / sqrt(p+1), xi ~ Gamma(p, 1), s uniform on the unit sphere
// (elliptical-gamma; E||z||^2 = p under this scaling).
DataMatrix generate_sample(SampleModel model, const Eigen::MatrixXd& sigma,
                           const Eigen::VectorXd& mu, std::int64_t n,
                           std::uint64_t seed);
// Variant with a precomputed square root (per-cell caching).
DataMatrix generate_sample_with_sqrt(SampleModel model,
                                     const Eigen::MatrixXd& sigma_sqrt,
                                     const Eigen::VectorXd& mu, std::int64_t n,
                                     std::uint64_t seed);

// Ground truths.
double truth_quadratic_form(const Eigen::MatrixXd& sigma,
                            const Eigen::VectorXd& a);  // a^T Sigma^{-1} a

// Joint (p+1)-dimensional covariance for the regression target: response
// variance 1, cross-covariance sigma_xy, predictor block sigma_xx.  Errors if
// the result is not positive definite.
Eigen::MatrixXd joint_covariance(const Eigen::MatrixXd& sigma_xx,
                                 const Eigen::VectorXd& sigma_xy);

}  // namespace vesd
