#include "core/scenario.hpp"

#include <cmath>

#include "core/spectrum.hpp"

namespace vesd {

CovCase cov_case_from_string(const std::string& s) {
  if (s == "case1") return CovCase::case1;
  if (s == "case2") return CovCase::case2;
  if (s == "case3") return CovCase::case3;
  if (s == "case4") return CovCase::case4;
  if (s == "custom") return CovCase::custom;
  fail(ErrorClass::invalid_input, "unknown covariance case: " + s);
}

VectorSetting vector_setting_from_string(const std::string& s) {
  if (s == "dense1") return VectorSetting::dense1;
  if (s == "sparse1") return VectorSetting::sparse1;
  if (s == "dense2") return VectorSetting::dense2;
  if (s == "sparse2") return VectorSetting::sparse2;
  if (s == "custom") return VectorSetting::custom;
  fail(ErrorClass::invalid_input, "unknown vector setting: " + s);
}

SampleModel sample_model_from_string(const std::string& s) {
  if (s == "gaussian-iid") return SampleModel::gaussian_iid;
  if (s == "elliptical-gamma") return SampleModel::elliptical_gamma;
  fail(ErrorClass::invalid_input, "unknown sampling model: " + s);
}

std::string to_string(CovCase c) {
  switch (c) {
    case CovCase::case1: return "case1";
    case CovCase::case2: return "case2";
    case CovCase::case3: return "case3";
    case CovCase::case4: return "case4";
    default: return "custom";
  }
}

std::string to_string(VectorSetting v) {
  switch (v) {
    case VectorSetting::dense1: return "dense1";
    case VectorSetting::sparse1: return "sparse1";
    case VectorSetting::dense2: return "dense2";
    case VectorSetting::sparse2: return "sparse2";
    default: return "custom";
  }
}

std::string to_string(SampleModel m) {
  return m == SampleModel::gaussian_iid ? "gaussian-iid" : "elliptical-gamma";
}

Eigen::MatrixXd make_covariance(CovCase c, std::int64_t p) {
  require(p >= 1, ErrorClass::invalid_input, "dimension must be positive");
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(p, p);
  switch (c) {
    case CovCase::case1:
      for (std::int64_t i = 0; i < p; ++i)
        s(i, i) = 2.5 + 2.0 * static_cast<double>(i + 1) / static_cast<double>(p);
      break;
    case CovCase::case2:
      for (std::int64_t i = 0; i < p; ++i) {
        s(i, i) = 2.5;
        if (i + 1 < p) {
          s(i, i + 1) = 0.8;
          s(i + 1, i) = 0.8;
        }
      }
      break;
    case CovCase::case3:
      require(p % 2 == 0, ErrorClass::invalid_input,
              "case3 needs an even dimension");
      for (std::int64_t i = 0; i < p; ++i) s(i, i) = (i < p / 2) ? 3.0 : 1.5;
      break;
    case CovCase::case4:
      for (std::int64_t i = 0; i < p; ++i)
        for (std::int64_t j = 0; j < p; ++j)
          s(i, j) = 2.0 * std::pow(0.3, std::abs(static_cast<double>(i - j)));
      break;
    case CovCase::custom:
      fail(ErrorClass::invalid_input,
           "custom covariance must be supplied explicitly");
  }
  return s;
}

Eigen::VectorXd make_vector(VectorSetting v, std::int64_t p) {
  require(p >= 1, ErrorClass::invalid_input, "dimension must be positive");
  Eigen::VectorXd a = Eigen::VectorXd::Zero(p);
  switch (v) {
    case VectorSetting::dense1: {
      require(p % 2 == 0, ErrorClass::invalid_input,
              "dense1 needs an even dimension");
      const double lo = std::sqrt(0.8 / static_cast<double>(p));
      const double hi = std::sqrt(1.2 / static_cast<double>(p));
      for (std::int64_t i = 0; i < p; ++i) a(i) = (i < p / 2) ? lo : hi;
      break;
    }
    case VectorSetting::sparse1:
      require(p >= 8, ErrorClass::invalid_input, "sparse1 needs p >= 8");
      for (int i = 0; i < 8; ++i) a(i) = 1.0 / std::sqrt(8.0);
      break;
    case VectorSetting::dense2:
      a.setConstant(1.0 / std::sqrt(static_cast<double>(p)));
      break;
    case VectorSetting::sparse2:
      require(p >= 2, ErrorClass::invalid_input, "sparse2 needs p >= 2");
      a(0) = 0.6;
      a(1) = 0.8;
      break;
    case VectorSetting::custom:
      fail(ErrorClass::invalid_input,
           "custom direction must be supplied explicitly");
  }
  return a;
}

Eigen::MatrixXd covariance_sqrt(const Eigen::MatrixXd& sigma) {
  EigenSym es = eigen_sym(sigma);
  require(es.values(0) >= -1e-10 * std::max(1.0, es.values(es.values.size() - 1)),
          ErrorClass::invalid_input, "covariance is not positive semidefinite");
  Eigen::VectorXd root = es.values.cwiseMax(0.0).cwiseSqrt();
  return es.vectors * root.asDiagonal() * es.vectors.transpose();
}

namespace {

DataMatrix sample_impl(SampleModel model, const Eigen::MatrixXd& sigma_sqrt,
                       const Eigen::VectorXd& mu, std::int64_t n,
                       std::uint64_t seed) {
  const Eigen::Index p = sigma_sqrt.rows();
  require(mu.size() == p, ErrorClass::invalid_input, "mean dimension mismatch");
  require(n >= 1, ErrorClass::invalid_input, "sample size must be positive");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::MatrixXd z(n, p);
  if (model == SampleModel::gaussian_iid) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < p; ++j) z(i, j) = gauss(rng);
  } else {
    // z = xi * s / sqrt(p+1), xi ~ Gamma(p, 1), s uniform on the sphere;
    // E||z||^2 = E xi^2 / (p+1) = p(p+1)/(p+1) = p
    std::gamma_distribution<double> gamma(static_cast<double>(p), 1.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(p) + 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      double norm_sq = 0;
      for (Eigen::Index j = 0; j < p; ++j) {
        z(i, j) = gauss(rng);
        norm_sq += z(i, j) * z(i, j);
      }
      require(norm_sq > 0, ErrorClass::numerical, "degenerate sphere draw");
      const double xi = gamma(rng);
      const double f = xi * scale / std::sqrt(norm_sq);
      z.row(i) *= f;
    }
  }
  DataMatrix out;
  out.x = z * sigma_sqrt;  // sqrt is symmetric, so right-multiplication works
  out.x.rowwise() += mu.transpose();
  return out;
}

}  // namespace

DataMatrix generate_sample(SampleModel model, const Eigen::MatrixXd& sigma,
                           const Eigen::VectorXd& mu, std::int64_t n,
                           std::uint64_t seed) {
  return sample_impl(model, covariance_sqrt(sigma), mu, n, seed);
}

DataMatrix generate_sample_with_sqrt(SampleModel model,
                                     const Eigen::MatrixXd& sigma_sqrt,
                                     const Eigen::VectorXd& mu, std::int64_t n,
                                     std::uint64_t seed) {
  return sample_impl(model, sigma_sqrt, mu, n, seed);
}

double truth_quadratic_form(const Eigen::MatrixXd& sigma,
                            const Eigen::VectorXd& a) {
  require(sigma.rows() == a.size(), ErrorClass::invalid_input,
          "dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  require(llt.info() == Eigen::Success, ErrorClass::invalid_input,
          "covariance is not positive definite");
  return a.dot(llt.solve(a));
}

Eigen::MatrixXd joint_covariance(const Eigen::MatrixXd& sigma_xx,
                                 const Eigen::VectorXd& sigma_xy) {
  const Eigen::Index p = sigma_xx.rows();
  require(sigma_xy.size() == p, ErrorClass::invalid_input,
          "cross-covariance dimension mismatch");
  Eigen::MatrixXd joint(p + 1, p + 1);
  joint(0, 0) = 1.0;
  joint.block(0, 1, 1, p) = sigma_xy.transpose();
  joint.block(1, 0, p, 1) = sigma_xy;
  joint.block(1, 1, p, p) = sigma_xx;
  // positive definiteness = regression truth sigma_xy' Sxx^-1 sigma_xy < 1
  Eigen::LLT<Eigen::MatrixXd> llt(joint);
  require(llt.info() == Eigen::Success, ErrorClass::invalid_input,
          "joint covariance is not positive definite");
  return joint;
}

}  // namespace vesd
