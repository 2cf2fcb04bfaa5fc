// Sample covariance, symmetric eigendecomposition and the weighted sample
// spectrum (eigenvalues plus squared projections of a reference vector).
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "core/common.hpp"

namespace vesd {

// Centered sample covariance S = sum (x_i - xbar)(x_i - xbar)^T / (n - 1).
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x_rows);

// Symmetric eigendecomposition, ascending values (LAPACK dsyevd).
struct EigenSym {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns aligned with values
};
EigenSym eigen_sym(const Eigen::MatrixXd& sym);

// One merged spectral location: equal (or numerically tied) eigenvalues are
// collapsed into a single group carrying the multiplicity and the total
// projection weight.  The zero group, when present, is the last entry.
struct SpectralGroup {
  double value = 0;
  std::int64_t count = 0;
  double weight = 0;
};

// Weighted spectrum of a sample covariance with respect to a reference
// vector.  Positive eigenvalues keep per-direction weights; the null space is
// a single merged block because individual null directions are
// basis-dependent and only the total mass enters any downstream quantity.
struct SampleSpectrum {
  Eigen::VectorXd lambda_nz;  // descending, strictly positive
  Eigen::VectorXd weight_nz;  // (ref . v_i)^2 aligned with lambda_nz
  std::int64_t zero_count = 0;
  double zero_weight = 0;

  std::int64_t n = 0;  // sample size
  std::int64_t p = 0;  // dimension
  std::int64_t psi = 0;  // number of positive eigenvalues (== lambda_nz.size())
  double cn = 0;         // p / n
  double weight_total = 0;  // ||ref||^2

  std::vector<SpectralGroup> groups;  // merged ties, descending; zero group last

  double lambda_max() const { return psi > 0 ? lambda_nz(0) : 0.0; }
  // Full length-p eigenvalue vector (zeros appended), for serialization/tests.
  Eigen::VectorXd full_lambdas() const;
};

// Spectrum of a dense symmetric PSD matrix with respect to `ref`.
// Eigenvalues below rank_clamp_rel * lambda_max are clamped to exactly zero.
SampleSpectrum spectral_decompose(const Eigen::MatrixXd& sym,
                                  const Eigen::VectorXd& ref,
                                  std::int64_t n_for_cn);

// Spectrum of the sample covariance of `x_rows` with respect to `ref`,
// routed through the n x n Gram matrix when p > n.  Identical spectral
// measure to spectral_decompose(sample_covariance(x), ref, n) up to float
// noise, at O(min(n,p)^3) cost.
SampleSpectrum data_spectrum(const Eigen::MatrixXd& x_rows, const Eigen::VectorXd& ref);

// a^T S^+ a evaluated on the spectrum (pseudoinverse quadratic form of the
// spectrum's own reference vector).
double pseudoinverse_quadratic(const SampleSpectrum& spec);

}  // namespace vesd
