#include "core/spectrum.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>

namespace vesd {

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x_rows) {
  const Eigen::Index n = x_rows.rows();
  require(n >= 2, ErrorClass::invalid_input,
          "sample covariance needs at least 2 observations");
  require(x_rows.allFinite(), ErrorClass::invalid_input,
          "data matrix contains non-finite values");
  Eigen::RowVectorXd mean = x_rows.colwise().mean();
  Eigen::MatrixXd xc = x_rows.rowwise() - mean;
  Eigen::MatrixXd s =
      (xc.transpose() * xc) / static_cast<double>(n - 1);
  // enforce exact symmetry against accumulation order noise
  s = ((s + s.transpose()) * 0.5).eval();
  return s;
}

EigenSym eigen_sym(const Eigen::MatrixXd& sym) {
  const Eigen::Index p = sym.rows();
  require(p > 0 && sym.cols() == p, ErrorClass::invalid_input,
          "eigendecomposition needs a square matrix");
  require(sym.allFinite(), ErrorClass::invalid_input,
          "matrix contains non-finite values");
  const double scale = sym.cwiseAbs().maxCoeff();
  require((sym - sym.transpose()).cwiseAbs().maxCoeff() <=
              1e-8 * std::max(1.0, scale),
          ErrorClass::invalid_input, "matrix is not symmetric");
  EigenSym out;
  out.vectors = sym;
  out.values.resize(p);
  const lapack_int info = LAPACKE_dsyevd(
      LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(p),
      out.vectors.data(), static_cast<lapack_int>(p), out.values.data());
  require(info == 0, ErrorClass::numerical,
          "eigendecomposition failed (dsyevd info=" + std::to_string(info) + ")");
  return out;
}

Eigen::VectorXd SampleSpectrum::full_lambdas() const {
  Eigen::VectorXd out(p);
  out.head(psi) = lambda_nz;
  out.tail(p - psi).setZero();
  return out;
}

namespace {

// Merge numerically tied eigenvalues into groups (input descending).
std::vector<SpectralGroup> merge_groups(const Eigen::VectorXd& lam,
                                        const Eigen::VectorXd& wgt,
                                        std::int64_t zero_count,
                                        double zero_weight) {
  std::vector<SpectralGroup> groups;
  const double lmax = lam.size() > 0 ? lam(0) : 0.0;
  const double thr = tol::tie_merge_rel * std::max(1.0, lmax);
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (!groups.empty() && groups.back().value - lam(i) <= thr) {
      auto& g = groups.back();
      // running count-weighted mean keeps the merged location symmetric
      g.value = (g.value * static_cast<double>(g.count) + lam(i)) /
                static_cast<double>(g.count + 1);
      g.count += 1;
      g.weight += wgt(i);
    } else {
      groups.push_back({lam(i), 1, wgt(i)});
    }
  }
  if (zero_count > 0) groups.push_back({0.0, zero_count, zero_weight});
  return groups;
}

SampleSpectrum assemble(Eigen::VectorXd lambda_nz, Eigen::VectorXd weight_nz,
                        std::int64_t zero_count, double zero_weight,
                        std::int64_t n, std::int64_t p, double ref_sq) {
  require(lambda_nz.size() > 0, ErrorClass::numerical,
          "degenerate spectrum: no positive eigenvalues");
  SampleSpectrum spec;
  spec.lambda_nz = std::move(lambda_nz);
  spec.weight_nz = std::move(weight_nz);
  spec.zero_count = zero_count;
  spec.zero_weight = std::max(0.0, zero_weight);
  spec.n = n;
  spec.p = p;
  spec.psi = spec.lambda_nz.size();
  spec.cn = static_cast<double>(p) / static_cast<double>(n);
  spec.weight_total = ref_sq;
  const double wsum = spec.weight_nz.sum() + spec.zero_weight;
  require(std::abs(wsum - ref_sq) <= tol::weight_sum_rel * std::max(1.0, ref_sq),
          ErrorClass::numerical, "spectral weights do not account for ||ref||^2");
  spec.groups = merge_groups(spec.lambda_nz, spec.weight_nz, spec.zero_count,
                             spec.zero_weight);
  return spec;
}

}  // namespace

SampleSpectrum spectral_decompose(const Eigen::MatrixXd& sym,
                                  const Eigen::VectorXd& ref,
                                  std::int64_t n_for_cn) {
  const Eigen::Index p = sym.rows();
  require(ref.size() == p, ErrorClass::invalid_input,
          "reference vector dimension mismatch");
  require(n_for_cn >= 2, ErrorClass::invalid_input, "need n >= 2");
  EigenSym es = eigen_sym(sym);
  const double lmax = es.values(p - 1);
  require(lmax > 0, ErrorClass::numerical,
          "degenerate spectrum: no positive eigenvalues");
  require(es.values(0) >= -1e-8 * lmax, ErrorClass::invalid_input,
          "matrix is not positive semidefinite");
  const double clamp = tol::rank_clamp_rel * lmax;

  std::int64_t psi = 0;
  for (Eigen::Index i = 0; i < p; ++i)
    if (es.values(i) > clamp) ++psi;
  Eigen::VectorXd lam(psi), wgt(psi);
  double zero_weight = 0;
  Eigen::VectorXd proj = es.vectors.transpose() * ref;  // coordinates in eigenbasis
  std::int64_t k = 0;
  for (Eigen::Index i = p - 1; i >= 0; --i) {  // descending
    const double w = proj(i) * proj(i);
    if (es.values(i) > clamp) {
      lam(k) = es.values(i);
      wgt(k) = w;
      ++k;
    } else {
      zero_weight += w;
    }
  }
  return assemble(std::move(lam), std::move(wgt), p - psi, zero_weight,
                  n_for_cn, p, ref.squaredNorm());
}

SampleSpectrum data_spectrum(const Eigen::MatrixXd& x_rows,
                             const Eigen::VectorXd& ref) {
  const Eigen::Index n = x_rows.rows();
  const Eigen::Index p = x_rows.cols();
  require(n >= 2, ErrorClass::invalid_input, "need at least 2 observations");
  require(ref.size() == p, ErrorClass::invalid_input,
          "reference vector dimension mismatch");
  if (p <= n) return spectral_decompose(sample_covariance(x_rows), ref, n);

  // p > n: same nonzero spectrum from the n x n Gram matrix
  require(x_rows.allFinite(), ErrorClass::invalid_input,
          "data matrix contains non-finite values");
  Eigen::RowVectorXd mean = x_rows.colwise().mean();
  Eigen::MatrixXd xc = x_rows.rowwise() - mean;
  Eigen::MatrixXd gram =
      (xc * xc.transpose()) / static_cast<double>(n - 1);
  gram = ((gram + gram.transpose()) * 0.5).eval();
  EigenSym es = eigen_sym(gram);
  const double lmax = es.values(n - 1);
  require(lmax > 0, ErrorClass::numerical,
          "degenerate spectrum: no positive eigenvalues");
  const double clamp = tol::rank_clamp_rel * lmax;

  Eigen::VectorXd b = xc * ref;                     // (Xc ref), n-vector
  Eigen::VectorXd proj = es.vectors.transpose() * b;  // g_i . b
  std::int64_t psi = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (es.values(i) > clamp) ++psi;
  Eigen::VectorXd lam(psi), wgt(psi);
  std::int64_t k = 0;
  double wsum = 0;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    if (es.values(i) <= clamp) continue;
    lam(k) = es.values(i);
    // v_i = Xc^T g_i / sqrt((n-1) lambda_i), so (ref.v_i)^2 = (g_i.b)^2 / ((n-1) lambda_i)
    wgt(k) = proj(i) * proj(i) /
             (static_cast<double>(n - 1) * es.values(i));
    wsum += wgt(k);
    ++k;
  }
  const double ref_sq = ref.squaredNorm();
  double zero_weight = ref_sq - wsum;
  require(zero_weight >= -tol::weight_sum_rel * std::max(1.0, ref_sq),
          ErrorClass::numerical, "negative null-space weight");
  return assemble(std::move(lam), std::move(wgt), p - psi,
                  std::max(0.0, zero_weight), n, p, ref_sq);
}

double pseudoinverse_quadratic(const SampleSpectrum& spec) {
  double acc = 0;
  for (Eigen::Index i = spec.psi - 1; i >= 0; --i)
    acc += spec.weight_nz(i) / spec.lambda_nz(i);
  return acc;
}

}  // namespace vesd
