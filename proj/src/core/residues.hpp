// Residue engine for the moment-reconstruction integrands and the moment
// estimators built on it, plus the independent contour-quadrature oracle.
//
// Integrand families, with u the companion transform and s the weighted
// transform of the spectrum at hand:
//   known-a : z s(z) u'(z) / u(z)^(j+1)
//   sr-c2   : z u'(z) / u(z)^(j+1)            (mean-direction correction term)
//   mcc     : (s(z) - 1) u'(z) / (z u(z)^(j+3))
// Every family is analytic at the origin; sample eigenvalues contribute a
// residue only for known-a at j = 1.
#pragma once

#include <optional>

#include "core/roots.hpp"
#include "core/spectrum.hpp"
#include "core/transforms.hpp"

namespace vesd {

enum class IntegrandKind { known_a, sr_c2, mcc };

// Which estimator family a moment vector belongs to.
enum class MomentKind { known_a, sharpe, mcc };

// Residue at a companion-transform zero, read off truncated series division.
// The jet must be centered at the root and carry derivatives to order j+1
// (known-a, sr-c2) or j+3 (mcc).
double residue_at_eta(const StieltjesJet& jet_at_root, int j, IntegrandKind kind);
// Convenience overload computing the jet internally.
double residue_at_eta(const SampleSpectrum& spec, double root, int j,
                      IntegrandKind kind);

// Independent check: (1/2 pi i) times the contour integral of the integrand
// over a circle |z - pole| = radius, by M-point trapezoid quadrature of the
// complex-valued transforms (no series machinery involved).  The circle must
// separate `pole` from every other pole of the integrand; the inventory is
// the positive eigenvalue groups plus the companion zeros.
double contour_oracle(const SampleSpectrum& spec, IntegrandKind kind, int j,
                      double pole, double radius, int points = 2048);

// Estimated moments of the target spectral distribution.
struct MomentBreakdown {
  double lambda_part = 0;  // residues at sample eigenvalues (before sign flip)
  double eta_part = 0;     // residues at companion zeros (before sign flip)
};

struct MomentVector {
  MomentKind kind = MomentKind::known_a;
  std::vector<double> raw;                    // raw[j-1] = j-th moment estimate
  std::optional<std::vector<double>> truncated;
  std::vector<MomentBreakdown> breakdown;     // aligned with raw
  int k() const { return static_cast<int>(raw.size()); }
};

// Moments 1..k for a known reference direction.  Roots may be supplied to
// reuse an existing computation.
MomentVector estimate_moments_known_a(const SampleSpectrum& spec, int k,
                                      const CompanionZeros* roots = nullptr);

// Moments 1..k for the mean direction (spectrum weighted by the raw sample
// mean), bias-corrected and scaled by 1/kappa_mu.
MomentVector estimate_moments_sharpe(const SampleSpectrum& spec_mean,
                                     double kappa_mu, int k,
                                     const CompanionZeros* roots = nullptr);

// Moments 1..k for the covariance direction (spectrum weighted by the sample
// cross-covariance normalized by the response variance), scaled by
// 1/kappa_sigma.
MomentVector estimate_moments_mcc(const SampleSpectrum& spec_xy,
                                  double kappa_sigma, int k,
                                  const CompanionZeros* roots = nullptr);

// Order-preserving truncation to the moment body of distributions supported
// on [a0, b0]: the first moment is clamped to [a0, b0], higher moments to
// [t1^j - delta, b0^j] where t1 is the truncated first moment.  Idempotent.
std::vector<double> truncate_moments(const std::vector<double>& raw, double a0,
                                     double b0, double delta);

}  // namespace vesd
