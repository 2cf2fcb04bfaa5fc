// Empirical Stieltjes transforms of the sample spectrum and their
// derivative jets at real points off the pole set, plus complex evaluation
// used by the contour quadrature oracle.
//
//   m(z)  = (1/p) sum_i (lambda_i - z)^(-1)          (all p eigenvalues)
//   u(z)  = -(1 - p/n)/z + (p/n) m(z)                (companion transform)
//   s(z)  = sum_i w_i (lambda_i - z)^(-1)            (weighted transform)
#pragma once

#include <complex>

#include "core/spectrum.hpp"

namespace vesd {

struct StieltjesJet {
  double z = 0;
  int order = 0;               // highest derivative computed
  std::vector<double> m;       // m[l] = l-th derivative of m at z
  std::vector<double> um;      // companion transform derivatives
  std::vector<double> s;       // weighted transform derivatives
};

// Derivatives 0..order at a real z with min distance > pole_guard from every
// pole (the eigenvalue groups and, when the companion transform has a pole
// there, the origin).  order is capped by tol::jet_cap.
StieltjesJet stieltjes_jet(const SampleSpectrum& spec, double z, int order);

// Complex-plane values for quadrature: m, u, u', s at one point.
struct ComplexTransforms {
  std::complex<double> m, um, dum, s;
};
ComplexTransforms complex_transforms(const SampleSpectrum& spec,
                                     std::complex<double> z);

// Companion transform value alone (cheap; used by the root finder).
double companion_value(const SampleSpectrum& spec, double z);
// First derivative of the companion transform at z.
double companion_derivative(const SampleSpectrum& spec, double z);

}  // namespace vesd
