#include "core/transforms.hpp"

#include <cmath>

namespace vesd {

namespace {

double factorial(int k) {
  double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

void check_point(const SampleSpectrum& spec, double z) {
  require(std::isfinite(z), ErrorClass::invalid_input, "non-finite jet point");
  for (const auto& g : spec.groups)
    require(std::abs(g.value - z) > tol::pole_guard, ErrorClass::numerical,
            "jet point too close to a sample eigenvalue");
  // folding the zero eigenvalue group into -(1-c)/z, the origin carries pole
  // coefficient -(1 - psi/n); it vanishes only for full-rank square spectra
  const double origin_coeff =
      1.0 - static_cast<double>(spec.psi) / static_cast<double>(spec.n);
  if (origin_coeff != 0.0)
    require(std::abs(z) > tol::pole_guard, ErrorClass::numerical,
            "jet point too close to the origin");
  else
    require(z != 0.0, ErrorClass::numerical, "jet point at the origin");
}

}  // namespace

StieltjesJet stieltjes_jet(const SampleSpectrum& spec, double z, int order) {
  require(order >= 0 && order <= tol::jet_cap, ErrorClass::invalid_input,
          "jet order out of range");
  check_point(spec, z);

  StieltjesJet jet;
  jet.z = z;
  jet.order = order;
  jet.m.assign(order + 1, 0.0);
  jet.s.assign(order + 1, 0.0);
  jet.um.assign(order + 1, 0.0);

  for (const auto& g : spec.groups) {
    const double inv = 1.0 / (g.value - z);
    double pw = inv;  // (lambda - z)^(-(l+1))
    for (int l = 0; l <= order; ++l) {
      jet.m[l] += static_cast<double>(g.count) * pw;
      jet.s[l] += g.weight * pw;
      pw *= inv;
    }
  }
  const double c = spec.cn;
  const double p = static_cast<double>(spec.p);
  const double invz = 1.0 / z;
  double zpow = invz;           // z^(-(l+1))
  double sign = 1.0;            // (-1)^l
  for (int l = 0; l <= order; ++l) {
    const double fac = factorial(l);
    jet.m[l] *= fac / p;
    jet.s[l] *= fac;
    jet.um[l] = -(1.0 - c) * sign * fac * zpow + c * jet.m[l];
    zpow *= invz;
    sign = -sign;
  }
  return jet;
}

ComplexTransforms complex_transforms(const SampleSpectrum& spec,
                                     std::complex<double> z) {
  using cd = std::complex<double>;
  cd m0 = 0, m1 = 0, s0 = 0;
  for (const auto& g : spec.groups) {
    const cd inv = 1.0 / (cd(g.value) - z);
    m0 += static_cast<double>(g.count) * inv;
    m1 += static_cast<double>(g.count) * inv * inv;
    s0 += g.weight * inv;
  }
  const double p = static_cast<double>(spec.p);
  const double c = spec.cn;
  ComplexTransforms out;
  out.m = m0 / p;
  out.s = s0;
  out.um = -(1.0 - c) / z + c * out.m;
  out.dum = (1.0 - c) / (z * z) + c * m1 / p;
  return out;
}

double companion_value(const SampleSpectrum& spec, double z) {
  double m0 = 0;
  for (const auto& g : spec.groups)
    m0 += static_cast<double>(g.count) / (g.value - z);
  m0 /= static_cast<double>(spec.p);
  return -(1.0 - spec.cn) / z + spec.cn * m0;
}

double companion_derivative(const SampleSpectrum& spec, double z) {
  double m1 = 0;
  for (const auto& g : spec.groups) {
    const double inv = 1.0 / (g.value - z);
    m1 += static_cast<double>(g.count) * inv * inv;
  }
  m1 /= static_cast<double>(spec.p);
  return (1.0 - spec.cn) / (z * z) + spec.cn * m1;
}

}  // namespace vesd
