#include "core/roots.hpp"

#include <cmath>

#include "core/transforms.hpp"

namespace vesd {

namespace {

// One root of u in (lo_pole, hi_pole) where u(lo_pole+) = -inf and
// u(hi_pole-) = +inf.
double root_in_interval(const SampleSpectrum& spec, double lo_pole,
                        double hi_pole) {
  const double gap = hi_pole - lo_pole;
  // Relative offsets collapse to zero once the gap is tiny next to the pole
  // location itself; landing exactly on a pole reads the divergence with the
  // wrong sign, so keep at least one representable point of clearance.
  double lo = lo_pole + gap * 1e-12;
  if (!(lo > lo_pole)) lo = std::nextafter(lo_pole, hi_pole);
  double hi = hi_pole - gap * 1e-12;
  if (!(hi < hi_pole)) hi = std::nextafter(hi_pole, lo_pole);
  double flo = companion_value(spec, lo);
  double fhi = companion_value(spec, hi);
  // push endpoints toward the poles if float noise hides the divergence
  for (int push = 0; push < 8 && flo >= 0; ++push) {
    double next = lo_pole + (lo - lo_pole) * 1e-3;
    if (!(next > lo_pole)) next = std::nextafter(lo_pole, hi_pole);
    if (next == lo) break;
    lo = next;
    flo = companion_value(spec, lo);
  }
  for (int push = 0; push < 8 && fhi <= 0; ++push) {
    double next = hi_pole - (hi_pole - hi) * 1e-3;
    if (!(next < hi_pole)) next = std::nextafter(hi_pole, lo_pole);
    if (next == hi) break;
    hi = next;
    fhi = companion_value(spec, hi);
  }
  require(flo < 0 && fhi > 0, ErrorClass::numerical,
          "failed to bracket a companion-transform zero");

  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi_pole; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval at float resolution
    const double fm = companion_value(spec, mid);
    if (fm < 0)
      lo = mid;
    else if (fm > 0)
      hi = mid;
    else
      return mid;
  }
  // Newton polish, clamped to the bracket
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 5; ++it) {
    const double f = companion_value(spec, x);
    const double d = companion_derivative(spec, x);
    if (!(d > 0)) break;
    double nx = x - f / d;
    if (!(nx > lo && nx < hi)) break;
    if (std::abs(nx - x) <= 1e-17 * std::abs(x)) {
      x = nx;
      break;
    }
    x = nx;
  }
  return x;
}

}  // namespace

CompanionZeros find_companion_roots(const SampleSpectrum& spec) {
  require(spec.psi >= 1, ErrorClass::numerical,
          "degenerate spectrum: no positive eigenvalues");
  std::vector<double> nz_values;
  for (const auto& g : spec.groups)
    if (g.value > 0) nz_values.push_back(g.value);

  CompanionZeros out;
  out.roots.reserve(nz_values.size());
  for (std::size_t i = 0; i < nz_values.size(); ++i) {
    const double hi = nz_values[i];
    const double lo = (i + 1 < nz_values.size()) ? nz_values[i + 1] : 0.0;
    out.roots.push_back(root_in_interval(spec, lo, hi));
  }
  return out;
}

}  // namespace vesd
