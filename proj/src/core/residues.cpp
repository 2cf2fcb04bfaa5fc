#include "core/residues.hpp"

#include <cmath>

#include "core/series.hpp"

namespace vesd {

namespace {

double factorial(int k) {
  double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Local series (in w = z - root) of the ingredients, to length `len`.
//   H = u(z)/w         (unit: H[0] = u'(root) != 0 at a simple zero)
//   U' = u'(z)
//   S = s(z)
TruncatedSeries series_H(const StieltjesJet& jet, std::size_t len) {
  TruncatedSeries h(len);
  for (std::size_t l = 0; l < len; ++l)
    h[l] = jet.um[l + 1] / factorial(static_cast<int>(l) + 1);
  return h;
}

TruncatedSeries series_dU(const StieltjesJet& jet, std::size_t len) {
  TruncatedSeries d(len);
  for (std::size_t l = 0; l < len; ++l)
    d[l] = jet.um[l + 1] / factorial(static_cast<int>(l));
  return d;
}

TruncatedSeries series_S(const StieltjesJet& jet, std::size_t len) {
  TruncatedSeries s(len);
  for (std::size_t l = 0; l < len; ++l)
    s[l] = jet.s[l] / factorial(static_cast<int>(l));
  return s;
}

TruncatedSeries series_z(double root, std::size_t len) {
  TruncatedSeries z(len);
  z[0] = root;
  if (len > 1) z[1] = 1.0;
  return z;
}

TruncatedSeries series_inv_z(double root, std::size_t len) {
  // 1/(root + w) = sum (-1)^l w^l / root^(l+1)
  TruncatedSeries z(len);
  double term = 1.0 / root;
  for (std::size_t l = 0; l < len; ++l) {
    z[l] = term;
    term *= -1.0 / root;
  }
  return z;
}

}  // namespace

double residue_at_eta(const StieltjesJet& jet, int j, IntegrandKind kind) {
  require(j >= 1, ErrorClass::invalid_input, "moment order must be >= 1");
  const int need = (kind == IntegrandKind::mcc) ? j + 3 : j + 1;
  require(jet.order >= need, ErrorClass::invalid_input,
          "jet order too low for requested residue");
  require(std::abs(jet.um[0]) < 1e-6, ErrorClass::invalid_input,
          "jet is not centered at a companion-transform zero");
  require(std::abs(jet.um[1]) > tol::root_deriv_floor, ErrorClass::numerical,
          "degenerate root: companion transform derivative vanishes");

  if (kind == IntegrandKind::mcc) {
    const std::size_t len = static_cast<std::size_t>(j) + 3;
    TruncatedSeries s = series_S(jet, len);
    s[0] -= 1.0;  // the integrand carries s - 1
    TruncatedSeries num =
        s.mul(series_dU(jet, len)).mul(series_inv_z(jet.z, len));
    TruncatedSeries h = series_H(jet, len);
    return num.div(h.pow(j + 3))[len - 1];
  }

  const std::size_t len = static_cast<std::size_t>(j) + 1;
  TruncatedSeries num = (kind == IntegrandKind::known_a)
                            ? series_z(jet.z, len)
                                  .mul(series_S(jet, len))
                                  .mul(series_dU(jet, len))
                            : series_z(jet.z, len).mul(series_dU(jet, len));
  TruncatedSeries h = series_H(jet, len);
  return num.div(h.pow(j + 1))[len - 1];
}

double residue_at_eta(const SampleSpectrum& spec, double root, int j,
                      IntegrandKind kind) {
  const int need = (kind == IntegrandKind::mcc) ? j + 3 : j + 1;
  return residue_at_eta(stieltjes_jet(spec, root, need), j, kind);
}

double contour_oracle(const SampleSpectrum& spec, IntegrandKind kind, int j,
                      double pole, double radius, int points) {
  require(j >= 1, ErrorClass::invalid_input, "moment order must be >= 1");
  require(radius > 0 && std::isfinite(pole), ErrorClass::invalid_input,
          "bad quadrature circle");
  require(points >= 16, ErrorClass::invalid_input, "too few quadrature points");

  // circle must separate the pole from every other candidate pole
  CompanionZeros zeros = find_companion_roots(spec);
  std::vector<double> inventory;
  for (const auto& g : spec.groups)
    if (g.value > 0) inventory.push_back(g.value);
  inventory.insert(inventory.end(), zeros.roots.begin(), zeros.roots.end());
  inventory.push_back(0.0);  // origin: analytic for all families, but keep it out
  bool centered = false;
  for (double q : inventory) {
    const double dist = std::abs(q - pole);
    if (dist <= radius * 1e-9) {
      centered = true;
      continue;
    }
    require(dist > radius, ErrorClass::invalid_input,
            "quadrature circle does not separate the pole");
  }
  require(centered, ErrorClass::invalid_input,
          "quadrature center is not a candidate pole");

  using cd = std::complex<double>;
  cd acc = 0;
  const double step = 2.0 * M_PI / points;
  for (int m = 0; m < points; ++m) {
    const double th = step * m;
    const cd offset = cd(radius * std::cos(th), radius * std::sin(th));
    const cd z = cd(pole) + offset;
    ComplexTransforms t = complex_transforms(spec, z);
    cd f;
    switch (kind) {
      case IntegrandKind::known_a: {
        cd upow = 1.0;
        for (int i = 0; i <= j; ++i) upow *= t.um;
        f = z * t.s * t.dum / upow;
        break;
      }
      case IntegrandKind::sr_c2: {
        cd upow = 1.0;
        for (int i = 0; i <= j; ++i) upow *= t.um;
        f = z * t.dum / upow;
        break;
      }
      case IntegrandKind::mcc: {
        cd upow = 1.0;
        for (int i = 0; i < j + 3; ++i) upow *= t.um;
        f = (t.s - 1.0) * t.dum / (z * upow);
        break;
      }
    }
    // (1/2 pi i) . integral f dz  ==  (1/M) sum f(z_m) (z_m - pole)
    acc += f * offset;
  }
  acc /= static_cast<double>(points);
  require(std::abs(acc.imag()) <=
              1e-6 * std::max(1.0, std::abs(acc.real())),
          ErrorClass::numerical, "contour quadrature returned a complex value");
  return acc.real();
}

namespace {

// Residues at the positive sample eigenvalue groups.  Only the first-moment
// known-a integrand picks these up; a merged group of multiplicity g and
// total weight W contributes -(n/g) lambda W (the companion transform's pole
// coefficient at the group is -g/n).
double lambda_residue_sum(const SampleSpectrum& spec, int j) {
  if (j != 1) return 0.0;
  double acc = 0;
  for (const auto& g : spec.groups) {
    if (g.value <= 0) continue;
    acc -= static_cast<double>(spec.n) / static_cast<double>(g.count) *
           g.value * g.weight;
  }
  return acc;
}

double sign_flip(int j) { return (j % 2 == 0) ? 1.0 : -1.0; }

struct RootJets {
  std::vector<StieltjesJet> jets;
};

RootJets jets_at_roots(const SampleSpectrum& spec, const CompanionZeros& roots,
                       int order) {
  RootJets rj;
  rj.jets.reserve(roots.roots.size());
  for (double r : roots.roots) rj.jets.push_back(stieltjes_jet(spec, r, order));
  return rj;
}

}  // namespace

MomentVector estimate_moments_known_a(const SampleSpectrum& spec, int k,
                                      const CompanionZeros* roots) {
  require(k >= 1 && k <= tol::moment_cap, ErrorClass::invalid_input,
          "moment order k out of range");
  CompanionZeros local;
  if (!roots) {
    local = find_companion_roots(spec);
    roots = &local;
  }
  RootJets rj = jets_at_roots(spec, *roots, k + 1);

  MomentVector mv;
  mv.kind = MomentKind::known_a;
  mv.raw.resize(k);
  mv.breakdown.resize(k);
  for (int j = 1; j <= k; ++j) {
    double eta = 0;
    for (const auto& jet : rj.jets)
      eta += residue_at_eta(jet, j, IntegrandKind::known_a);
    const double lam = lambda_residue_sum(spec, j);
    mv.breakdown[j - 1] = {lam, eta};
    mv.raw[j - 1] = sign_flip(j) * (lam + eta);
  }
  return mv;
}

MomentVector estimate_moments_sharpe(const SampleSpectrum& spec_mean,
                                     double kappa_mu, int k,
                                     const CompanionZeros* roots) {
  require(k >= 1 && k <= tol::moment_cap, ErrorClass::invalid_input,
          "moment order k out of range");
  require(kappa_mu > 0, ErrorClass::invalid_input, "kappa must be positive");
  CompanionZeros local;
  if (!roots) {
    local = find_companion_roots(spec_mean);
    roots = &local;
  }
  RootJets rj = jets_at_roots(spec_mean, *roots, k + 1);

  MomentVector mv;
  mv.kind = MomentKind::sharpe;
  mv.raw.resize(k);
  mv.breakdown.resize(k);
  for (int j = 1; j <= k; ++j) {
    // C1: the known-a assembly on the raw mean direction
    double eta = 0;
    for (const auto& jet : rj.jets)
      eta += residue_at_eta(jet, j, IntegrandKind::known_a);
    const double lam = lambda_residue_sum(spec_mean, j);
    // C2: the noise-correction term, zeros only
    double c2 = 0;
    for (const auto& jet : rj.jets)
      c2 += residue_at_eta(jet, j, IntegrandKind::sr_c2);
    mv.breakdown[j - 1] = {lam / kappa_mu, (eta + c2) / kappa_mu};
    mv.raw[j - 1] = sign_flip(j) * (lam + eta + c2) / kappa_mu;
  }
  return mv;
}

MomentVector estimate_moments_mcc(const SampleSpectrum& spec_xy,
                                  double kappa_sigma, int k,
                                  const CompanionZeros* roots) {
  require(k >= 1 && k <= tol::moment_cap, ErrorClass::invalid_input,
          "moment order k out of range");
  require(kappa_sigma > 0, ErrorClass::invalid_input, "kappa must be positive");
  CompanionZeros local;
  if (!roots) {
    local = find_companion_roots(spec_xy);
    roots = &local;
  }
  RootJets rj = jets_at_roots(spec_xy, *roots, k + 3);

  MomentVector mv;
  mv.kind = MomentKind::mcc;
  mv.raw.resize(k);
  mv.breakdown.resize(k);
  for (int j = 1; j <= k; ++j) {
    double eta = 0;
    for (const auto& jet : rj.jets)
      eta += residue_at_eta(jet, j, IntegrandKind::mcc);
    mv.breakdown[j - 1] = {0.0, eta / kappa_sigma};
    mv.raw[j - 1] = sign_flip(j) * eta / kappa_sigma;
  }
  return mv;
}

std::vector<double> truncate_moments(const std::vector<double>& raw, double a0,
                                     double b0, double delta) {
  require(0 < a0 && a0 < b0, ErrorClass::invalid_input,
          "support interval must satisfy 0 < a0 < b0");
  require(delta > 0, ErrorClass::invalid_input, "delta must be positive");
  require(!raw.empty(), ErrorClass::invalid_input, "empty moment vector");
  std::vector<double> out(raw.size());
  const double t1 = std::min(std::max(raw[0], a0), b0);
  out[0] = t1;
  double lo = t1, hi = b0;  // running powers t1^j, b0^j
  for (std::size_t i = 1; i < raw.size(); ++i) {
    lo *= t1;
    hi *= b0;
    out[i] = std::min(std::max(raw[i], lo - delta), hi);
  }
  return out;
}

}  // namespace vesd
