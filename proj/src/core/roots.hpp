// Zeros of the companion transform u: one root strictly between consecutive
// distinct positive eigenvalues and one below the smallest, none above the
// largest.  u is strictly increasing on each interval (the folded origin term
// -(1 - psi/n)/z and every pole term have positive derivative there), so
// bisection over the bracket is safe; a few bracket-guarded Newton steps
// polish the result.
#pragma once

#include "core/spectrum.hpp"

namespace vesd {

struct CompanionZeros {
  std::vector<double> roots;  // descending, one per positive eigenvalue group
};

CompanionZeros find_companion_roots(const SampleSpectrum& spec);

}  // namespace vesd
