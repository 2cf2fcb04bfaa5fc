// Error taxonomy, tolerances and small utilities shared across the library.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vesd {

// Error classes; values double as CLI exit codes.
enum class ErrorClass : int {
  invalid_input = 2,   // bad arguments, malformed files, dimension mismatches
  numerical = 3,       // degenerate spectra, failed brackets, non-finite values
  solver_stall = 4,    // LP iteration cap exceeded
  zero_signal = 5,     // scale estimate below detection threshold
};

class VesdError : public std::runtime_error {
 public:
  VesdError(ErrorClass cls, const std::string& msg)
      : std::runtime_error(msg), cls_(cls) {}
  ErrorClass cls() const noexcept { return cls_; }
  int exit_code() const noexcept { return static_cast<int>(cls_); }

 private:
  ErrorClass cls_;
};

[[noreturn]] inline void fail(ErrorClass cls, const std::string& msg) {
  throw VesdError(cls, msg);
}

inline void require(bool ok, ErrorClass cls, const std::string& msg) {
  if (!ok) fail(cls, msg);
}

// Numerical policy constants.
namespace tol {
inline constexpr double rank_clamp_rel = 1e-10;   // eigenvalue -> 0 below this * lambda_max
inline constexpr double tie_merge_rel = 1e-11;    // eigenvalue group merge threshold * max(1, lambda_max)
inline constexpr double pole_guard = 1e-9;        // min distance from a jet point to any pole
inline constexpr double root_deriv_floor = 1e-13; // |u'(eta)| below this is a degenerate root
inline constexpr double zero_signal = 1e-12;      // kappa below this aborts with zero-signal
inline constexpr double unit_norm = 1e-10;        // allowed deviation of ||a|| from 1
inline constexpr double weight_sum_rel = 1e-8;    // allowed drift of sum(weights) vs ||ref||^2
inline constexpr int moment_cap = 8;              // max moment order k
inline constexpr int jet_cap = 12;                // max jet derivative order
inline constexpr int lp_iter_cap = 20000;         // default simplex iteration cap
inline constexpr double fail_frac_abort = 0.10;   // replication failure fraction that aborts a cell
}  // namespace tol

// SplitMix64 step; used to derive per-replication RNG substream seeds so that
// results are independent of scheduling order and worker count.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base ^ splitmix64(index + 1));
}

}  // namespace vesd
