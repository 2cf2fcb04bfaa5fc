// Fixed-length truncated power series in a local variable w, used to read
// residues off rational expressions in the Stieltjes transforms.  All
// operands in one computation share the same truncation length.
#pragma once

#include <vector>

#include "core/common.hpp"

namespace vesd {

class TruncatedSeries {
 public:
  explicit TruncatedSeries(std::size_t len) : c_(len, 0.0) {
    require(len >= 1, ErrorClass::invalid_input, "series length must be >= 1");
  }
  explicit TruncatedSeries(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    require(!c_.empty(), ErrorClass::invalid_input, "series length must be >= 1");
  }

  std::size_t size() const { return c_.size(); }
  double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }
  const std::vector<double>& coeffs() const { return c_; }

  TruncatedSeries add(const TruncatedSeries& o) const;
  TruncatedSeries sub(const TruncatedSeries& o) const;
  TruncatedSeries mul(const TruncatedSeries& o) const;
  // division requires o[0] != 0
  TruncatedSeries div(const TruncatedSeries& o) const;
  TruncatedSeries pow(int k) const;  // k >= 1 by repeated multiplication
  TruncatedSeries scaled(double f) const;

 private:
  void check_len(const TruncatedSeries& o) const {
    require(o.size() == size(), ErrorClass::invalid_input,
            "series length mismatch");
  }
  std::vector<double> c_;
};

}  // namespace vesd
