#include "core/series.hpp"

#include <cmath>

namespace vesd {

TruncatedSeries TruncatedSeries::add(const TruncatedSeries& o) const {
  check_len(o);
  TruncatedSeries r(size());
  for (std::size_t i = 0; i < size(); ++i) r[i] = c_[i] + o[i];
  return r;
}

TruncatedSeries TruncatedSeries::sub(const TruncatedSeries& o) const {
  check_len(o);
  TruncatedSeries r(size());
  for (std::size_t i = 0; i < size(); ++i) r[i] = c_[i] - o[i];
  return r;
}

TruncatedSeries TruncatedSeries::mul(const TruncatedSeries& o) const {
  check_len(o);
  TruncatedSeries r(size());
  for (std::size_t i = 0; i < size(); ++i) {
    double acc = 0;
    for (std::size_t j = 0; j <= i; ++j) acc += c_[j] * o[i - j];
    r[i] = acc;
  }
  return r;
}

TruncatedSeries TruncatedSeries::div(const TruncatedSeries& o) const {
  check_len(o);
  require(o[0] != 0.0 && std::isfinite(o[0]), ErrorClass::numerical,
          "series division by a series with vanishing constant term");
  TruncatedSeries r(size());
  for (std::size_t i = 0; i < size(); ++i) {
    double acc = c_[i];
    for (std::size_t j = 1; j <= i; ++j) acc -= o[j] * r[i - j];
    r[i] = acc / o[0];
  }
  return r;
}

TruncatedSeries TruncatedSeries::pow(int k) const {
  require(k >= 1, ErrorClass::invalid_input, "series power must be >= 1");
  TruncatedSeries r = *this;
  for (int i = 1; i < k; ++i) r = r.mul(*this);
  return r;
}

TruncatedSeries TruncatedSeries::scaled(double f) const {
  TruncatedSeries r(size());
  for (std::size_t i = 0; i < size(); ++i) r[i] = c_[i] * f;
  return r;
}

}  // namespace vesd
