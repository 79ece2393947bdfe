#pragma once

// Closed real intervals with outward rounding.
//
// Every elementary result is widened by one ulp on each side (two ulps for
// pow, whose libm result is not guaranteed correctly rounded). This keeps the
// containment property without touching the FPU rounding mode, so intervals
// can be used from any thread.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <ostream>

#include "twistcc/error.hpp"

namespace twistcc {

namespace detail {

inline double down(double x, int ulps = 1) {
  for (int k = 0; k < ulps; ++k) x = std::nextafter(x, -std::numeric_limits<double>::infinity());
  return x;
}

inline double up(double x, int ulps = 1) {
  for (int k = 0; k < ulps; ++k) x = std::nextafter(x, std::numeric_limits<double>::infinity());
  return x;
}

}  // namespace detail

class Interval {
 public:
  constexpr Interval() = default;
  // Point interval; a double is an exact real so no widening is needed.
  constexpr Interval(double v) : lo_(v), hi_(v) {}  // NOLINT(google-explicit-constructor)
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi)) throw IntervalDomainError("interval with lo > hi or NaN bound");
  }

  static Interval hull(std::initializer_list<double> values) {
    auto [mn, mx] = std::minmax(values);
    return {mn, mx};
  }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double mid() const noexcept { return lo_ + 0.5 * (hi_ - lo_); }
  double width() const noexcept { return hi_ - lo_; }
  double mag() const noexcept { return std::max(std::abs(lo_), std::abs(hi_)); }

  bool contains(double x) const noexcept { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& o) const noexcept { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool contains_zero() const noexcept { return contains(0.0); }
  bool positive() const noexcept { return lo_ > 0.0; }
  bool negative() const noexcept { return hi_ < 0.0; }

  Interval operator-() const noexcept { return Interval(-hi_, -lo_, Unchecked{}); }

  friend Interval operator+(const Interval& a, const Interval& b) {
    return {detail::down(a.lo_ + b.lo_), detail::up(a.hi_ + b.hi_), Unchecked{}};
  }
  friend Interval operator-(const Interval& a, const Interval& b) {
    return {detail::down(a.lo_ - b.hi_), detail::up(a.hi_ - b.lo_), Unchecked{}};
  }
  friend Interval operator*(const Interval& a, const Interval& b) {
    const double p[4] = {a.lo_ * b.lo_, a.lo_ * b.hi_, a.hi_ * b.lo_, a.hi_ * b.hi_};
    auto [mn, mx] = std::minmax_element(p, p + 4);
    return {detail::down(*mn), detail::up(*mx), Unchecked{}};
  }
  friend Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw IntervalDomainError("interval division by an interval containing 0");
    const double p[4] = {a.lo_ / b.lo_, a.lo_ / b.hi_, a.hi_ / b.lo_, a.hi_ / b.hi_};
    auto [mn, mx] = std::minmax_element(p, p + 4);
    return {detail::down(*mn), detail::up(*mx), Unchecked{}};
  }

  Interval& operator+=(const Interval& o) { return *this = *this + o; }
  Interval& operator-=(const Interval& o) { return *this = *this - o; }
  Interval& operator*=(const Interval& o) { return *this = *this * o; }
  Interval& operator/=(const Interval& o) { return *this = *this / o; }

  friend Interval sqr(const Interval& a) {
    const double l2 = a.lo_ * a.lo_;
    const double h2 = a.hi_ * a.hi_;
    if (a.contains_zero()) return {0.0, detail::up(std::max(l2, h2)), Unchecked{}};
    return {std::max(0.0, detail::down(std::min(l2, h2))), detail::up(std::max(l2, h2)), Unchecked{}};
  }

  friend Interval sqrt(const Interval& a) {
    if (a.lo_ < 0.0) throw IntervalDomainError("interval sqrt of an interval with negative members");
    return {std::max(0.0, detail::down(std::sqrt(a.lo_))), detail::up(std::sqrt(a.hi_)), Unchecked{}};
  }

  // x^p for a positive base interval and any real exponent p.
  friend Interval pow(const Interval& a, double p) {
    if (!(a.lo_ > 0.0)) throw IntervalDomainError("interval real power requires a positive base");
    if (p == 0.0) return Interval(1.0);
    const double pl = std::pow(a.lo_, p);
    const double ph = std::pow(a.hi_, p);
    auto [mn, mx] = std::minmax(pl, ph);
    return {std::max(0.0, detail::down(mn, 2)), detail::up(mx, 2), Unchecked{}};
  }

  friend Interval abs(const Interval& a) {
    if (a.lo_ >= 0.0) return a;
    if (a.hi_ <= 0.0) return -a;
    return {0.0, a.mag(), Unchecked{}};
  }

  friend Interval hull(const Interval& a, const Interval& b) {
    return {std::min(a.lo_, b.lo_), std::max(a.hi_, b.hi_), Unchecked{}};
  }

  friend std::ostream& operator<<(std::ostream& os, const Interval& a) {
    return os << '[' << a.lo_ << ", " << a.hi_ << ']';
  }

 private:
  struct Unchecked {};
  constexpr Interval(double lo, double hi, Unchecked) : lo_(lo), hi_(hi) {}

  double lo_ = 0.0;
  double hi_ = 0.0;
};

}  // namespace twistcc
