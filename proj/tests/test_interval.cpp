#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <random>

#include "twistcc/interval.hpp"

using namespace twistcc;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

struct Sampler {
  std::mt19937_64 rng{2024};

  double value(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  Interval interval(double lo, double hi) {
    const double a = value(lo, hi);
    const double b = value(lo, hi);
    return {std::min(a, b), std::max(a, b)};
  }
  double member(const Interval& v) {
    switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
      case 0:
        return v.lo();
      case 1:
        return v.hi();
      default:
        return value(v.lo(), v.hi());
    }
  }
};

bool encloses(const Interval& v, const Big& exact) { return Big(v.lo()) <= exact && exact <= Big(v.hi()); }

}  // namespace

TEST(Interval, Examples) {
  const Interval s = Interval(1, 2) + Interval(3, 4);
  EXPECT_TRUE(s.contains(Interval(4, 6)));
  EXPECT_LT(s.width(), 2.0 + 1e-14);
  const Interval p = Interval(-1, 2) * Interval(-3, 1);
  EXPECT_TRUE(p.contains(Interval(-6, 3)));
  EXPECT_LT(p.width(), 9.0 + 1e-13);
  EXPECT_TRUE(sqr(Interval(-1, 2)).contains(Interval(0, 4)));
  EXPECT_EQ(sqr(Interval(-1, 2)).lo(), 0.0);
  EXPECT_TRUE(abs(Interval(-3, 1)).contains(Interval(0, 3)));
  EXPECT_TRUE(Interval(1.0, 2.0).positive());
  EXPECT_TRUE(Interval(-2.0, -1.0).negative());
  EXPECT_TRUE(Interval(-1.0, 1.0).contains_zero());
}

TEST(Interval, DomainErrors) {
  EXPECT_THROW(Interval(2.0, 1.0), IntervalDomainError);
  EXPECT_THROW(Interval(1, 2) / Interval(-1, 1), IntervalDomainError);
  EXPECT_THROW(sqrt(Interval(-1, 1)), IntervalDomainError);
  EXPECT_THROW(pow(Interval(0, 1), 2.5), IntervalDomainError);
  EXPECT_THROW(pow(Interval(-2, -1), 3.0), IntervalDomainError);
}

TEST(Interval, RandomizedContainment) {
  Sampler s;
  std::size_t violations = 0;
  std::size_t checks = 0;
  for (int rep = 0; rep < 20000; ++rep) {
    const Interval a = s.interval(-10.0, 10.0);
    const Interval b = s.interval(-10.0, 10.0);
    const Interval pa = s.interval(1e-3, 10.0);
    const Interval pb = s.interval(0.5, 10.0);
    const double p = s.value(-4.0, 4.0);
    const double x = s.member(a);
    const double y = s.member(b);
    const double u = s.member(pa);
    const double w = s.member(pb);
    violations += !encloses(a + b, Big(x) + Big(y));
    violations += !encloses(a - b, Big(x) - Big(y));
    violations += !encloses(a * b, Big(x) * Big(y));
    violations += !encloses(a / pb, Big(x) / Big(w));
    violations += !encloses(sqrt(pa), boost::multiprecision::sqrt(Big(u)));
    violations += !encloses(pow(pa, p), boost::multiprecision::pow(Big(u), Big(p)));
    violations += !encloses(sqr(a), Big(x) * Big(x));
    checks += 7;
  }
  EXPECT_GE(checks, 100000u);
  EXPECT_EQ(violations, 0u);
}

TEST(Interval, CompoundExpressionContainment) {
  // A chain resembling the pair-table pipeline: r = sqrt(dx² + dy²), R = r^-A.
  Sampler s;
  for (int rep = 0; rep < 2000; ++rep) {
    const Interval dx = s.interval(0.1, 2.0);
    const Interval dy = s.interval(-2.0, 2.0);
    const double A = s.value(2.0, 5.0);
    const Interval R = pow(sqrt(sqr(dx) + sqr(dy)), -A) - Interval(1.0);
    const double x = s.member(dx);
    const double y = s.member(dy);
    const Big exact = boost::multiprecision::pow(boost::multiprecision::sqrt(Big(x) * x + Big(y) * y), Big(-A)) - 1;
    EXPECT_TRUE(encloses(R, exact));
  }
}
