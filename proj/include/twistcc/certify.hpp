#pragma once

// Rigorous kite Hessian indices over boxes of shape space.
//
// A decided value holds for every shape in the box. Anything that cannot be
// decided comes back as Unknown (an empty optional) rather than an error.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "twistcc/config.hpp"
#include "twistcc/error.hpp"
#include "twistcc/hessian.hpp"
#include "twistcc/interval.hpp"
#include "twistcc/kite.hpp"

namespace twistcc {

struct ShapeBox {
  Interval z3;
  Interval z4;

  static ShapeBox point(double z3, double z4) { return {Interval(z3), Interval(z4)}; }
  /// Box of half-width `radius` around (z3, z4).
  static ShapeBox around(double z3, double z4, double radius) {
    return {Interval(z3 - radius, z3 + radius), Interval(z4 - radius, z4 + radius)};
  }
  KiteShape center() const { return {z3.mid(), z4.mid()}; }
  bool contains(double a, double b) const { return z3.contains(a) && z4.contains(b); }
};

/// Class shared by every point of the box, or kInadmissible.
inline KiteClass classify_box(const ShapeBox& box) {
  const double root3 = std::numbers::sqrt3;
  if (!(box.z4.lo() > 0.0)) return KiteClass::kInadmissible;
  try {
    const Interval yc_lo = circumcenter_height(Interval(box.z3.lo()));
    const Interval yc_hi = circumcenter_height(Interval(box.z3.hi()));
    // yc is increasing in z3, so the box extremes are at the z3 endpoints.
    if (box.z3.lo() > root3 && box.z4.lo() > yc_hi.hi() && box.z4.hi() < root3 / 2.0) return KiteClass::kTall;
    if (box.z3.hi() < root3 && box.z4.hi() < yc_lo.lo()) return KiteClass::kWide;
  } catch (const IntervalDomainError&) {
  }
  return KiteClass::kInadmissible;
}

inline bool contains_symmetric_point(const ShapeBox& box) {
  // √3 and 1/√3 are irrational; test against the enclosing doubles.
  const Interval s3(detail::down(std::numbers::sqrt3), detail::up(std::numbers::sqrt3));
  const Interval is3(detail::down(std::numbers::inv_sqrt3), detail::up(std::numbers::inv_sqrt3));
  return box.z3.hi() >= s3.lo() && box.z3.lo() <= s3.hi() && box.z4.hi() >= is3.lo() && box.z4.lo() <= is3.hi();
}

namespace detail {

// Sign of the Dziobek residual over the whole box at a fixed half-base x2:
// +1, -1, or 0 when undecided.
inline int dziobek_sign(const ShapeBox& box, double x2, double A) {
  try {
    const Interval g = dziobek_residual<Interval>(box.z3, box.z4, Interval(x2), A);
    if (g.positive()) return 1;
    if (g.negative()) return -1;
  } catch (const IntervalDomainError&) {
  }
  return 0;
}

}  // namespace detail

struct ScaleOptions {
  int max_widen = 60;
  int max_bisect = 200;
};

/// Interval containing the Dziobek root x2(z) for every shape z in the box.
/// The enclosure is verified by opposite residual signs at its endpoints over
/// the whole box (the positive root is unique), then tightened by bisection.
inline std::optional<Interval> certify_kite_scale(const ShapeBox& box, const PotentialParams& params,
                                                  const ScaleOptions& opt = {}) {
  detail::require_objective_exponent(params);
  const double A = params.A;
  if (contains_symmetric_point(box) || !(box.z3.lo() > box.z4.hi()) || !(box.z4.lo() > 0.0)) return std::nullopt;

  // Floating roots at the corners and the center seed the bracket.
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  const std::array<double, 3> z3s{box.z3.lo(), box.z3.mid(), box.z3.hi()};
  const std::array<double, 3> z4s{box.z4.lo(), box.z4.mid(), box.z4.hi()};
  for (double a : z3s) {
    for (double b : z4s) {
      try {
        const double x = kite_scale(KiteShape(a, b), params);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      } catch (const Error&) {
        return std::nullopt;
      }
    }
  }

  double pad = 4.0 * std::numeric_limits<double>::epsilon() * hi;
  int slo = 0;
  int shi = 0;
  for (int k = 0; k < opt.max_widen; ++k, pad *= 2.0) {
    const double a = lo - pad;
    const double b = hi + pad;
    if (!(a > 0.0)) return std::nullopt;
    slo = detail::dziobek_sign(box, a, A);
    shi = detail::dziobek_sign(box, b, A);
    if (slo != 0 && shi != 0 && slo != shi) {
      lo = a;
      hi = b;
      break;
    }
    if (k + 1 == opt.max_widen) return std::nullopt;
  }

  for (int it = 0; it < opt.max_bisect; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) break;
    const int s = detail::dziobek_sign(box, mid, A);
    if (s == 0) {
      // Undecided at the midpoint: try to shave each side separately.
      const double qa = lo + 0.25 * (hi - lo);
      const double qb = lo + 0.75 * (hi - lo);
      bool moved = false;
      if (qa > lo && detail::dziobek_sign(box, qa, A) == slo) {
        lo = qa;
        moved = true;
      }
      if (qb < hi && detail::dziobek_sign(box, qb, A) == shi) {
        hi = qb;
        moved = true;
      }
      if (!moved) break;
      continue;
    }
    if (s == slo)
      lo = mid;
    else
      hi = mid;
  }
  return Interval(lo, hi);
}

/// Index value or Unknown, with a description of the tests that decided it.
struct CertifiedIndex {
  std::optional<int> value;
  std::string certificate;
  std::vector<Interval> bounds;  ///< enclosures used by the decision

  bool known() const { return value.has_value(); }
  std::string value_string() const { return value ? std::to_string(*value) : "Unknown"; }
};

namespace detail {

inline std::string format_interval(const Interval& v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "[%.17g,%.17g]", v.lo(), v.hi());
  return buf;
}

struct KiteEnclosure {
  Interval x2;
  Interval mu31;
  Interval mu41;
};

// x2 from the certified root; mass ratios are scale-free, so they are
// evaluated at x2 = 1 to avoid carrying the x2 width into them.
inline std::optional<KiteEnclosure> enclose_kite(const ShapeBox& box, const PotentialParams& params,
                                                 std::string& why) {
  if (!admissible(classify_box(box))) {
    why = "box not inside one admissible kite class";
    return std::nullopt;
  }
  const auto x2 = certify_kite_scale(box, params);
  if (!x2) {
    why = "no verified Dziobek sign change";
    return std::nullopt;
  }
  try {
    const auto mu = kite_mass_ratios<Interval>(box.z3, box.z4, Interval(1.0), params.A);
    if (!mu.mu31.positive() || !mu.mu41.positive()) {
      why = "mass ratio enclosure not positive";
      return std::nullopt;
    }
    return KiteEnclosure{*x2, mu.mu31, mu.mu41};
  } catch (const IntervalDomainError& e) {
    why = std::string("mass ratio enclosure failed: ") + e.what();
    return std::nullopt;
  }
}

}  // namespace detail

/// Negative-eigenvalue count of every symmetric matrix [[a, b], [b, c]] with
/// entries in the given intervals: det > 0 and tr > 0 gives 0, det > 0 and
/// tr < 0 gives 2, det < 0 gives 1; anything else is Unknown.
inline CertifiedIndex decide_symmetric_2x2(const Interval& a, const Interval& b, const Interval& c) {
  CertifiedIndex out;
  const Interval det = a * c - sqr(b);
  const Interval tr = a + c;
  out.bounds = {det, tr};
  const std::string d = "det=" + detail::format_interval(det);
  const std::string t = "tr=" + detail::format_interval(tr);
  if (det.negative()) {
    out.value = 1;
    out.certificate = d + "<0";
  } else if (det.positive() && tr.positive()) {
    out.value = 0;
    out.certificate = d + ">0;" + t + ">0";
  } else if (det.positive() && tr.negative()) {
    out.value = 2;
    out.certificate = d + ">0;" + t + "<0";
  } else {
    out.certificate = "undecided:" + d + ";" + t;
  }
  return out;
}

/// Number of negative eigenvalues of the symmetric 2x2 block, from the signs
/// of its determinant and trace evaluated on the closed forms.
inline CertifiedIndex certify_hs_index(const ShapeBox& box, const PotentialParams& params) {
  std::string why;
  const auto k = detail::enclose_kite(box, params, why);
  if (!k) return {std::nullopt, why, {}};
  try {
    const auto h = explicit_hs<Interval>(box.z3, box.z4, k->x2, k->mu31, k->mu41, params.A);
    return decide_symmetric_2x2(h.h11, h.h12, h.h22);
  } catch (const IntervalDomainError& e) {
    return {std::nullopt, std::string("evaluation failed: ") + e.what(), {}};
  }
}

namespace detail {

using IMatrix3 = std::array<std::array<Interval, 3>, 3>;

// Square root of a quantity known to be non-negative (a sum of squares whose
// enclosure may dip below 0 through outward rounding).
inline Interval sqrt_nonneg(const Interval& v) { return sqrt(Interval(std::max(0.0, v.lo()), std::max(0.0, v.hi()))); }

inline IMatrix3 multiply(const IMatrix3& a, const IMatrix3& b) {
  IMatrix3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Interval s(0.0);
      for (int k = 0; k < 3; ++k) s = s + a[i][k] * b[k][j];
      c[i][j] = s;
    }
  return c;
}

/// Interval enclosure of the 3x3 antisymmetric block over the box.
inline IMatrix3 enclose_ha(const ShapeBox& box, const KiteEnclosure& k, double A) {
  const Interval x2 = k.x2;
  const std::array<Interval, 8> q{-x2, Interval(0.0), x2, Interval(0.0), Interval(0.0), box.z3 * x2, Interval(0.0),
                                  box.z4 * x2};
  const std::array<Interval, 4> m{Interval(1.0), Interval(1.0), k.mu31, k.mu41};
  const PairTable<Interval> table(std::span<const Interval>(q), A);
  auto dirs = kite_directions();
  dirs.resize(3);
  const auto e = twist_hessian_entries<Interval>(table, std::span<const Interval>(m), dirs, true);
  IMatrix3 h{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) h[i][j] = e[static_cast<std::size_t>(3 * i + j)];
  return h;
}

}  // namespace detail

/// Negative eigenvalues of the 3x3 block, its structural zero excluded.
///
/// With û an approximate kernel vector of the midpoint matrix, the exact
/// Householder reflector Q built from double data gives B = Q H Q, which is
/// similar to H. Its first row couples to the rest with norm at most ε, so by
/// Weyl the eigenvalues of H lie within ε of those of diag(b00, C) with
/// C = B[1:3, 1:3]. ρ bounds ‖H û‖ / ‖û‖, so H also has an eigenvalue in
/// [-ρ, ρ]. When both widened eigenvalue enclosures of C avoid 0 and [-ρ, ρ],
/// the zero eigenvalue is accounted for and the signs of the other two follow.
inline CertifiedIndex certify_ha_index(const ShapeBox& box, const PotentialParams& params) {
  CertifiedIndex out;
  std::string why;
  const auto k = detail::enclose_kite(box, params, why);
  if (!k) {
    out.certificate = why;
    return out;
  }
  try {
    const detail::IMatrix3 H = detail::enclose_ha(box, *k, params.A);
    Eigen::Matrix3d mid;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mid(i, j) = H[i][j].mid();
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(0.5 * (mid + mid.transpose()));
    Eigen::Index z = 0;
    es.eigenvalues().cwiseAbs().minCoeff(&z);
    const Eigen::Vector3d u = es.eigenvectors().col(z);

    // ρ = ‖H û‖ / ‖û‖.
    Interval hu2(0.0);
    for (int i = 0; i < 3; ++i) {
      Interval s(0.0);
      for (int j = 0; j < 3; ++j) s = s + H[i][j] * Interval(u[j]);
      hu2 = hu2 + sqr(s);
    }
    const Interval u2 = sqr(Interval(u[0])) + sqr(Interval(u[1])) + sqr(Interval(u[2]));
    const double rho = detail::sqrt_nonneg(hu2 / u2).hi();

    // Householder reflector with w exact in double.
    Eigen::Vector3d w = u;
    w[0] += (u[0] >= 0.0 ? 1.0 : -1.0) * u.norm();
    const Interval ww = sqr(Interval(w[0])) + sqr(Interval(w[1])) + sqr(Interval(w[2]));
    detail::IMatrix3 Q{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        Q[i][j] = Interval(i == j ? 1.0 : 0.0) - Interval(2.0) * Interval(w[i]) * Interval(w[j]) / ww;
    const detail::IMatrix3 B = detail::multiply(Q, detail::multiply(H, Q));

    const double eps = detail::sqrt_nonneg(sqr(hull(B[1][0], B[0][1])) + sqr(hull(B[2][0], B[0][2]))).hi();
    const Interval c11 = B[1][1];
    const Interval c22 = B[2][2];
    const Interval c12 = hull(B[1][2], B[2][1]);
    const Interval half_tr = (c11 + c22) * Interval(0.5);
    const Interval rad = detail::sqrt_nonneg(sqr((c11 - c22) * Interval(0.5)) + sqr(c12));
    const Interval widen(-eps, eps);
    const Interval lam_minus = half_tr - rad + widen;
    const Interval lam_plus = half_tr + rad + widen;
    out.bounds = {lam_minus, lam_plus, Interval(-rho, rho)};

    auto clear_of_zero_band = [&](const Interval& v) { return v.lo() > rho || v.hi() < -rho; };
    std::ostringstream cert;
    cert << "rho=" << rho << ";eps=" << eps << ";lam1=" << detail::format_interval(lam_minus)
         << ";lam2=" << detail::format_interval(lam_plus);
    if (clear_of_zero_band(lam_minus) && clear_of_zero_band(lam_plus) && !lam_minus.contains_zero() &&
        !lam_plus.contains_zero()) {
      out.value = static_cast<int>(lam_minus.negative()) + static_cast<int>(lam_plus.negative());
      out.certificate = cert.str();
    } else {
      out.certificate = "undecided:" + cert.str();
    }
  } catch (const IntervalDomainError& e) {
    out.certificate = std::string("evaluation failed: ") + e.what();
  }
  return out;
}

struct BoxCertificate {
  ShapeBox box;
  KiteClass cls = KiteClass::kInadmissible;
  std::optional<Interval> x2;
  CertifiedIndex hs;
  CertifiedIndex ha;

  std::optional<int> total() const {
    if (hs.value && ha.value) return *hs.value + *ha.value;
    return std::nullopt;
  }
};

inline BoxCertificate certify_box(const ShapeBox& box, const PotentialParams& params) {
  BoxCertificate c;
  c.box = box;
  c.cls = classify_box(box);
  if (admissible(c.cls)) c.x2 = certify_kite_scale(box, params);
  c.hs = certify_hs_index(box, params);
  c.ha = certify_ha_index(box, params);
  return c;
}

struct CertificationSweep {
  std::vector<BoxCertificate> boxes;
  std::size_t decided = 0;
  double coverage = 0.0;  ///< fraction of boxes with a certified total index
};

/// Splits the box into k x k children (row-major, z4 rows ascending) and
/// certifies each one in parallel.
inline CertificationSweep certify_sweep(const ShapeBox& box, std::size_t k, const PotentialParams& params,
                                        unsigned threads = 0) {
  if (k == 0) k = 1;
  CertificationSweep sweep;
  sweep.boxes.resize(k * k);
  const double d3 = box.z3.width() / static_cast<double>(k);
  const double d4 = box.z4.width() / static_cast<double>(k);
  auto edge = [](const Interval& iv, double step, std::size_t i, std::size_t k) {
    return i == k ? iv.hi() : iv.lo() + static_cast<double>(i) * step;
  };
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t n = next++; n < sweep.boxes.size(); n = next++) {
      const std::size_t r = n / k;
      const std::size_t c = n % k;
      const ShapeBox child{Interval(edge(box.z3, d3, c, k), edge(box.z3, d3, c + 1, k)),
                           Interval(edge(box.z4, d4, r, k), edge(box.z4, d4, r + 1, k))};
      sweep.boxes[n] = certify_box(child, params);
    }
  };
  unsigned t = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  t = static_cast<unsigned>(std::min<std::size_t>(t, sweep.boxes.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < t; ++i) pool.emplace_back(worker);
    worker();
  }
  for (const auto& b : sweep.boxes)
    if (b.total()) ++sweep.decided;
  sweep.coverage = static_cast<double>(sweep.decided) / static_cast<double>(sweep.boxes.size());
  return sweep;
}

}  // namespace twistcc
