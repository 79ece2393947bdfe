#pragma once

// Four-body concave isosceles kites.
//
// Bodies: q1 = (-x2, 0), q2 = (x2, 0), q3 = (0, y3), q4 = (0, y4) with
// y3 > y4 > 0, masses (1, 1, μ31, μ41). The shape is (z3, z4) = (y3, y4) / x2.
// For a shape, the Laura-Andoyer equations fix the mass ratios and the single
// Dziobek relation S12 S34 = S13 S14 fixes the size x2.

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "twistcc/config.hpp"
#include "twistcc/error.hpp"
#include "twistcc/hessian.hpp"
#include "twistcc/twist.hpp"

namespace twistcc {

struct KiteShape {
  double z3 = 0.0;
  double z4 = 0.0;

  KiteShape() = default;
  KiteShape(double z3_, double z4_) : z3(z3_), z4(z4_) {
    if (!(z3 > z4) || !(z4 > 0.0) || !std::isfinite(z3))
      throw InvalidConfigError("kite shape needs z3 > z4 > 0");
  }
};

/// z-coordinate of the outer triangle's circumcenter, z3/2 - 1/(2 z3).
template <typename Scalar>
Scalar circumcenter_height(const Scalar& z3) {
  return z3 / Scalar(2.0) - Scalar(1.0) / (Scalar(2.0) * z3);
}

inline bool is_symmetric_point(const KiteShape& s, double tol = 1e-12) {
  return std::abs(s.z3 - std::numbers::sqrt3) <= tol && std::abs(s.z4 - std::numbers::inv_sqrt3) <= tol;
}

enum class KiteClass { kTall, kWide, kCircumcenterBoundary, kInadmissible };

inline const char* to_string(KiteClass c) {
  switch (c) {
    case KiteClass::kTall:
      return "tall";
    case KiteClass::kWide:
      return "wide";
    case KiteClass::kCircumcenterBoundary:
      return "circumcenter-boundary";
    case KiteClass::kInadmissible:
      return "inadmissible";
  }
  return "inadmissible";
}

/// Tall: z3 > √3 and yc < z4 < √3/2. Wide: z3 < √3 and 0 < z4 < yc.
/// yc is the circumcenter height; strict inequalities hold with `margin`.
inline KiteClass classify_shape(const KiteShape& s, double margin = 1e-9) {
  const double yc = circumcenter_height(s.z3);
  if (std::abs(s.z4 - yc) <= margin) return KiteClass::kCircumcenterBoundary;
  const double root3 = std::numbers::sqrt3;
  if (s.z3 > root3 + margin && s.z4 > yc + margin && s.z4 < root3 / 2.0 - margin) return KiteClass::kTall;
  if (s.z3 < root3 - margin && s.z4 > margin && s.z4 < yc - margin) return KiteClass::kWide;
  return KiteClass::kInadmissible;
}

inline bool admissible(KiteClass c) { return c == KiteClass::kTall || c == KiteClass::kWide; }

/// Mutual distances of a kite with half-base x2.
template <typename Scalar>
struct KiteDistances {
  Scalar r12, r13, r14, r34;

  KiteDistances(const Scalar& z3, const Scalar& z4, const Scalar& x2) {
    using std::sqrt;
    r12 = Scalar(2.0) * x2;
    r13 = x2 * sqrt(Scalar(1.0) + sqr(z3));
    r14 = x2 * sqrt(Scalar(1.0) + sqr(z4));
    r34 = x2 * (z3 - z4);
  }
};

/// Dziobek residual S12 S34 - S13 S14 at half-base x2.
template <typename Scalar>
Scalar dziobek_residual(const Scalar& z3, const Scalar& z4, const Scalar& x2, double A) {
  using std::pow;
  const KiteDistances<Scalar> d(z3, z4, x2);
  const Scalar S12 = pow(d.r12, -A) - Scalar(1.0);
  const Scalar S13 = pow(d.r13, -A) - Scalar(1.0);
  const Scalar S14 = pow(d.r14, -A) - Scalar(1.0);
  const Scalar S34 = pow(d.r34, -A) - Scalar(1.0);
  return S12 * S34 - S13 * S14;
}

namespace detail {

// With t = x2^-A the Dziobek relation reads t [ (αδ - βγ) t - (α + δ - β - γ) ] = 0,
// α = 2^-A, β = (1+z3²)^(-A/2), γ = (1+z4²)^(-A/2), δ = (z3-z4)^-A.
struct DziobekCoefficients {
  double quad;  // αδ - βγ
  double lin;   // α + δ - β - γ
  double alpha, beta, gamma, delta;
};

inline DziobekCoefficients dziobek_coefficients(const KiteShape& s, double A) {
  const double alpha = std::pow(2.0, -A);
  const double beta = std::pow(1.0 + s.z3 * s.z3, -A / 2.0);
  const double gamma = std::pow(1.0 + s.z4 * s.z4, -A / 2.0);
  const double delta = std::pow(s.z3 - s.z4, -A);
  return {alpha * delta - beta * gamma, alpha + delta - beta - gamma, alpha, beta, gamma, delta};
}

inline void check_scale_solvable(const KiteShape& s, double A) {
  const auto c = dziobek_coefficients(s, A);
  const double scale = std::max({c.alpha, c.beta, c.gamma, c.delta});
  if (is_symmetric_point(s) ||
      (std::abs(c.alpha - c.beta) <= 1e-14 * scale && std::abs(c.delta - c.gamma) <= 1e-14 * scale))
    throw IndeterminateScaleError("kite scale is indeterminate at the symmetric point (r12 = r13, r14 = r34)");
  const double t = c.lin / c.quad;
  if (!(t > 0.0) || !std::isfinite(t))
    throw InfeasibleShapeError("Dziobek relation has no positive root for this kite shape");
}

}  // namespace detail

/// Half-base x2 = r12/2 solving S12 S34 = S13 S14, by bisection in log x2.
inline double kite_scale(const KiteShape& s, const PotentialParams& params) {
  detail::require_objective_exponent(params);
  const double A = params.A;
  detail::check_scale_solvable(s, A);
  auto g = [&](double x2) { return dziobek_residual<double>(s.z3, s.z4, x2, A); };
  double lo = 1.0;
  double hi = 1.0;
  const double g1 = g(1.0);
  if (g1 == 0.0) return 1.0;
  // Expand geometrically until the sign flips; the positive root is unique.
  for (int k = 0; k < 400 && std::signbit(g(lo)) == std::signbit(g(hi)); ++k) {
    lo *= 0.5;
    hi *= 2.0;
  }
  double glo = g(lo);
  if (std::signbit(glo) == std::signbit(g(hi)))
    throw InfeasibleShapeError("could not bracket the Dziobek root");
  for (int it = 0; it < 2000; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (!(mid > lo && mid < hi)) break;
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if (std::signbit(gm) == std::signbit(glo)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Closed-form root of the Dziobek relation, x2 = ((αδ - βγ)/(α + δ - β - γ))^(1/A).
inline double kite_scale_closed_form(const KiteShape& s, const PotentialParams& params) {
  detail::require_objective_exponent(params);
  detail::check_scale_solvable(s, params.A);
  const auto c = detail::dziobek_coefficients(s, params.A);
  return std::pow(c.quad / c.lin, 1.0 / params.A);
}

/// The printed substitution formula with exponent -A on (1 + z²).
inline double dzsub_verbatim(const KiteShape& s, double A) {
  const double a = std::pow(s.z3 - s.z4, -A);
  const double b = std::pow(1.0 + s.z3 * s.z3, -A);
  const double c = std::pow(1.0 + s.z4 * s.z4, -A);
  return 0.5 * std::pow((a - b * c) / (1.0 + a - b - c), 1.0 / A);
}

/// Same formula read with exponent -A/2 on (1 + z²), matching r13 = x2 √(1 + z3²).
inline double dzsub_half_exponent(const KiteShape& s, double A) {
  const double a = std::pow(s.z3 - s.z4, -A);
  const double b = std::pow(1.0 + s.z3 * s.z3, -A / 2.0);
  const double c = std::pow(1.0 + s.z4 * s.z4, -A / 2.0);
  return 0.5 * std::pow((a - b * c) / (1.0 + a - b - c), 1.0 / A);
}

struct DzsubComparison {
  double oracle = 0.0;
  double verbatim = 0.0;
  double half_exponent = 0.0;
  bool verbatim_matches = false;
  bool half_exponent_matches = false;
};

inline DzsubComparison compare_dzsub(const KiteShape& s, const PotentialParams& params, double rel_tol = 1e-8) {
  DzsubComparison c;
  c.oracle = kite_scale(s, params);
  c.verbatim = dzsub_verbatim(s, params.A);
  c.half_exponent = dzsub_half_exponent(s, params.A);
  c.verbatim_matches = std::abs(c.verbatim - c.oracle) <= rel_tol * c.oracle;
  c.half_exponent_matches = std::abs(c.half_exponent - c.oracle) <= rel_tol * c.oracle;
  return c;
}

template <typename Scalar>
struct KiteMasses {
  Scalar mu31;
  Scalar mu41;
};

/// Mass ratios from the v13 and v14 Laura-Andoyer equations:
///   μ31 = (2 y4 / r34) (R14 - R12) / (R34 - R13)
///   μ41 = (2 y3 / r34) (R12 - R13) / (R34 - R14)
/// Scale-free: any x2 gives the same ratios.
template <typename Scalar>
KiteMasses<Scalar> kite_mass_ratios(const Scalar& z3, const Scalar& z4, const Scalar& x2, double A) {
  using std::pow;
  const KiteDistances<Scalar> d(z3, z4, x2);
  const Scalar R12 = pow(d.r12, -A);
  const Scalar R13 = pow(d.r13, -A);
  const Scalar R14 = pow(d.r14, -A);
  const Scalar R34 = pow(d.r34, -A);
  const Scalar y3 = z3 * x2;
  const Scalar y4 = z4 * x2;
  return {Scalar(2.0) * y4 / d.r34 * (R14 - R12) / (R34 - R13),
          Scalar(2.0) * y3 / d.r34 * (R12 - R13) / (R34 - R14)};
}

inline KiteMasses<double> kite_masses(const KiteShape& s, double x2, const PotentialParams& params) {
  const double A = params.A;
  const KiteDistances<double> d(s.z3, s.z4, x2);
  const double R13 = std::pow(d.r13, -A);
  const double R14 = std::pow(d.r14, -A);
  const double R34 = std::pow(d.r34, -A);
  const double tiny = 1e-14 * std::max({R13, R14, R34});
  if (std::abs(R34 - R13) <= tiny)
    throw FamilyBoundaryError("mass ratio μ31 is unbounded (r34 = r13)");
  if (std::abs(R34 - R14) <= tiny)
    throw FamilyBoundaryError("mass ratio μ41 is unbounded (r34 = r14, interior body at the circumcenter)");
  return kite_mass_ratios<double>(s.z3, s.z4, x2, A);
}

struct KiteConfig {
  KiteShape shape;
  double x2 = 0.0;
  double mu31 = 0.0;
  double mu41 = 0.0;
  PlanarConfig config;
};

inline PlanarConfig kite_planar_config(const KiteShape& s, double x2, double mu31, double mu41) {
  Eigen::VectorXd q(8);
  q << -x2, 0.0, x2, 0.0, 0.0, s.z3 * x2, 0.0, s.z4 * x2;
  Eigen::VectorXd m(4);
  m << 1.0, 1.0, mu31, mu41;
  return {q, m};
}

/// Central configuration for a kite shape (scale from the Dziobek relation,
/// masses from the Laura-Andoyer equations).
inline KiteConfig build_kite(const KiteShape& s, const PotentialParams& params) {
  const double x2 = kite_scale(s, params);
  const auto mu = kite_masses(s, x2, params);
  if (!(mu.mu31 > 0.0) || !(mu.mu41 > 0.0))
    throw FamilyBoundaryError("kite shape gives a non-positive mass ratio");
  return {s, x2, mu.mu31, mu.mu41, kite_planar_config(s, x2, mu.mu31, mu.mu41)};
}

/// Normalized twist basis that splits the kite Hessian:
/// [ṽa3, ṽa4, ṽ34 | ṽs3, ṽs4] with ṽa_k = (ṽ1k + ṽ2k)/√2, ṽs_k = (ṽ1k - ṽ2k)/√2.
inline std::vector<TwistDirection> kite_directions() {
  const double h = std::numbers::sqrt2 / 2.0;
  const TwistIndex v13(0, 2), v23(1, 2), v14(0, 3), v24(1, 3), v34(2, 3);
  return {{"a3", {{v13, h}, {v23, h}}},
          {"a4", {{v14, h}, {v24, h}}},
          {"34", {{v34, 1.0}}},
          {"s3", {{v13, h}, {v23, -h}}},
          {"s4", {{v14, h}, {v24, -h}}}};
}

struct KiteBlocks {
  Eigen::Matrix3d Ha;
  Eigen::Matrix2d Hs;
  Eigen::MatrixXd full;  ///< 5x5 in the kite_directions basis
  double leakage = 0.0;  ///< max |cross-block entry| / max |entry|
};

inline KiteBlocks kite_blocks(const KiteConfig& kite, const PotentialParams& params, double leak_tol = 1e-10) {
  const TwistMatrix tm = assemble_twist_hessian(kite.config, params, kite_directions(), true);
  KiteBlocks b;
  b.full = tm.values;
  b.Ha = b.full.topLeftCorner<3, 3>();
  b.Hs = b.full.bottomRightCorner<2, 2>();
  const double norm = b.full.cwiseAbs().maxCoeff();
  b.leakage = norm > 0.0 ? b.full.topRightCorner<3, 2>().cwiseAbs().maxCoeff() / norm : 0.0;
  if (b.leakage > leak_tol)
    throw SymmetryViolationError("kite Hessian blocks leak: relative cross term " + std::to_string(b.leakage));
  return b;
}

template <typename Scalar>
struct ExplicitHs {
  Scalar h11, h12, h22;
  Scalar v13_v14;  ///< ṽ13ᵀ H ṽ14
  Scalar v13_v24;  ///< ṽ13ᵀ H ṽ24
};

/// Closed forms of the symmetric 2x2 block in kite coordinates.
template <typename Scalar>
ExplicitHs<Scalar> explicit_hs(const Scalar& z3, const Scalar& z4, const Scalar& x2, const Scalar& mu31,
                               const Scalar& mu41, double A) {
  using std::pow;
  const Scalar one(1.0), two(2.0), four(4.0);
  const KiteDistances<Scalar> d(z3, z4, x2);
  const Scalar y3 = z3 * x2;
  const Scalar y4 = z4 * x2;
  const Scalar r12s = sqr(d.r12), r13s = sqr(d.r13), r14s = sqr(d.r14), r34s = sqr(d.r34);
  const Scalar R12 = pow(d.r12, -A), R13 = pow(d.r13, -A), R14 = pow(d.r14, -A), R34 = pow(d.r34, -A);
  const Scalar S12 = R12 - one, S13 = R13 - one, S14 = R14 - one, S34 = R34 - one;
  const Scalar mu13 = one / mu31, mu14 = one / mu41;
  const Scalar mu43 = mu41 / mu31, mu34 = mu31 / mu41;

  ExplicitHs<Scalar> h;
  h.h11 = -(two + two * mu13 + mu31) * S13 - S12 - mu41 * S14 - mu43 * S34 -
          (one - r12s / (two * r13s)) * (S12 - two * S13 - two * mu13 * S13 - mu43 * S34) +
          A * (two * sqr(y3) / r13s * R12 + mu13 * r12s * sqr(y3) / sqr(r13s) * R13 +
               mu41 * r12s * r34s / (four * r13s * r14s) * R14 + two * mu43 * r12s / (four * r13s) * R34);
  h.h22 = -(two + two * mu14 + mu41) * S14 - S12 - mu31 * S13 - mu34 * S34 -
          (one - r12s / (two * r14s)) * (S12 - two * S14 - two * mu14 * S14 - mu34 * S34) +
          A * (two * sqr(y4) / r14s * R12 + mu14 * r12s * sqr(y4) / sqr(r14s) * R14 +
               mu31 * r12s * r34s / (four * r13s * r14s) * R13 + two * mu34 * r12s / (four * r14s) * R34);
  h.v13_v24 = ((y3 * y4 - sqr(x2)) * (R12 + R34 - R13 - R14) -
               A * (R12 * y3 * y4 + R13 * r12s * d.r34 * y3 / (two * r13s) -
                    R14 * r12s * d.r34 * y4 / (two * r14s) - R34 * r12s / four)) /
              (d.r13 * d.r14);
  h.v13_v14 = ((r12s + four * y3 * y4) * (S34 - (one + mu31) * S13 - (one + mu41) * S14 - S12) -
               A * (R34 * r12s - four * R12 * y3 * y4)) /
              (four * d.r13 * d.r14);
  h.h12 = h.v13_v14 - h.v13_v24;
  return h;
}

inline Eigen::Matrix2d explicit_hs_matrix(const KiteConfig& k, const PotentialParams& params) {
  const auto h = explicit_hs<double>(k.shape.z3, k.shape.z4, k.x2, k.mu31, k.mu41, params.A);
  Eigen::Matrix2d m;
  m << h.h11, h.h12, h.h12, h.h22;
  return m;
}

struct CoorbitalCheck {
  double mu41_S14 = 0.0;     ///< μ41 S14 evaluated directly
  double identity = 0.0;     ///< -(r12² S12 + 2 μ31 r13² S13) / (2 r14² + μ31 r34² S13 / S12)
  double residual = 0.0;     ///< |mu41_S14 - identity|
  double precursor = 0.0;    ///< r12² S12 + 2μ31 r13² S13 + 2μ41 r14² S14 + μ41 μ31 r34² S34
  double precursor_scale = 0.0;  ///< sum of absolute values of the precursor terms
};

/// μ41 S14 two ways: directly, and from U = M I with S34 eliminated by the
/// Dziobek relation. The second form stays bounded as μ41 -> ∞ near the
/// circumcenter.
inline CoorbitalCheck coorbital_identity_check(const KiteConfig& k, const PotentialParams& params) {
  const double A = params.A;
  const KiteDistances<double> d(k.shape.z3, k.shape.z4, k.x2);
  const double S12 = std::pow(d.r12, -A) - 1.0;
  const double S13 = std::pow(d.r13, -A) - 1.0;
  const double S14 = std::pow(d.r14, -A) - 1.0;
  const double S34 = std::pow(d.r34, -A) - 1.0;
  if (S12 == 0.0) throw IdentityInapplicableError("coorbital identity needs S12 != 0");
  CoorbitalCheck c;
  c.mu41_S14 = k.mu41 * S14;
  c.identity = -(d.r12 * d.r12 * S12 + 2.0 * k.mu31 * d.r13 * d.r13 * S13) /
               (2.0 * d.r14 * d.r14 + k.mu31 * d.r34 * d.r34 * S13 / S12);
  c.residual = std::abs(c.mu41_S14 - c.identity);
  const double t[4] = {d.r12 * d.r12 * S12, 2.0 * k.mu31 * d.r13 * d.r13 * S13, 2.0 * k.mu41 * d.r14 * d.r14 * S14,
                       k.mu41 * k.mu31 * d.r34 * d.r34 * S34};
  c.precursor = t[0] + t[1] + t[2] + t[3];
  c.precursor_scale = std::abs(t[0]) + std::abs(t[1]) + std::abs(t[2]) + std::abs(t[3]);
  return c;
}

// ---------------------------------------------------------------------------
// Index map.

struct KiteIndex {
  Eigen::Vector3d ha_eigenvalues;  ///< ascending
  Eigen::Vector2d hs_eigenvalues;  ///< ascending
  int idx_hs = 0;
  int idx_ha = 0;     ///< negatives among H_a eigenvalues, rotational zero excluded
  bool degenerate = false;  ///< smallest |λ(H_a)| not below rotational_zero_tol * spectral radius
  double ha_zero_ratio = 0.0;
  int total() const { return idx_hs + idx_ha; }
};

inline KiteIndex kite_index(const KiteBlocks& b, double rotational_zero_tol = 1e-6) {
  KiteIndex out;
  out.ha_eigenvalues = symmetric_eigenvalues(b.Ha);
  out.hs_eigenvalues = symmetric_eigenvalues(b.Hs);
  Eigen::Index zero = 0;
  out.ha_eigenvalues.cwiseAbs().minCoeff(&zero);
  const double radius = out.ha_eigenvalues.cwiseAbs().maxCoeff();
  out.ha_zero_ratio = radius > 0.0 ? std::abs(out.ha_eigenvalues[zero]) / radius : 0.0;
  out.degenerate = !(out.ha_zero_ratio < rotational_zero_tol);
  for (Eigen::Index k = 0; k < 3; ++k)
    if (k != zero && out.ha_eigenvalues[k] < 0.0) ++out.idx_ha;
  for (Eigen::Index k = 0; k < 2; ++k)
    if (out.hs_eigenvalues[k] < 0.0) ++out.idx_hs;
  return out;
}

struct GridAxis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n = 1;
  double center(std::size_t k) const { return lo + (static_cast<double>(k) + 0.5) * (hi - lo) / static_cast<double>(n); }
};

struct IndexMapCell {
  std::size_t row = 0;  ///< z4 index (ascending z4)
  std::size_t col = 0;  ///< z3 index (ascending z3)
  double z3 = 0.0;
  double z4 = 0.0;
  KiteClass cls = KiteClass::kInadmissible;
  double mu31 = std::numeric_limits<double>::quiet_NaN();
  double mu41 = std::numeric_limits<double>::quiet_NaN();
  double x2 = std::numeric_limits<double>::quiet_NaN();
  int idx_hs = -1;
  int idx_ha = -1;
  int idx_total = -1;
  bool degenerate = false;
  std::string error;
  std::string which_block_changed;  ///< "Hs", "Ha" or "Hs+Ha" on boundary cells

  bool valid() const { return idx_total >= 0; }
};

struct KiteMapOptions {
  double margin = 1e-9;
  double rotational_zero_tol = 1e-6;
  unsigned threads = 0;  ///< 0: hardware concurrency
};

inline IndexMapCell evaluate_cell(double z3, double z4, const PotentialParams& params, const KiteMapOptions& opt) {
  IndexMapCell c;
  c.z3 = z3;
  c.z4 = z4;
  if (!(z3 > z4) || !(z4 > 0.0)) return c;
  const KiteShape s(z3, z4);
  c.cls = classify_shape(s, opt.margin);
  if (!admissible(c.cls)) return c;
  try {
    const KiteConfig k = build_kite(s, params);
    c.x2 = k.x2;
    c.mu31 = k.mu31;
    c.mu41 = k.mu41;
    const KiteIndex idx = kite_index(kite_blocks(k, params), opt.rotational_zero_tol);
    c.idx_hs = idx.idx_hs;
    c.idx_ha = idx.idx_ha;
    c.idx_total = idx.total();
    c.degenerate = idx.degenerate;
  } catch (const Error& e) {
    c.error = e.what();
  }
  return c;
}

/// Marks cells whose 4-neighbour has a different total index, recording which
/// block's index differs across that edge.
inline void mark_boundaries(std::vector<IndexMapCell>& cells, std::size_t rows, std::size_t cols) {
  auto at = [&](std::size_t r, std::size_t c) -> IndexMapCell& { return cells[r * cols + c]; };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      IndexMapCell& cell = at(r, c);
      if (!cell.valid()) continue;
      bool hs = false;
      bool ha = false;
      auto visit = [&](std::size_t rr, std::size_t cc) {
        const IndexMapCell& o = at(rr, cc);
        if (!o.valid() || o.idx_total == cell.idx_total) return;
        hs = hs || o.idx_hs != cell.idx_hs;
        ha = ha || o.idx_ha != cell.idx_ha;
      };
      if (r > 0) visit(r - 1, c);
      if (r + 1 < rows) visit(r + 1, c);
      if (c > 0) visit(r, c - 1);
      if (c + 1 < cols) visit(r, c + 1);
      cell.which_block_changed = hs && ha ? "Hs+Ha" : hs ? "Hs" : ha ? "Ha" : "";
    }
  }
}

/// Index map over a (z3, z4) grid evaluated at cell centers, row-major with
/// rows indexed by z4. Per-cell failures are stored in the cell.
inline std::vector<IndexMapCell> kite_index_map(const GridAxis& z3_axis, const GridAxis& z4_axis,
                                                const PotentialParams& params, const KiteMapOptions& opt = {}) {
  detail::require_objective_exponent(params);
  const std::size_t rows = z4_axis.n;
  const std::size_t cols = z3_axis.n;
  std::vector<IndexMapCell> cells(rows * cols);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      const std::size_t r = k / cols;
      const std::size_t c = k % cols;
      cells[k] = evaluate_cell(z3_axis.center(c), z4_axis.center(r), params, opt);
      cells[k].row = r;
      cells[k].col = c;
    }
  };
  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, cells.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  mark_boundaries(cells, rows, cols);
  return cells;
}

/// Distinct total indices among valid cells, ascending.
inline std::vector<int> observed_indices(const std::vector<IndexMapCell>& cells) {
  std::set<int> s;
  for (const auto& c : cells)
    if (c.valid()) s.insert(c.idx_total);
  return {s.begin(), s.end()};
}

/// 8-bit gray level per cell: 255 for index 0, 128 and 0 for the next two
/// observed indices, 64 for inadmissible or failed cells.
inline std::vector<unsigned char> index_map_gray(const std::vector<IndexMapCell>& cells) {
  std::vector<int> higher;
  for (int v : observed_indices(cells))
    if (v != 0) higher.push_back(v);
  std::vector<unsigned char> out(cells.size(), 64);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& c = cells[k];
    if (!c.valid()) continue;
    if (c.idx_total == 0)
      out[k] = 255;
    else if (!higher.empty() && c.idx_total == higher[0])
      out[k] = 128;
    else
      out[k] = 0;
  }
  return out;
}

}  // namespace twistcc
