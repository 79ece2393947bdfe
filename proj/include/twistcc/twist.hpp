#pragma once

// Twist vectors and the first-order central configuration equations.
//
// The twist v_ij rotates bodies i and j about their common center of mass and
// leaves every other body fixed. All twists are orthogonal to ∇c_x, ∇c_y and
// ∇I, and for a non-collinear configuration they span a (2n-3)-dimensional
// space (n-1 when all points are collinear).

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "twistcc/config.hpp"
#include "twistcc/error.hpp"
#include "twistcc/pair_table.hpp"

namespace twistcc {

/// Unordered body pair {i, j}, stored 0-based with i < j.
/// Text form and external interfaces are 1-based ("1-3").
class TwistIndex {
 public:
  TwistIndex(std::size_t a, std::size_t b) : i_(std::min(a, b)), j_(std::max(a, b)) {
    if (a == b) throw InvalidPairError("twist pair needs two distinct bodies, got " + std::to_string(a + 1) + "-" +
                                       std::to_string(b + 1));
  }
  /// From 1-based indices.
  static TwistIndex one_based(std::size_t a, std::size_t b) {
    if (a == 0 || b == 0) throw InvalidPairError("1-based body index must be positive");
    return {a - 1, b - 1};
  }

  std::size_t i() const noexcept { return i_; }
  std::size_t j() const noexcept { return j_; }
  bool contains(std::size_t k) const noexcept { return k == i_ || k == j_; }
  std::string label() const { return std::to_string(i_ + 1) + "-" + std::to_string(j_ + 1); }

  void check(std::size_t n) const {
    if (j_ >= n) throw InvalidPairError("twist pair " + label() + " out of range for n = " + std::to_string(n));
  }

  friend bool operator==(const TwistIndex&, const TwistIndex&) = default;
  friend auto operator<=>(const TwistIndex&, const TwistIndex&) = default;

 private:
  std::size_t i_;
  std::size_t j_;
};

/// All pairs i < j in lexicographic order.
inline std::vector<TwistIndex> all_pairs(std::size_t n) {
  std::vector<TwistIndex> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.emplace_back(i, j);
  return out;
}

inline TangentVector twist_vector(const PlanarConfig& config, const TwistIndex& pair) {
  pair.check(config.size());
  const auto i = static_cast<Eigen::Index>(pair.i());
  const auto j = static_cast<Eigen::Index>(pair.j());
  const Eigen::Vector2d d = config.position(pair.i()) - config.position(pair.j());
  TangentVector v = TangentVector::Zero(static_cast<Eigen::Index>(2 * config.size()));
  v[2 * i] = config.mass(pair.j()) * d.y();
  v[2 * i + 1] = -config.mass(pair.j()) * d.x();
  v[2 * j] = -config.mass(pair.i()) * d.y();
  v[2 * j + 1] = config.mass(pair.i()) * d.x();
  return v;
}

/// ṽ_ij = v_ij / (m_i m_j r_ij).
inline TangentVector normalized_twist(const PlanarConfig& config, const PairTable<double>& table,
                                      const TwistIndex& pair) {
  return twist_vector(config, pair) /
         (config.mass(pair.i()) * config.mass(pair.j()) * table.r(pair.i(), pair.j()));
}

struct TwistSpan {
  std::vector<TwistIndex> basis;
  std::size_t dimension = 0;
  bool collinear = false;
};

/// Independent twist subset built inductively: the three pairs of a
/// non-collinear seed triple (a, b, c), then for each further body k the pairs
/// (a, k) and (b, k), or (c, k) when a, b, k are collinear.
/// A triple counts as collinear when |Λ| <= collinearity_tol * diameter^2.
inline TwistSpan twist_span_basis(const PlanarConfig& config, double collinearity_tol = 1e-10) {
  const std::size_t n = config.size();
  const PairTable<double> table(config.position_span(), 2.0);
  const double d = config.diameter();
  const double thresh = collinearity_tol * d * d;

  TwistSpan span;
  const std::size_t a = 0;
  std::size_t b = 1;
  for (std::size_t k = 1; k < n; ++k)
    if (table.r(a, k) > table.r(a, b)) b = k;
  std::size_t c = n;
  double best = thresh;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == a || k == b) continue;
    const double area = std::abs(table.lambda(a, b, k));
    if (area > best) {
      best = area;
      c = k;
    }
  }

  if (c == n) {
    span.collinear = true;
    for (std::size_t k = 1; k < n; ++k) span.basis.emplace_back(0, k);
    span.dimension = n - 1;
    return span;
  }

  span.basis = {TwistIndex(a, b), TwistIndex(a, c), TwistIndex(b, c)};
  for (std::size_t k = 0; k < n; ++k) {
    if (k == a || k == b || k == c) continue;
    span.basis.emplace_back(a, k);
    if (std::abs(table.lambda(a, b, k)) > thresh)
      span.basis.emplace_back(b, k);
    else
      span.basis.emplace_back(c, k);
  }
  span.dimension = 2 * n - 3;
  return span;
}

/// Matrix whose rows are the given twist vectors.
inline Eigen::MatrixXd stacked_twists(const PlanarConfig& config, std::span<const TwistIndex> pairs) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(pairs.size()), static_cast<Eigen::Index>(2 * config.size()));
  for (std::size_t r = 0; r < pairs.size(); ++r)
    m.row(static_cast<Eigen::Index>(r)) = twist_vector(config, pairs[r]).transpose();
  return m;
}

/// Numerical rank of the given rows via singular values; threshold is relative
/// to the largest singular value.
inline std::size_t numerical_rank(const Eigen::MatrixXd& rows, double rel_threshold = 1e-10) {
  if (rows.size() == 0) return 0;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  return static_cast<std::size_t>((s.array() > rel_threshold * s[0]).count());
}

/// Dimension of the span of all twist vectors, computed independently of the
/// inductive basis construction.
inline std::size_t twist_span_rank(const PlanarConfig& config, double rel_threshold = 1e-10) {
  const auto pairs = all_pairs(config.size());
  return numerical_rank(stacked_twists(config, pairs), rel_threshold);
}

/// Laura-Andoyer residual ∂f/∂v_ij = ∇f · v_ij = m_i m_j Σ_k m_k (R_ik - R_jk) Λ_ijk.
template <typename Scalar>
Scalar laura_andoyer(const PairTable<Scalar>& table, std::span<const Scalar> masses, std::size_t i, std::size_t j) {
  Scalar sum(0.0);
  for (std::size_t k = 0; k < table.size(); ++k) {
    if (k == i || k == j) continue;
    sum += masses[k] * (table.R(i, k) - table.R(j, k)) * table.lambda(i, j, k);
  }
  return masses[i] * masses[j] * sum;
}

inline double laura_andoyer(const PairTable<double>& table, std::span<const double> masses, const TwistIndex& pair) {
  return laura_andoyer<double>(table, masses, pair.i(), pair.j());
}

/// Asymmetric Albouy-Chenciner residual b_ij = Σ_{k≠i} m_k S_ik A_ijk.
template <typename Scalar>
Scalar albouy_chenciner_asym(const PairTable<Scalar>& table, std::span<const Scalar> masses, std::size_t i,
                             std::size_t j) {
  if (i == j) throw InvalidPairError("b_ij needs i != j");
  Scalar sum(0.0);
  for (std::size_t k = 0; k < table.size(); ++k) {
    if (k == i) continue;
    sum += masses[k] * table.S(i, k) * table.a(i, j, k);
  }
  return sum;
}

/// Same quantity with the k = j term split out: 2 m_j S_ij r_ij^2 + Σ_{k∉{i,j}} m_k S_ik A_ijk.
template <typename Scalar>
Scalar albouy_chenciner_asym_split(const PairTable<Scalar>& table, std::span<const Scalar> masses, std::size_t i,
                                   std::size_t j) {
  if (i == j) throw InvalidPairError("b_ij needs i != j");
  Scalar sum = Scalar(2.0) * masses[j] * table.S(i, j) * table.r2(i, j);
  for (std::size_t k = 0; k < table.size(); ++k) {
    if (k == i || k == j) continue;
    sum += masses[k] * table.S(i, k) * table.a(i, j, k);
  }
  return sum;
}

/// Symmetric Albouy-Chenciner residual g_ij = b_ij + b_ji.
template <typename Scalar>
Scalar albouy_chenciner_sym(const PairTable<Scalar>& table, std::span<const Scalar> masses, std::size_t i,
                            std::size_t j) {
  return albouy_chenciner_asym(table, masses, i, j) + albouy_chenciner_asym(table, masses, j, i);
}

struct CcResidual {
  double max_la = 0.0;  ///< max |LA| / (M^3 d^(2-A))
  double max_b = 0.0;   ///< max |b_ij| / (M d^2)
  bool is_cc = false;
};

/// Scale-normalized maxima of the Laura-Andoyer and asymmetric
/// Albouy-Chenciner residuals over all pairs; d is the diameter, M the total
/// mass. The LA part vanishes on the whole similarity class of a CC, the b
/// part only at the size where U = M I.
inline CcResidual cc_residual(const PlanarConfig& config, const PotentialParams& params, double tol = 1e-10) {
  detail::require_objective_exponent(params);
  const auto table = build_pair_table(config, params);
  const auto m = config.mass_span();
  const double M = config.total_mass();
  const double d = config.diameter();
  const double la_scale = M * M * M * std::pow(d, 2.0 - params.A);
  const double b_scale = M * d * d;
  CcResidual out;
  for (std::size_t i = 0; i < config.size(); ++i) {
    for (std::size_t j = 0; j < config.size(); ++j) {
      if (i == j) continue;
      if (i < j) out.max_la = std::max(out.max_la, std::abs(laura_andoyer<double>(table, m, i, j)) / la_scale);
      out.max_b = std::max(out.max_b, std::abs(albouy_chenciner_asym<double>(table, m, i, j)) / b_scale);
    }
  }
  out.is_cc = out.max_la < tol && out.max_b < tol;
  return out;
}

/// Scale-normalized max |LA| only.
inline double max_laura_andoyer(const PlanarConfig& config, const PotentialParams& params) {
  const auto table = build_pair_table(config, params);
  const auto m = config.mass_span();
  const double M = config.total_mass();
  const double scale = M * M * M * std::pow(config.diameter(), 2.0 - params.A);
  double out = 0.0;
  for (std::size_t i = 0; i < config.size(); ++i)
    for (std::size_t j = i + 1; j < config.size(); ++j)
      out = std::max(out, std::abs(laura_andoyer<double>(table, m, i, j)));
  return out / scale;
}

}  // namespace twistcc
