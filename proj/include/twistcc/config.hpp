#pragma once

// Planar configurations and the objective f = M I / 2 + U / (A - 2).
//
// A configuration is a critical point of f exactly when it is a central
// configuration at the size where U = M I.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>

#include "twistcc/error.hpp"
#include "twistcc/pair_table.hpp"

namespace twistcc {

using TangentVector = Eigen::VectorXd;

struct PotentialParams {
  double A = 3.0;
};

/// Relative threshold under which two bodies are treated as coincident.
inline constexpr double kCoincidenceTol = 1e-13;

/// n point masses in the plane, coordinates flattened as (x1, y1, ..., xn, yn).
class PlanarConfig {
 public:
  PlanarConfig(Eigen::VectorXd positions, Eigen::VectorXd masses)
      : positions_(std::move(positions)), masses_(std::move(masses)) {
    validate();
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(masses_.size()); }
  const Eigen::VectorXd& positions() const noexcept { return positions_; }
  const Eigen::VectorXd& masses() const noexcept { return masses_; }
  double mass(std::size_t i) const { return masses_[static_cast<Eigen::Index>(i)]; }
  Eigen::Vector2d position(std::size_t i) const {
    return positions_.segment<2>(static_cast<Eigen::Index>(2 * i));
  }
  double total_mass() const { return masses_.sum(); }

  std::span<const double> position_span() const {
    return {positions_.data(), static_cast<std::size_t>(positions_.size())};
  }
  std::span<const double> mass_span() const {
    return {masses_.data(), static_cast<std::size_t>(masses_.size())};
  }

  /// Largest mutual distance.
  double diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j) d = std::max(d, (position(i) - position(j)).norm());
    return d;
  }

  /// Same masses, new positions (validated).
  PlanarConfig with_positions(Eigen::VectorXd positions) const {
    return PlanarConfig(std::move(positions), masses_);
  }

 private:
  void validate() const {
    const auto n = masses_.size();
    if (n < 2) throw InvalidConfigError("configuration needs at least 2 bodies");
    if (positions_.size() != 2 * n)
      throw InvalidConfigError("position vector length " + std::to_string(positions_.size()) +
                               " does not match 2n = " + std::to_string(2 * n));
    for (Eigen::Index i = 0; i < n; ++i)
      if (!(masses_[i] > 0.0) || !std::isfinite(masses_[i]))
        throw InvalidConfigError("mass " + std::to_string(i + 1) + " is not a positive finite number");
    if (!positions_.allFinite()) throw InvalidConfigError("non-finite coordinate");
    const double tol = kCoincidenceTol * diameter();
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j)
        if (!((position(i) - position(j)).norm() > tol)) throw DistinctPointsError(i + 1, j + 1);
  }

  Eigen::VectorXd positions_;
  Eigen::VectorXd masses_;
};

namespace detail {

inline void require_objective_exponent(const PotentialParams& p) {
  if (!(p.A > 2.0) || !std::isfinite(p.A))
    throw ExponentDomainError("the objective f needs a finite exponent A > 2, got " + std::to_string(p.A));
}

inline void require_table_exponent(const PotentialParams& p) {
  if (!(p.A >= 2.0) || !std::isfinite(p.A))
    throw ExponentDomainError("pair tables need a finite exponent A >= 2, got " + std::to_string(p.A));
}

}  // namespace detail

inline PairTable<double> build_pair_table(const PlanarConfig& config, const PotentialParams& params) {
  detail::require_table_exponent(params);
  return PairTable<double>(config.position_span(), params.A);
}

inline Eigen::Vector2d center_of_mass(const PlanarConfig& config) {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < config.size(); ++i) c += config.mass(i) * config.position(i);
  return c / config.total_mass();
}

inline double moment_of_inertia(const PlanarConfig& config) {
  const Eigen::Vector2d c = center_of_mass(config);
  double I = 0.0;
  for (std::size_t i = 0; i < config.size(); ++i) I += config.mass(i) * (config.position(i) - c).squaredNorm();
  return I;
}

/// U = Σ_{i<j} m_i m_j r_ij^(2-A).
inline double potential_U(const PlanarConfig& config, const PotentialParams& params) {
  detail::require_objective_exponent(params);
  double U = 0.0;
  for (std::size_t i = 0; i < config.size(); ++i)
    for (std::size_t j = i + 1; j < config.size(); ++j)
      U += config.mass(i) * config.mass(j) *
           std::pow((config.position(i) - config.position(j)).norm(), 2.0 - params.A);
  return U;
}

inline double f_value(const PlanarConfig& config, const PotentialParams& params) {
  const double U = potential_U(config, params);
  return 0.5 * config.total_mass() * moment_of_inertia(config) + U / (params.A - 2.0);
}

/// U - M I; vanishes at every critical point of f (Euler relation).
inline double euler_residual(const PlanarConfig& config, const PotentialParams& params) {
  return potential_U(config, params) - config.total_mass() * moment_of_inertia(config);
}

/// ∇f, body block i = -m_i Σ_{k≠i} m_k (q_i - q_k) S_ik.
inline TangentVector cartesian_gradient_f(const PlanarConfig& config, const PotentialParams& params) {
  detail::require_objective_exponent(params);
  const auto table = build_pair_table(config, params);
  const std::size_t n = config.size();
  TangentVector g = TangentVector::Zero(static_cast<Eigen::Index>(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    double gx = 0.0;
    double gy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      gx += config.mass(k) * table.dx(i, k) * table.S(i, k);
      gy += config.mass(k) * table.dy(i, k) * table.S(i, k);
    }
    g[static_cast<Eigen::Index>(2 * i)] = -config.mass(i) * gx;
    g[static_cast<Eigen::Index>(2 * i + 1)] = -config.mass(i) * gy;
  }
  return g;
}

/// f(q + delta) - f(q), evaluated pairwise so that the difference keeps full
/// relative precision even when it is far below f's own rounding level.
inline double f_change(const PlanarConfig& config, const TangentVector& delta, const PotentialParams& params) {
  detail::require_objective_exponent(params);
  const std::size_t n = config.size();
  const double e = 1.0 - 0.5 * params.A;  // r^(2-A) = (r^2)^e
  double change = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Eigen::Vector2d d = config.position(i) - config.position(j);
      const Eigen::Vector2d dd = delta.segment<2>(static_cast<Eigen::Index>(2 * i)) -
                                 delta.segment<2>(static_cast<Eigen::Index>(2 * j));
      const double r2 = d.squaredNorm();
      const double dr2 = 2.0 * d.dot(dd) + dd.squaredNorm();
      const double pot = std::pow(r2, e) * std::expm1(e * std::log1p(dr2 / r2));
      change += config.mass(i) * config.mass(j) * (0.5 * dr2 + pot / (params.A - 2.0));
    }
  }
  // M I / 2 = (1/2) Σ_{i<j} m_i m_j r_ij^2, hence the 0.5 * dr2 term.
  return change;
}

/// Equilateral triangle with unit sides, centered at the origin.
inline PlanarConfig lagrange_triangle(double m1, double m2, double m3) {
  const double h = std::numbers::sqrt3 / 2.0;
  Eigen::VectorXd q(6);
  q << -0.5, -h / 3.0, 0.5, -h / 3.0, 0.0, 2.0 * h / 3.0;
  Eigen::VectorXd m(3);
  m << m1, m2, m3;
  return {q, m};
}

/// Unit square with vertices listed counter-clockwise from the origin.
inline PlanarConfig unit_square(const Eigen::Vector4d& masses) {
  Eigen::VectorXd q(8);
  q << 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0;
  return {q, Eigen::VectorXd(masses)};
}

}  // namespace twistcc
