#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

#include "twistcc/error.hpp"

namespace twistcc {

inline double sqr(double x) noexcept { return x * x; }

/// Cached mutual-distance quantities of a planar configuration.
///
/// For every ordered pair (i, j), i != j:
///   x_ij = x_i - x_j, y_ij = y_i - y_j, r_ij = |q_i - q_j|,
///   R_ij = r^-A, S_ij = R_ij - 1, T_ij = r^(-A-2) = R_ij / r_ij^2.
/// Indices are 0-based. Scalar is double for ordinary evaluation and Interval
/// for certified enclosures; the formulas in twist.hpp and hessian.hpp are
/// written once against this table.
template <typename Scalar = double>
class PairTable {
 public:
  PairTable(std::span<const Scalar> flat_positions, double A)
      : n_(flat_positions.size() / 2), A_(A), dx_(n_ * n_), dy_(n_ * n_), r2_(n_ * n_),
        r_(n_ * n_), R_(n_ * n_), S_(n_ * n_), T_(n_ * n_) {
    using std::pow;
    using std::sqrt;
    if (flat_positions.size() % 2 != 0 || n_ < 2)
      throw InvalidConfigError("pair table needs an even-length coordinate vector with n >= 2");
    for (std::size_t i = 0; i < n_; ++i) {
      dx_[at(i, i)] = dy_[at(i, i)] = r2_[at(i, i)] = r_[at(i, i)] = Scalar(0.0);
      R_[at(i, i)] = S_[at(i, i)] = T_[at(i, i)] = Scalar(0.0);
      for (std::size_t j = i + 1; j < n_; ++j) {
        const Scalar dx = flat_positions[2 * i] - flat_positions[2 * j];
        const Scalar dy = flat_positions[2 * i + 1] - flat_positions[2 * j + 1];
        const Scalar r2 = sqr(dx) + sqr(dy);
        if constexpr (std::is_same_v<Scalar, double>) {
          if (!(r2 > 0.0)) throw DistinctPointsError(i + 1, j + 1);
        }
        const Scalar r = sqrt(r2);
        const Scalar R = pow(r, -A);
        const Scalar S = R - Scalar(1.0);
        const Scalar T = R / r2;
        set(i, j, dx, dy, r2, r, R, S, T);
      }
    }
  }

  std::size_t size() const noexcept { return n_; }
  double exponent() const noexcept { return A_; }

  const Scalar& dx(std::size_t i, std::size_t j) const { return dx_[at(i, j)]; }
  const Scalar& dy(std::size_t i, std::size_t j) const { return dy_[at(i, j)]; }
  const Scalar& r2(std::size_t i, std::size_t j) const { return r2_[at(i, j)]; }
  const Scalar& r(std::size_t i, std::size_t j) const { return r_[at(i, j)]; }
  const Scalar& R(std::size_t i, std::size_t j) const { return R_[at(i, j)]; }
  const Scalar& S(std::size_t i, std::size_t j) const { return S_[at(i, j)]; }
  const Scalar& T(std::size_t i, std::size_t j) const { return T_[at(i, j)]; }

  /// Λ_ijk = q_ij ∧ q_ik, twice the signed area of (q_i, q_j, q_k).
  Scalar lambda(std::size_t i, std::size_t j, std::size_t k) const {
    return dx(i, j) * dy(i, k) - dx(i, k) * dy(i, j);
  }

  /// A_ijk = r_ij^2 + r_ik^2 - r_jk^2.
  Scalar a(std::size_t i, std::size_t j, std::size_t k) const {
    return r2(i, j) + r2(i, k) - r2(j, k);
  }

  /// q_ij · q_kl.
  Scalar dot(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return dx(i, j) * dx(k, l) + dy(i, j) * dy(k, l);
  }

 private:
  std::size_t at(std::size_t i, std::size_t j) const noexcept { return i * n_ + j; }

  void set(std::size_t i, std::size_t j, const Scalar& dx, const Scalar& dy, const Scalar& r2,
           const Scalar& r, const Scalar& R, const Scalar& S, const Scalar& T) {
    dx_[at(i, j)] = dx;
    dy_[at(i, j)] = dy;
    dx_[at(j, i)] = -dx;
    dy_[at(j, i)] = -dy;
    r2_[at(i, j)] = r2_[at(j, i)] = r2;
    r_[at(i, j)] = r_[at(j, i)] = r;
    R_[at(i, j)] = R_[at(j, i)] = R;
    S_[at(i, j)] = S_[at(j, i)] = S;
    T_[at(i, j)] = T_[at(j, i)] = T;
  }

  std::size_t n_;
  double A_;
  std::vector<Scalar> dx_, dy_, r2_, r_, R_, S_, T_;
};

}  // namespace twistcc
