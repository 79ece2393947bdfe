#pragma once

// Hessian of f in Cartesian coordinates and in twist coordinates.
//
// Twist-coordinate entries come in three kinds: a pair with itself
// (v_ijᵀ H v_ij), two pairs sharing one body (v_ijᵀ H v_ik) and two disjoint
// pairs (v_ijᵀ H v_kl). Each has a raw form and a normalized form in the
// rescaled twists ṽ_ij = v_ij / (m_i m_j r_ij); the normalized form uses the
// signed angles of AngleTable and is an exact rescaling of the raw one.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "twistcc/config.hpp"
#include "twistcc/pair_table.hpp"
#include "twistcc/twist.hpp"

namespace twistcc {

/// Cartesian Hessian of f (2n x 2n). Off-diagonal body blocks are
/// m_i m_k (S_ik I - A T_ik q_ik q_ikᵀ); diagonal blocks are minus their row sums.
inline Eigen::MatrixXd cartesian_hessian(const PlanarConfig& config, const PotentialParams& params) {
  detail::require_objective_exponent(params);
  const auto table = build_pair_table(config, params);
  const std::size_t n = config.size();
  const double A = params.A;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(2 * n), static_cast<Eigen::Index>(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto bi = static_cast<Eigen::Index>(2 * i);
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      const auto bk = static_cast<Eigen::Index>(2 * k);
      const double mm = config.mass(i) * config.mass(k);
      const double x = table.dx(i, k);
      const double y = table.dy(i, k);
      const double S = table.S(i, k);
      const double T = table.T(i, k);
      Eigen::Matrix2d block;
      block << S - A * x * x * T, -A * T * x * y, -A * T * x * y, S - A * y * y * T;
      block *= mm;
      H.block<2, 2>(bi, bk) = block;
      H.block<2, 2>(bi, bi) -= block;
    }
  }
  return H;
}

/// Signed angles read off the pair table. sin_at(v, a, b) is the sine of the
/// oriented angle at vertex v from q_va to q_vb, i.e. Λ_vab / (r_va r_vb).
template <typename Scalar>
class AngleTable {
 public:
  explicit AngleTable(const PairTable<Scalar>& table) : t_(table) {}

  Scalar sin_at(std::size_t v, std::size_t a, std::size_t b) const {
    return t_.lambda(v, a, b) / (t_.r(v, a) * t_.r(v, b));
  }
  Scalar cos_at(std::size_t v, std::size_t a, std::size_t b) const {
    return t_.dot(v, a, v, b) / (t_.r(v, a) * t_.r(v, b));
  }
  /// Cosine of the angle between q_ij and q_kl.
  Scalar cos_between(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return t_.dot(i, j, k, l) / (t_.r(i, j) * t_.r(k, l));
  }

 private:
  const PairTable<Scalar>& t_;
};

// ---------------------------------------------------------------------------
// Raw twist entries.

/// v_ijᵀ H v_ij.
template <typename Scalar>
Scalar twist_hessian_diag(const PairTable<Scalar>& t, std::span<const Scalar> m, std::size_t i, std::size_t j) {
  const double A = t.exponent();
  const Scalar rij2 = t.r2(i, j);
  Scalar sum = sqr(m[i] + m[j]) * rij2 * t.S(i, j);
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k == i || k == j) continue;
    sum += m[k] * (rij2 * (m[j] * t.S(i, k) + m[i] * t.S(j, k)) -
                   A * sqr(t.lambda(i, j, k)) * (m[j] * t.T(i, k) + m[i] * t.T(j, k)));
  }
  return -m[i] * m[j] * sum;
}

/// v_ijᵀ H v_ik for distinct i, j, k (body i shared).
template <typename Scalar>
Scalar twist_hessian_share(const PairTable<Scalar>& t, std::span<const Scalar> m, std::size_t i, std::size_t j,
                           std::size_t k) {
  const double A = t.exponent();
  Scalar outer(0.0);
  for (std::size_t l = 0; l < t.size(); ++l)
    if (l != i) outer += m[l] * t.S(i, l);
  Scalar sum = t.dot(i, j, i, k) * (m[i] * (t.S(k, j) - t.S(i, j) - t.S(i, k)) - outer) -
               m[i] * A * t.T(j, k) * sqr(t.lambda(i, j, k));
  for (std::size_t l = 0; l < t.size(); ++l) {
    if (l == i || l == j || l == k) continue;
    sum += A * m[l] * t.T(i, l) * t.lambda(i, j, l) * t.lambda(i, k, l);
  }
  return m[i] * m[j] * m[k] * sum;
}

/// v_ijᵀ H v_kl for pairwise distinct i, j, k, l.
template <typename Scalar>
Scalar twist_hessian_disjoint(const PairTable<Scalar>& t, std::span<const Scalar> m, std::size_t i, std::size_t j,
                              std::size_t k, std::size_t l) {
  const double A = t.exponent();
  const Scalar quartic = t.T(i, k) * t.lambda(i, k, l) * t.lambda(i, k, j) +
                         t.T(j, k) * t.lambda(j, k, l) * t.lambda(j, k, i) +
                         t.T(i, l) * t.lambda(i, l, k) * t.lambda(i, l, j) +
                         t.T(j, l) * t.lambda(j, l, i) * t.lambda(j, l, k);
  const Scalar sum = -A * quartic + t.dot(i, j, k, l) * (t.R(i, k) + t.R(j, l) - t.R(j, k) - t.R(i, l));
  return m[i] * m[j] * m[k] * m[l] * sum;
}

// ---------------------------------------------------------------------------
// Normalized twist entries (ṽ = v / (m_i m_j r_ij)); μ_ab = m_a / m_b.

template <typename Scalar>
Scalar normalized_twist_hessian_diag(const PairTable<Scalar>& t, std::span<const Scalar> m, std::size_t i,
                                     std::size_t j) {
  const double A = t.exponent();
  const AngleTable<Scalar> ang(t);
  Scalar sum = -(Scalar(2.0) + m[i] / m[j] + m[j] / m[i]) * t.S(i, j);
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k == i || k == j) continue;
    const Scalar mu_ki = m[k] / m[i];
    const Scalar mu_kj = m[k] / m[j];
    sum += -mu_ki * t.S(i, k) - mu_kj * t.S(j, k) +
           A * (mu_ki * sqr(ang.sin_at(i, j, k)) * t.R(i, k) + mu_kj * sqr(ang.sin_at(j, i, k)) * t.R(j, k));
  }
  return sum;
}

template <typename Scalar>
Scalar normalized_twist_hessian_share(const PairTable<Scalar>& t, std::span<const Scalar> m, std::size_t i,
                                      std::size_t j, std::size_t k) {
  const double A = t.exponent();
  const AngleTable<Scalar> ang(t);
  Scalar bracket = t.S(k, j) - t.S(i, j) - t.S(i, k);
  for (std::size_t l = 0; l < t.size(); ++l)
    if (l != i) bracket -= m[l] / m[i] * t.S(i, l);
  Scalar sum = ang.cos_at(i, j, k) * bracket - A * t.R(j, k) * ang.sin_at(j, k, i) * ang.sin_at(k, i, j);
  for (std::size_t l = 0; l < t.size(); ++l) {
    if (l == i || l == j || l == k) continue;
    sum += A * (m[l] / m[i]) * t.R(i, l) * ang.sin_at(i, j, l) * ang.sin_at(i, k, l);
  }
  return sum;
}

template <typename Scalar>
Scalar normalized_twist_hessian_disjoint(const PairTable<Scalar>& t, std::span<const Scalar> /*m*/, std::size_t i,
                                         std::size_t j, std::size_t k, std::size_t l) {
  const double A = t.exponent();
  const AngleTable<Scalar> ang(t);
  const Scalar quartic = t.R(i, k) * ang.sin_at(k, l, i) * ang.sin_at(i, k, j) +
                         t.R(j, k) * ang.sin_at(k, l, j) * ang.sin_at(j, k, i) +
                         t.R(i, l) * ang.sin_at(l, k, i) * ang.sin_at(i, l, j) +
                         t.R(j, l) * ang.sin_at(j, l, i) * ang.sin_at(l, k, j);
  return -A * quartic + ang.cos_between(i, j, k, l) * (t.R(i, k) + t.R(j, l) - t.R(j, k) - t.R(i, l));
}

/// Entry between two twist pairs, dispatching on how the pairs overlap.
template <typename Scalar>
Scalar twist_hessian_entry(const PairTable<Scalar>& t, std::span<const Scalar> m, const TwistIndex& p,
                           const TwistIndex& q, bool normalized) {
  if (p == q)
    return normalized ? normalized_twist_hessian_diag(t, m, p.i(), p.j()) : twist_hessian_diag(t, m, p.i(), p.j());
  std::size_t shared = t.size();
  if (q.contains(p.i())) shared = p.i();
  if (q.contains(p.j())) shared = p.j();
  if (shared != t.size()) {
    const std::size_t j = p.i() == shared ? p.j() : p.i();
    const std::size_t k = q.i() == shared ? q.j() : q.i();
    return normalized ? normalized_twist_hessian_share(t, m, shared, j, k) : twist_hessian_share(t, m, shared, j, k);
  }
  return normalized ? normalized_twist_hessian_disjoint(t, m, p.i(), p.j(), q.i(), q.j())
                    : twist_hessian_disjoint(t, m, p.i(), p.j(), q.i(), q.j());
}

// ---------------------------------------------------------------------------
// Assembly in a list of combined directions.

/// A named linear combination Σ c_k v_{pair_k} (or of ṽ when normalized).
struct TwistDirection {
  std::string label;
  std::vector<std::pair<TwistIndex, double>> terms;

  static TwistDirection single(const TwistIndex& p) { return {p.label(), {{p, 1.0}}}; }
};

inline std::vector<TwistDirection> single_directions(std::span<const TwistIndex> pairs) {
  std::vector<TwistDirection> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(TwistDirection::single(p));
  return out;
}

struct TwistMatrix {
  Eigen::MatrixXd values;
  std::vector<TwistDirection> directions;
  bool normalized = false;
};

/// Row-major symmetric matrix of bilinear-expanded twist entries.
template <typename Scalar>
std::vector<Scalar> twist_hessian_entries(const PairTable<Scalar>& t, std::span<const Scalar> m,
                                          std::span<const TwistDirection> dirs, bool normalized) {
  const std::size_t d = dirs.size();
  std::vector<Scalar> out(d * d, Scalar(0.0));
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      Scalar sum(0.0);
      for (const auto& [p, cp] : dirs[a].terms)
        for (const auto& [q, cq] : dirs[b].terms) sum += Scalar(cp) * Scalar(cq) * twist_hessian_entry(t, m, p, q, normalized);
      out[a * d + b] = sum;
      out[b * d + a] = sum;
    }
  }
  return out;
}

inline TwistMatrix assemble_twist_hessian(const PlanarConfig& config, const PotentialParams& params,
                                          std::vector<TwistDirection> directions, bool normalized) {
  detail::require_objective_exponent(params);
  for (const auto& dir : directions)
    for (const auto& term : dir.terms) term.first.check(config.size());
  const auto table = build_pair_table(config, params);
  const auto entries = twist_hessian_entries<double>(table, config.mass_span(), directions, normalized);
  const auto d = static_cast<Eigen::Index>(directions.size());
  TwistMatrix out;
  out.values = Eigen::Map<const Eigen::MatrixXd>(entries.data(), d, d);
  out.directions = std::move(directions);
  out.normalized = normalized;
  return out;
}

/// Cartesian tangent vector of a direction (for sandwich checks Vᵀ H V).
inline TangentVector direction_vector(const PlanarConfig& config, const PairTable<double>& table,
                                      const TwistDirection& dir, bool normalized) {
  TangentVector v = TangentVector::Zero(static_cast<Eigen::Index>(2 * config.size()));
  for (const auto& [p, c] : dir.terms)
    v += c * (normalized ? normalized_twist(config, table, p) : twist_vector(config, p));
  return v;
}

// ---------------------------------------------------------------------------
// Spectra and Morse index.

inline Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

struct MorseCounts {
  std::size_t negative = 0;
  std::size_t zero = 0;
  std::size_t positive = 0;
  friend bool operator==(const MorseCounts&, const MorseCounts&) = default;
};

inline MorseCounts count_signs(const Eigen::VectorXd& eigenvalues, double zero_tol = 1e-8) {
  MorseCounts c;
  const double radius = eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  for (double v : eigenvalues) {
    if (radius == 0.0 || std::abs(v) < zero_tol * radius)
      ++c.zero;
    else if (v < 0.0)
      ++c.negative;
    else
      ++c.positive;
  }
  return c;
}

/// Eigenvalue sign counts; |λ| < zero_tol * max|λ| counts as zero.
inline MorseCounts morse_index(const Eigen::MatrixXd& m, double zero_tol = 1e-8) {
  return count_signs(symmetric_eigenvalues(m), zero_tol);
}

inline MorseCounts morse_index(const TwistMatrix& m, double zero_tol = 1e-8) { return morse_index(m.values, zero_tol); }

// ---------------------------------------------------------------------------
// Three bodies at the Lagrange triangle.

/// (3A/4) [[μ31+μ32, -1, -1], [-1, μ21+μ23, -1], [-1, -1, μ12+μ13]] in the
/// basis (ṽ12, ṽ13, ṽ23).
inline Eigen::Matrix3d lagrange_hessian_closed_form(double m1, double m2, double m3, double A) {
  Eigen::Matrix3d h;
  h << m3 / m1 + m3 / m2, -1.0, -1.0, -1.0, m2 / m1 + m2 / m3, -1.0, -1.0, -1.0, m1 / m2 + m1 / m3;
  return 0.75 * A * h;
}

/// Nonzero-eigenvalue factor of det(λI - M) = λ (a0 + a1 λ + a2 λ²) for the
/// Lagrange matrix M with the 3A/4 factor removed.
struct LagrangeCharPoly {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 1.0;

  double discriminant() const { return a1 * a1 - 4.0 * a0 * a2; }
  /// Roots of a0 + a1 λ + a2 λ², ascending.
  std::pair<double, double> roots() const {
    const double s = std::sqrt(std::max(0.0, discriminant()));
    return {(-a1 - s) / (2.0 * a2), (-a1 + s) / (2.0 * a2)};
  }
};

inline LagrangeCharPoly lagrange_char_poly_coeffs(double m1, double m2, double m3) {
  const double d1 = m3 / m1 + m3 / m2;
  const double d2 = m2 / m1 + m2 / m3;
  const double d3 = m1 / m2 + m1 / m3;
  LagrangeCharPoly p;
  p.a2 = 1.0;
  p.a1 = -(d1 + d2 + d3);
  p.a0 = (d1 * d2 - 1.0) + (d1 * d3 - 1.0) + (d2 * d3 - 1.0);
  return p;
}

}  // namespace twistcc
