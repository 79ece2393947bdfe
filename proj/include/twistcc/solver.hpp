#pragma once

// Twist flows and twist-restricted gradient descent.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "twistcc/config.hpp"
#include "twistcc/error.hpp"
#include "twistcc/twist.hpp"

namespace twistcc {

enum class Integrator { kEuler = 1, kMidpoint = 2, kRk4 = 4 };

/// q' = Σ c_k v_{pair_k}(q), integrated with a fixed step.
struct FlowSpec {
  std::vector<std::pair<TwistIndex, double>> field;
  double dt = 1e-3;
  std::size_t steps = 1000;
  std::size_t sample_every = 1;
  Integrator integrator = Integrator::kRk4;
};

struct Trajectory {
  std::vector<std::size_t> steps;
  std::vector<Eigen::VectorXd> states;  ///< flat positions at each sampled step
  Eigen::VectorXd masses;
  bool aborted = false;
  std::string abort_reason;

  PlanarConfig config_at(std::size_t sample) const { return {states.at(sample), masses}; }
};

namespace detail {

inline Eigen::VectorXd twist_field(const Eigen::VectorXd& q, const Eigen::VectorXd& m,
                                   const std::vector<std::pair<TwistIndex, double>>& field) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(q.size());
  for (const auto& [p, c] : field) {
    const auto i = static_cast<Eigen::Index>(p.i());
    const auto j = static_cast<Eigen::Index>(p.j());
    const double dx = q[2 * i] - q[2 * j];
    const double dy = q[2 * i + 1] - q[2 * j + 1];
    v[2 * i] += c * m[j] * dy;
    v[2 * i + 1] -= c * m[j] * dx;
    v[2 * j] -= c * m[i] * dy;
    v[2 * j + 1] += c * m[i] * dx;
  }
  return v;
}

}  // namespace detail

inline Trajectory flow_fixed_combo(const PlanarConfig& config, const FlowSpec& spec) {
  if (spec.field.empty()) throw InvalidFlowError("flow needs at least one twist term");
  bool any_nonzero = false;
  for (const auto& [p, c] : spec.field) {
    p.check(config.size());
    if (!std::isfinite(c)) throw InvalidFlowError("non-finite flow coefficient");
    any_nonzero = any_nonzero || c != 0.0;
  }
  if (!any_nonzero) throw InvalidFlowError("flow needs a nonzero coefficient");
  if (!(spec.dt > 0.0) || !std::isfinite(spec.dt)) throw InvalidFlowError("flow step dt must be positive");
  const std::size_t every = spec.sample_every == 0 ? 1 : spec.sample_every;

  Trajectory traj;
  traj.masses = config.masses();
  Eigen::VectorXd q = config.positions();
  traj.steps.push_back(0);
  traj.states.push_back(q);
  const auto& m = traj.masses;
  const double h = spec.dt;
  auto F = [&](const Eigen::VectorXd& x) { return detail::twist_field(x, m, spec.field); };

  for (std::size_t step = 1; step <= spec.steps; ++step) {
    switch (spec.integrator) {
      case Integrator::kEuler:
        q += h * F(q);
        break;
      case Integrator::kMidpoint:
        q += h * F(q + 0.5 * h * F(q));
        break;
      case Integrator::kRk4: {
        const Eigen::VectorXd k1 = F(q);
        const Eigen::VectorXd k2 = F(q + 0.5 * h * k1);
        const Eigen::VectorXd k3 = F(q + 0.5 * h * k2);
        const Eigen::VectorXd k4 = F(q + h * k3);
        q += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        break;
      }
    }
    try {
      (void)PlanarConfig(q, m);
    } catch (const DistinctPointsError& e) {
      traj.aborted = true;
      traj.abort_reason = "step " + std::to_string(step) + ": " + e.what();
      return traj;
    }
    if (step % every == 0 || step == spec.steps) {
      traj.steps.push_back(step);
      traj.states.push_back(q);
    }
  }
  return traj;
}

/// Scales positions about the center of mass by λ = (U / (M I))^(1/A) so that
/// U = M I holds.
inline PlanarConfig rescale_to_cc_size(const PlanarConfig& config, const PotentialParams& params) {
  const double U = potential_U(config, params);
  const double MI = config.total_mass() * moment_of_inertia(config);
  const double lambda = std::pow(U / MI, 1.0 / params.A);
  const Eigen::Vector2d c = center_of_mass(config);
  Eigen::VectorXd q = config.positions();
  for (std::size_t i = 0; i < config.size(); ++i) {
    const auto b = static_cast<Eigen::Index>(2 * i);
    q.segment<2>(b) = c + lambda * (q.segment<2>(b) - c);
  }
  return config.with_positions(std::move(q));
}

enum class BasisSelection { kSpanBasis, kAllPairs };

struct DescentOptions {
  double tol = 1e-10;  ///< on the scale-normalized max |LA|
  std::size_t max_iter = 20000;
  BasisSelection basis = BasisSelection::kSpanBasis;
  double collinearity_tol = 1e-10;
  // Backtracking: η0 = initial_step_fraction * diameter / ‖velocity‖, η *= shrink
  // until f(q - η d) <= f(q) - armijo η ∇f·d.
  double initial_step_fraction = 1e-2;
  double shrink = 0.5;
  double armijo = 1e-4;
  std::size_t max_backtracks = 40;
  std::size_t collapse_window = 3;
  bool record_trajectory = false;
  std::size_t record_every = 1;
};

struct DescentReport {
  explicit DescentReport(PlanarConfig start) : final_config(std::move(start)) {}

  PlanarConfig final_config;
  std::size_t iterations = 0;
  double final_residual = 0.0;  ///< scale-normalized max |LA|
  double final_f = 0.0;
  bool converged = false;
  bool collinear_collapse = false;
  std::string stop_reason;
  std::vector<double> f_history;  ///< f at every accepted iterate, starting with the input
  std::vector<double> f_changes;  ///< f_change of each accepted step, free of cancellation
  Trajectory trajectory;          ///< filled when record_trajectory is set
};

/// Gradient descent along twist directions: q <- q - η Σ_k (∇f·V_k / ‖V_k‖²) V_k
/// over an independent twist set re-selected every iteration. Stops when the
/// iterate rescaled by rescale_to_cc_size passes cc_residual at tol, which bounds
/// both the Laura-Andoyer and the Albouy-Chenciner residuals. The returned
/// config keeps the descent's size.
inline DescentReport descend(const PlanarConfig& start, const PotentialParams& params,
                             const DescentOptions& opt = {}) {
  detail::require_objective_exponent(params);
  const std::size_t n = start.size();
  const std::size_t full_dim = n >= 2 ? 2 * n - 3 : 0;
  DescentReport rep(start);
  PlanarConfig q = start;
  double f = f_value(q, params);
  rep.f_history.push_back(f);
  if (opt.record_trajectory) {
    rep.trajectory.masses = start.masses();
    rep.trajectory.steps.push_back(0);
    rep.trajectory.states.push_back(q.positions());
  }
  std::size_t collinear_run = 0;
  double residual = max_laura_andoyer(q, params);
  auto done = [&] { return residual < opt.tol && cc_residual(rescale_to_cc_size(q, params), params, opt.tol).is_cc; };

  while (true) {
    if (done()) {
      rep.converged = true;
      rep.stop_reason = "converged";
      break;
    }
    if (rep.iterations >= opt.max_iter) {
      rep.stop_reason = "max_iter reached";
      break;
    }

    const TwistSpan span = twist_span_basis(q, opt.collinearity_tol);
    collinear_run = span.dimension < full_dim ? collinear_run + 1 : 0;
    if (collinear_run >= opt.collapse_window) {
      rep.collinear_collapse = true;
      rep.stop_reason = "collinear collapse";
      break;
    }
    const std::vector<TwistIndex> pairs = opt.basis == BasisSelection::kAllPairs ? all_pairs(n) : span.basis;

    const TangentVector g = cartesian_gradient_f(q, params);
    TangentVector d = TangentVector::Zero(g.size());
    for (const auto& p : pairs) {
      const TangentVector v = twist_vector(q, p);
      d += (g.dot(v) / v.squaredNorm()) * v;
    }
    const double slope = g.dot(d);
    if (!(slope > 0.0) || d.norm() == 0.0) {
      rep.stop_reason = "zero descent direction";
      break;
    }

    double eta = opt.initial_step_fraction * q.diameter() / d.norm();
    bool accepted = false;
    for (std::size_t bt = 0; bt <= opt.max_backtracks; ++bt, eta *= opt.shrink) {
      const TangentVector delta = -eta * d;
      double change = 0.0;
      try {
        change = f_change(q, delta, params);
        if (!(change <= -opt.armijo * eta * slope)) continue;
        q = q.with_positions(q.positions() + delta);
      } catch (const DistinctPointsError&) {
        continue;
      }
      f += change;
      rep.f_changes.push_back(change);
      accepted = true;
      break;
    }
    if (!accepted) {
      rep.stop_reason = "line search failed";
      break;
    }
    ++rep.iterations;
    rep.f_history.push_back(f);
    residual = max_laura_andoyer(q, params);
    if (opt.record_trajectory && opt.record_every && rep.iterations % opt.record_every == 0) {
      rep.trajectory.steps.push_back(rep.iterations);
      rep.trajectory.states.push_back(q.positions());
    }
  }
  rep.final_config = q;
  rep.final_residual = residual;
  rep.final_f = f_value(q, params);
  if (opt.record_trajectory && rep.trajectory.steps.back() != rep.iterations) {
    rep.trajectory.steps.push_back(rep.iterations);
    rep.trajectory.states.push_back(q.positions());
  }
  return rep;
}

}  // namespace twistcc
