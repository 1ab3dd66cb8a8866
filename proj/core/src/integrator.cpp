#include "ofo/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ofo/error.hpp"

namespace ofo {

void StepConfig::validate() const {
  if (!(initial_step > 0) || !(max_step > 0) || !(error_tolerance > 0) || !(max_time > 0) ||
      !(min_step > 0)) {
    throw DomainError("StepConfig: step sizes, tolerance and horizon must be positive");
  }
  if (initial_step > max_step) throw DomainError("StepConfig: initial_step exceeds max_step");
  if (output_interval < 0) throw DomainError("StepConfig: output_interval must be nonnegative");
}

Eigen::MatrixXd Trajectory::as_matrix() const {
  if (states.empty()) return {};
  Eigen::MatrixXd out(static_cast<Eigen::Index>(states.size()), states.front().size());
  for (std::size_t i = 0; i < states.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = states[i].transpose();
  return out;
}

Eigen::VectorXd Trajectory::at(double t) const {
  if (times.empty()) throw DomainError("Trajectory::at: empty trajectory");
  if (t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - times.begin());
  const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
  return (1.0 - w) * states[k - 1] + w * states[k];
}

namespace {

class ProjectedStepper {
 public:
  ProjectedStepper(const VectorField& field, const Box& box, const Eigen::VectorXd& x0, double t0,
                   const StepConfig& config)
      : field_(field), box_(box), config_(config), t_(t0) {
    config_.validate();
    require_same_dimension(box.dimension(), x0.size(), "integrate_projected: x0");
    if (!box.contains(x0, kBoxTolerance)) {
      throw DomainError("integrate_projected: initial state lies outside the box");
    }
    x_ = box.clamp(x0);
    h_ = std::min(config_.initial_step, config_.max_step);
    fx_ = evaluate(t_, x_);
  }

  double time() const { return t_; }
  const Eigen::VectorXd& state() const { return x_; }
  const Eigen::VectorXd& field_value() const { return fx_; }

  double residual() const { return project_tangent(x_, fx_, box_).lpNorm<Eigen::Infinity>(); }

  /// Takes one accepted step that does not pass `t_end`.
  void advance(double t_end) {
    for (;;) {
      const double remaining = t_end - t_;
      const bool truncated = remaining <= h_;
      const double h = truncated ? remaining : h_;

      const Eigen::VectorXd full = box_.clamp(x_ + h * fx_);
      const Eigen::VectorXd half = box_.clamp(x_ + (0.5 * h) * fx_);
      const Eigen::VectorXd f_half = evaluate(t_ + 0.5 * h, half);
      const Eigen::VectorXd two_halves = box_.clamp(half + (0.5 * h) * f_half);

      const double err =
          ((two_halves - full).cwiseAbs().array() / (1.0 + x_.cwiseAbs().array())).maxCoeff();
      const double tol = config_.error_tolerance;

      if (err <= tol) {
        x_ = box_.clamp(2.0 * two_halves - full);
        t_ = truncated ? t_end : t_ + h;
        fx_ = evaluate(t_, x_);
        const double grow = err == 0.0 ? 2.0 : std::clamp(0.9 * std::sqrt(tol / err), 0.2, 2.0);
        if (!truncated || grow < 1.0) h_ = std::min(config_.max_step, h * grow);
        return;
      }

      h_ = h * std::clamp(0.9 * std::sqrt(tol / err), 0.2, 0.9);
      if (h_ < config_.min_step * std::max(1.0, std::abs(t_))) {
        std::ostringstream msg;
        msg << "integrate_projected: step size underflow at t=" << t_ << " (h=" << h_ << ")";
        throw IntegrationError(IntegrationError::Kind::StepUnderflow, t_, msg.str());
      }
    }
  }

 private:
  Eigen::VectorXd evaluate(double t, const Eigen::VectorXd& x) const {
    Eigen::VectorXd f = field_(t, x);
    if (f.size() != x.size()) {
      throw DimensionError("integrate_projected: field returned a vector of the wrong size");
    }
    if (!f.allFinite()) {
      std::ostringstream msg;
      msg << "integrate_projected: non-finite field value at t=" << t;
      throw IntegrationError(IntegrationError::Kind::NonFiniteField, t, msg.str());
    }
    return f;
  }

  const VectorField& field_;
  const Box& box_;
  StepConfig config_;
  double t_;
  double h_ = 0.0;
  Eigen::VectorXd x_;
  Eigen::VectorXd fx_;
};

}  // namespace

Trajectory integrate_projected(const VectorField& field, const Box& box, const Eigen::VectorXd& x0,
                               const StepConfig& config, double t0) {
  ProjectedStepper stepper(field, box, x0, t0, config);
  const double t_end = t0 + config.max_time;

  Trajectory traj;
  traj.times.push_back(stepper.time());
  traj.states.push_back(stepper.state());
  double last_recorded = stepper.time();

  while (stepper.time() < t_end) {
    stepper.advance(t_end);
    const bool last = stepper.time() >= t_end;
    if (last || config.output_interval <= 0.0 ||
        stepper.time() - last_recorded >= config.output_interval * (1.0 - 1e-9)) {
      traj.times.push_back(stepper.time());
      traj.states.push_back(stepper.state());
      last_recorded = stepper.time();
    }
  }
  return traj;
}

double projected_residual(const VectorField& field, const Box& box, const Eigen::VectorXd& x,
                          double t) {
  return project_tangent(x, field(t, x), box).lpNorm<Eigen::Infinity>();
}

SettleResult settle(const VectorField& field, const Box& box, const Eigen::VectorXd& x0,
                    double residual_tol, double max_time, StepConfig step) {
  if (!(residual_tol > 0)) throw DomainError("settle: residual_tol must be positive");
  step.max_time = max_time;
  ProjectedStepper stepper(field, box, x0, 0.0, step);

  SettleResult out;
  out.residual = stepper.residual();
  while (out.residual >= residual_tol && stepper.time() < max_time) {
    stepper.advance(max_time);
    out.residual = stepper.residual();
  }
  out.state = stepper.state();
  out.time = stepper.time();
  out.converged = out.residual < residual_tol;
  return out;
}

}  // namespace ofo
