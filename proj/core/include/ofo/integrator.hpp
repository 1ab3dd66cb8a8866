#pragma once

#include <Eigen/Core>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ofo/geometry.hpp"

namespace ofo {

/// Right-hand side F(t, x) of a projected dynamical system.
using VectorField = std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& x)>;

struct StepConfig {
  double initial_step = 1e-3;
  double max_step = 0.05;
  double error_tolerance = 1e-6;
  /// Integration horizon, measured from the start time.
  double max_time = 1.0;
  /// Minimum spacing between recorded samples; 0 records every accepted step.
  double output_interval = 0.0;
  /// Steps below this size abort with StepUnderflow.
  double min_step = 1e-13;

  void validate() const;
  bool operator==(const StepConfig&) const = default;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<std::string> labels;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  double final_time() const { return times.back(); }
  const Eigen::VectorXd& final_state() const { return states.back(); }
  /// One row per sample.
  Eigen::MatrixXd as_matrix() const;
  /// Linear interpolation between samples; clamps outside the time range.
  Eigen::VectorXd at(double t) const;
};

class IntegrationError : public std::runtime_error {
 public:
  enum class Kind { StepUnderflow, NonFiniteField };
  IntegrationError(Kind kind, double time, const std::string& message)
      : std::runtime_error(message), kind_(kind), time_(time) {}
  Kind kind() const { return kind_; }
  double time() const { return time_; }

 private:
  Kind kind_;
  double time_;
};

/// Integrates x' = Pi_box(x, F(t, x)) from `x0` at `t0` over `config.max_time`.
///
/// Every step is a projected explicit Euler step (Euler step of F, then
/// clamp onto the box). Step size is chosen by step doubling: a full step is
/// compared against two half steps. The accepted state is the projection of
/// the Richardson combination 2*half - full, which equals the explicit
/// midpoint rule away from the faces. Errors are measured per coordinate
/// relative to 1 + |x_i|.
Trajectory integrate_projected(const VectorField& field, const Box& box, const Eigen::VectorXd& x0,
                               const StepConfig& config, double t0 = 0.0);

struct SettleResult {
  Eigen::VectorXd state;
  double residual = 0.0;
  double time = 0.0;
  bool converged = false;
};

/// Projected residual ||Pi_box(x, F(t, x))||_inf.
double projected_residual(const VectorField& field, const Box& box, const Eigen::VectorXd& x,
                          double t = 0.0);

/// Integrates until the projected residual drops below `residual_tol`.
/// Running out of `max_time` is reported through `converged == false`.
SettleResult settle(const VectorField& field, const Box& box, const Eigen::VectorXd& x0,
                    double residual_tol, double max_time, StepConfig step = {});

}  // namespace ofo
