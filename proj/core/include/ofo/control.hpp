#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "ofo/cost.hpp"
#include "ofo/geometry.hpp"
#include "ofo/integrator.hpp"
#include "ofo/plant.hpp"
#include "ofo/schedule.hpp"

namespace ofo {

/// Online feedback optimisation controller
///   u' = Pi_U(u, -alpha [grad Phi_u(u) + grad k_y(u)' grad Phi_y(y)])
/// driven by the measured output y. Only the sensitivity grad k_y is
/// model information; it is evaluated at the current input.
struct OfoController {
  double alpha = 1.0;
  Box box = Box::interval(0.0, 1.0);
  MatrixMap sensitivity;

  void validate() const;
};

/// Controller whose sensitivity comes from the plant (analytic when
/// available, finite differences of k_y otherwise).
OfoController make_controller(double alpha, const Box& box, const PlantModel& plant,
                              const SensitivityOptions& options = {});

/// Pre-projection drift of the controller at (u, y).
Eigen::VectorXd ofo_field(const Eigen::VectorXd& u, const Eigen::VectorXd& y, const OfoController& controller,
                          const CostModel& cost);

/// Plant and controller in feedback, with composed state omega = (x, u) on
/// R^n x U.
struct ClosedLoopSystem {
  PlantModel plant;
  OfoController controller;
  CostModel cost;

  Eigen::Index dimension() const { return plant.state_dim + plant.input_dim; }
  Box domain() const;
  /// Unprojected drift (f(x, u), ofo_field(u, g(x))); the integrator projects.
  VectorField field() const;
  /// Drift with the u-block projected on the tangent cone of U.
  Eigen::VectorXd projected_field(const Eigen::VectorXd& omega) const;

  Eigen::VectorXd compose(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
};

ClosedLoopSystem assemble_closed_loop(PlantModel plant, OfoController controller, CostModel cost);

struct ClosedLoopTrajectory {
  Eigen::Index state_dim = 0;
  Eigen::Index input_dim = 0;
  Eigen::Index output_dim = 0;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> inputs;
  std::vector<Eigen::VectorXd> outputs;
  /// Schedule segment of each sample.
  std::vector<std::size_t> segments;

  std::size_t size() const { return times.size(); }
  /// Index of the last sample belonging to `segment`.
  std::size_t last_index_of(std::size_t segment) const;
};

/// Builds the closed loop for one value of the exogenous schedule (w, y_ref, ...).
using SystemFactory = std::function<ClosedLoopSystem(const Eigen::VectorXd& exogenous)>;

/// Max step 1/(10 alpha kappa), kappa = max(1, ||d(drift/alpha)/du||_inf) at (x, u).
double heuristic_max_step(const ClosedLoopSystem& system, const Eigen::VectorXd& x, const Eigen::VectorXd& u);

/// Integrates the closed loop across the schedule. Switching segments swaps
/// the exogenous values but keeps the state. `step.max_time` is ignored (the
/// schedule sets the horizon); with `automatic_max_step` the step cap is
/// tightened to heuristic_max_step for each segment.
ClosedLoopTrajectory simulate_closed_loop(const SystemFactory& factory, const Eigen::VectorXd& x0,
                                          const Eigen::VectorXd& u0, const Schedule& schedule,
                                          const StepConfig& step, bool automatic_max_step = true);

ClosedLoopTrajectory simulate_closed_loop(const ClosedLoopSystem& system, const Eigen::VectorXd& x0,
                                          const Eigen::VectorXd& u0, double horizon, const StepConfig& step,
                                          bool automatic_max_step = true);

/// grad of the reduced cost Phi(u, k_y(u)).
Eigen::VectorXd reduced_gradient(const CostModel& cost, const SteadyStateOracle& oracle, const Eigen::VectorXd& u);

/// ||Pi_U(u, -grad Phi~(u))||_inf; zero exactly at critical points over U.
double projected_gradient_residual(const CostModel& cost, const SteadyStateOracle& oracle, const Box& box,
                                   const Eigen::VectorXd& u);

/// Model-based projected gradient flow u' = Pi_U(u, -alpha grad Phi~(u)),
/// i.e. the controller with the plant replaced by its steady-state map.
Trajectory gradient_flow_reference(const CostModel& cost, const SteadyStateOracle& oracle, const Box& box,
                                   double alpha, const Eigen::VectorXd& u0, const StepConfig& step);

}  // namespace ofo
