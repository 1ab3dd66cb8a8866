#include "ofo/control.hpp"

#include <algorithm>
#include <cmath>

#include "ofo/error.hpp"
#include "ofo/numdiff.hpp"

namespace ofo {

void OfoController::validate() const {
  if (!(alpha > 0) || !std::isfinite(alpha)) throw DomainError("OfoController: alpha must be positive");
  if (!box.is_compact()) throw DomainError("OfoController: input box must be compact");
  if (!sensitivity) throw std::invalid_argument("OfoController: sensitivity provider is required");
}

OfoController make_controller(double alpha, const Box& box, const PlantModel& plant,
                              const SensitivityOptions& options) {
  require_same_dimension(plant.input_dim, box.dimension(), "make_controller: input box");
  OfoController controller;
  controller.alpha = alpha;
  controller.box = box;
  if (!options.finite_difference && plant.sensitivity_map) {
    controller.sensitivity = plant.sensitivity_map;
  } else {
    controller.sensitivity = [plant, box, options](const Eigen::VectorXd& u) {
      return sensitivity(plant, u, box, options).jacobian;
    };
  }
  controller.validate();
  return controller;
}

Eigen::VectorXd ofo_field(const Eigen::VectorXd& u, const Eigen::VectorXd& y, const OfoController& controller,
                          const CostModel& cost) {
  require_same_dimension(cost.input_dim, u.size(), "ofo_field: u");
  require_same_dimension(cost.output_dim, y.size(), "ofo_field: y");
  const Eigen::MatrixXd sens = controller.sensitivity(u);
  if (sens.rows() != y.size() || sens.cols() != u.size()) {
    throw DimensionError("ofo_field: sensitivity has the wrong shape");
  }
  Eigen::VectorXd drift = -controller.alpha * (cost.grad_phi_u(u) + sens.transpose() * cost.grad_phi_y(y));
  if (!drift.allFinite()) throw DomainError("ofo_field: non-finite gradient");
  return drift;
}

Box ClosedLoopSystem::domain() const { return Box::product(Box::unbounded(plant.state_dim), controller.box); }

VectorField ClosedLoopSystem::field() const {
  const Eigen::Index n = plant.state_dim;
  const Eigen::Index m = plant.input_dim;
  return [plant = plant, controller = controller, cost = cost, n, m](double, const Eigen::VectorXd& omega) {
    const Eigen::VectorXd x = omega.head(n);
    const Eigen::VectorXd u = omega.tail(m);
    Eigen::VectorXd d(n + m);
    d.head(n) = plant.dynamics(x, u);
    d.tail(m) = ofo_field(u, plant.output(x), controller, cost);
    return d;
  };
}

Eigen::VectorXd ClosedLoopSystem::projected_field(const Eigen::VectorXd& omega) const {
  return project_tangent(omega, field()(0.0, omega), domain());
}

Eigen::VectorXd ClosedLoopSystem::compose(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  require_same_dimension(plant.state_dim, x.size(), "ClosedLoopSystem: x");
  require_same_dimension(plant.input_dim, u.size(), "ClosedLoopSystem: u");
  Eigen::VectorXd omega(x.size() + u.size());
  omega << x, u;
  return omega;
}

ClosedLoopSystem assemble_closed_loop(PlantModel plant, OfoController controller, CostModel cost) {
  plant.validate();
  controller.validate();
  cost.validate();
  require_same_dimension(plant.input_dim, controller.box.dimension(), "assemble_closed_loop: controller box");
  require_same_dimension(plant.input_dim, cost.input_dim, "assemble_closed_loop: cost input dimension");
  require_same_dimension(plant.output_dim, cost.output_dim, "assemble_closed_loop: cost output dimension");
  return ClosedLoopSystem{std::move(plant), std::move(controller), std::move(cost)};
}

std::size_t ClosedLoopTrajectory::last_index_of(std::size_t segment) const {
  const auto it = std::upper_bound(segments.begin(), segments.end(), segment);
  if (it == segments.begin()) throw DomainError("ClosedLoopTrajectory: no samples in segment");
  return static_cast<std::size_t>(it - segments.begin()) - 1;
}

double heuristic_max_step(const ClosedLoopSystem& system, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  const Eigen::VectorXd y = system.plant.output(x);
  const OfoController& ctrl = system.controller;
  const Eigen::MatrixXd jac = numdiff::jacobian(
      [&](const Eigen::VectorXd& up) -> Eigen::VectorXd { return ofo_field(up, y, ctrl, system.cost) / ctrl.alpha; },
      u);
  const double kappa = std::max(1.0, jac.cwiseAbs().rowwise().sum().maxCoeff());
  return 1.0 / (10.0 * ctrl.alpha * kappa);
}

namespace {

void append_samples(ClosedLoopTrajectory& out, const ClosedLoopSystem& system, const Trajectory& piece,
                    std::size_t segment, bool skip_first) {
  const Eigen::Index n = system.plant.state_dim;
  const Eigen::Index m = system.plant.input_dim;
  for (std::size_t i = skip_first ? 1 : 0; i < piece.size(); ++i) {
    const Eigen::VectorXd x = piece.states[i].head(n);
    out.times.push_back(piece.times[i]);
    out.states.push_back(x);
    out.inputs.push_back(piece.states[i].tail(m));
    out.outputs.push_back(system.plant.output(x));
    out.segments.push_back(segment);
  }
}

}  // namespace

ClosedLoopTrajectory simulate_closed_loop(const SystemFactory& factory, const Eigen::VectorXd& x0,
                                          const Eigen::VectorXd& u0, const Schedule& schedule,
                                          const StepConfig& step, bool automatic_max_step) {
  ClosedLoopTrajectory out;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd u = u0;
  for (std::size_t k = 0; k < schedule.segment_count(); ++k) {
    const ClosedLoopSystem system = factory(schedule.value(k));
    if (k == 0) {
      require_same_dimension(system.plant.state_dim, x0.size(), "simulate_closed_loop: x0");
      require_same_dimension(system.plant.input_dim, u0.size(), "simulate_closed_loop: u0");
      if (!system.controller.box.contains(u0, kBoxTolerance)) {
        throw DomainError("simulate_closed_loop: u0 lies outside the input box");
      }
      out.state_dim = system.plant.state_dim;
      out.input_dim = system.plant.input_dim;
      out.output_dim = system.plant.output_dim;
    }
    StepConfig cfg = step;
    cfg.max_time = schedule.segment_end(k) - schedule.segment_start(k);
    if (automatic_max_step) {
      cfg.max_step = std::min(cfg.max_step, heuristic_max_step(system, x, u));
      cfg.initial_step = std::min(cfg.initial_step, cfg.max_step);
    }
    const Trajectory piece =
        integrate_projected(system.field(), system.domain(), system.compose(x, u), cfg, schedule.segment_start(k));
    append_samples(out, system, piece, k, k > 0);
    x = piece.final_state().head(system.plant.state_dim);
    u = piece.final_state().tail(system.plant.input_dim);
  }
  return out;
}

ClosedLoopTrajectory simulate_closed_loop(const ClosedLoopSystem& system, const Eigen::VectorXd& x0,
                                          const Eigen::VectorXd& u0, double horizon, const StepConfig& step,
                                          bool automatic_max_step) {
  const Schedule schedule = Schedule::constant(Eigen::VectorXd::Zero(1), horizon);
  return simulate_closed_loop([&](const Eigen::VectorXd&) { return system; }, x0, u0, schedule, step,
                              automatic_max_step);
}

Eigen::VectorXd reduced_gradient(const CostModel& cost, const SteadyStateOracle& oracle, const Eigen::VectorXd& u) {
  const Eigen::VectorXd y = oracle.k_y(u);
  return cost.grad_phi_u(u) + oracle.grad_k_y(u).transpose() * cost.grad_phi_y(y);
}

double projected_gradient_residual(const CostModel& cost, const SteadyStateOracle& oracle, const Box& box,
                                   const Eigen::VectorXd& u) {
  return project_tangent(u, -reduced_gradient(cost, oracle, u), box).lpNorm<Eigen::Infinity>();
}

Trajectory gradient_flow_reference(const CostModel& cost, const SteadyStateOracle& oracle, const Box& box,
                                   double alpha, const Eigen::VectorXd& u0, const StepConfig& step) {
  if (!(alpha > 0)) throw DomainError("gradient_flow_reference: alpha must be positive");
  if (!box.is_compact()) throw DomainError("gradient_flow_reference: box must be compact");
  const VectorField field = [&](double, const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return -alpha * reduced_gradient(cost, oracle, u);
  };
  Trajectory traj = integrate_projected(field, box, u0, step);
  traj.labels.clear();
  for (Eigen::Index i = 0; i < u0.size(); ++i) traj.labels.push_back("u_" + std::to_string(i));
  return traj;
}

}  // namespace ofo
