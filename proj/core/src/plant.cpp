#include "ofo/plant.hpp"

#include <Eigen/LU>
#include <random>
#include <sstream>

#include "ofo/error.hpp"
#include "ofo/numdiff.hpp"

namespace ofo {

const char* to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::Analytic: return "analytic";
    case Provenance::Simulated: return "simulated";
    case Provenance::FiniteDifference: return "finite-difference";
  }
  return "unknown";
}

const char* to_string(MonotoneCondition condition) {
  switch (condition) {
    case MonotoneCondition::StateCoupling: return "df_i/dx_j (i != j)";
    case MonotoneCondition::InputCoupling: return "df_i/du_j";
    case MonotoneCondition::OutputMap: return "dg_l/dx_i";
  }
  return "unknown";
}

void PlantModel::validate() const {
  if (state_dim <= 0 || input_dim <= 0 || output_dim <= 0) {
    throw DimensionError("PlantModel '" + name + "': dimensions must be positive");
  }
  if (!dynamics || !output) {
    throw std::invalid_argument("PlantModel '" + name + "': dynamics and output are required");
  }
  if (state_region) require_same_dimension(state_dim, state_region->dimension(), "PlantModel state region");
  if (affine) {
    if (affine->S.rows() != output_dim || affine->S.cols() != input_dim || affine->s.size() != output_dim) {
      throw DimensionError("PlantModel '" + name + "': affine steady-state data has the wrong shape");
    }
  }
}

Eigen::MatrixXd PlantModel::state_jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  if (jacobian_x) return jacobian_x(x, u);
  return numdiff::jacobian([&](const Eigen::VectorXd& xp) { return dynamics(xp, u); }, x);
}

Eigen::MatrixXd PlantModel::input_jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  if (jacobian_u) return jacobian_u(x, u);
  return numdiff::jacobian([&](const Eigen::VectorXd& up) { return dynamics(x, up); }, u);
}

Eigen::MatrixXd PlantModel::output_map_jacobian(const Eigen::VectorXd& x) const {
  if (output_jacobian) return output_jacobian(x);
  return numdiff::jacobian(output, x);
}

bool LtiMatrices::operator==(const LtiMatrices& other) const {
  auto same = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
  };
  return same(A, other.A) && same(B, other.B) && same(C, other.C) && same(Bw, other.Bw);
}

PlantModel make_lti_plant(const LtiMatrices& mats, const Eigen::VectorXd& w, std::optional<Box> state_region) {
  const Eigen::Index n = mats.A.rows();
  if (mats.A.cols() != n) throw DimensionError("make_lti_plant: A must be square");
  require_same_dimension(n, mats.B.rows(), "make_lti_plant: rows of B");
  require_same_dimension(n, mats.C.cols(), "make_lti_plant: columns of C");
  const Eigen::MatrixXd Bw = mats.Bw.size() == 0 ? Eigen::MatrixXd(n, 0) : mats.Bw;
  require_same_dimension(n, Bw.rows(), "make_lti_plant: rows of Bw");
  require_same_dimension(Bw.cols(), w.size(), "make_lti_plant: disturbance");

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(mats.A);
  if (!lu.isInvertible()) throw DomainError("make_lti_plant: A is singular, no steady-state map");

  const Eigen::MatrixXd A = mats.A;
  const Eigen::MatrixXd B = mats.B;
  const Eigen::MatrixXd C = mats.C;
  const Eigen::VectorXd dist = Bw.cols() > 0 ? Eigen::VectorXd(Bw * w) : Eigen::VectorXd::Zero(n);

  const Eigen::MatrixXd gain_x = -lu.solve(B);     // k_x(u) = gain_x u + offset_x
  const Eigen::VectorXd offset_x = -lu.solve(dist);

  PlantModel plant;
  plant.name = "lti";
  plant.state_dim = n;
  plant.input_dim = B.cols();
  plant.output_dim = C.rows();
  plant.dynamics = [A, B, dist](const Eigen::VectorXd& x, const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return A * x + B * u + dist;
  };
  plant.output = [C](const Eigen::VectorXd& x) -> Eigen::VectorXd { return C * x; };
  plant.jacobian_x = [A](const Eigen::VectorXd&, const Eigen::VectorXd&) -> Eigen::MatrixXd { return A; };
  plant.jacobian_u = [B](const Eigen::VectorXd&, const Eigen::VectorXd&) -> Eigen::MatrixXd { return B; };
  plant.output_jacobian = [C](const Eigen::VectorXd&) -> Eigen::MatrixXd { return C; };
  plant.steady_state_map = [gain_x, offset_x](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return gain_x * u + offset_x;
  };

  AffineSteadyState affine{C * gain_x, C * offset_x};
  plant.steady_output_map = [affine](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return affine.S * u + affine.s;
  };
  plant.sensitivity_map = [S = affine.S](const Eigen::VectorXd&) -> Eigen::MatrixXd { return S; };
  plant.affine = std::move(affine);
  plant.state_region = std::move(state_region);
  plant.validate();
  return plant;
}

PlantModel make_gene_plant(const GeneParameters& p, std::optional<Box> state_region) {
  if (!(p.theta1 > 0 && p.theta2 > 0 && p.gamma1 > 0 && p.gamma2 > 0)) {
    throw DomainError("make_gene_plant: parameters must be positive");
  }
  const double num = p.theta1 * p.theta2;  // k_y(u) = num u / (den - theta2 u)
  const double den = p.gamma1 * p.gamma2;
  auto check_input = [den, p](double u) {
    if (!(p.theta2 * u < den)) {
      std::ostringstream msg;
      msg << "gene plant: no steady state for u=" << u << " (requires u < " << den / p.theta2 << ")";
      throw DomainError(msg.str());
    }
  };

  PlantModel plant;
  plant.name = "gene";
  plant.state_dim = 2;
  plant.input_dim = 1;
  plant.output_dim = 1;
  plant.dynamics = [p](const Eigen::VectorXd& x, const Eigen::VectorXd& u) -> Eigen::VectorXd {
    Eigen::VectorXd dx(2);
    dx[0] = u[0] - p.gamma1 * x[0];
    dx[1] = p.theta2 * x[0] - p.gamma2 * x[1] / (p.theta1 + x[1]);
    return dx;
  };
  plant.output = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x.tail<1>(); };
  plant.jacobian_x = [p](const Eigen::VectorXd& x, const Eigen::VectorXd&) -> Eigen::MatrixXd {
    Eigen::MatrixXd J(2, 2);
    const double d = p.theta1 + x[1];
    J << -p.gamma1, 0.0, p.theta2, -p.gamma2 * p.theta1 / (d * d);
    return J;
  };
  plant.jacobian_u = [](const Eigen::VectorXd&, const Eigen::VectorXd&) -> Eigen::MatrixXd {
    return Eigen::Vector2d(1.0, 0.0);
  };
  plant.output_jacobian = [](const Eigen::VectorXd&) -> Eigen::MatrixXd {
    return Eigen::RowVector2d(0.0, 1.0);
  };
  plant.steady_state_map = [p, num, den, check_input](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    check_input(u[0]);
    return Eigen::Vector2d(u[0] / p.gamma1, num * u[0] / (den - p.theta2 * u[0]));
  };
  plant.steady_output_map = [p, num, den, check_input](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    check_input(u[0]);
    return Eigen::VectorXd::Constant(1, num * u[0] / (den - p.theta2 * u[0]));
  };
  plant.sensitivity_map = [p, num, den, check_input](const Eigen::VectorXd& u) -> Eigen::MatrixXd {
    check_input(u[0]);
    const double q = den - p.theta2 * u[0];
    return Eigen::MatrixXd::Constant(1, 1, num * den / (q * q));
  };
  plant.state_region = std::move(state_region);
  plant.validate();
  return plant;
}

SteadyState steady_state(const PlantModel& plant, const Eigen::VectorXd& u, const SteadyStateOptions& options) {
  require_same_dimension(plant.input_dim, u.size(), "steady_state: u");
  if (options.use_analytic && plant.steady_state_map) {
    SteadyState out;
    out.state = plant.steady_state_map(u);
    out.provenance = Provenance::Analytic;
    out.residual = plant.dynamics(out.state, u).lpNorm<Eigen::Infinity>();
    return out;
  }

  Eigen::VectorXd x0;
  if (options.x0) {
    x0 = *options.x0;
  } else if (plant.state_region) {
    x0 = plant.state_region->midpoint();
  } else {
    x0 = Eigen::VectorXd::Zero(plant.state_dim);
  }
  require_same_dimension(plant.state_dim, x0.size(), "steady_state: x0");

  const VectorField field = [&](double, const Eigen::VectorXd& x) { return plant.dynamics(x, u); };
  const SettleResult settled =
      settle(field, Box::unbounded(plant.state_dim), x0, options.tol, options.max_time, options.step);
  if (!settled.converged) {
    std::ostringstream msg;
    msg << "steady_state: plant '" << plant.name << "' did not settle within t=" << options.max_time
        << " (residual " << settled.residual << ")";
    throw ConvergenceError(msg.str());
  }
  return {settled.state, Provenance::Simulated, settled.residual};
}

SteadyOutput steady_output(const PlantModel& plant, const Eigen::VectorXd& u, const SteadyStateOptions& options) {
  if (options.use_analytic && plant.steady_output_map) {
    require_same_dimension(plant.input_dim, u.size(), "steady_output: u");
    return {plant.steady_output_map(u), Provenance::Analytic};
  }
  const SteadyState ss = steady_state(plant, u, options);
  return {plant.output(ss.state), ss.provenance};
}

Sensitivity sensitivity(const PlantModel& plant, const Eigen::VectorXd& u, const Box& input_box,
                        const SensitivityOptions& options) {
  require_same_dimension(plant.input_dim, u.size(), "sensitivity: u");
  require_same_dimension(plant.input_dim, input_box.dimension(), "sensitivity: input box");
  if (!options.finite_difference && plant.sensitivity_map) {
    return {plant.sensitivity_map(u), Provenance::Analytic};
  }

  const Box probes = input_box.inflated(options.inflation);
  Eigen::MatrixXd jac(plant.output_dim, plant.input_dim);
  Eigen::VectorXd probe = u;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    const double h = numdiff::probe_step(u[j], options.relative_step);
    const double up = std::min(u[j] + h, probes.upper()[j]);
    const double down = std::max(u[j] - h, probes.lower()[j]);
    probe[j] = up;
    const Eigen::VectorXd y_up = steady_output(plant, probe, options.steady).output;
    probe[j] = down;
    const Eigen::VectorXd y_down = steady_output(plant, probe, options.steady).output;
    probe[j] = u[j];
    jac.col(j) = (y_up - y_down) / (up - down);
  }
  return {jac, Provenance::FiniteDifference};
}

SteadyStateOracle make_oracle(const PlantModel& plant, const Box& input_box, const SensitivityOptions& options) {
  plant.validate();
  SteadyStateOracle oracle;
  oracle.k_x = [plant, options](const Eigen::VectorXd& u) { return steady_state(plant, u, options.steady).state; };
  oracle.k_y = [plant, options](const Eigen::VectorXd& u) { return steady_output(plant, u, options.steady).output; };
  oracle.grad_k_y = [plant, input_box, options](const Eigen::VectorXd& u) {
    return sensitivity(plant, u, input_box, options).jacobian;
  };
  const bool analytic_ky = options.steady.use_analytic && plant.steady_output_map;
  oracle.k_y_provenance = analytic_ky ? Provenance::Analytic : Provenance::Simulated;
  oracle.sensitivity_provenance =
      (!options.finite_difference && plant.sensitivity_map) ? Provenance::Analytic : Provenance::FiniteDifference;
  if (analytic_ky) oracle.affine = plant.affine;
  return oracle;
}

MonotoneOrders MonotoneOrders::standard(const PlantModel& plant) {
  return {OrthantOrder::standard(plant.input_dim), OrthantOrder::standard(plant.state_dim),
          OrthantOrder::standard(plant.output_dim)};
}

std::vector<StateInputSample> make_sample_grid(const Box& states, const Box& inputs, int points_per_axis,
                                               std::size_t random_count, std::uint64_t seed) {
  const Box joint = Box::product(states, inputs);
  const Eigen::Index n = states.dimension();
  const Eigen::Index m = inputs.dimension();
  std::vector<StateInputSample> out;
  if (points_per_axis > 0) {
    for (const Eigen::VectorXd& p : joint.grid(points_per_axis)) out.push_back({p.head(n), p.tail(m)});
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < random_count; ++k) {
    Eigen::VectorXd p(n + m);
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      p[i] = joint.lower()[i] + unit(rng) * (joint.upper()[i] - joint.lower()[i]);
    }
    out.push_back({p.head(n), p.tail(m)});
  }
  return out;
}

MonotonicityReport check_monotone(const PlantModel& plant, const std::vector<StateInputSample>& samples,
                                  const std::optional<MonotoneOrders>& orders_opt, double sign_tolerance) {
  plant.validate();
  const MonotoneOrders orders = orders_opt ? *orders_opt : MonotoneOrders::standard(plant);
  require_same_dimension(plant.state_dim, orders.state.dimension(), "check_monotone: state order");
  require_same_dimension(plant.input_dim, orders.input.dimension(), "check_monotone: input order");
  require_same_dimension(plant.output_dim, orders.output.dimension(), "check_monotone: output order");
  const auto& sx = orders.state.signs();
  const auto& su = orders.input.signs();
  const auto& sy = orders.output.signs();

  MonotonicityReport report;
  for (const StateInputSample& sample : samples) {
    const Eigen::MatrixXd fx = plant.state_jacobian(sample.x, sample.u);
    const Eigen::MatrixXd fu = plant.input_jacobian(sample.x, sample.u);
    const Eigen::MatrixXd gx = plant.output_map_jacobian(sample.x);
    auto record = [&](MonotoneCondition cond, Eigen::Index r, Eigen::Index c, double value) {
      if (value < -sign_tolerance) report.violations.push_back({sample.x, sample.u, cond, r, c, value});
    };
    for (Eigen::Index i = 0; i < plant.state_dim; ++i) {
      const auto si = static_cast<std::size_t>(i);
      for (Eigen::Index j = 0; j < plant.state_dim; ++j) {
        if (i != j) record(MonotoneCondition::StateCoupling, i, j, sx[si] * sx[static_cast<std::size_t>(j)] * fx(i, j));
      }
      for (Eigen::Index j = 0; j < plant.input_dim; ++j) {
        record(MonotoneCondition::InputCoupling, i, j, sx[si] * su[static_cast<std::size_t>(j)] * fu(i, j));
      }
    }
    for (Eigen::Index l = 0; l < plant.output_dim; ++l) {
      for (Eigen::Index i = 0; i < plant.state_dim; ++i) {
        record(MonotoneCondition::OutputMap, l, i,
               sy[static_cast<std::size_t>(l)] * sx[static_cast<std::size_t>(i)] * gx(l, i));
      }
    }
    ++report.samples_checked;
  }
  report.satisfied = report.violations.empty();
  return report;
}

bool check_metzler(const Eigen::MatrixXd& A, const std::vector<Eigen::MatrixXd>& Bs, const Eigen::MatrixXd& C) {
  if (A.rows() != A.cols()) throw DimensionError("check_metzler: A must be square");
  for (const Eigen::MatrixXd& B : Bs) require_same_dimension(A.rows(), B.rows(), "check_metzler: rows of B");
  require_same_dimension(A.rows(), C.cols(), "check_metzler: columns of C");
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (i != j && A(i, j) < 0) return false;
    }
  }
  for (const Eigen::MatrixXd& B : Bs) {
    if (B.size() > 0 && B.minCoeff() < 0) return false;
  }
  return C.size() == 0 || C.minCoeff() >= 0;
}

OrderPreservationReport test_order_preservation(const PlantModel& plant, const std::vector<OrderTrial>& trials,
                                                const MonotoneOrders& orders, const StepConfig& config,
                                                double tolerance) {
  plant.validate();
  const Eigen::Index n = plant.state_dim;
  OrderPreservationReport report;

  for (std::size_t k = 0; k < trials.size(); ++k) {
    const OrderTrial& trial = trials[k];
    if (!orthant_leq(trial.x0_lower, trial.x0_upper, orders.state)) {
      throw DomainError("test_order_preservation: initial conditions are not ordered");
    }
    const VectorField field = [&](double t, const Eigen::VectorXd& z) {
      Eigen::VectorXd dz(2 * n);
      dz.head(n) = plant.dynamics(z.head(n), trial.u_upper(t));
      dz.tail(n) = plant.dynamics(z.tail(n), trial.u_lower(t));
      return dz;
    };
    Eigen::VectorXd z0(2 * n);
    z0 << trial.x0_upper, trial.x0_lower;
    const Trajectory traj = integrate_projected(field, Box::unbounded(2 * n), z0, config);

    for (std::size_t s = 0; s < traj.size(); ++s) {
      const double t = traj.times[s];
      if (orders.input.margin(trial.u_lower(t), trial.u_upper(t)) < 0) {
        throw DomainError("test_order_preservation: input signals are not ordered");
      }
      const Eigen::VectorXd hi = traj.states[s].head(n);
      const Eigen::VectorXd lo = traj.states[s].tail(n);
      const double state_margin = orders.state.margin(lo, hi);
      if (state_margin < -tolerance) report.violations.push_back({k, t, false, state_margin});
      const double output_margin = orders.output.margin(plant.output(lo), plant.output(hi));
      if (output_margin < -tolerance) report.violations.push_back({k, t, true, output_margin});
      ++report.samples_checked;
    }
    ++report.trials_checked;
  }
  report.satisfied = report.violations.empty();
  return report;
}

}  // namespace ofo
