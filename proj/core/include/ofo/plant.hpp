#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ofo/geometry.hpp"
#include "ofo/integrator.hpp"

namespace ofo {

using StateInputMap = std::function<Eigen::VectorXd(const Eigen::VectorXd& x, const Eigen::VectorXd& u)>;
using StateInputJacobian =
    std::function<Eigen::MatrixXd(const Eigen::VectorXd& x, const Eigen::VectorXd& u)>;
using VectorMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using MatrixMap = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Where a computed quantity came from.
enum class Provenance { Analytic, Simulated, FiniteDifference };
const char* to_string(Provenance provenance);

/// k_y(u) = S u + s.
struct AffineSteadyState {
  Eigen::MatrixXd S;
  Eigen::VectorXd s;
};

/// Plant x' = f(x, u), y = g(x) with optional analytic derivative and
/// steady-state information. Only `dynamics` and `output` are required.
struct PlantModel {
  std::string name;
  Eigen::Index state_dim = 0;
  Eigen::Index input_dim = 0;
  Eigen::Index output_dim = 0;

  StateInputMap dynamics;
  VectorMap output;

  StateInputJacobian jacobian_x;
  StateInputJacobian jacobian_u;
  MatrixMap output_jacobian;

  VectorMap steady_state_map;   // k_x
  VectorMap steady_output_map;  // k_y
  MatrixMap sensitivity_map;    // grad k_y, p x m
  std::optional<AffineSteadyState> affine;

  /// Region used for sampling checks and as the default settling start.
  std::optional<Box> state_region;

  void validate() const;

  Eigen::MatrixXd state_jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
  Eigen::MatrixXd input_jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
  Eigen::MatrixXd output_map_jacobian(const Eigen::VectorXd& x) const;
};

struct LtiMatrices {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  /// Disturbance input matrix; may have zero columns.
  Eigen::MatrixXd Bw;

  bool operator==(const LtiMatrices& other) const;
};

/// x' = A x + B u + Bw w, y = C x with constant disturbance `w`. Steady-state
/// maps are computed from a linear solve with A (which must be invertible).
PlantModel make_lti_plant(const LtiMatrices& matrices, const Eigen::VectorXd& w,
                          std::optional<Box> state_region = std::nullopt);

/// Two-state gene expression model:
///   x1' = u - gamma1 x1
///   x2' = theta2 x1 - gamma2 x2 / (theta1 + x2),   y = x2.
struct GeneParameters {
  double theta1 = 750.0;
  double theta2 = 0.58;
  double gamma1 = 4.02;
  double gamma2 = 37.5;

  bool operator==(const GeneParameters&) const = default;
};

PlantModel make_gene_plant(const GeneParameters& params, std::optional<Box> state_region = std::nullopt);

struct SteadyStateOptions {
  /// Residual ||f(x, u)||_inf accepted as settled.
  double tol = 1e-9;
  double max_time = 1e4;
  /// Start of the settling simulation; defaults to the state-region midpoint.
  std::optional<Eigen::VectorXd> x0;
  /// Use k_x when the plant provides it.
  bool use_analytic = true;
  StepConfig step{1e-3, 0.1, 1e-6, 1.0, 0.0, 1e-13};
};

struct SteadyState {
  Eigen::VectorXd state;
  Provenance provenance = Provenance::Analytic;
  double residual = 0.0;
};

SteadyState steady_state(const PlantModel& plant, const Eigen::VectorXd& u,
                         const SteadyStateOptions& options = {});

struct SteadyOutput {
  Eigen::VectorXd output;
  Provenance provenance = Provenance::Analytic;
};

SteadyOutput steady_output(const PlantModel& plant, const Eigen::VectorXd& u,
                           const SteadyStateOptions& options = {});

struct SensitivityOptions {
  /// Ignore the analytic sensitivity and difference k_y instead.
  bool finite_difference = false;
  double relative_step = 1e-5;
  /// Probes may leave the input box by this fraction of its width.
  double inflation = 0.01;
  SteadyStateOptions steady;
};

struct Sensitivity {
  Eigen::MatrixXd jacobian;
  Provenance provenance = Provenance::Analytic;
};

Sensitivity sensitivity(const PlantModel& plant, const Eigen::VectorXd& u, const Box& input_box,
                        const SensitivityOptions& options = {});

/// Steady-state maps packaged as plain callables, as consumed by the
/// optimisation and certification routines.
struct SteadyStateOracle {
  VectorMap k_x;
  VectorMap k_y;
  MatrixMap grad_k_y;
  std::optional<AffineSteadyState> affine;
  Provenance k_y_provenance = Provenance::Analytic;
  Provenance sensitivity_provenance = Provenance::Analytic;
};

SteadyStateOracle make_oracle(const PlantModel& plant, const Box& input_box,
                              const SensitivityOptions& options = {});

// --- Monotonicity -----------------------------------------------------------

struct MonotoneOrders {
  OrthantOrder input;
  OrthantOrder state;
  OrthantOrder output;

  static MonotoneOrders standard(const PlantModel& plant);
};

enum class MonotoneCondition { StateCoupling, InputCoupling, OutputMap };
const char* to_string(MonotoneCondition condition);

struct MonotoneViolation {
  Eigen::VectorXd x;
  Eigen::VectorXd u;
  MonotoneCondition condition = MonotoneCondition::StateCoupling;
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  /// Signed partial derivative (already multiplied by the order signs).
  double value = 0.0;
};

struct MonotonicityReport {
  bool satisfied = true;
  std::vector<MonotoneViolation> violations;
  std::size_t samples_checked = 0;
};

struct StateInputSample {
  Eigen::VectorXd x;
  Eigen::VectorXd u;
};

/// Tensor grid over states x inputs plus `random_count` uniform samples.
std::vector<StateInputSample> make_sample_grid(const Box& states, const Box& inputs,
                                               int points_per_axis, std::size_t random_count,
                                               std::uint64_t seed);

/// Sampled sign test of the Kamke-type conditions: off-diagonal df/dx,
/// df/du and dg/dx must be nonnegative (after applying the order signs).
MonotonicityReport check_monotone(const PlantModel& plant, const std::vector<StateInputSample>& samples,
                                  const std::optional<MonotoneOrders>& orders = std::nullopt,
                                  double sign_tolerance = 1e-10);

/// A Metzler, every B and C entrywise nonnegative.
bool check_metzler(const Eigen::MatrixXd& A, const std::vector<Eigen::MatrixXd>& Bs,
                   const Eigen::MatrixXd& C);

using InputSignal = std::function<Eigen::VectorXd(double t)>;

/// Pair of experiments with x0_upper >= x0_lower and u_upper(t) >= u_lower(t).
struct OrderTrial {
  Eigen::VectorXd x0_upper;
  Eigen::VectorXd x0_lower;
  InputSignal u_upper;
  InputSignal u_lower;
};

struct OrderViolation {
  std::size_t trial = 0;
  double time = 0.0;
  bool in_output = false;
  double margin = 0.0;
};

struct OrderPreservationReport {
  bool satisfied = true;
  std::size_t trials_checked = 0;
  std::size_t samples_checked = 0;
  std::vector<OrderViolation> violations;
};

/// Simulates both experiments of each trial on one shared time grid and checks
/// the state order and the output order at every sample.
OrderPreservationReport test_order_preservation(const PlantModel& plant,
                                                const std::vector<OrderTrial>& trials,
                                                const MonotoneOrders& orders,
                                                const StepConfig& config, double tolerance = 1e-7);

}  // namespace ofo
