#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ofo/box_minimizer.hpp"
#include "ofo/cost.hpp"
#include "ofo/geometry.hpp"
#include "ofo/plant.hpp"

namespace ofo {

// Certification of the small-gain assumptions behind gain-independent
// convergence of the OFO loop. Sampled checks can refute a condition but only
// support it; every sampled verdict is flagged as such in the report.

enum class ControllerMonotonicity { Lemma2i, Lemma2ii, Lemma5Sampled, NotEstablished };
enum class ControllerSteadyState { Lemma3i, Lemma3ii, NotEstablished };
enum class SmallGain { Lemma4, Corollary1, Iteration, NotEstablished };

const char* to_string(ControllerMonotonicity verdict);
const char* to_string(ControllerSteadyState verdict);
const char* to_string(SmallGain verdict);

/// Psi(u) = Phi_u(u) + k_y(u)' grad Phi_y(anchor_output), minimised over the box.
///
/// With quadratic Phi_u = beta_u u'u and affine k_y the minimiser is the
/// clamp of -S' c / (2 beta_u) and is computed in closed form.
BoxMinimizerResult surrogate_argmin(const CostModel& cost, const SteadyStateOracle& oracle,
                                    const Eigen::VectorXd& anchor_output, const Box& box,
                                    const BoxMinimizerOptions& options = {});

/// One step of the small-gain map: the surrogate anchored at y = k_y(anchor_input).
BoxMinimizerResult surrogate_argmin_at_input(const CostModel& cost, const SteadyStateOracle& oracle,
                                             const Eigen::VectorXd& anchor_input, const Box& box,
                                             const BoxMinimizerOptions& options = {});

struct SmallGainResult {
  std::vector<Eigen::VectorXd> iterates;
  Eigen::VectorXd fixed_point;
  bool converged = false;
  /// Geometric rate fitted on the tail of ||u_n - u*||; NaN when too few points.
  double empirical_rate = std::numeric_limits<double>::quiet_NaN();
  std::string failure;
};

/// Iterates u_{n+1} = argmin_U Phi_u(u) + k_y(u)' grad Phi_y(k_y(u_n)) until
/// consecutive iterates differ by less than `tol` (inf-norm).
SmallGainResult small_gain_iterate(const CostModel& cost, const SteadyStateOracle& oracle, const Box& box,
                                   const Eigen::VectorXd& u0, int max_iters = 10000, double tol = 1e-10,
                                   const BoxMinimizerOptions& options = {});

/// Least-squares slope of log ||u_n - u*|| over the tail half of the iterates
/// whose error is above `floor`, returned as exp(slope).
double fit_geometric_rate(const std::vector<Eigen::VectorXd>& iterates, const Eigen::VectorXd& limit,
                          double floor = 1e-7);

struct CertificationSamples {
  std::vector<Eigen::VectorXd> inputs;
  std::vector<Eigen::VectorXd> states;
};

struct Lemma2Result {
  ControllerMonotonicity verdict = ControllerMonotonicity::NotEstablished;
  std::string note;
};

/// (i) SISO plant with Phi_y convex on the sampled outputs; (ii) affine k_y
/// with S >= 0, Hessian of Phi_u with nonpositive off-diagonals and Hessian of
/// Phi_y entrywise nonnegative on the samples.
Lemma2Result check_lemma2(const PlantModel& plant, const CostModel& cost, const CertificationSamples& samples,
                          double tol = 1e-10);

/// (v, x) and (v', x') with v <= v' and x >= x'.
struct OrderedPair {
  Eigen::VectorXd v;
  Eigen::VectorXd x;
  Eigen::VectorXd v_prime;
  Eigen::VectorXd x_prime;
};

/// Random ordered pairs; roughly half of the input coordinates are tied so
/// that the tangent-cone condition is binding there.
std::vector<OrderedPair> make_ordered_pairs(const Box& inputs, const Box& states, std::size_t count,
                                            std::uint64_t seed);

struct Lemma5Result {
  bool satisfied = true;
  std::size_t pairs_checked = 0;
  std::size_t binding_components = 0;
  std::size_t violations = 0;
  /// Largest positive component found where a nonpositive one was required.
  double worst = 0.0;
};

/// q(v, x) = -grad Phi_u(v) - grad k_y(v)' grad Phi_y(g(x)); checks that
/// q(v,x) - q(v',x') lies in the tangent cone of the nonpositive orthant at
/// v - v', i.e. is <= 0 on every tied coordinate v_i = v'_i.
Lemma5Result check_lemma5_sampled(const CostModel& cost, const SteadyStateOracle& oracle, const PlantModel& plant,
                                  const std::vector<OrderedPair>& pairs, double tol = 1e-10);

struct Lemma3Result {
  ControllerSteadyState verdict = ControllerSteadyState::NotEstablished;
  /// Smallest sampled eigenvalue of the relevant Hessian.
  double modulus = std::numeric_limits<double>::quiet_NaN();
  bool sampled = true;
  std::string note;
};

/// (ii) affine k_y and Phi_u strictly convex on the input samples; otherwise
/// (i) strong convexity in v of Psi(v, x) = Phi_u(v) + k_y(v)' grad Phi_y(g(x))
/// over inputs x states.
Lemma3Result check_lemma3(const CostModel& cost, const SteadyStateOracle& oracle, const PlantModel& plant,
                          const CertificationSamples& samples);

struct ConstantEstimate {
  double mu = std::numeric_limits<double>::quiet_NaN();
  double ell = std::numeric_limits<double>::quiet_NaN();
  double sigma = std::numeric_limits<double>::quiet_NaN();
  double eta = std::numeric_limits<double>::quiet_NaN();
  std::string mu_source;
  std::string ell_source;
  std::string sigma_source;
  std::string eta_source;

  /// ell / mu, NaN unless both are set.
  double contraction() const;
};

/// mu: curvature of u -> Psi~(u, ubar); ell: Lipschitz constant of
/// ubar -> grad_u Psi~(u, ubar) (supremum over u); sigma: max ||grad k_y||;
/// eta: Lipschitz constant of grad k_y. Exact for quadratic costs with affine
/// k_y, otherwise sampled on a `grid_density`-per-axis grid of the box.
ConstantEstimate estimate_constants(const CostModel& cost, const SteadyStateOracle& oracle, const Box& box,
                                    int grid_density = 41);

struct Lemma4Result {
  bool verified = false;
  double rate = std::numeric_limits<double>::quiet_NaN();
};

Lemma4Result check_lemma4(double mu, double ell);

struct Corollary1Result {
  bool verified = false;
  double radius = 0.0;
  double sensitivity_norm = 0.0;
  /// beta_y * radius * ||S||^2, which beta_u must exceed.
  double threshold = 0.0;
};

Corollary1Result check_corollary1(double beta_u, double beta_y, const Eigen::MatrixXd& S, const Box& box);

/// Smallest beta_bar >= 0 with mu + 2 beta_bar >= ell (1 + margin).
double suggest_regularization(double mu, double ell, double margin = 0.05);

struct ReferenceOptimum {
  Eigen::VectorXd u;
  double residual = 0.0;
  double value = 0.0;
  MinimizerStatus status = MinimizerStatus::Converged;
};

/// Multi-start projected gradient descent on Phi~(u) = Phi_u(u) + Phi_y(k_y(u)).
ReferenceOptimum solve_reference_optimum(const CostModel& cost, const SteadyStateOracle& oracle, const Box& box,
                                         const BoxMinimizerOptions& options = {});

struct CertifyOptions {
  int grid_density = 41;
  int monotone_points_per_axis = 5;
  std::size_t random_samples = 64;
  std::size_t lemma5_pairs = 200;
  std::uint64_t seed = 0;
  /// Initial state of the sandwich trajectories; defaults to the state-region midpoint.
  std::optional<Eigen::VectorXd> x0;
  double sandwich_horizon = 500.0;
  int state_points_per_axis = 5;
  int small_gain_max_iters = 10000;
  double small_gain_tol = 1e-10;
  BoxMinimizerOptions minimizer;
};

struct CertificationReport {
  bool plant_monotone = false;
  std::size_t monotone_samples = 0;
  std::size_t monotone_violations = 0;

  ControllerMonotonicity asm4_i = ControllerMonotonicity::NotEstablished;
  ControllerSteadyState asm4_ii = ControllerSteadyState::NotEstablished;
  SmallGain asm4_iii = SmallGain::NotEstablished;

  ConstantEstimate constants;
  double lemma3_modulus = std::numeric_limits<double>::quiet_NaN();
  std::optional<Eigen::VectorXd> fixed_point;
  double empirical_rate = std::numeric_limits<double>::quiet_NaN();
  /// At least one verdict rests on sampling rather than an exact argument.
  bool sampled = false;
  std::vector<std::string> notes;

  bool certified() const;
};

/// Runs the full pipeline: sampled monotonicity of the plant, then the
/// sufficient conditions for each of the three sub-assumptions.
CertificationReport certify(const PlantModel& plant, const CostModel& cost, const Box& input_box,
                            const CertifyOptions& options = {});

/// Sandwich trajectories from constant u_min / u_max, reduced to a bounding box
/// of the reachable states.
Box reachable_state_box(const PlantModel& plant, const Box& input_box, const Eigen::VectorXd& x0, double horizon);

std::string to_json_string(const CertificationReport& report);
std::string summary(const CertificationReport& report);

}  // namespace ofo
