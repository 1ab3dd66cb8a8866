#pragma once

#include <Eigen/Core>
#include <vector>

#include "ofo/cost.hpp"
#include "ofo/geometry.hpp"

namespace ofo {

struct BoxMinimizerOptions {
  /// Stop once ||Pi_box(u, -grad f(u))||_inf falls below this.
  double residual_tol = 1e-10;
  int max_iterations = 100000;
  /// Sufficient-decrease constant of the Armijo test.
  double armijo = 1e-4;
  /// Converged starts further apart than this are reported as disagreeing.
  double multistart_tol = 1e-6;
  std::size_t max_corners = 64;

  bool operator==(const BoxMinimizerOptions&) const = default;
};

enum class MinimizerStatus { Converged, IterationCap, MultistartDisagreement };
const char* to_string(MinimizerStatus status);

struct BoxMinimizerResult {
  Eigen::VectorXd argmin;
  double value = 0.0;
  double residual = 0.0;
  int iterations = 0;
  MinimizerStatus status = MinimizerStatus::Converged;
  /// Largest inf-norm distance between converged multi-start solutions.
  double start_spread = 0.0;
  std::size_t starts = 1;

  bool ok() const { return status == MinimizerStatus::Converged; }
};

/// Projected gradient descent with Armijo backtracking from a single start.
BoxMinimizerResult minimize_from(const ScalarFunction& objective, const GradientFunction& gradient,
                                 const Box& box, const Eigen::VectorXd& start,
                                 const BoxMinimizerOptions& options = {});

/// Multi-start version: every box corner (when there are at most
/// `max_corners`) plus the midpoint. Returns the lowest-value solution.
BoxMinimizerResult minimize_over_box(const ScalarFunction& objective, const GradientFunction& gradient,
                                     const Box& box, const BoxMinimizerOptions& options = {});

}  // namespace ofo
