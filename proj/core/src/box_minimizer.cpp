#include "ofo/box_minimizer.hpp"

#include <algorithm>
#include <cmath>

#include "ofo/error.hpp"

namespace ofo {

const char* to_string(MinimizerStatus status) {
  switch (status) {
    case MinimizerStatus::Converged: return "converged";
    case MinimizerStatus::IterationCap: return "iteration-cap";
    case MinimizerStatus::MultistartDisagreement: return "multistart-disagreement";
  }
  return "unknown";
}

BoxMinimizerResult minimize_from(const ScalarFunction& objective, const GradientFunction& gradient, const Box& box,
                                 const Eigen::VectorXd& start, const BoxMinimizerOptions& options) {
  if (!box.is_compact()) throw DomainError("minimize_from: box must be compact");
  require_same_dimension(box.dimension(), start.size(), "minimize_from: start");

  Eigen::VectorXd u = box.clamp(start);
  double fu = objective(u);
  Eigen::VectorXd g = gradient(u);
  double step = 1.0;

  BoxMinimizerResult out;
  out.status = MinimizerStatus::IterationCap;
  for (int it = 0; it <= options.max_iterations; ++it) {
    out.iterations = it;
    out.residual = project_tangent(u, -g, box).lpNorm<Eigen::Infinity>();
    if (!std::isfinite(out.residual)) throw DomainError("minimize_from: non-finite gradient");
    if (out.residual < options.residual_tol) {
      out.status = MinimizerStatus::Converged;
      break;
    }
    if (it == options.max_iterations) break;

    bool accepted = false;
    Eigen::VectorXd candidate;
    Eigen::VectorXd gc;
    double fc = 0.0;
    const double noise = 1e-14 * (1.0 + std::abs(fu));
    for (int bt = 0; bt < 100; ++bt) {
      candidate = box.clamp(u - step * g);
      fc = objective(candidate);
      const double predicted = g.dot(candidate - u);
      if (fc <= fu + options.armijo * predicted) {
        accepted = true;
        gc = gradient(candidate);
        break;
      }
      // Below rounding noise in f, require the projected gradient to shrink instead.
      if (std::abs(fc - fu) <= noise) {
        gc = gradient(candidate);
        if (project_tangent(candidate, -gc, box).lpNorm<Eigen::Infinity>() < out.residual) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted || candidate == u) break;
    u = std::move(candidate);
    fu = fc;
    g = std::move(gc);
    step = std::min(2.0 * step, 1e12);
  }
  out.argmin = u;
  out.value = fu;
  return out;
}

BoxMinimizerResult minimize_over_box(const ScalarFunction& objective, const GradientFunction& gradient,
                                     const Box& box, const BoxMinimizerOptions& options) {
  std::vector<Eigen::VectorXd> starts = box.corners(options.max_corners);
  starts.push_back(box.midpoint());

  std::vector<BoxMinimizerResult> runs;
  runs.reserve(starts.size());
  for (const Eigen::VectorXd& s : starts) runs.push_back(minimize_from(objective, gradient, box, s, options));

  BoxMinimizerResult best = runs.front();
  bool any_capped = false;
  double spread = 0.0;
  for (const BoxMinimizerResult& r : runs) {
    if (r.status != MinimizerStatus::Converged) {
      any_capped = true;
      continue;
    }
    if (best.status != MinimizerStatus::Converged || r.value < best.value) best = r;
    for (const BoxMinimizerResult& other : runs) {
      if (other.status == MinimizerStatus::Converged) {
        spread = std::max(spread, (r.argmin - other.argmin).lpNorm<Eigen::Infinity>());
      }
    }
  }
  best.start_spread = spread;
  best.starts = runs.size();
  if (any_capped) {
    best.status = MinimizerStatus::IterationCap;
  } else if (spread > options.multistart_tol) {
    best.status = MinimizerStatus::MultistartDisagreement;
  }
  return best;
}

}  // namespace ofo
