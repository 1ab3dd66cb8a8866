#include <gtest/gtest.h>

#include <cmath>

#include "ofo/box_minimizer.hpp"
#include "ofo/error.hpp"
#include "oracles.hpp"

using namespace ofo;

namespace {

Eigen::VectorXd v1(double a) { return Eigen::VectorXd::Constant(1, a); }

ScalarFunction quadratic_to(const Eigen::VectorXd& target) {
  return [target](const Eigen::VectorXd& u) { return (u - target).squaredNorm(); };
}
GradientFunction quadratic_gradient_to(const Eigen::VectorXd& target) {
  return [target](const Eigen::VectorXd& u) -> Eigen::VectorXd { return 2.0 * (u - target); };
}

}  // namespace

TEST(MinimizeFrom, InteriorMinimum) {
  const Box box(Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1));
  const Eigen::Vector2d target(0.3, -0.2);
  const BoxMinimizerResult r = minimize_from(quadratic_to(target), quadratic_gradient_to(target), box,
                                             Eigen::Vector2d(1, 1));
  EXPECT_TRUE(r.ok());
  EXPECT_NEAR((r.argmin - target).norm(), 0.0, 1e-10);
  EXPECT_LT(r.residual, 1e-10);
}

TEST(MinimizeFrom, MinimumOnCorner) {
  const Box box(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1));
  const Eigen::Vector2d target(2.0, -3.0);
  const BoxMinimizerResult r =
      minimize_from(quadratic_to(target), quadratic_gradient_to(target), box, Eigen::Vector2d(0.5, 0.5));
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.argmin, Eigen::Vector2d(1.0, 0.0));
}

TEST(MinimizeFrom, StartOutsideIsClamped) {
  const BoxMinimizerResult r =
      minimize_from(quadratic_to(v1(0.25)), quadratic_gradient_to(v1(0.25)), Box::interval(0, 1), v1(7.0));
  EXPECT_NEAR(r.argmin[0], 0.25, 1e-10);
}

TEST(MinimizeFrom, IterationCapIsReported) {
  BoxMinimizerOptions opts;
  opts.max_iterations = 0;
  const BoxMinimizerResult r =
      minimize_from(quadratic_to(v1(0.25)), quadratic_gradient_to(v1(0.25)), Box::interval(0, 1), v1(1.0), opts);
  EXPECT_EQ(r.status, MinimizerStatus::IterationCap);
  EXPECT_FALSE(r.ok());
}

TEST(MinimizeFrom, RejectsUnboundedBox) {
  EXPECT_THROW(minimize_from(quadratic_to(v1(0)), quadratic_gradient_to(v1(0)), Box::unbounded(1), v1(0)),
               DomainError);
}

TEST(MinimizeOverBox, NonconvexReportsDisagreement) {
  // Double well with minima at +-1 of equal depth.
  const ScalarFunction f = [](const Eigen::VectorXd& u) { return std::pow(u[0] * u[0] - 1.0, 2); };
  const GradientFunction g = [](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return v1(4.0 * u[0] * (u[0] * u[0] - 1.0));
  };
  const BoxMinimizerResult r = minimize_over_box(f, g, Box::interval(-2.0, 2.0), {});
  EXPECT_EQ(r.status, MinimizerStatus::MultistartDisagreement);
  EXPECT_NEAR(std::abs(r.argmin[0]), 1.0, 1e-6);
  EXPECT_GT(r.start_spread, 1.0);
  EXPECT_EQ(r.starts, 3u);
}

TEST(MinimizeOverBox, GeneReducedCostMatchesScalarSearch) {
  for (double y_ref : {0.0, 1.0, 2.0}) {
    const ScalarFunction f = [y_ref](const Eigen::VectorXd& u) {
      const double e = oracle::gene_steady_output(u[0]) - y_ref;
      return 10.0 * u[0] * u[0] + e * e;
    };
    const GradientFunction g = [y_ref](const Eigen::VectorXd& u) -> Eigen::VectorXd {
      const double e = oracle::gene_steady_output(u[0]) - y_ref;
      return v1(20.0 * u[0] + 2.0 * e * oracle::gene_sensitivity(u[0]));
    };
    const BoxMinimizerResult r = minimize_over_box(f, g, Box::interval(0.0, 0.6), {});
    EXPECT_TRUE(r.ok()) << to_string(r.status);
    EXPECT_NEAR(r.argmin[0], oracle::gene_optimum(y_ref), 1e-7);
  }
}

TEST(MinimizerStatus, Names) {
  EXPECT_STREQ(to_string(MinimizerStatus::Converged), "converged");
  EXPECT_STREQ(to_string(MinimizerStatus::IterationCap), "iteration-cap");
  EXPECT_STREQ(to_string(MinimizerStatus::MultistartDisagreement), "multistart-disagreement");
}
