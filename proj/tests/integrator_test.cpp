#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ofo/error.hpp"
#include "ofo/integrator.hpp"
#include "ofo/plant.hpp"
#include "oracles.hpp"

using namespace ofo;

namespace {

Eigen::VectorXd v1(double a) { return Eigen::VectorXd::Constant(1, a); }

StepConfig horizon(double t, double tol = 1e-6) { return StepConfig{1e-3, 0.05, tol, t, 0.0, 1e-13}; }

const VectorField kUp = [](double, const Eigen::VectorXd&) { return v1(1.0); };
const VectorField kDown = [](double, const Eigen::VectorXd&) { return v1(-1.0); };
const VectorField kDecay = [](double, const Eigen::VectorXd& x) -> Eigen::VectorXd { return -x; };

}  // namespace

TEST(StepConfig, Validation) {
  EXPECT_NO_THROW(StepConfig{}.validate());
  EXPECT_THROW((StepConfig{0.1, 0.01, 1e-6, 1.0, 0.0, 1e-13}.validate()), DomainError);
  EXPECT_THROW((StepConfig{1e-3, 0.05, 0.0, 1.0, 0.0, 1e-13}.validate()), DomainError);
  EXPECT_THROW((StepConfig{1e-3, 0.05, 1e-6, -1.0, 0.0, 1e-13}.validate()), DomainError);
}

TEST(IntegrateProjected, RampSaturatesAtUpperFace) {
  const Trajectory t = integrate_projected(kUp, Box::interval(0.0, 1.0), v1(0.5), horizon(1.0));
  EXPECT_DOUBLE_EQ(t.final_time(), 1.0);
  EXPECT_DOUBLE_EQ(t.final_state()[0], 1.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_NEAR(t.states[i][0], std::min(0.5 + t.times[i], 1.0), 1e-5);
  }
}

TEST(IntegrateProjected, FlowBlockedAtLowerFace) {
  const Trajectory t = integrate_projected(kDown, Box::interval(0.0, 1.0), v1(0.0), horizon(1.0));
  for (const Eigen::VectorXd& x : t.states) EXPECT_EQ(x[0], 0.0);
}

TEST(IntegrateProjected, ExponentialDecay) {
  const Trajectory t = integrate_projected(kDecay, Box::unbounded(1), v1(1.0), horizon(1.0));
  EXPECT_NEAR(t.final_state()[0], std::exp(-1.0), 1e-5);
}

TEST(IntegrateProjected, TimesStartAtT0AndIncrease) {
  const Trajectory t = integrate_projected(kDecay, Box::unbounded(1), v1(1.0), horizon(2.0), 3.0);
  EXPECT_EQ(t.times.front(), 3.0);
  EXPECT_DOUBLE_EQ(t.times.back(), 5.0);
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_LT(t.times[i - 1], t.times[i]);
}

TEST(IntegrateProjected, OutputIntervalThinsSamples) {
  StepConfig cfg = horizon(10.0);
  cfg.output_interval = 1.0;
  const Trajectory t = integrate_projected(kDecay, Box::unbounded(1), v1(1.0), cfg);
  EXPECT_LE(t.size(), 12u);
  EXPECT_DOUBLE_EQ(t.final_time(), 10.0);
}

TEST(IntegrateProjected, InitialStateOutsideBoxThrows) {
  EXPECT_THROW(integrate_projected(kUp, Box::interval(0.0, 1.0), v1(2.0), horizon(1.0)), DomainError);
}

TEST(IntegrateProjected, NonFiniteFieldIsReported) {
  const VectorField bad = [](double t, const Eigen::VectorXd&) {
    return v1(t > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 1.0);
  };
  try {
    integrate_projected(bad, Box::unbounded(1), v1(0.0), horizon(1.0));
    FAIL() << "expected IntegrationError";
  } catch (const IntegrationError& e) {
    EXPECT_EQ(e.kind(), IntegrationError::Kind::NonFiniteField);
    EXPECT_GT(e.time(), 0.4);
  }
}

TEST(IntegrateProjected, StepUnderflowIsReported) {
  StepConfig cfg{1e-3, 0.05, 1e-15, 1.0, 0.0, 1e-3};
  try {
    integrate_projected(kDecay, Box::unbounded(1), v1(1.0), cfg);
    FAIL() << "expected IntegrationError";
  } catch (const IntegrationError& e) {
    EXPECT_EQ(e.kind(), IntegrationError::Kind::StepUnderflow);
  }
}

TEST(IntegrateProjected, HalvingToleranceChangesResultLessThanCoarseTolerance) {
  for (double tol : {1e-4, 1e-5, 1e-6}) {
    const double coarse = integrate_projected(kDecay, Box::unbounded(1), v1(1.0), horizon(3.0, tol)).final_state()[0];
    const double fine =
        integrate_projected(kDecay, Box::unbounded(1), v1(1.0), horizon(3.0, tol / 2)).final_state()[0];
    EXPECT_LT(std::abs(coarse - fine), tol);
  }
}

TEST(IntegrateProjected, SaturatingRampMatchesClosedFormWithinTenTolerances) {
  const double tol = 1e-6;
  const Trajectory t = integrate_projected(kUp, Box::interval(0.0, 1.0), v1(0.2), horizon(2.0, tol));
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_LE(std::abs(t.states[i][0] - std::min(0.2 + t.times[i], 1.0)), 10 * tol);
  }
}

TEST(Trajectory, InterpolationAndMatrix) {
  Trajectory t;
  t.times = {0.0, 1.0};
  t.states = {v1(0.0), v1(2.0)};
  EXPECT_DOUBLE_EQ(t.at(0.25)[0], 0.5);
  EXPECT_DOUBLE_EQ(t.at(-1.0)[0], 0.0);
  EXPECT_DOUBLE_EQ(t.at(5.0)[0], 2.0);
  EXPECT_EQ(t.as_matrix().rows(), 2);
}

TEST(Settle, DecayReachesOrigin) {
  const SettleResult r = settle(kDecay, Box::unbounded(1), v1(1.0), 1e-9, 100.0, horizon(1.0));
  EXPECT_TRUE(r.converged);
  EXPECT_LT(r.residual, 1e-9);
  EXPECT_NEAR(r.state[0], 0.0, 1e-9);
}

TEST(Settle, EquilibriumOnFaceIsRecognised) {
  const SettleResult r = settle(kUp, Box::interval(0.0, 1.0), v1(0.0), 1e-9, 10.0, horizon(1.0));
  EXPECT_TRUE(r.converged);
  EXPECT_DOUBLE_EQ(r.state[0], 1.0);
}

TEST(Settle, TimeoutIsAnOutcomeNotAnError) {
  const SettleResult r = settle(kDecay, Box::unbounded(1), v1(1.0), 1e-12, 1.0, horizon(1.0));
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.residual, 1e-12);
}

TEST(Settle, LtiPlantUnderConstantInput) {
  LtiMatrices m;
  m.A.resize(2, 2);
  m.A << -1.0, 1.0, 0.5, -1.0;
  m.B = Eigen::Vector2d(1.0, 0.0);
  m.Bw = Eigen::Vector2d(0.9, 0.0);
  m.C = Eigen::RowVector2d(0.0, 1.0);
  const PlantModel plant = make_lti_plant(m, v1(1.0));
  const VectorField f = [&](double, const Eigen::VectorXd& x) { return plant.dynamics(x, v1(1.0)); };
  const SettleResult r =
      settle(f, Box::unbounded(2), Eigen::Vector2d::Zero(), 1e-9, 1e4, StepConfig{1e-3, 0.1, 1e-8, 1.0, 0.0, 1e-13});
  ASSERT_TRUE(r.converged);
  const auto [x1, x2] = oracle::lti_steady_state(1.0, 1.0);
  EXPECT_NEAR(r.state[0], x1, 1e-7);
  EXPECT_NEAR(r.state[1], x2, 1e-7);
}
