#include <gtest/gtest.h>

#include <cmath>

#include "ofo/error.hpp"
#include "ofo/plant.hpp"
#include "oracles.hpp"

using namespace ofo;

namespace {

Eigen::VectorXd v1(double a) { return Eigen::VectorXd::Constant(1, a); }

LtiMatrices example_matrices() {
  LtiMatrices m;
  m.A.resize(2, 2);
  m.A << -1.0, 1.0, 0.5, -1.0;
  m.B = Eigen::Vector2d(1.0, 0.0);
  m.Bw = Eigen::Vector2d(0.9, 0.0);
  m.C = Eigen::RowVector2d(0.0, 1.0);
  return m;
}

PlantModel lti(double w) { return make_lti_plant(example_matrices(), v1(w)); }

PlantModel gene() {
  return make_gene_plant(GeneParameters{}, Box(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(5.0, 5.0)));
}

/// x' = -x + u with y = -x: the output map has the wrong sign.
PlantModel flipped_scalar() {
  PlantModel p;
  p.name = "flipped";
  p.state_dim = p.input_dim = p.output_dim = 1;
  p.dynamics = [](const Eigen::VectorXd& x, const Eigen::VectorXd& u) -> Eigen::VectorXd { return u - x; };
  p.output = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return -x; };
  return p;
}

StepConfig sim(double t) { return StepConfig{1e-3, 0.1, 1e-7, t, 0.0, 1e-13}; }

}  // namespace

TEST(LtiPlant, SteadyStateMatchesHandSolution) {
  const SteadyState ss = steady_state(lti(1.0), v1(1.0));
  const auto [x1, x2] = oracle::lti_steady_state(1.0, 1.0);
  EXPECT_NEAR(ss.state[0], x1, 1e-12);
  EXPECT_NEAR(ss.state[1], x2, 1e-12);
  EXPECT_EQ(ss.provenance, Provenance::Analytic);
}

TEST(LtiPlant, AffineSteadyOutput) {
  const PlantModel p = lti(1.0);
  ASSERT_TRUE(p.affine.has_value());
  EXPECT_NEAR(p.affine->S(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(p.affine->s[0], 0.9, 1e-12);
  EXPECT_NEAR(steady_output(p, v1(0.5)).output[0], oracle::lti_steady_output(0.5, 1.0), 1e-12);
  EXPECT_NEAR(lti(-1.0).affine->s[0], -0.9, 1e-12);
}

TEST(LtiPlant, SensitivityIsIndependentOfDisturbance) {
  const Box box = Box::interval(-0.7, 1.0);
  for (double w : {-1.0, 0.0, 1.0}) {
    for (double u : {-0.7, 0.0, 0.4, 1.0}) {
      EXPECT_NEAR(sensitivity(lti(w), v1(u), box).jacobian(0, 0), 1.0, 1e-12);
      SensitivityOptions fd;
      fd.finite_difference = true;
      EXPECT_NEAR(sensitivity(lti(w), v1(u), box, fd).jacobian(0, 0), 1.0, 1e-8);
    }
  }
}

TEST(LtiPlant, SingularAIsRejected) {
  LtiMatrices m = example_matrices();
  m.A << 1.0, 1.0, 1.0, 1.0;
  EXPECT_THROW(make_lti_plant(m, v1(0.0)), DomainError);
}

TEST(GenePlant, SteadyStateClosedForm) {
  const SteadyState ss = steady_state(gene(), v1(0.6));
  EXPECT_NEAR(ss.state[0], oracle::gene_steady_x1(0.6), 1e-12);
  EXPECT_NEAR(ss.state[1], oracle::gene_steady_output(0.6), 1e-12);
  EXPECT_NEAR(ss.state[1], 1.73535, 1e-5);
  EXPECT_EQ(steady_state(gene(), v1(0.0)).state, Eigen::Vector2d::Zero().eval());
  EXPECT_LT(ss.residual, 1e-8);
}

TEST(GenePlant, SensitivityClosedForm) {
  const Box box = Box::interval(0.0, 0.6);
  EXPECT_NEAR(sensitivity(gene(), v1(0.0), box).jacobian(0, 0), oracle::gene_sensitivity(0.0), 1e-12);
  EXPECT_NEAR(sensitivity(gene(), v1(0.0), box).jacobian(0, 0), 2.8856, 1e-4);
  EXPECT_NEAR(sensitivity(gene(), v1(0.6), box).jacobian(0, 0), 2.8989, 1e-4);
}

TEST(GenePlant, InputBeyondSaturationIsRejected) {
  // theta2 u >= gamma1 gamma2 has no equilibrium.
  EXPECT_THROW(steady_output(gene(), v1(300.0)), DomainError);
}

TEST(GenePlant, SimulatedSteadyStateAgreesWithAnalytic) {
  SteadyStateOptions sim_opts;
  sim_opts.use_analytic = false;
  for (double u : {0.0, 0.15, 0.3, 0.45, 0.6}) {
    const SteadyState s = steady_state(gene(), v1(u), sim_opts);
    EXPECT_EQ(s.provenance, Provenance::Simulated);
    EXPECT_NEAR(s.state[0], oracle::gene_steady_x1(u), 1e-6);
    EXPECT_NEAR(s.state[1], oracle::gene_steady_output(u), 1e-6);
  }
}

TEST(LtiPlant, SimulatedSteadyStateAgreesWithAnalytic) {
  SteadyStateOptions sim_opts;
  sim_opts.use_analytic = false;
  for (double u : {-0.7, 0.0, 1.0}) {
    const SteadyState s = steady_state(lti(1.0), v1(u), sim_opts);
    const auto [x1, x2] = oracle::lti_steady_state(u, 1.0);
    EXPECT_NEAR(s.state[0], x1, 1e-6);
    EXPECT_NEAR(s.state[1], x2, 1e-6);
  }
}

TEST(SteadyState, NonSettlingPlantRaises) {
  PlantModel p = flipped_scalar();
  p.dynamics = [](const Eigen::VectorXd& x, const Eigen::VectorXd&) -> Eigen::VectorXd { return 0.1 * x; };
  SteadyStateOptions opts;
  opts.x0 = v1(1.0);
  opts.max_time = 10.0;
  EXPECT_THROW(steady_state(p, v1(0.0), opts), ConvergenceError);
}

TEST(Sensitivity, FiniteDifferenceMatchesAnalyticOnGrid) {
  const Box box = Box::interval(0.0, 0.6);
  SensitivityOptions fd;
  fd.finite_difference = true;
  for (const Eigen::VectorXd& u : box.grid(20)) {
    const double exact = oracle::gene_sensitivity(u[0]);
    EXPECT_NEAR(sensitivity(gene(), u, box, fd).jacobian(0, 0), exact, 1e-4 * exact);
  }
}

TEST(Sensitivity, ProbesStayInsideInflatedBox) {
  PlantModel p = gene();
  p.sensitivity_map = nullptr;
  const Box box = Box::interval(0.0, 0.6);
  const Box probes = box.inflated(0.01);
  bool inside = true;
  PlantModel spy = p;
  spy.steady_output_map = [&](const Eigen::VectorXd& u) {
    inside = inside && probes.contains(u);
    return p.steady_output_map(u);
  };
  sensitivity(spy, v1(0.0), box);
  sensitivity(spy, v1(0.6), box);
  EXPECT_TRUE(inside);
}

TEST(CheckMonotone, LtiExampleIsMonotone) {
  const PlantModel p = lti(1.0);
  const auto samples = make_sample_grid(Box(Eigen::Vector2d(-5, -5), Eigen::Vector2d(5, 5)),
                                        Box::interval(-0.7, 1.0), 4, 20, 0);
  const MonotonicityReport r = check_monotone(p, samples);
  EXPECT_TRUE(r.satisfied);
  EXPECT_TRUE(r.violations.empty());
  EXPECT_EQ(r.samples_checked, samples.size());
}

TEST(CheckMonotone, GeneModelIsMonotoneOnGrid) {
  const auto samples =
      make_sample_grid(Box(Eigen::Vector2d(0, 0), Eigen::Vector2d(5, 5)), Box::interval(0.0, 0.6), 5, 50, 1);
  EXPECT_TRUE(check_monotone(gene(), samples).satisfied);
}

TEST(CheckMonotone, SignFlippedOutputIsCaught) {
  const auto samples = make_sample_grid(Box::interval(-1.0, 1.0), Box::interval(0.0, 1.0), 3, 0, 0);
  const MonotonicityReport r = check_monotone(flipped_scalar(), samples);
  EXPECT_FALSE(r.satisfied);
  ASSERT_FALSE(r.violations.empty());
  EXPECT_EQ(r.violations.front().condition, MonotoneCondition::OutputMap);
  EXPECT_NEAR(r.violations.front().value, -1.0, 1e-6);
}

TEST(CheckMonotone, ReversedOutputOrderRepairsFlippedPlant) {
  const auto samples = make_sample_grid(Box::interval(-1.0, 1.0), Box::interval(0.0, 1.0), 3, 0, 0);
  MonotoneOrders orders = MonotoneOrders::standard(flipped_scalar());
  orders.output = OrthantOrder::reversed(1);
  EXPECT_TRUE(check_monotone(flipped_scalar(), samples, orders).satisfied);
}

TEST(CheckMetzler, Examples) {
  const LtiMatrices m = example_matrices();
  EXPECT_TRUE(check_metzler(m.A, {m.B, m.Bw}, m.C));
  Eigen::MatrixXd bad = m.A;
  bad(0, 1) = -0.1;
  EXPECT_FALSE(check_metzler(bad, {m.B}, m.C));
  EXPECT_TRUE(check_metzler(Eigen::MatrixXd::Identity(2, 2), {Eigen::MatrixXd::Zero(2, 1)},
                            Eigen::MatrixXd::Zero(1, 2)));
  EXPECT_THROW(check_metzler(Eigen::MatrixXd::Identity(2, 2), {Eigen::MatrixXd::Zero(3, 1)}, m.C), DimensionError);
}

TEST(OrderPreservation, LtiOrderedInitialStates) {
  const PlantModel p = lti(1.0);
  OrderTrial trial{Eigen::Vector2d(1, 1), Eigen::Vector2d(0, 0), [](double) { return v1(0.3); },
                   [](double) { return v1(0.3); }};
  const auto r = test_order_preservation(p, {trial}, MonotoneOrders::standard(p), sim(20.0));
  EXPECT_TRUE(r.satisfied);
  EXPECT_GT(r.samples_checked, 10u);
}

TEST(OrderPreservation, IdenticalExperimentsAreTriviallyOrdered) {
  const PlantModel p = gene();
  OrderTrial trial{Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d(0.1, 0.2), [](double) { return v1(0.4); },
                   [](double) { return v1(0.4); }};
  EXPECT_TRUE(test_order_preservation(p, {trial}, MonotoneOrders::standard(p), sim(10.0)).satisfied);
}

TEST(OrderPreservation, GeneOrderedInputs) {
  const PlantModel p = gene();
  OrderTrial trial{Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), [](double) { return v1(0.6); },
                   [](double) { return v1(0.3); }};
  EXPECT_TRUE(test_order_preservation(p, {trial}, MonotoneOrders::standard(p), sim(50.0)).satisfied);
}

TEST(OrderPreservation, FlippedOutputViolates) {
  const PlantModel p = flipped_scalar();
  OrderTrial trial{v1(1.0), v1(0.0), [](double) { return v1(0.5); }, [](double) { return v1(0.5); }};
  const auto r = test_order_preservation(p, {trial}, MonotoneOrders::standard(p), sim(1.0));
  EXPECT_FALSE(r.satisfied);
  EXPECT_TRUE(r.violations.front().in_output);
}

TEST(OrderPreservation, UnorderedTrialIsRejected) {
  const PlantModel p = lti(1.0);
  OrderTrial trial{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1), [](double) { return v1(0.0); },
                   [](double) { return v1(0.0); }};
  EXPECT_THROW(test_order_preservation(p, {trial}, MonotoneOrders::standard(p), sim(1.0)), DomainError);
}

TEST(PlantModel, MissingDynamicsFailsValidation) {
  PlantModel p = flipped_scalar();
  p.dynamics = nullptr;
  EXPECT_ANY_THROW(p.validate());
}
