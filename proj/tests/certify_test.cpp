#include <gtest/gtest.h>

#include <cmath>

#include "ofo/certify.hpp"
#include "ofo/control.hpp"
#include "ofo/error.hpp"
#include "ofo/scenario.hpp"
#include "oracles.hpp"

using namespace ofo;

namespace {

Eigen::VectorXd v1(double a) { return Eigen::VectorXd::Constant(1, a); }

struct Problem {
  PlantModel plant;
  CostModel cost;
  Box box;
  SteadyStateOracle oracle;
};

Problem lti(double w) {
  const ScenarioConfig c = build_lti_scenario();
  Problem s{c.plant_for(v1(w)), c.cost_for(v1(w)), c.input_box, {}};
  s.oracle = make_oracle(s.plant, s.box);
  return s;
}

Problem gene(double y_ref) {
  const ScenarioConfig c = build_gene_scenario();
  Problem s{c.plant_for(v1(y_ref)), c.cost_for(v1(y_ref)), c.input_box, {}};
  s.oracle = make_oracle(s.plant, s.box);
  return s;
}

CertificationSamples samples_for(const Problem& s, int density = 11) {
  CertificationSamples out;
  out.inputs = s.box.grid(density);
  out.states = s.plant.state_region->grid(5);
  return out;
}

}  // namespace

TEST(SurrogateArgmin, LtiAnchors) {
  const Problem s = lti(1.0);
  EXPECT_NEAR(surrogate_argmin_at_input(s.cost, s.oracle, v1(0.0), s.box).argmin[0], 1.0, 1e-12);
  EXPECT_NEAR(surrogate_argmin_at_input(s.cost, s.oracle, v1(11.0 / 21.0), s.box).argmin[0], 11.0 / 21.0, 1e-12);
  for (double un : {-0.7, -0.2, 0.3, 0.8, 1.0}) {
    EXPECT_NEAR(surrogate_argmin_at_input(s.cost, s.oracle, v1(un), s.box).argmin[0], oracle::lti_small_gain_step(un),
                1e-12);
  }
}

TEST(SurrogateArgmin, ZeroOutputGradientGivesUnperturbedMinimum) {
  const Problem s = gene(2.0);
  const BoxMinimizerResult r = surrogate_argmin(s.cost, s.oracle, v1(2.0), s.box);
  EXPECT_TRUE(r.ok());
  EXPECT_NEAR(r.argmin[0], 0.0, 1e-12);
}

TEST(SurrogateArgmin, GeneMatchesScalarSearch) {
  const Problem s = gene(2.0);
  for (double anchor : {0.0, 0.5, 1.5}) {
    const double c = 2.0 * (anchor - 2.0);
    const double expected = oracle::scalar_argmin(
        [&](double u) { return 10.0 * u * u + c * oracle::gene_steady_output(u); }, 0.0, 0.6);
    const BoxMinimizerResult r = surrogate_argmin(s.cost, s.oracle, v1(anchor), s.box);
    EXPECT_TRUE(r.ok());
    EXPECT_NEAR(r.argmin[0], expected, 1e-7);
  }
}

TEST(SmallGainIterate, LtiIteratesAndRate) {
  const Problem s = lti(1.0);
  const SmallGainResult r = small_gain_iterate(s.cost, s.oracle, s.box, v1(0.0));
  ASSERT_TRUE(r.converged);
  ASSERT_GT(r.iterates.size(), 4u);
  double u = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(r.iterates[k][0], u, 1e-12);
    u = oracle::lti_small_gain_step(u);
  }
  EXPECT_NEAR(r.iterates[2][0], 1.0 / 11.0, 1e-12);
  EXPECT_NEAR(r.fixed_point[0], 11.0 / 21.0, 1e-9);
  EXPECT_NEAR(r.empirical_rate, 10.0 / 11.0, 0.02);
}

TEST(SmallGainIterate, StartAtFixedPointStopsImmediately) {
  const Problem s = lti(1.0);
  const SmallGainResult r = small_gain_iterate(s.cost, s.oracle, s.box, v1(11.0 / 21.0));
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterates.size(), 2u);
}

TEST(SmallGainIterate, GeneMatchesReference) {
  const Problem s = gene(2.0);
  const SmallGainResult r = small_gain_iterate(s.cost, s.oracle, s.box, v1(0.0));
  ASSERT_TRUE(r.converged) << r.failure;
  EXPECT_NEAR(r.fixed_point[0], oracle::gene_optimum(2.0), 1e-6);
}

TEST(SmallGainIterate, CapAndOutsideStart) {
  const Problem s = lti(1.0);
  const SmallGainResult r = small_gain_iterate(s.cost, s.oracle, s.box, v1(0.0), 3);
  EXPECT_FALSE(r.converged);
  EXPECT_FALSE(r.failure.empty());
  EXPECT_THROW(small_gain_iterate(s.cost, s.oracle, s.box, v1(2.0)), DomainError);
}

TEST(FitGeometricRate, RecoversKnownRate) {
  std::vector<Eigen::VectorXd> it;
  for (int k = 0; k < 40; ++k) it.push_back(v1(std::pow(0.5, k)));
  EXPECT_NEAR(fit_geometric_rate(it, v1(0.0)), 0.5, 1e-9);
  EXPECT_TRUE(std::isnan(fit_geometric_rate({v1(1.0)}, v1(0.0))));
}

TEST(Lemma2, SisoExamples) {
  for (const Problem& s : {lti(1.0), gene(2.0)}) {
    EXPECT_EQ(check_lemma2(s.plant, s.cost, samples_for(s)).verdict, ControllerMonotonicity::Lemma2i);
  }
}

TEST(Lemma2, TwoInputNonAffinePlantIsNotEstablished) {
  PlantModel p;
  p.name = "two-input";
  p.state_dim = 1;
  p.input_dim = 2;
  p.output_dim = 1;
  p.dynamics = [](const Eigen::VectorXd& x, const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return v1(-x[0] + u[0] * u[0] + u[1]);
  };
  p.output = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x; };
  CostModel c = make_quadratic_cost(1.0, 1.0, v1(0.0), 2);
  c.hess_phi_u = [](const Eigen::VectorXd&) -> Eigen::MatrixXd {
    Eigen::MatrixXd H(2, 2);
    H << 2.0, 1.0, 1.0, 2.0;
    return H;
  };
  CertificationSamples samples;
  samples.inputs = Box(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)).grid(3);
  samples.states = Box::interval(0.0, 2.0).grid(3);
  EXPECT_EQ(check_lemma2(p, c, samples).verdict, ControllerMonotonicity::NotEstablished);
}

TEST(Lemma5, LtiPairsWithEqualInputs) {
  const Problem s = lti(1.0);
  std::vector<OrderedPair> pairs;
  oracle::Gen gen(7);
  for (int k = 0; k < 50; ++k) {
    const double v = gen.uniform(-0.7, 1.0);
    const Eigen::Vector2d xp(gen.uniform(-5, 5), gen.uniform(-5, 5));
    const Eigen::Vector2d x = xp + Eigen::Vector2d(gen.uniform(0, 1), gen.uniform(0, 1));
    pairs.push_back({v1(v), x, v1(v), xp});
  }
  const Lemma5Result r = check_lemma5_sampled(s.cost, s.oracle, s.plant, pairs);
  EXPECT_TRUE(r.satisfied);
  EXPECT_EQ(r.binding_components, 50u);
}

TEST(Lemma5, IdenticalPairsAreInTheCone) {
  const Problem s = gene(1.0);
  const std::vector<OrderedPair> pairs{{v1(0.2), Eigen::Vector2d(0.1, 1.0), v1(0.2), Eigen::Vector2d(0.1, 1.0)}};
  EXPECT_TRUE(check_lemma5_sampled(s.cost, s.oracle, s.plant, pairs).satisfied);
}

TEST(Lemma5, DecreasingOutputGradientIsDetected) {
  Problem s = lti(1.0);
  s.cost.phi_y = [](const Eigen::VectorXd& y) { return -y.squaredNorm(); };
  s.cost.grad_phi_y = [](const Eigen::VectorXd& y) -> Eigen::VectorXd { return -2.0 * y; };
  const std::vector<OrderedPair> pairs{{v1(0.0), Eigen::Vector2d(1.0, 1.0), v1(0.0), Eigen::Vector2d(0.0, 0.0)}};
  const Lemma5Result r = check_lemma5_sampled(s.cost, s.oracle, s.plant, pairs);
  EXPECT_FALSE(r.satisfied);
  EXPECT_NEAR(r.worst, 2.0, 1e-12);
}

TEST(Lemma5, UnorderedPairThrows) {
  const Problem s = lti(1.0);
  const std::vector<OrderedPair> pairs{{v1(0.5), Eigen::Vector2d::Zero(), v1(0.0), Eigen::Vector2d::Zero()}};
  EXPECT_THROW(check_lemma5_sampled(s.cost, s.oracle, s.plant, pairs), DomainError);
}

TEST(Lemma5, GeneratedPairsAreOrderedAndTied) {
  const Box in(Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones());
  const Box st = Box::interval(-1.0, 1.0);
  std::size_t tied = 0;
  for (const OrderedPair& p : make_ordered_pairs(in, st, 100, 3)) {
    EXPECT_GE((p.v_prime - p.v).minCoeff(), 0.0);
    EXPECT_GE((p.x - p.x_prime).minCoeff(), 0.0);
    EXPECT_TRUE(in.contains(p.v_prime, 1e-12));
    EXPECT_TRUE(st.contains(p.x, 1e-12));
    for (Eigen::Index i = 0; i < 3; ++i) tied += p.v[i] == p.v_prime[i];
  }
  EXPECT_GT(tied, 100u);
  EXPECT_LT(tied, 200u);
}

TEST(Lemma3, Examples) {
  const Problem l = lti(1.0);
  const Lemma3Result rl = check_lemma3(l.cost, l.oracle, l.plant, samples_for(l));
  EXPECT_EQ(rl.verdict, ControllerSteadyState::Lemma3ii);
  EXPECT_FALSE(rl.sampled);
  EXPECT_NEAR(rl.modulus, 2.2, 1e-12);

  const Problem g = gene(2.0);
  CertificationSamples gs;
  gs.inputs = g.box.grid(21);
  gs.states = reachable_state_box(g.plant, g.box, Eigen::Vector2d::Zero(), 500.0).grid(5);
  const Lemma3Result rg = check_lemma3(g.cost, g.oracle, g.plant, gs);
  EXPECT_EQ(rg.verdict, ControllerSteadyState::Lemma3i);
  EXPECT_GE(rg.modulus, 20.0 - 4 * 0.03);
}

TEST(Lemma3, LinearInputCostIsNotEstablished) {
  Problem s = lti(1.0);
  s.cost.phi_u = [](const Eigen::VectorXd& u) { return 0.5 * u.sum(); };
  s.cost.grad_phi_u = [](const Eigen::VectorXd& u) -> Eigen::VectorXd { return Eigen::VectorXd::Constant(u.size(), 0.5); };
  s.cost.hess_phi_u = [](const Eigen::VectorXd& u) -> Eigen::MatrixXd { return Eigen::MatrixXd::Zero(u.size(), u.size()); };
  s.cost.quadratic.reset();
  EXPECT_EQ(check_lemma3(s.cost, s.oracle, s.plant, samples_for(s)).verdict, ControllerSteadyState::NotEstablished);
}

TEST(EstimateConstants, LtiAnalytic) {
  const Problem s = lti(1.0);
  const ConstantEstimate k = estimate_constants(s.cost, s.oracle, s.box);
  EXPECT_NEAR(k.mu, 2.2, 1e-12);
  EXPECT_NEAR(k.ell, 2.0, 1e-12);
  EXPECT_NEAR(k.sigma, 1.0, 1e-12);
  EXPECT_EQ(k.eta, 0.0);
  EXPECT_NEAR(k.contraction(), 10.0 / 11.0, 1e-12);
}

TEST(EstimateConstants, GeneSampled) {
  const Problem s = gene(2.0);
  const ConstantEstimate k = estimate_constants(s.cost, s.oracle, s.box);
  EXPECT_GE(k.sigma, 2.88);
  EXPECT_LE(k.sigma, 2.90);
  EXPECT_NEAR(k.sigma, oracle::gene_sensitivity(0.6), 1e-6);
  EXPECT_LE(k.eta, 0.03);
  EXPECT_NEAR(k.eta, oracle::gene_curvature(0.6), 1e-4);
  EXPECT_GT(k.mu, k.ell);
}

TEST(EstimateConstants, SigmaGrowsWithDensityAndStaysBounded) {
  const Problem s = gene(2.0);
  double previous = 0.0;
  for (int density : {2, 5, 11, 21, 41, 81}) {
    const double sigma = estimate_constants(s.cost, s.oracle, s.box, density).sigma;
    EXPECT_GE(sigma, previous - 1e-12);
    EXPECT_LE(sigma, 2.9 + 1e-3);
    previous = sigma;
  }
}

TEST(Lemma4, Examples) {
  const Lemma4Result a = check_lemma4(2.2, 2.0);
  EXPECT_TRUE(a.verified);
  EXPECT_NEAR(a.rate, 0.909, 1e-3);
  EXPECT_FALSE(check_lemma4(2.0, 2.0).verified);
  EXPECT_TRUE(check_lemma4(20.0 - 4 * 0.03, 2 * 2.9 * 2.9).verified);
  EXPECT_THROW(check_lemma4(0.0, 1.0), DomainError);
  EXPECT_THROW(check_lemma4(1.0, -1.0), DomainError);
}

TEST(Corollary1, Examples) {
  const Eigen::MatrixXd S = Eigen::MatrixXd::Ones(1, 1);
  const Box unit = Box::interval(-1.0, 1.0);
  EXPECT_TRUE(check_corollary1(1.1, 1.0, S, unit).verified);
  EXPECT_FALSE(check_corollary1(0.9, 1.0, S, unit).verified);
  EXPECT_TRUE(check_corollary1(1e-6, 0.0, S, unit).verified);
  EXPECT_THROW(check_corollary1(1.0, 1.0, S, Box::unbounded(1)), DomainError);
}

TEST(SuggestRegularization, Examples) {
  EXPECT_EQ(suggest_regularization(2.2, 2.0), 0.0);
  EXPECT_NEAR(suggest_regularization(1.0, 2.0), 0.55, 1e-12);
  EXPECT_EQ(suggest_regularization(1.0, 0.0), 0.0);
}

TEST(ReferenceOptimum, Examples) {
  const Problem a = lti(1.0);
  const ReferenceOptimum ra = solve_reference_optimum(a.cost, a.oracle, a.box);
  EXPECT_NEAR(ra.u[0], 11.0 / 21.0, 1e-9);
  EXPECT_LT(ra.residual, 1e-9);
  const Problem b = lti(-1.0);
  EXPECT_NEAR(solve_reference_optimum(b.cost, b.oracle, b.box).u[0], 1.0, 1e-12);
  const Problem g = gene(0.0);
  EXPECT_NEAR(solve_reference_optimum(g.cost, g.oracle, g.box).u[0], 0.0, 1e-12);
  const Problem g2 = gene(2.0);
  const ReferenceOptimum r2 = solve_reference_optimum(g2.cost, g2.oracle, g2.box);
  EXPECT_EQ(r2.status, MinimizerStatus::Converged);
  EXPECT_NEAR(r2.u[0], oracle::gene_optimum(2.0), 1e-7);
}

TEST(Certify, LtiVerdicts) {
  const Problem s = lti(1.0);
  const CertificationReport r = certify(s.plant, s.cost, s.box);
  EXPECT_TRUE(r.plant_monotone);
  EXPECT_EQ(r.asm4_i, ControllerMonotonicity::Lemma2i);
  EXPECT_EQ(r.asm4_ii, ControllerSteadyState::Lemma3ii);
  EXPECT_EQ(r.asm4_iii, SmallGain::Lemma4);
  EXPECT_TRUE(r.certified());
  ASSERT_TRUE(r.fixed_point.has_value());
  EXPECT_NEAR((*r.fixed_point)[0], 11.0 / 21.0, 1e-9);
  const std::string json = to_json_string(r);
  EXPECT_NE(json.find("verified-by-lemma4"), std::string::npos);
  EXPECT_NE(summary(r).find("certified"), std::string::npos);
}

TEST(Certify, GeneVerdicts) {
  const Problem s = gene(2.0);
  const CertificationReport r = certify(s.plant, s.cost, s.box);
  EXPECT_EQ(r.asm4_i, ControllerMonotonicity::Lemma2i);
  EXPECT_EQ(r.asm4_ii, ControllerSteadyState::Lemma3i);
  EXPECT_EQ(r.asm4_iii, SmallGain::Lemma4);
  EXPECT_TRUE(r.sampled);
  ASSERT_TRUE(r.fixed_point.has_value());
  EXPECT_NEAR((*r.fixed_point)[0], oracle::gene_optimum(2.0), 1e-6);
}

TEST(Certify, WeakRegularizationIsNotCertifiedByConstants) {
  Problem s = lti(1.0);
  s.cost = make_quadratic_cost(0.5, 1.0, v1(2.0), 1);
  const CertificationReport r = certify(s.plant, s.cost, s.box);
  EXPECT_NE(r.asm4_iii, SmallGain::Lemma4);
  EXPECT_NEAR(suggest_regularization(r.constants.mu, r.constants.ell), 0.55, 1e-12);
  const CostModel fixed = s.cost.regularized(0.55);
  const ConstantEstimate k = estimate_constants(fixed, s.oracle, s.box);
  EXPECT_TRUE(check_lemma4(k.mu, k.ell).verified);
}

TEST(VerdictNames, Strings) {
  EXPECT_STREQ(to_string(ControllerMonotonicity::Lemma5Sampled), "verified-by-lemma5-sampled");
  EXPECT_STREQ(to_string(ControllerSteadyState::NotEstablished), "not-established");
  EXPECT_STREQ(to_string(SmallGain::Corollary1), "verified-by-corollary1");
}
