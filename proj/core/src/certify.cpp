#include "ofo/certify.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ofo/control.hpp"
#include "ofo/error.hpp"
#include "ofo/integrator.hpp"
#include "ofo/numdiff.hpp"

namespace ofo {

const char* to_string(ControllerMonotonicity verdict) {
  switch (verdict) {
    case ControllerMonotonicity::Lemma2i: return "verified-by-lemma2i";
    case ControllerMonotonicity::Lemma2ii: return "verified-by-lemma2ii";
    case ControllerMonotonicity::Lemma5Sampled: return "verified-by-lemma5-sampled";
    case ControllerMonotonicity::NotEstablished: return "not-established";
  }
  return "unknown";
}

const char* to_string(ControllerSteadyState verdict) {
  switch (verdict) {
    case ControllerSteadyState::Lemma3i: return "verified-by-lemma3i";
    case ControllerSteadyState::Lemma3ii: return "verified-by-lemma3ii";
    case ControllerSteadyState::NotEstablished: return "not-established";
  }
  return "unknown";
}

const char* to_string(SmallGain verdict) {
  switch (verdict) {
    case SmallGain::Lemma4: return "verified-by-lemma4";
    case SmallGain::Corollary1: return "verified-by-corollary1";
    case SmallGain::Iteration: return "verified-by-iteration";
    case SmallGain::NotEstablished: return "not-established";
  }
  return "unknown";
}

namespace {

double spectral_norm(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()(0);
}

double min_eigenvalue(const Eigen::MatrixXd& H) {
  const Eigen::MatrixXd sym = 0.5 * (H + H.transpose());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

/// Hessians of each component of k_y, by differencing rows of grad k_y.
std::vector<Eigen::MatrixXd> steady_output_hessians(const SteadyStateOracle& oracle, const Eigen::VectorXd& u,
                                                    Eigen::Index output_dim) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(output_dim));
  if (oracle.affine) {
    for (Eigen::Index l = 0; l < output_dim; ++l) out.push_back(Eigen::MatrixXd::Zero(u.size(), u.size()));
    return out;
  }
  for (Eigen::Index l = 0; l < output_dim; ++l) {
    out.push_back(numdiff::hessian_from_gradient(
        [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return oracle.grad_k_y(v).row(l).transpose(); }, u));
  }
  return out;
}

/// Grid over the input box with at most ~20000 points.
std::vector<Eigen::VectorXd> capped_grid(const Box& box, int density) {
  int d = std::max(2, density);
  while (d > 2 && std::pow(static_cast<double>(d), static_cast<double>(box.dimension())) > 20000.0) --d;
  return box.grid(d);
}

void require_compact(const Box& box, const char* where) {
  if (!box.is_compact()) throw DomainError(std::string(where) + ": box must be compact");
}

}  // namespace

BoxMinimizerResult surrogate_argmin(const CostModel& cost, const SteadyStateOracle& oracle,
                                    const Eigen::VectorXd& anchor_output, const Box& box,
                                    const BoxMinimizerOptions& options) {
  require_compact(box, "surrogate_argmin");
  require_same_dimension(cost.input_dim, box.dimension(), "surrogate_argmin: box");
  require_same_dimension(cost.output_dim, anchor_output.size(), "surrogate_argmin: anchor");
  const Eigen::VectorXd c = cost.grad_phi_y(anchor_output);

  const ScalarFunction psi = [&](const Eigen::VectorXd& u) { return cost.phi_u(u) + oracle.k_y(u).dot(c); };
  const GradientFunction grad = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return cost.grad_phi_u(u) + oracle.grad_k_y(u).transpose() * c;
  };

  if (cost.quadratic && oracle.affine && cost.quadratic->beta_u > 0) {
    // Isotropic Hessian 2 beta_u I: the box minimiser is the clamped free minimiser.
    BoxMinimizerResult out;
    out.argmin = box.clamp(-(oracle.affine->S.transpose() * c) / (2.0 * cost.quadratic->beta_u));
    out.value = psi(out.argmin);
    out.residual = project_tangent(out.argmin, -grad(out.argmin), box).lpNorm<Eigen::Infinity>();
    out.status = MinimizerStatus::Converged;
    return out;
  }
  return minimize_over_box(psi, grad, box, options);
}

BoxMinimizerResult surrogate_argmin_at_input(const CostModel& cost, const SteadyStateOracle& oracle,
                                             const Eigen::VectorXd& anchor_input, const Box& box,
                                             const BoxMinimizerOptions& options) {
  return surrogate_argmin(cost, oracle, oracle.k_y(anchor_input), box, options);
}

double fit_geometric_rate(const std::vector<Eigen::VectorXd>& iterates, const Eigen::VectorXd& limit, double floor) {
  std::vector<double> n;
  std::vector<double> log_err;
  for (std::size_t k = 0; k < iterates.size(); ++k) {
    const double e = (iterates[k] - limit).norm();
    if (e > floor) {
      n.push_back(static_cast<double>(k));
      log_err.push_back(std::log(e));
    }
  }
  const std::size_t start = n.size() / 2;
  const std::size_t count = n.size() - start;
  if (count < 2) return std::numeric_limits<double>::quiet_NaN();
  double mean_n = 0.0;
  double mean_e = 0.0;
  for (std::size_t k = start; k < n.size(); ++k) {
    mean_n += n[k];
    mean_e += log_err[k];
  }
  mean_n /= static_cast<double>(count);
  mean_e /= static_cast<double>(count);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = start; k < n.size(); ++k) {
    sxy += (n[k] - mean_n) * (log_err[k] - mean_e);
    sxx += (n[k] - mean_n) * (n[k] - mean_n);
  }
  return std::exp(sxy / sxx);
}

SmallGainResult small_gain_iterate(const CostModel& cost, const SteadyStateOracle& oracle, const Box& box,
                                   const Eigen::VectorXd& u0, int max_iters, double tol,
                                   const BoxMinimizerOptions& options) {
  require_compact(box, "small_gain_iterate");
  if (!box.contains(u0, kBoxTolerance)) throw DomainError("small_gain_iterate: u0 lies outside the box");

  SmallGainResult out;
  Eigen::VectorXd u = box.clamp(u0);
  out.iterates.push_back(u);
  for (int k = 0; k < max_iters; ++k) {
    const BoxMinimizerResult step = surrogate_argmin_at_input(cost, oracle, u, box, options);
    if (!step.ok()) {
      out.failure = std::string("surrogate argmin failed: ") + to_string(step.status);
      out.fixed_point = u;
      return out;
    }
    out.iterates.push_back(step.argmin);
    const double change = (step.argmin - u).lpNorm<Eigen::Infinity>();
    u = step.argmin;
    if (change < tol) {
      out.converged = true;
      break;
    }
  }
  out.fixed_point = u;
  if (!out.converged) {
    std::ostringstream msg;
    msg << "no convergence within " << max_iters << " iterations";
    out.failure = msg.str();
    return out;
  }
  out.empirical_rate = fit_geometric_rate(out.iterates, out.fixed_point);
  return out;
}

Lemma2Result check_lemma2(const PlantModel& plant, const CostModel& cost, const CertificationSamples& samples,
                          double tol) {
  std::vector<Eigen::VectorXd> outputs;
  for (const Eigen::VectorXd& x : samples.states) outputs.push_back(plant.output(x));
  if (outputs.empty() && plant.steady_output_map) {
    for (const Eigen::VectorXd& u : samples.inputs) outputs.push_back(plant.steady_output_map(u));
  }
  if (outputs.empty()) return {ControllerMonotonicity::NotEstablished, "no output samples"};

  const bool exact = cost.quadratic.has_value();
  const char* how = exact ? " (quadratic cost, exact)" : " (sampled, not proved)";

  if (plant.input_dim == 1 && plant.output_dim == 1) {
    bool convex = true;
    for (const Eigen::VectorXd& y : outputs) convex = convex && cost.hessian_y(y)(0, 0) >= -tol;
    if (convex) return {ControllerMonotonicity::Lemma2i, std::string("SISO plant, Phi_y convex") + how};
  }

  if (plant.affine && plant.affine->S.minCoeff() >= -tol) {
    bool ok = true;
    for (const Eigen::VectorXd& u : samples.inputs) {
      Eigen::MatrixXd H = cost.hessian_u(u);
      H.diagonal().setConstant(-1.0);  // only off-diagonals matter
      ok = ok && H.maxCoeff() <= tol;
    }
    for (const Eigen::VectorXd& y : outputs) ok = ok && cost.hessian_y(y).minCoeff() >= -tol;
    if (ok) {
      return {ControllerMonotonicity::Lemma2ii,
              std::string("affine k_y with S >= 0, Phi_u cross-curvature <= 0, Phi_y curvature >= 0") + how};
    }
  }
  return {ControllerMonotonicity::NotEstablished, "neither the SISO nor the affine branch applies"};
}

std::vector<OrderedPair> make_ordered_pairs(const Box& inputs, const Box& states, std::size_t count,
                                            std::uint64_t seed) {
  require_compact(inputs, "make_ordered_pairs");
  require_compact(states, "make_ordered_pairs");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution tie(0.5);
  auto uniform_in = [&](const Box& b) {
    Eigen::VectorXd p(b.dimension());
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = b.lower()[i] + unit(rng) * (b.upper()[i] - b.lower()[i]);
    return p;
  };

  std::vector<OrderedPair> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    OrderedPair pair;
    pair.v = uniform_in(inputs);
    pair.v_prime = pair.v;
    for (Eigen::Index i = 0; i < pair.v.size(); ++i) {
      if (!tie(rng)) pair.v_prime[i] += unit(rng) * (inputs.upper()[i] - pair.v[i]);
    }
    pair.x_prime = uniform_in(states);
    pair.x = pair.x_prime;
    for (Eigen::Index i = 0; i < pair.x.size(); ++i) pair.x[i] += unit(rng) * (states.upper()[i] - pair.x_prime[i]);
    out.push_back(std::move(pair));
  }
  return out;
}

Lemma5Result check_lemma5_sampled(const CostModel& cost, const SteadyStateOracle& oracle, const PlantModel& plant,
                                  const std::vector<OrderedPair>& pairs, double tol) {
  auto q = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return -cost.grad_phi_u(v) - oracle.grad_k_y(v).transpose() * cost.grad_phi_y(plant.output(x));
  };
  Lemma5Result out;
  for (const OrderedPair& pair : pairs) {
    if ((pair.v_prime - pair.v).minCoeff() < 0 || (pair.x - pair.x_prime).minCoeff() < 0) {
      throw DomainError("check_lemma5_sampled: pair is not ordered (need v <= v', x >= x')");
    }
    const Eigen::VectorXd diff = q(pair.v, pair.x) - q(pair.v_prime, pair.x_prime);
    for (Eigen::Index i = 0; i < diff.size(); ++i) {
      if (pair.v[i] != pair.v_prime[i]) continue;  // v_i < v'_i leaves the component free
      ++out.binding_components;
      if (diff[i] > tol) {
        ++out.violations;
        out.worst = std::max(out.worst, diff[i]);
      }
    }
    ++out.pairs_checked;
  }
  out.satisfied = out.violations == 0;
  return out;
}

Lemma3Result check_lemma3(const CostModel& cost, const SteadyStateOracle& oracle, const PlantModel& plant,
                          const CertificationSamples& samples) {
  Lemma3Result out;
  if (samples.inputs.empty()) {
    out.note = "no input samples";
    return out;
  }

  if (oracle.affine) {
    double modulus = std::numeric_limits<double>::infinity();
    for (const Eigen::VectorXd& u : samples.inputs) modulus = std::min(modulus, min_eigenvalue(cost.hessian_u(u)));
    if (modulus > 0) {
      out.verdict = ControllerSteadyState::Lemma3ii;
      out.modulus = modulus;
      out.sampled = !cost.quadratic.has_value();
      out.note = out.sampled ? "affine k_y, Phi_u strictly convex on samples (sampled, not proved)"
                             : "affine k_y, quadratic Phi_u strictly convex (exact)";
      return out;
    }
  }

  if (samples.states.empty()) {
    out.note = "no state samples for the parametric convexity check";
    return out;
  }
  std::vector<Eigen::VectorXd> anchors;
  for (const Eigen::VectorXd& x : samples.states) anchors.push_back(cost.grad_phi_y(plant.output(x)));

  double modulus = std::numeric_limits<double>::infinity();
  for (const Eigen::VectorXd& v : samples.inputs) {
    const Eigen::MatrixXd h_u = cost.hessian_u(v);
    const std::vector<Eigen::MatrixXd> h_k = steady_output_hessians(oracle, v, cost.output_dim);
    for (const Eigen::VectorXd& c : anchors) {
      Eigen::MatrixXd H = h_u;
      for (std::size_t l = 0; l < h_k.size(); ++l) H += c[static_cast<Eigen::Index>(l)] * h_k[l];
      modulus = std::min(modulus, min_eigenvalue(H));
    }
  }
  out.modulus = modulus;
  out.sampled = true;
  if (modulus > 0) {
    out.verdict = ControllerSteadyState::Lemma3i;
    std::ostringstream msg;
    msg << "Psi(v, x) strongly convex in v with sampled modulus " << modulus
        << " over reachable states (sampled, not proved)";
    out.note = msg.str();
  } else {
    out.note = "Psi(v, x) not strictly convex on the samples";
  }
  return out;
}

double ConstantEstimate::contraction() const {
  if (std::isnan(mu) || std::isnan(ell)) return std::numeric_limits<double>::quiet_NaN();
  return ell / mu;
}

ConstantEstimate estimate_constants(const CostModel& cost, const SteadyStateOracle& oracle, const Box& box,
                                    int grid_density) {
  require_compact(box, "estimate_constants");
  require_same_dimension(cost.input_dim, box.dimension(), "estimate_constants: box");
  ConstantEstimate out;

  if (oracle.affine) {
    const double s_norm = spectral_norm(oracle.affine->S);
    out.sigma = s_norm;
    out.sigma_source = "analytic ||S||";
    out.eta = 0.0;
    out.eta_source = "analytic (affine k_y)";
    if (cost.quadratic) {
      out.mu = 2.0 * cost.quadratic->beta_u;
      out.mu_source = "analytic 2 beta_u";
      out.ell = 2.0 * cost.quadratic->beta_y * s_norm * s_norm;
      out.ell_source = "analytic 2 beta_y ||S||^2";
      return out;
    }
  }

  const std::vector<Eigen::VectorXd> grid = capped_grid(box, grid_density);
  std::vector<Eigen::MatrixXd> sens;
  std::vector<Eigen::VectorXd> anchors;  // grad Phi_y(k_y(ubar))
  std::vector<Eigen::MatrixXd> curv_y;   // Hessian of Phi_y at k_y(ubar)
  sens.reserve(grid.size());
  for (const Eigen::VectorXd& u : grid) {
    const Eigen::VectorXd y = oracle.k_y(u);
    sens.push_back(oracle.grad_k_y(u));
    anchors.push_back(cost.grad_phi_y(y));
    curv_y.push_back(cost.hessian_y(y));
  }

  if (!oracle.affine) {
    double sigma = 0.0;
    double eta = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      sigma = std::max(sigma, spectral_norm(sens[i]));
      double sq = 0.0;
      for (const Eigen::MatrixXd& H : steady_output_hessians(oracle, grid[i], cost.output_dim)) {
        const double nrm = spectral_norm(H);
        sq += nrm * nrm;
      }
      eta = std::max(eta, std::sqrt(sq));
    }
    out.sigma = sigma;
    out.sigma_source = "sampled max over grid";
    out.eta = eta;
    out.eta_source = "sampled max of the differenced Hessian of k_y over grid";
  }

  double mu = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Eigen::MatrixXd h_u = cost.hessian_u(grid[i]);
    const std::vector<Eigen::MatrixXd> h_k = steady_output_hessians(oracle, grid[i], cost.output_dim);
    for (const Eigen::VectorXd& c : anchors) {
      Eigen::MatrixXd H = h_u;
      for (std::size_t l = 0; l < h_k.size(); ++l) H += c[static_cast<Eigen::Index>(l)] * h_k[l];
      mu = std::min(mu, min_eigenvalue(H));
    }
  }
  out.mu = mu;
  out.mu_source = "sampled min curvature over (u, ubar) grid";

  double ell = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      ell = std::max(ell, spectral_norm(sens[i].transpose() * curv_y[j] * sens[j]));
    }
  }
  out.ell = ell;
  out.ell_source = "sampled sup over (u, ubar) grid";
  return out;
}

Lemma4Result check_lemma4(double mu, double ell) {
  if (!(mu > 0)) throw DomainError("check_lemma4: mu must be positive");
  if (ell < 0) throw DomainError("check_lemma4: ell must be nonnegative");
  return {mu > ell, ell / mu};
}

Corollary1Result check_corollary1(double beta_u, double beta_y, const Eigen::MatrixXd& S, const Box& box) {
  Corollary1Result out;
  out.radius = box_radius(box);
  out.sensitivity_norm = spectral_norm(S);
  out.threshold = beta_y * out.radius * out.sensitivity_norm * out.sensitivity_norm;
  out.verified = beta_u > out.threshold;
  return out;
}

double suggest_regularization(double mu, double ell, double margin) {
  if (ell < 0) throw DomainError("suggest_regularization: ell must be nonnegative");
  if (margin < 0) throw DomainError("suggest_regularization: margin must be nonnegative");
  return std::max(0.0, 0.5 * (ell * (1.0 + margin) - mu));
}

ReferenceOptimum solve_reference_optimum(const CostModel& cost, const SteadyStateOracle& oracle, const Box& box,
                                         const BoxMinimizerOptions& options) {
  require_compact(box, "solve_reference_optimum");
  const ScalarFunction reduced = [&](const Eigen::VectorXd& u) { return cost.phi_u(u) + cost.phi_y(oracle.k_y(u)); };
  const GradientFunction grad = [&](const Eigen::VectorXd& u) { return reduced_gradient(cost, oracle, u); };
  const BoxMinimizerResult r = minimize_over_box(reduced, grad, box, options);
  return {r.argmin, r.residual, r.value, r.status};
}

Box reachable_state_box(const PlantModel& plant, const Box& input_box, const Eigen::VectorXd& x0, double horizon) {
  require_compact(input_box, "reachable_state_box");
  StepConfig cfg{1e-3, 0.1, 1e-6, horizon, horizon / 2000.0, 1e-13};
  Eigen::VectorXd lo = x0;
  Eigen::VectorXd hi = x0;
  for (const Eigen::VectorXd& u : {input_box.lower(), input_box.upper()}) {
    const VectorField field = [&](double, const Eigen::VectorXd& x) { return plant.dynamics(x, u); };
    const Trajectory traj = integrate_projected(field, Box::unbounded(plant.state_dim), x0, cfg);
    for (const Eigen::VectorXd& x : traj.states) {
      lo = lo.cwiseMin(x);
      hi = hi.cwiseMax(x);
    }
  }
  return Box(lo, hi);
}

bool CertificationReport::certified() const {
  return asm4_i != ControllerMonotonicity::NotEstablished && asm4_ii != ControllerSteadyState::NotEstablished &&
         asm4_iii != SmallGain::NotEstablished;
}

CertificationReport certify(const PlantModel& plant, const CostModel& cost, const Box& input_box,
                            const CertifyOptions& options) {
  plant.validate();
  cost.validate();
  require_compact(input_box, "certify");
  require_same_dimension(plant.input_dim, input_box.dimension(), "certify: input box");
  require_same_dimension(plant.input_dim, cost.input_dim, "certify: cost input dimension");
  require_same_dimension(plant.output_dim, cost.output_dim, "certify: cost output dimension");

  CertificationReport report;
  const SteadyStateOracle oracle = make_oracle(plant, input_box);

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(plant.state_dim);
  if (options.x0) {
    x0 = *options.x0;
  } else if (plant.state_region) {
    x0 = plant.state_region->midpoint();
  }
  const Box reachable = reachable_state_box(plant, input_box, x0, options.sandwich_horizon);
  const Box monotone_region = plant.state_region ? *plant.state_region : reachable;

  const MonotonicityReport mono = check_monotone(
      plant,
      make_sample_grid(monotone_region, input_box, options.monotone_points_per_axis, options.random_samples,
                       options.seed));
  report.plant_monotone = mono.satisfied;
  report.monotone_samples = mono.samples_checked;
  report.monotone_violations = mono.violations.size();
  report.sampled = true;
  report.notes.push_back(mono.satisfied ? "plant monotone w.r.t. the standard order on all samples (sampled, not proved)"
                                        : "plant monotonicity violated on samples");

  CertificationSamples samples;
  samples.inputs = capped_grid(input_box, options.grid_density);
  samples.states = reachable.grid(std::max(2, options.state_points_per_axis));

  // Assumption 4(i): monotonicity of the controller subsystem.
  if (!mono.satisfied) {
    report.notes.push_back("asm4(i): plant not monotone, controller monotonicity not assessed");
  } else {
    const Lemma2Result l2 = check_lemma2(plant, cost, samples);
    report.asm4_i = l2.verdict;
    report.notes.push_back("asm4(i): " + l2.note);
    if (l2.verdict == ControllerMonotonicity::NotEstablished) {
      const Lemma5Result l5 = check_lemma5_sampled(
          cost, oracle, plant, make_ordered_pairs(input_box, reachable, options.lemma5_pairs, options.seed));
      std::ostringstream msg;
      msg << "asm4(i): tangent-cone condition on " << l5.pairs_checked << " ordered pairs ("
          << l5.binding_components << " binding components, " << l5.violations << " violations)";
      report.notes.push_back(msg.str());
      if (l5.satisfied && l5.binding_components > 0) report.asm4_i = ControllerMonotonicity::Lemma5Sampled;
    }
  }

  // Assumption 4(ii): well-defined controller steady state.
  const Lemma3Result l3 = check_lemma3(cost, oracle, plant, samples);
  report.asm4_ii = l3.verdict;
  report.lemma3_modulus = l3.modulus;
  report.notes.push_back("asm4(ii): " + l3.note);

  // Assumption 4(iii): small-gain condition.
  report.constants = estimate_constants(cost, oracle, input_box, options.grid_density);
  const ConstantEstimate& k = report.constants;
  {
    std::ostringstream msg;
    msg << "constants: mu=" << k.mu << " [" << k.mu_source << "], ell=" << k.ell << " [" << k.ell_source
        << "], sigma=" << k.sigma << " [" << k.sigma_source << "], eta=" << k.eta << " [" << k.eta_source << "]";
    report.notes.push_back(msg.str());
  }
  if (k.mu > 0 && check_lemma4(k.mu, k.ell).verified) {
    report.asm4_iii = SmallGain::Lemma4;
    std::ostringstream msg;
    msg << "asm4(iii): mu > ell, contraction factor " << k.contraction();
    report.notes.push_back(msg.str());
  } else if (cost.quadratic && oracle.affine && oracle.affine->s.lpNorm<Eigen::Infinity>() == 0.0 &&
             cost.quadratic->y_ref.lpNorm<Eigen::Infinity>() == 0.0 &&
             check_corollary1(cost.quadratic->beta_u, cost.quadratic->beta_y, oracle.affine->S, input_box).verified) {
    report.asm4_iii = SmallGain::Corollary1;
    report.notes.push_back("asm4(iii): beta_u > beta_y u_hat ||S||^2 with linear k_y");
  } else {
    std::vector<Eigen::VectorXd> starts = input_box.corners();
    starts.push_back(input_box.midpoint());
    bool all = true;
    std::optional<Eigen::VectorXd> common;
    for (const Eigen::VectorXd& s : starts) {
      const SmallGainResult sg =
          small_gain_iterate(cost, oracle, input_box, s, options.small_gain_max_iters, options.small_gain_tol,
                             options.minimizer);
      if (!sg.converged) {
        all = false;
        break;
      }
      if (!common) {
        common = sg.fixed_point;
      } else if ((*common - sg.fixed_point).lpNorm<Eigen::Infinity>() > options.minimizer.multistart_tol) {
        all = false;
        break;
      }
    }
    std::ostringstream msg;
    msg << "asm4(iii): constants do not certify (mu=" << k.mu << ", ell=" << k.ell << "); iteration from "
        << starts.size() << " starts " << (all ? "converged to a common fixed point" : "did not agree")
        << " (finitely many starts, sampled)";
    report.notes.push_back(msg.str());
    if (all) report.asm4_iii = SmallGain::Iteration;
  }

  const SmallGainResult fixed = small_gain_iterate(cost, oracle, input_box, input_box.midpoint(),
                                                   options.small_gain_max_iters, options.small_gain_tol,
                                                   options.minimizer);
  if (fixed.converged) {
    report.fixed_point = fixed.fixed_point;
    report.empirical_rate = fixed.empirical_rate;
  } else {
    report.notes.push_back("small-gain iteration from the box midpoint: " + fixed.failure);
  }
  if (!report.certified()) {
    const double beta_bar = suggest_regularization(k.mu, k.ell);
    if (beta_bar > 0) {
      std::ostringstream msg;
      msg << "suggestion: add beta_bar ||u||^2 with beta_bar = " << beta_bar << " to Phi_u";
      report.notes.push_back(msg.str());
    }
  }
  return report;
}

}  // namespace ofo
