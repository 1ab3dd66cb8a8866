#include "ofo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

#include "ofo/error.hpp"

namespace ofo {

const char* to_string(PlantFamily family) {
  switch (family) {
    case PlantFamily::Lti: return "lti";
    case PlantFamily::Gene: return "gene";
  }
  return "unknown";
}

const char* to_string(ExogenousChannel channel) {
  switch (channel) {
    case ExogenousChannel::Disturbance: return "disturbance";
    case ExogenousChannel::Reference: return "reference";
  }
  return "unknown";
}

Eigen::Index ScenarioConfig::state_dim() const {
  return family == PlantFamily::Lti ? lti.A.rows() : 2;
}

Eigen::Index ScenarioConfig::output_dim() const {
  return family == PlantFamily::Lti ? lti.C.rows() : 1;
}

void ScenarioConfig::validate() const {
  if (name.empty()) throw std::invalid_argument("scenario: name must not be empty");
  if (!input_box.is_compact()) throw DomainError("scenario: input box must be compact");
  if (family == PlantFamily::Lti) {
    const Eigen::Index n = lti.A.rows();
    if (n == 0 || lti.A.cols() != n) throw DimensionError("scenario: A must be square and nonempty");
    require_same_dimension(n, lti.B.rows(), "scenario: B rows");
    require_same_dimension(input_dim(), lti.B.cols(), "scenario: B columns");
    require_same_dimension(n, lti.C.cols(), "scenario: C columns");
    require_same_dimension(n, lti.Bw.rows(), "scenario: Bw rows");
  } else {
    require_same_dimension(1, input_dim(), "scenario: gene input dimension");
    if (channel != ExogenousChannel::Reference) {
      throw std::invalid_argument("scenario: the gene plant has no disturbance input");
    }
  }
  if (!(beta_u >= 0) || !(beta_y >= 0)) throw DomainError("scenario: cost weights must be nonnegative");
  if (alphas.empty()) throw std::invalid_argument("scenario: alpha list is empty");
  for (double a : alphas) {
    if (!(a > 0) || !std::isfinite(a)) throw DomainError("scenario: every alpha must be positive");
  }
  const Eigen::Index exo = channel == ExogenousChannel::Disturbance ? lti.Bw.cols() : output_dim();
  require_same_dimension(exo, schedule.value(0).size(), "scenario: schedule values");
  if (channel == ExogenousChannel::Disturbance) {
    require_same_dimension(output_dim(), y_ref.size(), "scenario: y_ref");
  } else if (family == PlantFamily::Lti) {
    require_same_dimension(lti.Bw.cols(), w.size(), "scenario: w");
  }
  require_same_dimension(state_dim(), x0.size(), "scenario: x0");
  require_same_dimension(input_dim(), u0.size(), "scenario: u0");
  if (!input_box.contains(u0, kBoxTolerance)) throw DomainError("scenario: u0 lies outside the input box");
  if (state_region) require_same_dimension(state_dim(), state_region->dimension(), "scenario: state region");
  step.validate();
  if (grid_density < 2) throw DomainError("scenario: grid density must be at least 2");
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  auto same_vec = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.size() == b.size() && a == b;
  };
  return name == o.name && family == o.family && lti == o.lti && gene == o.gene && state_region == o.state_region &&
         beta_u == o.beta_u && beta_y == o.beta_y && same_vec(y_ref, o.y_ref) && same_vec(w, o.w) &&
         input_box == o.input_box && alphas == o.alphas && channel == o.channel && schedule == o.schedule &&
         same_vec(x0, o.x0) && same_vec(u0, o.u0) && step == o.step && automatic_max_step == o.automatic_max_step &&
         seed == o.seed && grid_density == o.grid_density && output_dir == o.output_dir;
}

PlantModel ScenarioConfig::plant_for(const Eigen::VectorXd& exogenous) const {
  if (family == PlantFamily::Gene) return make_gene_plant(gene, state_region);
  return make_lti_plant(lti, channel == ExogenousChannel::Disturbance ? exogenous : w, state_region);
}

CostModel ScenarioConfig::cost_for(const Eigen::VectorXd& exogenous) const {
  return make_quadratic_cost(beta_u, beta_y, channel == ExogenousChannel::Reference ? exogenous : y_ref,
                             input_dim());
}

SystemFactory ScenarioConfig::factory(double alpha) const {
  const ScenarioConfig self = *this;
  return [self, alpha](const Eigen::VectorXd& exogenous) {
    PlantModel plant = self.plant_for(exogenous);
    OfoController controller = make_controller(alpha, self.input_box, plant);
    return assemble_closed_loop(std::move(plant), std::move(controller), self.cost_for(exogenous));
  };
}

std::vector<Eigen::VectorXd> ScenarioConfig::distinct_values() const {
  std::vector<Eigen::VectorXd> out;
  for (const Eigen::VectorXd& v : schedule.values()) {
    if (std::none_of(out.begin(), out.end(), [&](const Eigen::VectorXd& seen) { return seen == v; })) {
      out.push_back(v);
    }
  }
  return out;
}

ScenarioConfig ScenarioConfig::with_segments(double segment_length, double horizon) const {
  ScenarioConfig out = *this;
  out.schedule = Schedule::uniform(distinct_values(), segment_length, horizon);
  out.step.max_time = horizon;
  return out;
}

ScenarioConfig build_lti_scenario() {
  ScenarioConfig c;
  c.name = "lti";
  c.family = PlantFamily::Lti;
  c.lti.A.resize(2, 2);
  c.lti.A << -1.0, 1.0, 0.5, -1.0;
  c.lti.B = Eigen::Vector2d(1.0, 0.0);
  c.lti.Bw = Eigen::Vector2d(0.9, 0.0);
  c.lti.C = Eigen::RowVector2d(0.0, 1.0);
  c.state_region = Box(Eigen::Vector2d(-5.0, -5.0), Eigen::Vector2d(5.0, 5.0));
  c.beta_u = 1.1;
  c.beta_y = 1.0;
  c.y_ref = Eigen::VectorXd::Constant(1, 2.0);
  c.w = Eigen::VectorXd::Zero(1);
  c.input_box = Box::interval(-0.7, 1.0);
  c.alphas = {1e-2, 1e-1, 1.0, 1e1, 1e2};
  c.channel = ExogenousChannel::Disturbance;
  const double horizon = 1000.0;
  c.schedule = Schedule::uniform({Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, -1.0)}, 250.0,
                                 horizon);
  c.x0 = Eigen::Vector2d::Zero();
  c.u0 = Eigen::VectorXd::Zero(1);
  c.step = StepConfig{1e-3, 0.5, 1e-6, horizon, 0.1, 1e-13};
  return c;
}

ScenarioConfig build_gene_scenario() {
  ScenarioConfig c;
  c.name = "gene";
  c.family = PlantFamily::Gene;
  c.gene = GeneParameters{};
  c.state_region = Box(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(5.0, 5.0));
  c.beta_u = 10.0;  // mu / 2 with mu = 20
  c.beta_y = 1.0;
  c.y_ref = Eigen::VectorXd::Zero(1);
  c.w = Eigen::VectorXd::Zero(0);
  c.input_box = Box::interval(0.0, 0.6);
  // The plant settles in roughly 20 time units; 3e-4 is the one gain slow enough for
  // the loop to track without overshoot, and the segments are sized for it.
  c.alphas = {3e-4, 1e-2, 1e-1, 1.0, 1e1, 1e2};
  c.channel = ExogenousChannel::Reference;
  const double horizon = 3300.0;
  c.schedule = Schedule({1100.0, 2200.0},
                        {Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 2.0),
                         Eigen::VectorXd::Constant(1, 1.0)},
                        horizon);
  c.x0 = Eigen::Vector2d::Zero();
  c.u0 = Eigen::VectorXd::Zero(1);
  c.step = StepConfig{1e-3, 0.5, 1e-6, horizon, 0.1, 1e-13};
  return c;
}

std::vector<std::string> builtin_scenarios() { return {"lti", "gene"}; }

ScenarioConfig builtin_scenario(const std::string& name) {
  if (name == "lti") return build_lti_scenario();
  if (name == "gene") return build_gene_scenario();
  throw std::invalid_argument("unknown scenario '" + name + "' (known: lti, gene)");
}

// --- Running ------------------------------------------------------------------

double AlphaRun::final_error() const {
  if (segments.empty()) return std::numeric_limits<double>::quiet_NaN();
  return segments.back().input_error;
}

bool ScenarioResult::certified() const {
  return !certificates.empty() && std::all_of(certificates.begin(), certificates.end(),
                                              [](const CertificateEntry& c) { return c.report.certified(); });
}

bool ScenarioResult::all_runs_ok() const {
  return std::all_of(runs.begin(), runs.end(), [](const AlphaRun& r) { return r.ok; });
}

SegmentReference reference_for_segment(const ScenarioConfig& config, std::size_t segment) {
  SegmentReference ref;
  ref.segment = segment;
  ref.exogenous = config.schedule.value(segment);
  const PlantModel plant = config.plant_for(ref.exogenous);
  const CostModel cost = config.cost_for(ref.exogenous);
  const SteadyStateOracle oracle = make_oracle(plant, config.input_box);
  const ReferenceOptimum opt = solve_reference_optimum(cost, oracle, config.input_box);
  ref.u_star = opt.u;
  ref.residual = opt.residual;
  ref.status = opt.status;
  ref.x_star = oracle.k_x(opt.u);
  ref.y_star = oracle.k_y(opt.u);
  const SmallGainResult sg = small_gain_iterate(cost, oracle, config.input_box, config.input_box.midpoint());
  if (sg.converged) ref.u_small_gain = sg.fixed_point;
  return ref;
}

namespace {

double distance_outside(const Eigen::VectorXd& u, const Box& box) {
  const Eigen::VectorXd below = (box.lower() - u).cwiseMax(0.0);
  const Eigen::VectorXd above = (u - box.upper()).cwiseMax(0.0);
  return std::max(below.maxCoeff(), above.maxCoeff());
}

}  // namespace

AlphaRun run_alpha(const ScenarioConfig& config, double alpha, const std::vector<SegmentReference>& references,
                   double settling_band) {
  AlphaRun run;
  run.alpha = alpha;
  try {
    run.trajectory = simulate_closed_loop(config.factory(alpha), config.x0, config.u0, config.schedule, config.step,
                                          config.automatic_max_step);
  } catch (const std::exception& e) {
    run.error = e.what();
    return run;
  }
  run.ok = true;

  const ClosedLoopTrajectory& traj = run.trajectory;
  for (const Eigen::VectorXd& u : traj.inputs) {
    run.max_box_violation = std::max(run.max_box_violation, distance_outside(u, config.input_box));
  }
  const Eigen::VectorXd width = config.input_box.width().cwiseMax(1e-300);
  std::size_t first = 0;
  for (std::size_t k = 0; k < config.schedule.segment_count(); ++k) {
    const std::size_t last = traj.last_index_of(k);
    const SegmentReference& ref = references.at(k);
    SegmentMetrics m;
    m.segment = k;
    m.input_error = (traj.inputs[last] - ref.u_star).lpNorm<Eigen::Infinity>();
    m.output_error = (traj.outputs[last] - ref.y_star).lpNorm<Eigen::Infinity>();
    auto in_band = [&](std::size_t i) {
      return ((traj.inputs[i] - ref.u_star).cwiseAbs().cwiseQuotient(width)).maxCoeff() <= settling_band;
    };
    m.settling_time = std::numeric_limits<double>::quiet_NaN();
    if (in_band(last)) {
      std::size_t i = last;
      while (i > first && in_band(i - 1)) --i;
      m.settling_time = traj.times[i] - config.schedule.segment_start(k);
    }
    run.segments.push_back(m);
    first = last + 1;
  }
  return run;
}

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  config.validate();
  ScenarioResult result;
  result.config = config;

  if (options.certify) {
    CertifyOptions opts;
    opts.seed = config.seed;
    opts.grid_density = config.grid_density;
    opts.x0 = config.x0;
    for (const Eigen::VectorXd& v : config.distinct_values()) {
      result.certificates.push_back({v, certify(config.plant_for(v), config.cost_for(v), config.input_box, opts)});
    }
  }
  for (std::size_t k = 0; k < config.schedule.segment_count(); ++k) {
    result.references.push_back(reference_for_segment(config, k));
  }

  if (options.parallel && config.alphas.size() > 1) {
    std::vector<std::future<AlphaRun>> pending;
    for (double alpha : config.alphas) {
      pending.push_back(std::async(std::launch::async, [&config, &result, &options, alpha] {
        return run_alpha(config, alpha, result.references, options.settling_band);
      }));
    }
    for (auto& f : pending) result.runs.push_back(f.get());
  } else {
    for (double alpha : config.alphas) {
      result.runs.push_back(run_alpha(config, alpha, result.references, options.settling_band));
    }
  }
  return result;
}

// --- Serialisation of results --------------------------------------------------

namespace {

void append_row(std::ostringstream& out, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ',' << v[i];
}

void append_header(std::ostringstream& out, const char* prefix, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) out << ',' << prefix << '_' << i;
}

std::string format_vector(const Eigen::VectorXd& v) {
  std::ostringstream out;
  out << std::setprecision(8);
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
  return out.str();
}

}  // namespace

std::string trajectory_csv(const AlphaRun& run, const std::vector<SegmentReference>& references) {
  const ClosedLoopTrajectory& t = run.trajectory;
  std::ostringstream out;
  out << 't';
  append_header(out, "x", t.state_dim);
  append_header(out, "u", t.input_dim);
  append_header(out, "y", t.output_dim);
  append_header(out, "ustar", t.input_dim);
  append_header(out, "ystar", t.output_dim);
  out << '\n' << std::setprecision(12);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const SegmentReference& ref = references.at(t.segments[i]);
    out << t.times[i];
    append_row(out, t.states[i]);
    append_row(out, t.inputs[i]);
    append_row(out, t.outputs[i]);
    append_row(out, ref.u_star);
    append_row(out, ref.y_star);
    out << '\n';
  }
  return out.str();
}

std::string alpha_tag(double alpha) {
  std::ostringstream out;
  out << alpha;
  return out.str();
}

std::string summary_table(const ScenarioResult& result) {
  std::ostringstream out;
  out << "scenario " << result.config.name << " (" << to_string(result.config.channel) << " schedule, "
      << result.config.schedule.segment_count() << " segments, horizon " << result.config.schedule.horizon()
      << ")\n";
  if (!result.certificates.empty()) {
    out << "certified: " << (result.certified() ? "yes" : "no") << '\n';
    for (const CertificateEntry& c : result.certificates) {
      out << "  value " << format_vector(c.exogenous) << ": " << to_string(c.report.asm4_i) << ", "
          << to_string(c.report.asm4_ii) << ", " << to_string(c.report.asm4_iii)
          << ", contraction " << c.report.constants.contraction() << '\n';
    }
  }
  out << "\nsegment  start  value  u*  y*  residual  small-gain\n";
  for (const SegmentReference& r : result.references) {
    out << r.segment << "  " << result.config.schedule.segment_start(r.segment) << "  " << format_vector(r.exogenous)
        << "  " << format_vector(r.u_star) << "  " << format_vector(r.y_star) << "  " << r.residual << "  "
        << (r.u_small_gain.size() ? format_vector(r.u_small_gain) : std::string("failed")) << '\n';
  }
  out << "\nalpha  status  final_error";
  for (std::size_t k = 0; k < result.config.schedule.segment_count(); ++k) {
    out << "  err_" << k << "  settle_" << k;
  }
  out << '\n';
  for (const AlphaRun& run : result.runs) {
    out << run.alpha << "  ";
    if (!run.ok) {
      out << "failed (" << run.error << ")\n";
      continue;
    }
    out << "ok  " << run.final_error();
    for (const SegmentMetrics& m : run.segments) out << "  " << m.input_error << "  " << m.settling_time;
    out << '\n';
  }
  return out.str();
}

WrittenFiles write_outputs(const ScenarioResult& result, const std::string& directory, bool plots) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  WrittenFiles files;
  auto write = [&](const std::string& name, const std::string& content) {
    const std::string path = (fs::path(directory) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    files.paths.push_back(path);
  };

  for (const AlphaRun& run : result.runs) {
    if (!run.ok) continue;
    const std::string stem = result.config.name + "_alpha_" + alpha_tag(run.alpha);
    write(stem + ".csv", trajectory_csv(run, result.references));
    if (plots) {
      write(stem + "_u.svg", input_plot_svg(run, result.references, result.config.input_box));
      write(stem + "_y.svg", output_plot_svg(run, result.references));
    }
  }
  write("summary.txt", summary_table(result));
  if (!result.certificates.empty()) {
    nlohmann::json all = nlohmann::json::array();
    for (const CertificateEntry& c : result.certificates) {
      all.push_back({{"value", std::vector<double>(c.exogenous.data(), c.exogenous.data() + c.exogenous.size())},
                     {"report", nlohmann::json::parse(to_json_string(c.report))}});
    }
    write("certificate.json", all.dump(2) + "\n");
  }
  return files;
}

}  // namespace ofo
