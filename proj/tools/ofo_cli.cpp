#include "ofo_cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "ofo/certify.hpp"
#include "ofo/error.hpp"
#include "ofo/scenario.hpp"

namespace ofo::cli {

namespace {

/// Bad flag values found after parsing; reported with exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string scenario;
  std::string config;
  std::optional<double> beta_u;
  std::optional<double> w;
  std::optional<double> horizon;
  std::optional<double> segment_length;
  std::optional<double> error_tol;
  std::optional<double> max_step;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::string out_dir;
  bool plot = false;
};

void add_scenario_flags(CLI::App* cmd, Common& c) {
  auto* s = cmd->add_option("--scenario", c.scenario, "Builtin scenario (lti, gene)");
  auto* f = cmd->add_option("--config", c.config, "Scenario config file (JSON)");
  s->excludes(f);
  cmd->add_option("--beta-u", c.beta_u, "Override the input cost weight");
  cmd->add_option("--w", c.w, "Constant disturbance (LTI); replaces the schedule");
  cmd->add_option("--seed", c.seed, "Seed for sampled checks");
  cmd->add_option("--grid", c.grid, "Grid points per input axis for constant estimation");
}

void add_run_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--horizon", c.horizon, "Simulation horizon");
  cmd->add_option("--segment-length", c.segment_length, "Equal schedule segments of this length");
  cmd->add_option("--error-tol", c.error_tol, "Integrator error tolerance");
  cmd->add_option("--max-step", c.max_step, "Hard cap on the integrator step (disables the automatic cap)");
  cmd->add_option("--out", c.out_dir, "Output directory (default: $OFO_OUTPUT_DIR or ./ofo_out)");
  cmd->add_flag("--plot", c.plot, "Also write SVG plots of u(t) and y(t)");
}

ScenarioConfig load_config(const Common& c) {
  ScenarioConfig cfg;
  if (!c.config.empty()) {
    cfg = load_scenario(c.config);
  } else {
    try {
      cfg = builtin_scenario(c.scenario.empty() ? "lti" : c.scenario);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (c.beta_u) {
    if (!(*c.beta_u >= 0)) throw UsageError("--beta-u must be nonnegative");
    cfg.beta_u = *c.beta_u;
  }
  if (c.w) {
    if (cfg.channel != ExogenousChannel::Disturbance) throw UsageError("--w: scenario has no disturbance input");
    cfg.schedule = Schedule::constant(Eigen::VectorXd::Constant(1, *c.w), cfg.schedule.horizon());
  }
  if (c.seed) cfg.seed = *c.seed;
  if (c.grid) {
    if (*c.grid < 2) throw UsageError("--grid must be at least 2");
    cfg.grid_density = *c.grid;
  }
  if (c.horizon && !(*c.horizon > 0)) throw UsageError("--horizon must be positive");
  if (c.segment_length) {
    if (!(*c.segment_length > 0)) throw UsageError("--segment-length must be positive");
    cfg = cfg.with_segments(*c.segment_length, c.horizon.value_or(cfg.schedule.horizon()));
  } else if (c.horizon) {
    cfg.schedule = cfg.schedule.with_horizon(*c.horizon);
    cfg.step.max_time = *c.horizon;
  }
  if (c.error_tol) {
    if (!(*c.error_tol > 0)) throw UsageError("--error-tol must be positive");
    cfg.step.error_tolerance = *c.error_tol;
  }
  if (c.max_step) {
    if (!(*c.max_step > 0)) throw UsageError("--max-step must be positive");
    cfg.step.max_step = *c.max_step;
    cfg.step.initial_step = std::min(cfg.step.initial_step, *c.max_step);
    cfg.automatic_max_step = false;
  }
  return cfg;
}

std::string output_dir(const Common& c, const ScenarioConfig& cfg) {
  if (!c.out_dir.empty()) return c.out_dir;
  if (const char* env = std::getenv("OFO_OUTPUT_DIR"); env && *env) return env;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  return "ofo_out";
}

std::string vec(const Eigen::VectorXd& v) {
  std::ostringstream out;
  out << std::setprecision(10) << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
  out << ']';
  return out.str();
}

std::string mat(const Eigen::MatrixXd& m) {
  std::ostringstream out;
  out << '[';
  for (Eigen::Index r = 0; r < m.rows(); ++r) out << (r ? ", " : "") << vec(m.row(r).transpose());
  out << ']';
  return out.str();
}

std::vector<double> parse_alphas(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--alphas: not a number: '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("--alphas: the list is empty");
  return out;
}

void check_alpha(double alpha) {
  if (!(alpha > 0) || !std::isfinite(alpha)) throw UsageError("alpha must be positive");
}

int cmd_simulate(const Common& c, double alpha, std::ostream& out) {
  check_alpha(alpha);
  ScenarioConfig cfg = load_config(c);
  cfg.alphas = {alpha};
  cfg.validate();

  std::vector<SegmentReference> refs;
  for (std::size_t k = 0; k < cfg.schedule.segment_count(); ++k) refs.push_back(reference_for_segment(cfg, k));
  const AlphaRun run = run_alpha(cfg, alpha, refs);
  if (!run.ok) {
    out << "simulation failed: " << run.error << '\n';
    return 1;
  }
  const std::string dir = output_dir(c, cfg);
  ScenarioResult result;
  result.config = cfg;
  result.references = refs;
  result.runs = {run};
  const WrittenFiles files = write_outputs(result, dir, c.plot);

  out << "scenario " << cfg.name << ", alpha " << alpha << ", " << run.trajectory.size() << " samples\n";
  for (const SegmentMetrics& m : run.segments) {
    const std::size_t last = run.trajectory.last_index_of(m.segment);
    out << "segment " << m.segment << " (value " << vec(refs[m.segment].exogenous) << ", t = "
        << run.trajectory.times[last] << "): u = " << vec(run.trajectory.inputs[last])
        << ", y = " << vec(run.trajectory.outputs[last]) << ", u* = " << vec(refs[m.segment].u_star)
        << ", |u - u*| = " << m.input_error << '\n';
  }
  for (const std::string& p : files.paths) out << "wrote " << p << '\n';
  return 0;
}

int cmd_certify(const Common& c, bool json, std::ostream& out) {
  ScenarioConfig cfg = load_config(c);
  cfg.validate();
  CertifyOptions opts;
  opts.seed = cfg.seed;
  opts.grid_density = cfg.grid_density;
  opts.x0 = cfg.x0;
  bool all = true;
  for (const Eigen::VectorXd& v : cfg.distinct_values()) {
    const CertificationReport report = certify(cfg.plant_for(v), cfg.cost_for(v), cfg.input_box, opts);
    all = all && report.certified();
    out << "== " << cfg.name << ", " << to_string(cfg.channel) << " = " << vec(v) << '\n';
    out << (json ? to_json_string(report) + "\n" : summary(report));
  }
  out << (all ? "CERTIFIED\n" : "NOT CERTIFIED\n");
  return all ? 0 : 1;
}

// An empty optional keeps the scenario's own gain list.
int cmd_sweep(const Common& c, const std::optional<std::string>& alphas, std::ostream& out) {
  ScenarioConfig cfg = load_config(c);
  if (alphas) {
    const std::vector<double> list = parse_alphas(*alphas);
    for (double a : list) check_alpha(a);
    cfg.alphas = list;
  }
  cfg.validate();
  const ScenarioResult result = run_scenario(cfg);
  const WrittenFiles files = write_outputs(result, output_dir(c, cfg), c.plot);
  out << summary_table(result);
  for (const std::string& p : files.paths) out << "wrote " << p << '\n';
  return result.all_runs_ok() ? 0 : 1;
}

int cmd_steady(const Common& c, const std::vector<double>& u_values, bool finite_difference, double residual_tol,
               std::ostream& out) {
  ScenarioConfig cfg = load_config(c);
  cfg.validate();
  const Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(u_values.data(),
                                                             static_cast<Eigen::Index>(u_values.size()));
  if (u.size() != cfg.input_dim()) throw UsageError("--u: expected " + std::to_string(cfg.input_dim()) + " values");
  if (!cfg.input_box.contains(u)) {
    throw UsageError("--u " + vec(u) + " lies outside the input box " + vec(cfg.input_box.lower()) + " x " +
                     vec(cfg.input_box.upper()));
  }
  const PlantModel plant = cfg.plant_for(cfg.schedule.value(0));
  SteadyStateOptions steady;
  steady.tol = residual_tol;
  steady.use_analytic = !finite_difference;
  SensitivityOptions sopts;
  sopts.finite_difference = finite_difference;
  sopts.steady = steady;
  const SteadyState xs = steady_state(plant, u, steady);
  const SteadyOutput ys = steady_output(plant, u, steady);
  const Sensitivity grad = sensitivity(plant, u, cfg.input_box, sopts);
  out << "scenario " << cfg.name << ", " << to_string(cfg.channel) << " = " << vec(cfg.schedule.value(0)) << '\n';
  out << "u       = " << vec(u) << '\n';
  out << "k_x(u)  = " << vec(xs.state) << "  [" << to_string(xs.provenance) << "]\n";
  out << "k_y(u)  = " << vec(ys.output) << "  [" << to_string(ys.provenance) << "]\n";
  out << "dk_y/du = " << mat(grad.jacobian) << "  [" << to_string(grad.provenance) << "]\n";
  return 0;
}

int cmd_list(const std::string& show, std::ostream& out) {
  if (!show.empty()) {
    try {
      out << to_json_string(builtin_scenario(show)) << '\n';
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return 0;
  }
  for (const std::string& name : builtin_scenarios()) {
    const ScenarioConfig cfg = builtin_scenario(name);
    out << name << "  n=" << cfg.state_dim() << " m=" << cfg.input_dim() << " p=" << cfg.output_dim() << ", "
        << to_string(cfg.channel) << " schedule with " << cfg.schedule.segment_count() << " segments, horizon "
        << cfg.schedule.horizon() << '\n';
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Online feedback optimisation of monotone plants: simulation and certification"};
  app.name("ofo");
  app.require_subcommand(1, 1);

  Common common;
  double alpha = 1.0;
  std::optional<std::string> alphas;
  std::vector<double> u_values;
  bool json = false;
  bool finite_difference = false;
  double residual_tol = 1e-9;
  std::string show;

  auto* simulate = app.add_subcommand("simulate", "Run one closed-loop simulation and write its CSV");
  add_scenario_flags(simulate, common);
  add_run_flags(simulate, common);
  simulate->add_option("--alpha", alpha, "Controller gain")->capture_default_str();

  auto* certify_cmd = app.add_subcommand("certify", "Check the small-gain assumptions; exit 1 if not certified");
  add_scenario_flags(certify_cmd, common);
  certify_cmd->add_flag("--json", json, "Print the report as JSON");

  auto* sweep = app.add_subcommand("sweep", "Certify, then simulate every gain in a list");
  add_scenario_flags(sweep, common);
  add_run_flags(sweep, common);
  sweep->add_option("--alphas", alphas, "Comma-separated gains (default: the scenario's list)");

  auto* steady = app.add_subcommand("steady", "Print k_x(u), k_y(u) and the sensitivity with provenance");
  add_scenario_flags(steady, common);
  steady->add_option("--u", u_values, "Constant input")->required()->expected(1, -1);
  steady->add_flag("--finite-difference", finite_difference, "Simulate and difference instead of analytic maps");
  steady->add_option("--residual-tol", residual_tol, "Settling residual for simulated steady states")
      ->capture_default_str();

  auto* list = app.add_subcommand("scenario-list", "List builtin scenarios");
  list->add_option("--show", show, "Print the config of one scenario as JSON");

  std::vector<const char*> argv{"ofo"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate) return cmd_simulate(common, alpha, out);
    if (*certify_cmd) return cmd_certify(common, json, out);
    if (*sweep) return cmd_sweep(common, alphas, out);
    if (*steady) return cmd_steady(common, u_values, finite_difference, residual_tol, out);
    return cmd_list(show, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n' << "run 'ofo " << app.get_subcommands().front()->get_name()
        << " --help' for usage\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ofo::cli
