#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ofo/certify.hpp"
#include "ofo/control.hpp"
#include "ofo/cost.hpp"
#include "ofo/geometry.hpp"
#include "ofo/integrator.hpp"
#include "ofo/plant.hpp"
#include "ofo/schedule.hpp"

namespace ofo {

enum class PlantFamily { Lti, Gene };
/// Which quantity the schedule drives: the plant disturbance w or the output reference y_ref.
enum class ExogenousChannel { Disturbance, Reference };

const char* to_string(PlantFamily family);
const char* to_string(ExogenousChannel channel);

struct ScenarioConfig {
  std::string name;
  PlantFamily family = PlantFamily::Lti;
  LtiMatrices lti;
  GeneParameters gene;
  std::optional<Box> state_region;

  double beta_u = 1.0;
  double beta_y = 1.0;
  /// Fixed reference when the schedule drives the disturbance.
  Eigen::VectorXd y_ref;
  /// Fixed disturbance when the schedule drives the reference (LTI only).
  Eigen::VectorXd w;
  Box input_box = Box::interval(0.0, 1.0);

  std::vector<double> alphas;
  ExogenousChannel channel = ExogenousChannel::Disturbance;
  Schedule schedule = Schedule::constant(Eigen::VectorXd::Zero(1), 1.0);

  Eigen::VectorXd x0;
  Eigen::VectorXd u0;
  /// max_time is ignored; the schedule sets the horizon.
  StepConfig step{1e-3, 0.5, 1e-6, 1.0, 0.1, 1e-13};
  bool automatic_max_step = true;

  std::uint64_t seed = 0;
  int grid_density = 41;
  std::string output_dir;

  void validate() const;
  bool operator==(const ScenarioConfig& other) const;

  Eigen::Index state_dim() const;
  Eigen::Index input_dim() const { return input_box.dimension(); }
  Eigen::Index output_dim() const;

  /// Plant and cost for one schedule value.
  PlantModel plant_for(const Eigen::VectorXd& exogenous) const;
  CostModel cost_for(const Eigen::VectorXd& exogenous) const;
  SystemFactory factory(double alpha) const;
  /// Schedule values in order of first appearance, duplicates removed.
  std::vector<Eigen::VectorXd> distinct_values() const;
  /// Same scenario with equal-length segments of `segment_length` up to `horizon`.
  ScenarioConfig with_segments(double segment_length, double horizon) const;
};

ScenarioConfig build_lti_scenario();
ScenarioConfig build_gene_scenario();

std::vector<std::string> builtin_scenarios();
/// Throws std::invalid_argument for unknown names.
ScenarioConfig builtin_scenario(const std::string& name);

// Config files are JSON objects; infinite bounds are written as "inf"/"-inf".
std::string to_json_string(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);
void save_scenario(const ScenarioConfig& config, const std::string& path);

struct SegmentReference {
  std::size_t segment = 0;
  Eigen::VectorXd exogenous;
  Eigen::VectorXd u_star;
  Eigen::VectorXd y_star;
  Eigen::VectorXd x_star;
  double residual = 0.0;
  MinimizerStatus status = MinimizerStatus::Converged;
  /// Fixed point of the small-gain iteration from the box midpoint; empty if it failed.
  Eigen::VectorXd u_small_gain;
};

struct SegmentMetrics {
  std::size_t segment = 0;
  /// ||u - u*||_inf and ||y - y*||_inf at the last sample of the segment.
  double input_error = 0.0;
  double output_error = 0.0;
  /// Time from the segment start after which u stays within the settling band; NaN if never.
  double settling_time = 0.0;
};

struct AlphaRun {
  double alpha = 0.0;
  bool ok = false;
  std::string error;
  ClosedLoopTrajectory trajectory;
  std::vector<SegmentMetrics> segments;
  /// Largest distance of any sampled u from the input box.
  double max_box_violation = 0.0;

  /// Input error at the end of the final segment.
  double final_error() const;
};

struct CertificateEntry {
  Eigen::VectorXd exogenous;
  CertificationReport report;
};

struct ScenarioResult {
  ScenarioConfig config;
  std::vector<CertificateEntry> certificates;
  std::vector<SegmentReference> references;
  std::vector<AlphaRun> runs;

  bool certified() const;
  bool all_runs_ok() const;
};

struct RunOptions {
  bool certify = true;
  bool parallel = true;
  /// Settling band as a fraction of the box width per input coordinate.
  double settling_band = 0.02;
};

/// Certification per distinct schedule value, reference optima per segment,
/// and one closed-loop run per alpha. A failing run is recorded without
/// aborting the others.
ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

SegmentReference reference_for_segment(const ScenarioConfig& config, std::size_t segment);
AlphaRun run_alpha(const ScenarioConfig& config, double alpha, const std::vector<SegmentReference>& references,
                   double settling_band = 0.02);

/// Columns t, x_i, u_i, y_i, ustar_i, ystar_i.
std::string trajectory_csv(const AlphaRun& run, const std::vector<SegmentReference>& references);
std::string summary_table(const ScenarioResult& result);
std::string alpha_tag(double alpha);

struct WrittenFiles {
  std::vector<std::string> paths;
};

/// CSV per alpha, summary.txt and certificate.json under `directory`; SVG
/// plots of u(t) and y(t) when `plots` is set.
WrittenFiles write_outputs(const ScenarioResult& result, const std::string& directory, bool plots = false);

/// Line charts of u(t) and y(t) with dashed references and dotted input bounds.
std::string input_plot_svg(const AlphaRun& run, const std::vector<SegmentReference>& references, const Box& box);
std::string output_plot_svg(const AlphaRun& run, const std::vector<SegmentReference>& references);

}  // namespace ofo
