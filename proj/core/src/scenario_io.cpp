#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

#include "ofo/scenario.hpp"

namespace ofo {

namespace {

using nlohmann::json;

json encode(double v) {
  if (v == std::numeric_limits<double>::infinity()) return "inf";
  if (v == -std::numeric_limits<double>::infinity()) return "-inf";
  return v;
}

double decode(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::invalid_argument("config: expected a number, got \"" + s + "\"");
  }
  if (!j.is_number()) throw std::invalid_argument("config: expected a number, got " + j.dump());
  return j.get<double>();
}

json encode(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(encode(v[i]));
  return out;
}

Eigen::VectorXd decode_vector(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("config: expected an array, got " + j.dump());
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = decode(j[i]);
  return v;
}

json encode(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(encode(Eigen::VectorXd(m.row(r).transpose())));
  return out;
}

Eigen::MatrixXd decode_matrix(const json& j, Eigen::Index rows_if_empty = 0) {
  if (!j.is_array()) throw std::invalid_argument("config: expected a matrix (array of rows)");
  if (j.empty()) return Eigen::MatrixXd(rows_if_empty, 0);
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (j[r].size() != cols) throw std::invalid_argument("config: ragged matrix");
    m.row(static_cast<Eigen::Index>(r)) = decode_vector(j[r]).transpose();
  }
  return m;
}

json encode(const Box& b) { return {{"lower", encode(b.lower())}, {"upper", encode(b.upper())}}; }

Box decode_box(const json& j) { return Box(decode_vector(j.at("lower")), decode_vector(j.at("upper"))); }

/// Rejects keys outside `allowed` so that typos do not pass silently.
void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw std::invalid_argument(std::string("config: ") + where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known) throw std::invalid_argument(std::string("config: unknown key '") + it.key() + "' in " + where);
  }
}

}  // namespace

std::string to_json_string(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["family"] = to_string(c.family);
  if (c.family == PlantFamily::Lti) {
    j["plant"] = {{"A", encode(c.lti.A)}, {"B", encode(c.lti.B)}, {"C", encode(c.lti.C)}, {"Bw", encode(c.lti.Bw)}};
  } else {
    j["plant"] = {{"theta1", c.gene.theta1},
                  {"theta2", c.gene.theta2},
                  {"gamma1", c.gene.gamma1},
                  {"gamma2", c.gene.gamma2}};
  }
  j["state_region"] = c.state_region ? encode(*c.state_region) : json(nullptr);
  j["cost"] = {{"beta_u", c.beta_u}, {"beta_y", c.beta_y}, {"y_ref", encode(c.y_ref)}};
  j["disturbance"] = encode(c.w);
  j["input_box"] = encode(c.input_box);
  j["alphas"] = c.alphas;
  json values = json::array();
  for (const Eigen::VectorXd& v : c.schedule.values()) values.push_back(encode(v));
  j["schedule"] = {{"channel", to_string(c.channel)},
                   {"breakpoints", c.schedule.breakpoints()},
                   {"values", values},
                   {"horizon", c.schedule.horizon()}};
  j["x0"] = encode(c.x0);
  j["u0"] = encode(c.u0);
  j["integrator"] = {{"initial_step", c.step.initial_step},
                     {"max_step", c.step.max_step},
                     {"error_tolerance", c.step.error_tolerance},
                     {"output_interval", c.step.output_interval},
                     {"min_step", c.step.min_step},
                     {"automatic_max_step", c.automatic_max_step}};
  j["certify"] = {{"seed", c.seed}, {"grid_density", c.grid_density}};
  j["output_dir"] = c.output_dir;
  return j.dump(2);
}

ScenarioConfig scenario_from_json(const std::string& text) {
  const json j = json::parse(text);
  check_keys(j,
             {"name", "family", "plant", "state_region", "cost", "disturbance", "input_box", "alphas", "schedule",
              "x0", "u0", "integrator", "certify", "output_dir"},
             "scenario");
  ScenarioConfig c;
  c.name = j.at("name").get<std::string>();
  const std::string family = j.at("family").get<std::string>();
  const json& plant = j.at("plant");
  if (family == "lti") {
    c.family = PlantFamily::Lti;
    check_keys(plant, {"A", "B", "C", "Bw"}, "plant");
    c.lti.A = decode_matrix(plant.at("A"));
    c.lti.B = decode_matrix(plant.at("B"), c.lti.A.rows());
    c.lti.C = decode_matrix(plant.at("C"));
    c.lti.Bw = plant.contains("Bw") ? decode_matrix(plant.at("Bw"), c.lti.A.rows())
                                    : Eigen::MatrixXd(c.lti.A.rows(), 0);
  } else if (family == "gene") {
    c.family = PlantFamily::Gene;
    check_keys(plant, {"theta1", "theta2", "gamma1", "gamma2"}, "plant");
    c.gene.theta1 = plant.value("theta1", c.gene.theta1);
    c.gene.theta2 = plant.value("theta2", c.gene.theta2);
    c.gene.gamma1 = plant.value("gamma1", c.gene.gamma1);
    c.gene.gamma2 = plant.value("gamma2", c.gene.gamma2);
  } else {
    throw std::invalid_argument("config: unknown plant family '" + family + "'");
  }
  if (j.contains("state_region") && !j["state_region"].is_null()) c.state_region = decode_box(j["state_region"]);

  const json& cost = j.at("cost");
  check_keys(cost, {"beta_u", "beta_y", "y_ref"}, "cost");
  c.beta_u = decode(cost.at("beta_u"));
  c.beta_y = decode(cost.at("beta_y"));
  c.y_ref = decode_vector(cost.at("y_ref"));
  c.w = j.contains("disturbance") ? decode_vector(j["disturbance"]) : Eigen::VectorXd(0);
  c.input_box = decode_box(j.at("input_box"));
  c.alphas.clear();
  for (const json& a : j.at("alphas")) c.alphas.push_back(decode(a));

  const json& sched = j.at("schedule");
  check_keys(sched, {"channel", "breakpoints", "values", "horizon"}, "schedule");
  const std::string channel = sched.at("channel").get<std::string>();
  if (channel == "disturbance") {
    c.channel = ExogenousChannel::Disturbance;
  } else if (channel == "reference") {
    c.channel = ExogenousChannel::Reference;
  } else {
    throw std::invalid_argument("config: unknown schedule channel '" + channel + "'");
  }
  std::vector<Eigen::VectorXd> values;
  for (const json& v : sched.at("values")) values.push_back(decode_vector(v));
  c.schedule = Schedule(sched.value("breakpoints", std::vector<double>{}), std::move(values),
                        decode(sched.at("horizon")));

  c.x0 = decode_vector(j.at("x0"));
  c.u0 = decode_vector(j.at("u0"));
  if (j.contains("integrator")) {
    const json& in = j["integrator"];
    check_keys(in, {"initial_step", "max_step", "error_tolerance", "output_interval", "min_step", "automatic_max_step"},
               "integrator");
    c.step.initial_step = in.value("initial_step", c.step.initial_step);
    c.step.max_step = in.value("max_step", c.step.max_step);
    c.step.error_tolerance = in.value("error_tolerance", c.step.error_tolerance);
    c.step.output_interval = in.value("output_interval", c.step.output_interval);
    c.step.min_step = in.value("min_step", c.step.min_step);
    c.automatic_max_step = in.value("automatic_max_step", c.automatic_max_step);
  }
  c.step.max_time = c.schedule.horizon();
  if (j.contains("certify")) {
    const json& cert = j["certify"];
    check_keys(cert, {"seed", "grid_density"}, "certify");
    c.seed = cert.value("seed", c.seed);
    c.grid_density = cert.value("grid_density", c.grid_density);
  }
  c.output_dir = j.value("output_dir", std::string());
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return scenario_from_json(buffer.str());
}

void save_scenario(const ScenarioConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json_string(config) << '\n';
}

}  // namespace ofo
