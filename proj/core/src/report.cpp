#include <cmath>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ofo/certify.hpp"

namespace ofo {

namespace {

nlohmann::json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string to_json_string(const CertificationReport& report) {
  const ConstantEstimate& k = report.constants;
  nlohmann::json j;
  j["certified"] = report.certified();
  j["sampled"] = report.sampled;
  j["plant"] = {{"monotone", report.plant_monotone},
                {"samples", report.monotone_samples},
                {"violations", report.monotone_violations}};
  j["asm4_i"] = to_string(report.asm4_i);
  j["asm4_ii"] = to_string(report.asm4_ii);
  j["asm4_iii"] = to_string(report.asm4_iii);
  j["constants"] = {
      {"mu", {{"value", number_or_null(k.mu)}, {"source", k.mu_source}}},
      {"ell", {{"value", number_or_null(k.ell)}, {"source", k.ell_source}}},
      {"sigma", {{"value", number_or_null(k.sigma)}, {"source", k.sigma_source}}},
      {"eta", {{"value", number_or_null(k.eta)}, {"source", k.eta_source}}},
      {"contraction", number_or_null(k.contraction())},
  };
  j["lemma3_modulus"] = number_or_null(report.lemma3_modulus);
  if (report.fixed_point) {
    j["fixed_point"] = std::vector<double>(report.fixed_point->data(),
                                           report.fixed_point->data() + report.fixed_point->size());
  } else {
    j["fixed_point"] = nullptr;
  }
  j["empirical_rate"] = number_or_null(report.empirical_rate);
  j["notes"] = report.notes;
  return j.dump(2);
}

std::string summary(const CertificationReport& report) {
  std::ostringstream out;
  out << std::setprecision(6);
  const ConstantEstimate& k = report.constants;
  out << "certified:   " << (report.certified() ? "yes" : "no") << (report.sampled ? " (sampled, not proved)" : "")
      << '\n';
  out << "plant:       " << (report.plant_monotone ? "monotone" : "not monotone") << " on "
      << report.monotone_samples << " samples\n";
  out << "asm4(i):     " << to_string(report.asm4_i) << '\n';
  out << "asm4(ii):    " << to_string(report.asm4_ii) << '\n';
  out << "asm4(iii):   " << to_string(report.asm4_iii) << '\n';
  out << "mu:          " << k.mu << "  [" << k.mu_source << "]\n";
  out << "ell:         " << k.ell << "  [" << k.ell_source << "]\n";
  out << "sigma:       " << k.sigma << "  [" << k.sigma_source << "]\n";
  out << "eta:         " << k.eta << "  [" << k.eta_source << "]\n";
  out << "contraction: " << k.contraction() << '\n';
  if (report.fixed_point) {
    out << "fixed point: " << report.fixed_point->transpose() << '\n';
    out << "rate:        " << report.empirical_rate << " (fitted)\n";
  }
  for (const std::string& note : report.notes) out << "  - " << note << '\n';
  return out.str();
}

}  // namespace ofo
