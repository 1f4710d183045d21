#include <cmath>
#include <cstdio>
#include <ostream>

#include "irsguard/experiment.hpp"
#include "json.hpp"

namespace irsguard {

namespace {

std::string format_with(double x, int digits) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string joined(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + format_number(v[i]);
  return out;
}

}  // namespace

std::string format_number(double x) { return format_with(x, 9); }

const std::vector<std::string>& result_header() {
  static const std::vector<std::string> h{
      "scenario",     "scheme",       "sweep_variable",   "sweep_value",      "trial",       "trial_seed",
      "status",       "sum_rate",     "secrecy_rate",     "leakage",          "max_leakage", "leakage_excess",
      "certified_margin", "an_fraction", "energy_efficiency", "iterations",   "rank_gap",    "power_margin",
      "feasible",     "wall_time",    "message"};
  return h;
}

void write_result_row_csv(std::ostream& os, const ResultRow& r) {
  os << csv_field(r.scenario) << ',' << csv_field(r.scheme) << ',' << csv_field(r.sweep_variable) << ','
     << format_number(r.sweep_value) << ',' << r.trial << ',' << r.trial_seed << ',' << csv_field(r.status) << ','
     << format_number(r.sum_rate) << ',' << format_number(r.secrecy_rate) << ',' << joined(r.leakage) << ','
     << format_number(r.max_leakage) << ',' << format_number(r.leakage_excess) << ','
     << format_number(r.certified_margin) << ',' << format_number(r.an_fraction) << ','
     << format_number(r.energy_efficiency) << ',' << r.iterations << ',' << format_number(r.rank_gap) << ','
     << format_number(r.power_margin) << ',' << r.feasible << ',' << format_number(r.wall_time) << ','
     << csv_field(r.message) << '\n';
}

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  const auto& h = result_header();
  for (std::size_t i = 0; i < h.size(); ++i) os << (i ? "," : "") << h[i];
  os << '\n';
  for (const auto& r : rows) write_result_row_csv(os, r);
}

void write_results_json(std::ostream& os, const std::vector<ResultRow>& rows) {
  // numbers go through the same 9-digit formatting as the CSV
  auto num = [](double x) { return nlohmann::json::parse(format_number(std::isfinite(x) ? x : 0.0)); };
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json o;
    o["scenario"] = r.scenario;
    o["scheme"] = r.scheme;
    o["sweep_variable"] = r.sweep_variable;
    o["sweep_value"] = num(r.sweep_value);
    o["trial"] = r.trial;
    o["trial_seed"] = r.trial_seed;
    o["status"] = r.status;
    o["sum_rate"] = num(r.sum_rate);
    o["secrecy_rate"] = num(r.secrecy_rate);
    nlohmann::json leak = nlohmann::json::array();
    for (double l : r.leakage) leak.push_back(num(l));
    o["leakage"] = leak;
    o["max_leakage"] = num(r.max_leakage);
    o["leakage_excess"] = num(r.leakage_excess);
    o["certified_margin"] = num(r.certified_margin);
    o["an_fraction"] = num(r.an_fraction);
    o["energy_efficiency"] = num(r.energy_efficiency);
    o["iterations"] = r.iterations;
    o["rank_gap"] = num(r.rank_gap);
    o["power_margin"] = num(r.power_margin);
    o["feasible"] = r.feasible;
    o["wall_time"] = num(r.wall_time);
    o["message"] = r.message;
    arr.push_back(std::move(o));
  }
  os << arr.dump(1) << '\n';
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << "scenario,scheme,sweep_value,trial,iteration,sum_rate,rank_gap,bf_status,phase_status\n";
  for (const auto& r : rows)
    os << csv_field(r.scenario) << ',' << csv_field(r.scheme) << ',' << format_number(r.sweep_value) << ','
       << r.trial << ',' << r.iteration << ',' << format_number(r.sum_rate) << ',' << format_number(r.rank_gap)
       << ',' << csv_field(r.bf_status) << ',' << csv_field(r.phase_status) << '\n';
}

void write_outage_csv(std::ostream& os, const std::vector<OutageRow>& rows) {
  os << "scenario,scheme,sweep_value,target_sinr_db,samples,outages,outage\n";
  for (const auto& r : rows)
    os << csv_field(r.scenario) << ',' << csv_field(r.scheme) << ',' << format_number(r.sweep_value) << ','
       << format_number(r.target_sinr_db) << ',' << r.samples << ',' << r.outages << ',' << format_number(r.outage)
       << '\n';
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "scheme,sweep_value,metric,count,mean,std,stderr\n";
  for (const auto& r : rows)
    os << csv_field(r.scheme) << ',' << format_number(r.sweep_value) << ',' << r.metric << ',' << r.count << ','
       << format_with(r.mean, 17) << ',' << format_with(r.stddev, 17) << ',' << format_with(r.stderr_mean, 17)
       << '\n';
}

}  // namespace irsguard
