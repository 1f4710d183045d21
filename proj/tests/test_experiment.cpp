#include <cmath>
#include <map>
#include <sstream>

#include "doctest.h"
#include "irsguard/experiment.hpp"
#include "json.hpp"

using namespace irsguard;

namespace {

int error_line(const std::string& text) {
  try {
    parse_spec(text);
  } catch (const SpecError& e) {
    return e.line();
  }
  return -1;
}

ExperimentSpec tiny_spec() {
  ExperimentSpec s = parse_spec(R"({
    "scenario": "sumrate_vs_power",
    "trials": 2,
    "seed": 9,
    "sweep": {"values": [10, 20]},
    "config": {"max_iter": 3, "leakage_samples": 50}
  })");
  return s;
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

TEST_CASE("every scenario has valid defaults") {
  for (const auto& id : scenario_ids()) {
    const ExperimentSpec s = default_spec(id);
    CHECK_NOTHROW(s.validate());
    CHECK(parse_spec("{\"scenario\": \"" + id + "\"}").grid == s.grid);
  }
  CHECK_THROWS_AS(default_spec("nope"), SpecError);
}

TEST_CASE("spec errors point at the offending line") {
  CHECK(error_line("{\n  \"scenario\": \"sumrate_vs_power\",\n  \"trails\": 3\n}") == 3);
  CHECK(error_line("{\n  \"scenario\": \"sumrate_vs_power\",\n  \"trials\": \"many\"\n}") == 3);
  CHECK(error_line("{\n  \"scenario\": \"warp_drive\"\n}") == 2);
  CHECK(error_line("{\n  \"scenario\": \"sumrate_vs_power\",\n  \"config\": {\n    \"nt\": 1.5\n  }\n}") == 4);
  CHECK(error_line("{\n  \"scenario\": \"sumrate_vs_power\",\n  \"schemes\": [\"proposed\", \"proposed\"]\n}") == 3);
  CHECK(error_line("{\n  \"scenario\": \"sumrate_vs_power\",\n  \"sweep\": {\"variable\": \"mass\"}\n}") == 3);
  CHECK(error_line("{\n  \"scenario\": \"sumrate_vs_power\",\n  \"trials\": 0\n}") == 3);
  CHECK(error_line("{\n  \"scenario\": \"sumrate_vs_power\",\n  \"tau\": -1\n}") == 3);
  CHECK(error_line("{\n  \"scenario\": \"sumrate_vs_power\"\n  \"trials\": 2\n}") == 3);
  CHECK(error_line("{\n  \"trials\": 2\n}") == 1);
  CHECK(error_line("[1, 2]") == 1);
  try {
    parse_spec("{\n  \"scenario\": \"sumrate_vs_power\",\n  \"trails\": 3\n}");
  } catch (const SpecError& e) {
    CHECK(std::string(e.what()).find("line 3") == 0);
    CHECK(std::string(e.what()).find("trails") != std::string::npos);
  }
}

TEST_CASE("sweep values are applied to the configuration") {
  const ExperimentSpec s = default_spec("multi_irs_split");
  const SystemConfig c = s.config_at(3);
  CHECK(c.irs_sizes == std::vector<int>{3, 7});
  const ExperimentSpec t = default_spec("secrecy_vs_tau");
  CHECK(t.config_at(2.0).normalized().tau[0][0] == 2.0);
  const ExperimentSpec p = default_spec("sumrate_vs_power");
  CHECK(p.config_at(20.0).power_watts == doctest::Approx(0.1));
}

TEST_CASE("runs are deterministic and independent of the worker count") {
  ExperimentSpec s = tiny_spec();
  const ExperimentResult a = run_experiment(s, {1, false, {}});
  const ExperimentResult b = run_experiment(s, {3, false, {}});
  std::ostringstream ca, cb;
  write_results_csv(ca, a.rows);
  write_results_csv(cb, b.rows);
  CHECK(ca.str() == cb.str());
  CHECK(a.rows.size() == 2u * 2u * 3u);
  for (const auto& r : a.rows) {
    CHECK(r.status != "error");
    CHECK(r.wall_time == 0.0);
    CHECK(r.leakage.size() == 2u);
  }
}

TEST_CASE("sweep points share the trial seeds") {
  const ExperimentResult a = run_experiment(tiny_spec());
  std::map<int, std::uint64_t> seeds;
  for (const auto& r : a.rows) {
    auto [it, fresh] = seeds.emplace(r.trial, r.trial_seed);
    if (!fresh) CHECK(it->second == r.trial_seed);
  }
  CHECK(seeds.size() == 2u);
  CHECK(seeds[0] != seeds[1]);
}

TEST_CASE("summary is recomputable from the written CSV") {
  const ExperimentResult res = run_experiment(tiny_spec());
  std::ostringstream os;
  write_results_csv(os, res.rows);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  const auto header = split(line);
  REQUIRE(header == result_header());
  std::map<std::string, int> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = static_cast<int>(i);
  std::map<std::pair<std::string, double>, std::vector<double>> values;
  while (std::getline(is, line)) {
    const auto f = split(line);
    REQUIRE(f.size() == header.size());
    if (f[col["status"]] == "error") continue;
    values[{f[col["scheme"]], std::stod(f[col["sweep_value"]])}].push_back(std::stod(f[col["sum_rate"]]));
  }
  for (const auto& [key, v] : values) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    const SummaryRow* s = find_summary(res.summary, key.first, key.second, "sum_rate");
    REQUIRE(s != nullptr);
    CHECK(s->count == static_cast<int>(v.size()));
    CHECK(s->mean == doctest::Approx(mean).epsilon(1e-14));
    CHECK(s->stddev == doctest::Approx(sd).epsilon(1e-12));
    CHECK(s->stderr_mean == doctest::Approx(sd / std::sqrt(static_cast<double>(v.size()))).epsilon(1e-12));
  }
}

TEST_CASE("convergence scenario emits one trace row per AO record") {
  ExperimentSpec s = parse_spec(R"({"scenario": "convergence", "trials": 2, "config": {"max_iter": 4}})");
  const ExperimentResult res = run_experiment(s);
  REQUIRE(res.rows.size() == 2u);
  int rows_for_trial0 = 0;
  for (const auto& t : res.trace) {
    CHECK(t.scheme == "proposed");
    if (t.trial == 0) ++rows_for_trial0;
  }
  CHECK(rows_for_trial0 >= 2);
  CHECK(rows_for_trial0 <= 4 + 2);
  std::ostringstream os;
  write_trace_csv(os, res.trace);
  CHECK(os.str().rfind("scenario,scheme,sweep_value,trial,iteration,sum_rate,rank_gap,bf_status,phase_status\n", 0) == 0);
}

TEST_CASE("outage probability counts samples strictly above the target") {
  std::vector<SinrSample> samples;
  for (int i = 0; i < 10; ++i) samples.push_back({"nonrobust", 0.0, i, 0.1 * (i + 1)});
  const auto rows = outage_probability("outage", samples, {-100.0, 0.0, 100.0});
  REQUIRE(rows.size() == 3u);
  CHECK(rows[0].outage == 1.0);
  CHECK(rows[1].outages == 0);  // 10 log10(1.0) = 0 dB is not above 0 dB
  CHECK(rows[1].samples == 10);
  CHECK(rows[2].outage == 0.0);
}

TEST_CASE("JSON results carry the same rows") {
  const ExperimentResult res = run_experiment(tiny_spec());
  std::ostringstream os;
  write_results_json(os, res.rows);
  const auto doc = nlohmann::json::parse(os.str());
  REQUIRE(doc.is_array());
  CHECK(doc.size() == res.rows.size());
  CHECK(doc[0]["scheme"] == res.rows[0].scheme);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333");
  CHECK(std::stod(format_number(123456.789123)) == doctest::Approx(123456.789).epsilon(1e-9));
}
