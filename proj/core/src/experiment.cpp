#include "irsguard/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "irsguard/ao.hpp"
#include "irsguard/baselines.hpp"
#include "irsguard/errors.hpp"
#include "irsguard/random.hpp"
#include "irsguard/system_model.hpp"
#include "json.hpp"

namespace irsguard {

using nlohmann::json;

const std::vector<std::string>& scenario_ids() {
  static const std::vector<std::string> ids{"convergence",     "sumrate_vs_power", "secrecy_vs_tau",
                                            "energy_efficiency", "sumrate_vs_K",   "csi_uncertainty",
                                            "outage",          "multi_irs_split"};
  return ids;
}

const std::vector<std::string>& scheme_ids() {
  static const std::vector<std::string> ids{"proposed", "baseline1", "baseline2", "nonrobust"};
  return ids;
}

const std::vector<std::string>& sweep_variables() {
  static const std::vector<std::string> ids{"none", "power_dbm", "tau", "kappa2", "users", "elements", "m1",
                                            "distance"};
  return ids;
}

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

ExperimentSpec default_spec(const std::string& scenario) {
  ExperimentSpec s;
  s.scenario = scenario;
  s.config = default_config();
  auto set_distance = [&](double d) { s.config.irs_distances = {d}; };
  if (scenario == "convergence") {
    s.sweep_variable = "none";
    s.grid = {0.0};
    s.trials = 20;
    s.schemes = {"proposed"};
    s.power_dbm = 30.0;
    set_distance(60.0);
    s.emit_trace = true;
  } else if (scenario == "sumrate_vs_power") {
    s.sweep_variable = "power_dbm";
    s.grid = {10.0, 20.0, 30.0};
    s.schemes = {"proposed", "baseline1", "baseline2"};
    set_distance(115.0);
  } else if (scenario == "secrecy_vs_tau") {
    s.sweep_variable = "tau";
    s.grid = {0.5, 1.0, 2.0, 4.0};
    s.schemes = {"proposed"};
    s.power_dbm = 10.0;
    set_distance(50.0);
  } else if (scenario == "energy_efficiency") {
    s.sweep_variable = "elements";
    s.grid = {2.0, 4.0, 6.0, 8.0};
    s.schemes = {"proposed", "baseline1", "baseline2"};
    s.power_dbm = 5.0;
    set_distance(50.0);
  } else if (scenario == "sumrate_vs_K") {
    s.sweep_variable = "users";
    s.grid = {1.0, 2.0, 3.0};
    s.schemes = {"proposed", "baseline1", "baseline2"};
    s.power_dbm = 25.0;
    set_distance(50.0);
  } else if (scenario == "csi_uncertainty") {
    s.sweep_variable = "kappa2";
    s.grid = {0.01, 0.05, 0.1, 0.2};
    s.schemes = {"proposed", "nonrobust"};
    s.power_dbm = 10.0;
    set_distance(20.0);
  } else if (scenario == "outage") {
    s.sweep_variable = "none";
    s.grid = {0.0};
    s.schemes = {"proposed", "nonrobust"};
    s.power_dbm = 10.0;
    s.kappa2 = 0.1;
    set_distance(20.0);
    s.target_sinr_db = {-10.0, -5.0, 0.0, 5.0};
  } else if (scenario == "multi_irs_split") {
    s.sweep_variable = "m1";
    s.grid = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    s.schemes = {"proposed"};
    s.power_dbm = 25.0;
    s.config.irs_sizes = {5, 5};
    s.config.irs_distances = {20.0, 20.0};
  } else {
    throw SpecError("unknown scenario '" + scenario + "'", 0);
  }
  return s;
}

void ExperimentSpec::validate() const {
  auto fail = [](const std::string& m) { throw SpecError(m, 0); };
  if (!contains(scenario_ids(), scenario)) fail("unknown scenario '" + scenario + "'");
  if (!contains(sweep_variables(), sweep_variable)) fail("unknown sweep variable '" + sweep_variable + "'");
  if (trials < 1) fail("trials must be >= 1");
  if (grid.empty()) fail("sweep grid must be non-empty");
  if (schemes.empty()) fail("at least one scheme is required");
  std::set<std::string> seen;
  for (const auto& s : schemes) {
    if (!contains(scheme_ids(), s)) fail("unknown scheme '" + s + "'");
    if (!seen.insert(s).second) fail("duplicate scheme '" + s + "'");
  }
  if (scenario == "outage" && target_sinr_db.empty()) fail("outage scenario requires outage.target_sinr_db");
  if (outage_draws < 1) fail("outage.draws must be >= 1");
  if (sweep_variable == "m1" && config.irs_sizes.size() != 2) fail("sweep 'm1' requires exactly two IRSs");
  for (double g : grid) {
    if (!std::isfinite(g)) fail("sweep values must be finite");
    if (sweep_variable == "users" || sweep_variable == "elements" || sweep_variable == "m1") {
      if (g != std::floor(g) || g < 1.0) fail("sweep '" + sweep_variable + "' needs positive integers");
    }
  }
  try {
    for (double g : grid) config_at(g).validate();
  } catch (const ConfigError& e) {
    fail(std::string("config: ") + e.what());
  }
}

SystemConfig ExperimentSpec::config_at(double x) const {
  SystemConfig c = config;
  c.power_watts = dbm_to_watts(power_dbm);
  c.noise_watts = dbm_to_watts(noise_dbm);
  double t = tau, k2 = kappa2;
  if (sweep_variable == "power_dbm") {
    c.power_watts = dbm_to_watts(x);
  } else if (sweep_variable == "tau") {
    t = x;
  } else if (sweep_variable == "kappa2") {
    k2 = x;
  } else if (sweep_variable == "users") {
    c.users = static_cast<int>(x);
  } else if (sweep_variable == "elements") {
    for (auto& m : c.irs_sizes) m = static_cast<int>(x);
  } else if (sweep_variable == "m1") {
    const int total = c.elements();
    const int m1 = static_cast<int>(x);
    if (m1 >= total) throw ConfigError("m1 must be smaller than the total element count");
    c.irs_sizes = {m1, total - m1};
  } else if (sweep_variable == "distance") {
    c.irs_distances[0] = x;
  }
  c.set_tau(t);
  c.set_kappa2(k2);
  if (c.fading.L0 <= 0.0) c.fading.L0 = reference_path_gain(c.carrier_hz);
  return c;
}

// ---------------------------------------------------------------------------
// spec parsing

namespace {

int line_at(const std::string& text, std::size_t pos) {
  if (pos > text.size()) pos = text.size();
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

// Line of the last key in `path`, searching each key after the previous one.
int key_line(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  for (const auto& key : path) {
    const std::size_t at = text.find("\"" + key + "\"", pos);
    if (at == std::string::npos) return 0;
    pos = at + 1;
  }
  return path.empty() ? 0 : line_at(text, pos - 1);
}

class SpecReader {
 public:
  explicit SpecReader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& msg) const {
    std::string dotted;
    for (const auto& p : path) dotted += (dotted.empty() ? "" : ".") + p;
    const int line = key_line(text_, path);
    std::ostringstream os;
    os << "line " << line << ": " << dotted << ": " << msg;
    throw SpecError(os.str(), line);
  }

  void check_keys(const json& obj, const std::vector<std::string>& path, const std::set<std::string>& allowed) const {
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!allowed.count(it.key())) {
        auto p = path;
        p.push_back(it.key());
        fail(p, "unknown key");
      }
  }

  double number(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  int integer(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
  }

  bool boolean(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(number(e, path));
    return out;
  }

  std::vector<int> integers(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_array()) fail(path, "expected an array of integers");
    std::vector<int> out;
    for (const auto& e : v) out.push_back(integer(e, path));
    return out;
  }

 private:
  const std::string& text_;
};

void read_config(const SpecReader& r, const json& c, SystemConfig& cfg) {
  const std::vector<std::string> base{"config"};
  auto p = [&](const std::string& k) {
    auto x = base;
    x.push_back(k);
    return x;
  };
  r.check_keys(c, base,
               {"nt", "nr", "users", "eves", "irs_sizes", "irs_distances", "cell_radius", "min_distance",
                "carrier_hz", "irs_hop_reference_db", "alpha_los", "alpha_nlos", "beta_los", "beta_nlos", "rho",
                "eps_conv", "max_iter", "init_signal_fraction", "rank_tol", "rho_decrease", "restarts",
                "leakage_samples", "solver_gap", "barrier_growth"});
  for (auto it = c.begin(); it != c.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "nt") cfg.nt = r.integer(v, p(k));
    else if (k == "nr") cfg.nr = r.integer(v, p(k));
    else if (k == "users") cfg.users = r.integer(v, p(k));
    else if (k == "eves") cfg.eves = r.integer(v, p(k));
    else if (k == "irs_sizes") cfg.irs_sizes = r.integers(v, p(k));
    else if (k == "irs_distances") cfg.irs_distances = r.numbers(v, p(k));
    else if (k == "cell_radius") cfg.cell_radius = r.number(v, p(k));
    else if (k == "min_distance") cfg.min_distance = r.number(v, p(k));
    else if (k == "carrier_hz") {
      cfg.carrier_hz = r.number(v, p(k));
      if (!(cfg.carrier_hz > 0.0)) r.fail(p(k), "must be positive");
      cfg.fading.L0 = reference_path_gain(cfg.carrier_hz);
    } else if (k == "irs_hop_reference_db") cfg.irs_hop_reference_db = r.number(v, p(k));
    else if (k == "alpha_los") cfg.fading.alpha_los = r.number(v, p(k));
    else if (k == "alpha_nlos") cfg.fading.alpha_nlos = r.number(v, p(k));
    else if (k == "beta_los") cfg.fading.beta_los = r.number(v, p(k));
    else if (k == "beta_nlos") cfg.fading.beta_nlos = r.number(v, p(k));
    else if (k == "rho") cfg.rho = r.number(v, p(k));
    else if (k == "eps_conv") cfg.eps_conv = r.number(v, p(k));
    else if (k == "max_iter") cfg.max_iter = r.integer(v, p(k));
    else if (k == "init_signal_fraction") cfg.init_signal_fraction = r.number(v, p(k));
    else if (k == "rank_tol") cfg.rank_tol = r.number(v, p(k));
    else if (k == "rho_decrease") cfg.rho_decrease = r.boolean(v, p(k));
    else if (k == "restarts") cfg.restarts = r.integer(v, p(k));
    else if (k == "leakage_samples") cfg.leakage_samples = r.integer(v, p(k));
    else if (k == "solver_gap") cfg.solver.gap_tolerance = r.number(v, p(k));
    else if (k == "barrier_growth") cfg.solver.barrier_growth = r.number(v, p(k));
  }
}

}  // namespace

ExperimentSpec parse_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const int line = line_at(text, e.byte > 0 ? e.byte - 1 : 0);
    throw SpecError("line " + std::to_string(line) + ": malformed JSON: " + e.what(), line);
  }
  SpecReader r(text);
  if (!doc.is_object()) throw SpecError("line 1: spec must be a JSON object", 1);
  if (!doc.contains("scenario")) throw SpecError("line 1: missing required key 'scenario'", 1);
  r.check_keys(doc, {},
               {"scenario", "trials", "seed", "schemes", "sweep", "power_dbm", "noise_dbm", "tau", "kappa2",
                "emit_trace", "outage", "config"});
  const std::string scenario = r.string(doc["scenario"], {"scenario"});
  if (!contains(scenario_ids(), scenario)) r.fail({"scenario"}, "unknown scenario '" + scenario + "'");
  ExperimentSpec s = default_spec(scenario);

  if (doc.contains("trials")) s.trials = r.integer(doc["trials"], {"trials"});
  if (doc.contains("seed")) {
    const json& v = doc["seed"];
    if (!v.is_number_unsigned()) r.fail({"seed"}, "expected a nonnegative integer");
    s.seed = v.get<std::uint64_t>();
  }
  if (doc.contains("schemes")) {
    const json& v = doc["schemes"];
    if (!v.is_array()) r.fail({"schemes"}, "expected an array of scheme names");
    s.schemes.clear();
    for (const auto& e : v) {
      const std::string id = r.string(e, {"schemes"});
      if (!contains(scheme_ids(), id)) r.fail({"schemes"}, "unknown scheme '" + id + "'");
      if (contains(s.schemes, id)) r.fail({"schemes"}, "duplicate scheme '" + id + "'");
      s.schemes.push_back(id);
    }
  }
  if (doc.contains("sweep")) {
    const json& sw = doc["sweep"];
    if (!sw.is_object()) r.fail({"sweep"}, "expected an object");
    r.check_keys(sw, {"sweep"}, {"variable", "values"});
    if (sw.contains("variable")) {
      s.sweep_variable = r.string(sw["variable"], {"sweep", "variable"});
      if (!contains(sweep_variables(), s.sweep_variable))
        r.fail({"sweep", "variable"}, "unknown sweep variable '" + s.sweep_variable + "'");
    }
    if (sw.contains("values")) s.grid = r.numbers(sw["values"], {"sweep", "values"});
    if (s.grid.empty()) r.fail({"sweep", "values"}, "grid must be non-empty");
  }
  if (doc.contains("power_dbm")) s.power_dbm = r.number(doc["power_dbm"], {"power_dbm"});
  if (doc.contains("noise_dbm")) s.noise_dbm = r.number(doc["noise_dbm"], {"noise_dbm"});
  if (doc.contains("tau")) {
    s.tau = r.number(doc["tau"], {"tau"});
    if (!(s.tau >= 0.0)) r.fail({"tau"}, "must be nonnegative");
  }
  if (doc.contains("kappa2")) {
    s.kappa2 = r.number(doc["kappa2"], {"kappa2"});
    if (!(s.kappa2 >= 0.0)) r.fail({"kappa2"}, "must be nonnegative");
  }
  if (doc.contains("emit_trace")) s.emit_trace = r.boolean(doc["emit_trace"], {"emit_trace"});
  if (doc.contains("outage")) {
    const json& o = doc["outage"];
    if (!o.is_object()) r.fail({"outage"}, "expected an object");
    r.check_keys(o, {"outage"}, {"target_sinr_db", "draws"});
    if (o.contains("target_sinr_db")) s.target_sinr_db = r.numbers(o["target_sinr_db"], {"outage", "target_sinr_db"});
    if (o.contains("draws")) s.outage_draws = r.integer(o["draws"], {"outage", "draws"});
  }
  if (doc.contains("config")) {
    if (!doc["config"].is_object()) r.fail({"config"}, "expected an object");
    read_config(r, doc["config"], s.config);
  }
  if (s.trials < 1) r.fail({"trials"}, "must be >= 1");
  try {
    s.validate();
  } catch (const SpecError& e) {
    // attach the closest key we can identify
    std::string msg = e.what();
    std::vector<std::string> path{"scenario"};
    if (msg.find("trials") != std::string::npos) path = {"trials"};
    else if (msg.find("sweep") != std::string::npos || msg.find("m1") != std::string::npos) path = {"sweep"};
    else if (msg.find("outage") != std::string::npos) path = {"outage"};
    else if (msg.find("config") != std::string::npos) path = {"config"};
    if (!doc.contains(path[0])) path = {"scenario"};
    r.fail(path, msg);
  }
  return s;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot open spec file '" + path + "'", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

// ---------------------------------------------------------------------------
// running

namespace {

enum Stream : std::uint64_t {
  kTrial = 101,
  kGeometry = 102,
  kChannels = 103,
  kPhases = 104,
  kEvaluation = 105,
  kRestart = 106,
  kOutage = 107,
};

struct JobOutput {
  std::vector<ResultRow> rows;
  std::vector<TraceRow> trace;
  std::vector<SinrSample> sinr;
};

struct Evaluated {
  Solution solution;
  const Instance* instance = nullptr;  // system the solution is evaluated on
  int iterations = 0;
  double rank_gap = 0.0;
  std::string status = "ok";
  std::string message;
};

void fill_metrics(ResultRow& row, const Evaluated& e, const SystemConfig& cfg, Rng& rng) {
  const Instance& inst = *e.instance;
  const ChannelSet& ch = inst.channels;
  const std::vector<double> rates = user_rates(ch, e.solution);
  row.sum_rate = 0.0;
  for (double r : rates) row.sum_rate += r;
  const FeasibilityReport rep = check_feasibility(inst, e.solution, cfg.leakage_samples, rng);
  std::vector<std::vector<double>> leak = rep.worst_leakage;
  row.leakage.clear();
  row.max_leakage = 0.0;
  row.certified_margin = ch.eves() > 0 ? INFINITY : 0.0;
  for (int k = 0; k < ch.users(); ++k)
    for (int j = 0; j < ch.eves(); ++j) {
      row.leakage.push_back(leak[k][j]);
      row.max_leakage = std::max(row.max_leakage, leak[k][j]);
      row.certified_margin = std::min(row.certified_margin, rep.certified_min_eig[k][j]);
    }
  row.leakage_excess = rep.worst_leakage_excess;
  row.secrecy_rate = secrecy_rate(rates, leak);
  row.an_fraction = an_power_fraction(e.solution);
  row.energy_efficiency = energy_efficiency(row.sum_rate, cfg.power_watts, cfg.nt, cfg.power_model);
  row.iterations = e.iterations;
  row.rank_gap = e.rank_gap;
  row.power_margin = rep.power_margin;
  row.feasible = rep.ok() ? 1 : 0;
  row.status = e.status;
  row.message = e.message;
}

void collect_sinr(std::vector<SinrSample>& out, const std::string& scheme, double x, int trial, const Evaluated& e,
                  int draws, Rng& rng) {
  const ChannelSet& ch = e.instance->channels;
  for (int j = 0; j < ch.eves(); ++j)
    for (int d = 0; d < draws; ++d) {
      const ComplexMatrix dH = sample_uncertainty(ch.H_bar[j], ch.eps[j], rng, false);
      double worst = 0.0;
      for (int k = 0; k < ch.users(); ++k) worst = std::max(worst, eve_sinr(ch, e.solution, k, j, dH));
      out.push_back({scheme, x, trial, worst});
    }
}

AoTrace best_of_restarts(const Instance& inst, const AoOptions& opt, const ComplexVector& v0, int restarts,
                         std::uint64_t trial_seed) {
  AoTrace best = run_ao_from(inst, opt, v0);
  double best_rate = sum_rate(inst.channels, best.solution);
  for (int r = 1; r < restarts; ++r) {
    Rng rng(derive_seed(trial_seed, {kRestart, static_cast<std::uint64_t>(r)}));
    AoTrace t = run_ao(inst, opt, rng);
    const double rate = sum_rate(inst.channels, t.solution);
    if (rate > best_rate) {
      best_rate = rate;
      best = std::move(t);
    }
  }
  return best;
}

Evaluated from_trace(const AoTrace& t, const Instance* inst) {
  Evaluated e;
  e.solution = t.solution;
  e.instance = inst;
  e.iterations = t.iterations;
  e.rank_gap = t.final_rank_gap_rel;
  e.status = t.converged ? "ok" : "not_converged";
  e.message = t.message;
  return e;
}

JobOutput run_job(const ExperimentSpec& spec, int point, int trial, bool timing) {
  using clock = std::chrono::steady_clock;
  JobOutput out;
  const double x = spec.grid[point];
  const SystemConfig cfg = spec.config_at(x);
  const std::uint64_t trial_seed = derive_seed(spec.seed, {kTrial, static_cast<std::uint64_t>(trial)});

  std::optional<Geometry> geo;
  std::optional<Instance> inst;
  std::optional<Instance> direct;
  std::string setup_error;
  try {
    Rng grng(derive_seed(trial_seed, {kGeometry}));
    geo = sample_geometry(cfg, grng);
    const ChannelSet phys = build_channel_set(cfg, *geo, derive_seed(trial_seed, {kChannels}));
    inst = normalize(phys, cfg.power_watts, cfg.tau);
  } catch (const std::exception& e) {
    setup_error = e.what();
  }
  Rng prng(derive_seed(trial_seed, {kPhases}));
  const ComplexVector v0 = random_phases(cfg.elements(), prng);
  const AoOptions opt = AoOptions::from_config(cfg);
  const bool want_sinr = !spec.target_sinr_db.empty();
  const bool want_trace = spec.emit_trace || spec.scenario == "convergence";

  for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
    const std::string& scheme = spec.schemes[s];
    ResultRow row;
    row.scenario = spec.scenario;
    row.scheme = scheme;
    row.sweep_variable = spec.sweep_variable;
    row.sweep_value = x;
    row.trial = trial;
    row.trial_seed = trial_seed;
    const auto t0 = clock::now();
    try {
      if (!inst) throw NumericError("trial setup failed: " + setup_error);
      Evaluated e;
      std::vector<AoRecord> records;
      if (scheme == "proposed") {
        const AoTrace t = best_of_restarts(*inst, opt, v0, cfg.restarts, trial_seed);
        e = from_trace(t, &*inst);
        records = t.records;
      } else if (scheme == "nonrobust") {
        const Instance nominal = nominal_instance(*inst);
        const AoTrace t = best_of_restarts(nominal, opt, v0, cfg.restarts, trial_seed);
        e = from_trace(t, &*inst);
        records = t.records;
      } else if (scheme == "baseline1") {
        const Baseline1Solution b = solve_baseline1(*inst, v0, opt.solver, 20, opt.eps_conv);
        e.solution = b.to_solution();
        e.instance = &*inst;
        e.iterations = b.passes;
        e.status = b.infeasible ? "zero_allocation" : "ok";
        e.message = b.message;
      } else if (scheme == "baseline2") {
        if (!direct) {
          const Baseline2Channels d = build_direct_channels(cfg, *geo, derive_seed(trial_seed, {kChannels}));
          direct = normalize(direct_channel_set(cfg, d), cfg.power_watts, cfg.tau);
        }
        const Baseline2Result b = solve_baseline2(*direct, opt);
        e.solution = b.solution;
        e.instance = &*direct;
        e.iterations = b.iterations;
        e.status = b.failed ? "zero_allocation" : (b.converged ? "ok" : "not_converged");
        e.message = b.message;
      }
      Rng erng(derive_seed(trial_seed, {kEvaluation, static_cast<std::uint64_t>(s)}));
      fill_metrics(row, e, cfg, erng);
      if (want_sinr) {
        Rng orng(derive_seed(trial_seed, {kOutage}));
        collect_sinr(out.sinr, scheme, x, trial, e, spec.outage_draws, orng);
      }
      if (want_trace)
        for (const auto& r : records)
          out.trace.push_back({spec.scenario, scheme, x, trial, r.iteration, r.sum_rate, r.rank_gap_rel,
                               r.bf_status, r.phase_status});
    } catch (const std::exception& ex) {
      ResultRow blank;
      blank.scenario = row.scenario;
      blank.scheme = row.scheme;
      blank.sweep_variable = row.sweep_variable;
      blank.sweep_value = row.sweep_value;
      blank.trial = row.trial;
      blank.trial_seed = row.trial_seed;
      blank.leakage.assign(static_cast<std::size_t>(cfg.users) * cfg.eves, 0.0);
      row = blank;
      row.status = "error";
      row.message = ex.what();
    }
    if (timing) row.wall_time = std::chrono::duration<double>(clock::now() - t0).count();
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
  spec.validate();
  const int points = static_cast<int>(spec.grid.size());
  const int jobs = points * spec.trials;
  std::vector<JobOutput> results(jobs);
  std::vector<char> done(jobs, 0);
  std::mutex mu;
  int flushed = 0;
  std::atomic<int> next{0};

  auto worker = [&]() {
    for (;;) {
      const int id = next.fetch_add(1);
      if (id >= jobs) return;
      JobOutput o = run_job(spec, id / spec.trials, id % spec.trials, options.timing);
      std::lock_guard<std::mutex> lock(mu);
      results[id] = std::move(o);
      done[id] = 1;
      while (flushed < jobs && done[flushed]) {
        if (options.on_row)
          for (const auto& r : results[flushed].rows) options.on_row(r);
        ++flushed;
      }
    }
  };
  const int nw = std::max(1, std::min(options.workers, jobs));
  if (nw == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ExperimentResult res;
  for (auto& o : results) {
    for (auto& r : o.rows) res.rows.push_back(std::move(r));
    for (auto& t : o.trace) res.trace.push_back(std::move(t));
    for (auto& s : o.sinr) res.sinr_samples.push_back(std::move(s));
  }
  if (!spec.target_sinr_db.empty())
    res.outage = outage_probability(spec.scenario, res.sinr_samples, spec.target_sinr_db);
  res.summary = summarize(res.rows);
  return res;
}

std::vector<OutageRow> outage_probability(const std::string& scenario, const std::vector<SinrSample>& samples,
                                          const std::vector<double>& target_sinr_db) {
  // group preserving first-appearance order
  std::vector<std::pair<std::string, double>> keys;
  std::map<std::pair<std::string, double>, std::vector<double>> groups;
  for (const auto& s : samples) {
    const auto key = std::make_pair(s.scheme, s.sweep_value);
    if (!groups.count(key)) keys.push_back(key);
    groups[key].push_back(s.sinr);
  }
  std::vector<OutageRow> out;
  for (const auto& key : keys) {
    const auto& v = groups[key];
    for (double g_db : target_sinr_db) {
      const double g = db_to_linear(g_db);
      OutageRow r;
      r.scenario = scenario;
      r.scheme = key.first;
      r.sweep_value = key.second;
      r.target_sinr_db = g_db;
      r.samples = static_cast<int>(v.size());
      r.outages = static_cast<int>(std::count_if(v.begin(), v.end(), [&](double s) { return s > g; }));
      r.outage = r.samples ? static_cast<double>(r.outages) / r.samples : 0.0;
      out.push_back(r);
    }
  }
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  static const std::vector<std::string> metrics{"sum_rate", "secrecy_rate", "an_fraction", "energy_efficiency",
                                                "max_leakage", "iterations"};
  auto value = [](const ResultRow& r, const std::string& m) {
    double x = 0.0;
    if (m == "sum_rate") x = r.sum_rate;
    else if (m == "secrecy_rate") x = r.secrecy_rate;
    else if (m == "an_fraction") x = r.an_fraction;
    else if (m == "energy_efficiency") x = r.energy_efficiency;
    else if (m == "max_leakage") x = r.max_leakage;
    else if (m == "iterations") x = r.iterations;
    return std::stod(format_number(x));
  };
  std::vector<std::pair<std::string, double>> keys;
  std::map<std::pair<std::string, double>, std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) {
    if (r.status == "error") continue;
    const auto key = std::make_pair(r.scheme, std::stod(format_number(r.sweep_value)));
    if (!groups.count(key)) keys.push_back(key);
    groups[key].push_back(&r);
  }
  std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });
  std::vector<SummaryRow> out;
  for (const auto& key : keys) {
    const auto& g = groups[key];
    for (const auto& m : metrics) {
      SummaryRow s;
      s.scheme = key.first;
      s.sweep_value = key.second;
      s.metric = m;
      s.count = static_cast<int>(g.size());
      double sum = 0.0;
      for (const auto* r : g) sum += value(*r, m);
      s.mean = sum / s.count;
      double ss = 0.0;
      for (const auto* r : g) ss += (value(*r, m) - s.mean) * (value(*r, m) - s.mean);
      s.stddev = s.count > 1 ? std::sqrt(ss / (s.count - 1)) : 0.0;
      s.stderr_mean = s.count > 0 ? s.stddev / std::sqrt(static_cast<double>(s.count)) : 0.0;
      out.push_back(s);
    }
  }
  return out;
}

const SummaryRow* find_summary(const std::vector<SummaryRow>& summary, const std::string& scheme,
                               double sweep_value, const std::string& metric) {
  for (const auto& s : summary)
    if (s.scheme == scheme && s.metric == metric && std::abs(s.sweep_value - sweep_value) <= 1e-9 * (1 + std::abs(sweep_value)))
      return &s;
  return nullptr;
}

}  // namespace irsguard
