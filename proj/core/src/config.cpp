#include "irsguard/config.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "irsguard/errors.hpp"

namespace irsguard {

int SystemConfig::elements() const {
  int m = 0;
  for (int s : irs_sizes) m += s;
  return m;
}

void SystemConfig::set_tau(double value) {
  tau.assign(users, std::vector<double>(eves, value));
}

void SystemConfig::set_kappa2(double value) { kappa.assign(eves, std::sqrt(value)); }

SystemConfig SystemConfig::normalized() const {
  SystemConfig c = *this;
  if (c.tau.empty()) c.set_tau(1.0);
  if (c.kappa.empty()) c.set_kappa2(0.1);
  if (c.fading.L0 <= 0.0) c.fading.L0 = reference_path_gain(c.carrier_hz);
  c.validate();
  return c;
}

void SystemConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (nt < 2) fail("nt must be >= 2");
  if (nr < 2) fail("nr must be >= 2");
  if (users < 1) fail("users must be >= 1");
  if (eves < 0) fail("eves must be >= 0");
  if (irs_sizes.empty()) fail("at least one IRS is required");
  for (int s : irs_sizes)
    if (s < 1) fail("every IRS needs at least one element");
  if (irs_distances.size() != irs_sizes.size()) fail("irs_distances must have one entry per IRS");
  if (!(cell_radius > 0.0)) fail("cell_radius must be positive");
  for (double d : irs_distances)
    if (!(d > 0.0) || d >= cell_radius) fail("IRS distances must lie in (0, cell_radius)");
  if (!(power_watts > 0.0)) fail("power must be positive");
  if (!(noise_watts > 0.0)) fail("noise power must be positive");
  if (!tau.empty()) {
    if (static_cast<int>(tau.size()) != users) fail("tau must have one row per user");
    for (const auto& row : tau) {
      if (static_cast<int>(row.size()) != eves) fail("tau rows must have one entry per eavesdropper");
      for (double t : row)
        if (!(t >= 0.0)) fail("tau must be nonnegative");
    }
  }
  if (!kappa.empty()) {
    if (static_cast<int>(kappa.size()) != eves) fail("kappa must have one entry per eavesdropper");
    for (double k : kappa)
      if (!(k >= 0.0)) fail("kappa must be nonnegative");
  }
  if (!(rho > 0.0)) fail("rho must be positive");
  if (!(eps_conv > 0.0)) fail("eps_conv must be positive");
  if (max_iter < 0) fail("max_iter must be >= 0");
  if (!(init_signal_fraction > 0.0 && init_signal_fraction <= 1.0))
    fail("init_signal_fraction must be in (0, 1]");
  if (restarts < 1) fail("restarts must be >= 1");
  if (leakage_samples < 0) fail("leakage_samples must be >= 0");
  if (fading.alpha_los < 0 || fading.alpha_nlos < 0 || fading.beta_los < 0 || fading.beta_nlos < 0)
    fail("path-loss exponents and Ricean factors must be nonnegative");
  if (!(power_model.amplifier_efficiency > 0.0 && power_model.amplifier_efficiency <= 1.0))
    fail("amplifier efficiency must be in (0, 1]");
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double reference_path_gain(double carrier_hz) {
  const double lambda = 299792458.0 / carrier_hz;
  const double r = lambda / (4.0 * std::numbers::pi);
  return r * r;
}

SystemConfig default_config() {
  SystemConfig c;
  c.power_watts = dbm_to_watts(30.0);
  c.noise_watts = dbm_to_watts(-90.0);
  c.fading.L0 = reference_path_gain(c.carrier_hz);
  c.set_tau(1.0);
  c.set_kappa2(0.1);
  return c;
}

}  // namespace irsguard
