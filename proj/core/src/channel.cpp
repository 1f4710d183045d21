#include "irsguard/channel.hpp"

#include <cmath>
#include <numbers>

#include "irsguard/errors.hpp"

namespace irsguard {

namespace {

enum Stream : std::uint64_t {
  kStreamG = 1,
  kStreamUser = 2,
  kStreamEve = 3,
  kStreamGeometry = 4,
};

Point polar(double r, double angle) { return {r * std::cos(angle), r * std::sin(angle)}; }

}  // namespace

double distance(const Point& a, const Point& b) { return std::hypot(b.x - a.x, b.y - a.y); }

double bearing(const Point& a, const Point& b) { return std::atan2(b.y - a.y, b.x - a.x); }

Geometry sample_geometry(const SystemConfig& config, Rng& rng) {
  if (!(config.cell_radius > 0.0)) throw ConfigError("sample_geometry: cell radius must be positive");
  Geometry g;
  g.cell_radius = config.cell_radius;
  g.ap = {0.0, 0.0};
  for (std::size_t l = 0; l < config.irs_distances.size(); ++l) {
    const double side = (l % 2 == 0) ? 0.0 : std::numbers::pi;
    g.irs.push_back(polar(config.irs_distances[l], side));
  }
  auto draw = [&]() {
    for (int attempt = 0; attempt < 100000; ++attempt) {
      const double r = config.cell_radius * std::sqrt(uniform01(rng));
      const double a = 2.0 * std::numbers::pi * uniform01(rng);
      const Point p = polar(r, a);
      bool ok = distance(p, g.ap) >= config.min_distance;
      for (const auto& q : g.irs) ok = ok && distance(p, q) >= config.min_distance;
      if (ok) return p;
    }
    throw ConfigError("sample_geometry: cannot place a receiver away from the IRSs");
  };
  for (int k = 0; k < config.users; ++k) g.users.push_back(draw());
  for (int j = 0; j < config.eves; ++j) {
    g.eves.push_back(draw());
    g.eve_orientation.push_back(2.0 * std::numbers::pi * uniform01(rng));
  }
  return g;
}

ComplexVector ula_response(int n, double angle_from_broadside) {
  ComplexVector a(n);
  const double phase = std::numbers::pi * std::sin(angle_from_broadside);
  for (int i = 0; i < n; ++i) a(i) = std::polar(1.0, phase * i);
  return a;
}

ComplexMatrix ricean_channel(int rows, int cols, double dist, const RiceanParams& params, bool los,
                             const ComplexVector& a_rx, const ComplexVector& a_tx, Rng& rng, DrawOrder order) {
  if (!(dist > 0.0)) throw ConfigError("ricean_channel: distance must be positive");
  if (a_rx.size() != rows || a_tx.size() != cols) throw ConfigError("ricean_channel: steering vector size mismatch");
  const double alpha = los ? params.alpha_los : params.alpha_nlos;
  const double beta = los ? params.beta_los : params.beta_nlos;
  const double gain = std::sqrt(params.L0 * std::pow(dist, -alpha));
  ComplexMatrix nlos(rows, cols);
  if (order == DrawOrder::row_major) {
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) nlos(r, c) = complex_gaussian(rng);
  } else {
    for (int c = 0; c < cols; ++c)
      for (int r = 0; r < rows; ++r) nlos(r, c) = complex_gaussian(rng);
  }
  const double wl = std::sqrt(beta / (1.0 + beta));
  const double wn = std::sqrt(1.0 / (1.0 + beta));
  return gain * (wl * (a_rx * a_tx.adjoint()) + wn * nlos);
}

ChannelSet build_channel_set(const SystemConfig& config, const Geometry& geo, std::uint64_t seed) {
  const int nt = config.nt;
  const int m = config.elements();
  const int L = config.irs_count();
  if (static_cast<int>(geo.irs.size()) != L || static_cast<int>(geo.users.size()) != config.users ||
      static_cast<int>(geo.eves.size()) != config.eves)
    throw ConfigError("build_channel_set: geometry does not match configuration");

  RiceanParams ap_side = config.fading;
  RiceanParams hop = config.fading;
  hop.L0 = db_to_linear(config.irs_hop_reference_db);

  ChannelSet ch;
  ch.irs_sizes = config.irs_sizes;
  ch.G = ComplexMatrix::Zero(m, nt);
  ch.h.assign(config.users, ComplexVector::Zero(m));
  ch.H_bar.assign(config.eves, ComplexMatrix::Zero(config.nr, m));

  int row = 0;
  for (int l = 0; l < L; ++l) {
    const int ml = config.irs_sizes[l];
    const Point& p = geo.irs[l];
    const double irs_broadside = bearing(p, geo.ap);
    {
      Rng rng(derive_seed(seed, {kStreamG, static_cast<std::uint64_t>(l)}));
      const ComplexVector a_rx = ula_response(ml, bearing(p, geo.ap) - irs_broadside);
      const ComplexVector a_tx = ula_response(nt, bearing(geo.ap, p));
      ch.G.middleRows(row, ml) =
          ricean_channel(ml, nt, distance(geo.ap, p), ap_side, true, a_rx, a_tx, rng, DrawOrder::row_major);
    }
    for (int k = 0; k < config.users; ++k) {
      Rng rng(derive_seed(seed, {kStreamUser, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(l)}));
      const Point& u = geo.users[k];
      const ComplexVector a_tx = ula_response(ml, bearing(p, u) - irs_broadside);
      const ComplexMatrix hrow = ricean_channel(1, ml, distance(p, u), hop, true, ComplexVector::Ones(1), a_tx, rng,
                                                DrawOrder::column_major);
      ch.h[k].segment(row, ml) = hrow.adjoint();
    }
    for (int j = 0; j < config.eves; ++j) {
      Rng rng(derive_seed(seed, {kStreamEve, static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(l)}));
      const Point& e = geo.eves[j];
      const ComplexVector a_rx = ula_response(config.nr, bearing(e, p) - geo.eve_orientation[j]);
      const ComplexVector a_tx = ula_response(ml, bearing(p, e) - irs_broadside);
      ch.H_bar[j].middleCols(row, ml) =
          ricean_channel(config.nr, ml, distance(p, e), hop, true, a_rx, a_tx, rng, DrawOrder::column_major);
    }
    row += ml;
  }
  for (int j = 0; j < config.eves; ++j) {
    const double kappa = config.kappa.empty() ? 0.0 : config.kappa[j];
    ch.eps.push_back(kappa * ch.H_bar[j].norm());
  }
  ch.sigma2_l.assign(config.users, config.noise_watts);
  ch.sigma2_e.assign(config.eves, config.noise_watts);
  return ch;
}

Instance normalize(const ChannelSet& phys, double power_watts, const std::vector<std::vector<double>>& tau) {
  if (!(power_watts > 0.0)) throw ConfigError("normalize: power must be positive");
  Instance inst;
  inst.tau = tau;
  inst.power = 1.0;
  ChannelSet& ch = inst.channels;
  ch = phys;
  ch.G *= std::sqrt(power_watts);
  for (std::size_t k = 0; k < ch.h.size(); ++k) {
    ch.h[k] /= std::sqrt(phys.sigma2_l[k]);
    ch.sigma2_l[k] = 1.0;
  }
  for (std::size_t j = 0; j < ch.H_bar.size(); ++j) {
    const double s = std::sqrt(phys.sigma2_e[j]);
    ch.H_bar[j] /= s;
    ch.eps[j] /= s;
    ch.sigma2_e[j] = 1.0;
  }
  return inst;
}

Instance sample_instance(const SystemConfig& config, std::uint64_t seed) {
  const SystemConfig c = config.normalized();
  Rng rng(derive_seed(seed, {kStreamGeometry}));
  const Geometry geo = sample_geometry(c, rng);
  return normalize(build_channel_set(c, geo, seed), c.power_watts, c.tau);
}

ComplexMatrix sample_uncertainty(const ComplexMatrix& H_bar, double eps, Rng& rng, bool boundary) {
  const Eigen::Index r = H_bar.rows(), c = H_bar.cols();
  if (!(eps >= 0.0)) throw ConfigError("sample_uncertainty: eps must be nonnegative");
  if (eps == 0.0) return ComplexMatrix::Zero(r, c);
  ComplexMatrix d(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) d(i, j) = complex_gaussian(rng);
  const double nrm = d.norm();
  if (nrm == 0.0) return ComplexMatrix::Zero(r, c);
  double radius = eps;
  if (!boundary) {
    const double u = uniform01(rng);
    radius = eps * std::pow(u, 1.0 / (2.0 * static_cast<double>(r * c)));
  }
  d *= radius / nrm;
  // guard against rounding pushing the norm past eps
  const double n2 = d.norm();
  if (n2 > eps) d *= eps / n2;
  return d;
}

}  // namespace irsguard
