#pragma once

#include <cstdint>
#include <vector>

#include "irsguard/config.hpp"
#include "irsguard/numeric.hpp"
#include "irsguard/random.hpp"

namespace irsguard {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point& a, const Point& b);
// Angle of the direction a -> b measured from the +x axis.
double bearing(const Point& a, const Point& b);

struct Geometry {
  double cell_radius = 0.0;
  Point ap;
  std::vector<Point> irs;
  std::vector<Point> users;
  std::vector<Point> eves;
  std::vector<double> eve_orientation;  // broadside angle of each eavesdropper array
};

// Users and eavesdroppers uniform in the disk; IRS l at distance d_l on the
// East-West axis (alternating East, West). Points closer than
// config.min_distance to the AP or any IRS are redrawn.
Geometry sample_geometry(const SystemConfig& config, Rng& rng);

// Half-wavelength uniform linear array response exp(j pi n sin(theta)).
ComplexVector ula_response(int n, double angle_from_broadside);

enum class DrawOrder { row_major, column_major };

// sqrt(L0 d^-alpha) (sqrt(beta/(1+beta)) a_rx a_tx^H + sqrt(1/(1+beta)) A_nlos).
ComplexMatrix ricean_channel(int rows, int cols, double distance, const RiceanParams& params, bool los,
                             const ComplexVector& a_rx, const ComplexVector& a_tx, Rng& rng,
                             DrawOrder order = DrawOrder::row_major);

struct ChannelSet {
  ComplexMatrix G;                   // M x N_t, stacked per-IRS blocks
  std::vector<ComplexVector> h;      // K vectors of length M (user k receives h_k^H Phi G x)
  std::vector<ComplexMatrix> H_bar;  // J matrices N_r x M
  std::vector<double> eps;           // Frobenius uncertainty radius per eavesdropper
  std::vector<double> sigma2_l;      // user noise variances
  std::vector<double> sigma2_e;      // eavesdropper noise variances
  std::vector<int> irs_sizes;

  int nt() const { return static_cast<int>(G.cols()); }
  int m() const { return static_cast<int>(G.rows()); }
  int users() const { return static_cast<int>(h.size()); }
  int eves() const { return static_cast<int>(H_bar.size()); }
  int nr(int j) const { return static_cast<int>(H_bar[j].rows()); }
};

// Draws every link of one trial. Each IRS has its own sub-seeds derived from
// `seed`, so removing trailing IRSs leaves the remaining rows unchanged.
ChannelSet build_channel_set(const SystemConfig& config, const Geometry& geometry, std::uint64_t seed);

// Channels, power and leakage caps in normalized units (unit noise, unit power).
struct Instance {
  ChannelSet channels;
  double power = 1.0;
  std::vector<std::vector<double>> tau;
};

// Divides user/eavesdropper channels by their noise standard deviation and
// multiplies G by sqrt(P), so that the normalized problem has unit noise and
// unit power budget. Rates are unchanged.
Instance normalize(const ChannelSet& physical, double power_watts, const std::vector<std::vector<double>>& tau);

// Geometry, channels and normalization of one trial drawn from `seed`.
Instance sample_instance(const SystemConfig& config, std::uint64_t seed);

// Volume-uniform sample in the Frobenius ball of radius eps (or on its
// boundary sphere when `boundary` is set).
ComplexMatrix sample_uncertainty(const ComplexMatrix& H_bar, double eps, Rng& rng, bool boundary = false);

}  // namespace irsguard
