#pragma once

// Zone grid geometry, per-zone fuel characteristics and the wind process.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "wildsim/rng.hpp"

namespace wildsim {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// One square zone, addressable by flat index or by (row, col).
// index == row * width + col; row 0 is the north edge, col 0 the west edge.
struct ZoneId {
  int index = -1;
  int row = 0;
  int col = 0;
  friend bool operator==(const ZoneId&, const ZoneId&) = default;
};

// Static fuel characteristics of one zone. eta is the conserved total fuel
// amount in discrete units; lambda/xi are per-step transfer fractions.
struct FuelParams {
  double kappa_load = 0.5;     // consumable fuel load [kg/m^2]
  double kappa_sav = 1500.0;   // surface-area-to-volume ratio [1/m]
  double kappa_depth = 0.3;    // fuel bed depth [m]
  double kappa_moist = 0.1;    // moisture content fraction, in [0,1)
  double kappa_heat = 18000.0; // heat content [kJ/kg]
  double kappa_dens = 500.0;   // oven-dry particle density [kg/m^3]
  double m_tot = 0.05;         // total mineral content fraction
  double m_eff = 0.01;         // effective (silica-free) mineral content
  double kappa_elev = 0.0;     // zone centre elevation [m]
  double lambda = 0.002;       // per-step ignition rate of healthy by burning fuel
  double xi = 0.1;             // per-step burn-out fraction of burning fuel
  double r = 1.0;              // economic value density (cost per burning unit-step)
  double c = 1.0;              // sensor gain (signal per burning unit)
  int eta = 100;               // total fuel units (H+Q+D == eta always)
  int q_init = 5;              // units ignited when fire first reaches the zone
};

struct RegionGrid {
  int width = 0;
  int height = 0;
  double zone_size_m = 30.0;
  std::vector<FuelParams> fuel;  // row-major, size width*height
  ZoneId home{};

  int zone_count() const { return width * height; }
  bool contains(int row, int col) const {
    return row >= 0 && row < height && col >= 0 && col < width;
  }
  ZoneId zone(int index) const { return {index, index / width, index % width}; }
  ZoneId zone_at(int row, int col) const { return {row * width + col, row, col}; }
};

// Euclidean distance between zone centres, metres.
double distance_m(const RegionGrid& g, int a, int b);

// Bearing of b as seen from a: radians clockwise from north, in [0, 2*pi).
double bearing(const RegionGrid& g, int a, int b);

// Zones whose centres lie within radius_m of z's centre, z included,
// ascending index order.
std::vector<int> neighbors_within(const RegionGrid& g, int z, double radius_m);

// Relative disk offsets (drow, dcol) for a radius, centre included; the
// footprint of a zone is this stencil clipped to the grid.
std::vector<std::pair<int, int>> disk_offsets(const RegionGrid& g, double radius_m);

// out[z] = sum of field over the footprint of z (disk of radius_m clipped to
// the grid). Plain per-zone summation; exact and cheap at these grid sizes.
Eigen::ArrayXd disk_sums(const Eigen::ArrayXd& field, double radius_m, const RegionGrid& g);

// Wind during one step: speed and the direction the air moves toward,
// radians clockwise from north.
struct WindState {
  double speed_mps = 0.0;
  double direction_phi = 0.0;
};

// Speeds are i.i.d. log-normal; direction performs a Gaussian random walk
// wrapped to [0, 2*pi).
struct WindModelParams {
  double mu_u = 1.2;       // log-space mean of speed
  double sigma_u = 0.35;   // log-space std dev of speed
  double sigma_phi = 0.25; // per-step direction increment std dev
  double initial_phi = 0.0;
};

WindState sample_wind(const WindModelParams& p, const WindState& prev, Rng& rng);
double wrap_angle(double a);  // into [0, 2*pi)

// CSV loaders. Both throw std::runtime_error with line context on malformed
// input. Region schema: header row then one row per zone in row-major order
// with columns row,col,<fuel params>. Wind schema: timestamp,speed_mps,
// direction_deg.
RegionGrid load_region(const std::string& path);
std::vector<WindState> load_wind_series(const std::string& path);
void save_region(const RegionGrid& g, const std::string& path);

// Validates one zone's fuel parameters; throws std::runtime_error naming the
// offending field. Enforces eta >= 1, 0 < q_init <= eta, xi in (0,1],
// lambda >= 0 with lambda*(eta-1) <= 1+xi, moisture in [0,1), positive loads.
void validate_fuel(const FuelParams& f, int zone_index);

}  // namespace wildsim
