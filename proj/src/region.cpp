#include "wildsim/region.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wildsim {

double distance_m(const RegionGrid& g, int a, int b) {
  const ZoneId za = g.zone(a), zb = g.zone(b);
  const double dr = zb.row - za.row, dc = zb.col - za.col;
  return g.zone_size_m * std::hypot(dr, dc);
}

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0 ? a + kTwoPi : a;
}

double bearing(const RegionGrid& g, int a, int b) {
  const ZoneId za = g.zone(a), zb = g.zone(b);
  // Displacement east is +col, north is -row; clockwise-from-north bearing
  // is atan2(east, north).
  const double east = zb.col - za.col;
  const double north = -(zb.row - za.row);
  if (east == 0.0 && north == 0.0) return 0.0;
  return wrap_angle(std::atan2(east, north));
}

std::vector<std::pair<int, int>> disk_offsets(const RegionGrid& g, double radius_m) {
  const int rc = static_cast<int>(std::floor(radius_m / g.zone_size_m));
  const double r2 = (radius_m / g.zone_size_m) * (radius_m / g.zone_size_m);
  std::vector<std::pair<int, int>> out;
  for (int dr = -rc; dr <= rc; ++dr)
    for (int dc = -rc; dc <= rc; ++dc)
      if (static_cast<double>(dr) * dr + static_cast<double>(dc) * dc <= r2)
        out.emplace_back(dr, dc);
  return out;
}

std::vector<int> neighbors_within(const RegionGrid& g, int z, double radius_m) {
  const ZoneId c = g.zone(z);
  std::vector<int> out;
  for (const auto& [dr, dc] : disk_offsets(g, radius_m)) {
    const int row = c.row + dr, col = c.col + dc;
    if (g.contains(row, col)) out.push_back(row * g.width + col);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::ArrayXd disk_sums(const Eigen::ArrayXd& field, double radius_m, const RegionGrid& g) {
  const auto offsets = disk_offsets(g, radius_m);
  Eigen::ArrayXd out(g.zone_count());
  for (int z = 0; z < g.zone_count(); ++z) {
    const ZoneId c = g.zone(z);
    double sum = 0.0;
    for (const auto& [dr, dc] : offsets) {
      const int row = c.row + dr, col = c.col + dc;
      if (g.contains(row, col)) sum += field[row * g.width + col];
    }
    out[z] = sum;
  }
  return out;
}

WindState sample_wind(const WindModelParams& p, const WindState& prev, Rng& rng) {
  std::lognormal_distribution<double> speed(p.mu_u, p.sigma_u);
  std::normal_distribution<double> step(0.0, p.sigma_phi);
  WindState w;
  w.speed_mps = speed(rng);
  w.direction_phi = wrap_angle(prev.direction_phi + step(rng));
  return w;
}

void validate_fuel(const FuelParams& f, int z) {
  auto fail = [z](const std::string& what) {
    throw std::runtime_error("zone " + std::to_string(z) + ": " + what);
  };
  if (f.eta < 1) fail("eta must be >= 1");
  if (f.q_init < 1 || f.q_init > f.eta) fail("q_init must be in [1, eta]");
  if (!(f.xi > 0.0 && f.xi <= 1.0)) fail("xi must be in (0, 1]");
  if (f.lambda < 0.0) fail("lambda must be >= 0");
  if (f.lambda * (f.eta - 1) > 1.0 + f.xi) fail("lambda*(eta-1) exceeds 1+xi");
  if (!(f.kappa_moist >= 0.0 && f.kappa_moist < 1.0)) fail("kappa_moist must be in [0, 1)");
  if (f.kappa_load <= 0.0 || f.kappa_depth <= 0.0 || f.kappa_dens <= 0.0 || f.kappa_sav <= 0.0 ||
      f.kappa_heat <= 0.0)
    fail("fuel bed parameters must be positive");
  if (f.m_tot < 0.0 || f.m_tot >= 1.0 || f.m_eff <= 0.0 || f.m_eff >= 1.0)
    fail("mineral fractions out of range");
  if (f.r < 0.0 || f.c <= 0.0) fail("value/sensor coefficients out of range");
}

namespace {

const char* kRegionHeader =
    "row,col,kappa_load,kappa_sav,kappa_depth,kappa_moist,kappa_heat,kappa_dens,"
    "m_tot,m_eff,kappa_elev,lambda,xi,r,c,eta,q_init";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, int line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
}

}  // namespace

RegionGrid load_region(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open region file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty region file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRegionHeader)
    throw std::runtime_error("region header mismatch, expected: " + std::string(kRegionHeader));

  struct Row {
    int row, col;
    FuelParams f;
  };
  std::vector<Row> rows;
  int line_no = 1;
  int max_row = -1, max_col = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 17)
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected 17 columns, got " +
                               std::to_string(cells.size()));
    Row r;
    r.row = static_cast<int>(to_double(cells[0], line_no));
    r.col = static_cast<int>(to_double(cells[1], line_no));
    r.f.kappa_load = to_double(cells[2], line_no);
    r.f.kappa_sav = to_double(cells[3], line_no);
    r.f.kappa_depth = to_double(cells[4], line_no);
    r.f.kappa_moist = to_double(cells[5], line_no);
    r.f.kappa_heat = to_double(cells[6], line_no);
    r.f.kappa_dens = to_double(cells[7], line_no);
    r.f.m_tot = to_double(cells[8], line_no);
    r.f.m_eff = to_double(cells[9], line_no);
    r.f.kappa_elev = to_double(cells[10], line_no);
    r.f.lambda = to_double(cells[11], line_no);
    r.f.xi = to_double(cells[12], line_no);
    r.f.r = to_double(cells[13], line_no);
    r.f.c = to_double(cells[14], line_no);
    r.f.eta = static_cast<int>(to_double(cells[15], line_no));
    r.f.q_init = static_cast<int>(to_double(cells[16], line_no));
    if (r.row < 0 || r.col < 0)
      throw std::runtime_error("line " + std::to_string(line_no) + ": negative row/col");
    max_row = std::max(max_row, r.row);
    max_col = std::max(max_col, r.col);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw std::runtime_error("region file has no zones: " + path);

  RegionGrid g;
  g.height = max_row + 1;
  g.width = max_col + 1;
  if (static_cast<std::size_t>(g.zone_count()) != rows.size())
    throw std::runtime_error("region dimension mismatch: " + std::to_string(rows.size()) +
                             " rows for a " + std::to_string(g.width) + "x" +
                             std::to_string(g.height) + " grid");
  g.fuel.resize(g.zone_count());
  std::vector<char> seen(g.zone_count(), 0);
  for (const auto& r : rows) {
    const int idx = r.row * g.width + r.col;
    if (seen[idx])
      throw std::runtime_error("duplicate zone (" + std::to_string(r.row) + "," +
                               std::to_string(r.col) + ")");
    seen[idx] = 1;
    g.fuel[idx] = r.f;
  }
  for (int z = 0; z < g.zone_count(); ++z) validate_fuel(g.fuel[z], z);
  g.home = g.zone(0);
  return g;
}

void save_region(const RegionGrid& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write region file: " + path);
  out << kRegionHeader << "\n";
  for (int z = 0; z < g.zone_count(); ++z) {
    const ZoneId id = g.zone(z);
    const FuelParams& f = g.fuel[z];
    out << id.row << ',' << id.col << ',' << f.kappa_load << ',' << f.kappa_sav << ','
        << f.kappa_depth << ',' << f.kappa_moist << ',' << f.kappa_heat << ',' << f.kappa_dens
        << ',' << f.m_tot << ',' << f.m_eff << ',' << f.kappa_elev << ',' << f.lambda << ','
        << f.xi << ',' << f.r << ',' << f.c << ',' << f.eta << ',' << f.q_init << "\n";
  }
}

std::vector<WindState> load_wind_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open wind file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty wind file: " + path);
  std::vector<WindState> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 3)
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected timestamp,speed_mps,direction_deg");
    WindState w;
    w.speed_mps = to_double(cells[1], line_no);
    if (w.speed_mps < 0.0)
      throw std::runtime_error("line " + std::to_string(line_no) + ": negative wind speed");
    w.direction_phi = wrap_angle(to_double(cells[2], line_no) * kPi / 180.0);
    out.push_back(w);
  }
  if (out.empty()) throw std::runtime_error("wind file has no samples: " + path);
  return out;
}

}  // namespace wildsim
