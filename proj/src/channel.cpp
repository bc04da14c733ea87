#include "smsim/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace smsim {

std::string to_string(Direction d) { return d == Direction::Uplink ? "uplink" : "downlink"; }

Direction direction_from_name(std::string_view name) {
  if (name == "uplink" || name == "ul") return Direction::Uplink;
  if (name == "downlink" || name == "dl") return Direction::Downlink;
  throw std::invalid_argument("unknown direction: " + std::string(name));
}

Environment environment_from_name(std::string_view name) {
  if (name == "urban") return Environment::urban();
  if (name == "rural") return Environment::rural();
  throw std::invalid_argument("unknown environment: " + std::string(name));
}

void add_awgn(std::span<cplx> samples, double noise_variance, std::mt19937_64& rng) {
  if (noise_variance < 0) throw std::invalid_argument("noise variance must be non-negative");
  if (noise_variance == 0) return;
  std::normal_distribution<double> dist(0.0, std::sqrt(noise_variance / 2.0));
  for (cplx& s : samples) s += cplx(dist(rng), dist(rng));
}

std::vector<cplx> awgn(std::span<const cplx> samples, double noise_variance,
                       std::mt19937_64& rng) {
  std::vector<cplx> out(samples.begin(), samples.end());
  add_awgn(out, noise_variance, rng);
  return out;
}

double path_loss_db(double d_km, const Environment& env, double shadow_db) {
  if (d_km <= 0) throw std::invalid_argument("distance must be positive");
  return env.l0_db + 10.0 * env.n_exp * std::log10(d_km) + shadow_db;
}

double draw_shadowing_db(std::mt19937_64& rng, double sigma_db) {
  if (sigma_db < 0) throw std::invalid_argument("shadowing sigma must be non-negative");
  if (sigma_db == 0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma_db)(rng);
}

double total_loss_db(double outdoor_db, double penetration_db, double indoor_db) {
  return outdoor_db + penetration_db + indoor_db;
}

double antenna_pattern_db(double angle_rad) {
  constexpr double theta_3db_deg = 65.0;
  constexpr double floor_db = 20.0;
  double deg = angle_rad * 180.0 / std::numbers::pi;
  double ratio = deg / theta_3db_deg;
  return -std::min(12.0 * ratio * ratio, floor_db);
}

double received_power_dbm(const LinkBudget& budget, double total_loss_db, double angle_rad) {
  return budget.p_tx_dbm + budget.g_tx_dbi + antenna_pattern_db(angle_rad) - total_loss_db +
         budget.g_rx_dbi;
}

double noise_power_dbm(const NoiseModel& noise) {
  if (noise.bandwidth_hz <= 0 || noise.temperature_k <= 0)
    throw std::invalid_argument("bandwidth and temperature must be positive");
  return -198.6 + 10.0 * std::log10(noise.bandwidth_hz * noise.temperature_k) +
         noise.noise_figure_db;
}

double snr_db(double p_rx_dbm, double p_n_dbm) { return p_rx_dbm - p_n_dbm; }

}  // namespace smsim
