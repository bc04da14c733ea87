#pragma once

#include <random>
#include <span>
#include <string>
#include <vector>

#include "smsim/ofdm.hpp"

namespace smsim {

enum class Direction { Uplink, Downlink };

std::string to_string(Direction d);
Direction direction_from_name(std::string_view name);

// 900 MHz macro-cell propagation constants per deployment environment
struct Environment {
  enum class Kind { Urban, Rural };
  Kind kind;
  double l0_db;         // path loss at 1 km
  double n_exp;         // path loss exponent
  double sm_per_km2;    // meter density

  static Environment urban() { return {Kind::Urban, 120.9, 3.76, 2000.0}; }
  static Environment rural() { return {Kind::Rural, 95.5, 3.41, 10.0}; }
  std::string name() const { return kind == Kind::Urban ? "urban" : "rural"; }
};

Environment environment_from_name(std::string_view name);

struct NoiseModel {
  double bandwidth_hz = 3e6;
  double temperature_k = 290.0;
  double noise_figure_db = 5.0;
};

// One direction's power budget. The base station carries the 12 dBi sector
// antenna; meters are 0 dBi. Every meter sits indoors behind one wall.
struct LinkBudget {
  double p_tx_dbm;
  double g_tx_dbi;
  double g_rx_dbi;
  double l_penetration_db = 12.0;
  double l_indoor_db = 8.0;
  double shadow_sigma_db = 10.0;
  NoiseModel noise;
  Direction direction;

  static LinkBudget uplink() {
    return {24.0, 0.0, 12.0, 12.0, 8.0, 10.0, {3e6, 290.0, 5.0}, Direction::Uplink};
  }
  static LinkBudget downlink() {
    return {32.0, 12.0, 0.0, 12.0, 8.0, 10.0, {3e6, 290.0, 9.0}, Direction::Downlink};
  }
};

// circularly-symmetric complex gaussian noise, variance split evenly between
// the real and imaginary parts
void add_awgn(std::span<cplx> samples, double noise_variance, std::mt19937_64& rng);
std::vector<cplx> awgn(std::span<const cplx> samples, double noise_variance,
                       std::mt19937_64& rng);

double path_loss_db(double d_km, const Environment& env, double shadow_db);
double draw_shadowing_db(std::mt19937_64& rng, double sigma_db);
double total_loss_db(double outdoor_db, double penetration_db, double indoor_db);

// sector pattern: -min(12 (theta/65deg)^2, 20 dB), boresight at zero
double antenna_pattern_db(double angle_rad);

double received_power_dbm(const LinkBudget& budget, double total_loss_db, double angle_rad);
double noise_power_dbm(const NoiseModel& noise);
double snr_db(double p_rx_dbm, double p_n_dbm);

}  // namespace smsim
