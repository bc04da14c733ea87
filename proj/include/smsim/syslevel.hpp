#pragma once

#include <optional>
#include <span>

#include "smsim/channel.hpp"
#include "smsim/linklevel.hpp"

namespace smsim {

struct Scenario {
  Environment env = Environment::urban();
  double cell_radius_km = 0.5;
  Direction direction = Direction::Uplink;
  double min_distance_km = 0.05;
  int n_drops = 100;
  std::uint64_t seed = 1;
  // Fold each meter into its serving sector and weight it by the sector
  // pattern. Off by default: deployment statistics are taken at boresight.
  bool apply_antenna_pattern = false;
};

// meters per sector
int sm_count(const Environment& env, double radius_km);

LinkBudget budget_for(Direction direction);

struct SmRecord {
  double distance_km = 0.0;
  double azimuth_rad = 0.0;
  double shadow_db = 0.0;
  double snr_db = 0.0;
};

struct DeploymentDrop {
  std::vector<SmRecord> sms;
  int count() const { return static_cast<int>(sms.size()); }
};

SmRecord sample_sm(const Scenario& scenario, const LinkBudget& budget, double noise_dbm,
                   std::mt19937_64& rng);

// one Monte-Carlo realization: floor(rho pi R^2) meters placed uniformly in
// area between min_distance and the cell diameter, with per-meter shadowing
DeploymentDrop drop_sms(const Scenario& scenario, std::mt19937_64& rng);

class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> values);
  double operator()(double x) const;  // right-continuous step function
  const std::vector<double>& sorted_values() const { return values_; }

 private:
  std::vector<double> values_;
};

EmpiricalCdf snr_cdf(const DeploymentDrop& drop);
// all per-meter snrs over scenario.n_drops independent drops
EmpiricalCdf pooled_snr_cdf(const Scenario& scenario);

// Highest-rate scheme whose threshold the snr meets: the smallest usable
// subset size, optionally letting plain bpsk compete.
std::optional<McsId> select_mcs(double snr_db, const ThresholdTable& thresholds,
                                bool include_bpsk = false);

// uplink powers with the meter-grade receive noise figure, used for coverage
// planning margins
LinkBudget planning_budget();

// closed-form inversion of the median link budget (shadowing at 0 dB)
double max_cell_diameter_km(double gamma0_db, const Environment& env, const LinkBudget& budget);

double outage_probability(const Scenario& scenario, double gamma0_db, long long n_samples,
                          std::mt19937_64& rng);

// smallest radius where outage hits target_outage, by bisection on radius
double radius_at_outage(const Scenario& scenario, double gamma0_db, double target_outage,
                        long long n_samples, double lo_km, double hi_km);

struct McsShare {
  McsId mcs;
  double probability = 0.0;  // fraction of all meters in the sector
  double rate_bps = 0.0;
};

struct McsDistribution {
  std::vector<McsShare> shares;
  double unconnected = 0.0;
};

McsDistribution mcs_probabilities(const DeploymentDrop& drop, const ThresholdTable& thresholds,
                                  bool include_bpsk = false);

double sector_capacity_bps(const McsDistribution& dist);

long long blocks_per_message(long long message_bits, long long tb_bits);

// K * sum p_i n_i over the connected shares
double avg_transport_blocks(long long k_total, std::span<const double> probabilities,
                            std::span<const long long> blocks);

// Message segmentation into fixed scheduler transport blocks. The bpsk block
// carries tb_base_bits of payload; mfsk blocks shrink with the rate ratio
// log2(m)/m, never below one bit.
struct CapacityModel {
  long long message_bits = 0;
  double tb_rate_per_s = 21000.0;
  int tb_base_bits = 12;

  static CapacityModel uplink(int tb_base = 12) { return {(2133 + 42) * 8, 21000.0, tb_base}; }
  static CapacityModel downlink(int tb_base = 12) { return {(25 + 42) * 8, 21000.0, tb_base}; }

  long long tb_bits(const McsId& mcs) const;
};

// message_bits / (n_tb / tb_rate); unbounded (infinity) when no blocks are
// in flight
double capacity_per_sm_bps(const CapacityModel& model, double n_tb);

int connected_sms(const DeploymentDrop& drop, double gamma0_db);

// per-cell summary averaged over scenario.n_drops, adaptive scheme and bpsk
// side by side
struct CellStats {
  Environment env;
  Direction direction;
  double radius_km = 0.0;
  int k_total = 0;
  int drops = 0;
  double mfsk_capacity_bps = 0.0;
  double mfsk_connected = 0.0;
  double mfsk_per_sm_bps = 0.0;
  double bpsk_capacity_bps = 0.0;
  double bpsk_connected = 0.0;
  double bpsk_per_sm_bps = 0.0;
};

CellStats evaluate_cell(const Scenario& scenario, const ThresholdTable& thresholds,
                        int tb_base_bits = 12);

}  // namespace smsim
