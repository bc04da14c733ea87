#include "smsim/syslevel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "smsim/rng.hpp"

namespace smsim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSectorRad = 2.0 * kPi / 3.0;

void check_scenario(const Scenario& sc) {
  if (!(sc.cell_radius_km > 0.0)) throw std::invalid_argument("cell radius must be positive");
  if (!(sc.min_distance_km >= 0.0) || sc.min_distance_km >= 2.0 * sc.cell_radius_km)
    throw std::invalid_argument("min distance must sit inside the cell");
}

std::mt19937_64 scenario_stream(const Scenario& sc, std::uint64_t tag, std::uint64_t drop) {
  return substream(sc.seed, {tag, static_cast<std::uint64_t>(sc.env.kind),
                             static_cast<std::uint64_t>(sc.direction),
                             static_cast<std::uint64_t>(std::llround(sc.cell_radius_km * 1e6)),
                             drop});
}

}  // namespace

int sm_count(const Environment& env, double radius_km) {
  if (!(radius_km > 0.0)) throw std::invalid_argument("cell radius must be positive");
  return static_cast<int>(std::floor(env.sm_per_km2 * kPi * radius_km * radius_km));
}

LinkBudget budget_for(Direction direction) {
  return direction == Direction::Uplink ? LinkBudget::uplink() : LinkBudget::downlink();
}

SmRecord sample_sm(const Scenario& scenario, const LinkBudget& budget, double noise_dbm,
                   std::mt19937_64& rng) {
  const double dmin = scenario.min_distance_km;
  const double dmax = 2.0 * scenario.cell_radius_km;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SmRecord sm;
  // uniform over the annulus area: cdf of the distance goes with r^2
  const double u = unit(rng);
  sm.distance_km = std::sqrt(dmin * dmin + u * (dmax * dmax - dmin * dmin));
  sm.azimuth_rad = std::uniform_real_distribution<double>(-kPi, kPi)(rng);
  sm.shadow_db = draw_shadowing_db(rng, budget.shadow_sigma_db);

  // off-boresight angle within the serving sector, or boresight when the
  // pattern is not applied
  const double angle =
      scenario.apply_antenna_pattern ? std::remainder(sm.azimuth_rad, kSectorRad) : 0.0;
  const double loss = total_loss_db(path_loss_db(sm.distance_km, scenario.env, sm.shadow_db),
                                    budget.l_penetration_db, budget.l_indoor_db);
  sm.snr_db = snr_db(received_power_dbm(budget, loss, angle), noise_dbm);
  return sm;
}

DeploymentDrop drop_sms(const Scenario& scenario, std::mt19937_64& rng) {
  check_scenario(scenario);
  const int k = sm_count(scenario.env, scenario.cell_radius_km);
  const LinkBudget budget = budget_for(scenario.direction);
  const double noise_dbm = noise_power_dbm(budget.noise);

  DeploymentDrop drop;
  drop.sms.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) drop.sms.push_back(sample_sm(scenario, budget, noise_dbm, rng));
  return drop;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("empirical cdf needs at least one sample");
  std::sort(values_.begin(), values_.end());
}

double EmpiricalCdf::operator()(double x) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

EmpiricalCdf snr_cdf(const DeploymentDrop& drop) {
  std::vector<double> snrs;
  snrs.reserve(drop.sms.size());
  for (const auto& sm : drop.sms) snrs.push_back(sm.snr_db);
  return EmpiricalCdf(std::move(snrs));
}

EmpiricalCdf pooled_snr_cdf(const Scenario& scenario) {
  check_scenario(scenario);
  if (scenario.n_drops <= 0) throw std::invalid_argument("need at least one drop");
  std::vector<double> snrs;
  for (int d = 0; d < scenario.n_drops; ++d) {
    auto rng = scenario_stream(scenario, 0x5d0bu, static_cast<std::uint64_t>(d));
    const DeploymentDrop drop = drop_sms(scenario, rng);
    for (const auto& sm : drop.sms) snrs.push_back(sm.snr_db);
  }
  return EmpiricalCdf(std::move(snrs));
}

std::optional<McsId> select_mcs(double snr_db, const ThresholdTable& thresholds,
                                bool include_bpsk) {
  if (include_bpsk) {
    const McsId bpsk = McsId::bpsk();
    if (thresholds.contains(bpsk) && snr_db >= thresholds.gamma0(bpsk)) return bpsk;
  }
  for (int m : kMfskSizes) {
    const McsId mcs = McsId::mfsk(m);
    if (thresholds.contains(mcs) && snr_db >= thresholds.gamma0(mcs)) return mcs;
  }
  return std::nullopt;
}

LinkBudget planning_budget() {
  LinkBudget budget = LinkBudget::uplink();
  budget.noise.noise_figure_db = 9.0;
  return budget;
}

double max_cell_diameter_km(double gamma0_db, const Environment& env, const LinkBudget& budget) {
  const double margin = budget.p_tx_dbm + budget.g_tx_dbi + budget.g_rx_dbi - gamma0_db -
                        noise_power_dbm(budget.noise) - budget.l_penetration_db -
                        budget.l_indoor_db - env.l0_db;
  const double d = std::pow(10.0, margin / (10.0 * env.n_exp));
  if (!std::isfinite(d) || d <= 0.0)
    throw std::invalid_argument("link budget admits no positive diameter");
  return d;
}

double outage_probability(const Scenario& scenario, double gamma0_db, long long n_samples,
                          std::mt19937_64& rng) {
  check_scenario(scenario);
  if (n_samples <= 0) throw std::invalid_argument("need at least one sample");
  const LinkBudget budget = budget_for(scenario.direction);
  const double noise_dbm = noise_power_dbm(budget.noise);
  long long out = 0;
  for (long long i = 0; i < n_samples; ++i)
    if (sample_sm(scenario, budget, noise_dbm, rng).snr_db < gamma0_db) ++out;
  return static_cast<double>(out) / static_cast<double>(n_samples);
}

double radius_at_outage(const Scenario& scenario, double gamma0_db, double target_outage,
                        long long n_samples, double lo_km, double hi_km) {
  if (!(target_outage > 0.0 && target_outage < 1.0))
    throw std::invalid_argument("target outage must lie in (0, 1)");
  if (!(lo_km > 0.0 && lo_km < hi_km)) throw std::invalid_argument("bad radius bracket");

  // Same substream at every radius: common random numbers keep the empirical
  // outage monotone in the radius, so plain bisection converges.
  const auto eval = [&](double r) {
    Scenario s = scenario;
    s.cell_radius_km = r;
    auto rng = substream(scenario.seed, {0xad1eu});
    return outage_probability(s, gamma0_db, n_samples, rng);
  };

  if (eval(lo_km) > target_outage || eval(hi_km) < target_outage)
    throw std::invalid_argument("target outage not bracketed by the radius interval");

  double lo = lo_km, hi = hi_km;
  for (int i = 0; i < 40 && hi - lo > 1e-4; ++i) {
    const double mid = 0.5 * (lo + hi);
    (eval(mid) <= target_outage ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

McsDistribution mcs_probabilities(const DeploymentDrop& drop, const ThresholdTable& thresholds,
                                  bool include_bpsk) {
  if (drop.sms.empty()) throw std::invalid_argument("empty deployment drop");

  std::vector<McsId> pool;
  if (include_bpsk) pool.push_back(McsId::bpsk());
  for (int m : kMfskSizes) pool.push_back(McsId::mfsk(m));

  std::vector<long long> counts(pool.size(), 0);
  long long connected = 0;
  for (const auto& sm : drop.sms) {
    const auto mcs = select_mcs(sm.snr_db, thresholds, include_bpsk);
    if (!mcs) continue;
    ++connected;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (pool[i] == *mcs) {
        ++counts[i];
        break;
      }
  }

  const double k = static_cast<double>(drop.sms.size());
  McsDistribution dist;
  for (std::size_t i = 0; i < pool.size(); ++i)
    dist.shares.push_back({pool[i], static_cast<double>(counts[i]) / k, mcs_rate_bps(pool[i])});
  dist.unconnected = static_cast<double>(drop.count() - connected) / k;
  return dist;
}

double sector_capacity_bps(const McsDistribution& dist) {
  double cap = 0.0;
  for (const auto& share : dist.shares) cap += share.probability * share.rate_bps;
  return cap;
}

long long blocks_per_message(long long message_bits, long long tb_bits) {
  if (tb_bits <= 0) throw std::invalid_argument("transport block must carry at least one bit");
  if (message_bits < 0) throw std::invalid_argument("negative message length");
  return (message_bits + tb_bits - 1) / tb_bits;
}

double avg_transport_blocks(long long k_total, std::span<const double> probabilities,
                            std::span<const long long> blocks) {
  if (probabilities.size() != blocks.size())
    throw std::invalid_argument("probability/block arrays must match");
  if (k_total < 0) throw std::invalid_argument("negative meter count");
  double per_sm = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i)
    per_sm += probabilities[i] * static_cast<double>(blocks[i]);
  return static_cast<double>(k_total) * per_sm;
}

long long CapacityModel::tb_bits(const McsId& mcs) const {
  if (tb_base_bits <= 0) throw std::invalid_argument("transport block base must be positive");
  if (!mcs.is_mfsk()) return tb_base_bits;
  const long long scaled =
      static_cast<long long>(tb_base_bits) * mcs.bits_per_subset() / mcs.m;
  return std::max<long long>(1, scaled);
}

double capacity_per_sm_bps(const CapacityModel& model, double n_tb) {
  if (n_tb < 0.0 || !std::isfinite(n_tb)) throw std::invalid_argument("bad block count");
  if (n_tb == 0.0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(model.message_bits) * model.tb_rate_per_s / n_tb;
}

int connected_sms(const DeploymentDrop& drop, double gamma0_db) {
  int n = 0;
  for (const auto& sm : drop.sms)
    if (sm.snr_db >= gamma0_db) ++n;
  return n;
}

CellStats evaluate_cell(const Scenario& scenario, const ThresholdTable& thresholds,
                        int tb_base_bits) {
  check_scenario(scenario);
  if (scenario.n_drops <= 0) throw std::invalid_argument("need at least one drop");

  const CapacityModel model = scenario.direction == Direction::Uplink
                                  ? CapacityModel::uplink(tb_base_bits)
                                  : CapacityModel::downlink(tb_base_bits);
  const McsId bpsk = McsId::bpsk();
  const double gamma_bpsk = thresholds.gamma0(bpsk);
  const double gamma_mfsk = thresholds.gamma0(McsId::mfsk(256));
  const long long n_tb_bpsk_msg = blocks_per_message(model.message_bits, model.tb_bits(bpsk));

  CellStats stats;
  stats.env = scenario.env;
  stats.direction = scenario.direction;
  stats.radius_km = scenario.cell_radius_km;
  stats.k_total = sm_count(scenario.env, scenario.cell_radius_km);
  stats.drops = scenario.n_drops;

  for (int d = 0; d < scenario.n_drops; ++d) {
    auto rng = scenario_stream(scenario, 0xd207u, static_cast<std::uint64_t>(d));
    const DeploymentDrop drop = drop_sms(scenario, rng);

    const McsDistribution dist = mcs_probabilities(drop, thresholds, false);
    std::vector<double> probs;
    std::vector<long long> blocks;
    for (const auto& share : dist.shares) {
      probs.push_back(share.probability);
      blocks.push_back(blocks_per_message(model.message_bits, model.tb_bits(share.mcs)));
    }
    const double n_tb = avg_transport_blocks(stats.k_total, probs, blocks);

    stats.mfsk_capacity_bps += sector_capacity_bps(dist);
    stats.mfsk_connected += connected_sms(drop, gamma_mfsk);
    stats.mfsk_per_sm_bps += capacity_per_sm_bps(model, n_tb);

    const int conn_b = connected_sms(drop, gamma_bpsk);
    const double p_b = static_cast<double>(conn_b) / static_cast<double>(stats.k_total);
    stats.bpsk_capacity_bps += p_b * kBpskRateBps;
    stats.bpsk_connected += conn_b;
    stats.bpsk_per_sm_bps += capacity_per_sm_bps(
        model, static_cast<double>(stats.k_total) * p_b * static_cast<double>(n_tb_bpsk_msg));
  }

  const double inv = 1.0 / static_cast<double>(scenario.n_drops);
  stats.mfsk_capacity_bps *= inv;
  stats.mfsk_connected *= inv;
  stats.mfsk_per_sm_bps *= inv;
  stats.bpsk_capacity_bps *= inv;
  stats.bpsk_connected *= inv;
  stats.bpsk_per_sm_bps *= inv;
  return stats;
}

}  // namespace smsim
