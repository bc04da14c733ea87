#include "smsim/linklevel.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "smsim/channel.hpp"
#include "smsim/rng.hpp"

namespace smsim {

namespace {
constexpr std::uint64_t kPerPointStream = 0x9e7;

std::vector<std::uint8_t> draw_message(int k, std::mt19937_64& rng) {
  std::vector<std::uint8_t> msg(k);
  std::uint64_t word = 0;
  for (int j = 0; j < k; ++j) {
    if ((j & 63) == 0) word = rng();
    msg[j] = static_cast<std::uint8_t>((word >> (j & 63)) & 1);
  }
  return msg;
}
}  // namespace

double noise_variance_per_subcarrier(double snr_db, const OfdmParams& params) {
  params.validate();
  double lin = std::pow(10.0, snr_db / 10.0);
  double var = params.power_norm / (params.n_fft * lin);
  if (!std::isfinite(var) || var <= 0.0)
    throw std::invalid_argument("snr does not map to a usable noise variance");
  return var;
}

int default_worker_count() {
  if (const char* env = std::getenv("SMSIM_WORKERS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

LinkSimulator::LinkSimulator(LinkConfig cfg)
    : cfg_(cfg),
      code_(LdpcCode::make_regular(204, 408, cfg.code_seed)),
      interleaver_(code_.n(), cfg.interleaver_seed) {
  cfg_.ofdm.validate();
  if (cfg_.packets_per_task <= 0) throw std::invalid_argument("packets_per_task must be positive");
}

LinkSimulator::TaskOut LinkSimulator::run_task(const McsId& mcs, double sigma2,
                                               long long n_packets, std::mt19937_64 rng) const {
  BpDecoder decoder(code_);
  std::optional<OfdmFramer> framer;
  if (cfg_.time_domain) framer.emplace(cfg_.ofdm);

  TaskOut out;
  const int n = code_.n();
  for (long long p = 0; p < n_packets; ++p) {
    auto message = draw_message(code_.k(), rng);
    auto coded = code_.encode(message);
    auto tx_bits = interleaver_.interleave(coded);

    FreqGrid grid = mcs.is_mfsk() ? mfsk_modulate(tx_bits, mcs, cfg_.ofdm, rng)
                                  : bpsk_modulate(tx_bits, cfg_.ofdm);
    if (cfg_.time_domain) {
      auto samples = framer->frame(grid);
      add_awgn(samples, sigma2, rng);
      grid = framer->deframe(samples);
    } else {
      add_awgn(grid.cells, sigma2, rng);
    }

    auto llrs = demodulate_grid(grid, mcs, cfg_.ofdm, sigma2);
    llrs.resize(n);  // drop zero-padding positions
    auto deinterleaved = interleaver_.deinterleave(llrs);
    auto decoded = decoder.decode(deinterleaved);

    ++out.packets;
    if (decoded.message != message) ++out.errors;
  }
  return out;
}

PerPoint LinkSimulator::run_per_point(const McsId& mcs, double snr_db, const StopRule& stop,
                                      std::uint64_t seed) const {
  if (stop.min_errors <= 0 || stop.max_packets <= 0)
    throw std::invalid_argument("stopping rule must be positive");
  double sigma2 = noise_variance_per_subcarrier(snr_db, cfg_.ofdm);

  const long long task_size = cfg_.packets_per_task;
  const long long total_tasks = (stop.max_packets + task_size - 1) / task_size;
  int workers = cfg_.workers > 0 ? cfg_.workers : default_worker_count();
  workers = static_cast<int>(std::min<long long>(workers, total_tasks));

  std::map<long long, TaskOut> results;
  std::mutex mtx;
  std::atomic<long long> next{0};
  std::atomic<long long> stop_after{total_tasks};  // first task index not needed

  auto worker = [&] {
    while (true) {
      long long t = next.fetch_add(1);
      if (t >= total_tasks || t >= stop_after.load()) break;
      long long n = std::min<long long>(task_size, stop.max_packets - t * task_size);
      auto rng = substream(seed, {kPerPointStream, mcs.key(), snr_key(snr_db),
                                  static_cast<std::uint64_t>(t)});
      TaskOut out = run_task(mcs, sigma2, n, rng);

      std::lock_guard<std::mutex> lock(mtx);
      results[t] = out;
      // grow the contiguous prefix and see whether it already satisfies the rule
      long long cum_err = 0, cum_pkt = 0, frontier = 0;
      for (auto& [idx, r] : results) {
        if (idx != frontier) break;
        cum_err += r.errors;
        cum_pkt += r.packets;
        ++frontier;
        if (cum_err >= stop.min_errors || cum_pkt >= stop.max_packets) {
          if (frontier < stop_after.load()) stop_after.store(frontier);
          break;
        }
      }
    }
  };

  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // the reported point is the minimal task prefix meeting the rule, which
  // does not depend on worker scheduling
  PerPoint point;
  point.snr_db = snr_db;
  for (long long t = 0; t < total_tasks; ++t) {
    auto it = results.find(t);
    if (it == results.end()) break;
    point.packets += it->second.packets;
    point.errors += it->second.errors;
    if (point.errors >= stop.min_errors || point.packets >= stop.max_packets) break;
  }
  if (point.packets == 0) throw std::runtime_error("no packets were simulated");
  point.per = static_cast<double>(point.errors) / static_cast<double>(point.packets);
  point.ci95 = 1.96 * std::sqrt(point.per * (1.0 - point.per) / static_cast<double>(point.packets));
  return point;
}

std::vector<PerPoint> LinkSimulator::per_curve(const McsId& mcs, std::span<const double> snr_grid,
                                               const StopRule& stop, std::uint64_t seed) const {
  if (snr_grid.empty()) throw std::invalid_argument("snr grid is empty");
  for (std::size_t i = 1; i < snr_grid.size(); ++i)
    if (snr_grid[i] <= snr_grid[i - 1])
      throw std::invalid_argument("snr grid must be strictly increasing");
  std::vector<PerPoint> curve;
  curve.reserve(snr_grid.size());
  for (double snr : snr_grid) curve.push_back(run_per_point(mcs, snr, stop, seed));
  return curve;
}

double extract_threshold(std::span<const PerPoint> curve, double target_per) {
  if (curve.empty()) throw std::invalid_argument("empty curve");
  if (target_per <= 0.0 || target_per >= 1.0)
    throw std::invalid_argument("target per must lie in (0,1)");
  for (const PerPoint& p : curve)
    if (p.per == target_per) return p.snr_db;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    double hi = curve[i].per, lo = curve[i + 1].per;
    if (hi > target_per && lo < target_per) {
      // a zero-error point still bounds the per from above
      if (lo <= 0.0) lo = 0.5 / static_cast<double>(curve[i + 1].packets);
      if (lo >= target_per) return curve[i + 1].snr_db;
      double f = (std::log10(hi) - std::log10(target_per)) /
                 (std::log10(hi) - std::log10(lo));
      return curve[i].snr_db + f * (curve[i + 1].snr_db - curve[i].snr_db);
    }
  }
  throw ThresholdNotBracketed("per curve does not bracket the target rate; widen the snr grid");
}

ThresholdEntry simulate_threshold(const LinkSimulator& sim, const McsId& mcs,
                                  const ThresholdSearch& search, std::uint64_t seed,
                                  std::vector<PerPoint>* curve_out) {
  if (!(search.step_db > 0.0)) throw std::invalid_argument("search step must be positive");
  if (search.max_points < 2) throw std::invalid_argument("search needs at least two points");

  std::vector<PerPoint> curve;
  const auto probe = [&](double snr) {
    curve.push_back(sim.run_per_point(mcs, snr, search.stop, seed));
    std::sort(curve.begin(), curve.end(),
              [](const PerPoint& a, const PerPoint& b) { return a.snr_db < b.snr_db; });
  };
  const auto have_above = [&] {
    return std::any_of(curve.begin(), curve.end(),
                       [&](const PerPoint& p) { return p.per >= search.target_per; });
  };
  const auto have_below = [&] {
    return std::any_of(curve.begin(), curve.end(),
                       [&](const PerPoint& p) { return p.per < search.target_per; });
  };

  probe(search.start_snr_db);
  double lo = search.start_snr_db, hi = search.start_snr_db;
  while (static_cast<int>(curve.size()) < search.max_points && !(have_above() && have_below())) {
    // per falls with snr, so missing high-per points lie at lower snr
    if (!have_above())
      probe(lo -= search.step_db);
    else
      probe(hi += search.step_db);
  }

  const double gamma = extract_threshold(curve, search.target_per);
  if (curve_out) *curve_out = curve;
  return {mcs, gamma, search.target_per, "simulate", seed};
}

ThresholdTable ThresholdTable::bundled_reference() {
  ThresholdTable t;
  const std::pair<int, double> mfsk[] = {{2, 2.9},  {4, 1.25},  {8, -0.75},
                                         {16, -3.25}, {64, -8.25}, {256, -13.25}};
  for (auto [m, g] : mfsk) t.set({McsId::mfsk(m), g, 1e-3, "paper", 0});
  t.set({McsId::bpsk(), 0.75, 1e-3, "paper", 0});
  t.validate_ordering();
  return t;
}

void ThresholdTable::set(ThresholdEntry entry) {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const ThresholdEntry& e) { return e.mcs == entry.mcs; });
  if (it != entries_.end()) {
    *it = std::move(entry);
    return;
  }
  entries_.push_back(std::move(entry));
  std::sort(entries_.begin(), entries_.end(),
            [](const ThresholdEntry& a, const ThresholdEntry& b) { return a.mcs < b.mcs; });
}

bool ThresholdTable::contains(const McsId& mcs) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const ThresholdEntry& e) { return e.mcs == mcs; });
}

double ThresholdTable::gamma0(const McsId& mcs) const {
  for (const ThresholdEntry& e : entries_)
    if (e.mcs == mcs) return e.gamma0_db;
  throw std::invalid_argument("no threshold entry for " + mcs.name());
}

void ThresholdTable::validate_ordering() const {
  double prev = std::numeric_limits<double>::infinity();
  for (int m : kMfskSizes) {
    McsId mcs = McsId::mfsk(m);
    if (!contains(mcs)) continue;
    double g = gamma0(mcs);
    if (g >= prev)
      throw std::runtime_error("mfsk thresholds must improve strictly with subset size");
    prev = g;
  }
  bool all_reference = !entries_.empty() &&
                       std::all_of(entries_.begin(), entries_.end(),
                                   [](const ThresholdEntry& e) { return e.provenance == "paper"; });
  if (all_reference && contains(McsId::bpsk()) && contains(McsId::mfsk(8)) &&
      contains(McsId::mfsk(4))) {
    double b = gamma0(McsId::bpsk());
    if (!(gamma0(McsId::mfsk(8)) < b && b < gamma0(McsId::mfsk(4))))
      throw std::runtime_error("reference bpsk threshold must sit between mfsk8 and mfsk4");
  }
}

void ThresholdTable::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "mcs,m,gamma0_db,target_per,provenance,seed\n";
  char line[160];
  for (const ThresholdEntry& e : entries_) {
    std::snprintf(line, sizeof line, "%s,%d,%.10g,%.10g,%s,%llu\n",
                  e.mcs.is_mfsk() ? "mfsk" : "bpsk", e.mcs.m, e.gamma0_db, e.target_per,
                  e.provenance.c_str(), static_cast<unsigned long long>(e.seed));
    out << line;
  }
}

ThresholdTable ThresholdTable::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "mcs,m,gamma0_db,target_per,provenance,seed")
    throw std::runtime_error(path.string() + ": unexpected header row");
  ThresholdTable t;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field[6];
    for (int i = 0; i < 6; ++i)
      if (!std::getline(ss, field[i], i < 5 ? ',' : '\n'))
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                 ": expected 6 fields");
    try {
      int m = std::stoi(field[1]);
      McsId mcs = field[0] == "bpsk" ? McsId::bpsk() : McsId::mfsk(m);
      t.set({mcs, std::stod(field[2]), std::stod(field[3]), field[4],
             std::stoull(field[5])});
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  t.validate_ordering();
  return t;
}

}  // namespace smsim
