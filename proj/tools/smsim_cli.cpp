// Scenario runner. Every command writes csv artifacts plus a sidecar
// manifest (config hash, seed, version, wall clock) into --out.
//
// csv schemas:
//   per_curve.csv        mcs,snr_db,packets,errors,per,ci95
//   thresholds.csv       mcs,m,gamma0_db,target_per,provenance,seed
//   snr_cdf.csv          env,direction,radius_km,snr_db,cdf
//   outage_vs_radius.csv env,direction,scheme,radius_km,outage_probability
//   capacity_vs_k.csv    env,direction,radius_km,scheme,k,sector_capacity_bps,
//                        connected_sms,capacity_per_sm_bps
//   tables_4_to_7.csv    same columns as capacity_vs_k.csv, k fixed at the
//                        deployment population
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "smsim/linklevel.hpp"
#include "smsim/syslevel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace smsim;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  std::uint64_t seed = 1;
  int workers = 0;  // 0: SMSIM_WORKERS env var, else hardware count
  std::string out = "out";
  std::string threshold_source = "paper";
  std::string env_name = "urban";
  std::string direction = "ul";
  double radius_km = 0.5;
  std::string mcs = "all";
  long long min_errors = 100;
  long long max_packets = 200'000;
  int drops = 100;
  long long outage_samples = 20'000;
  int tb_base_bits = 12;
  bool include_bpsk = false;
  bool time_domain = false;
  double snr_min = std::numeric_limits<double>::quiet_NaN();
  double snr_max = std::numeric_limits<double>::quiet_NaN();
  double snr_step = 0.5;
  bool no_bundled = false;
  std::string thresholds_csv;
};

std::string fmtg(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json resolved_json(const Options& o, const std::string& command) {
  return json{{"command", command},
              {"seed", o.seed},
              {"workers", o.workers},
              {"out", o.out},
              {"threshold_source", o.threshold_source},
              {"env", o.env_name},
              {"direction", o.direction},
              {"radius_km", o.radius_km},
              {"mcs", o.mcs},
              {"min_errors", o.min_errors},
              {"max_packets", o.max_packets},
              {"drops", o.drops},
              {"outage_samples", o.outage_samples},
              {"tb_base_bits", o.tb_base_bits},
              {"include_bpsk", o.include_bpsk},
              {"time_domain", o.time_domain},
              {"snr_min", o.snr_min},
              {"snr_max", o.snr_max},
              {"snr_step", o.snr_step},
              {"no_bundled", o.no_bundled},
              {"thresholds_csv", o.thresholds_csv}};
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Emitter {
 public:
  Emitter(const Options& opts, std::string command)
      : opts_(opts), command_(std::move(command)) {
    fs::create_directories(opts.out);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016" PRIx64,
                  fnv1a64(resolved_json(opts, command_).dump()));
    config_hash_ = buf;
  }

  void write_csv(const std::string& name, const std::string& header,
                 const std::vector<std::string>& rows) const {
    const fs::path path = fs::path(opts_.out) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << header << '\n';
    for (const auto& r : rows) out << r << '\n';
    out.close();
    if (!out) throw std::runtime_error("write failed for " + path.string());
    write_manifest(path);
  }

 private:
  void write_manifest(const fs::path& csv_path) const {
    json m{{"command", command_},
           {"config_hash", config_hash_},
           {"seed", opts_.seed},
           {"version", SMSIM_VERSION},
           {"workers", opts_.workers},
           {"wall_clock_utc", utc_now()}};
    const fs::path path = csv_path.string() + ".manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << m.dump(2) << '\n';
  }

  const Options& opts_;
  std::string command_;
  std::string config_hash_;
};

void load_config(const std::string& path, Options& o) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config " + path + ": top level must be an object");

  const auto get = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      field = j.at(key).get<std::decay_t<decltype(field)>>();
    } catch (const json::exception&) {
      throw ConfigError("config " + path + ": field '" + key + "' has the wrong type");
    }
    j.erase(key);
  };
  get("seed", o.seed);
  get("workers", o.workers);
  get("out", o.out);
  get("threshold_source", o.threshold_source);
  get("env", o.env_name);
  get("direction", o.direction);
  get("radius_km", o.radius_km);
  get("mcs", o.mcs);
  get("min_errors", o.min_errors);
  get("max_packets", o.max_packets);
  get("drops", o.drops);
  get("outage_samples", o.outage_samples);
  get("tb_base_bits", o.tb_base_bits);
  get("include_bpsk", o.include_bpsk);
  get("time_domain", o.time_domain);
  get("snr_min", o.snr_min);
  get("snr_max", o.snr_max);
  get("snr_step", o.snr_step);
  get("no_bundled", o.no_bundled);
  get("thresholds_csv", o.thresholds_csv);
  if (!j.empty())
    throw ConfigError("config " + path + ": unknown field '" + j.begin().key() + "'");
}

std::vector<McsId> parse_mcs_list(const std::string& spec) {
  std::vector<McsId> out;
  if (spec == "all") {
    for (const auto& m : all_mcs()) out.push_back(m);
    return out;
  }
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t comma = spec.find(',', pos);
    const std::string name =
        spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (name.empty()) throw ConfigError("empty entry in mcs list '" + spec + "'");
    try {
      out.push_back(mcs_from_name(name));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

ThresholdTable resolve_thresholds(const Options& o) {
  if (!o.thresholds_csv.empty()) return ThresholdTable::load_csv(o.thresholds_csv);
  if (o.threshold_source == "paper") {
    if (o.no_bundled)
      throw ConfigError(
          "threshold source 'paper' needs the bundled table, but no_bundled is set; "
          "pass thresholds_csv instead");
    return ThresholdTable::bundled_reference();
  }
  // simulate: full per sweeps for every scheme
  const ThresholdTable ref = ThresholdTable::bundled_reference();
  LinkConfig cfg;
  cfg.time_domain = o.time_domain;
  cfg.workers = o.workers;
  const LinkSimulator sim(cfg);
  ThresholdTable table;
  for (const auto& mcs : all_mcs()) {
    ThresholdSearch search;
    search.start_snr_db = ref.gamma0(mcs);
    search.stop = {o.min_errors, o.max_packets};
    table.set(simulate_threshold(sim, mcs, search, o.seed));
  }
  table.validate_ordering();
  return table;
}

std::string scheme_gamma_rows_header() {
  return "env,direction,scheme,radius_km,outage_probability";
}

Scenario make_scenario(const Options& o) {
  Scenario sc;
  sc.env = environment_from_name(o.env_name);
  sc.cell_radius_km = o.radius_km;
  sc.direction = direction_from_name(o.direction);
  sc.n_drops = o.drops;
  sc.seed = o.seed;
  return sc;
}

int cmd_per_curve(const Options& o) {
  const Emitter emit(o, "per-curve");
  const ThresholdTable ref = ThresholdTable::bundled_reference();
  LinkConfig cfg;
  cfg.time_domain = o.time_domain;
  cfg.workers = o.workers;
  const LinkSimulator sim(cfg);
  const StopRule stop{o.min_errors, o.max_packets};

  std::vector<std::string> rows;
  for (const auto& mcs : parse_mcs_list(o.mcs)) {
    // default grid hugs the reference threshold where the curve is steep
    const double center = ref.gamma0(mcs);
    const double lo = std::isnan(o.snr_min) ? center - 1.8 : o.snr_min;
    const double hi = std::isnan(o.snr_max) ? center + 1.2 : o.snr_max;
    if (!(o.snr_step > 0.0) || hi < lo) throw ConfigError("bad snr grid");
    std::vector<double> grid;
    for (double s = lo; s <= hi + 1e-9; s += o.snr_step) grid.push_back(s);
    for (const PerPoint& p : sim.per_curve(mcs, grid, stop, o.seed))
      rows.push_back(mcs.name() + "," + fmtg(p.snr_db) + "," + std::to_string(p.packets) + "," +
                     std::to_string(p.errors) + "," + fmtg(p.per) + "," + fmtg(p.ci95));
  }
  emit.write_csv("per_curve.csv", "mcs,snr_db,packets,errors,per,ci95", rows);
  return 0;
}

int cmd_thresholds(const Options& o) {
  const Emitter emit(o, "thresholds");
  const std::vector<McsId> list = parse_mcs_list(o.mcs);
  ThresholdTable table;
  if (o.threshold_source == "paper") {
    if (o.no_bundled)
      throw ConfigError("threshold source 'paper' needs the bundled table, but no_bundled is set");
    const ThresholdTable ref = ThresholdTable::bundled_reference();
    for (const auto& mcs : list) {
      ThresholdEntry e{mcs, ref.gamma0(mcs), 1e-3, "paper", 0};
      table.set(e);
    }
  } else {
    const ThresholdTable ref = ThresholdTable::bundled_reference();
    LinkConfig cfg;
    cfg.time_domain = o.time_domain;
    cfg.workers = o.workers;
    const LinkSimulator sim(cfg);
    for (const auto& mcs : list) {
      ThresholdSearch search;
      search.start_snr_db = ref.gamma0(mcs);
      search.stop = {o.min_errors, o.max_packets};
      table.set(simulate_threshold(sim, mcs, search, o.seed));
    }
  }
  table.save_csv(fs::path(o.out) / "thresholds.csv");
  // rewrite through the emitter for the manifest sidecar
  std::ifstream in(fs::path(o.out) / "thresholds.csv");
  std::vector<std::string> rows;
  std::string line;
  std::getline(in, line);  // header
  std::string header = line;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(line);
  emit.write_csv("thresholds.csv", header, rows);
  return 0;
}

int cmd_snr_cdf(const Options& o) {
  const Emitter emit(o, "snr-cdf");
  const Scenario sc = make_scenario(o);
  const EmpiricalCdf cdf = pooled_snr_cdf(sc);
  std::vector<std::string> rows;
  for (double snr = -35.0; snr <= 25.0 + 1e-9; snr += 0.5)
    rows.push_back(o.env_name + "," + o.direction + "," + fmtg(o.radius_km) + "," + fmtg(snr) +
                   "," + fmtg(cdf(snr)));
  emit.write_csv("snr_cdf.csv", "env,direction,radius_km,snr_db,cdf", rows);
  return 0;
}

std::vector<double> coverage_radii(const Environment& env) {
  std::vector<double> radii;
  const double step = env.kind == Environment::Kind::Urban ? 0.05 : 0.25;
  const double hi = env.kind == Environment::Kind::Urban ? 1.5 : 6.0;
  for (double r = step; r <= hi + 1e-9; r += step) radii.push_back(r);
  return radii;
}

void coverage_rows(const Options& o, const std::string& env_name, const std::string& dir_name,
                   const ThresholdTable& table, std::vector<std::string>& rows) {
  Options local = o;
  local.env_name = env_name;
  local.direction = dir_name;
  Scenario sc = make_scenario(local);
  const double gamma_mfsk = table.gamma0(McsId::mfsk(256));
  const double gamma_bpsk = table.gamma0(McsId::bpsk());
  for (double r : coverage_radii(sc.env)) {
    sc.cell_radius_km = r;
    for (auto [scheme, gamma] : {std::pair{"mfsk", gamma_mfsk}, {"bpsk", gamma_bpsk}}) {
      auto rng = substream(o.seed, {0xc07au, static_cast<std::uint64_t>(sc.env.kind),
                                    static_cast<std::uint64_t>(sc.direction),
                                    static_cast<std::uint64_t>(std::llround(r * 1e6)),
                                    std::string_view(scheme) == "mfsk" ? 0u : 1u});
      const double outage = outage_probability(sc, gamma, o.outage_samples, rng);
      rows.push_back(env_name + "," + dir_name + "," + scheme + "," + fmtg(r) + "," +
                     fmtg(outage));
    }
  }
}

int cmd_coverage(const Options& o) {
  const Emitter emit(o, "coverage");
  const ThresholdTable table = resolve_thresholds(o);
  std::vector<std::string> rows;
  coverage_rows(o, o.env_name, o.direction, table, rows);
  emit.write_csv("outage_vs_radius.csv", scheme_gamma_rows_header(), rows);
  return 0;
}

struct CellAverages {
  McsDistribution dist;        // share probabilities averaged over drops
  double p_conn_mfsk = 0.0;    // fraction above the weakest-mfsk threshold
  double p_conn_bpsk = 0.0;
  int k_nominal = 0;
};

CellAverages average_cell(const Scenario& sc, const ThresholdTable& table) {
  CellAverages avg;
  avg.k_nominal = sm_count(sc.env, sc.cell_radius_km);
  const double gamma_mfsk = table.gamma0(McsId::mfsk(256));
  const double gamma_bpsk = table.gamma0(McsId::bpsk());
  for (int d = 0; d < sc.n_drops; ++d) {
    auto rng = substream(sc.seed, {0xca9u, static_cast<std::uint64_t>(sc.env.kind),
                                   static_cast<std::uint64_t>(sc.direction),
                                   static_cast<std::uint64_t>(std::llround(sc.cell_radius_km * 1e6)),
                                   static_cast<std::uint64_t>(d)});
    const DeploymentDrop drop = drop_sms(sc, rng);
    const McsDistribution dist = mcs_probabilities(drop, table, false);
    if (avg.dist.shares.empty()) avg.dist.shares = dist.shares;
    else
      for (std::size_t i = 0; i < dist.shares.size(); ++i)
        avg.dist.shares[i].probability += dist.shares[i].probability;
    avg.dist.unconnected += dist.unconnected;
    avg.p_conn_mfsk += static_cast<double>(connected_sms(drop, gamma_mfsk)) / drop.count();
    avg.p_conn_bpsk += static_cast<double>(connected_sms(drop, gamma_bpsk)) / drop.count();
  }
  const double inv = 1.0 / sc.n_drops;
  for (auto& share : avg.dist.shares) share.probability *= inv;
  avg.dist.unconnected *= inv;
  avg.p_conn_mfsk *= inv;
  avg.p_conn_bpsk *= inv;
  return avg;
}

int cmd_capacity(const Options& o) {
  const Emitter emit(o, "capacity");
  const ThresholdTable table = resolve_thresholds(o);
  const Scenario sc = make_scenario(o);
  const CellAverages avg = average_cell(sc, table);
  const CapacityModel model = sc.direction == Direction::Uplink
                                  ? CapacityModel::uplink(o.tb_base_bits)
                                  : CapacityModel::downlink(o.tb_base_bits);

  double blocks_per_sm = 0.0;  // expected transport blocks per deployed meter
  for (const auto& share : avg.dist.shares)
    blocks_per_sm += share.probability *
                     static_cast<double>(blocks_per_message(model.message_bits,
                                                            model.tb_bits(share.mcs)));
  const double cap_mfsk = sector_capacity_bps(avg.dist);
  const double cap_bpsk = avg.p_conn_bpsk * kBpskRateBps;
  const long long blocks_bpsk = blocks_per_message(model.message_bits,
                                                   model.tb_bits(McsId::bpsk()));

  std::vector<std::string> rows;
  for (double f = 0.1; f <= 2.0 + 1e-9; f += 0.1) {
    const long long k = std::llround(f * avg.k_nominal);
    if (k <= 0) continue;
    const double per_sm_mfsk = capacity_per_sm_bps(model, k * blocks_per_sm);
    const double per_sm_bpsk =
        capacity_per_sm_bps(model, k * avg.p_conn_bpsk * blocks_bpsk);
    rows.push_back(o.env_name + "," + o.direction + "," + fmtg(o.radius_km) + ",mfsk," +
                   std::to_string(k) + "," + fmtg(cap_mfsk) + "," +
                   fmtg(avg.p_conn_mfsk * k) + "," + fmtg(per_sm_mfsk));
    rows.push_back(o.env_name + "," + o.direction + "," + fmtg(o.radius_km) + ",bpsk," +
                   std::to_string(k) + "," + fmtg(cap_bpsk) + "," +
                   fmtg(avg.p_conn_bpsk * k) + "," + fmtg(per_sm_bpsk));
  }
  emit.write_csv("capacity_vs_k.csv",
                 "env,direction,radius_km,scheme,k,sector_capacity_bps,connected_sms,"
                 "capacity_per_sm_bps",
                 rows);
  return 0;
}

int cmd_tables(const Options& o, const ThresholdTable& table, const Emitter& emit) {
  std::vector<std::string> rows;
  for (const char* env_name : {"urban", "rural"}) {
    const Environment env = environment_from_name(env_name);
    const std::vector<double> radii = env.kind == Environment::Kind::Urban
                                          ? std::vector<double>{0.25, 0.5, 0.75, 1.0}
                                          : std::vector<double>{2.0, 4.0, 6.0, 8.0, 10.0};
    for (const char* dir_name : {"ul", "dl"}) {
      for (double r : radii) {
        Options local = o;
        local.env_name = env_name;
        local.direction = dir_name;
        local.radius_km = r;
        Scenario sc = make_scenario(local);
        const CellStats st = evaluate_cell(sc, table, o.tb_base_bits);
        const std::string prefix =
            std::string(env_name) + "," + dir_name + "," + fmtg(r) + ",";
        rows.push_back(prefix + "mfsk," + std::to_string(st.k_total) + "," +
                       fmtg(st.mfsk_capacity_bps) + "," + fmtg(st.mfsk_connected) + "," +
                       fmtg(st.mfsk_per_sm_bps));
        rows.push_back(prefix + "bpsk," + std::to_string(st.k_total) + "," +
                       fmtg(st.bpsk_capacity_bps) + "," + fmtg(st.bpsk_connected) + "," +
                       fmtg(st.bpsk_per_sm_bps));
      }
    }
  }
  emit.write_csv("tables_4_to_7.csv",
                 "env,direction,radius_km,scheme,k,sector_capacity_bps,connected_sms,"
                 "capacity_per_sm_bps",
                 rows);
  return 0;
}

int cmd_reproduce_all(const Options& o) {
  const Emitter emit(o, "reproduce-all");
  const ThresholdTable table = resolve_thresholds(o);
  {
    table.save_csv(fs::path(o.out) / "thresholds.csv");
    std::ifstream in(fs::path(o.out) / "thresholds.csv");
    std::vector<std::string> rows;
    std::string line, header;
    std::getline(in, header);
    while (std::getline(in, line))
      if (!line.empty()) rows.push_back(line);
    emit.write_csv("thresholds.csv", header, rows);
  }
  {
    Options local = o;
    local.env_name = "urban";
    local.direction = "ul";
    local.radius_km = 0.5;
    const Scenario sc = make_scenario(local);
    const EmpiricalCdf cdf = pooled_snr_cdf(sc);
    std::vector<std::string> rows;
    for (double snr = -35.0; snr <= 25.0 + 1e-9; snr += 0.5)
      rows.push_back("urban,ul,0.5," + fmtg(snr) + "," + fmtg(cdf(snr)));
    emit.write_csv("snr_cdf.csv", "env,direction,radius_km,snr_db,cdf", rows);
  }
  {
    std::vector<std::string> rows;
    for (const char* env_name : {"urban", "rural"})
      for (const char* dir_name : {"ul", "dl"}) coverage_rows(o, env_name, dir_name, table, rows);
    emit.write_csv("outage_vs_radius.csv", scheme_gamma_rows_header(), rows);
  }
  {
    // capacity sweeps for the two nominal cells
    std::vector<std::string> rows;
    for (auto [env_name, radius] : {std::pair{"urban", 0.5}, {"rural", 4.0}}) {
      Options local = o;
      local.env_name = env_name;
      local.direction = "ul";
      local.radius_km = radius;
      const Scenario sc = make_scenario(local);
      const CellAverages avg = average_cell(sc, table);
      const CapacityModel model = CapacityModel::uplink(o.tb_base_bits);
      double blocks_per_sm = 0.0;
      for (const auto& share : avg.dist.shares)
        blocks_per_sm += share.probability *
                         static_cast<double>(blocks_per_message(model.message_bits,
                                                                model.tb_bits(share.mcs)));
      const double cap_mfsk = sector_capacity_bps(avg.dist);
      const double cap_bpsk = avg.p_conn_bpsk * kBpskRateBps;
      const long long blocks_bpsk =
          blocks_per_message(model.message_bits, model.tb_bits(McsId::bpsk()));
      for (double f = 0.1; f <= 2.0 + 1e-9; f += 0.1) {
        const long long k = std::llround(f * avg.k_nominal);
        if (k <= 0) continue;
        const std::string prefix =
            std::string(env_name) + ",ul," + fmtg(radius) + ",";
        rows.push_back(prefix + "mfsk," + std::to_string(k) + "," + fmtg(cap_mfsk) + "," +
                       fmtg(avg.p_conn_mfsk * k) + "," +
                       fmtg(capacity_per_sm_bps(model, k * blocks_per_sm)));
        rows.push_back(prefix + "bpsk," + std::to_string(k) + "," + fmtg(cap_bpsk) + "," +
                       fmtg(avg.p_conn_bpsk * k) + "," +
                       fmtg(capacity_per_sm_bps(model, k * avg.p_conn_bpsk * blocks_bpsk)));
      }
    }
    emit.write_csv("capacity_vs_k.csv",
                   "env,direction,radius_km,scheme,k,sector_capacity_bps,connected_sms,"
                   "capacity_per_sm_bps",
                   rows);
  }
  return cmd_tables(o, table, emit);
}

}  // namespace

int main(int argc, char** argv) {
  Options o;

  // the config file seeds the defaults; explicit flags then win
  for (int i = 1; i < argc; ++i) {
    const std::string_view a = argv[i];
    try {
      if (a == "--config" && i + 1 < argc) {
        load_config(argv[i + 1], o);
      } else if (a.rfind("--config=", 0) == 0) {
        load_config(std::string(a.substr(9)), o);
      }
    } catch (const ConfigError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
  }

  CLI::App app{"ofdm smart-metering link and system simulator"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--config", o.config_path, "json config file; flags override its values");
  app.add_option("--seed", o.seed, "master random seed");
  app.add_option("--workers", o.workers,
                 "worker threads (0: SMSIM_WORKERS env var, else hardware count)");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--threshold-source", o.threshold_source, "thresholds for system analysis")
      ->check(CLI::IsMember({"simulate", "paper"}));
  app.add_option("--env", o.env_name, "propagation environment")
      ->check(CLI::IsMember({"urban", "rural"}));
  app.add_option("--direction", o.direction, "link direction")
      ->check(CLI::IsMember({"ul", "dl", "uplink", "downlink"}));
  app.add_option("--radius-km", o.radius_km, "cell radius in km");
  app.add_option("--mcs", o.mcs, "comma-separated mcs names, or 'all'");
  app.add_option("--min-errors", o.min_errors, "packet errors collected per snr point");
  app.add_option("--max-packets", o.max_packets, "packet cap per snr point");
  app.add_option("--drops", o.drops, "monte carlo deployment drops");
  app.add_option("--outage-samples", o.outage_samples, "meter placements per outage estimate");
  app.add_option("--tb-base-bits", o.tb_base_bits, "bpsk transport block payload bits");
  app.add_flag("--include-bpsk", o.include_bpsk, "let bpsk compete in adaptive selection");
  app.add_flag("--time-domain", o.time_domain, "simulate through the full ofdm time chain");
  app.add_option("--snr-min", o.snr_min, "per-curve grid start (default: near threshold)");
  app.add_option("--snr-max", o.snr_max, "per-curve grid end");
  app.add_option("--snr-step", o.snr_step, "per-curve grid step");
  app.add_flag("--no-bundled", o.no_bundled, "disable the bundled reference threshold table");
  app.add_option("--thresholds-csv", o.thresholds_csv, "threshold table csv to consume");

  app.add_subcommand("per-curve", "per vs snr curves for the selected schemes");
  app.add_subcommand("thresholds", "per 1e-3 snr thresholds");
  app.add_subcommand("snr-cdf", "deployment snr distribution");
  app.add_subcommand("coverage", "outage probability vs cell radius");
  app.add_subcommand("capacity", "sector capacity vs meter population");
  app.add_subcommand("reproduce-all", "every csv artifact in one run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand("per-curve")) return cmd_per_curve(o);
    if (app.got_subcommand("thresholds")) return cmd_thresholds(o);
    if (app.got_subcommand("snr-cdf")) return cmd_snr_cdf(o);
    if (app.got_subcommand("coverage")) return cmd_coverage(o);
    if (app.got_subcommand("capacity")) return cmd_capacity(o);
    if (app.got_subcommand("reproduce-all")) return cmd_reproduce_all(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
