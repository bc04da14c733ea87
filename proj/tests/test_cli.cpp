#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(SMSIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

fs::path fresh_dir(const char* name) {
  const fs::path d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("thresholds emits one row per scheme") {
  const fs::path out = fresh_dir("smsim_cli_thr");
  REQUIRE(run("thresholds --mcs all --seed 7 --out " + out.string()) == 0);
  const auto lines = lines_of(slurp(out / "thresholds.csv"));
  REQUIRE(lines.size() == 8);  // header + 7 schemes
  CHECK(lines[0] == "mcs,m,gamma0_db,target_per,provenance,seed");
  int mfsk = 0, bpsk = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].rfind("mfsk,", 0) == 0) ++mfsk;
    if (lines[i].rfind("bpsk,", 0) == 0) ++bpsk;
  }
  CHECK(mfsk == 6);
  CHECK(bpsk == 1);

  const std::string manifest = slurp(out / "thresholds.csv.manifest.json");
  CHECK(manifest.find("\"config_hash\"") != std::string::npos);
  CHECK(manifest.find("\"seed\": 7") != std::string::npos);
  CHECK(manifest.find("\"version\"") != std::string::npos);
  CHECK(manifest.find("\"wall_clock_utc\"") != std::string::npos);
}

TEST_CASE("same seed reruns are byte identical") {
  const fs::path a = fresh_dir("smsim_cli_rep_a");
  const fs::path b = fresh_dir("smsim_cli_rep_b");
  const std::string common =
      " --seed 5 --drops 2 --outage-samples 400 --min-errors 2 --max-packets 300";
  REQUIRE(run("reproduce-all --out " + a.string() + common) == 0);
  REQUIRE(run("reproduce-all --out " + b.string() + common) == 0);
  for (const char* f : {"thresholds.csv", "snr_cdf.csv", "outage_vs_radius.csv",
                        "capacity_vs_k.csv", "tables_4_to_7.csv"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
}

TEST_CASE("per-curve respects the stop overrides") {
  const fs::path out = fresh_dir("smsim_cli_pc");
  REQUIRE(run("per-curve --mcs mfsk4 --seed 3 --min-errors 2 --max-packets 300 "
              "--snr-min 0 --snr-max 1 --snr-step 0.5 --out " +
              out.string()) == 0);
  const auto lines = lines_of(slurp(out / "per_curve.csv"));
  REQUIRE(lines.size() == 4);  // header + 3 grid points
  CHECK(lines[0] == "mcs,snr_db,packets,errors,per,ci95");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    CHECK(lines[i].rfind("mfsk4,", 0) == 0);
    CHECK(std::count(lines[i].begin(), lines[i].end(), ',') == 5);
  }
}

TEST_CASE("snr-cdf emits the documented schema") {
  const fs::path out = fresh_dir("smsim_cli_cdf");
  REQUIRE(run("snr-cdf --env rural --direction dl --radius-km 4 --drops 2 --seed 2 --out " +
              out.string()) == 0);
  const auto lines = lines_of(slurp(out / "snr_cdf.csv"));
  CHECK(lines[0] == "env,direction,radius_km,snr_db,cdf");
  REQUIRE(lines.size() > 10);
  CHECK(lines[1].rfind("rural,dl,4,", 0) == 0);
}

TEST_CASE("config file seeds the defaults and flags win") {
  const fs::path out = fresh_dir("smsim_cli_cfg");
  const fs::path cfg = fs::temp_directory_path() / "smsim_cfg.json";
  {
    std::ofstream f(cfg);
    f << "{\"seed\": 9, \"drops\": 2, \"out\": \"" << out.string() << "\"}\n";
  }
  REQUIRE(run("snr-cdf --config " + cfg.string()) == 0);
  CHECK(slurp(out / "snr_cdf.csv.manifest.json").find("\"seed\": 9") != std::string::npos);

  // an explicit flag overrides the config value
  REQUIRE(run("snr-cdf --config " + cfg.string() + " --seed 11") == 0);
  CHECK(slurp(out / "snr_cdf.csv.manifest.json").find("\"seed\": 11") != std::string::npos);
  fs::remove(cfg);
}

TEST_CASE("config errors exit with code 2") {
  const fs::path cfg = fs::temp_directory_path() / "smsim_bad.json";
  {
    std::ofstream f(cfg);
    f << "{\"sead\": 9}\n";
  }
  CHECK(run("snr-cdf --config " + cfg.string()) == 2);
  {
    std::ofstream f(cfg);
    f << "{\"seed\": \"nine\"}\n";
  }
  CHECK(run("snr-cdf --config " + cfg.string()) == 2);
  {
    std::ofstream f(cfg);
    f << "{not json\n";
  }
  CHECK(run("snr-cdf --config " + cfg.string()) == 2);
  fs::remove(cfg);

  CHECK(run("unknown-command") == 2);
  CHECK(run("snr-cdf --env littoral") == 2);
  CHECK(run("coverage --threshold-source paper --no-bundled --out /tmp/smsim_nb") == 2);
  CHECK(run("per-curve --mcs mfsk3 --out /tmp/smsim_badmcs") == 2);
}

TEST_CASE("runtime failures exit with code 3") {
  CHECK(run("coverage --thresholds-csv /nonexistent/t.csv --out /tmp/smsim_rt") == 3);
}

TEST_CASE("coverage consumes an explicit threshold table") {
  const fs::path out = fresh_dir("smsim_cli_cov");
  const fs::path table = fs::temp_directory_path() / "smsim_table.csv";
  {
    std::ofstream f(table);
    f << "mcs,m,gamma0_db,target_per,provenance,seed\n";
    f << "bpsk,0,0.75,0.001,paper,0\n";
    f << "mfsk,256,-13.25,0.001,paper,0\n";
  }
  REQUIRE(run("coverage --env urban --direction ul --outage-samples 300 --seed 4 "
              "--thresholds-csv " +
              table.string() + " --out " + out.string()) == 0);
  const auto lines = lines_of(slurp(out / "outage_vs_radius.csv"));
  CHECK(lines[0] == "env,direction,scheme,radius_km,outage_probability");
  bool saw_mfsk = false, saw_bpsk = false;
  for (const auto& l : lines) {
    if (l.rfind("urban,ul,mfsk,", 0) == 0) saw_mfsk = true;
    if (l.rfind("urban,ul,bpsk,", 0) == 0) saw_bpsk = true;
  }
  CHECK(saw_mfsk);
  CHECK(saw_bpsk);
  fs::remove(table);
}

TEST_CASE("capacity emits both schemes across the population sweep") {
  const fs::path out = fresh_dir("smsim_cli_cap");
  REQUIRE(run("capacity --env urban --direction ul --radius-km 0.5 --drops 2 --seed 6 --out " +
              out.string()) == 0);
  const auto lines = lines_of(slurp(out / "capacity_vs_k.csv"));
  CHECK(lines[0] ==
        "env,direction,radius_km,scheme,k,sector_capacity_bps,connected_sms,"
        "capacity_per_sm_bps");
  REQUIRE(lines.size() == 41);  // header + 20 population points x 2 schemes
}
