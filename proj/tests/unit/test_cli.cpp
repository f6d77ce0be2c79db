#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using helio::testing::slurp;
using helio::testing::temp_dir;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = helio::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const std::vector<std::string> kSubcommands{"synth", "ingest", "features", "select",
                                            "tune",  "forecast", "evaluate", "compare"};

// Every file under `dir`, name -> bytes.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = slurp(e.path());
  return out;
}

const fs::path& synthetic_csv() {
  static const fs::path p = [] {
    const auto dir = temp_dir("cli_data");
    REQUIRE(run({"synth", "--seed", "3", "--days", "40", "--out", dir.string()}).code == 0);
    return dir / "data.csv";
  }();
  return p;
}

}  // namespace

TEST_CASE("help exits cleanly and documents every flag") {
  auto top = run({"--help"});
  CHECK(top.code == 0);
  for (const auto& s : kSubcommands) CHECK(top.out.find(s) != std::string::npos);
  for (const auto& s : kSubcommands) {
    const auto r = run({s, "--help"});
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    std::istringstream lines(r.out);
    std::vector<std::string> all;
    for (std::string l; std::getline(lines, l);) all.push_back(l);
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (all[i].rfind("  -", 0) != 0) continue;
      const bool inline_text = all[i].size() > 30 && all[i].find_first_not_of(' ', 30) != std::string::npos &&
                               all[i].find("Excludes") == std::string::npos;
      const bool next_text = i + 1 < all.size() && all[i + 1].rfind("                              ", 0) == 0;
      INFO(s << ": " << all[i]);
      CHECK((inline_text || next_text));
    }
  }
}

TEST_CASE("usage errors exit 1") {
  auto r = run({"forecast", "--no-such-flag"});
  CHECK(r.code == 1);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"forecast", "--with-hi-wind", "--no-hi-wind", "--data", synthetic_csv().string()}).code == 1);

  const auto dir = temp_dir("cli_cfg");
  std::ofstream(dir / "bad.cfg") << "no_such_key=1\n";
  r = run({"features", "--config", (dir / "bad.cfg").string(), "--data", synthetic_csv().string(), "--out",
           dir.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("no_such_key") != std::string::npos);
  r = run({"forecast", "--data", synthetic_csv().string(), "--c", "abc", "--out", dir.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("helio forecast: BadConfig") != std::string::npos);
}

TEST_CASE("data errors exit 2 and numerical errors exit 3") {
  const auto dir = temp_dir("cli_err");
  auto r = run({"ingest", "--data", (dir / "missing.csv").string(), "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("helio ingest:", 0) == 0);
  r = run({"forecast", "--data", synthetic_csv().string(), "--first", "2013-05-05", "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("InsufficientHistory") != std::string::npos);

  std::ofstream(dir / "perfect.csv") << "timestamp,predicted,actual,daylight,model,params\n"
                                     << "2013-06-01T10:00:00Z,0.5,0.5,1,svr,\n";
  std::ofstream(dir / "noisy.csv") << "timestamp,predicted,actual,daylight,model,params\n"
                                   << "2013-06-01T10:00:00Z,0.4,0.5,1,svr,\n";
  r = run({"evaluate", "--forecast", (dir / "noisy.csv").string(), "--baseline", (dir / "perfect.csv").string(),
           "--out", dir.string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("ZeroBase") != std::string::npos);
}

TEST_CASE("synth is reproducible") {
  const auto a = temp_dir("cli_synth_a"), b = temp_dir("cli_synth_b");
  REQUIRE(run({"synth", "--seed", "7", "--days", "40", "--out", a.string()}).code == 0);
  REQUIRE(run({"synth", "--seed", "7", "--days", "40", "--out", b.string()}).code == 0);
  CHECK(snapshot(a) == snapshot(b));
  const auto text = slurp(a / "data.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 40 * 24);
}

TEST_CASE("fixed-parameter forecast has one row per hour") {
  const auto dir = temp_dir("cli_forecast");
  const auto r = run({"forecast", "--data", synthetic_csv().string(), "--model", "svr", "--fixed-params", "16,1",
                      "--first", "2013-06-01", "--last", "2013-06-03", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const auto text = slurp(dir / "forecast.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 3 * 24);
  CHECK(text.find("c=16 gamma=1") != std::string::npos);
}

TEST_CASE("every subcommand is byte-identical across runs and job counts") {
  const auto data = synthetic_csv().string();
  const std::vector<std::vector<std::string>> commands{
      {"ingest", "--data", data},
      {"features", "--data", data, "--with-hi-wind"},
      {"select", "--data", data, "--max-steps", "4"},
      {"tune", "--data", data, "--c-exp", "1:3:2", "--gamma-exp", "-5:-3:2", "--refine"},
      {"tune", "--data", data, "--adaptive", "--c-exp", "1:3:2", "--gamma-exp", "-3:-1:2", "--cv-days", "20"},
      {"forecast", "--data", data, "--first", "2013-06-01", "--last", "2013-06-04", "--gamma", "0.125"},
      {"forecast", "--data", data, "--model", "mlr", "--first", "2013-06-01"},
      {"compare", "--data", data, "--models", "svr,mlr", "--first", "2013-06-05"},
  };
  for (const auto& cmd : commands) {
    std::vector<std::map<std::string, std::string>> runs;
    for (const char* jobs : {"1", "8", "1"}) {
      const auto dir = temp_dir("cli_det");
      auto args = cmd;
      args.insert(args.end(), {"--jobs", jobs, "--seed", "5", "--out", dir.string()});
      const auto r = run(args);
      INFO(cmd[0] << " " << r.err);
      REQUIRE(r.code == 0);
      runs.push_back(snapshot(dir));
    }
    INFO(cmd[0]);
    CHECK_FALSE(runs[0].empty());
    CHECK(runs[0] == runs[1]);
    CHECK(runs[0] == runs[2]);
  }
}

TEST_CASE("evaluate writes reports and the improvement table") {
  const auto data = synthetic_csv().string();
  const auto a = temp_dir("cli_eval_a"), b = temp_dir("cli_eval_b"), e = temp_dir("cli_eval");
  REQUIRE(run({"forecast", "--data", data, "--model", "mlr", "--first", "2013-06-01", "--out", a.string()}).code == 0);
  REQUIRE(run({"forecast", "--data", data, "--gamma", "0.125", "--first", "2013-06-01", "--out", b.string()}).code == 0);
  const auto r = run({"evaluate", "--forecast", (b / "forecast.csv").string(), "--baseline",
                      (a / "forecast.csv").string(), "--verbose", "--out", e.string()});
  REQUIRE(r.code == 0);
  const auto files = snapshot(e);
  CHECK(files.count("monthly.csv") == 1);
  CHECK(files.count("daily.csv") == 1);
  CHECK(files.count("monthly_all_hours.csv") == 1);
  REQUIRE(files.count("improvement.csv") == 1);
  CHECK(files.at("improvement.csv").rfind("month,rmse_a,rmse_b,percent\n2013-06,", 0) == 0);
}

TEST_CASE("heat index and wind flags change the feature set") {
  const auto data = synthetic_csv().string();
  const auto a = temp_dir("cli_hi_a"), b = temp_dir("cli_hi_b");
  REQUIRE(run({"features", "--data", data, "--with-hi-wind", "--out", a.string()}).code == 0);
  REQUIRE(run({"features", "--data", data, "--no-hi-wind", "--out", b.string()}).code == 0);
  const auto with = slurp(a / "features.csv"), without = slurp(b / "features.csv");
  const auto head = [](const std::string& s) { return s.substr(0, s.find('\n')); };
  CHECK(head(with).find("heat_index") != std::string::npos);
  CHECK(head(with).find("wind_speed") != std::string::npos);
  CHECK(head(with).find("u10") == std::string::npos);
  CHECK(head(without).find("heat_index") == std::string::npos);
  CHECK(head(without).find("u10") != std::string::npos);
}
