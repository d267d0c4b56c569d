#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "plcsynth/channel_file.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "plcsynth-cli-tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::string& args, const std::string& env = "") {
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" PLCSYNTH_CLI "\" " + args + " >\"" +
                          out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp(out), slurp(err)};
}

std::string path(const std::string& name) { return (work_dir() / name).string(); }

void write(const std::string& name, const std::string& text) { std::ofstream(path(name)) << text; }

const std::string kSmall = " --n 4 --seed 11 --decimate 25";

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("generate --out " + path("x.csv")).code, 2);
  EXPECT_EQ(run("generate --n 2 --scheme 3x3 --out " + path("x.csv")).code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST(Cli, GenerateIsDeterministicAcrossRunsAndThreads) {
  ASSERT_EQ(run("--threads 1 generate" + kSmall + " --out " + path("a.csv")).code, 0);
  ASSERT_EQ(run("--threads 1 generate" + kSmall + " --out " + path("b.csv")).code, 0);
  ASSERT_EQ(run("--threads 4 generate" + kSmall + " --out " + path("c.csv")).code, 0);
  const std::string a = slurp(path("a.csv"));
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(path("b.csv")));
  EXPECT_EQ(a, slurp(path("c.csv")));
  ASSERT_EQ(run("generate --n 4 --seed 12 --decimate 25 --out " + path("d.csv")).code, 0);
  EXPECT_NE(a, slurp(path("d.csv")));
}

TEST(Cli, SisoHasOnePortPair) {
  ASSERT_EQ(run("generate --scheme siso" + kSmall + " --out " + path("siso.csv")).code, 0);
  const plcsynth::ChannelSet s = plcsynth::read_channel_file(path("siso.csv"));
  EXPECT_EQ(s.grid.tx_modes(), std::vector<std::string>{"PN"});
  EXPECT_EQ(s.grid.rx_modes(), std::vector<std::string>{"P"});
  EXPECT_EQ(s.size(), 4u);
}

TEST(Cli, MalformedCsvNamesTheLine) {
  write("bad.csv", std::string(plcsynth::kChannelHeader) + "\n0,PN,P,1e6,1,0\n0,PN,P,2e6,oops,0\n");
  const CliRun r = run("metrics --in " + path("bad.csv") + " --out " + path("m.csv"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
  write("empty.csv", "");
  EXPECT_EQ(run("capacity --in " + path("empty.csv") + " --out " + path("c.csv")).code, 2);
}

TEST(Cli, ParameterProblemsExitWithThree) {
  EXPECT_EQ(run("generate --n 2 --params " + path("absent.txt") + " --out " + path("x.csv")).code, 3);
  write("broken.txt", "mu.slope_db_per_ghz = nope\n");
  EXPECT_EQ(run("generate --n 2 --params " + path("broken.txt") + " --out " + path("x.csv")).code, 3);
}

TEST(Cli, EnvironmentParameterFileIsHonoured) {
  ASSERT_EQ(run("write-defaults --out " + path("p.txt")).code, 0);
  std::string text = slurp(path("p.txt"));
  const auto pos = text.find("mu.intercept_db = ");
  ASSERT_NE(pos, std::string::npos);
  const auto eol = text.find('\n', pos);
  text.replace(pos, eol - pos, "mu.intercept_db = -20");
  write("shifted.txt", text);

  ASSERT_EQ(run("generate" + kSmall + " --out " + path("base.csv")).code, 0);
  ASSERT_EQ(run("generate" + kSmall + " --out " + path("env.csv"), "PLCSYNTH_PARAMS=" + path("shifted.txt")).code, 0);
  EXPECT_NE(slurp(path("base.csv")), slurp(path("env.csv")));
  EXPECT_EQ(run("generate" + kSmall + " --out " + path("x.csv"), "PLCSYNTH_PARAMS=" + path("absent.txt")).code, 3);
}

TEST(Cli, CharacterizeNeedsTwoRealizations) {
  ASSERT_EQ(run("generate --n 1 --seed 3 --decimate 25 --out " + path("one.csv")).code, 0);
  EXPECT_EQ(run("characterize --in " + path("one.csv") + " --out " + path("fit.txt")).code, 5);
}

TEST(Cli, CharacterizeWritesAParameterFile) {
  ASSERT_EQ(run("generate --n 40 --seed 5 --decimate 25 --out " + path("many.csv")).code, 0);
  ASSERT_EQ(run("characterize --in " + path("many.csv") + " --out " + path("fit.txt")).code, 0);
  EXPECT_TRUE(fs::exists(path("fit.txt.diagnostics")));
  EXPECT_EQ(run("generate --n 2 --decimate 25 --params " + path("fit.txt") + " --out " + path("x.csv")).code, 0);
}

TEST(Cli, CapacityCcdfIsWellFormed) {
  ASSERT_EQ(run("generate" + kSmall + " --out " + path("cap_in.csv")).code, 0);
  ASSERT_EQ(run("capacity --in " + path("cap_in.csv") + " --out " + path("ccdf.csv") + " --per-realization " +
                path("per.csv"))
                .code,
            0);
  std::istringstream in(slurp(path("ccdf.csv")));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "rate_bps,ccdf");
  double prev_rate = -1.0, prev_p = 2.0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    ASSERT_NE(comma, std::string::npos);
    const double rate = std::stod(line.substr(0, comma));
    const double p = std::stod(line.substr(comma + 1));
    EXPECT_GE(rate, prev_rate);
    EXPECT_LT(p, prev_p);
    EXPECT_GT(rate, 0.0);
    prev_rate = rate;
    prev_p = p;
    ++rows;
  }
  EXPECT_EQ(rows, 4u);
  EXPECT_DOUBLE_EQ(prev_p, 0.25);
}

TEST(Cli, MetricsCsv) {
  ASSERT_EQ(run("generate" + kSmall + " --out " + path("met_in.csv")).code, 0);
  ASSERT_EQ(run("metrics --in " + path("met_in.csv") + " --out " + path("met.csv")).code, 0);
  std::istringstream in(slurp(path("met.csv")));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "realization_id,tx_mode,rx_mode,acg_db,rms_ds_us,cb_khz,kappa_db");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4u * 6u);
}

TEST(Cli, ValidateExitCodeMatchesReport) {
  const CliRun r = run("validate --targets table3-synthetic" + kSmall + " --report-kv " + path("kv.txt"));
  ASSERT_TRUE(r.code == 0 || r.code == 6) << r.err;
  const std::string kv = slurp(path("kv.txt"));
  EXPECT_NE(kv.find(r.code == 0 ? "\npass=1\n" : "\npass=0\n"), std::string::npos);
  EXPECT_NE(r.out.find(r.code == 0 ? "overall PASS" : "overall FAIL"), std::string::npos);

  write("impossible.txt", "acg_db.mean = 100\nacg_db.std = 1\nacg_db.mean_tolerance = 0.1\n");
  EXPECT_EQ(run("validate --targets custom " + path("impossible.txt") + kSmall).code, 6);
  write("easy.txt", "acg_db.mean = -45\nacg_db.std = 12\nacg_db.mean_tolerance = 100\nacg_db.std_tolerance = 100\n");
  EXPECT_EQ(run("validate --targets custom " + path("easy.txt") + kSmall).code, 0);
  EXPECT_EQ(run("validate --targets custom " + path("absent.txt") + kSmall).code, 3);
  EXPECT_EQ(run("validate --targets table3-synthetic").code, 2);
  ASSERT_EQ(run("generate" + kSmall + " --out " + path("v.csv")).code, 0);
  EXPECT_EQ(run("validate --targets table3-synthetic --in " + path("v.csv") + " --n 3").code, 2);
}
