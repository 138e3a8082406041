#include <gtest/gtest.h>

#include <rough_attractor/experiments.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace ra = rough_attractor;
namespace fs = std::filesystem;

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("ra_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct CliResult {
  int code;
  std::string err;
};

CliResult run_cli(const std::string& args) {
  const auto dir = scratch("cli_stderr");
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string(RA_CLI_PATH) + " " + args + " >/dev/null 2>" + err.string();
  const int status = std::system(cmd.c_str());
  std::ifstream in(err);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

}  // namespace

TEST(Config, DefaultsAreValid) {
  const ra::ExperimentConfig c;
  EXPECT_TRUE(ra::validate_config(c).empty());
  EXPECT_EQ(c.dt(), std::ldexp(1.0, -12));
  EXPECT_EQ(c.resolved_seeds().size(), 20u);
  auto s = c;
  s.experiment = "bounds-audit";
  EXPECT_EQ(s.resolved_seeds().size(), s.calibration + 10);
}

TEST(Config, ParsesFileAndOverrides) {
  const auto dir = scratch("cfg");
  {
    std::ofstream f(dir / "a.cfg");
    f << "# comment line\n"
      << "H = 0.45   # trailing comment\n"
      << "etas = 2^-5, 2^-6\n"
      << "seeds = 3, 7..9\n"
      << "channel_scale = 0.05\n"
      << "\n"
      << "d1 = 0.9\n";
  }
  auto c = ra::load_config((dir / "a.cfg").string());
  EXPECT_EQ(c.hurst, 0.45);
  EXPECT_EQ(c.etas, (std::vector<double>{1.0 / 32, 1.0 / 64}));
  EXPECT_EQ(c.resolved_seeds(), (std::vector<std::uint64_t>{3, 7, 8, 9}));
  EXPECT_EQ(*c.d1, 0.9);
  c.apply_override("mu=0.2");
  EXPECT_EQ(c.mu, 0.2);
  EXPECT_THROW(c.apply_override("mu"), ra::ConfigError);
  EXPECT_THROW(c.apply_override("no_such_key=1"), ra::ConfigError);
  EXPECT_THROW(c.apply_override("mu=abc"), ra::ConfigError);
  EXPECT_THROW(c.apply_override("seeds=5..2"), ra::ConfigError);
  {
    std::ofstream f(dir / "bad.cfg");
    f << "H 0.4\n";
  }
  EXPECT_THROW(ra::load_config((dir / "bad.cfg").string()), ra::ConfigError);
  EXPECT_THROW(ra::load_config((dir / "missing.cfg").string()), ra::ConfigError);
}

TEST(Config, ConstraintNames) {
  ra::ExperimentConfig c;
  c.alpha = c.alpha_prime;
  EXPECT_TRUE(contains(ra::validate_config(c), "alpha < alpha_prime"));
  c = {};
  c.mu = 1.0;
  EXPECT_TRUE(contains(ra::validate_config(c), "mu in (0,1)"));
  c = {};
  c.alpha = 0.3;
  EXPECT_TRUE(contains(ra::validate_config(c), "1/3 < alpha"));
  c = {};
  c.hurst = 0.6;
  EXPECT_TRUE(contains(ra::validate_config(c), "H <= 1/2"));
  c = {};
  c.lemma_c = 4.0;
  EXPECT_TRUE(contains(ra::validate_config(c), "-(2/lambda) log k1(mu) > 1"));
  c = {};
  c.d1 = 0.1;
  EXPECT_TRUE(contains(ra::validate_config(c), "nu + d1 > 1"));
  c = {};
  c.drift = "cubic";
  EXPECT_FALSE(ra::validate_config(c).empty());
}

TEST(Config, HashTracksResolvedParameters) {
  ra::ExperimentConfig a, b;
  EXPECT_EQ(ra::config_hash(a), ra::config_hash(b));
  b.threads = 7;  // scheduling only
  EXPECT_EQ(ra::config_hash(a), ra::config_hash(b));
  b.q = 0.0150000001;
  EXPECT_NE(ra::config_hash(a), ra::config_hash(b));
  // an explicit seed list equal to the default resolves to the same run
  ra::ExperimentConfig c;
  c.apply_override("seeds=1..20");
  EXPECT_EQ(ra::config_hash(a), ra::config_hash(c));
}

TEST(Experiments, ParallelForRethrowsLowestFailingJob) {
  std::vector<int> hits(16, 0);
  ra::parallel_for(16, 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  try {
    ra::parallel_for(16, 4, [](std::size_t i) {
      if (i == 5 || i == 11) throw std::runtime_error("job " + std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "job 5");
  }
}

TEST(Experiments, RunWritesManifestAndResults) {
  ra::ExperimentConfig c;
  c.experiment = "gronwall";
  c.gronwall_draws = 5;
  const auto dir = scratch("gronwall");
  const auto r = ra::run_experiment(c, dir);
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "gronwall.json"));
  EXPECT_TRUE(fs::exists(dir / "gronwall.csv"));
  EXPECT_EQ(r.summary.at("violations").get<int>(), 0);
  const auto manifest = ra::json::parse(std::ifstream(dir / "manifest.json"));
  EXPECT_EQ(manifest.at("experiment"), "gronwall");
  EXPECT_EQ(manifest.at("config_hash").get<std::string>().size(), 16u);
  c.mu = 2.0;
  EXPECT_THROW(ra::run_experiment(c, dir), ra::ConstraintError);
}

TEST(Cli, ExitCodes) {
  const auto out = scratch("cli_out").string();
  EXPECT_EQ(run_cli("gronwall --check --out " + out).code, 0);
  auto r = run_cli("gronwall --set alpha=0.38 --out " + out);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("constraint violated: alpha < alpha_prime"), std::string::npos) << r.err;
  r = run_cli("gronwall --set mu=1 --out " + out);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("constraint violated: mu in (0,1)"), std::string::npos) << r.err;
  EXPECT_EQ(run_cli("gronwall --set typo=1 --out " + out).code, 2);
  EXPECT_NE(run_cli("no-such-experiment --out " + out).code, 0);
  // a driver window too short for the requested stopping indices is a numerical failure
  r = run_cli("stopping --set window=1 --set seeds=1 --set stopping_index=10 --out " + out);
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("numerical failure"), std::string::npos) << r.err;
  EXPECT_EQ(run_cli("gronwall --set gronwall_draws=3 --out " + out).code, 0);
  EXPECT_TRUE(fs::exists(fs::path(out) / "gronwall.csv"));
}
