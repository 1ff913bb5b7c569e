#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(PREFSIM_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::string kSmall = "--seeds 4 --data-grid 50,400 --m2-grid 10,1000 --num-data 500";

}  // namespace

TEST(Cli, SweepWritesCsvAndMetadata) {
  const auto r = run("sweep-rlpo " + kSmall + " --out cli_rlpo.csv");
  ASSERT_EQ(r.code, 0);
  const auto csv = slurp("cli_rlpo.csv");
  EXPECT_EQ(csv.rfind("sweep_value,mean_p_m1,stderr_p_m1,n_seeds,minimizer_exists_rate", 0), 0u);
  const auto meta = slurp("cli_rlpo.csv.meta");
  EXPECT_NE(meta.find("algorithm=rlpo"), std::string::npos);
  EXPECT_NE(meta.find("master-seed=20240229"), std::string::npos);
}

TEST(Cli, RerunsAreByteIdentical) {
  for (const std::string sub : {"sweep-dpo", "sweep-il", "sweep-slic"}) {
    ASSERT_EQ(run(sub + " " + kSmall + " --out cli_a.csv").code, 0);
    ASSERT_EQ(run(sub + " " + kSmall + " --threads 3 --out cli_b.csv").code, 0);
    EXPECT_EQ(slurp("cli_a.csv"), slurp("cli_b.csv")) << sub;
  }
}

TEST(Cli, MetadataReplaysAsConfig) {
  ASSERT_EQ(run("sweep-slic " + kSmall + " --delta 0.5 --out cli_meta.csv").code, 0);
  ASSERT_EQ(run("sweep-slic --config cli_meta.csv.meta --out cli_replay.csv").code, 0);
  EXPECT_EQ(slurp("cli_meta.csv"), slurp("cli_replay.csv"));
}

TEST(Cli, FlagsOverrideConfigFile) {
  {
    std::ofstream cfg("cli_override.cfg");
    cfg << "seeds=2\ndata-grid=30,60\nbeta=2\n";
  }
  ASSERT_EQ(run("sweep-dpo --config cli_override.cfg --beta 0.5 --out cli_override.csv").code, 0);
  const auto meta = slurp("cli_override.csv.meta");
  EXPECT_NE(meta.find("beta=0.5\n"), std::string::npos);
  EXPECT_NE(meta.find("seeds=2\n"), std::string::npos);
  EXPECT_NE(meta.find("data-grid=30,60\n"), std::string::npos);
}

TEST(Cli, GenDataThenFit) {
  ASSERT_EQ(run("gen-data --num-data 300 --set-size 3 --out cli_stats.txt").code, 0);
  EXPECT_EQ(slurp("cli_stats.txt").rfind("3,300\n", 0), 0u);
  for (const std::string alg : {"rlpo", "dpo", "il"}) {
    const auto r = run("fit --stats cli_stats.txt --algorithm " + alg);
    EXPECT_EQ(r.code, 0) << alg;
    EXPECT_NE(r.out.find("p_m1="), std::string::npos);
  }
  EXPECT_EQ(run("fit --stats cli_stats.txt --algorithm slic").code, 2);
}

TEST(Cli, TheoryCheckPrintsTables) {
  const auto r = run("theory-check --seeds 5 --data-grid 100");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("4,0.66304347826086"), std::string::npos);
  EXPECT_NE(r.out.find("set_size,num_data,eta,eta_event_rate,il_event_rate,trials"), std::string::npos);
}

TEST(Cli, ConfigFailuresExitWithTwo) {
  EXPECT_EQ(run("sweep-rlpo --p1 1.5").code, 2);
  EXPECT_EQ(run("sweep-rlpo --seeds 0").code, 2);
  EXPECT_EQ(run("sweep-slic --set-size 3").code, 2);
  EXPECT_EQ(run("sweep-rlpo --no-such-flag 1").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("fit --stats does_not_exist.txt").code, 2);
  {
    std::ofstream bad("cli_bad_stats.txt");
    bad << "2,5\n1,1,1\n";
  }
  EXPECT_EQ(run("fit --stats cli_bad_stats.txt").code, 2);
}

TEST(Cli, NumericFailureExitsWithThree) {
  EXPECT_EQ(run("sweep-rlpo --seeds 1 --data-grid 100 --beta 1e-320").code, 3);
  EXPECT_EQ(run("sweep-dpo --seeds 1 --data-grid 100 --beta 1e-320").code, 3);
}

TEST(Cli, HelpAndVersionSucceed) {
  EXPECT_EQ(run("--help").code, 0);
  const auto v = run("--version");
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("0.1.0"), std::string::npos);
}
