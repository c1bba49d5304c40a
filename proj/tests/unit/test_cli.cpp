#include "cli.hpp"
#include "unfold/report.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

using namespace unfold;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "unfold_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Cli, UsageErrorsExitWith64) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"superstable", "--period", "2"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"--precision", "quad", "orbit"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"--format", "csv", "bc-check"}).code, cli::kExitUsage);
}

TEST(Cli, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.out.find("superstable"), std::string::npos);
}

TEST(Cli, SolverFailuresExitWith2) {
  const auto r = run({"superstable", "--window", "0.1:0.5", "--period", "2"});
  EXPECT_EQ(r.code, cli::kExitFailure);
  EXPECT_NE(r.err.find("NoSignChange"), std::string::npos);
  EXPECT_EQ(run({"orbit", "--a", "3"}).code, cli::kExitFailure);
  EXPECT_EQ(run({"replay", "/nonexistent/manifest.json"}).code, cli::kExitFailure);
}

TEST(Cli, SuperstableReportsCapAndRoot) {
  const auto r = run({"superstable", "--window", "0.9:1.1", "--period", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("period cap: 20 (double precision)\n", 0), 0u);
  const auto doc = nlohmann::json::parse(r.out.substr(r.out.find('\n') + 1));
  EXPECT_NEAR(doc["a"].get<double>(), 1.0, 1e-14);
  const auto ext = run({"--precision", "extended", "superstable", "--window", "1.7:1.8", "--period", "3"});
  ASSERT_EQ(ext.code, 0) << ext.err;
  EXPECT_NE(ext.out.find("period cap: 50"), std::string::npos);
}

TEST(Cli, CsvOutput) {
  const auto r = run({"--format", "csv", "orbit", "--a", "2", "--n", "2"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("k,x,log_deriv_partial\n0,0,0\n1,1,-inf\n2,-1,-inf\n"), std::string::npos);
}

TEST(Cli, OutWritesManifestAndReplayIsByteIdentical) {
  const auto first = scratch("thm-d.json");
  const auto second = scratch("thm-d-replay.json");
  std::filesystem::remove(first);
  std::filesystem::remove(second);
  const auto r = run({"--seed", "11", "--out", first.string(), "thm-d", "--n-range", "8..10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto manifest = RunManifest::parse(read_file(manifest_path(first)));
  EXPECT_EQ(manifest.command, "thm-d");
  EXPECT_EQ(manifest.seed, 11u);
  EXPECT_EQ(manifest.output_hashes.front(), git_blob_hash(read_file(first)));
  const auto rr = run({"--out", second.string(), "replay", manifest_path(first).string()});
  ASSERT_EQ(rr.code, 0) << rr.err;
  EXPECT_EQ(read_file(first), read_file(second));
  const auto m2 = RunManifest::parse(read_file(manifest_path(second)));
  EXPECT_EQ(m2.input_hash, manifest.input_hash);
}

TEST(Cli, SeededCommandsAreDeterministic) {
  const auto a = run({"--seed", "5", "lyapunov", "--a", "1.9", "--n", "10000"});
  const auto b = run({"--seed", "5", "lyapunov", "--a", "1.9", "--n", "10000"});
  const auto c = run({"--seed", "6", "lyapunov", "--a", "1.9", "--n", "10000"});
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, BinaryExitCodes) {
  const std::string bin = UNFOLD_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int s = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status(""), 64);
  EXPECT_EQ(status("--help"), 0);
  EXPECT_EQ(status("attractor --a 1"), 0);
  EXPECT_EQ(status("superstable --window 0.1:0.5 --period 2"), 2);
}
