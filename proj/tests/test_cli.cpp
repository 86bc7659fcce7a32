#include "remest/config.hpp"
#include "remest/experiments.hpp"
#include "remest/model.hpp"
#include "remest/results.hpp"

#include <gtest/gtest.h>

#include "json.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace remest;
using nlohmann::json;

namespace {

const std::string kMain = REMEST_CONFIG_DIR "/baseline.json";
const std::string kSym = REMEST_CONFIG_DIR "/symmetric.json";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

json main_json() {
  std::ifstream in(kMain);
  return json::parse(in);
}

}  // namespace

TEST(Cli, CheckReportsAssumptionMargins) {
  const auto r = run({"check", "--config", kMain});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rec = parse_csv(r.out);
  ASSERT_EQ(rec.rows.size(), 3u);
  const auto col = [&](const std::string& name) {
    return std::find(rec.columns.begin(), rec.columns.end(), name) - rec.columns.begin();
  };
  EXPECT_NEAR(std::get<double>(rec.rows[0][col("limit_ratio")]), 1.73325301787, 1e-9);
  EXPECT_NEAR(std::get<double>(rec.rows[0][col("bound")]), 1.0 / (0.8 * 0.3), 1e-9);
}

TEST(Cli, RowSumErrorExitsWithValidationCode) {
  auto j = main_json();
  j["transition_matrix"][2] = {0.3, 0.3, 0.3};
  const auto path = write_temp("remest_bad_rows.json", j.dump());
  const auto r = run({"check", "--config", path});
  EXPECT_EQ(r.code, kExitValidation);
  const auto e = json::parse(r.err);
  EXPECT_EQ(e["error"], "RowSumError");
  EXPECT_EQ(e["class"], "validation");
}

TEST(Cli, UsageAndIoErrors) {
  EXPECT_EQ(run({}).code, kExitFailure);
  EXPECT_EQ(run({"solve"}).code, kExitFailure);
  EXPECT_EQ(run({"check", "--config", "/nonexistent.json"}).code, kExitFailure);
  EXPECT_EQ(run({"check", "--config", kMain, "--format", "xml"}).code, kExitFailure);
}

TEST(Cli, BadBracketExitsWithSolverCode) {
  auto j = main_json();
  j["lambda_max"] = 0.5;
  const auto path = write_temp("remest_small_lambda.json", j.dump());
  const auto r = run({"solve", "--config", path});
  EXPECT_EQ(r.code, kExitSolver);
  EXPECT_EQ(json::parse(r.err)["error"], "BadBracket");
}

TEST(Cli, SolveLambdaMatchesReferenceRun) {
  const auto r = run({"solve-lambda", "--config", kMain, "--lambda", "5", "--format", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rec = parse_json(r.out);
  const auto j = json::parse(r.out);
  const auto& row = j["rows"][0];
  EXPECT_NEAR(row["F"].get<double>(), 0.159911423094, 1e-9);
  EXPECT_NEAR(row["J"].get<double>(), 0.813680053639, 1e-9);
  EXPECT_EQ(rec.config_digest.size(), 16u);
}

TEST(Cli, RerunsAreByteIdentical) {
  setenv("SOURCE_DATE_EPOCH", "1735689600", 1);
  const std::vector<std::string> args{"sweep", "--config", kSym, "--lambda-grid", "0,2,4,8"};
  const auto a = run(args);
  const auto b = run(args);
  unsetenv("SOURCE_DATE_EPOCH");
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto j1 = run({"simulate", "--config", kSym, "--horizon", "20000", "--seed", "3", "--format", "json"});
  const auto j2 = run({"simulate", "--config", kSym, "--horizon", "20000", "--seed", "3", "--format", "json"});
  ASSERT_EQ(j1.code, kExitOk) << j1.err;
  EXPECT_EQ(json::parse(j1.out)["rows"], json::parse(j2.out)["rows"]);
}

TEST(Cli, OutFileIsWritten) {
  const auto path = (std::filesystem::temp_directory_path() / "remest_out.csv").string();
  std::filesystem::remove(path);
  const auto r = run({"check", "--config", kMain, "--out", path});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_TRUE(std::filesystem::exists(path));
}

TEST(Cli, SelftestPassesOnSymmetricConfig) {
  const auto r = run({"selftest", "--config", kSym, "--lambda-grid", "0,1,3,10"});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
}

TEST(Cli, RunSelftestChecksAllPass) {
  const auto m = build_model(load_config(kSym));
  const auto checks = run_selftest(m, {0.0, 2.0, 6.0});
  EXPECT_GE(checks.size(), 6u);
  for (const auto& c : checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}
