#include "remest/config.hpp"
#include "remest/errors.hpp"
#include "remest/results.hpp"

#include <gtest/gtest.h>

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

using namespace remest;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string main_json() { return read_file(REMEST_CONFIG_DIR "/baseline.json"); }

ResultRecord sample_record() {
  ResultRecord r;
  r.experiment = "sweep";
  r.config_digest = "0123456789abcdef";
  r.created_at = "2025-01-01T00:00:00Z";
  r.metadata = {{"note", "a, \"quoted\" value"}, {"n", "3"}};
  r.columns = {"lambda", "F", "count", "label"};
  r.rows = {{0.5, 0.1599114230941234, 7LL, std::string("plain")},
            {1e-7, 1.0 / 3.0, -2LL, std::string("with,comma")},
            {1000.0, 0.0, 0LL, std::string("line\nbreak \"q\"")}};
  return r;
}

}  // namespace

TEST(Config, ParsesShippedConfig) {
  const auto c = parse_config(main_json());
  EXPECT_EQ(c.alphabet_size, 3);
  EXPECT_EQ(c.theta_max, 20);
  EXPECT_EQ(c.delta_max, 20);
  EXPECT_DOUBLE_EQ(c.p_s, 0.7);
  EXPECT_DOUBLE_EQ(c.f_max, 0.1);
  EXPECT_DOUBLE_EQ(c.transition_matrix[1][0], 0.3);
  EXPECT_NEAR(c.age_function(3), 1.2 * std::exp(1.65) + 0.3, 1e-12);
  EXPECT_EQ(c.seed, 20250101u);
  EXPECT_NO_THROW(build_model(c));
}

TEST(Config, RejectsUnknownKey) {
  auto j = json::parse(main_json());
  j["extra"] = 1;
  EXPECT_THROW(parse_config(j.dump()), ConfigError);
}

TEST(Config, RejectsEveryMissingKey) {
  const auto base = json::parse(main_json());
  for (const auto& [key, value] : base.items()) {
    auto j = base;
    j.erase(key);
    EXPECT_THROW(parse_config(j.dump()), ConfigError) << key;
  }
}

TEST(Config, RejectsWrongTypes) {
  auto j = json::parse(main_json());
  j["theta_max"] = "twenty";
  EXPECT_THROW(parse_config(j.dump()), ConfigError);
  j = json::parse(main_json());
  j["estimator"] = "median";
  EXPECT_THROW(parse_config(j.dump()), ConfigError);
  j = json::parse(main_json());
  j["age_function"] = {{"kind", "cubic"}};
  EXPECT_THROW(parse_config(j.dump()), ConfigError);
  EXPECT_THROW(parse_config("{not json"), ConfigError);
}

TEST(Config, ValueErrorsSurfaceFromBuildModel) {
  auto j = json::parse(main_json());
  j["transition_matrix"][0] = {0.8, 0.1, 0.2};
  const auto c = parse_config(j.dump());
  EXPECT_THROW(build_model(c), RowSumError);
  j = json::parse(main_json());
  j["distortion"] = {{0.5, 1, 1}, {1, 0, 1}, {1, 1, 0}};
  EXPECT_THROW(build_model(parse_config(j.dump())), DistortionDiagonalError);
}

TEST(Config, MissingFileIsIoError) {
  EXPECT_THROW(load_config("/nonexistent/config.json"), IoError);
}

TEST(Config, CanonicalJsonRoundTripsAndDigestIsStable) {
  const auto c = parse_config(main_json());
  const auto text = config_to_json(c);
  const auto c2 = parse_config(text);
  EXPECT_EQ(config_to_json(c2), text);
  EXPECT_EQ(config_digest(c), config_digest(c2));
  EXPECT_EQ(config_digest(c).size(), 16u);
  auto c3 = c;
  c3.f_max = 0.15;
  EXPECT_NE(config_digest(c3), config_digest(c));
  // Key order and whitespace in the input do not matter.
  auto j = json::parse(main_json());
  EXPECT_EQ(config_digest(parse_config(j.dump(4))), config_digest(c));
}

TEST(Results, FormatCell) {
  EXPECT_EQ(format_cell(0.1), "0.1");
  EXPECT_EQ(format_cell(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_cell(12LL), "12");
  EXPECT_EQ(format_cell(std::string("x")), "x");
}

TEST(Results, CsvHeaderAndQuoting) {
  const auto csv = to_csv(sample_record());
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "config_digest,lambda,F,count,label");
  EXPECT_NE(csv.find("\"with,comma\""), std::string::npos);
  EXPECT_NE(csv.find("\"line\nbreak \"\"q\"\"\""), std::string::npos);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
}

TEST(Results, CsvRoundTripIsByteIdentical) {
  const auto r = sample_record();
  const auto csv = to_csv(r);
  const auto back = parse_csv(csv, r.experiment);
  EXPECT_EQ(back.config_digest, r.config_digest);
  EXPECT_EQ(back.columns, r.columns);
  ASSERT_EQ(back.rows.size(), r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i)
    for (std::size_t k = 0; k < r.columns.size(); ++k)
      EXPECT_EQ(format_cell(back.rows[i][k]), format_cell(r.rows[i][k]));
  EXPECT_EQ(to_csv(back), csv);
}

TEST(Results, JsonRoundTripIsByteIdentical) {
  const auto r = sample_record();
  const auto text = to_json(r);
  const auto back = parse_json(text);
  EXPECT_EQ(back.experiment, r.experiment);
  EXPECT_EQ(back.created_at, r.created_at);
  EXPECT_EQ(back.metadata, r.metadata);
  EXPECT_EQ(to_json(back), text);
  const auto j = json::parse(text);
  EXPECT_EQ(j["rows"][0]["config_digest"], r.config_digest);
  EXPECT_EQ(j["library_version"], kLibraryVersion);
}

TEST(Results, EmitToUnwritablePathIsIoError) {
  EXPECT_THROW(emit_results({sample_record()}, ResultFormat::Csv, "/nonexistent/dir/out.csv"), IoError);
}
