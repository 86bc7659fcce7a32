#include "remest/config.hpp"

#include "remest/errors.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace remest {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::set<std::string>& keys, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!keys.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
  for (const auto& k : keys) {
    if (!obj.contains(k)) throw ConfigError("missing key '" + k + "' in " + where);
  }
}

double number(const json& j, const std::string& name) {
  if (!j.is_number()) throw ConfigError("'" + name + "' must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& name) {
  if (!j.is_number_integer()) throw ConfigError("'" + name + "' must be an integer");
  return j.get<int>();
}

std::vector<double> vector_of(const json& j, const std::string& name) {
  if (!j.is_array()) throw ConfigError("'" + name + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, name));
  return out;
}

std::vector<std::vector<double>> matrix_of(const json& j, const std::string& name) {
  if (!j.is_array()) throw ConfigError("'" + name + "' must be an array of rows");
  std::vector<std::vector<double>> out;
  for (const auto& row : j) out.push_back(vector_of(row, name));
  return out;
}

AgeFunction age_function_of(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw ConfigError("'age_function' must be an object with a string 'kind'");
  }
  const std::string kind = j["kind"];
  if (kind == "exponential_affine") {
    require_keys(j, {"kind", "a", "b", "c"}, "age_function");
    return AgeFunction::exponential_affine(number(j["a"], "a"), number(j["b"], "b"), number(j["c"], "c"));
  }
  if (kind == "polynomial") {
    require_keys(j, {"kind", "coeffs"}, "age_function");
    return AgeFunction::polynomial(vector_of(j["coeffs"], "coeffs"));
  }
  if (kind == "table") {
    require_keys(j, {"kind", "values", "tail_ratio"}, "age_function");
    return AgeFunction::table(vector_of(j["values"], "values"), number(j["tail_ratio"], "tail_ratio"));
  }
  throw ConfigError("unknown age_function kind '" + kind + "'");
}

json age_function_json(const AgeFunction& f) {
  json j;
  switch (f.kind()) {
    case AgeFunction::Kind::ExponentialAffine:
      j = {{"kind", "exponential_affine"}, {"a", f.params()[0]}, {"b", f.params()[1]}, {"c", f.params()[2]}};
      break;
    case AgeFunction::Kind::Polynomial:
      j = {{"kind", "polynomial"}, {"coeffs", f.params()}};
      break;
    case AgeFunction::Kind::Table:
      j = {{"kind", "table"}, {"values", f.params()}, {"tail_ratio", f.tail_ratio()}};
      break;
  }
  return j;
}

}  // namespace

SystemConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  require_keys(j,
               {"alphabet_size", "transition_matrix", "p_s", "distortion", "age_function", "theta_max",
                "delta_max", "f_max", "lambda_max", "tolerances", "seed", "estimator"},
               "config");
  SystemConfig c;
  c.alphabet_size = integer(j["alphabet_size"], "alphabet_size");
  c.transition_matrix = matrix_of(j["transition_matrix"], "transition_matrix");
  c.p_s = number(j["p_s"], "p_s");
  if (j["distortion"].is_string()) {
    if (j["distortion"] != "hamming") throw ConfigError("'distortion' must be \"hamming\" or a matrix");
  } else {
    c.distortion = matrix_of(j["distortion"], "distortion");
  }
  c.age_function = age_function_of(j["age_function"]);
  c.theta_max = integer(j["theta_max"], "theta_max");
  c.delta_max = integer(j["delta_max"], "delta_max");
  c.f_max = number(j["f_max"], "f_max");
  c.lambda_max = number(j["lambda_max"], "lambda_max");
  require_keys(j["tolerances"], {"eval", "search", "mixture"}, "tolerances");
  c.tolerances.eval = number(j["tolerances"]["eval"], "tolerances.eval");
  c.tolerances.search = number(j["tolerances"]["search"], "tolerances.search");
  c.tolerances.mixture = number(j["tolerances"]["mixture"], "tolerances.mixture");
  if (!j["seed"].is_number_unsigned()) throw ConfigError("'seed' must be a nonnegative integer");
  c.seed = j["seed"].get<std::uint64_t>();
  if (!j["estimator"].is_string()) throw ConfigError("'estimator' must be \"map\" or \"zoh\"");
  const std::string est = j["estimator"];
  if (est == "map") {
    c.estimator = EstimatorMode::Map;
  } else if (est == "zoh") {
    c.estimator = EstimatorMode::Zoh;
  } else {
    throw ConfigError("'estimator' must be \"map\" or \"zoh\"");
  }

  if (c.alphabet_size < 2) throw ConfigError("'alphabet_size' must be >= 2");
  if (static_cast<int>(c.transition_matrix.size()) != c.alphabet_size) {
    throw ConfigError("'transition_matrix' must have alphabet_size rows");
  }
  if (!(c.f_max > 0.0 && c.f_max <= 1.0)) throw ConfigError("'f_max' must lie in (0, 1]");
  if (!(c.lambda_max > 0.0)) throw ConfigError("'lambda_max' must be positive");
  if (!(c.tolerances.eval > 0.0 && c.tolerances.search > 0.0 && c.tolerances.mixture > 0.0)) {
    throw ConfigError("all tolerances must be positive");
  }
  return c;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const SystemConfig& c) {
  json j;
  j["alphabet_size"] = c.alphabet_size;
  j["transition_matrix"] = c.transition_matrix;
  j["p_s"] = c.p_s;
  if (c.distortion.empty()) {
    j["distortion"] = "hamming";
  } else {
    j["distortion"] = c.distortion;
  }
  j["age_function"] = age_function_json(c.age_function);
  j["theta_max"] = c.theta_max;
  j["delta_max"] = c.delta_max;
  j["f_max"] = c.f_max;
  j["lambda_max"] = c.lambda_max;
  j["tolerances"] = {{"eval", c.tolerances.eval}, {"search", c.tolerances.search}, {"mixture", c.tolerances.mixture}};
  j["seed"] = c.seed;
  j["estimator"] = c.estimator == EstimatorMode::Map ? "map" : "zoh";
  return j.dump();
}

std::string config_digest(const SystemConfig& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : config_to_json(config)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace remest
