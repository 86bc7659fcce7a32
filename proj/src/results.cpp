#include "remest/results.hpp"

#include "remest/errors.hpp"

#include "json.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace remest {

using ojson = nlohmann::ordered_json;

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::vector<std::string>> csv_split(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw IoError("unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

Cell parse_cell(const std::string& s) {
  if (s.empty()) return s;
  char* end = nullptr;
  errno = 0;
  const long long ll = std::strtoll(s.c_str(), &end, 10);
  if (errno == 0 && *end == '\0') return ll;
  errno = 0;
  const double d = std::strtod(s.c_str(), &end);
  if (*end == '\0') return d;
  return s;
}

ojson cell_json(const Cell& c) {
  if (std::holds_alternative<double>(c)) {
    // Keep the 12-digit rendering so JSON and CSV carry the same numbers.
    const double d = std::get<double>(c);
    if (!std::isfinite(d)) return format_cell(c);
    return ojson::parse(format_cell(c));
  }
  if (std::holds_alternative<long long>(c)) return std::get<long long>(c);
  return std::get<std::string>(c);
}

Cell json_cell(const ojson& j) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw IoError("unsupported JSON cell type");
}

}  // namespace

std::string format_cell(const Cell& cell) {
  if (std::holds_alternative<double>(cell)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", std::get<double>(cell));
    return buf;
  }
  if (std::holds_alternative<long long>(cell)) return std::to_string(std::get<long long>(cell));
  return std::get<std::string>(cell);
}

std::string to_csv(const ResultRecord& r) {
  std::ostringstream os;
  os << "config_digest";
  for (const auto& c : r.columns) os << ',' << csv_quote(c);
  os << '\n';
  for (const auto& row : r.rows) {
    os << csv_quote(r.config_digest);
    for (const auto& cell : row) os << ',' << csv_quote(format_cell(cell));
    os << '\n';
  }
  return os.str();
}

std::string to_json(const ResultRecord& r) {
  ojson j;
  j["experiment"] = r.experiment;
  j["config_digest"] = r.config_digest;
  j["library_version"] = r.library_version;
  j["created_at"] = r.created_at;
  ojson meta = ojson::object();
  for (const auto& [k, v] : r.metadata) meta[k] = v;
  j["metadata"] = meta;
  j["columns"] = r.columns;
  ojson rows = ojson::array();
  for (const auto& row : r.rows) {
    ojson o;
    o["config_digest"] = r.config_digest;
    for (std::size_t i = 0; i < row.size() && i < r.columns.size(); ++i) o[r.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(o));
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

ResultRecord parse_csv(const std::string& text, const std::string& experiment) {
  auto lines = csv_split(text);
  if (lines.empty() || lines[0].empty() || lines[0][0] != "config_digest") {
    throw IoError("CSV result must start with a config_digest header");
  }
  ResultRecord r;
  r.experiment = experiment;
  r.columns.assign(lines[0].begin() + 1, lines[0].end());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].size() != lines[0].size()) throw IoError("CSV row width does not match the header");
    r.config_digest = lines[i][0];
    std::vector<Cell> row;
    for (std::size_t k = 1; k < lines[i].size(); ++k) row.push_back(parse_cell(lines[i][k]));
    r.rows.push_back(std::move(row));
  }
  return r;
}

ResultRecord parse_json(const std::string& text) {
  const ojson j = ojson::parse(text);
  ResultRecord r;
  r.experiment = j.at("experiment");
  r.config_digest = j.at("config_digest");
  r.library_version = j.at("library_version");
  r.created_at = j.at("created_at");
  for (auto it = j.at("metadata").begin(); it != j.at("metadata").end(); ++it) {
    r.metadata.emplace_back(it.key(), it.value().get<std::string>());
  }
  r.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& o : j.at("rows")) {
    std::vector<Cell> row;
    for (const auto& c : r.columns) row.push_back(json_cell(o.at(c)));
    r.rows.push_back(std::move(row));
  }
  return r;
}

std::string render_results(const std::vector<ResultRecord>& records, ResultFormat format) {
  if (records.empty()) throw IoError("no result records to emit");
  std::string out;
  if (format == ResultFormat::Csv) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (i) out += '\n';
      out += to_csv(records[i]);
    }
    return out;
  }
  if (records.size() == 1) return to_json(records[0]);
  out = "[\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i) out += ",\n";
    std::string one = to_json(records[i]);
    one.pop_back();
    out += one;
  }
  return out + "\n]\n";
}

void emit_results(const std::vector<ResultRecord>& records, ResultFormat format, const std::string& path) {
  const std::string text = render_results(records, format);
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace remest
