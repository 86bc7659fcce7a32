#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace remest {

inline constexpr const char* kLibraryVersion = "0.1.0";

using Cell = std::variant<double, long long, std::string>;

/// One experiment's table. Every emitted row is prefixed with the config
/// digest; `metadata` is an ordered list of free-form annotations.
struct ResultRecord {
  std::string experiment;
  std::string config_digest;
  std::string library_version = kLibraryVersion;
  std::string created_at;  // ISO-8601 UTC, set by the caller
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

enum class ResultFormat { Csv, Json };

/// %.12g for doubles; integers verbatim.
std::string format_cell(const Cell& cell);

/// RFC-4180 CSV: header "config_digest,<columns...>", one line per row, CRLF-free.
std::string to_csv(const ResultRecord& record);
/// JSON with keys in a fixed order.
std::string to_json(const ResultRecord& record);

/// Inverse of to_csv / to_json for the tabular part (metadata restored from JSON only).
ResultRecord parse_csv(const std::string& text, const std::string& experiment = "");
ResultRecord parse_json(const std::string& text);

/// Writes `records` to `path` ("-" = stdout). Multiple CSV records are
/// separated by a blank line. Throws IoError.
void emit_results(const std::vector<ResultRecord>& records, ResultFormat format, const std::string& path);
std::string render_results(const std::vector<ResultRecord>& records, ResultFormat format);

}  // namespace remest
