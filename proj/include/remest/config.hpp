#pragma once

#include "remest/model.hpp"

#include <string>

namespace remest {

/// Strict decoding: every field is required, unknown keys are rejected,
/// and wrong types raise ConfigError. Value-level validation (stochastic
/// rows, distortion diagonal, ...) happens in build_model.
SystemConfig parse_config(const std::string& json_text);
SystemConfig load_config(const std::string& path);

/// Canonical JSON text (sorted keys, compact) of a configuration.
std::string config_to_json(const SystemConfig& config);

/// 16-hex-digit FNV-1a digest of the canonical JSON text.
std::string config_digest(const SystemConfig& config);

}  // namespace remest
