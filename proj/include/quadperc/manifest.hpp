#pragma once

#include <chrono>
#include <string>

#include <json.hpp>

namespace quadperc {

inline constexpr const char* kArtifactVersion = "1.0.0";
inline constexpr const char* kJsonSchema = "quadperc-json-1";
inline constexpr const char* kCsvSchema = "quadperc-csv-1";

// Embedded in every JSON document; the config makes the run reproducible
// (modulo the timestamp).
inline nlohmann::json run_manifest(const std::string& command,
                                   const nlohmann::json& config) {
  auto now = std::chrono::system_clock::now();
  auto secs =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
          .count();
  return nlohmann::json{{"schema", kJsonSchema},
                        {"artifact_version", kArtifactVersion},
                        {"command", command},
                        {"config", config},
                        {"timestamp_unix", secs}};
}

}  // namespace quadperc
