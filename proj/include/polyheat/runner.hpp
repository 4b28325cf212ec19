#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "polyheat/config.hpp"

namespace polyheat {

inline constexpr const char* tool_version = "polyheat 0.1.0";

struct ArtifactEntry {
  std::string path;  // relative to the run directory
  std::string sha256;
  std::uint64_t bytes = 0;
};

struct RunManifest {
  std::string run_id;
  std::string command;
  nlohmann::json config;
  std::vector<ArtifactEntry> artifacts;
  double seconds = 0.0;
  bool ok = true;
  std::string failure;
  nlohmann::json summary = nlohmann::json::object();
  std::string version = tool_version;

  int exit_code() const { return ok ? 0 : 1; }
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Runs the configured command, writes every artifact plus manifest.json into
/// config.output and never throws for module errors: they become a failed outcome.
RunManifest run(const RunConfig& config);

/// Human-readable digest of a list of manifest files.
std::string report(const std::vector<std::filesystem::path>& manifests);

} // namespace polyheat
