#pragma once

// Run manifests: enough to replay a run and check that it reproduced.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace phi4::lab {

inline constexpr const char* kVersion = "phi4 0.1.0";

struct RunManifest {
  std::string version = kVersion;
  std::string command;
  /// Subcommand options other than --config, --manifest and --out.
  std::map<std::string, std::string> options;
  std::string config;
  std::string seed_rule;
  int threads = 1;
  double wall_clock_seconds = 0;
  /// Aborted replicas per eps (as written) or per arm.
  std::map<std::string, long> aborts;
  /// File name relative to the output directory -> SHA-256 hex digest.
  std::map<std::string, std::string> digests;
};

std::string sha256_hex(const std::string& bytes);

std::string to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

/// Files whose digest in `reference` differs from `actual`, or is missing.
std::vector<std::string> digest_mismatches(const RunManifest& reference, const RunManifest& actual);

}  // namespace phi4::lab
