#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wtlab/config.hpp"

namespace wtlab {

inline constexpr const char* kVersion = "wtlab 0.1.0";

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string note;
};

/// FNV-1a 64-bit checksum of a file's bytes, as a hex string.
std::string fnv1a64_file(const std::string& path);

/// Machine-readable record of one run: config snapshot, convention
/// flags, per-check pass/fail summary and a checksummed file inventory.
/// Written atomically (temp file + rename) as manifest.json.
class RunManifest {
 public:
  explicit RunManifest(const ExperimentConfig& config);

  void add_check(const std::string& name, bool passed, double value, double threshold,
                 const std::string& note = "");
  void set_flag(const std::string& key, const std::string& value);
  void add_file(const std::string& path);  // checksummed at call time
  void set_wall_clock(double seconds) { wall_clock_ = seconds; }

  bool all_passed() const;
  const std::vector<CheckResult>& checks() const { return checks_; }

  std::string to_json() const;
  void write(const std::string& directory) const;

 private:
  ExperimentConfig config_;
  std::vector<CheckResult> checks_;
  std::vector<std::pair<std::string, std::string>> flags_;
  std::vector<std::pair<std::string, std::string>> files_;  // name -> checksum
  double wall_clock_ = 0.0;
};

}  // namespace wtlab
