#include "wtlab/manifest.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace wtlab {

std::string fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot checksum missing file: " + path);
  uint64_t hash = 0xCBF29CE484222325ull;
  char buf[1 << 14];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001B3ull;
    }
    if (in.eof()) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return hex;
}

RunManifest::RunManifest(const ExperimentConfig& config) : config_(config) {}

void RunManifest::add_check(const std::string& name, bool passed, double value, double threshold,
                            const std::string& note) {
  checks_.push_back(CheckResult{name, passed, value, threshold, note});
}

void RunManifest::set_flag(const std::string& key, const std::string& value) {
  flags_.emplace_back(key, value);
}

void RunManifest::add_file(const std::string& path) {
  files_.emplace_back(std::filesystem::path(path).filename().string(), fnv1a64_file(path));
}

bool RunManifest::all_passed() const {
  for (const auto& c : checks_)
    if (!c.passed) return false;
  return true;
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["version"] = kVersion;
  j["experiment"] = to_string(config_.kind());
  j["wall_clock_seconds"] = wall_clock_;
  j["config"] = nlohmann::json::object();
  for (const auto& [key, value] : config_.entries()) j["config"][key] = value;
  j["flags"] = nlohmann::json::object();
  for (const auto& [key, value] : flags_) j["flags"][key] = value;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks_) {
    j["checks"].push_back({{"name", c.name},
                           {"passed", c.passed},
                           {"value", c.value},
                           {"threshold", c.threshold},
                           {"note", c.note}});
  }
  j["files"] = nlohmann::json::array();
  for (const auto& [name, checksum] : files_)
    j["files"].push_back({{"name", name}, {"fnv1a64", checksum}});
  j["all_passed"] = all_passed();
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::string& directory) const {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  const fs::path target = fs::path(directory) / "manifest.json";
  const fs::path tmp = fs::path(directory) / "manifest.json.tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write manifest: " + tmp.string());
    out << to_json();
  }
  fs::rename(tmp, target);
}

}  // namespace wtlab
