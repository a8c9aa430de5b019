#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace wtlab {

enum class ExperimentKind {
  kRates,
  kKinetic,
  kMoments,
  kPdfSteady,
  kPdfEvolve,
  kEnsemble,
  kCapExperiment,
  kScaling,
  kCompare,
};

std::string to_string(ExperimentKind kind);

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& message, int line, int column)
      : std::runtime_error(message), line(line), column(column) {}
  int line = 0;
  int column = 0;
};

/// Flat dotted-key configuration ("section.key = value", '#' comments).
/// Parsing rejects duplicate keys (with line/column) and keys unknown to
/// the chosen experiment kind (with the key path); typed getters fill
/// documented defaults.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(const std::string& text, const std::string& source = "<string>");
  static ExperimentConfig load(const std::string& path);

  ExperimentKind kind() const { return kind_; }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  std::string text(const std::string& key, const std::string& fallback) const;
  std::string required_text(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  uint64_t seed() const;
  bool flag(const std::string& key, bool fallback) const;

  /// Canonical serialization; load(emit()) reproduces the entry map.
  std::string emit() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

  bool operator==(const ExperimentConfig& other) const { return entries_ == other.entries_; }

 private:
  ExperimentKind kind_ = ExperimentKind::kRates;
  std::map<std::string, std::string> entries_;
};

}  // namespace wtlab
