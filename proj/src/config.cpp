#include "wtlab/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <vector>

namespace wtlab {

namespace {

const std::array<std::pair<ExperimentKind, const char*>, 9> kKindNames = {{
    {ExperimentKind::kRates, "rates"},
    {ExperimentKind::kKinetic, "kinetic"},
    {ExperimentKind::kMoments, "moments"},
    {ExperimentKind::kPdfSteady, "pdf-steady"},
    {ExperimentKind::kPdfEvolve, "pdf-evolve"},
    {ExperimentKind::kEnsemble, "ensemble"},
    {ExperimentKind::kCapExperiment, "cap-experiment"},
    {ExperimentKind::kScaling, "scaling"},
    {ExperimentKind::kCompare, "compare"},
}};

// Key groups shared by several experiment kinds.
constexpr const char* kModelKeys[] = {
    "dispersion.kind", "dispersion.c", "dispersion.alpha", "dispersion.g",
    "interaction.kind", "interaction.w0", "interaction.beta",
    "grid.d", "grid.n", "grid.length", "epsilon",
};
constexpr const char* kSpectrumKeys[] = {
    "spectrum.kind", "spectrum.amplitude", "spectrum.k0", "spectrum.exponent", "spectrum.kc",
};
constexpr const char* kCollisionKeys[] = {
    "collision.t", "collision.gamma_convention", "collision.quad_nodes", "collision.scan_nodes",
    "collision.root_tol", "collision.continuum",
};
constexpr const char* kKineticKeys[] = {
    "kinetic.dt", "kinetic.t_end", "kinetic.pmax", "kinetic.sample_stride",
};
constexpr const char* kPdfKeys[] = {
    "pdf.cells", "pdf.smax_over_n", "pdf.snl_over_n", "pdf.dt", "pdf.t_end", "pdf.n",
    "pdf.gamma", "pdf.eta", "pdf.flux", "pdf.c", "pdf.sink_rate", "pdf.boundary",
    "pdf.sample_stride", "pdf.first_cell_over_n",
};
constexpr const char* kEnsembleKeys[] = {
    "ensemble.realizations", "ensemble.dt", "ensemble.t_end", "ensemble.sample_stride",
    "ensemble.amplitude_law", "ensemble.track_k", "ensemble.hist_bins",
    "ensemble.hist_smax_over_n", "ensemble.save_states", "ensemble.lambda_count",
    "ensemble.lambda_n_max",
};
constexpr const char* kCapKeys[] = {
    "cap.snl", "cap.policy", "cap.cadence", "cap.t_end", "cap.dt", "cap.realizations",
    "cap.probe_k", "cap.warmup_fraction", "cap.excess_threshold", "cap.s_over_n",
    "cap.hist_bins", "forcing.band_max", "forcing.amplitude", "damping.band_min", "damping.rate",
};
constexpr const char* kScalingKeys[] = {
    "scaling.g", "scaling.energy_flux", "scaling.action_flux", "scaling.kmin", "scaling.kmax",
    "scaling.count",
};
constexpr const char* kCompareKeys[] = {
    "compare.theory", "compare.empirical", "compare.tail_lo", "compare.tail_hi",
};

bool kind_uses_model(ExperimentKind k) {
  return k == ExperimentKind::kRates || k == ExperimentKind::kKinetic ||
         k == ExperimentKind::kMoments || k == ExperimentKind::kEnsemble ||
         k == ExperimentKind::kCapExperiment;
}

std::vector<std::string> allowed_keys(ExperimentKind k) {
  std::vector<std::string> keys = {"experiment", "seed", "threads"};
  const auto append = [&keys](const auto& group) {
    for (const char* key : group) keys.push_back(key);
  };
  if (kind_uses_model(k)) append(kModelKeys);
  if (k == ExperimentKind::kRates || k == ExperimentKind::kKinetic ||
      k == ExperimentKind::kMoments || k == ExperimentKind::kEnsemble ||
      k == ExperimentKind::kCapExperiment)
    append(kSpectrumKeys);
  if (k == ExperimentKind::kRates || k == ExperimentKind::kKinetic || k == ExperimentKind::kMoments)
    append(kCollisionKeys);
  if (k == ExperimentKind::kKinetic || k == ExperimentKind::kMoments) append(kKineticKeys);
  if (k == ExperimentKind::kPdfSteady || k == ExperimentKind::kPdfEvolve) append(kPdfKeys);
  if (k == ExperimentKind::kEnsemble) append(kEnsembleKeys);
  if (k == ExperimentKind::kCapExperiment) append(kCapKeys);
  if (k == ExperimentKind::kScaling) append(kScalingKeys);
  if (k == ExperimentKind::kCompare) append(kCompareKeys);
  return keys;
}

ExperimentKind parse_kind(const std::string& name) {
  for (const auto& [kind, text] : kKindNames)
    if (name == text) return kind;
  throw ConfigError("unknown experiment kind '" + name + "'", 0, 0);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, text] : kKindNames)
    if (k == kind) return text;
  return "?";
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& source) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'", lineno, 1);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key", lineno, 1);
    if (value.empty())
      throw ConfigError(source + ":" + std::to_string(lineno) + ": empty value for '" + key + "'",
                        lineno, int(eq) + 2);
    if (cfg.entries_.count(key))
      throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'",
                        lineno, 1);
    cfg.entries_[key] = value;
  }

  const auto it = cfg.entries_.find("experiment");
  if (it == cfg.entries_.end())
    throw ConfigError(source + ": missing required key 'experiment'", 0, 0);
  cfg.kind_ = parse_kind(it->second);

  const std::vector<std::string> allowed = allowed_keys(cfg.kind_);
  for (const auto& [key, value] : cfg.entries_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(source + ": unknown key '" + key + "' for experiment kind '" +
                            to_string(cfg.kind_) + "'",
                        0, 0);
  }

  if (cfg.kind_ == ExperimentKind::kEnsemble || cfg.kind_ == ExperimentKind::kCapExperiment) {
    if (!cfg.entries_.count("seed"))
      throw ConfigError(source + ": stochastic experiment requires key 'seed'", 0, 0);
  }
  if (cfg.kind_ == ExperimentKind::kCompare) {
    for (const char* key : {"compare.theory", "compare.empirical"})
      if (!cfg.entries_.count(key))
        throw ConfigError(source + ": compare requires key '" + std::string(key) + "'", 0, 0);
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path);
}

std::string ExperimentConfig::text(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

std::string ExperimentConfig::required_text(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing required key '" + key + "'", 0, 0);
  return it->second;
}

double ExperimentConfig::number(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("key '" + key + "': not a number: '" + it->second + "'", 0, 0);
  }
}

long ExperimentConfig::integer(const std::string& key, long fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    size_t pos = 0;
    const long v = std::stol(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("key '" + key + "': not an integer: '" + it->second + "'", 0, 0);
  }
}

uint64_t ExperimentConfig::seed() const {
  const std::string raw = required_text("seed");
  try {
    size_t pos = 0;
    const uint64_t v = std::stoull(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("key 'seed': not an unsigned integer: '" + raw + "'", 0, 0);
  }
}

bool ExperimentConfig::flag(const std::string& key, bool fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
  if (it->second == "false" || it->second == "0" || it->second == "no") return false;
  throw ConfigError("key '" + key + "': not a boolean: '" + it->second + "'", 0, 0);
}

std::string ExperimentConfig::emit() const {
  std::ostringstream out;
  for (const auto& [key, value] : entries_) out << key << " = " << value << "\n";
  return out.str();
}

}  // namespace wtlab
