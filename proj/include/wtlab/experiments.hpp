#pragma once

#include <functional>
#include <optional>
#include <string>

#include "wtlab/collision.hpp"
#include "wtlab/config.hpp"
#include "wtlab/manifest.hpp"
#include "wtlab/wave_model.hpp"

namespace wtlab {

struct RunOverrides {
  std::string out_dir = "wtlab_out";
  std::optional<uint64_t> seed;
  std::optional<int> threads;
};

WaveModel model_from_config(const ExperimentConfig& config);
std::function<double(double)> spectrum_profile_from_config(const ExperimentConfig& config,
                                                           const WaveModel& model);
GammaConvention gamma_convention_from_config(const ExperimentConfig& config);

/// Dispatches one experiment, emits CSVs plus manifest.json into the
/// output directory.  Returns 0 on success, 2 when a run check failed;
/// errors propagate as exceptions.
int run_experiment(const ExperimentConfig& config, const RunOverrides& overrides);

}  // namespace wtlab
