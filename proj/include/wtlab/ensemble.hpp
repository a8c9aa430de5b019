#pragma once

#include <Eigen/Core>

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "wtlab/collision.hpp"
#include "wtlab/pdf.hpp"
#include "wtlab/rng.hpp"
#include "wtlab/stats.hpp"
#include "wtlab/wave_model.hpp"

namespace wtlab {

/// One realization of the wave field.  Amplitudes are stored in the
/// non-rotating variables c_l = b_l e^{-i omega_l t}, whose flow is
/// autonomous and conserves both the total action and the Hamiltonian
/// exactly; |c_l| = |b_l| = |a_l|, so intensity statistics read off
/// directly.
struct ModeState {
  Eigen::VectorXcd c;
  double time = 0.0;

  double total_action() const { return c.squaredNorm(); }
};

enum class AmplitudeLaw {
  kRayleighIntensity,  // |a|^2 exponential with the prescribed mean
  kDeterministic,      // |a| = sqrt(n), phases still random
};

/// Random Phase and Amplitude sampler: phases uniform on the circle,
/// amplitudes independent of each other and of all phases.
struct RpaSampler {
  AmplitudeLaw law = AmplitudeLaw::kRayleighIntensity;
  Eigen::ArrayXd mean_intensity;  // per-mode n_k
};

ModeState sample_rpa_field(const RpaSampler& sampler, Rng& rng);

/// Nonlinear frequency shift Omega_k = 2 eps sum_a W(k,a;k,a) |c_a(0)|^2
/// evaluated at the given (initial) state.
Eigen::ArrayXd frequency_shift(const WaveModel& model, const ModeState& initial);

/// Precomputed momentum-conserving quadruples (l, a) -> (m, nu = l+a-m)
/// with their couplings, flattened for the hot loops.  Construction
/// refuses grids whose quadruple count exceeds 1e9.
class QuadrupleTable {
 public:
  explicit QuadrupleTable(const WaveModel& model);

  Eigen::Index modes() const { return modes_; }
  long long quadruple_count() const { return static_cast<long long>(terms_.size()); }

  /// out_l = sum_{a,m,nu} W^{la}_{m nu} conj(c_a) c_m c_nu.
  void nonlinear(const std::complex<double>* c, std::complex<double>* out) const;

  /// Quartic Hamiltonian (1/2) sum W cbar cbar c c (without epsilon).
  double interaction_energy(const std::complex<double>* c) const;

 private:
  struct Term {
    int32_t l, a, m, nu;
    double w;
  };
  std::vector<Term> terms_;
  Eigen::Index modes_ = 0;
};

/// dc_l/dt = -i (omega_l c_l + eps sum W conj(c_a) c_m c_nu).
void dynamical_rhs(const WaveModel& model, const QuadrupleTable& table, const ModeState& state,
                   Eigen::VectorXcd& out);

/// H = sum omega |c|^2 + (eps/2) sum W cbar cbar c c.
double hamiltonian(const WaveModel& model, const QuadrupleTable& table, const ModeState& state);

enum class CapKind { kNone, kClip, kRedistribute };

struct CapPolicy {
  CapKind kind = CapKind::kNone;
  double s_nl = 0.0;
  int cadence = 1;  // apply every this many steps
};

/// Ceiling on mode intensities: clip rescales to sqrt(s_nl) keeping the
/// phase; redistribute also re-randomizes the phase.
void apply_breaking_cap(ModeState& state, const CapPolicy& cap, Rng* rng);

struct ForcingSpec {
  double band_max = -1.0;  // force modes with |k| <= band_max; < 0 disables
  double amplitude = 0.0;  // action injection rate per forced mode
};

struct DampingSpec {
  double band_min = -1.0;  // damp modes with |k| >= band_min; < 0 disables
  double rate = 0.0;
};

struct IntegrateOptions {
  double dt = 1e-2;
  double t_end = 1.0;
  int sample_stride = 0;  // 0 -> only the endpoints
  CapPolicy cap;
  ForcingSpec forcing;
  DampingSpec damping;
};

struct IntegrateDiagnostics {
  double action_drift = 0.0;       // max relative over samples (free runs only)
  double hamiltonian_drift = 0.0;
  long steps = 0;
  bool conserving = true;  // false when forcing/damping/cap are active
};

using SampleObserver = std::function<void(long step, const ModeState&)>;

/// Fixed-step RK4 in the non-rotating variables.  rng is only touched by
/// forcing and the redistribute cap policy.
IntegrateDiagnostics integrate(const WaveModel& model, const QuadrupleTable& table,
                               ModeState& state, const IntegrateOptions& opts, Rng* rng = nullptr,
                               const SampleObserver& observer = {});

struct HistogramSpec {
  int bins = 40;
  double s_max_over_mean = 8.0;
  bool time_average = false;     // accumulate over samples after warmup
  double warmup_fraction = 0.5;  // of t_end, for time-averaged histograms
};

struct EnsembleRunSpec {
  explicit EnsembleRunSpec(WaveModel m) : model(std::move(m)) {}

  WaveModel model;
  RpaSampler sampler;
  IntegrateOptions integrate;
  long realizations = 100;
  uint64_t seed = 1;
  int threads = 1;
  std::vector<Eigen::Index> tracked_modes;
  HistogramSpec hist;
};

/// Raw and reduced statistics of an ensemble run.  Accumulation is
/// chunked in a fixed realization order, so results are bitwise
/// independent of the thread count.
struct EnsembleStats {
  Eigen::ArrayXd times;                   // sample times
  Eigen::ArrayXXd mean_intensity;         // samples x modes
  Eigen::ArrayXXd mean_intensity_stderr;  // same shape
  Eigen::ArrayXXcd initial_amplitude;     // realizations x modes
  Eigen::ArrayXXcd final_amplitude;       // realizations x modes
  std::vector<Eigen::Index> tracked_modes;
  std::vector<Histogram> tracked_histograms;  // aligned with tracked_modes
  long realizations = 0;
  double max_action_drift = 0.0;
  double max_hamiltonian_drift = 0.0;
  bool conserving = true;

  Eigen::Index tracked_slot(Eigen::Index mode) const;
  Eigen::ArrayXd final_intensity(Eigen::Index mode) const;
};

EnsembleStats run_ensemble(const EnsembleRunSpec& spec);

/// Normalized histogram of the final-time intensity at one mode, with
/// binomial standard errors; empty bins are reported, not hidden.
AmplitudePdf estimate_pdf(const EnsembleStats& stats, Eigen::Index mode,
                          const Eigen::ArrayXd& edges, Eigen::ArrayXd* stderr_out = nullptr,
                          std::vector<Eigen::Index>* empty_bins = nullptr);

struct GeneratingFunctionEstimate {
  Eigen::ArrayXd lambda;
  Eigen::ArrayXd z;
  Eigen::ArrayXd z_stderr;  // jackknife (= standard error of the mean)
};

/// Sample mean of e^{lambda s} at the final time; guards lambda s < 30.
GeneratingFunctionEstimate estimate_generating_function(const EnsembleStats& stats,
                                                        Eigen::Index mode,
                                                        const Eigen::ArrayXd& lambda_grid);

/// Sample moments <s^p>, p = 0..pmax, with standard errors.
void sample_moments(const EnsembleStats& stats, Eigen::Index mode, int pmax, Eigen::ArrayXd& moments,
                    Eigen::ArrayXd& stderr_out);

struct KineticSlopeSpec {
  explicit KineticSlopeSpec(WaveModel m) : model(std::move(m)) {}

  WaveModel model;  // epsilon is overridden per run
  RpaSampler sampler;
  std::vector<double> epsilons;
  double dt = 0.02;
  double t_window = 40.0;
  int samples = 9;
  long realizations = 1000;
  uint64_t seed = 1;
  int threads = 1;
};

struct KineticSlopeResult {
  std::vector<Eigen::ArrayXd> measured_slope;   // per epsilon, per mode
  std::vector<Eigen::ArrayXd> predicted_slope;  // broadened-sum secant prediction
  double scaling_exponent = 0.0;   // d ln slope / d ln eps
  double ratio = 0.0;              // aggregate slope(eps_last) / slope(eps_first)
  double prediction_agreement = 0.0;  // ||meas - pred||_2 / ||pred||_2, last epsilon
};

/// Early-time ensemble estimate of dn_k/dt across a list of epsilons,
/// with paired initial conditions, against the collision-module
/// prediction at matched averaging time.
KineticSlopeResult measure_kinetic_slope(const KineticSlopeSpec& spec);

/// Flat little-endian state file: magic "WTST", u32 version, u32 d,
/// u32 n, u64 modes, u64 realizations, then interleaved re/im doubles.
void save_states(const std::string& path, const SpectralGrid& grid,
                 const Eigen::ArrayXXcd& states);
Eigen::ArrayXXcd load_states(const std::string& path, int* dimension = nullptr, int* n = nullptr);

}  // namespace wtlab
