#include "wtlab/ensemble.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <mutex>
#include <thread>

#include "wtlab/kinetic.hpp"

namespace wtlab {

namespace {
using cd = std::complex<double>;
constexpr long long kQuadrupleLimit = 1'000'000'000;
constexpr long kChunk = 32;  // realizations per reduction chunk
}  // namespace

ModeState sample_rpa_field(const RpaSampler& sampler, Rng& rng) {
  const Eigen::Index modes = sampler.mean_intensity.size();
  ModeState state;
  state.c.resize(modes);
  for (Eigen::Index m = 0; m < modes; ++m) {
    const double n = sampler.mean_intensity[m];
    const double s = sampler.law == AmplitudeLaw::kRayleighIntensity ? rng.rayleigh_intensity(n) : n;
    const double theta = rng.phase();
    state.c[m] = std::sqrt(s) * cd(std::cos(theta), std::sin(theta));
  }
  return state;
}

Eigen::ArrayXd frequency_shift(const WaveModel& model, const ModeState& initial) {
  const SpectralGrid& grid = model.grid;
  const Eigen::Index modes = grid.mode_count();
  if (initial.c.size() != modes) throw std::invalid_argument("state size does not match grid");
  const double w0 = model.interaction.w0();
  Eigen::ArrayXd f(modes);
  for (Eigen::Index m = 0; m < modes; ++m) f[m] = model.interaction.mode_factor(grid.wavenumber(m));
  const Eigen::ArrayXd intensity = initial.c.array().abs2();
  const double weighted = (f * f * intensity).sum();
  Eigen::ArrayXd omega_shift(modes);
  for (Eigen::Index m = 0; m < modes; ++m)
    omega_shift[m] = 2.0 * model.epsilon * w0 * f[m] * f[m] * weighted;
  return omega_shift;
}

QuadrupleTable::QuadrupleTable(const WaveModel& model) {
  const SpectralGrid& grid = model.grid;
  modes_ = grid.mode_count();

  long long count = 0;
  for (Eigen::Index l = 0; l < modes_; ++l) {
    for (Eigen::Index a = 0; a < modes_; ++a) {
      const Eigen::Vector2i base = grid.index(l) + grid.index(a);
      for (Eigen::Index m = 0; m < modes_; ++m)
        if (grid.mode_at(base - grid.index(m)) >= 0) ++count;
    }
  }
  if (count > kQuadrupleLimit)
    throw std::invalid_argument("quadruple count exceeds 1e9; use a smaller grid");

  Eigen::ArrayXd f(modes_);
  for (Eigen::Index m = 0; m < modes_; ++m) f[m] = model.interaction.mode_factor(grid.wavenumber(m));
  const double w0 = model.interaction.w0();

  terms_.reserve(static_cast<size_t>(count));
  for (Eigen::Index l = 0; l < modes_; ++l) {
    for (Eigen::Index a = 0; a < modes_; ++a) {
      const Eigen::Vector2i base = grid.index(l) + grid.index(a);
      const double fla = f[l] * f[a];
      for (Eigen::Index m = 0; m < modes_; ++m) {
        const Eigen::Index nu = grid.mode_at(base - grid.index(m));
        if (nu < 0) continue;
        terms_.push_back(Term{int32_t(l), int32_t(a), int32_t(m), int32_t(nu),
                              w0 * fla * f[m] * f[nu]});
      }
    }
  }
}

void QuadrupleTable::nonlinear(const cd* c, cd* out) const {
  std::fill(out, out + modes_, cd(0.0, 0.0));
  for (const Term& t : terms_) out[t.l] += t.w * std::conj(c[t.a]) * c[t.m] * c[t.nu];
}

double QuadrupleTable::interaction_energy(const cd* c) const {
  cd sum(0.0, 0.0);
  for (const Term& t : terms_) sum += t.w * std::conj(c[t.l]) * std::conj(c[t.a]) * c[t.m] * c[t.nu];
  return 0.5 * sum.real();
}

void dynamical_rhs(const WaveModel& model, const QuadrupleTable& table, const ModeState& state,
                   Eigen::VectorXcd& out) {
  const Eigen::Index modes = table.modes();
  if (state.c.size() != modes) throw std::invalid_argument("state size does not match table");
  out.resize(modes);
  table.nonlinear(state.c.data(), out.data());
  const Eigen::ArrayXd omega = model.mode_frequencies();
  for (Eigen::Index m = 0; m < modes; ++m)
    out[m] = cd(0.0, -1.0) * (omega[m] * state.c[m] + model.epsilon * out[m]);
}

double hamiltonian(const WaveModel& model, const QuadrupleTable& table, const ModeState& state) {
  const Eigen::ArrayXd omega = model.mode_frequencies();
  const double quadratic = (omega * state.c.array().abs2()).sum();
  return quadratic + model.epsilon * table.interaction_energy(state.c.data());
}

void apply_breaking_cap(ModeState& state, const CapPolicy& cap, Rng* rng) {
  if (cap.kind == CapKind::kNone) return;
  if (!(cap.s_nl > 0.0)) throw std::invalid_argument("breaking cap needs s_nl > 0");
  for (Eigen::Index m = 0; m < state.c.size(); ++m) {
    const double s = std::norm(state.c[m]);
    if (s <= cap.s_nl) continue;
    if (cap.kind == CapKind::kClip) {
      state.c[m] *= std::sqrt(cap.s_nl / s);
    } else {
      if (!rng) throw std::invalid_argument("redistribute cap needs an rng");
      const double theta = rng->phase();
      state.c[m] = std::sqrt(cap.s_nl) * cd(std::cos(theta), std::sin(theta));
    }
  }
}

namespace {

struct Rk4Buffers {
  Eigen::VectorXcd k1, k2, k3, k4, tmp, nl;
  void resize(Eigen::Index n) {
    k1.resize(n);
    k2.resize(n);
    k3.resize(n);
    k4.resize(n);
    tmp.resize(n);
    nl.resize(n);
  }
};

// Fused RHS: out = -i (omega c + eps NL(c)).
inline void rhs_into(const QuadrupleTable& table, const Eigen::ArrayXd& omega, double eps,
                     const Eigen::VectorXcd& c, Eigen::VectorXcd& nl, Eigen::VectorXcd& out) {
  table.nonlinear(c.data(), nl.data());
  const Eigen::Index n = c.size();
  for (Eigen::Index m = 0; m < n; ++m) {
    const cd v = omega[m] * c[m] + eps * nl[m];
    out[m] = cd(v.imag(), -v.real());
  }
}

}  // namespace

IntegrateDiagnostics integrate(const WaveModel& model, const QuadrupleTable& table,
                               ModeState& state, const IntegrateOptions& opts, Rng* rng,
                               const SampleObserver& observer) {
  const Eigen::Index modes = table.modes();
  if (state.c.size() != modes) throw std::invalid_argument("state size does not match table");
  if (!(opts.dt > 0.0) || !(opts.t_end >= 0.0)) throw std::invalid_argument("bad time grid");

  const Eigen::ArrayXd omega = model.mode_frequencies();
  const double eps = model.epsilon;

  // Nonlinear-rotation guard; the linear scale is an accuracy choice left
  // to the caller but capped at the RK4 stability edge.
  const double shift_max = frequency_shift(model, state).abs().maxCoeff();
  if (opts.dt * shift_max >= 0.1)
    throw std::runtime_error("dt * max |Omega| exceeds the 0.1 nonlinear guard");
  if (opts.dt * omega.maxCoeff() > 2.0)
    throw std::runtime_error("dt * max omega exceeds the RK4 stability range");

  const bool forcing_on = opts.forcing.band_max >= 0.0 && opts.forcing.amplitude > 0.0;
  const bool damping_on = opts.damping.band_min >= 0.0 && opts.damping.rate > 0.0;
  const bool capping = opts.cap.kind != CapKind::kNone;
  if (forcing_on && !rng) throw std::invalid_argument("forcing needs an rng");

  std::vector<Eigen::Index> forced;
  Eigen::ArrayXd damp_factor;
  if (forcing_on)
    for (Eigen::Index m = 0; m < modes; ++m)
      if (model.grid.wavenumber(m) <= opts.forcing.band_max) forced.push_back(m);
  if (damping_on) {
    damp_factor = Eigen::ArrayXd::Ones(modes);
    for (Eigen::Index m = 0; m < modes; ++m)
      if (model.grid.wavenumber(m) >= opts.damping.band_min)
        damp_factor[m] = std::exp(-opts.damping.rate * opts.dt);
  }

  IntegrateDiagnostics diag;
  diag.conserving = !(forcing_on || damping_on || capping);
  const long steps = std::lround(opts.t_end / opts.dt);
  diag.steps = steps;

  const double action0 = state.total_action();
  const double h0 = diag.conserving ? hamiltonian(model, table, state) : 0.0;
  const auto observe = [&](long step) {
    if (diag.conserving && action0 > 0.0) {
      diag.action_drift =
          std::max(diag.action_drift, std::abs(state.total_action() / action0 - 1.0));
      const double h = hamiltonian(model, table, state);
      diag.hamiltonian_drift =
          std::max(diag.hamiltonian_drift, std::abs(h - h0) / std::max(std::abs(h0), 1e-300));
    }
    if (observer) observer(step, state);
  };

  observe(0);

  // Free fields rotate exactly; |b_l| is conserved bitwise.
  Eigen::VectorXcd free_rotation;
  if (eps == 0.0) {
    free_rotation.resize(modes);
    for (Eigen::Index m = 0; m < modes; ++m)
      free_rotation[m] = std::polar(1.0, -omega[m] * opts.dt);
  }

  Rk4Buffers buf;
  if (eps != 0.0) buf.resize(modes);
  const double dt = opts.dt;
  for (long step = 0; step < steps; ++step) {
    if (eps == 0.0) {
      state.c.array() *= free_rotation.array();
      state.time += dt;
      if (forcing_on) {
        const double scale = std::sqrt(0.5 * opts.forcing.amplitude * dt);
        for (const Eigen::Index m : forced) {
          const auto [g1, g2] = rng->normal_pair();
          state.c[m] += scale * cd(g1, g2);
        }
      }
      if (damping_on) state.c.array() *= damp_factor;
      if (capping && (step + 1) % opts.cap.cadence == 0) apply_breaking_cap(state, opts.cap, rng);
      const bool sampled = opts.sample_stride > 0 && (step + 1) % opts.sample_stride == 0;
      if (sampled || step + 1 == steps) observe(step + 1);
      continue;
    }
    rhs_into(table, omega, eps, state.c, buf.nl, buf.k1);
    buf.tmp = state.c + (0.5 * dt) * buf.k1;
    rhs_into(table, omega, eps, buf.tmp, buf.nl, buf.k2);
    buf.tmp = state.c + (0.5 * dt) * buf.k2;
    rhs_into(table, omega, eps, buf.tmp, buf.nl, buf.k3);
    buf.tmp = state.c + dt * buf.k3;
    rhs_into(table, omega, eps, buf.tmp, buf.nl, buf.k4);
    state.c += (dt / 6.0) * (buf.k1 + 2.0 * buf.k2 + 2.0 * buf.k3 + buf.k4);
    state.time += dt;

    if (forcing_on) {
      const double scale = std::sqrt(0.5 * opts.forcing.amplitude * dt);
      for (const Eigen::Index m : forced) {
        const auto [g1, g2] = rng->normal_pair();
        state.c[m] += scale * cd(g1, g2);
      }
    }
    if (damping_on) state.c.array() *= damp_factor;
    if (capping && (step + 1) % opts.cap.cadence == 0) apply_breaking_cap(state, opts.cap, rng);

    const bool sampled = opts.sample_stride > 0 && (step + 1) % opts.sample_stride == 0;
    if (sampled || step + 1 == steps) observe(step + 1);
  }
  return diag;
}

Eigen::Index EnsembleStats::tracked_slot(Eigen::Index mode) const {
  for (size_t i = 0; i < tracked_modes.size(); ++i)
    if (tracked_modes[i] == mode) return Eigen::Index(i);
  return -1;
}

Eigen::ArrayXd EnsembleStats::final_intensity(Eigen::Index mode) const {
  return final_amplitude.col(mode).abs2();
}

namespace {

std::vector<long> sample_steps_for(const IntegrateOptions& opts) {
  const long steps = std::lround(opts.t_end / opts.dt);
  std::vector<long> out{0};
  if (opts.sample_stride > 0)
    for (long s = opts.sample_stride; s < steps; s += opts.sample_stride) out.push_back(s);
  if (out.back() != steps) out.push_back(steps);
  return out;
}

struct ChunkPartial {
  Eigen::ArrayXXd sum_n;   // samples x modes
  Eigen::ArrayXXd sum_n2;  // samples x modes
  std::vector<Histogram> hists;
  double action_drift = 0.0;
  double hamiltonian_drift = 0.0;
};

}  // namespace

EnsembleStats run_ensemble(const EnsembleRunSpec& spec) {
  const QuadrupleTable table(spec.model);
  const Eigen::Index modes = table.modes();
  if (spec.sampler.mean_intensity.size() != modes)
    throw std::invalid_argument("sampler size does not match grid");
  if (spec.realizations < 1) throw std::invalid_argument("need at least one realization");

  const std::vector<long> sample_steps = sample_steps_for(spec.integrate);
  const Eigen::Index samples = Eigen::Index(sample_steps.size());
  const long chunks = (spec.realizations + kChunk - 1) / kChunk;

  // Histogram edges are fixed up front; with a breaking cap the ceiling
  // sets the scale, otherwise the sampler mean does.
  Eigen::ArrayXd hist_edges;
  if (!spec.tracked_modes.empty()) {
    double top;
    if (spec.integrate.cap.kind != CapKind::kNone) {
      top = 1.05 * spec.integrate.cap.s_nl;
    } else {
      top = spec.hist.s_max_over_mean * std::max(spec.sampler.mean_intensity.maxCoeff(), 1e-12);
    }
    hist_edges = Eigen::ArrayXd::LinSpaced(spec.hist.bins + 1, 0.0, top);
  }

  EnsembleStats stats;
  stats.realizations = spec.realizations;
  stats.tracked_modes = spec.tracked_modes;
  stats.initial_amplitude.resize(spec.realizations, modes);
  stats.final_amplitude.resize(spec.realizations, modes);
  stats.conserving = spec.integrate.cap.kind == CapKind::kNone &&
                     !(spec.integrate.forcing.band_max >= 0.0 && spec.integrate.forcing.amplitude > 0.0) &&
                     !(spec.integrate.damping.band_min >= 0.0 && spec.integrate.damping.rate > 0.0);

  std::vector<ChunkPartial> partials(static_cast<size_t>(chunks));
  const double warmup_time = spec.hist.warmup_fraction * spec.integrate.t_end;

  std::atomic<long> next_chunk{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  const auto worker = [&]() {
    try {
      for (;;) {
        const long chunk = next_chunk.fetch_add(1);
        if (chunk >= chunks || failed.load()) return;
        ChunkPartial part;
        part.sum_n = Eigen::ArrayXXd::Zero(samples, modes);
        part.sum_n2 = Eigen::ArrayXXd::Zero(samples, modes);
        for (size_t t = 0; t < spec.tracked_modes.size(); ++t)
          part.hists.emplace_back(hist_edges);

        const long lo = chunk * kChunk;
        const long hi = std::min(spec.realizations, lo + kChunk);
        for (long r = lo; r < hi; ++r) {
          Rng rng(derive_seed(spec.seed, uint64_t(r)));
          ModeState state = sample_rpa_field(spec.sampler, rng);
          stats.initial_amplitude.row(r) = state.c.array().transpose();

          Eigen::Index sample_slot = 0;
          const auto observer = [&](long step, const ModeState& s) {
            if (sample_slot < samples && step == sample_steps[size_t(sample_slot)]) {
              const Eigen::ArrayXd intensity = s.c.array().abs2();
              part.sum_n.row(sample_slot) += intensity.transpose();
              part.sum_n2.row(sample_slot) += intensity.transpose().square();
              ++sample_slot;
            }
            if (spec.hist.time_average && s.time >= warmup_time) {
              for (size_t t = 0; t < spec.tracked_modes.size(); ++t)
                part.hists[t].add(std::norm(s.c[spec.tracked_modes[t]]));
            }
          };

          const IntegrateDiagnostics diag =
              integrate(spec.model, table, state, spec.integrate, &rng, observer);
          part.action_drift = std::max(part.action_drift, diag.action_drift);
          part.hamiltonian_drift = std::max(part.hamiltonian_drift, diag.hamiltonian_drift);
          stats.final_amplitude.row(r) = state.c.array().transpose();
          if (!spec.hist.time_average) {
            for (size_t t = 0; t < spec.tracked_modes.size(); ++t)
              part.hists[t].add(std::norm(state.c[spec.tracked_modes[t]]));
          }
        }
        partials[size_t(chunk)] = std::move(part);
      }
    } catch (const std::exception& e) {
      std::scoped_lock lock(failure_mutex);
      failed.store(true);
      if (failure.empty()) failure = e.what();
    }
  };

  const int threads = std::max(1, spec.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw std::runtime_error("ensemble worker failed: " + failure);

  // Fixed-order reduction over chunks: results are independent of the
  // thread count, bit for bit.
  Eigen::ArrayXXd sum_n = Eigen::ArrayXXd::Zero(samples, modes);
  Eigen::ArrayXXd sum_n2 = Eigen::ArrayXXd::Zero(samples, modes);
  std::vector<Histogram> hists;
  for (size_t t = 0; t < spec.tracked_modes.size(); ++t) hists.emplace_back(hist_edges);
  for (const ChunkPartial& part : partials) {
    sum_n += part.sum_n;
    sum_n2 += part.sum_n2;
    stats.max_action_drift = std::max(stats.max_action_drift, part.action_drift);
    stats.max_hamiltonian_drift = std::max(stats.max_hamiltonian_drift, part.hamiltonian_drift);
    for (size_t t = 0; t < hists.size(); ++t) hists[t].merge(part.hists[t]);
  }

  const double r = double(spec.realizations);
  stats.times.resize(samples);
  for (Eigen::Index i = 0; i < samples; ++i)
    stats.times[i] = sample_steps[size_t(i)] * spec.integrate.dt;
  stats.mean_intensity = sum_n / r;
  stats.mean_intensity_stderr =
      ((sum_n2 / r - stats.mean_intensity.square()).max(0.0) / std::max(r - 1.0, 1.0)).sqrt();
  stats.tracked_histograms = std::move(hists);
  return stats;
}

AmplitudePdf estimate_pdf(const EnsembleStats& stats, Eigen::Index mode,
                          const Eigen::ArrayXd& edges, Eigen::ArrayXd* stderr_out,
                          std::vector<Eigen::Index>* empty_bins) {
  if (stats.realizations < 100) throw std::invalid_argument("pdf estimate needs >= 100 realizations");
  Histogram hist(edges);
  const Eigen::ArrayXd s = stats.final_intensity(mode);
  for (Eigen::Index r = 0; r < s.size(); ++r) hist.add(s[r]);

  AmplitudePdf pdf;
  pdf.edges = edges;
  pdf.density = hist.density();
  pdf.face_flux = Eigen::ArrayXd::Zero(edges.size());
  if (stderr_out) *stderr_out = hist.density_stderr();
  if (empty_bins) *empty_bins = hist.empty_bins();
  return pdf;
}

GeneratingFunctionEstimate estimate_generating_function(const EnsembleStats& stats,
                                                        Eigen::Index mode,
                                                        const Eigen::ArrayXd& lambda_grid) {
  const Eigen::ArrayXd s = stats.final_intensity(mode);
  const double s_max = s.maxCoeff();
  GeneratingFunctionEstimate out;
  out.lambda = lambda_grid;
  out.z.resize(lambda_grid.size());
  out.z_stderr.resize(lambda_grid.size());
  const double r = double(s.size());
  for (Eigen::Index i = 0; i < lambda_grid.size(); ++i) {
    const double lambda = lambda_grid[i];
    if (lambda * s_max >= 30.0)
      throw std::domain_error("lambda * max intensity >= 30: e^{lambda s} would overflow the estimate");
    const Eigen::ArrayXd e = (lambda * s).exp();
    const double mean = e.mean();
    out.z[i] = mean;
    // Jackknife variance of a sample mean reduces to the usual SEM.
    out.z_stderr[i] = std::sqrt(((e - mean).square().sum() / std::max(r - 1.0, 1.0)) / r);
  }
  return out;
}

void sample_moments(const EnsembleStats& stats, Eigen::Index mode, int pmax,
                    Eigen::ArrayXd& moments, Eigen::ArrayXd& stderr_out) {
  const Eigen::ArrayXd s = stats.final_intensity(mode);
  const double r = double(s.size());
  moments.resize(pmax + 1);
  stderr_out.resize(pmax + 1);
  moments[0] = 1.0;
  stderr_out[0] = 0.0;
  for (int p = 1; p <= pmax; ++p) {
    const Eigen::ArrayXd sp = s.pow(double(p));
    moments[p] = sp.mean();
    stderr_out[p] = std::sqrt((sp - moments[p]).square().sum() / std::max(r - 1.0, 1.0) / r);
  }
}

KineticSlopeResult measure_kinetic_slope(const KineticSlopeSpec& spec) {
  if (spec.epsilons.size() < 2) throw std::invalid_argument("need at least two epsilon values");
  if (spec.samples < 5) throw std::invalid_argument("slope fit needs at least 5 samples");

  KineticSlopeResult result;
  const Eigen::Index modes = spec.model.grid.mode_count();
  const Eigen::ArrayXd n0 = spec.sampler.mean_intensity;

  Eigen::ArrayXd times;
  for (double eps : spec.epsilons) {
    EnsembleRunSpec run(spec.model);
    run.model.epsilon = eps;
    run.sampler = spec.sampler;
    run.integrate.dt = spec.dt;
    run.integrate.t_end = spec.t_window;
    const long steps = std::lround(spec.t_window / spec.dt);
    run.integrate.sample_stride = int(std::max<long>(1, steps / (spec.samples - 1)));
    run.realizations = spec.realizations;
    run.seed = spec.seed;  // paired initial ensembles across epsilons
    run.threads = spec.threads;
    const EnsembleStats stats = run_ensemble(run);
    times = stats.times;

    Eigen::ArrayXd measured(modes);
    for (Eigen::Index m = 0; m < modes; ++m)
      measured[m] = fit_line(stats.times, stats.mean_intensity.col(m)).slope;
    result.measured_slope.push_back(measured);

    // Matched-T prediction: the broadened rates at averaging time t give
    // the exact order-eps^2 secant, n_k(t) = n0 + t (eta_t - gamma_t n0).
    Eigen::ArrayXXd predicted(times.size(), modes);
    predicted.row(0) = n0.transpose();
    for (Eigen::Index j = 1; j < times.size(); ++j) {
      const BroadenedKernel kernel(times[j]);
      const CollisionRates rates =
          collision_rates_discrete(run.model, Spectrum{n0}, kernel,
                                   GammaConvention::kEquilibriumConsistent);
      predicted.row(j) = (n0 + times[j] * (rates.eta - rates.gamma * n0)).transpose();
    }
    Eigen::ArrayXd pred_slope(modes);
    for (Eigen::Index m = 0; m < modes; ++m)
      pred_slope[m] = fit_line(times, predicted.col(m)).slope;
    result.predicted_slope.push_back(pred_slope);
  }

  // Aggregate along the predicted direction (matched filter); noise on
  // modes with negligible predicted transfer is diluted.
  const Eigen::ArrayXd& pref = result.predicted_slope.back();
  const double pref_norm = std::sqrt((pref * pref).sum());
  Eigen::ArrayXd aggregates(Eigen::Index(spec.epsilons.size()));
  for (size_t e = 0; e < spec.epsilons.size(); ++e)
    aggregates[Eigen::Index(e)] = (result.measured_slope[e] * pref).sum() / pref_norm;

  result.ratio = aggregates[aggregates.size() - 1] / aggregates[0];
  Eigen::ArrayXd log_eps(aggregates.size()), log_slope(aggregates.size());
  for (Eigen::Index e = 0; e < aggregates.size(); ++e) {
    log_eps[e] = std::log(spec.epsilons[size_t(e)]);
    log_slope[e] = std::log(std::abs(aggregates[e]));
  }
  result.scaling_exponent = fit_line(log_eps, log_slope).slope;

  const Eigen::ArrayXd diff = result.measured_slope.back() - pref;
  result.prediction_agreement = std::sqrt((diff * diff).sum()) / pref_norm;
  return result;
}

void save_states(const std::string& path, const SpectralGrid& grid,
                 const Eigen::ArrayXXcd& states) {
  static_assert(std::endian::native == std::endian::little, "state files are little-endian");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open state file for writing: " + path);
  const char magic[4] = {'W', 'T', 'S', 'T'};
  const uint32_t version = 1;
  const uint32_t d = uint32_t(grid.dimension());
  const uint32_t n = uint32_t(grid.modes_per_dimension());
  const uint64_t mode_count = uint64_t(states.cols());
  const uint64_t realizations = uint64_t(states.rows());
  out.write(magic, 4);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&d), 4);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&mode_count), 8);
  out.write(reinterpret_cast<const char*>(&realizations), 8);
  for (Eigen::Index r = 0; r < states.rows(); ++r) {
    for (Eigen::Index m = 0; m < states.cols(); ++m) {
      const double re = states(r, m).real();
      const double im = states(r, m).imag();
      out.write(reinterpret_cast<const char*>(&re), 8);
      out.write(reinterpret_cast<const char*>(&im), 8);
    }
  }
  if (!out) throw std::runtime_error("failed writing state file: " + path);
}

Eigen::ArrayXXcd load_states(const std::string& path, int* dimension, int* n_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open state file: " + path);
  char magic[4];
  uint32_t version = 0, d = 0, n = 0;
  uint64_t mode_count = 0, realizations = 0;
  in.read(magic, 4);
  if (std::memcmp(magic, "WTST", 4) != 0) throw std::runtime_error("bad state file magic");
  in.read(reinterpret_cast<char*>(&version), 4);
  if (version != 1) throw std::runtime_error("unsupported state file version");
  in.read(reinterpret_cast<char*>(&d), 4);
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&mode_count), 8);
  in.read(reinterpret_cast<char*>(&realizations), 8);
  const Eigen::Index n_rows = Eigen::Index(realizations);
  const Eigen::Index n_cols = Eigen::Index(mode_count);
  Eigen::ArrayXXcd states(n_rows, n_cols);
  for (Eigen::Index r = 0; r < states.rows(); ++r) {
    for (Eigen::Index m = 0; m < states.cols(); ++m) {
      double re = 0.0, im = 0.0;
      in.read(reinterpret_cast<char*>(&re), 8);
      in.read(reinterpret_cast<char*>(&im), 8);
      states(r, m) = cd(re, im);
    }
  }
  if (!in) throw std::runtime_error("truncated state file: " + path);
  if (dimension) *dimension = int(d);
  if (n_out) *n_out = int(n);
  return states;
}

}  // namespace wtlab
