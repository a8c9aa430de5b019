#include "wtlab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "wtlab/compare.hpp"
#include "wtlab/csv.hpp"
#include "wtlab/ensemble.hpp"
#include "wtlab/expint.hpp"
#include "wtlab/kinetic.hpp"
#include "wtlab/pdf.hpp"

namespace wtlab {

namespace fs = std::filesystem;

WaveModel model_from_config(const ExperimentConfig& cfg) {
  const std::string dk = cfg.text("dispersion.kind", "power_law");
  DispersionLaw law = dk == "deep_water_gravity"
                          ? DispersionLaw::deep_water_gravity(cfg.number("dispersion.g", 9.81))
                          : DispersionLaw::power_law(cfg.number("dispersion.c", 1.0),
                                                     cfg.number("dispersion.alpha", 0.5));
  if (dk != "power_law" && dk != "deep_water_gravity")
    throw ConfigError("key 'dispersion.kind': unknown value '" + dk + "'", 0, 0);

  const std::string ik = cfg.text("interaction.kind", "constant");
  InteractionModel inter = ik == "product_power"
                               ? InteractionModel::product_power(cfg.number("interaction.w0", 1.0),
                                                                 cfg.number("interaction.beta", 0.0))
                               : InteractionModel::constant(cfg.number("interaction.w0", 1.0));
  if (ik != "constant" && ik != "product_power")
    throw ConfigError("key 'interaction.kind': unknown value '" + ik + "'", 0, 0);

  SpectralGrid grid = SpectralGrid::symmetric(int(cfg.integer("grid.d", 1)),
                                              int(cfg.integer("grid.n", 16)),
                                              cfg.number("grid.length", 2.0 * std::numbers::pi));
  return WaveModel{std::move(grid), law, inter, cfg.number("epsilon", 0.1)};
}

std::function<double(double)> spectrum_profile_from_config(const ExperimentConfig& cfg,
                                                           const WaveModel& model) {
  const std::string kind = cfg.text("spectrum.kind", "lorentzian");
  const double a = cfg.number("spectrum.amplitude", 1.0);
  const double k0 = cfg.number("spectrum.k0", 1.0);
  const double p = cfg.number("spectrum.exponent", 2.0);
  double kc = cfg.number("spectrum.kc", 0.0);
  if (kc <= 0.0)
    kc = 0.5 * model.grid.spacing() * (model.grid.modes_per_dimension() / 2);
  if (kind == "constant") return [a](double) { return a; };
  if (kind == "lorentzian")
    return [a, k0](double k) { return a / (1.0 + (k / k0) * (k / k0)); };
  if (kind == "power_gauss")
    return [a, k0, p, kc](double k) {
      return a * std::pow(1.0 + (k / k0) * (k / k0), -0.5 * p) * std::exp(-(k / kc) * (k / kc));
    };
  throw ConfigError("key 'spectrum.kind': unknown value '" + kind + "'", 0, 0);
}

GammaConvention gamma_convention_from_config(const ExperimentConfig& cfg) {
  const std::string c = cfg.text("collision.gamma_convention", "equilibrium");
  if (c == "equilibrium") return GammaConvention::kEquilibriumConsistent;
  if (c == "paper") return GammaConvention::kPaperLiteral;
  throw ConfigError("key 'collision.gamma_convention': unknown value '" + c + "'", 0, 0);
}

namespace {

double averaging_time_from_config(const ExperimentConfig& cfg, const WaveModel& model,
                                  RunManifest& manifest) {
  const AveragingWindow window = default_averaging_window(model);
  double t = cfg.number("collision.t", 0.0);
  if (t <= 0.0) t = window.chosen;
  manifest.set_flag("averaging_window_lower", format_double(window.lower));
  manifest.set_flag("averaging_window_upper", format_double(window.upper));
  manifest.set_flag("averaging_time", format_double(t));
  return t;
}

std::vector<Eigen::Index> tracked_modes_from_config(const ExperimentConfig& cfg,
                                                    const SpectralGrid& grid) {
  std::vector<Eigen::Index> modes;
  const std::string raw = cfg.text("ensemble.track_k", "");
  if (raw.empty()) {
    const int half = grid.modes_per_dimension() / 2;
    const Eigen::Index mid = grid.mode_at(Eigen::Vector2i(std::max(1, half / 2), 0));
    modes.push_back(mid >= 0 ? mid : grid.origin());
    return modes;
  }
  std::stringstream ss(raw);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto colon = cell.find(':');
    Eigen::Vector2i idx(0, 0);
    idx.x() = std::stoi(cell.substr(0, colon));
    if (colon != std::string::npos) idx.y() = std::stoi(cell.substr(colon + 1));
    const Eigen::Index m = grid.mode_at(idx);
    if (m < 0) throw ConfigError("key 'ensemble.track_k': mode off grid: '" + cell + "'", 0, 0);
    modes.push_back(m);
  }
  return modes;
}

int finish(RunManifest& manifest, const std::string& out_dir,
           std::chrono::steady_clock::time_point started) {
  manifest.set_wall_clock(
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count());
  manifest.write(out_dir);
  return manifest.all_passed() ? 0 : 2;
}

// ----- rates ---------------------------------------------------------------

int run_rates(const ExperimentConfig& cfg, const std::string& out, RunManifest& manifest,
              std::chrono::steady_clock::time_point started) {
  const WaveModel model = model_from_config(cfg);
  const auto profile = spectrum_profile_from_config(cfg, model);
  const Spectrum spectrum = Spectrum::from_profile(model.grid, profile);
  const GammaConvention convention = gamma_convention_from_config(cfg);
  const double t_avg = averaging_time_from_config(cfg, model, manifest);
  manifest.set_flag("gamma_convention", to_string(convention));
  manifest.set_flag("discrete_normalization_constant", "1");

  const CollisionRates rates =
      collision_rates_discrete(model, spectrum, BroadenedKernel(t_avg), convention);

  const bool continuum = cfg.flag("collision.continuum", false);
  QuadratureSpec quad;
  quad.outer_nodes = int(cfg.integer("collision.quad_nodes", 2048));
  quad.scan_nodes = int(cfg.integer("collision.scan_nodes", 1024));
  quad.root_tolerance = cfg.number("collision.root_tol", 1e-12);

  const std::string path = out + "/rates.csv";
  std::vector<std::string> cols = {"k", "eta", "gamma", "convention", "T"};
  if (continuum) {
    cols.push_back("eta_continuum");
    cols.push_back("gamma_continuum");
  }
  CsvWriter csv(path, cols);
  QuadratureDiagnostics qdiag;
  for (Eigen::Index m = 0; m < model.grid.mode_count(); ++m) {
    std::vector<std::string> row = {format_double(model.grid.wavenumber(m)),
                                    format_double(rates.eta[m]), format_double(rates.gamma[m]),
                                    to_string(convention), format_double(t_avg)};
    if (continuum) {
      const double k = model.grid.wavenumber(m);
      row.push_back(format_double(eta_continuum(model, k, profile, quad, &qdiag)));
      row.push_back(format_double(gamma_continuum(model, k, profile, quad, convention, &qdiag)));
    }
    csv.raw_row(row);
  }
  csv.close();
  manifest.add_file(path);
  if (continuum)
    manifest.set_flag("near_singular_roots", std::to_string(qdiag.near_singular_roots));

  manifest.add_check("eta_nonnegative", (rates.eta >= 0.0).all(), rates.eta.minCoeff(), 0.0);
  if (cfg.text("spectrum.kind", "lorentzian") == "constant") {
    const double residual =
        ((rates.eta - rates.gamma * spectrum.n).abs() / rates.eta.maxCoeff()).maxCoeff();
    manifest.add_check("equilibrium_nullity", residual <= 1e-10, residual, 1e-10);
  }
  return finish(manifest, out, started);
}

// ----- kinetic / moments ---------------------------------------------------

int run_kinetic(const ExperimentConfig& cfg, const std::string& out, RunManifest& manifest,
                std::chrono::steady_clock::time_point started) {
  const WaveModel model = model_from_config(cfg);
  const Spectrum initial = Spectrum::from_profile(model.grid, spectrum_profile_from_config(cfg, model));
  KineticEvolveOptions opts;
  opts.dt = cfg.number("kinetic.dt", 1e-3);
  opts.t_end = cfg.number("kinetic.t_end", 1.0);
  opts.sample_stride = int(cfg.integer("kinetic.sample_stride", 10));
  opts.convention = gamma_convention_from_config(cfg);
  opts.averaging_time = averaging_time_from_config(cfg, model, manifest);

  const SpectrumTrajectory traj = evolve_spectrum(model, initial, opts);

  const std::string path = out + "/spectrum_trajectory.csv";
  CsvWriter csv(path, {"t", "k", "n"});
  for (Eigen::Index i = 0; i < traj.times.size(); ++i)
    for (Eigen::Index m = 0; m < model.grid.mode_count(); ++m)
      csv.row({traj.times[i], model.grid.wavenumber(m), traj.n[size_t(i)][m]});
  csv.close();
  manifest.add_file(path);
  manifest.set_flag("clipped_steps", std::to_string(traj.clipped_steps));
  manifest.add_check("action_nonnegative", (traj.n.back() >= 0.0).all(), traj.n.back().minCoeff(),
                     0.0);
  return finish(manifest, out, started);
}

int run_moments(const ExperimentConfig& cfg, const std::string& out, RunManifest& manifest,
                std::chrono::steady_clock::time_point started) {
  const WaveModel model = model_from_config(cfg);
  const Spectrum spectrum = Spectrum::from_profile(model.grid, spectrum_profile_from_config(cfg, model));
  const double t_avg = averaging_time_from_config(cfg, model, manifest);
  const CollisionRates rates = collision_rates_discrete(
      model, spectrum, BroadenedKernel(t_avg), gamma_convention_from_config(cfg));

  const int pmax = int(cfg.integer("kinetic.pmax", 4));
  const MomentVector initial = MomentVector::gaussian(spectrum.n, pmax);
  const MomentTrajectory traj =
      evolve_moments(initial, RateSchedule::constant(rates), cfg.number("kinetic.dt", 1e-3),
                     cfg.number("kinetic.t_end", 1.0), int(cfg.integer("kinetic.sample_stride", 10)));

  const std::string path = out + "/moments_trajectory.csv";
  CsvWriter csv(path, {"t", "k", "p", "M"});
  for (Eigen::Index i = 0; i < traj.times.size(); ++i)
    for (Eigen::Index m = 0; m < model.grid.mode_count(); ++m)
      for (int p = 0; p <= pmax; ++p)
        csv.row({traj.times[i], model.grid.wavenumber(m), double(p), traj.moments[size_t(i)].m(p, m)});
  csv.close();
  manifest.add_file(path);

  const double m0_err = (traj.moments.back().m.row(0) - 1.0).abs().maxCoeff();
  manifest.add_check("normalization_row_constant", m0_err <= 1e-12, m0_err, 1e-12);
  return finish(manifest, out, started);
}

// ----- pdf -----------------------------------------------------------------

Eigen::ArrayXd pdf_edges_from_config(const ExperimentConfig& cfg, double n, double s_max) {
  const int cells = int(cfg.integer("pdf.cells", 400));
  const double first = cfg.number("pdf.first_cell_over_n", 0.02) * n;
  return geometric_intensity_edges(cells, s_max, first);
}

int run_pdf_steady(const ExperimentConfig& cfg, const std::string& out, RunManifest& manifest,
                   std::chrono::steady_clock::time_point started) {
  const double n = cfg.number("pdf.n", 1.0);
  const double gamma = cfg.number("pdf.gamma", 1.0);
  double eta = cfg.number("pdf.eta", 0.0);
  if (eta <= 0.0) eta = gamma * n;
  const std::string boundary = cfg.text("pdf.boundary", "zero_flux");

  if (boundary == "cutoff") {
    const double s_nl = cfg.number("pdf.snl_over_n", 100.0) * n;
    const Eigen::ArrayXd edges = pdf_edges_from_config(cfg, n, s_nl);
    CutoffSteadyDiagnostics diag;
    const AmplitudePdf pdf = steady_pdf_with_cutoff(edges, n, gamma, eta, s_nl,
                                                    cfg.number("pdf.sink_rate", -1.0), &diag);
    const std::string path = out + "/pdf_steady.csv";
    CsvWriter csv(path, {"s", "P", "F"});
    const Eigen::ArrayXd centers = pdf.centers();
    for (Eigen::Index i = 0; i < pdf.cells(); ++i)
      csv.row({centers[i], pdf.density[i], 0.5 * (pdf.face_flux[i] + pdf.face_flux[i + 1])});
    csv.close();
    manifest.add_file(path);

    manifest.add_check("normalization", std::abs(pdf.mass() - 1.0) <= 1e-10,
                       std::abs(pdf.mass() - 1.0), 1e-10);
    manifest.add_check("sink_leakage_balance", diag.balance_error <= 1e-8, diag.balance_error, 1e-8);
    if (diag.tail_window_warning) manifest.set_flag("tail_window_warning", "s_nl < 5 n");
    if (s_nl >= 100.0 * n) {
      const LogSlopeFit fit = fit_log_slope(centers, pdf.density, 10.0 * n, 0.8 * s_nl);
      manifest.add_check("tail_exponent_near_minus_one", std::abs(fit.slope + 1.0) <= 0.15,
                         fit.slope, -1.0);
    }
    const CutoffReadingResiduals readings = cutoff_closed_form_residuals(n, gamma, eta, s_nl);
    manifest.set_flag("printed_reading_residual_ei_shifted",
                      format_double(readings.ei_of_shifted_argument));
    manifest.set_flag("printed_reading_residual_ei_minus_log",
                      format_double(readings.ei_minus_log));
    return finish(manifest, out, started);
  }

  // Flux-free or finite-flux closed form on a geometric grid.
  const double flux = cfg.number("pdf.flux", 0.0);
  const double c = cfg.number("pdf.c", 1.0 / n);
  const double s_max = cfg.number("pdf.smax_over_n", 60.0) * n;
  const Eigen::ArrayXd edges = pdf_edges_from_config(cfg, n, s_max);

  AmplitudePdf pdf;
  if (flux == 0.0) {
    pdf = rayleigh_cell_centered(edges, n);
    if (c != 1.0 / n) manifest.set_flag("homogeneous_constant", "normalization enforced");
  } else {
    pdf.edges = edges;
    pdf.density.resize(edges.size() - 1);
    const FluxSolution sol(n, eta, gamma, flux, c);
    const Eigen::ArrayXd centers = pdf.centers();
    for (Eigen::Index i = 0; i < pdf.cells(); ++i)
      pdf.density[i] = steady_pdf_finite_flux(centers[i], sol);
    pdf.face_flux = Eigen::ArrayXd::Constant(edges.size(), flux);
  }

  const std::string path = out + "/pdf_steady.csv";
  CsvWriter csv(path, {"s", "P", "F"});
  const Eigen::ArrayXd centers = pdf.centers();
  for (Eigen::Index i = 0; i < pdf.cells(); ++i) csv.row({centers[i], pdf.density[i], flux});
  csv.close();
  manifest.add_file(path);

  if (flux == 0.0) {
    manifest.add_check("normalization", std::abs(pdf.mass() - 1.0) <= 1e-12,
                       std::abs(pdf.mass() - 1.0), 1e-12);
  } else {
    // Spot-check the flux identity by numerical differentiation.
    const FluxSolution sol(n, eta, gamma, flux, c);
    double worst = 0.0;
    for (double s : {0.5 * n, 2.0 * n, 10.0 * n}) {
      const double h = 1e-3 * s;
      const double dp = (steady_pdf_finite_flux(s + h, sol) - steady_pdf_finite_flux(s - h, sol)) /
                        (2.0 * h);
      worst = std::max(worst,
                       std::abs(flux_of(steady_pdf_finite_flux(s, sol), dp, s, gamma, eta) - flux));
    }
    manifest.add_check("flux_identity", worst <= 1e-8 * std::abs(flux) + 1e-12, worst, 1e-8);
  }
  return finish(manifest, out, started);
}

int run_pdf_evolve(const ExperimentConfig& cfg, const std::string& out, RunManifest& manifest,
                   std::chrono::steady_clock::time_point started) {
  const double n = cfg.number("pdf.n", 1.0);
  const double gamma = cfg.number("pdf.gamma", 1.0);
  double eta = cfg.number("pdf.eta", 0.0);
  if (eta <= 0.0) eta = gamma * n;
  const std::string boundary = cfg.text("pdf.boundary", "zero_flux");
  const bool cutoff = boundary == "cutoff";
  if (!cutoff && boundary != "zero_flux")
    throw ConfigError("key 'pdf.boundary': unknown value '" + boundary + "'", 0, 0);

  const double s_max = cutoff ? cfg.number("pdf.snl_over_n", 20.0) * n
                              : cfg.number("pdf.smax_over_n", 60.0) * n;
  const Eigen::ArrayXd edges = pdf_edges_from_config(cfg, n, s_max);
  const AmplitudePdf initial = rayleigh_cell_centered(edges, n);

  PdfEvolveOptions opts;
  opts.boundary = cutoff ? PdfBoundary::kBreakingCutoff : PdfBoundary::kZeroFlux;
  opts.t_end = cfg.number("pdf.t_end", 10.0);
  opts.breaking_rate = cfg.number("pdf.sink_rate", -1.0);
  opts.dt = cfg.number("pdf.dt", 0.0);
  if (opts.dt <= 0.0) opts.dt = 0.5 * pdf_cfl_limit(initial, gamma, eta);
  opts.sample_stride = int(cfg.integer("pdf.sample_stride", 0));
  if (opts.sample_stride <= 0)
    opts.sample_stride = std::max(1L, std::lround(opts.t_end / opts.dt) / 10);

  const PdfTrajectory traj = evolve_pdf(initial, gamma, eta, opts);

  const std::string evo_path = out + "/pdf_evolution.csv";
  CsvWriter evo(evo_path, {"t", "s", "P"});
  const Eigen::ArrayXd centers = initial.centers();
  for (Eigen::Index i = 0; i < traj.times.size(); ++i)
    for (Eigen::Index j = 0; j < centers.size(); ++j)
      evo.row({traj.times[i], centers[j], traj.density[size_t(i)][j]});
  evo.close();
  manifest.add_file(evo_path);

  const std::string fin_path = out + "/pdf_final.csv";
  CsvWriter fin(fin_path, {"s", "P", "F"});
  for (Eigen::Index j = 0; j < centers.size(); ++j)
    fin.row({centers[j], traj.final.density[j],
             0.5 * (traj.final.face_flux[j] + traj.final.face_flux[j + 1])});
  fin.close();
  manifest.add_file(fin_path);

  const double drift = std::abs(traj.mass[traj.mass.size() - 1] - traj.mass[0]);
  manifest.add_check("mass_conserved", drift <= 1e-12 * std::max(1.0, opts.t_end), drift,
                     1e-12 * std::max(1.0, opts.t_end));
  manifest.add_check("positivity", traj.min_density >= -1e-12, traj.min_density, -1e-12);
  if (cutoff)
    manifest.set_flag("recycled_probability", format_double(traj.sink_total));
  return finish(manifest, out, started);
}

// ----- ensemble ------------------------------------------------------------

EnsembleRunSpec ensemble_spec_from_config(const ExperimentConfig& cfg, const RunOverrides& over,
                                          RunManifest& manifest) {
  EnsembleRunSpec spec(model_from_config(cfg));
  const auto profile = spectrum_profile_from_config(cfg, spec.model);
  spec.sampler.mean_intensity = Spectrum::from_profile(spec.model.grid, profile).n;
  const std::string law = cfg.text("ensemble.amplitude_law", "rayleigh");
  if (law == "rayleigh") {
    spec.sampler.law = AmplitudeLaw::kRayleighIntensity;
  } else if (law == "deterministic") {
    spec.sampler.law = AmplitudeLaw::kDeterministic;
  } else {
    throw ConfigError("key 'ensemble.amplitude_law': unknown value '" + law + "'", 0, 0);
  }

  spec.realizations = cfg.integer("ensemble.realizations", 100);
  spec.seed = over.seed.value_or(cfg.seed());
  spec.threads = over.threads.value_or(int(cfg.integer("threads", 1)));
  spec.integrate.t_end = cfg.number("ensemble.t_end", 10.0);
  spec.integrate.dt = cfg.number("ensemble.dt", 0.0);
  if (spec.integrate.dt <= 0.0)
    spec.integrate.dt = 0.1 / spec.model.mode_frequencies().maxCoeff();
  spec.integrate.sample_stride = int(cfg.integer("ensemble.sample_stride", 0));
  if (spec.integrate.sample_stride <= 0)
    spec.integrate.sample_stride =
        int(std::max(1L, std::lround(spec.integrate.t_end / spec.integrate.dt) / 8));
  spec.tracked_modes = tracked_modes_from_config(cfg, spec.model.grid);
  spec.hist.bins = int(cfg.integer("ensemble.hist_bins", 40));
  spec.hist.s_max_over_mean = cfg.number("ensemble.hist_smax_over_n", 8.0);

  manifest.set_flag("seed", std::to_string(spec.seed));
  manifest.set_flag("realizations", std::to_string(spec.realizations));
  manifest.set_flag("dt", format_double(spec.integrate.dt));
  manifest.set_flag("scheme", "rk4_nonrotating");
  return spec;
}

void write_ensemble_outputs(const ExperimentConfig& cfg, const std::string& out,
                            const WaveModel& model, const EnsembleStats& stats,
                            RunManifest& manifest) {
  const std::string traj_path = out + "/ensemble_trajectory.csv";
  CsvWriter traj(traj_path, {"t", "k", "n", "n_stderr"});
  for (Eigen::Index i = 0; i < stats.times.size(); ++i)
    for (Eigen::Index m = 0; m < model.grid.mode_count(); ++m)
      traj.row({stats.times[i], model.grid.wavenumber(m), stats.mean_intensity(i, m),
                stats.mean_intensity_stderr(i, m)});
  traj.close();
  manifest.add_file(traj_path);

  for (size_t t = 0; t < stats.tracked_modes.size(); ++t) {
    const Eigen::Index mode = stats.tracked_modes[t];
    const Histogram& hist = stats.tracked_histograms[t];
    const std::string hist_path =
        out + "/histogram_mode" + std::to_string(mode) + ".csv";
    CsvWriter hcsv(hist_path, {"s", "P", "P_stderr"});
    const Eigen::ArrayXd density = hist.density();
    const Eigen::ArrayXd err = hist.density_stderr();
    const Eigen::ArrayXd& edges = hist.edges();
    for (Eigen::Index b = 0; b < hist.bins(); ++b)
      hcsv.row({0.5 * (edges[b] + edges[b + 1]), density[b], err[b]});
    hcsv.close();
    manifest.add_file(hist_path);
  }
}

int run_ensemble_experiment(const ExperimentConfig& cfg, const std::string& out,
                            const RunOverrides& over, RunManifest& manifest,
                            std::chrono::steady_clock::time_point started) {
  EnsembleRunSpec spec = ensemble_spec_from_config(cfg, over, manifest);
  const EnsembleStats stats = run_ensemble(spec);
  write_ensemble_outputs(cfg, out, spec.model, stats, manifest);

  // Generating-function estimates at the tracked modes.
  const int lambda_count = int(cfg.integer("ensemble.lambda_count", 6));
  const double lambda_n_max = cfg.number("ensemble.lambda_n_max", 0.5);
  for (const Eigen::Index mode : spec.tracked_modes) {
    const double n = std::max(spec.sampler.mean_intensity[mode], 1e-12);
    const Eigen::ArrayXd lambdas =
        Eigen::ArrayXd::LinSpaced(lambda_count, 0.0, lambda_n_max / n);
    const GeneratingFunctionEstimate z = estimate_generating_function(stats, mode, lambdas);
    const std::string z_path = out + "/z_mode" + std::to_string(mode) + ".csv";
    CsvWriter zcsv(z_path, {"lambda", "Z", "Z_stderr"});
    for (Eigen::Index i = 0; i < lambdas.size(); ++i) zcsv.row({z.lambda[i], z.z[i], z.z_stderr[i]});
    zcsv.close();
    manifest.add_file(z_path);
  }

  if (cfg.flag("ensemble.save_states", false)) {
    const std::string states_path = out + "/final_states.bin";
    save_states(states_path, spec.model.grid, stats.final_amplitude);
    manifest.add_file(states_path);
  }

  if (stats.conserving) {
    manifest.add_check("action_drift", stats.max_action_drift <= 1e-6, stats.max_action_drift, 1e-6);
    manifest.add_check("hamiltonian_drift", stats.max_hamiltonian_drift <= 1e-6,
                       stats.max_hamiltonian_drift, 1e-6);
  }
  return finish(manifest, out, started);
}

int run_cap_experiment(const ExperimentConfig& cfg, const std::string& out,
                       const RunOverrides& over, RunManifest& manifest,
                       std::chrono::steady_clock::time_point started) {
  EnsembleRunSpec spec(model_from_config(cfg));
  const auto profile = spectrum_profile_from_config(cfg, spec.model);
  spec.sampler.mean_intensity = Spectrum::from_profile(spec.model.grid, profile).n;
  spec.sampler.law = AmplitudeLaw::kRayleighIntensity;
  spec.realizations = cfg.integer("cap.realizations", 8);
  spec.seed = over.seed.value_or(cfg.seed());
  spec.threads = over.threads.value_or(int(cfg.integer("threads", 1)));

  spec.integrate.t_end = cfg.number("cap.t_end", 2000.0);
  spec.integrate.dt = cfg.number("cap.dt", 0.0);
  if (spec.integrate.dt <= 0.0) spec.integrate.dt = 0.1 / spec.model.mode_frequencies().maxCoeff();
  spec.integrate.sample_stride = 50;
  spec.integrate.cap.s_nl = cfg.number("cap.snl", 10.0);
  const std::string policy = cfg.text("cap.policy", "clip");
  if (policy == "clip") {
    spec.integrate.cap.kind = CapKind::kClip;
  } else if (policy == "redistribute") {
    spec.integrate.cap.kind = CapKind::kRedistribute;
  } else if (policy == "none") {
    spec.integrate.cap.kind = CapKind::kNone;
  } else {
    throw ConfigError("key 'cap.policy': unknown value '" + policy + "'", 0, 0);
  }
  spec.integrate.cap.cadence = int(cfg.integer("cap.cadence", 1));
  spec.integrate.forcing.band_max = cfg.number("forcing.band_max", 1.0);
  spec.integrate.forcing.amplitude = cfg.number("forcing.amplitude", 0.05);
  spec.integrate.damping.band_min = cfg.number("damping.band_min", -1.0);
  spec.integrate.damping.rate = cfg.number("damping.rate", 0.0);

  const int probe_index = int(cfg.integer("cap.probe_k", spec.model.grid.modes_per_dimension() / 4));
  const Eigen::Index probe = spec.model.grid.mode_at(Eigen::Vector2i(probe_index, 0));
  const Eigen::Index probe_neg = spec.model.grid.mode_at(Eigen::Vector2i(-probe_index, 0));
  if (probe < 0) throw ConfigError("key 'cap.probe_k': probe mode off grid", 0, 0);
  spec.tracked_modes = {probe, probe_neg};
  spec.hist.bins = int(cfg.integer("cap.hist_bins", 60));
  spec.hist.time_average = true;
  spec.hist.warmup_fraction = cfg.number("cap.warmup_fraction", 0.5);

  manifest.set_flag("seed", std::to_string(spec.seed));
  manifest.set_flag("cap_policy", policy);
  manifest.set_flag("probe_mode_index", std::to_string(probe_index));
  manifest.set_flag("amplitude_normalization", "measured steady mean action at the probe");

  const EnsembleStats stats = run_ensemble(spec);
  write_ensemble_outputs(cfg, out, spec.model, stats, manifest);

  // Pool the +-k probe histograms; the steady mean comes from the
  // time-averaged trajectory over the post-warmup window.
  Histogram pooled = stats.tracked_histograms[0];
  pooled.merge(stats.tracked_histograms[1]);
  double n_meas = 0.0;
  long n_count = 0;
  for (Eigen::Index i = 0; i < stats.times.size(); ++i) {
    if (stats.times[i] < spec.hist.warmup_fraction * spec.integrate.t_end) continue;
    n_meas += stats.mean_intensity(i, probe) + stats.mean_intensity(i, probe_neg);
    n_count += 2;
  }
  n_meas /= std::max(1L, n_count);
  manifest.set_flag("probe_mean_action", format_double(n_meas));

  const Eigen::ArrayXd density = pooled.density();
  const Eigen::ArrayXd err = pooled.density_stderr();
  const Eigen::ArrayXd& edges = pooled.edges();
  const double s_over_n = cfg.number("cap.s_over_n", 8.0);
  const double threshold = cfg.number("cap.excess_threshold", 10.0);

  const std::string hist_path = out + "/cap_histogram.csv";
  CsvWriter hcsv(hist_path, {"s", "s_over_n", "P", "P_stderr", "P_rayleigh", "ratio"});
  double excess = 0.0, excess_lo = 0.0, excess_hi = 0.0;
  for (Eigen::Index b = 0; b < pooled.bins(); ++b) {
    const double s = 0.5 * (edges[b] + edges[b + 1]);
    const double ray = rayleigh_pdf(s, n_meas);
    const double ratio = density[b] / ray;
    hcsv.row({s, s / n_meas, density[b], err[b], ray, ratio});
    if (edges[b] <= s_over_n * n_meas && s_over_n * n_meas < edges[b + 1]) {
      excess = ratio;
      excess_lo = (density[b] - 1.96 * err[b]) / ray;
      excess_hi = (density[b] + 1.96 * err[b]) / ray;
    }
  }
  hcsv.close();
  manifest.add_file(hist_path);

  manifest.set_flag("excess_ci95",
                    format_double(excess_lo) + ".." + format_double(excess_hi));
  manifest.add_check("tail_excess_over_rayleigh", excess >= threshold, excess, threshold,
                     "P/P_rayleigh at s = " + format_double(s_over_n) + " n");
  return finish(manifest, out, started);
}

// ----- scaling / compare ---------------------------------------------------

int run_scaling(const ExperimentConfig& cfg, const std::string& out, RunManifest& manifest,
                std::chrono::steady_clock::time_point started) {
  const double g = cfg.number("scaling.g", 9.81);
  const double p = cfg.number("scaling.energy_flux", 1.0);
  const double q = cfg.number("scaling.action_flux", 1.0);
  const CascadeScaling direct(g, p, q, CascadeScaling::Direction::kDirect);
  const CascadeScaling inverse(g, p, q, CascadeScaling::Direction::kInverse);

  const double kmin = cfg.number("scaling.kmin", 1e-2);
  const double kmax = cfg.number("scaling.kmax", 1e4);
  const int count = int(cfg.integer("scaling.count", 200));

  const std::string path = out + "/scaling.csv";
  CsvWriter csv(path, {"k", "tail_area_direct", "tail_area_inverse"});
  for (int i = 0; i < count; ++i) {
    const double k = kmin * std::pow(kmax / kmin, double(i) / (count - 1));
    csv.row({k, direct.tail_area_parameter(k), inverse.tail_area_parameter(k)});
  }
  csv.close();
  manifest.add_file(path);
  manifest.set_flag("k_nl_direct", format_double(direct.breakdown_wavenumber()));
  manifest.set_flag("k_nl_inverse", format_double(inverse.breakdown_wavenumber()));
  manifest.add_check("tail_area_unity_at_breakdown",
                     std::abs(direct.tail_area_parameter(direct.breakdown_wavenumber()) - 1.0) <=
                         1e-12,
                     direct.tail_area_parameter(direct.breakdown_wavenumber()), 1.0);
  return finish(manifest, out, started);
}

int run_compare(const ExperimentConfig& cfg, const std::string& out, RunManifest& manifest,
                std::chrono::steady_clock::time_point started) {
  const CsvTable theory = CsvTable::read(cfg.required_text("compare.theory"));
  const CsvTable empirical = CsvTable::read(cfg.required_text("compare.empirical"));
  CompareOptions opts;
  opts.tail_lo = cfg.number("compare.tail_lo", 0.0);
  opts.tail_hi = cfg.number("compare.tail_hi", 0.0);
  const CompareReport report = compare_distributions(theory, empirical, opts);

  fs::create_directories(out);
  const std::string report_path = out + "/compare_report.json";
  {
    std::ofstream rep(report_path);
    rep << report.to_json();
  }
  manifest.add_file(report_path);
  const std::string plot_path = out + "/compare_plot.dat";
  write_plot_data(plot_path, report);
  manifest.add_file(plot_path);

  manifest.set_flag("sup_distance", format_double(report.sup_distance));
  manifest.set_flag("l1_distance", format_double(report.l1_distance));
  manifest.set_flag("tail_exponent", format_double(report.tail_fit.slope));
  return finish(manifest, out, started);
}

}  // namespace

int run_experiment(const ExperimentConfig& config, const RunOverrides& overrides) {
  const auto started = std::chrono::steady_clock::now();
  fs::create_directories(overrides.out_dir);
  RunManifest manifest(config);
  const std::string& out = overrides.out_dir;

  switch (config.kind()) {
    case ExperimentKind::kRates:
      return run_rates(config, out, manifest, started);
    case ExperimentKind::kKinetic:
      return run_kinetic(config, out, manifest, started);
    case ExperimentKind::kMoments:
      return run_moments(config, out, manifest, started);
    case ExperimentKind::kPdfSteady:
      return run_pdf_steady(config, out, manifest, started);
    case ExperimentKind::kPdfEvolve:
      return run_pdf_evolve(config, out, manifest, started);
    case ExperimentKind::kEnsemble:
      return run_ensemble_experiment(config, out, overrides, manifest, started);
    case ExperimentKind::kCapExperiment:
      return run_cap_experiment(config, out, overrides, manifest, started);
    case ExperimentKind::kScaling:
      return run_scaling(config, out, manifest, started);
    case ExperimentKind::kCompare:
      return run_compare(config, out, manifest, started);
  }
  throw std::logic_error("unhandled experiment kind");
}

}  // namespace wtlab
