#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "wtlab/compare.hpp"
#include "wtlab/csv.hpp"
#include "wtlab/experiments.hpp"
#include "wtlab/pdf.hpp"
#include "wtlab/rng.hpp"

using namespace wtlab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  explicit TempDir(const std::string& name) : path("/tmp/" + name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string path;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("rates experiment: csv, manifest, equilibrium check on a flat spectrum") {
  TempDir dir("wtlab_rates_run");
  const ExperimentConfig cfg = ExperimentConfig::parse(
      "experiment = rates\n"
      "grid.n = 16\n"
      "dispersion.alpha = 0.5\n"
      "spectrum.kind = constant\n"
      "spectrum.amplitude = 0.7\n");
  RunOverrides over;
  over.out_dir = dir.path;
  CHECK(run_experiment(cfg, over) == 0);

  CHECK(fs::exists(dir.path + "/rates.csv"));
  const std::string manifest = slurp(dir.path + "/manifest.json");
  CHECK(manifest.find("equilibrium_nullity") != std::string::npos);
  CHECK(manifest.find("\"all_passed\": true") != std::string::npos);
  CHECK(manifest.find(fnv1a64_file(dir.path + "/rates.csv")) != std::string::npos);

  const CsvTable rates = CsvTable::read(dir.path + "/rates.csv");
  CHECK(rates.has_column("eta"));
  CHECK(rates.has_column("gamma"));
  CHECK((rates.column("eta") >= 0.0).all());
}

TEST_CASE("pdf-steady: flux-free run emits a normalized Rayleigh") {
  TempDir dir("wtlab_pdfsteady_run");
  const ExperimentConfig cfg = ExperimentConfig::parse(
      "experiment = pdf-steady\n"
      "pdf.n = 1.0\n"
      "pdf.flux = 0\n");
  RunOverrides over;
  over.out_dir = dir.path;
  CHECK(run_experiment(cfg, over) == 0);
  const std::string manifest = slurp(dir.path + "/manifest.json");
  CHECK(manifest.find("\"name\": \"normalization\"") != std::string::npos);
  CHECK(manifest.find("\"all_passed\": true") != std::string::npos);

  const CsvTable pdf = CsvTable::read(dir.path + "/pdf_steady.csv");
  const Eigen::ArrayXd& s = pdf.column("s");
  const Eigen::ArrayXd& p = pdf.column("P");
  for (Eigen::Index i = 0; i < s.size(); i += 37)
    CHECK(p[i] == doctest::Approx(rayleigh_pdf(s[i], 1.0)).epsilon(1e-3));
}

TEST_CASE("pdf-steady with cutoff reports the tail exponent and readings") {
  TempDir dir("wtlab_pdfcut_run");
  const ExperimentConfig cfg = ExperimentConfig::parse(
      "experiment = pdf-steady\n"
      "pdf.boundary = cutoff\n"
      "pdf.snl_over_n = 100\n");
  RunOverrides over;
  over.out_dir = dir.path;
  CHECK(run_experiment(cfg, over) == 0);
  const std::string manifest = slurp(dir.path + "/manifest.json");
  CHECK(manifest.find("tail_exponent_near_minus_one") != std::string::npos);
  CHECK(manifest.find("sink_leakage_balance") != std::string::npos);
  CHECK(manifest.find("printed_reading_residual_ei_shifted") != std::string::npos);
}

TEST_CASE("scaling experiment emits the dimensionless-parameter table") {
  TempDir dir("wtlab_scaling_run");
  const ExperimentConfig cfg = ExperimentConfig::parse(
      "experiment = scaling\n"
      "scaling.g = 9.81\n"
      "scaling.energy_flux = 1.0\n"
      "scaling.action_flux = 2.0\n"
      "scaling.kmin = 1\n"
      "scaling.kmax = 1000\n"
      "scaling.count = 10\n");
  RunOverrides over;
  over.out_dir = dir.path;
  CHECK(run_experiment(cfg, over) == 0);
  const CsvTable table = CsvTable::read(dir.path + "/scaling.csv");
  CHECK(table.column("k")[0] == 1.0);
  CHECK(table.column("tail_area_direct")[0] == doctest::Approx(1.0 / 9.81));
  CHECK(table.column("tail_area_inverse")[0] == doctest::Approx(2.0 / 9.81));
  const std::string manifest = slurp(dir.path + "/manifest.json");
  CHECK(manifest.find("944.07") != std::string::npos);  // g^3/P^2
}

TEST_CASE("ensemble experiment reruns byte-identically across thread counts") {
  const std::string config_text =
      "experiment = ensemble\n"
      "seed = 31415\n"
      "grid.n = 8\n"
      "epsilon = 0.05\n"
      "ensemble.realizations = 64\n"
      "ensemble.t_end = 2.0\n"
      "ensemble.dt = 0.02\n"
      "ensemble.save_states = true\n";
  const ExperimentConfig cfg = ExperimentConfig::parse(config_text);

  TempDir a("wtlab_ens_a"), b("wtlab_ens_b"), c("wtlab_ens_c");
  RunOverrides over_a, over_b, over_c;
  over_a.out_dir = a.path;
  over_b.out_dir = b.path;
  over_c.out_dir = c.path;
  over_c.threads = 2;
  CHECK(run_experiment(cfg, over_a) == 0);
  CHECK(run_experiment(cfg, over_b) == 0);
  CHECK(run_experiment(cfg, over_c) == 0);

  for (const std::string name :
       {"ensemble_trajectory.csv", "histogram_mode4.csv", "z_mode4.csv", "final_states.bin"}) {
    const std::string bytes_a = slurp(a.path + "/" + name);
    CHECK(bytes_a == slurp(b.path + "/" + name));
    CHECK(bytes_a == slurp(c.path + "/" + name));
  }

  // Conservation checks logged for the free run.
  const std::string manifest = slurp(a.path + "/manifest.json");
  CHECK(manifest.find("action_drift") != std::string::npos);
  CHECK(manifest.find("hamiltonian_drift") != std::string::npos);
}

TEST_CASE("compare: identical tables, synthetic tail, z-score consistency") {
  TempDir dir("wtlab_compare_run");
  const std::string theory_path = dir.path + "/theory.csv";
  const std::string emp_path = dir.path + "/empirical.csv";

  // Theory: Rayleigh; empirical: Rayleigh plus a 1/s tail with noise
  // consistent with the declared errors.
  Rng rng(2718);
  {
    CsvWriter theory(theory_path, {"s", "P"});
    for (int i = 0; i <= 600; ++i) {
      const double s = 0.01 + 60.0 * i / 600.0;
      theory.row({s, rayleigh_pdf(s, 1.0)});
    }
    theory.close();
    CsvWriter emp(emp_path, {"s", "P", "P_stderr"});
    for (int i = 0; i < 300; ++i) {
      const double s = 0.05 + 50.0 * i / 300.0;
      const double tail = s >= 5.0 ? 2e-3 / s : 0.0;
      const double base = rayleigh_pdf(s, 1.0) + tail;
      const double err = 0.02 * base + 1e-9;
      emp.row({s, base + err * rng.normal_pair().first, err});
    }
    emp.close();
  }

  // Identical inputs: all distances vanish.
  const CsvTable theory = CsvTable::read(theory_path);
  const CompareReport self = compare_distributions(theory, theory);
  CHECK(self.sup_distance == 0.0);
  CHECK(self.l1_distance == 0.0);

  // Synthetic tail: fitted exponent -1 within 0.1 over the tail window.
  CompareOptions opts;
  opts.tail_lo = 10.0;
  opts.tail_hi = 45.0;
  const CompareReport rep = compare_distributions(theory, CsvTable::read(emp_path), opts);
  CHECK(std::abs(rep.tail_fit.slope + 1.0) <= 0.1);
  CHECK(rep.tail_fit.ci95 > 0.0);

  // Statistical self-consistency: an empirical table drawn around the
  // theory stays within 3 sigma in at least 99% of bins.
  const std::string cons_path = dir.path + "/consistent.csv";
  {
    CsvWriter cons(cons_path, {"s", "P", "P_stderr"});
    for (int i = 0; i < 400; ++i) {
      const double s = 0.05 + 8.0 * i / 400.0;
      const double base = rayleigh_pdf(s, 1.0);
      const double err = 0.03 * base;
      cons.row({s, base + err * rng.normal_pair().first, err});
    }
    cons.close();
  }
  const CompareReport cons = compare_distributions(theory, CsvTable::read(cons_path));
  CHECK(cons.within_3sigma_fraction >= 0.99);

  // Disjoint supports are rejected.
  const std::string far_path = dir.path + "/far.csv";
  {
    CsvWriter far(far_path, {"s", "P"});
    far.row({100.0, 1.0});
    far.row({120.0, 1.0});
    far.close();
  }
  CHECK_THROWS_AS(compare_distributions(theory, CsvTable::read(far_path)),
                  std::invalid_argument);

  // The compare experiment writes a machine-readable report + plot data.
  TempDir out("wtlab_compare_out");
  const ExperimentConfig cfg = ExperimentConfig::parse(
      "experiment = compare\n"
      "compare.theory = " + theory_path + "\n" +
      "compare.empirical = " + emp_path + "\n" +
      "compare.tail_lo = 10\n"
      "compare.tail_hi = 45\n");
  RunOverrides over;
  over.out_dir = out.path;
  CHECK(run_experiment(cfg, over) == 0);
  CHECK(fs::exists(out.path + "/compare_report.json"));
  CHECK(fs::exists(out.path + "/compare_plot.dat"));
  const std::string report = slurp(out.path + "/compare_report.json");
  CHECK(report.find("tail_exponent") != std::string::npos);
}

TEST_CASE("pdf-evolve experiment conserves mass and reports positivity") {
  TempDir dir("wtlab_pdfevolve_run");
  const ExperimentConfig cfg = ExperimentConfig::parse(
      "experiment = pdf-evolve\n"
      "pdf.cells = 200\n"
      "pdf.t_end = 1.0\n");
  RunOverrides over;
  over.out_dir = dir.path;
  CHECK(run_experiment(cfg, over) == 0);
  const std::string manifest = slurp(dir.path + "/manifest.json");
  CHECK(manifest.find("mass_conserved") != std::string::npos);
  CHECK(manifest.find("\"all_passed\": true") != std::string::npos);
}

TEST_CASE("kinetic and moments experiments produce trajectory tables") {
  TempDir dir("wtlab_kinetic_run");
  const ExperimentConfig cfg = ExperimentConfig::parse(
      "experiment = kinetic\n"
      "grid.n = 8\n"
      "kinetic.dt = 0.005\n"
      "kinetic.t_end = 0.1\n"
      "kinetic.sample_stride = 10\n");
  RunOverrides over;
  over.out_dir = dir.path;
  CHECK(run_experiment(cfg, over) == 0);
  const CsvTable traj = CsvTable::read(dir.path + "/spectrum_trajectory.csv");
  CHECK(traj.has_column("n"));
  CHECK(traj.rows() > 0);

  TempDir mdir("wtlab_moments_run");
  const ExperimentConfig mcfg = ExperimentConfig::parse(
      "experiment = moments\n"
      "grid.n = 8\n"
      "kinetic.dt = 0.01\n"
      "kinetic.t_end = 0.1\n"
      "kinetic.pmax = 3\n");
  RunOverrides mover;
  mover.out_dir = mdir.path;
  CHECK(run_experiment(mcfg, mover) == 0);
  const CsvTable moments = CsvTable::read(mdir.path + "/moments_trajectory.csv");
  CHECK(moments.has_column("p"));
  CHECK(moments.has_column("M"));
}
