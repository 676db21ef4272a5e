#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>

#include "helmfmm/discretize.hpp"
#include "helmfmm/fmm.hpp"
#include "helmfmm/harness/config.hpp"
#include "helmfmm/harness/experiments.hpp"
#include "helmfmm/harness/matrix_market.hpp"

namespace hh = helmfmm::harness;
namespace hd = helmfmm::discretize;

namespace {

struct Overrides {
  std::vector<double> h;
  std::vector<double> kappa;
  std::vector<std::string> preconditioner;
  std::vector<std::string> solver;
  std::vector<double> epsilon;
  std::optional<int> p;
  std::optional<double> theta;
  std::optional<double> tol;
  std::optional<int> maxit;
  std::optional<int> restart;

  void add(CLI::App* app) {
    app->add_option("--mesh", h, "Mesh parameters h");
    app->add_option("--kappa", kappa, "Wavenumbers (mu for P4)");
    app->add_option("--preconditioner", preconditioner, "fmm, gmg, ic, none or amg");
    app->add_option("--solver", solver, "gmres or bicgstab");
    app->add_option("--epsilon", epsilon, "FMM precision");
    app->add_option("--p", p, "FMM expansion order");
    app->add_option("--theta", theta, "Multipole acceptance parameter");
    app->add_option("--tol", tol, "Relative residual tolerance");
    app->add_option("--maxit", maxit, "Iteration limit");
    app->add_option("--restart", restart, "GMRES restart length");
  }

  void apply(hh::ExperimentConfig& c) const {
    if (!h.empty()) c.hs = h;
    if (!kappa.empty()) c.kappas = kappa;
    if (!preconditioner.empty()) {
      c.preconditioners.clear();
      for (const auto& s : preconditioner) c.preconditioners.push_back(hh::parsePreconditioner(s));
    }
    if (!solver.empty()) {
      c.solvers.clear();
      for (const auto& s : solver) c.solvers.push_back(hh::parseSolver(s));
    }
    if (!epsilon.empty()) c.epsilons = epsilon;
    if (p) c.p = p;
    if (theta) c.theta = *theta;
    if (tol) c.tol = *tol;
    if (maxit) c.maxit = *maxit;
    if (restart) c.restart = restart;
    c.validate();
  }
};

void printRow(const hh::ResultRow& r) {
  std::printf("%-3s %-3s %-3s h=%-9g kappa=%-8g %-5s %-8s", r.experiment.c_str(), r.problem.c_str(), r.element.c_str(),
              r.h, r.kappa, r.preconditioner.c_str(), r.solver.c_str());
  if (r.epsilon) std::printf(" eps=%-6g", *r.epsilon);
  if (r.preconditioner == "amg") {
    std::printf(" not reproduced\n");
  } else if (r.converged) {
    std::printf(" its=%-3d res=%.2e\n", r.iterations, r.finalResidual);
  } else {
    std::printf(" --  res=%.2e %s\n", r.finalResidual, r.notes.c_str());
  }
  std::fflush(stdout);
}

/// Small end-to-end check: FMM against direct summation and one
/// preconditioned solve.
int selftest(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = 400;
  std::vector<helmfmm::Vec2> points(n);
  helmfmm::CVector charges(n);
  for (std::size_t i = 0; i < n; ++i) {
    points[i] = {unit(rng), unit(rng)};
    charges[i] = {unit(rng) - 0.5, unit(rng) - 0.5};
  }
  auto config = helmfmm::fmm::FmmConfig::fromEpsilon(helmfmm::special::KernelId::forWavenumber2d(10.0), 1e-6);
  const auto approx = helmfmm::fmm::evaluate(points, charges, points, config);
  config.backend = helmfmm::fmm::Backend::Direct;
  const auto exact = helmfmm::fmm::evaluate(points, charges, points, config);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += std::norm(approx[i] - exact[i]);
    den += std::norm(exact[i]);
  }
  const double err = std::sqrt(num / den);
  const bool fmmOk = err <= 1e-5;
  std::printf("[%s] fmm relative error %.2e (N=%zu, kappa=10, p=6)\n", fmmOk ? "PASS" : "FAIL", err, n);

  hh::Cell cell;
  cell.experiment = "selftest";
  cell.h = 1.0 / 16;
  cell.parameter = 5.0;
  const auto row = hh::runCell(cell);
  const bool solveOk = row.converged && row.iterations <= 6;
  std::printf("[%s] P1 h=1/16 kappa=5 fmm-preconditioned GMRES: %d iterations, residual %.2e\n",
              solveOk ? "PASS" : "FAIL", row.iterations, row.finalResidual);
  return fmmOk && solveOk ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Helmholtz FEM solver with an FMM-based boundary-integral preconditioner"};
  app.require_subcommand(1);
  std::string outDir = "results";
  std::uint64_t seed = 0;
  int threads = 1;
  bool noTiming = false;
  app.add_option("--out-dir", outDir, "Directory for CSV, SVG and Matrix Market output");
  app.add_option("--seed", seed, "Seed for randomized inputs");
  app.add_option("--threads", threads, "Experiment cells run in parallel")->check(CLI::PositiveNumber);
  app.add_flag("--no-timing", noTiming, "Write zero wall times so output is byte-stable");

  std::string experimentId;
  auto* run = app.add_subcommand("run", "Run one catalog experiment (E1 to E8)");
  run->add_option("experiment", experimentId)->required();
  auto* runAll = app.add_subcommand("run-all", "Run every catalog experiment");

  std::string configPath;
  Overrides solveOverrides;
  auto* solve = app.add_subcommand("solve", "Run the sweep described by a config file");
  solve->add_option("config", configPath)->required()->check(CLI::ExistingFile);
  solveOverrides.add(solve);

  Overrides spectrumOverrides;
  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of A or of the preconditioned operator");
  spectrum->add_option("config", configPath)->required()->check(CLI::ExistingFile);
  spectrumOverrides.add(spectrum);

  std::string problem = "P1";
  std::string element = "Q1";
  double h = 1.0 / 16;
  double parameter = 15.0;
  std::string stem;
  auto* exportCmd = app.add_subcommand("export-matrix", "Write A and b in Matrix Market format");
  exportCmd->add_option("--problem", problem, "P1, P2, P3 or P4");
  exportCmd->add_option("--element", element, "Q1 or Q2");
  exportCmd->add_option("--mesh", h, "Mesh parameter h");
  exportCmd->add_option("--kappa", parameter, "Wavenumber (mu for P4)");
  exportCmd->add_option("--name", stem, "File stem inside the output directory");

  auto* selftestCmd = app.add_subcommand("selftest", "Quick consistency check");

  CLI11_PARSE(app, argc, argv);

  hh::RunOptions options;
  options.threads = threads;
  options.recordTiming = !noTiming;
  options.onRow = printRow;

  try {
    auto loadConfig = [&](const Overrides& o) {
      hh::ExperimentConfig c;
      c.outDir = outDir;
      c.seed = seed;
      c = hh::applyDocument(c, hh::ConfigDocument::load(configPath));
      if (app.get_option("--out-dir")->count() > 0) c.outDir = outDir;
      if (app.get_option("--seed")->count() > 0) c.seed = seed;
      o.apply(c);
      return c;
    };

    if (*run || *runAll) {
      const auto ids = *run ? std::vector<std::string>{experimentId} : hh::catalogIds();
      for (const auto& id : ids) {
        const auto experiment = hh::catalog(id);
        std::printf("== %s: %s\n", id.c_str(), experiment.title.c_str());
        const auto out = hh::runExperiment(experiment, outDir, options);
        for (const auto& s : out.spectra) {
          std::printf("%-28s n=%zu negative_real=%zu min|l|=%.3e max|l|=%.3e cluster_radius=%.3e\n",
                      s.job.label.c_str(), s.dimension, s.report.nNegativeReal, s.report.minAbs, s.report.maxAbs,
                      s.report.clusterRadius);
        }
        for (const auto& f : out.files) std::printf("wrote %s\n", f.c_str());
      }
    } else if (*solve) {
      const auto config = loadConfig(solveOverrides);
      auto rows = hh::runSweep(config, options);
      const std::string path = (std::filesystem::path(config.outDir) / (config.experiment + ".csv")).string();
      hh::emitCsv(rows, path);
      std::vector<hh::Series> series;
      for (const auto& r : rows) {
        if (!r.residualHistory.empty()) series.push_back({r.preconditioner + " " + r.solver, r.residualHistory});
      }
      const std::string svg =
          (std::filesystem::path(config.outDir) / (config.experiment + "_convergence.svg")).string();
      hh::emitSvgConvergence(series, svg);
      std::printf("wrote %s\nwrote %s\n", path.c_str(), svg.c_str());
    } else if (*spectrum) {
      const auto config = loadConfig(spectrumOverrides);
      std::vector<hh::SpectrumResult> results;
      for (const auto& job : hh::spectrumJobs(config)) {
        auto r = hh::runSpectrum(job);
        const auto base = std::filesystem::path(config.outDir) / job.label;
        hh::emitEigenvalueCsv(r.report.eigenvalues, base.string() + ".csv");
        hh::emitSvgScatter({{job.label, r.report.eigenvalues}}, base.string() + ".svg", job.label);
        std::printf("%s n=%zu negative_real=%zu min|l|=%.3e max|l|=%.3e cluster_radius=%.3e\n", job.label.c_str(),
                    r.dimension, r.report.nNegativeReal, r.report.minAbs, r.report.maxAbs, r.report.clusterRadius);
        results.push_back(std::move(r));
      }
      hh::writeTextFile((std::filesystem::path(config.outDir) / (config.experiment + "_spectra.csv")).string(),
                        hh::spectrumSummaryCsv(results));
    } else if (*exportCmd) {
      const auto spec = hd::makeProblem(hd::parseProblemId(problem), parameter);
      const auto system = hd::buildSystem(spec, spec.gridForH(h), hd::parseElementType(element));
      if (stem.empty()) stem = problem + "_" + element + "_n" + std::to_string(system.grid.n);
      const auto path = (std::filesystem::path(outDir) / stem).string();
      hh::exportMatrix(system.a, system.b, path);
      std::printf("wrote %s.mtx (%zu unknowns, %zu nonzeros) and %s_b.mtx\n", path.c_str(), system.a.rows(),
                  system.a.nnz(), path.c_str());
    } else if (*selftestCmd) {
      return selftest(seed);
    }
  } catch (const helmfmm::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const helmfmm::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 2;
  } catch (const helmfmm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
