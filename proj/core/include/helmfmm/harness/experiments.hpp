#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "helmfmm/harness/config.hpp"
#include "helmfmm/harness/report.hpp"
#include "helmfmm/spectra.hpp"

namespace helmfmm::harness {

/// One (h, κ or μ, preconditioner, solver, ε) combination of a sweep.
struct Cell {
  std::string experiment;
  discretize::ProblemId problem = discretize::ProblemId::P1;
  discretize::ElementType element = discretize::ElementType::Q1;
  double h = 0.0;
  /// κ, or μ for P4.
  double parameter = 0.0;
  PreconditionerId preconditioner = PreconditionerId::Fmm;
  SolverId solver = SolverId::Gmres;
  std::optional<double> epsilon;
  std::optional<int> p;
  double theta = 0.4;
  fmm::Backend backend = fmm::Backend::Fmm;
  double tol = 1e-6;
  int maxit = 20;
  std::optional<int> restart;
};

/// Cells in a fixed order: h (or the (h, κ) pair), then κ, preconditioner,
/// solver and ε. ε only multiplies FMM cells.
std::vector<Cell> expandCells(const ExperimentConfig& config);

/// Builds the system and preconditioner and solves from x₀ = 0. Failures
/// inside the cell (factorization, breakdown, size limits) become a
/// non-converged row whose notes carry the error.
ResultRow runCell(const Cell& cell, bool recordTiming = true);

struct RunOptions {
  int threads = 1;
  /// When false every wall time is written as 0, so output files depend
  /// only on the configuration.
  bool recordTiming = true;
  /// Called once per finished cell, never concurrently.
  std::function<void(const ResultRow&)> onRow;
};

/// Rows come back in expandCells order whatever the thread count.
std::vector<ResultRow> runSweep(const ExperimentConfig& config, const RunOptions& options = {});

struct SpectrumJob {
  std::string label;
  discretize::ProblemId problem = discretize::ProblemId::P1;
  double h = 1.0 / 32.0;
  double parameter = 0.0;
  /// Unset: spectrum of A. Set: spectrum of M⁻¹A with the FMM preconditioner.
  std::optional<double> epsilon;
  double theta = 0.4;
};

struct SpectrumResult {
  SpectrumJob job;
  std::size_t dimension = 0;
  spectra::SpectrumReport report;
};

SpectrumResult runSpectrum(const SpectrumJob& job);

/// Jobs for the `spectrum` subcommand: one per (h, κ) and, for each, A when
/// the preconditioner list holds "none" plus M⁻¹A for every ε when it holds "fmm".
std::vector<SpectrumJob> spectrumJobs(const ExperimentConfig& config);

struct Sweep {
  ExperimentConfig config;
  /// Write a residual-history plot for this sweep.
  bool plot = false;
};

struct Experiment {
  std::string id;
  std::string title;
  std::vector<Sweep> sweeps;
  std::vector<SpectrumJob> spectra;
};

/// "E1" … "E8".
std::vector<std::string> catalogIds();
/// Throws ConfigError for an unknown id.
Experiment catalog(const std::string& id);

struct ExperimentOutput {
  std::vector<ResultRow> rows;
  std::vector<SpectrumResult> spectra;
  std::vector<std::string> files;
};

/// Runs every sweep and spectrum and writes `<outDir>/<id>.csv`, one
/// convergence plot per plotted sweep and, for spectra, a summary CSV plus
/// an eigenvalue CSV and scatter plot per job.
ExperimentOutput runExperiment(const Experiment& experiment, const std::string& outDir,
                               const RunOptions& options = {});

inline constexpr const char* kSpectrumHeader =
    "label,problem,h,kappa,mu,operator,epsilon,dimension,n_negative_real,min_abs,max_abs,median_abs,cluster_radius";

std::string spectrumSummaryCsv(const std::vector<SpectrumResult>& results);

}  // namespace helmfmm::harness
