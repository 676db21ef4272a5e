#include "helmfmm/harness/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <memory>
#include <mutex>
#include <thread>

#include "helmfmm/baselines.hpp"
#include "helmfmm/bem.hpp"
#include "helmfmm/sparse.hpp"

namespace helmfmm::harness {

namespace {

using discretize::ElementType;
using discretize::ProblemId;
using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

void appendNote(std::string& notes, const std::string& note) {
  if (!notes.empty()) notes += ';';
  notes += note;
}

std::string shortDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bem::BemSettings fmmSettings(double epsilon, std::optional<int> p, double theta, fmm::Backend backend) {
  bem::BemSettings s;
  s.fmm = fmm::FmmConfig::fromEpsilon(special::KernelId::laplace2d(), epsilon);
  if (p) {
    s.fmm.p = *p;
    s.fmm.epsilon.reset();
  }
  s.fmm.theta = theta;
  s.fmm.backend = backend;
  return s;
}

ResultRow skeleton(const Cell& cell) {
  ResultRow row;
  row.experiment = cell.experiment;
  row.problem = discretize::toString(cell.problem);
  row.element = discretize::toString(cell.element);
  row.h = cell.h;
  if (cell.problem == ProblemId::P4) {
    row.mu = cell.parameter;
    row.kappa = cell.parameter * std::sqrt(2.0);
  } else {
    row.kappa = cell.parameter;
  }
  row.preconditioner = toString(cell.preconditioner);
  row.solver = toString(cell.solver);
  if (cell.preconditioner == PreconditionerId::Fmm) {
    const double eps = cell.epsilon.value_or(1e-6);
    row.epsilon = eps;
    row.p = cell.p ? *cell.p : fmm::accuracyToOrder(eps);
    row.theta = cell.theta;
  }
  row.iterations = cell.maxit;
  row.finalResidual = std::numeric_limits<double>::quiet_NaN();
  return row;
}

}  // namespace

std::vector<Cell> expandCells(const ExperimentConfig& c) {
  c.validate();
  std::vector<std::pair<double, double>> points;
  if (c.paired) {
    for (std::size_t i = 0; i < c.hs.size(); ++i) points.emplace_back(c.hs[i], c.kappas[i]);
  } else {
    for (double h : c.hs) {
      for (double k : c.kappas) points.emplace_back(h, k);
    }
  }
  std::vector<Cell> cells;
  for (const auto& [h, parameter] : points) {
    for (PreconditionerId pre : c.preconditioners) {
      for (SolverId solver : c.solvers) {
        std::vector<std::optional<double>> eps{std::nullopt};
        if (pre == PreconditionerId::Fmm) eps.assign(c.epsilons.begin(), c.epsilons.end());
        for (const auto& e : eps) {
          Cell cell;
          cell.experiment = c.experiment;
          cell.problem = c.problem;
          cell.element = c.element;
          cell.h = h;
          cell.parameter = parameter;
          cell.preconditioner = pre;
          cell.solver = solver;
          cell.epsilon = e;
          cell.p = pre == PreconditionerId::Fmm ? c.p : std::nullopt;
          cell.theta = c.theta;
          cell.backend = c.backend;
          cell.tol = c.tol;
          cell.maxit = c.maxit;
          cell.restart = c.restart;
          cells.push_back(cell);
        }
      }
    }
  }
  return cells;
}

ResultRow runCell(const Cell& cell, bool recordTiming) {
  ResultRow row = skeleton(cell);
  if (cell.preconditioner == PreconditionerId::Amg) {
    row.iterations = 0;
    row.notes = "not reproduced";
    return row;
  }
  const auto start = Clock::now();
  try {
    const auto problem = discretize::makeProblem(cell.problem, cell.parameter);
    const auto system = discretize::buildSystem(problem, problem.gridForH(cell.h), cell.element);
    appendNote(row.notes, "n=" + std::to_string(system.b.size()));

    std::unique_ptr<krylov::Preconditioner> pre;
    const bem::BemPreconditioner* fmmPre = nullptr;
    switch (cell.preconditioner) {
      case PreconditionerId::Fmm: {
        auto bemPre = std::make_unique<bem::BemPreconditioner>(bem::BemPreconditioner::forSystem(
            system, fmmSettings(*row.epsilon, cell.p, cell.theta, cell.backend)));
        fmmPre = bemPre.get();
        if (cell.backend == fmm::Backend::Direct) appendNote(row.notes, "backend=direct");
        pre = std::move(bemPre);
        break;
      }
      case PreconditionerId::Gmg: {
        if (cell.element != ElementType::Q1) throw DomainError("gmg supports Q1 only");
        auto mg = std::make_unique<baselines::MgHierarchy>(system.grid, system.kappa);
        const auto& o = mg->options();
        appendNote(row.notes, "levels=" + std::to_string(mg->levels()) + ";smoother=jacobi(" +
                                  shortDouble(o.omega) + ");vcycle=" + std::to_string(o.preSmooth) + "+" +
                                  std::to_string(o.postSmooth));
        pre = std::move(mg);
        break;
      }
      case PreconditionerId::Ic: {
        auto factors = baselines::ic0(system.a);
        appendNote(row.notes, "ic_shift=" + shortDouble(factors.shift));
        pre = std::make_unique<baselines::IcPreconditioner>(std::move(factors));
        break;
      }
      case PreconditionerId::None:
      case PreconditionerId::Amg:
        pre = std::make_unique<krylov::IdentityPreconditioner>(system.b.size());
        break;
    }

    const sparse::CsrOperator a(system.a);
    krylov::SolveReport report;
    if (cell.solver == SolverId::Gmres) {
      krylov::GmresOptions o;
      o.tol = cell.tol;
      o.maxIterations = cell.maxit;
      o.restart = cell.restart.value_or(cell.maxit);
      o.maxOuter = cell.maxit;
      report = krylov::gmres(a, system.b, *pre, o);
      row.iterations = report.iterations;
      appendNote(row.notes, "count=arnoldi_steps");
    } else {
      // One iteration is one preconditioned matvec, so maxit bounds matvecs.
      krylov::BicgstabOptions o;
      o.tol = cell.tol;
      o.maxIterations = std::max(1, cell.maxit / 2);
      try {
        report = krylov::bicgstab(a, system.b, *pre, o);
      } catch (const krylov::BreakdownError& e) {
        report = e.report();
        appendNote(row.notes, "breakdown");
      }
      row.iterations = report.matvecs;
      appendNote(row.notes, "count=matvecs;steps=" + std::to_string(report.iterations));
    }
    row.converged = report.converged && report.finalResidual <= cell.tol;
    row.finalResidual = report.finalResidual;
    row.residualHistory = report.residualHistory;
    if (!row.converged) row.iterations = cell.maxit;
    if (fmmPre) {
      const auto st = fmmPre->stats();
      appendNote(row.notes, "applies=" + std::to_string(st.applies) + ";inner_iterations=" +
                                std::to_string(st.innerIterations) + ";inner_failures=" +
                                std::to_string(st.innerFailures));
    }
  } catch (const Error& e) {
    row.converged = false;
    row.iterations = cell.maxit;
    appendNote(row.notes, "error=" + sanitize(e.what()));
  }
  row.wallTimeSeconds = recordTiming ? seconds(start) : 0.0;
  return row;
}

std::vector<ResultRow> runSweep(const ExperimentConfig& config, const RunOptions& options) {
  const auto cells = expandCells(config);
  std::vector<ResultRow> rows(cells.size());
  std::mutex callbackMutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      rows[i] = runCell(cells[i], options.recordTiming);
      if (options.onRow) {
        const std::lock_guard lock(callbackMutex);
        options.onRow(rows[i]);
      }
    }
  };
  const int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(cells.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

SpectrumResult runSpectrum(const SpectrumJob& job) {
  const auto problem = discretize::makeProblem(job.problem, job.parameter);
  const auto system = discretize::buildSystem(problem, problem.gridForH(job.h), ElementType::Q1);
  const sparse::CsrOperator a(system.a);
  SpectrumResult result;
  result.job = job;
  result.dimension = system.b.size();
  dense::DenseMatrix m;
  if (job.epsilon) {
    const auto pre =
        bem::BemPreconditioner::forSystem(system, fmmSettings(*job.epsilon, std::nullopt, job.theta, fmm::Backend::Fmm));
    m = spectra::materialize(a, pre);
  } else {
    m = spectra::materialize(a);
  }
  result.report = spectra::spectrumReport(spectra::denseEigenvalues(m));
  return result;
}

std::vector<SpectrumJob> spectrumJobs(const ExperimentConfig& c) {
  c.validate();
  std::vector<SpectrumJob> jobs;
  for (double h : c.hs) {
    for (double k : c.kappas) {
      const std::string base = c.experiment + "_" + discretize::toString(c.problem) + "_h" + shortDouble(h) + "_k" +
                               shortDouble(k);
      for (PreconditionerId pre : c.preconditioners) {
        if (pre == PreconditionerId::None) {
          jobs.push_back({base + "_A", c.problem, h, k, std::nullopt, c.theta});
        } else if (pre == PreconditionerId::Fmm) {
          for (double e : c.epsilons) jobs.push_back({base + "_MA_eps" + shortDouble(e), c.problem, h, k, e, c.theta});
        } else {
          throw ConfigError("spectrum supports the none and fmm preconditioners only");
        }
      }
    }
  }
  return jobs;
}

std::vector<std::string> catalogIds() { return {"E1", "E2", "E3", "E4", "E5", "E6", "E7", "E8"}; }

Experiment catalog(const std::string& id) {
  using P = PreconditionerId;
  const std::vector<P> tableColumns{P::Gmg, P::Amg, P::Fmm, P::Ic};
  auto base = [&](ProblemId problem) {
    ExperimentConfig c;
    c.experiment = id;
    c.problem = problem;
    return c;
  };
  Experiment e;
  e.id = id;
  if (id == "E1") {
    e.title = "Q1 and Q2 elements, P1, kappa = 15";
    for (ElementType el : {ElementType::Q1, ElementType::Q2}) {
      auto c = base(ProblemId::P1);
      c.element = el;
      c.hs = {1.0 / 32, 1.0 / 64, 1.0 / 128};
      c.kappas = {15.0};
      c.preconditioners = {P::Amg, P::Fmm};
      e.sweeps.push_back({c, false});
    }
  } else if (id == "E2") {
    e.title = "P1 with kappa h = 0.3125";
    auto c = base(ProblemId::P1);
    c.hs = {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
    c.kappas = {5.0, 10.0, 20.0, 40.0};
    c.paired = true;
    c.preconditioners = tableColumns;
    e.sweeps.push_back({c, false});
  } else if (id == "E3") {
    e.title = "P2 mesh refinement, kappa = 5";
    auto c = base(ProblemId::P2);
    c.hs = {1.0 / 32, 1.0 / 64, 1.0 / 128};
    c.kappas = {5.0};
    c.preconditioners = tableColumns;
    e.sweeps.push_back({c, false});
  } else if (id == "E4") {
    e.title = "P2 wavenumber sweep, h = 1/64";
    auto c = base(ProblemId::P2);
    c.hs = {1.0 / 64};
    c.kappas = {0.8, 2.0, 5.0};
    c.preconditioners = tableColumns;
    e.sweeps.push_back({c, false});
  } else if (id == "E5") {
    e.title = "P4, kappa = mu sqrt(2)";
    auto c = base(ProblemId::P4);
    c.hs = {1.0 / 32, 1.0 / 64, 1.0 / 128};
    c.kappas = {1.0, 4.0, 6.0, 8.0};
    c.preconditioners = tableColumns;
    e.sweeps.push_back({c, false});
  } else if (id == "E6") {
    e.title = "GMRES and BiCGSTAB with the FMM preconditioner, P2, h = 1/32";
    auto c = base(ProblemId::P2);
    c.hs = {1.0 / 32};
    c.kappas = {2.0, 5.0, 7.0, 10.0};
    c.solvers = {SolverId::Gmres, SolverId::Bicgstab};
    c.maxit = 40;
    e.sweeps.push_back({c, true});
  } else if (id == "E7") {
    e.title = "FMM precision against convergence, P2, kappa = 7, h = 1/32";
    auto c = base(ProblemId::P2);
    c.hs = {1.0 / 32};
    c.kappas = {7.0};
    c.preconditioners = {P::Fmm, P::Gmg, P::Amg, P::Ic};
    c.epsilons = {1e-2, 1e-4, 1e-6};
    e.sweeps.push_back({c, true});
    auto u = base(ProblemId::P2);
    u.hs = {1.0 / 32};
    u.kappas = {0.0, 15.0};
    u.preconditioners = {P::None};
    u.maxit = 100;
    e.sweeps.push_back({u, true});
  } else if (id == "E8") {
    e.title = "Spectra of A and of the FMM-preconditioned operator";
    for (double k : {5.0, 10.0, 20.0, 40.0}) {
      e.spectra.push_back({"E8_P1_k" + shortDouble(k) + "_A", ProblemId::P1, 1.0 / 32, k, std::nullopt, 0.4});
    }
    e.spectra.push_back({"E8_P2_k7_A", ProblemId::P2, 1.0 / 32, 7.0, std::nullopt, 0.4});
    for (double eps : {1e-2, 1e-4, 1e-6}) {
      e.spectra.push_back({"E8_P2_k7_MA_eps" + shortDouble(eps), ProblemId::P2, 1.0 / 32, 7.0, eps, 0.4});
    }
  } else {
    throw ConfigError("unknown experiment '" + id + "' (expected E1 to E8)");
  }
  return e;
}

std::string spectrumSummaryCsv(const std::vector<SpectrumResult>& results) {
  std::string out = std::string(kSpectrumHeader) + "\n";
  for (const auto& r : results) {
    const auto& j = r.job;
    const bool p4 = j.problem == ProblemId::P4;
    out += j.label + "," + discretize::toString(j.problem) + "," + formatDouble(j.h) + "," +
           formatDouble(p4 ? j.parameter * std::sqrt(2.0) : j.parameter) + "," + (p4 ? formatDouble(j.parameter) : "") +
           "," + (j.epsilon ? "MinvA" : "A") + "," + (j.epsilon ? formatDouble(*j.epsilon) : "") + "," +
           std::to_string(r.dimension) + "," + std::to_string(r.report.nNegativeReal) + "," +
           formatDouble(r.report.minAbs) + "," + formatDouble(r.report.maxAbs) + "," +
           formatDouble(r.report.medianAbs) + "," + formatDouble(r.report.clusterRadius) + "\n";
  }
  return out;
}

ExperimentOutput runExperiment(const Experiment& experiment, const std::string& outDir, const RunOptions& options) {
  ExperimentOutput out;
  const std::filesystem::path dir(outDir);
  for (std::size_t s = 0; s < experiment.sweeps.size(); ++s) {
    const auto& sweep = experiment.sweeps[s];
    auto rows = runSweep(sweep.config, options);
    if (sweep.plot) {
      std::vector<Series> series;
      for (const auto& r : rows) {
        if (r.residualHistory.empty()) continue;
        std::string label = r.preconditioner + " " + r.solver + " k=" + shortDouble(r.kappa);
        if (r.epsilon) label += " eps=" + shortDouble(*r.epsilon);
        series.push_back({label, r.residualHistory});
      }
      const std::string path = (dir / (experiment.id + "_convergence_" + std::to_string(s + 1) + ".svg")).string();
      emitSvgConvergence(series, path, experiment.title);
      out.files.push_back(path);
    }
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  }
  if (!experiment.sweeps.empty()) {
    const std::string path = (dir / (experiment.id + ".csv")).string();
    emitCsv(out.rows, path);
    out.files.push_back(path);
  }
  for (const auto& job : experiment.spectra) {
    auto result = runSpectrum(job);
    const std::string csv = (dir / (job.label + ".csv")).string();
    const std::string svg = (dir / (job.label + ".svg")).string();
    emitEigenvalueCsv(result.report.eigenvalues, csv);
    emitSvgScatter({{job.label, result.report.eigenvalues}}, svg, job.label);
    out.files.push_back(csv);
    out.files.push_back(svg);
    out.spectra.push_back(std::move(result));
  }
  if (!out.spectra.empty()) {
    const std::string path = (dir / (experiment.id + "_spectra.csv")).string();
    writeTextFile(path, spectrumSummaryCsv(out.spectra));
    out.files.push_back(path);
  }
  return out;
}

}  // namespace helmfmm::harness
