#pragma once

#include <optional>
#include <string>
#include <vector>

#include "helmfmm/common.hpp"

namespace helmfmm::harness {

/// One table cell. A cell that did not converge within maxit carries
/// converged = false and iterations = maxit.
struct ResultRow {
  std::string experiment;
  std::string problem;
  std::string element;
  double h = 0.0;
  double kappa = 0.0;
  std::optional<double> mu;
  std::string preconditioner;
  std::string solver;
  /// FMM settings; empty for the other preconditioners.
  std::optional<double> epsilon;
  std::optional<int> p;
  std::optional<double> theta;
  int iterations = 0;
  bool converged = false;
  double finalResidual = 0.0;
  double wallTimeSeconds = 0.0;
  /// key=value pairs separated by ';'.
  std::string notes;
  /// Relative residual after each iteration (entry 0 is the initial guess).
  /// Not part of the CSV.
  std::vector<double> residualHistory;
};

inline constexpr const char* kCsvHeader =
    "experiment,problem,element,h,kappa,mu,preconditioner,solver,epsilon,p,theta,iterations,converged,"
    "final_residual,wall_time_s,notes";

/// 17 significant digits; "nan", "inf" and "-inf" for non-finite values.
std::string formatDouble(double v);

std::string csvLine(const ResultRow& row);
std::string toCsv(const std::vector<ResultRow>& rows);
/// Throws IoError when the file cannot be written.
void emitCsv(const std::vector<ResultRow>& rows, const std::string& path);

/// Parses text produced by toCsv (residual histories are not stored).
std::vector<ResultRow> parseCsv(const std::string& text);

struct Series {
  std::string label;
  std::vector<double> values;
};

/// Residual histories against iteration number on a log10 y-axis.
std::string svgConvergence(const std::vector<Series>& histories, const std::string& title);
void emitSvgConvergence(const std::vector<Series>& histories, const std::string& path,
                        const std::string& title = "relative residual");

struct PointSet {
  std::string label;
  CVector points;
};

/// Complex points in the plane with the axes through the origin drawn.
std::string svgScatter(const std::vector<PointSet>& sets, const std::string& title);
void emitSvgScatter(const std::vector<PointSet>& sets, const std::string& path,
                    const std::string& title = "eigenvalues");

/// "re,im" rows with 17 significant digits.
void emitEigenvalueCsv(const CVector& eigenvalues, const std::string& path);

/// Writes text to path, creating parent directories.
void writeTextFile(const std::string& path, const std::string& text);

}  // namespace helmfmm::harness
