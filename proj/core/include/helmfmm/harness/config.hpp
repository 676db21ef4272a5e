#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "helmfmm/discretize.hpp"
#include "helmfmm/fmm.hpp"

namespace helmfmm::harness {

enum class PreconditionerId { Fmm, Gmg, Ic, None, Amg };
enum class SolverId { Gmres, Bicgstab };

std::string toString(PreconditionerId id);
PreconditionerId parsePreconditioner(const std::string& text);
std::string toString(SolverId id);
SolverId parseSolver(const std::string& text);

/// One sweep: the cartesian product of the listed values, except that h and
/// κ are zipped pairwise when `paired` is set. For P4 the κ list holds μ.
struct ExperimentConfig {
  std::string experiment = "custom";
  discretize::ProblemId problem = discretize::ProblemId::P1;
  discretize::ElementType element = discretize::ElementType::Q1;
  std::vector<double> hs{1.0 / 32.0};
  std::vector<double> kappas{15.0};
  bool paired = false;
  std::vector<PreconditionerId> preconditioners{PreconditionerId::Fmm};
  std::vector<SolverId> solvers{SolverId::Gmres};
  std::vector<double> epsilons{1e-6};
  /// Overrides the order derived from ε.
  std::optional<int> p;
  double theta = 0.4;
  fmm::Backend backend = fmm::Backend::Fmm;
  double tol = 1e-6;
  int maxit = 20;
  /// GMRES restart length; unset means no restart within maxit.
  std::optional<int> restart;
  std::string outDir = "results";
  std::uint64_t seed = 0;

  void validate() const;
};

/// Flat key/value document: `[section]` headers, `key = value` lines with
/// strings in double quotes, numbers, booleans and `[a, b, ...]` arrays, and
/// `#` comments. Keys inside a section are stored as "section.key".
class ConfigDocument {
 public:
  static ConfigDocument parse(const std::string& text);
  static ConfigDocument load(const std::string& path);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  /// Scalar values are one-element lists.
  const std::vector<std::string>& list(const std::string& key) const;
  std::string string(const std::string& key) const;
  double number(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::vector<std::string> keys() const;

 private:
  std::map<std::string, std::vector<std::string>> values_;
};

/// Reads the keys of `section` (or top-level keys when section is empty)
/// on top of `base`. Unknown keys raise ConfigError.
ExperimentConfig applyDocument(ExperimentConfig base, const ConfigDocument& doc, const std::string& section = "experiment");

}  // namespace helmfmm::harness
