#include "helmfmm/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace helmfmm::harness {

std::string toString(PreconditionerId id) {
  switch (id) {
    case PreconditionerId::Fmm: return "fmm";
    case PreconditionerId::Gmg: return "gmg";
    case PreconditionerId::Ic: return "ic";
    case PreconditionerId::None: return "none";
    case PreconditionerId::Amg: return "amg";
  }
  return "?";
}

PreconditionerId parsePreconditioner(const std::string& text) {
  if (text == "fmm") return PreconditionerId::Fmm;
  if (text == "gmg") return PreconditionerId::Gmg;
  if (text == "ic") return PreconditionerId::Ic;
  if (text == "none") return PreconditionerId::None;
  if (text == "amg") return PreconditionerId::Amg;
  throw ConfigError("unknown preconditioner '" + text + "'");
}

std::string toString(SolverId id) { return id == SolverId::Gmres ? "gmres" : "bicgstab"; }

SolverId parseSolver(const std::string& text) {
  if (text == "gmres") return SolverId::Gmres;
  if (text == "bicgstab") return SolverId::Bicgstab;
  throw ConfigError("unknown solver '" + text + "'");
}

void ExperimentConfig::validate() const {
  if (hs.empty() || kappas.empty()) throw ConfigError("config needs at least one h and one kappa");
  if (paired && hs.size() != kappas.size()) throw ConfigError("paired sweeps need equally long h and kappa lists");
  for (double h : hs) {
    if (!(h > 0.0) || h > 0.5) throw ConfigError("h must lie in (0, 0.5]");
  }
  for (double k : kappas) {
    if (k < 0.0) throw ConfigError("kappa must be >= 0");
  }
  if (preconditioners.empty() || solvers.empty()) throw ConfigError("config needs a preconditioner and a solver");
  for (double e : epsilons) {
    if (!(e >= 1e-12) || e > 0.5) throw ConfigError("epsilon must lie in [1e-12, 0.5]");
  }
  if (p && (*p < 1 || *p > 31)) throw ConfigError("p must lie in [1, 31]");
  if (!(theta > 0.0) || theta > 1.0) throw ConfigError("theta must lie in (0, 1]");
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (maxit < 1) throw ConfigError("maxit must be >= 1");
  if (restart && *restart < 1) throw ConfigError("restart must be >= 1");
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string stripComment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string unquote(const std::string& v, int lineNo) {
  if (v.size() >= 2 && v.front() == '"') {
    if (v.back() != '"') throw ConfigError("line " + std::to_string(lineNo) + ": unterminated string");
    return v.substr(1, v.size() - 2);
  }
  return v;
}

std::vector<std::string> parseValue(const std::string& raw, int lineNo) {
  if (raw.empty()) throw ConfigError("line " + std::to_string(lineNo) + ": missing value");
  if (raw.front() != '[') return {unquote(raw, lineNo)};
  if (raw.back() != ']') throw ConfigError("line " + std::to_string(lineNo) + ": unterminated array");
  std::vector<std::string> items;
  std::string item;
  bool quoted = false;
  for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
    const char c = raw[i];
    if (c == '"') quoted = !quoted;
    if (c == ',' && !quoted) {
      items.push_back(unquote(trim(item), lineNo));
      item.clear();
    } else {
      item += c;
    }
  }
  if (!trim(item).empty()) items.push_back(unquote(trim(item), lineNo));
  return items;
}

double toNumber(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("key '" + key + "': '" + s + "' is not a number");
  }
}

}  // namespace

ConfigDocument ConfigDocument::parse(const std::string& text) {
  ConfigDocument doc;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    line = trim(stripComment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineNo) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineNo) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineNo) + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    doc.values_[full] = parseValue(trim(line.substr(eq + 1)), lineNo);
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

const std::vector<std::string>& ConfigDocument::list(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing key '" + key + "'");
  return it->second;
}

std::string ConfigDocument::string(const std::string& key) const {
  const auto& v = list(key);
  if (v.size() != 1) throw ConfigError("key '" + key + "' must be a single value");
  return v.front();
}

double ConfigDocument::number(const std::string& key) const { return toNumber(string(key), key); }

bool ConfigDocument::boolean(const std::string& key) const {
  const std::string v = string(key);
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("key '" + key + "' must be true or false");
}

std::vector<std::string> ConfigDocument::keys() const {
  std::vector<std::string> k;
  for (const auto& [key, value] : values_) k.push_back(key);
  return k;
}

ExperimentConfig applyDocument(ExperimentConfig c, const ConfigDocument& doc, const std::string& section) {
  const std::string prefix = section.empty() ? "" : section + ".";
  auto numbers = [&](const std::string& key) {
    std::vector<double> out;
    for (const auto& s : doc.list(key)) out.push_back(toNumber(s, key));
    return out;
  };
  for (const std::string& full : doc.keys()) {
    if (full.rfind(prefix, 0) != 0) continue;
    const std::string key = full.substr(prefix.size());
    if (key.find('.') != std::string::npos) continue;
    if (key == "id" || key == "experiment") {
      c.experiment = doc.string(full);
    } else if (key == "problem") {
      c.problem = discretize::parseProblemId(doc.string(full));
    } else if (key == "element") {
      c.element = discretize::parseElementType(doc.string(full));
    } else if (key == "h") {
      c.hs = numbers(full);
    } else if (key == "kappa" || key == "mu") {
      c.kappas = numbers(full);
    } else if (key == "paired") {
      c.paired = doc.boolean(full);
    } else if (key == "preconditioner") {
      c.preconditioners.clear();
      for (const auto& s : doc.list(full)) c.preconditioners.push_back(parsePreconditioner(s));
    } else if (key == "solver") {
      c.solvers.clear();
      for (const auto& s : doc.list(full)) c.solvers.push_back(parseSolver(s));
    } else if (key == "epsilon") {
      c.epsilons = numbers(full);
    } else if (key == "p") {
      c.p = static_cast<int>(doc.number(full));
    } else if (key == "theta") {
      c.theta = doc.number(full);
    } else if (key == "backend") {
      const std::string b = doc.string(full);
      if (b == "fmm") c.backend = fmm::Backend::Fmm;
      else if (b == "direct") c.backend = fmm::Backend::Direct;
      else throw ConfigError("unknown backend '" + b + "'");
    } else if (key == "tol") {
      c.tol = doc.number(full);
    } else if (key == "maxit") {
      c.maxit = static_cast<int>(doc.number(full));
    } else if (key == "restart") {
      c.restart = static_cast<int>(doc.number(full));
    } else if (key == "out_dir") {
      c.outDir = doc.string(full);
    } else if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(doc.number(full));
    } else {
      throw ConfigError("unknown key '" + full + "'");
    }
  }
  c.validate();
  return c;
}

}  // namespace helmfmm::harness
