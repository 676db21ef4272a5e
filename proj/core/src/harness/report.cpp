#include "helmfmm/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace helmfmm::harness {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string escapeXml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string optional(const std::optional<double>& v) { return v ? formatDouble(*v) : ""; }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

double parseNumber(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw ConfigError("csv: '" + s + "' is not a number");
}

std::optional<double> parseOptional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parseNumber(s);
}

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void header(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt("%.1f", kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escapeXml(title) << "</text>\n";
}

void plotBox(std::ostringstream& out) {
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight << "\" height=\""
      << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
}

void legend(std::ostringstream& out, const std::vector<std::string>& labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double y = kTop + 10.0 + 18.0 * static_cast<double>(i);
    const double x = kWidth - kRight + 12.0;
    out << "<rect x=\"" << x << "\" y=\"" << fmt("%.1f", y - 8) << "\" width=\"10\" height=\"10\" fill=\""
        << kPalette[i % std::size(kPalette)] << "\"/>\n";
    out << "<text x=\"" << x + 16 << "\" y=\"" << fmt("%.1f", y + 1) << "\">" << escapeXml(labels[i]) << "</text>\n";
  }
}

/// About five round tick values covering [lo, hi].
std::vector<double> linearTicks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
    ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  }
  return ticks;
}

}  // namespace

std::string formatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt("%.17g", v);
}

std::string csvLine(const ResultRow& r) {
  std::string notes = r.notes;
  std::replace(notes.begin(), notes.end(), ',', ';');
  std::replace(notes.begin(), notes.end(), '\n', ' ');
  std::ostringstream out;
  out << r.experiment << ',' << r.problem << ',' << r.element << ',' << formatDouble(r.h) << ','
      << formatDouble(r.kappa) << ',' << optional(r.mu) << ',' << r.preconditioner << ',' << r.solver << ','
      << optional(r.epsilon) << ',' << (r.p ? std::to_string(*r.p) : "") << ',' << optional(r.theta) << ','
      << r.iterations << ',' << (r.converged ? "true" : "false") << ',' << formatDouble(r.finalResidual) << ','
      << formatDouble(r.wallTimeSeconds) << ',' << notes;
  return out.str();
}

std::string toCsv(const std::vector<ResultRow>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) out += csvLine(r) + "\n";
  return out;
}

void writeTextFile(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

void emitCsv(const std::vector<ResultRow>& rows, const std::string& path) { writeTextFile(path, toCsv(rows)); }

std::vector<ResultRow> parseCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ConfigError("csv: unexpected header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 16) throw ConfigError("csv: expected 16 fields, got " + std::to_string(f.size()));
    ResultRow r;
    r.experiment = f[0];
    r.problem = f[1];
    r.element = f[2];
    r.h = parseNumber(f[3]);
    r.kappa = parseNumber(f[4]);
    r.mu = parseOptional(f[5]);
    r.preconditioner = f[6];
    r.solver = f[7];
    r.epsilon = parseOptional(f[8]);
    if (!f[9].empty()) r.p = static_cast<int>(parseNumber(f[9]));
    r.theta = parseOptional(f[10]);
    r.iterations = static_cast<int>(parseNumber(f[11]));
    if (f[12] != "true" && f[12] != "false") throw ConfigError("csv: converged must be true or false");
    r.converged = f[12] == "true";
    r.finalResidual = parseNumber(f[13]);
    r.wallTimeSeconds = parseNumber(f[14]);
    r.notes = f[15];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string svgConvergence(const std::vector<Series>& histories, const std::string& title) {
  std::size_t maxLen = 1;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : histories) {
    maxLen = std::max(maxLen, s.values.size());
    for (double v : s.values) {
      if (v > 0.0 && std::isfinite(v)) {
        lo = std::min(lo, std::log10(v));
        hi = std::max(hi, std::log10(v));
      }
    }
  }
  if (!std::isfinite(lo)) {
    lo = -1.0;
    hi = 0.0;
  }
  Frame f{0.0, std::max(1.0, static_cast<double>(maxLen - 1)), std::floor(lo), std::ceil(hi)};
  if (f.y1 <= f.y0) f.y1 = f.y0 + 1.0;

  std::ostringstream out;
  header(out, title);
  plotBox(out);
  for (int d = static_cast<int>(f.y0); d <= static_cast<int>(f.y1); ++d) {
    const double y = f.py(d);
    out << "<line x1=\"" << kLeft << "\" x2=\"" << kWidth - kRight << "\" y1=\"" << fmt("%.2f", y) << "\" y2=\""
        << fmt("%.2f", y) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt("%.2f", y + 4) << "\" text-anchor=\"end\">1e" << d
        << "</text>\n";
  }
  for (double t : linearTicks(f.x0, f.x1)) {
    out << "<text x=\"" << fmt("%.2f", f.px(t)) << "\" y=\"" << kHeight - kBottom + 16
        << "\" text-anchor=\"middle\">" << fmt("%g", t) << "</text>\n";
  }
  out << "<text x=\"" << fmt("%.1f", (kLeft + kWidth - kRight) / 2) << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">iteration</text>\n";
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < histories.size(); ++i) {
    labels.push_back(histories[i].label);
    out << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << kPalette[i % std::size(kPalette)]
        << "\" points=\"";
    bool first = true;
    for (std::size_t k = 0; k < histories[i].values.size(); ++k) {
      const double v = histories[i].values[k];
      if (!(v > 0.0) || !std::isfinite(v)) continue;
      if (!first) out << ' ';
      out << fmt("%.2f", f.px(static_cast<double>(k))) << ',' << fmt("%.2f", f.py(std::log10(v)));
      first = false;
    }
    out << "\"/>\n";
  }
  legend(out, labels);
  out << "</svg>\n";
  return out.str();
}

void emitSvgConvergence(const std::vector<Series>& histories, const std::string& path, const std::string& title) {
  writeTextFile(path, svgConvergence(histories, title));
}

std::string svgScatter(const std::vector<PointSet>& sets, const std::string& title) {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  for (const auto& s : sets) {
    for (const Complex& z : s.points) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) continue;
      x0 = std::min(x0, z.real());
      x1 = std::max(x1, z.real());
      y0 = std::min(y0, z.imag());
      y1 = std::max(y1, z.imag());
    }
  }
  const double padX = 0.05 * std::max(x1 - x0, 1e-12);
  const double padY = 0.05 * std::max(y1 - y0, 1e-12);
  Frame f{x0 - padX, x1 + padX, y0 - padY, y1 + padY};

  std::ostringstream out;
  header(out, title);
  plotBox(out);
  out << "<line x1=\"" << kLeft << "\" x2=\"" << kWidth - kRight << "\" y1=\"" << fmt("%.2f", f.py(0.0))
      << "\" y2=\"" << fmt("%.2f", f.py(0.0)) << "\" stroke=\"#999999\"/>\n";
  out << "<line y1=\"" << kTop << "\" y2=\"" << kHeight - kBottom << "\" x1=\"" << fmt("%.2f", f.px(0.0))
      << "\" x2=\"" << fmt("%.2f", f.px(0.0)) << "\" stroke=\"#999999\"/>\n";
  for (double t : linearTicks(f.x0, f.x1)) {
    out << "<text x=\"" << fmt("%.2f", f.px(t)) << "\" y=\"" << kHeight - kBottom + 16
        << "\" text-anchor=\"middle\">" << fmt("%g", t) << "</text>\n";
  }
  for (double t : linearTicks(f.y0, f.y1)) {
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt("%.2f", f.py(t) + 4) << "\" text-anchor=\"end\">"
        << fmt("%g", t) << "</text>\n";
  }
  out << "<text x=\"" << fmt("%.1f", (kLeft + kWidth - kRight) / 2) << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">Re</text>\n";
  out << "<text x=\"16\" y=\"" << fmt("%.1f", (kTop + kHeight - kBottom) / 2) << "\">Im</text>\n";
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    labels.push_back(sets[i].label);
    out << "<g fill=\"" << kPalette[i % std::size(kPalette)] << "\">\n";
    for (const Complex& z : sets[i].points) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) continue;
      out << "<circle cx=\"" << fmt("%.2f", f.px(z.real())) << "\" cy=\"" << fmt("%.2f", f.py(z.imag()))
          << "\" r=\"1.8\"/>\n";
    }
    out << "</g>\n";
  }
  legend(out, labels);
  out << "</svg>\n";
  return out.str();
}

void emitSvgScatter(const std::vector<PointSet>& sets, const std::string& path, const std::string& title) {
  writeTextFile(path, svgScatter(sets, title));
}

void emitEigenvalueCsv(const CVector& eigenvalues, const std::string& path) {
  std::string text = "re,im\n";
  for (const Complex& z : eigenvalues) text += formatDouble(z.real()) + "," + formatDouble(z.imag()) + "\n";
  writeTextFile(path, text);
}

}  // namespace helmfmm::harness
