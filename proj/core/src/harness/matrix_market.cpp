#include "helmfmm/harness/matrix_market.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "helmfmm/harness/report.hpp"

namespace helmfmm::harness {

namespace {

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

/// Reads the banner, skips comments and returns a stream positioned at the
/// size line.
std::istringstream openBody(const std::string& text, const std::string& expectedFormat) {
  std::istringstream in(text);
  std::string banner;
  if (!std::getline(in, banner)) throw IoError("matrix market: empty input");
  std::istringstream words(lower(banner));
  std::string tag, object, format, field, symmetry;
  words >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%matrixmarket" || object != "matrix") throw IoError("matrix market: bad banner '" + banner + "'");
  if (format != expectedFormat) throw IoError("matrix market: expected " + expectedFormat + " format");
  if (field != "complex" || symmetry != "general") throw IoError("matrix market: only complex general is supported");
  std::string rest;
  std::ostringstream body;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '%') continue;
    body << line << '\n';
  }
  return std::istringstream(body.str());
}

}  // namespace

std::string toMatrixMarket(const sparse::CsrMatrix& a) {
  std::string out = "%%MatrixMarket matrix coordinate complex general\n";
  out += std::to_string(a.rows()) + " " + std::to_string(a.cols()) + " " + std::to_string(a.nnz()) + "\n";
  const auto& off = a.rowOffsets();
  const auto& col = a.columns();
  const auto& val = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      out += std::to_string(i + 1) + " " + std::to_string(col[k] + 1) + " " + formatDouble(val[k].real()) + " " +
             formatDouble(val[k].imag()) + "\n";
    }
  }
  return out;
}

void writeMatrixMarket(const sparse::CsrMatrix& a, const std::string& path) { writeTextFile(path, toMatrixMarket(a)); }

sparse::CsrMatrix parseMatrixMarket(const std::string& text) {
  auto in = openBody(text, "coordinate");
  std::size_t rows = 0, cols = 0, nnz = 0;
  if (!(in >> rows >> cols >> nnz)) throw IoError("matrix market: bad size line");
  std::vector<sparse::Triplet> triplets;
  triplets.reserve(nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    std::size_t i = 0, j = 0;
    double re = 0.0, im = 0.0;
    if (!(in >> i >> j >> re >> im)) throw IoError("matrix market: truncated entry list");
    if (i < 1 || i > rows || j < 1 || j > cols) throw IoError("matrix market: index out of range");
    triplets.push_back({i - 1, j - 1, {re, im}});
  }
  return sparse::CsrMatrix::fromTriplets(rows, cols, std::move(triplets));
}

sparse::CsrMatrix readMatrixMarket(const std::string& path) { return parseMatrixMarket(readFile(path)); }

std::string vectorToMatrixMarket(const CVector& b) {
  std::string out = "%%MatrixMarket matrix array complex general\n";
  out += std::to_string(b.size()) + " 1\n";
  for (const Complex& v : b) out += formatDouble(v.real()) + " " + formatDouble(v.imag()) + "\n";
  return out;
}

CVector parseMatrixMarketVector(const std::string& text) {
  auto in = openBody(text, "array");
  std::size_t rows = 0, cols = 0;
  if (!(in >> rows >> cols) || cols != 1) throw IoError("matrix market: expected an n x 1 array");
  CVector b(rows);
  for (auto& v : b) {
    double re = 0.0, im = 0.0;
    if (!(in >> re >> im)) throw IoError("matrix market: truncated array");
    v = {re, im};
  }
  return b;
}

void exportMatrix(const sparse::CsrMatrix& a, const CVector& b, const std::string& stem) {
  if (b.size() != a.rows()) throw SizeError("exportMatrix: right-hand side length differs from the row count");
  writeMatrixMarket(a, stem + ".mtx");
  writeTextFile(stem + "_b.mtx", vectorToMatrixMarket(b));
}

}  // namespace helmfmm::harness
