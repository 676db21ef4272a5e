#pragma once

#include <string>

#include "helmfmm/sparse.hpp"

namespace helmfmm::harness {

/// `%%MatrixMarket matrix coordinate complex general` with 1-based indices.
std::string toMatrixMarket(const sparse::CsrMatrix& a);
void writeMatrixMarket(const sparse::CsrMatrix& a, const std::string& path);
sparse::CsrMatrix parseMatrixMarket(const std::string& text);
sparse::CsrMatrix readMatrixMarket(const std::string& path);

/// Dense n×1 right-hand side as `%%MatrixMarket matrix array complex general`.
std::string vectorToMatrixMarket(const CVector& b);
CVector parseMatrixMarketVector(const std::string& text);

/// Writes A to `<stem>.mtx` and b to `<stem>_b.mtx`.
void exportMatrix(const sparse::CsrMatrix& a, const CVector& b, const std::string& stem);

}  // namespace helmfmm::harness
