#include "introsumm/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace introsumm {

namespace {
void check_mul(int an, int bn, const char* what) {
  if (an != bn) throw std::invalid_argument(std::string("matmul shape mismatch: ") + what);
}
}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_mul(a.cols, b.rows, "a*b");
  Matrix out(a.rows, b.cols);
#pragma omp parallel for schedule(static) if (a.rows > 1)
  for (int i = 0; i < a.rows; ++i) {
    const double* ar = a.row(i);
    double* orow = out.row(i);
    for (int k = 0; k < a.cols; ++k) {
      const double av = ar[k];
      if (av == 0.0) continue;
      const double* br = b.row(k);
      for (int j = 0; j < b.cols; ++j) orow[j] += av * br[j];
    }
  }
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  check_mul(a.cols, b.cols, "a*b^T");
  Matrix out(a.rows, b.rows);
#pragma omp parallel for schedule(static) if (a.rows > 1)
  for (int i = 0; i < a.rows; ++i) {
    const double* ar = a.row(i);
    double* orow = out.row(i);
    for (int j = 0; j < b.rows; ++j) {
      const double* br = b.row(j);
      double acc = 0.0;
      for (int k = 0; k < a.cols; ++k) acc += ar[k] * br[k];
      orow[j] = acc;
    }
  }
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  check_mul(a.rows, b.rows, "a^T*b");
  Matrix out(a.cols, b.cols);
#pragma omp parallel for schedule(static) if (a.cols > 1)
  for (int i = 0; i < a.cols; ++i) {
    double* orow = out.row(i);
    for (int k = 0; k < a.rows; ++k) {
      const double av = a(k, i);
      if (av == 0.0) continue;
      const double* br = b.row(k);
      for (int j = 0; j < b.cols; ++j) orow[j] += av * br[j];
    }
  }
  return out;
}

void add_row_vector(Matrix& m, const std::vector<double>& bias) {
  if (static_cast<int>(bias.size()) != m.cols)
    throw std::invalid_argument("add_row_vector: bias length != cols");
  for (int i = 0; i < m.rows; ++i) {
    double* r = m.row(i);
    for (int j = 0; j < m.cols; ++j) r[j] += bias[j];
  }
}

bool all_finite(const Matrix& m) {
  for (double v : m.data)
    if (!std::isfinite(v)) return false;
  return true;
}

namespace reference {
Matrix matmul(const Matrix& a, const Matrix& b) {
  check_mul(a.cols, b.rows, "a*b");
  Matrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    const double* ar = a.row(i);
    double* orow = out.row(i);
    for (int k = 0; k < a.cols; ++k) {
      const double av = ar[k];
      if (av == 0.0) continue;
      const double* br = b.row(k);
      for (int j = 0; j < b.cols; ++j) orow[j] += av * br[j];
    }
  }
  return out;
}
}  // namespace reference

}  // namespace introsumm
