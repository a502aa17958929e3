#pragma once

#include <cstddef>
#include <vector>

namespace introsumm {

/// Dense row-major matrix of doubles. Small on purpose: the encoder kernels
/// below are the only consumers and they need exactly these operations.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  double* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const double* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }
};

// OpenMP over output rows; each element is a serially accumulated dot
// product, so results are bit-identical to the serial reference.
Matrix matmul(const Matrix& a, const Matrix& b);     // a * b
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // a * b^T
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // a^T * b

void add_row_vector(Matrix& m, const std::vector<double>& bias);
bool all_finite(const Matrix& m);

namespace reference {
/// Serial reference kernel kept for tests and the benchmark target.
Matrix matmul(const Matrix& a, const Matrix& b);
}  // namespace reference

}  // namespace introsumm
