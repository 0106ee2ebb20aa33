#pragma once

#include <cstddef>
#include <vector>

#include "circumnav/errors.hpp"

namespace circumnav {

// Dense row-major matrix of doubles. Just enough linear algebra for the
// estimator; sized once and reused, so no expression templates needed.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  void zero() { std::fill(data.begin(), data.end(), 0.0); }
};

// y += M x
inline void matvec_acc(const Matrix& m, const double* x, double* y) {
  const double* p = m.data.data();
  for (std::size_t r = 0; r < m.rows; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) acc += p[c] * x[c];
    y[r] += acc;
    p += m.cols;
  }
}

// y += M^T x
inline void matvec_transpose_acc(const Matrix& m, const double* x, double* y) {
  const double* p = m.data.data();
  for (std::size_t r = 0; r < m.rows; ++r) {
    double xr = x[r];
    for (std::size_t c = 0; c < m.cols; ++c) y[c] += p[c] * xr;
    p += m.cols;
  }
}

// M += a x^T  (a: rows, x: cols)
inline void outer_acc(Matrix& m, const double* a, const double* x) {
  double* p = m.data.data();
  for (std::size_t r = 0; r < m.rows; ++r) {
    double ar = a[r];
    for (std::size_t c = 0; c < m.cols; ++c) p[c] += ar * x[c];
    p += m.cols;
  }
}

}  // namespace circumnav
