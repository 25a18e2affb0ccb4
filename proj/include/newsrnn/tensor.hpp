#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace newsrnn {

// Dense row-major matrix of doubles. Column vectors are rows x 1.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::size_t size() const { return data.size(); }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
  double squared_norm() const {
    double s = 0.0;
    for (double v : data) s += v * v;
    return s;
  }
  void fill(double v) {
    for (auto& x : data) x = v;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

// out += m * x
inline void gemv_add(const Matrix& m, std::span<const double> x, std::span<double> out) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    double s = 0.0;
    const double* row = m.data.data() + r * m.cols;
    for (std::size_t c = 0; c < m.cols; ++c) s += row[c] * x[c];
    out[r] += s;
  }
}

// out += m^T * x
inline void gemv_t_add(const Matrix& m, std::span<const double> x, std::span<double> out) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double* row = m.data.data() + r * m.cols;
    for (std::size_t c = 0; c < m.cols; ++c) out[c] += row[c] * x[r];
  }
}

// g += a * b^T
inline void outer_add(Matrix& g, std::span<const double> a, std::span<const double> b) {
  for (std::size_t r = 0; r < g.rows; ++r) {
    double* row = g.data.data() + r * g.cols;
    for (std::size_t c = 0; c < g.cols; ++c) row[c] += a[r] * b[c];
  }
}

}  // namespace newsrnn
