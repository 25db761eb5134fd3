#pragma once

// Small dense linear algebra: row-major matrices, symmetric storage with an
// exact-symmetry guarantee, and a cyclic Jacobi eigensolver with a residual
// certificate. Problem sizes here are tiny (matrix order = sample count), so
// clarity wins over blocking tricks.

#include <cstddef>
#include <span>
#include <vector>

namespace condlab {

using Vec = std::vector<double>;

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
};

// Dense symmetric matrix. Construction mirrors the upper triangle into the
// lower one, so stored asymmetry is exactly zero; `symmetrize` is what every
// builder in this library calls after filling i <= j.
struct SymmetricMatrix {
  std::size_t order = 0;
  std::vector<double> data;  // row-major, order x order

  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t n, double fill = 0.0)
      : order(n), data(n * n, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * order + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data[i * order + j];
  }

  void symmetrize() {
    for (std::size_t i = 0; i < order; ++i)
      for (std::size_t j = i + 1; j < order; ++j) data[j * order + i] = data[i * order + j];
  }

  double max_asymmetry() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < order; ++i)
      for (std::size_t j = i + 1; j < order; ++j) {
        const double diff = data[i * order + j] - data[j * order + i];
        if (diff > worst) worst = diff;
        if (-diff > worst) worst = -diff;
      }
    return worst;
  }

  double frobenius() const;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double norm_inf(std::span<const double> v);
double frobenius(const Matrix& m);

struct SpectralSummary {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  // Max over the two extreme eigenpairs of ||M v - lambda v||_2, a certificate
  // that the reported values belong to actual eigenvectors.
  double residual = 0.0;
};

struct EigenDecomposition {
  Vec values;       // ascending
  Matrix vectors;   // column j pairs with values[j]
};

// Cyclic Jacobi for symmetric matrices. Converged when the off-diagonal
// Frobenius mass drops below tol * ||M||_F; throws NoConvergence if that does
// not happen within max_sweeps full sweeps.
EigenDecomposition jacobi_eigen(const SymmetricMatrix& m, double tol = 1e-12,
                                std::size_t max_sweeps = 64);

SpectralSummary least_eigenvalue(const SymmetricMatrix& m, double tol = 1e-12);

}  // namespace condlab
