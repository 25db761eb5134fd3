#include "condlab/linalg.hpp"

#include <cmath>
#include <limits>

#include "condlab/errors.hpp"

namespace condlab {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double norm_inf(std::span<const double> v) {
  double worst = 0.0;
  for (double x : v) {
    const double ax = std::fabs(x);
    if (ax > worst) worst = ax;
  }
  return worst;
}

double frobenius(const Matrix& m) {
  double s = 0.0;
  for (double x : m.data) s += x * x;
  return std::sqrt(s);
}

double SymmetricMatrix::frobenius() const {
  double s = 0.0;
  for (double x : data) s += x * x;
  return std::sqrt(s);
}

namespace {

double offdiag_frobenius(const SymmetricMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.order; ++i)
    for (std::size_t j = i + 1; j < a.order; ++j) s += 2.0 * a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

EigenDecomposition jacobi_eigen(const SymmetricMatrix& m, double tol,
                                std::size_t max_sweeps) {
  const std::size_t n = m.order;
  SymmetricMatrix a = m;
  Matrix v(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  const double scale = a.frobenius();
  const double target = tol * (scale > 0.0 ? scale : 1.0);

  bool converged = n < 2 || offdiag_frobenius(a) <= target;
  for (std::size_t sweep = 0; !converged && sweep < max_sweeps; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Classic stable rotation: t = sign(theta) / (|theta| + sqrt(theta^2+1)).
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0)
                             ? 1.0 / (theta + std::sqrt(theta * theta + 1.0))
                             : 1.0 / (theta - std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double aip = a(i, p);
          const double aiq = a(i, q);
          a(i, p) = aip - s * (aiq + tau * aip);
          a(p, i) = a(i, p);
          a(i, q) = aiq + s * (aip - tau * aiq);
          a(q, i) = a(i, q);
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v(i, p);
          const double viq = v(i, q);
          v(i, p) = vip - s * (viq + tau * vip);
          v(i, q) = viq + s * (vip - tau * viq);
        }
      }
    }
    converged = offdiag_frobenius(a) <= target;
  }
  if (!converged)
    throw NoConvergence("jacobi_eigen: off-diagonal mass did not fall below "
                        "tolerance within the sweep budget");

  // Sort ascending, permuting columns of v alongside.
  EigenDecomposition out;
  out.values.resize(n);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t best = i;
    for (std::size_t j = i + 1; j < n; ++j)
      if (a(idx[j], idx[j]) < a(idx[best], idx[best])) best = j;
    std::swap(idx[i], idx[best]);
  }
  out.vectors = Matrix(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(idx[j], idx[j]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, idx[j]);
  }
  return out;
}

namespace {

double eigen_residual(const SymmetricMatrix& m, const EigenDecomposition& d,
                      std::size_t col) {
  const std::size_t n = m.order;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double mv = 0.0;
    for (std::size_t j = 0; j < n; ++j) mv += m(i, j) * d.vectors(j, col);
    const double r = mv - d.values[col] * d.vectors(i, col);
    s += r * r;
  }
  return std::sqrt(s);
}

}  // namespace

SpectralSummary least_eigenvalue(const SymmetricMatrix& m, double tol) {
  const EigenDecomposition d = jacobi_eigen(m, tol);
  SpectralSummary out;
  out.lambda_min = d.values.front();
  out.lambda_max = d.values.back();
  const double r_min = eigen_residual(m, d, 0);
  const double r_max = eigen_residual(m, d, m.order - 1);
  out.residual = r_min > r_max ? r_min : r_max;
  return out;
}

}  // namespace condlab
