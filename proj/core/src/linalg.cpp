#include "qfem/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "qfem/parallel.hpp"

namespace qfem {

namespace {
std::atomic<int> g_max_threads{0};
}

int max_threads() {
  int n = g_max_threads.load();
  if (n > 0) return n;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_max_threads(int n) { g_max_threads.store(n); }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw NumericalError("matrix product: inner dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Vec operator*(const Matrix& a, const Vec& x) {
  if (a.cols() != x.size()) throw NumericalError("matrix-vector product: dimension mismatch");
  Vec y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix outer(const Vec& a, const Vec& b) {
  Matrix m(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
  return m;
}

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw NumericalError("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

bool all_finite(const Vec& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

bool all_finite(const Matrix& a) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (!std::isfinite(a(i, j))) return false;
  return true;
}

namespace {

double offdiag_norm(const Matrix& a) {
  double s = 0.0;
  std::size_t n = a.rows();
  for (std::size_t p = 0; p + 1 < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q) s += a(p, q) * a(p, q) + a(q, p) * a(q, p);
  return std::sqrt(s);
}

// One Givens rotation zeroing A(p,q), accumulating into V.
void jacobi_rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  double apq = a(p, q);
  if (apq == 0.0) return;
  double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t;
  if (theta >= 0.0)
    t = 1.0 / (theta + std::sqrt(theta * theta + 1.0));
  else
    t = -1.0 / (-theta + std::sqrt(theta * theta + 1.0));
  double c = 1.0 / std::sqrt(t * t + 1.0);
  double s = t * c;

  std::size_t n = a.rows();
  double app = a(p, p), aqq = a(q, q);
  a(p, p) = app - t * apq;
  a(q, q) = aqq + t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    double akp = a(k, p), akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(p, k) = a(k, p);
    a(k, q) = s * akp + c * akq;
    a(q, k) = a(k, q);
  }
  for (std::size_t k = 0; k < n; ++k) {
    double vkp = v(k, p), vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

EigenDecomposition jacobi_eigen(const Matrix& symmetric, int max_sweeps) {
  if (symmetric.rows() != symmetric.cols())
    throw NumericalError("jacobi_eigen: matrix must be square");
  if (!all_finite(symmetric)) throw NumericalError("jacobi_eigen: non-finite entries");

  std::size_t n = symmetric.rows();
  Matrix a = symmetric;
  Matrix v = Matrix::identity(n);

  double fnorm = frobenius_norm(a);
  if (fnorm > 0.0) {
    const double tol = 1e-12 * fnorm;
    int sweep = 0;
    double off = offdiag_norm(a);
    while (off > tol) {
      if (sweep++ >= max_sweeps) {
        std::ostringstream msg;
        msg << "jacobi_eigen: no convergence after " << max_sweeps
            << " sweeps, off-diagonal residual " << off;
        throw NumericalError(msg.str());
      }
      for (std::size_t p = 0; p + 1 < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q) jacobi_rotate(a, v, p, q);
      off = offdiag_norm(a);
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&a](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t src = order[j];
    out.eigenvalues[j] = a(src, src);
    std::size_t imax = 0;
    double amax = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double mag = std::abs(v(i, src));
      if (mag > amax) {
        amax = mag;
        imax = i;
      }
    }
    double flip = v(imax, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = flip * v(i, src);
  }
  return out;
}

Cholesky::Cholesky(const Matrix& spd) {
  if (spd.rows() != spd.cols()) throw NumericalError("cholesky: matrix must be square");
  std::size_t n = spd.rows();
  l_ = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = spd(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
    if (!(d > 0.0)) {
      std::ostringstream msg;
      msg << "cholesky: non-positive pivot " << d << " at column " << j
          << " (matrix is not positive definite)";
      throw NumericalError(msg.str());
    }
    double ljj = std::sqrt(d);
    l_(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = spd(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
      l_(i, j) = s / ljj;
    }
  }
}

Vec Cholesky::solve(const Vec& rhs) const {
  std::size_t n = l_.rows();
  if (rhs.size() != n) throw NumericalError("cholesky solve: dimension mismatch");
  Vec y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[i];
    for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * y[k];
    y[i] = s / l_(i, i);
  }
  Vec x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l_(k, ii) * x[k];
    x[ii] = s / l_(ii, ii);
  }
  return x;
}

}  // namespace qfem
