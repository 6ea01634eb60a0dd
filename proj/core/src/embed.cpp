#include "qfem/embed.hpp"

#include <cmath>
#include <sstream>

namespace qfem::embed {

namespace {

void check_config(const PolyConfig& cfg) {
  if (cfg.degree < 1 || cfg.degree > 3) {
    std::ostringstream msg;
    msg << "polynomial degree must be 1, 2 or 3, got " << cfg.degree;
    throw ConfigError(msg.str());
  }
}

std::size_t multiset_count(std::size_t m, std::size_t k) {
  // C(m + k - 1, k), number of monomials of exact degree k in m variables
  std::size_t num = 1, den = 1;
  for (std::size_t i = 0; i < k; ++i) {
    num *= m + k - 1 - i;
    den *= i + 1;
  }
  return num / den;
}

// Appends all exact-degree-k monomials of x in lexicographic index order.
void append_degree(const Vec& x, int k, Vec& out) {
  std::size_t m = x.size();
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  while (true) {
    double prod = 1.0;
    for (std::size_t i : idx) prod *= x[i];
    out.push_back(prod);
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - 1) --pos;
    if (pos < 0) break;
    std::size_t next = idx[static_cast<std::size_t>(pos)] + 1;
    for (int j = pos; j < k; ++j) idx[static_cast<std::size_t>(j)] = next;
  }
}

}  // namespace

std::size_t expanded_dim(std::size_t input_dim, const PolyConfig& cfg) {
  check_config(cfg);
  if (input_dim == 0) throw DataError("poly_expand: empty input");
  std::size_t total = cfg.include_bias ? 1 : 0;
  int lo = cfg.terms == TermMode::kExactDegreeOnly ? cfg.degree : 1;
  for (int k = lo; k <= cfg.degree; ++k)
    total += multiset_count(input_dim, static_cast<std::size_t>(k));
  return total;
}

Vec poly_expand(const Vec& x, const PolyConfig& cfg) {
  check_config(cfg);
  if (x.empty()) throw DataError("poly_expand: empty input");
  if (!all_finite(x)) throw DataError("poly_expand: non-finite input");

  Vec out;
  out.reserve(expanded_dim(x.size(), cfg));
  if (cfg.include_bias) out.push_back(1.0);
  int lo = cfg.terms == TermMode::kExactDegreeOnly ? cfg.degree : 1;
  for (int k = lo; k <= cfg.degree; ++k) append_degree(x, k, out);
  return out;
}

Matrix gram(const Vec& z) {
  if (z.empty()) throw DataError("gram: empty input");
  return outer(z, z);
}

Matrix regularize(const Matrix& k, double epsilon) {
  if (k.rows() != k.cols()) throw NumericalError("regularize: matrix must be square");
  if (!(epsilon > 0.0)) throw ConfigError("regularize: epsilon must be positive");
  Matrix out = k;
  for (std::size_t i = 0; i < out.rows(); ++i) out(i, i) += epsilon;
  return out;
}

EigenDecomposition sym_eig(const Matrix& symmetric) { return jacobi_eigen(symmetric); }

Matrix matrix_sqrt(const Matrix& spd) {
  EigenDecomposition d = sym_eig(spd);
  std::size_t n = spd.rows();
  double lmax = d.eigenvalues.empty() ? 0.0 : d.eigenvalues.front();
  double floor = -1e-10 * (lmax > 1.0 ? lmax : 1.0);
  Vec roots(n);
  for (std::size_t i = 0; i < n; ++i) {
    double lam = d.eigenvalues[i];
    if (lam < floor) {
      std::ostringstream msg;
      msg << "matrix_sqrt: negative eigenvalue " << lam;
      throw NumericalError(msg.str());
    }
    roots[i] = lam > 0.0 ? std::sqrt(lam) : 0.0;
  }
  // V diag(roots) V^T
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        s += d.eigenvectors(i, k) * roots[k] * d.eigenvectors(j, k);
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

Matrix to_density(const Matrix& sqrt_spd) {
  if (sqrt_spd.rows() != sqrt_spd.cols())
    throw NumericalError("to_density: matrix must be square");
  double tr = 0.0;
  for (std::size_t i = 0; i < sqrt_spd.rows(); ++i) tr += sqrt_spd(i, i);
  if (!(tr > 0.0)) throw NumericalError("to_density: non-positive trace");
  Matrix rho = sqrt_spd;
  for (std::size_t i = 0; i < rho.rows(); ++i)
    for (std::size_t j = 0; j < rho.cols(); ++j) rho(i, j) /= tr;
  return rho;
}

EmbeddedState hs_vectorize(const Matrix& rho) {
  if (rho.rows() != rho.cols()) throw NumericalError("hs_vectorize: matrix must be square");
  std::size_t n = rho.rows();
  double purity = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) purity += rho(i, j) * rho(j, i);
  if (!(purity > 0.0)) throw NumericalError("hs_vectorize: zero norm");
  double scale = 1.0 / std::sqrt(purity);
  EmbeddedState state;
  state.purity = purity;
  state.amplitudes.reserve(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) state.amplitudes.push_back(rho(i, j) * scale);
  return state;
}

Vec spectral_project(const Vec& z, const EigenDecomposition& decomp, std::size_t k) {
  std::size_t n = decomp.eigenvectors.rows();
  if (z.size() != n) throw DataError("spectral_project: dimension mismatch");
  if (k == 0 || k > n) {
    std::ostringstream msg;
    msg << "spectral_project: k must be in [1, " << n << "], got " << k;
    throw ConfigError(msg.str());
  }
  Vec out(k);
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += decomp.eigenvectors(i, j) * z[i];
    out[j] = s;
  }
  return out;
}

Matrix embed_density(const Vec& x, const PolyConfig& cfg, double epsilon) {
  Vec z = poly_expand(x, cfg);
  Matrix k = regularize(gram(z), epsilon);
  return to_density(matrix_sqrt(k));
}

EmbeddedState embed(const Vec& x, const PolyConfig& cfg, double epsilon) {
  return hs_vectorize(embed_density(x, cfg, epsilon));
}

}  // namespace qfem::embed
