#pragma once

#include <cstddef>

#include "qfem/linalg.hpp"

namespace qfem::embed {

enum class TermMode {
  kAllUpToDegree,    // every monomial of total degree 1..p
  kExactDegreeOnly,  // only the degree-p monomials
};

struct PolyConfig {
  int degree = 2;
  bool include_bias = false;
  TermMode terms = TermMode::kAllUpToDegree;
};

// Number of monomials produced by poly_expand, closed form.
std::size_t expanded_dim(std::size_t input_dim, const PolyConfig& cfg);

// Monomial feature map in graded-lex order: for each degree k the index
// tuples i1 <= ... <= ik in lexicographic order, e.g. degree 2 on
// (x1, x2) -> [x1, x2, x1^2, x1*x2, x2^2]. A leading constant 1 is
// emitted iff include_bias.
Vec poly_expand(const Vec& x, const PolyConfig& cfg);

// Rank-one Gram matrix z z^T.
Matrix gram(const Vec& z);

// K + epsilon * I; shifts every eigenvalue up by epsilon so the result
// is strictly positive definite.
Matrix regularize(const Matrix& k, double epsilon);

// Sorted, sign-fixed spectral decomposition (see jacobi_eigen).
EigenDecomposition sym_eig(const Matrix& symmetric);

// Principal square root V diag(sqrt(lambda)) V^T. Eigenvalues within
// roundoff below zero are clamped; genuinely negative ones are an error.
Matrix matrix_sqrt(const Matrix& spd);

// rho = S / Tr(S): unit trace, same eigenvectors.
Matrix to_density(const Matrix& sqrt_spd);

struct EmbeddedState {
  Vec amplitudes;  // column-major flattening of rho, scaled to unit norm
  double purity;   // Tr(rho^2)
};

// Hilbert-Schmidt vectorization vec(rho) / sqrt(Tr(rho^2)).
EmbeddedState hs_vectorize(const Matrix& rho);

// Coordinates of z in the top-k eigenbasis.
Vec spectral_project(const Vec& z, const EigenDecomposition& decomp, std::size_t k);

// Full pipeline: expand, Gram, regularize, matrix sqrt, density,
// vectorize.
EmbeddedState embed(const Vec& x, const PolyConfig& cfg, double epsilon = 1e-6);

// Same pipeline, stopping at the density matrix.
Matrix embed_density(const Vec& x, const PolyConfig& cfg, double epsilon = 1e-6);

}  // namespace qfem::embed
