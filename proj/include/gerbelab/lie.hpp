#pragma once

#include "gerbelab/numeric.hpp"

#include <random>

namespace gerbelab::lie {

/// Eigendecomposition of a unitary with deterministic conventions.
/// columns of `frames` are orthonormal eigenvectors, `phases[k]` in
/// [0, 2*pi) with eigenvalue exp(i*phases[k]).  Columns are sorted by
/// phase (ascending); within a degenerate cluster the basis is fixed by
/// QR against the raw solver output plus a phase normalization, so
/// repeated calls on the same matrix give identical frames.
struct UnitCircleSpectrum {
  std::vector<double> phases;  // ascending, in [0, 2*pi)
  Matrix frames;               // n x n, column k pairs with phases[k]
};

/// Decomposes a unitary g.  Eigenvalues closer than `cluster_width` in
/// circular distance are treated as one degenerate cluster and the
/// corresponding columns are re-orthonormalized together.
UnitCircleSpectrum eig_unitary(const Matrix& g, double cluster_width = 1e-8);

/// Branch logarithm: X = log g with spectrum on the arc
/// (arg(lambda) - 2*pi, arg(lambda)), i.e. the cut passes through the
/// unit-circle point `lambda`.  X is skew-hermitian and exp(X) = g.
/// Throws branch_error if an eigenvalue of g lies within `guard` of
/// lambda (in phase).
Matrix log_branch(const Matrix& g, Complex lambda, double guard = 1e-8);

/// Matrix exponential of a skew-hermitian X via its unitary
/// diagonalization (exact for the class we use it on).
Matrix exp_skew(const Matrix& x);

bool is_unitary(const Matrix& g, double tol = 1e-10);
bool is_skew_hermitian(const Matrix& x, double tol = 1e-10);

/// Haar-distributed random unitary (QR of a Ginibre matrix with the
/// R-diagonal phase correction).
Matrix random_unitary(int n, std::mt19937_64& rng);

/// Haar unitary projected to det = 1.
Matrix random_special_unitary(int n, std::mt19937_64& rng);

/// Random skew-hermitian matrix with entries of scale `scale`.
Matrix random_skew_hermitian(int n, double scale, std::mt19937_64& rng);

/// su(2) basis: pauli(k) = sigma_k, k = 1, 2, 3.
Matrix pauli(int k);

}  // namespace gerbelab::lie
