#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "chiralwg/types.hpp"

namespace chiralwg::hilbert {

// Basis convention: per atom, index 0 = |e>, index 1 = |g>.  For n atoms the
// product basis index of |s_0 s_1 ... s_{n-1}> is sum_j s_j * 2^(n-1-j), i.e.
// atom 0 is the leftmost tensor factor.  Hard cap n <= 10 (dense only).
inline constexpr std::size_t max_atoms = 10;

Matrix sigma_z();
Matrix sigma_minus();
Matrix sigma_plus();

Matrix kron(const Matrix& a, const Matrix& b);

// I ⊗ ... ⊗ op ⊗ ... ⊗ I with op at `site` (0-based) of `n_atoms` factors.
Matrix embed_operator(const Matrix& op, std::size_t site, std::size_t n_atoms);

// Orthonormal basis of {v : m v = 0}.  Singular values <= tol * sigma_max
// count as zero; a zero matrix yields the full space.
Matrix null_space(const Matrix& m, double tol = 1e-12);

struct EighResult {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // columns, orthonormal
};

// Hermitian eigendecomposition; rejects m with ||m - m†|| > 1e-10 ||m||.
EighResult eigh(const Matrix& m);

Vector normalized(const Vector& v);

// Canonical kets: label chars are 'e'/'g', atom 0 first ("eg" = |e>_0 |g>_1).
std::size_t ket_index(std::string_view label);
std::string ket_label(std::size_t index, std::size_t n_atoms);
Vector basis_ket(std::size_t index, std::size_t dim);

}  // namespace chiralwg::hilbert
