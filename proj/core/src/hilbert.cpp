#include "chiralwg/hilbert.hpp"

#include <Eigen/SVD>

#include "chiralwg/errors.hpp"

namespace chiralwg::hilbert {

Matrix sigma_z() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

Matrix sigma_minus() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = 1.0;  // |g><e|
  return m;
}

Matrix sigma_plus() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix embed_operator(const Matrix& op, std::size_t site, std::size_t n_atoms) {
  if (op.rows() != 2 || op.cols() != 2)
    throw DimensionError("embed_operator: single-atom operator must be 2x2");
  if (n_atoms == 0 || n_atoms > max_atoms)
    throw DimensionError("embed_operator: atom count outside [1, 10]");
  if (site >= n_atoms)
    throw DimensionError("embed_operator: site index out of range");
  Matrix out = Matrix::Identity(1, 1);
  for (std::size_t k = 0; k < n_atoms; ++k)
    out = kron(out, k == site ? op : Matrix::Identity(2, 2));
  return out;
}

Matrix null_space(const Matrix& m, double tol) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  if (smax == 0.0) return Matrix::Identity(m.cols(), m.cols());
  Eigen::Index first_zero = sv.size();
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= tol * smax) {
      first_zero = i;
      break;
    }
  }
  // trailing V columns beyond the singular-value count are exact kernel too
  const Eigen::Index kdim = m.cols() - first_zero;
  return svd.matrixV().rightCols(kdim);
}

EighResult eigh(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("eigh: matrix must be square");
  const double scale = m.norm();
  if ((m - m.adjoint()).norm() > 1e-10 * (scale > 0 ? scale : 1.0))
    throw NonHermitianError("eigh: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es((m + m.adjoint()) / 2.0);
  return {es.eigenvalues(), es.eigenvectors()};
}

Vector normalized(const Vector& v) {
  const double n = v.norm();
  if (n == 0.0) throw DimensionError("normalized: zero vector");
  return v / n;
}

std::size_t ket_index(std::string_view label) {
  if (label.empty() || label.size() > max_atoms)
    throw DimensionError("ket_index: label length outside [1, 10]");
  std::size_t idx = 0;
  for (char c : label) {
    if (c != 'e' && c != 'g')
      throw DimensionError("ket_index: label chars must be 'e' or 'g'");
    idx = idx * 2 + (c == 'g' ? 1 : 0);
  }
  return idx;
}

std::string ket_label(std::size_t index, std::size_t n_atoms) {
  if (n_atoms == 0 || n_atoms > max_atoms)
    throw DimensionError("ket_label: atom count outside [1, 10]");
  std::string s(n_atoms, 'e');
  for (std::size_t k = 0; k < n_atoms; ++k)
    if (index & (std::size_t{1} << (n_atoms - 1 - k))) s[k] = 'g';
  return s;
}

Vector basis_ket(std::size_t index, std::size_t dim) {
  if (index >= dim) throw DimensionError("basis_ket: index out of range");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return v;
}

}  // namespace chiralwg::hilbert
