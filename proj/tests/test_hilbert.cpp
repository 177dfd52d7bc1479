#include <doctest.h>

#include <cmath>

#include "chiralwg/errors.hpp"
#include "chiralwg/hilbert.hpp"

using namespace chiralwg;
using namespace chiralwg::hilbert;

TEST_CASE("Pauli lowering operator maps excited to ground") {
  const Matrix sm = sigma_minus();
  CHECK(sm(1, 0) == Complex(1.0, 0.0));
  CHECK(sm(0, 0) == Complex(0.0, 0.0));
  CHECK(sm(0, 1) == Complex(0.0, 0.0));
  CHECK(sm(1, 1) == Complex(0.0, 0.0));
  CHECK((sigma_plus() - sm.adjoint()).norm() == 0.0);
  CHECK(sigma_z()(0, 0).real() == 1.0);
  CHECK(sigma_z()(1, 1).real() == -1.0);
}

TEST_CASE("Kronecker product composes dimensions and entries") {
  Matrix a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 0, 5, 6, 7;
  const Matrix k = kron(a, b);
  REQUIRE(k.rows() == 4);
  CHECK(k(0, 1) == Complex(5.0, 0.0));
  CHECK(k(0, 3) == Complex(10.0, 0.0));
  CHECK(k(3, 2) == Complex(4.0 * 6.0, 0.0));
}

TEST_CASE("Embedding places an operator at the requested site") {
  const Matrix z0 = embed_operator(sigma_z(), 0, 2);
  const Matrix z1 = embed_operator(sigma_z(), 1, 2);
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double s0 = i < 2 ? 1.0 : -1.0;
    const double s1 = i % 2 == 0 ? 1.0 : -1.0;
    CHECK(z0(i, i).real() == doctest::Approx(s0));
    CHECK(z1(i, i).real() == doctest::Approx(s1));
  }
  CHECK_THROWS_AS(embed_operator(sigma_z(), 2, 2), DimensionError);
  CHECK_THROWS_AS(embed_operator(Matrix::Identity(3, 3), 0, 2), DimensionError);
}

TEST_CASE("Ket labels round-trip through indices with atom zero leftmost") {
  CHECK(ket_index("ee") == 0);
  CHECK(ket_index("eg") == 1);
  CHECK(ket_index("ge") == 2);
  CHECK(ket_index("gg") == 3);
  CHECK(ket_label(5, 3) == "geg");
  CHECK(ket_index(ket_label(5, 3)) == 5);
  CHECK_THROWS_AS(ket_index("ex"), DimensionError);
  const Vector v = basis_ket(2, 4);
  CHECK(v(2) == Complex(1.0, 0.0));
  CHECK(v.norm() == doctest::Approx(1.0));
}

TEST_CASE("Null space spans the kernel and handles the zero matrix") {
  const Matrix ker = null_space(sigma_minus());
  REQUIRE(ker.cols() == 1);
  CHECK(std::abs(ker(1, 0)) == doctest::Approx(1.0));
  const Matrix full = null_space(Matrix::Zero(3, 3));
  CHECK(full.cols() == 3);
  CHECK((full.adjoint() * full - Matrix::Identity(3, 3)).norm() < 1e-14);
  const Matrix none = null_space(Matrix::Identity(2, 2));
  CHECK(none.cols() == 0);
}

TEST_CASE("Hermitian eigendecomposition reconstructs the input") {
  Matrix m(2, 2);
  m << Complex(2, 0), Complex(0, -1), Complex(0, 1), Complex(3, 0);
  const EighResult r = eigh(m);
  const Matrix recon = r.eigenvectors *
                       r.eigenvalues.cast<Complex>().asDiagonal() *
                       r.eigenvectors.adjoint();
  CHECK((recon - m).norm() < 1e-12);
  CHECK(r.eigenvalues(0) <= r.eigenvalues(1));
  Matrix bad(2, 2);
  bad << 1, 2, 3, 4;
  CHECK_THROWS_AS(eigh(bad), NonHermitianError);
}
