#include "chiralwg/coefficients.hpp"

#include <cmath>
#include <complex>

#include "chiralwg/errors.hpp"
#include "chiralwg/hilbert.hpp"

namespace chiralwg::coeffs {

int epsilon_sign(long long rank_a, long long rank_b) {
  if (rank_a < rank_b) return 1;
  if (rank_a > rank_b) return -1;
  return 0;
}

CoefficientSet compute_coefficients(const topology::ValidatedLayout& layout) {
  const std::size_t n = layout.n_atoms();
  const std::size_t M = layout.n_points();
  const auto ni = static_cast<Eigen::Index>(n);

  CoefficientSet c;
  c.n_atoms = n;
  c.delta_omega = RealVector::Zero(ni);
  c.gamma = RealVector::Zero(ni);
  c.exchange = Matrix::Zero(ni, ni);
  c.collective = Matrix::Zero(ni, ni);
  c.amp_right = Vector::Zero(ni);
  c.amp_left = Vector::Zero(ni);

  for (std::size_t i = 0; i < M; ++i) {
    const topology::SortedPoint& p = layout.point(i);
    const auto a = static_cast<Eigen::Index>(p.atom);
    c.amp_right(a) += std::sqrt(p.gamma_right) *
                      std::polar(1.0, layout.cumulative_phase(i, M - 1));
    c.amp_left(a) +=
        std::sqrt(p.gamma_left) * std::polar(1.0, layout.cumulative_phase(0, i));
  }

  for (std::size_t i = 0; i < M; ++i) {
    const topology::SortedPoint& pi = layout.point(i);
    for (std::size_t j = 0; j < M; ++j) {
      const topology::SortedPoint& pj = layout.point(j);
      const double phi = layout.cumulative_phase(std::min(i, j), std::max(i, j));
      const double rr = std::sqrt(pi.gamma_right * pj.gamma_right);
      const double ll = std::sqrt(pi.gamma_left * pj.gamma_left);
      const auto a = static_cast<Eigen::Index>(pi.atom);
      const auto b = static_cast<Eigen::Index>(pj.atom);
      if (pi.atom == pj.atom) {
        c.gamma(a) += (rr + ll) * std::cos(phi);
        if (i < j) c.delta_omega(a) += (rr + ll) * std::sin(phi);
      } else {
        const int eps = epsilon_sign(pi.rank, pj.rank);
        const Complex e_phase = std::polar(1.0, eps * phi);
        if (eps != 0)
          c.exchange(a, b) += static_cast<double>(eps) * Complex(0.0, -0.5) *
                              (rr * e_phase - ll * std::conj(e_phase));
        c.collective(a, b) += rr * e_phase + ll * std::conj(e_phase);
      }
    }
  }

  c.omega_prime = RealVector::Zero(ni);
  c.detuning_prime = RealVector::Zero(ni);
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    c.omega_prime(jj) = layout.atoms()[j].frequency + c.delta_omega(jj);
    c.detuning_prime(jj) = layout.atoms()[j].detuning + c.delta_omega(jj);
  }
  c.total_phase = layout.total_phase();
  c.s_right = std::polar(1.0, c.total_phase);
  return c;
}

dynamics::MasterEquation assemble_model(
    const CoefficientSet& coeffs,
    const std::optional<topology::DriveSpec>& drive) {
  const std::size_t n = coeffs.n_atoms;
  const std::size_t dim = std::size_t{1} << n;
  const auto di = static_cast<Eigen::Index>(dim);

  dynamics::MasterEquation me;
  me.hamiltonian = Matrix::Zero(di, di);
  const RealVector& w = drive ? coeffs.detuning_prime : coeffs.omega_prime;
  for (std::size_t j = 0; j < n; ++j)
    me.hamiltonian += w(static_cast<Eigen::Index>(j)) / 2.0 *
                      hilbert::embed_operator(hilbert::sigma_z(), j, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) {
      const Complex gjk =
          coeffs.exchange(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
      const Matrix op = hilbert::embed_operator(hilbert::sigma_minus(), j, n) *
                        hilbert::embed_operator(hilbert::sigma_plus(), k, n);
      me.hamiltonian += gjk * op + std::conj(gjk) * op.adjoint();
    }

  Matrix l_right = Matrix::Zero(di, di);
  Matrix l_left = Matrix::Zero(di, di);
  for (std::size_t j = 0; j < n; ++j) {
    const Matrix sm = hilbert::embed_operator(hilbert::sigma_minus(), j, n);
    l_right += coeffs.amp_right(static_cast<Eigen::Index>(j)) * sm;
    l_left += coeffs.amp_left(static_cast<Eigen::Index>(j)) * sm;
  }

  if (drive) {
    const Complex amp = drive->beta * coeffs.s_right;
    me.hamiltonian += Complex(0.0, -1.0) *
                      (amp * l_right.adjoint() - std::conj(amp) * l_right);
  }

  me.collapse = {std::move(l_right), std::move(l_left)};
  return me;
}

Complex rabi_rate(const CoefficientSet& coeffs, std::size_t atom,
                  const topology::DriveSpec& drive) {
  return 2.0 * drive.beta * coeffs.s_right *
         std::conj(coeffs.amp_right(static_cast<Eigen::Index>(atom)));
}

topology::DriveSpec drive_for_rabi(const CoefficientSet& coeffs, std::size_t atom,
                                   Complex omega) {
  const Complex a = coeffs.amp_right(static_cast<Eigen::Index>(atom));
  if (std::abs(a) < 1e-14)
    throw Error("drive_for_rabi: atom does not couple to the right mover");
  return topology::DriveSpec{omega / (2.0 * coeffs.s_right * std::conj(a))};
}

}  // namespace chiralwg::coeffs
