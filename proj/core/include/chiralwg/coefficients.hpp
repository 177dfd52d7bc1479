#pragma once

#include <cstddef>
#include <optional>

#include "chiralwg/dynamics.hpp"
#include "chiralwg/topology.hpp"
#include "chiralwg/types.hpp"

namespace chiralwg::coeffs {

// Relative placement of two connection points: +1 if a sits left of b,
// -1 if right, 0 if coincident.
int epsilon_sign(long long rank_a, long long rank_b);

// Closed-form master-equation data for a validated layout.  Exchange and
// collective entries are stored for ordered pairs; exchange(j,k) with j<k is
// the coefficient of sigma_-^j sigma_+^k, and collective(k,j) = conj(collective(j,k)).
struct CoefficientSet {
  std::size_t n_atoms = 0;
  RealVector delta_omega;     // interference frequency shift per atom
  RealVector omega_prime;     // frequency + shift (undriven frame)
  RealVector detuning_prime;  // detuning + shift (driven frame)
  RealVector gamma;           // individual decay per atom
  Matrix exchange;            // g_{j,k}; upper triangle meaningful
  Matrix collective;          // collective decay per ordered pair
  Vector amp_right;           // collapse amplitude of each atom in L_right
  Vector amp_left;
  double total_phase = 0.0;   // accumulated phase across the whole layout
  Complex s_right{1.0, 0.0};  // e^{i total_phase}

  Complex g(std::size_t j, std::size_t k) const { return exchange(j, k); }
};

CoefficientSet compute_coefficients(const topology::ValidatedLayout& layout);

// H = sum_j w_j sigma_z^j / 2 + sum_{j<k} (g_{j,k} sigma_-^j sigma_+^k + h.c.) [+ H_drive]
// with w_j = omega_prime (undriven) or detuning_prime (driven);
// collapse = {L_right, L_left} from the directional amplitudes.
dynamics::MasterEquation assemble_model(
    const CoefficientSet& coeffs,
    const std::optional<topology::DriveSpec>& drive = {});

// Rabi rate of atom j: Omega_j = 2 beta s_right conj(amp_right[j]).
Complex rabi_rate(const CoefficientSet& coeffs, std::size_t atom,
                  const topology::DriveSpec& drive);

// beta realizing a requested Omega_j (atom must couple to the right mover).
topology::DriveSpec drive_for_rabi(const CoefficientSet& coeffs, std::size_t atom,
                                   Complex omega);

}  // namespace chiralwg::coeffs
