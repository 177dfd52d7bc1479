#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "chiralwg/types.hpp"

namespace chiralwg::dynamics {

// d rho/dt = -i[H, rho] + sum_k (L_k rho L_k† - 1/2 {L_k† L_k, rho}).
struct MasterEquation {
  Matrix hamiltonian;
  std::vector<Matrix> collapse;  // for composed layouts: {L_right, L_left}

  std::size_t dim() const {
    return static_cast<std::size_t>(hamiltonian.rows());
  }
};

// Rejects dimension mismatches and ||H - H†|| > 1e-10 ||H||.
void check_master_equation(const MasterEquation& me);

Matrix lindblad_rhs(const MasterEquation& me, const Matrix& rho);

struct SolverOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Matrix> states;  // re-Hermitized at each sample
  // named real series in fixed order: pop_<ket>...,
  // p_singlet, p_triplet (two-atom systems only), trace, purity
  std::vector<std::pair<std::string, std::vector<double>>> observables;

  const std::vector<double>& observable(const std::string& name) const;
};

// Adaptive embedded Runge-Kutta 4(5) with max-norm error control.  Integrates
// exactly to each requested sample time; samples are re-Hermitized and checked:
// |tr-1| <= 1e-8, min eigenvalue >= -1e-8, purity <= 1 + 1e-10.
Trajectory evolve(const MasterEquation& me, const Matrix& rho0, double t_final,
                  const std::vector<double>& sample_times,
                  const SolverOptions& opts = {});

// Convenience: n_samples evenly spaced over [0, t_final].
std::vector<double> linspace(double t_final, std::size_t n_samples);

// Column-major superoperator of the generator, dim^2 x dim^2.
Matrix liouvillian(const MasterEquation& me);

// Unique kernel vector of the Liouvillian, reshaped, Hermitized, trace 1.
// Kernel dimension >= 2 raises DegenerateSteadyStateError carrying the basis.
Matrix steady_state(const MasterEquation& me, double tol = 1e-10);

}  // namespace chiralwg::dynamics
