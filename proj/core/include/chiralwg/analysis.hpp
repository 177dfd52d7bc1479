#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "chiralwg/coefficients.hpp"
#include "chiralwg/dynamics.hpp"
#include "chiralwg/topology.hpp"
#include "chiralwg/types.hpp"

namespace chiralwg::analysis {

// Two-atom canonical states, basis order |ee>, |eg>, |ge>, |gg>.
Vector singlet_state();   // (|ge> - |eg>)/sqrt(2)
Vector triplet_state();   // (|ge> + |eg>)/sqrt(2)
Vector ground_state(std::size_t n_atoms);

struct DfiReport {
  bool is_dfi = false;
  double tol = 0.0;
  double max_individual_decay = 0.0;
  double max_collective_decay = 0.0;
  double max_exchange = 0.0;
  Matrix residual_g;  // exchange coefficient per pair (upper triangle)
};

// Decoherence-free interaction: every individual and collective decay below
// tol while at least one exchange coupling exceeds it.
DfiReport check_dfi(const coeffs::CoefficientSet& c, double tol = 1e-9);

enum class DarkClass { Trivial, Singlet, Triplet, DrivenSinglet, DrivenTriplet, Other };
const char* to_string(DarkClass c);

struct DarkStateReport {
  Vector state;         // normalized; first |amp| > 1e-8 rotated real positive
  double mu = 0.0;      // H eigenvalue
  DarkClass cls = DarkClass::Other;
  double residual_collapse = 0.0;  // max_k ||L_k v||
  double residual_h = 0.0;         // ||H v - mu v||
  std::optional<Complex> alpha;    // driven classes: <S/T|v> / <g..g|v>
  std::optional<double> gamma_d;   // driven classes, filled by driven_dark_state
};

struct DarkStateScan {
  std::size_t kernel_dim = 0;   // dimension of the joint collapse kernel
  bool fully_decoupled = false; // kernel is the whole space: all states dark
  std::vector<DarkStateReport> states;
};

// Kernel of the stacked collapse maps, restricted H diagonalized, eigenvalue
// clusters resolved against canonical states (|g..g>, and |S>, |T> for two
// atoms) so degenerate dark spaces report recognizable members first.
DarkStateScan find_dark_states(const dynamics::MasterEquation& me,
                               double tol = 1e-9);

// xi = (omega'_b - omega'_a + g - g*)/2, the singlet-triplet coupling.
Complex xi_coupling(const coeffs::CoefficientSet& c);

// Analytic driven dark state (alpha |S/T> + |g g>)/sqrt(1+|alpha|^2) with
// alpha_S = i sqrt(2) Omega / (2 conj(xi)), alpha_T = -i sqrt(2) Omega / (2 xi),
// xi taken in the drive frame.  Requires delta_a = -delta_b and the matching
// amplitude pattern; the returned state is verified against the assembled
// model (collapse and eigen residuals) before it is accepted.
DarkStateReport driven_dark_state(const coeffs::CoefficientSet& c,
                                  const topology::DriveSpec& drive,
                                  double tol = 1e-9);

struct BrightRates {
  double gamma_triplet = 0.0;  // (Gamma_a + Gamma_b + Gamma_coll + Gamma_coll*)/2
  double gamma_singlet = 0.0;  // (Gamma_a + Gamma_b - Gamma_coll - Gamma_coll*)/2
};

BrightRates bright_decay_rates(const coeffs::CoefficientSet& c);

struct DarkConditions {
  bool amplitude_ratios_ok = false;  // A_jR/A_kR = A_jL/A_kL for all pairs
  bool all_decoupled = false;        // every amplitude zero: all states dark
  bool eigenstate_ok = false;        // collapse kernel holds a nontrivial H eigenvector
  bool frequencies_aligned = false;  // omega'_j equal across atoms
  bool exchange_real = false;        // every g_{j,k} real
  bool all_met() const {
    return amplitude_ratios_ok && eigenstate_ok && frequencies_aligned && exchange_real;
  }
};

DarkConditions multi_atom_dark_conditions(const coeffs::CoefficientSet& c,
                                          double tol = 1e-9);

struct SplitInvarianceReport {
  bool preserved = false;
  bool sum_rule_right = false;
  bool sum_rule_left = false;
  double worst_fidelity = 0.0;  // smallest principal overlap between dark spans
  std::size_t dark_dim_before = 0;
  std::size_t dark_dim_after = 0;
};

// Applies the split and compares the nontrivial dark subspaces of the original
// and split layouts (principal angles of the spans).
SplitInvarianceReport verify_splitting_invariance(
    const topology::ValidatedLayout& layout, const topology::SplitSpec& spec,
    double tol = 1e-9);

}  // namespace chiralwg::analysis
