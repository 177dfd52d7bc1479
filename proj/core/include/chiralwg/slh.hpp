#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "chiralwg/topology.hpp"
#include "chiralwg/types.hpp"

namespace chiralwg::slh {

// (S, L, H) with c-number scattering entries (dim n_ports x n_ports), one
// collapse operator per port, and a Hermitian system operator H.
struct Triplet {
  Matrix scattering;             // n_ports x n_ports complex scalars
  std::vector<Matrix> collapse;  // n_ports operators, dim x dim
  Matrix hamiltonian;            // dim x dim

  std::size_t n_ports() const { return collapse.size(); }
  std::size_t dim() const {
    return static_cast<std::size_t>(hamiltonian.rows());
  }
};

Triplet identity_triplet(std::size_t n_ports, std::size_t dim);
Triplet phase_triplet(double phase, std::size_t dim);

// Feed the output of `first` into `second`:
//   S = S2 S1,  L = S2 L1 + L2,
//   H = H1 + H2 + (1/2i)(L2† S2 L1 - L1† S2† L2).
Triplet series(const Triplet& second, const Triplet& first);

// Independent channels side by side: block-diagonal S, stacked L, H summed.
Triplet concat(const Triplet& top, const Triplet& bottom);

enum class Direction { Right, Left };

struct ComposeOptions {
  bool attach_bare_hamiltonian = true;  // omega_j sigma_z/2 at each atom's first point
  bool use_detuning = false;            // drive frame: detuning replaces frequency
};

// One-port cascade through every point in propagation order, interleaving the
// recorded phases.  Right uses gamma_right left-to-right; Left mirrors it.
Triplet compose_direction(const topology::ValidatedLayout& layout, Direction dir,
                          const ComposeOptions& opts = {});

// Two-port composition of both directions.  The bare atomic term rides the
// right-moving cascade only, and the scalar identity offset from intra-atom
// interference is dropped, so H is traceless and directly comparable with the
// closed-form assembly.  A drive adds H += -i (beta S_R L_R† - beta* S_R* L_R).
Triplet compose_layout(const topology::ValidatedLayout& layout,
                       const std::optional<topology::DriveSpec>& drive = {});

}  // namespace chiralwg::slh
