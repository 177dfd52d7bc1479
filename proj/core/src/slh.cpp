#include "chiralwg/slh.hpp"

#include <cmath>
#include <complex>

#include "chiralwg/errors.hpp"
#include "chiralwg/hilbert.hpp"

namespace chiralwg::slh {

namespace {

Matrix zero_operator(std::size_t dim) {
  return Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

}  // namespace

Triplet identity_triplet(std::size_t n_ports, std::size_t dim) {
  Triplet t;
  t.scattering = Matrix::Identity(static_cast<Eigen::Index>(n_ports),
                                  static_cast<Eigen::Index>(n_ports));
  t.collapse.assign(n_ports, zero_operator(dim));
  t.hamiltonian = zero_operator(dim);
  return t;
}

Triplet phase_triplet(double phase, std::size_t dim) {
  Triplet t = identity_triplet(1, dim);
  t.scattering(0, 0) = std::polar(1.0, phase);
  return t;
}

Triplet series(const Triplet& second, const Triplet& first) {
  if (second.n_ports() != first.n_ports())
    throw DimensionError("series: port counts differ");
  if (second.dim() != first.dim())
    throw DimensionError("series: system dimensions differ");
  const std::size_t n = first.n_ports();
  const std::size_t dim = first.dim();
  const Complex half_over_i(0.0, -0.5);  // 1/(2i)

  Triplet out;
  out.scattering = second.scattering * first.scattering;
  out.collapse.assign(n, zero_operator(dim));
  for (std::size_t i = 0; i < n; ++i) {
    out.collapse[i] = second.collapse[i];
    for (std::size_t j = 0; j < n; ++j)
      out.collapse[i] += second.scattering(static_cast<Eigen::Index>(i),
                                           static_cast<Eigen::Index>(j)) *
                         first.collapse[j];
  }
  Matrix cross = zero_operator(dim);  // L2^dag S2 L1
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cross += second.scattering(static_cast<Eigen::Index>(i),
                                 static_cast<Eigen::Index>(j)) *
               (second.collapse[i].adjoint() * first.collapse[j]);
  out.hamiltonian = first.hamiltonian + second.hamiltonian +
                    half_over_i * (cross - cross.adjoint());
  return out;
}

Triplet concat(const Triplet& top, const Triplet& bottom) {
  if (top.dim() != bottom.dim())
    throw DimensionError("concat: system dimensions differ");
  const auto nt = static_cast<Eigen::Index>(top.n_ports());
  const auto nb = static_cast<Eigen::Index>(bottom.n_ports());
  Triplet out;
  out.scattering = Matrix::Zero(nt + nb, nt + nb);
  out.scattering.topLeftCorner(nt, nt) = top.scattering;
  out.scattering.bottomRightCorner(nb, nb) = bottom.scattering;
  out.collapse = top.collapse;
  out.collapse.insert(out.collapse.end(), bottom.collapse.begin(),
                      bottom.collapse.end());
  out.hamiltonian = top.hamiltonian + bottom.hamiltonian;
  return out;
}

Triplet compose_direction(const topology::ValidatedLayout& layout, Direction dir,
                          const ComposeOptions& opts) {
  const std::size_t n = layout.n_atoms();
  const std::size_t M = layout.n_points();
  const std::size_t dim = std::size_t{1} << n;

  std::vector<std::size_t> first_point(n, M);
  for (std::size_t i = 0; i < M; ++i) {
    const std::size_t a = layout.point(i).atom;
    if (first_point[a] == M) first_point[a] = i;
  }

  Triplet G = identity_triplet(1, dim);
  bool have_prev = false;
  std::size_t prev = 0;
  const bool rightward = dir == Direction::Right;
  for (std::size_t step = 0; step < M; ++step) {
    const std::size_t i = rightward ? step : M - 1 - step;
    if (have_prev) {
      const std::size_t lo = rightward ? prev : i;
      const std::size_t hi = rightward ? i : prev;
      G = series(phase_triplet(layout.cumulative_phase(lo, hi), dim), G);
    }
    const topology::SortedPoint& p = layout.point(i);
    const double rate = rightward ? p.gamma_right : p.gamma_left;
    Triplet site = identity_triplet(1, dim);
    site.collapse[0] =
        std::sqrt(rate) * hilbert::embed_operator(hilbert::sigma_minus(), p.atom, n);
    if (opts.attach_bare_hamiltonian && first_point[p.atom] == i) {
      const topology::Atom& atom = layout.atoms()[p.atom];
      const double base = opts.use_detuning ? atom.detuning : atom.frequency;
      site.hamiltonian =
          base / 2.0 * hilbert::embed_operator(hilbert::sigma_z(), p.atom, n);
    }
    G = series(site, G);
    prev = i;
    have_prev = true;
  }
  return G;
}

Triplet compose_layout(const topology::ValidatedLayout& layout,
                       const std::optional<topology::DriveSpec>& drive) {
  ComposeOptions right_opts;
  right_opts.attach_bare_hamiltonian = true;
  right_opts.use_detuning = drive.has_value();
  ComposeOptions left_opts;
  left_opts.attach_bare_hamiltonian = false;
  left_opts.use_detuning = drive.has_value();

  const Triplet right = compose_direction(layout, Direction::Right, right_opts);
  const Triplet left = compose_direction(layout, Direction::Left, left_opts);
  Triplet out = concat(right, left);

  const auto dim = out.hamiltonian.rows();
  const Complex offset = out.hamiltonian.trace() / static_cast<double>(dim);
  out.hamiltonian -= offset * Matrix::Identity(dim, dim);

  if (drive) {
    const Complex amp = drive->beta * right.scattering(0, 0);
    const Matrix& l_right = out.collapse[0];
    out.hamiltonian += Complex(0.0, -1.0) *
                       (amp * l_right.adjoint() - std::conj(amp) * l_right);
  }
  return out;
}

}  // namespace chiralwg::slh
