#include "chiralwg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

#include "chiralwg/errors.hpp"
#include "chiralwg/hilbert.hpp"

namespace chiralwg::analysis {

namespace {

constexpr double inv_sqrt2 = 0.70710678118654752440;

void require_two_atoms(std::size_t n, const char* who) {
  if (n != 2) throw NotTwoAtomsError(std::string(who) + ": needs exactly two atoms");
}

// Global phase fixed by rotating the first non-negligible amplitude to the
// positive real axis, so repeated scans emit identical vectors.
Vector phase_normalized(Vector v) {
  v.normalize();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > 1e-8) {
      v *= std::conj(v(i)) / std::abs(v(i));
      break;
    }
  return v;
}

Matrix stack_collapse(const dynamics::MasterEquation& me) {
  const auto d = me.hamiltonian.rows();
  const auto k = static_cast<Eigen::Index>(me.collapse.size());
  Matrix stack(k * d, d);
  for (Eigen::Index i = 0; i < k; ++i)
    stack.middleRows(i * d, d) = me.collapse[static_cast<std::size_t>(i)];
  return stack;
}

// Columns of m with non-negligible span, orthonormalized.
Matrix orthonormal_columns(const Matrix& m) {
  if (m.cols() == 0) return m;
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  Eigen::Index keep = 0;
  const double cut = 1e-8 * std::max(svd.singularValues()(0), 1e-300);
  while (keep < svd.singularValues().size() && svd.singularValues()(keep) > cut)
    ++keep;
  return svd.matrixU().leftCols(keep);
}

struct Residuals {
  double collapse = 0.0;
  double h = 0.0;
  double mu = 0.0;
};

Residuals state_residuals(const dynamics::MasterEquation& me, const Vector& v) {
  Residuals r;
  for (const Matrix& l : me.collapse)
    r.collapse = std::max(r.collapse, (l * v).norm());
  const Vector hv = me.hamiltonian * v;
  r.mu = v.dot(hv).real();
  r.h = (hv - r.mu * v).norm();
  return r;
}

}  // namespace

Vector singlet_state() {
  Vector v = Vector::Zero(4);
  v(1) = -inv_sqrt2;
  v(2) = inv_sqrt2;
  return v;
}

Vector triplet_state() {
  Vector v = Vector::Zero(4);
  v(1) = inv_sqrt2;
  v(2) = inv_sqrt2;
  return v;
}

Vector ground_state(std::size_t n_atoms) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_atoms);
  Vector v = Vector::Zero(dim);
  v(dim - 1) = 1.0;
  return v;
}

DfiReport check_dfi(const coeffs::CoefficientSet& c, double tol) {
  DfiReport r;
  r.tol = tol;
  r.residual_g = c.exchange;
  const auto n = static_cast<Eigen::Index>(c.n_atoms);
  for (Eigen::Index j = 0; j < n; ++j)
    r.max_individual_decay = std::max(r.max_individual_decay, std::abs(c.gamma(j)));
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      if (j != k)
        r.max_collective_decay =
            std::max(r.max_collective_decay, std::abs(c.collective(j, k)));
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j + 1; k < n; ++k)
      r.max_exchange = std::max(r.max_exchange, std::abs(c.exchange(j, k)));
  r.is_dfi = r.max_individual_decay <= tol && r.max_collective_decay <= tol &&
             r.max_exchange > tol;
  return r;
}

const char* to_string(DarkClass c) {
  switch (c) {
    case DarkClass::Trivial: return "trivial";
    case DarkClass::Singlet: return "singlet";
    case DarkClass::Triplet: return "triplet";
    case DarkClass::DrivenSinglet: return "driven-singlet";
    case DarkClass::DrivenTriplet: return "driven-triplet";
    case DarkClass::Other: return "other";
  }
  return "?";
}

DarkStateScan find_dark_states(const dynamics::MasterEquation& me_in, double tol) {
  dynamics::check_master_equation(me_in);
  // Natural units put meaningful rates at order one, so an operator whose
  // whole norm is at or below tol is an interference zero, not a coupling;
  // flooring it keeps destructively decoupled layouts from masquerading as
  // weakly coupled ones.
  dynamics::MasterEquation me = me_in;
  if (me.hamiltonian.norm() <= tol) me.hamiltonian.setZero();
  for (Matrix& l : me.collapse)
    if (l.norm() <= tol) l.setZero();
  const auto d = me.hamiltonian.rows();
  const Matrix stack = stack_collapse(me);
  const Matrix kernel =
      stack.rows() == 0
          ? Matrix(Matrix::Identity(d, d))
          : hilbert::null_space(stack, tol);

  DarkStateScan scan;
  scan.kernel_dim = static_cast<std::size_t>(kernel.cols());
  scan.fully_decoupled = kernel.cols() == d;
  if (kernel.cols() == 0) return scan;

  const double scale =
      std::max({me.hamiltonian.norm(), stack.norm() * stack.norm(), 1e-300});

  const Matrix restricted = kernel.adjoint() * me.hamiltonian * kernel;
  const hilbert::EighResult eig = hilbert::eigh(restricted);

  const bool spin_register = d > 0 && (d & (d - 1)) == 0;
  std::size_t n_atoms = 0;
  while ((Eigen::Index{1} << n_atoms) < d) ++n_atoms;
  const bool two_atoms = d == 4;
  const Vector gg = spin_register ? ground_state(n_atoms) : Vector{};
  const Vector s_ket = two_atoms ? singlet_state() : Vector{};
  const Vector t_ket = two_atoms ? triplet_state() : Vector{};

  auto emit = [&](const Vector& v, DarkClass cls,
                  std::optional<Complex> alpha) -> bool {
    DarkStateReport rep;
    rep.state = phase_normalized(v);
    const Residuals res = state_residuals(me, rep.state);
    if (res.h > 100.0 * tol * scale) return false;  // H pushes it elsewhere
    rep.mu = res.mu;
    rep.cls = cls;
    rep.residual_collapse = res.collapse;
    rep.residual_h = res.h;
    rep.alpha = alpha;
    scan.states.push_back(std::move(rep));
    return true;
  };

  // Cluster nearly equal eigenvalues so degenerate dark spaces are handled as
  // one block; canonical members are pulled out before the remainder.
  std::size_t lo = 0;
  const auto m = static_cast<std::size_t>(eig.eigenvalues.size());
  while (lo < m) {
    std::size_t hi = lo + 1;
    while (hi < m && eig.eigenvalues(static_cast<Eigen::Index>(hi)) -
                             eig.eigenvalues(static_cast<Eigen::Index>(hi - 1)) <=
                         1e-8 * scale)
      ++hi;

    const Matrix cluster =
        kernel * eig.eigenvectors.middleCols(static_cast<Eigen::Index>(lo),
                                             static_cast<Eigen::Index>(hi - lo));

    // A degenerate cluster can hold directions H pushes out of the kernel;
    // the dark members are the null directions of (H - mu) on the cluster.
    double mu_bar = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
      mu_bar += eig.eigenvalues(static_cast<Eigen::Index>(i));
    mu_bar /= static_cast<double>(hi - lo);
    const Matrix pushed =
        me.hamiltonian * cluster - mu_bar * cluster;
    Eigen::JacobiSVD<Matrix> cluster_svd(pushed, Eigen::ComputeFullV);
    std::size_t n_dark = 0;
    const auto k = cluster.cols();
    for (Eigen::Index i = 0; i < k; ++i) {
      const double sv = i < cluster_svd.singularValues().size()
                            ? cluster_svd.singularValues()(i)
                            : 0.0;
      if (sv <= 100.0 * tol * scale) ++n_dark;
    }
    Matrix remaining = orthonormal_columns(
        cluster * cluster_svd.matrixV().rightCols(static_cast<Eigen::Index>(n_dark)));

    auto extract_pure = [&](const Vector& target, DarkClass cls) {
      if (remaining.cols() == 0) return;
      const Vector proj = remaining * (remaining.adjoint() * target);
      if (proj.squaredNorm() < 1.0 - 1e-8) return;
      if (!emit(proj, cls, std::nullopt)) return;
      remaining = orthonormal_columns(
          remaining - proj.normalized() * (proj.normalized().adjoint() * remaining));
    };

    if (spin_register) extract_pure(gg, DarkClass::Trivial);
    if (two_atoms) {
      extract_pure(s_ket, DarkClass::Singlet);
      extract_pure(t_ket, DarkClass::Triplet);

      // A driven dark state lives in span{|S or T>, |gg>} without being either
      // basis vector; the smallest singular value of the out-of-span part
      // finds it.
      auto extract_driven = [&](const Vector& excited, DarkClass cls) {
        if (remaining.cols() == 0) return;
        Matrix pair_basis(4, 2);
        pair_basis.col(0) = excited;
        pair_basis.col(1) = gg;
        const Matrix outside =
            pair_basis - remaining * (remaining.adjoint() * pair_basis);
        Eigen::JacobiSVD<Matrix> svd(outside, Eigen::ComputeThinV);
        const Eigen::Index last = svd.singularValues().size() - 1;
        if (svd.singularValues()(last) > 1e-6) return;
        const Vector w = pair_basis * svd.matrixV().col(last);
        const Complex ground_amp = gg.dot(w);
        if (std::abs(ground_amp) < 1e-8) return;
        if (!emit(w, cls, excited.dot(w) / ground_amp)) return;
        remaining = orthonormal_columns(
            remaining - w.normalized() * (w.normalized().adjoint() * remaining));
      };
      extract_driven(s_ket, DarkClass::DrivenSinglet);
      extract_driven(t_ket, DarkClass::DrivenTriplet);
    }

    for (Eigen::Index c = 0; c < remaining.cols(); ++c)
      emit(remaining.col(c), DarkClass::Other, std::nullopt);

    lo = hi;
  }
  return scan;
}

Complex xi_coupling(const coeffs::CoefficientSet& c) {
  require_two_atoms(c.n_atoms, "xi_coupling");
  return (c.omega_prime(1) - c.omega_prime(0) + c.exchange(0, 1) -
          std::conj(c.exchange(0, 1))) /
         2.0;
}

DarkStateReport driven_dark_state(const coeffs::CoefficientSet& c,
                                  const topology::DriveSpec& drive, double tol) {
  require_two_atoms(c.n_atoms, "driven_dark_state");
  const double amp_scale =
      std::max({std::abs(c.amp_right(0)), std::abs(c.amp_right(1)),
                std::abs(c.amp_left(0)), std::abs(c.amp_left(1)), 1e-300});
  const bool symmetric = std::abs(c.amp_right(0) - c.amp_right(1)) <= tol * amp_scale &&
                         std::abs(c.amp_left(0) - c.amp_left(1)) <= tol * amp_scale;
  const bool antisymmetric =
      std::abs(c.amp_right(0) + c.amp_right(1)) <= tol * amp_scale &&
      std::abs(c.amp_left(0) + c.amp_left(1)) <= tol * amp_scale;
  if (!symmetric && !antisymmetric)
    throw NoDrivenDarkStateError(
        "driven_dark_state: collapse amplitudes are neither symmetric nor "
        "antisymmetric across the pair");

  const Complex omega = coeffs::rabi_rate(c, 0, drive);
  const Complex xi = (c.detuning_prime(1) - c.detuning_prime(0) +
                      c.exchange(0, 1) - std::conj(c.exchange(0, 1))) /
                     2.0;

  DarkStateReport rep;
  const dynamics::MasterEquation me = coeffs::assemble_model(c, drive);
  const double scale = std::max(
      {me.hamiltonian.norm(), stack_collapse(me).norm() * stack_collapse(me).norm(),
       1e-300});

  if (std::abs(omega) <= 1e-12 * std::max(std::abs(xi), 1.0)) {
    rep.state = ground_state(2);
    rep.cls = DarkClass::Trivial;
    rep.alpha = Complex(0.0, 0.0);
  } else {
    if (std::abs(xi) <= 1e-12 * std::max(std::abs(omega), 1.0))
      throw NoDrivenDarkStateError(
          "driven_dark_state: singlet-triplet coupling vanishes, the excited "
          "component has no stationary partner");
    const Complex i_unit(0.0, 1.0);
    Complex alpha;
    Vector base;
    if (symmetric) {
      alpha = i_unit * std::sqrt(2.0) * omega / (2.0 * std::conj(xi));
      base = singlet_state();
      rep.cls = DarkClass::DrivenSinglet;
    } else {
      alpha = -i_unit * std::sqrt(2.0) * omega / (2.0 * xi);
      base = triplet_state();
      rep.cls = DarkClass::DrivenTriplet;
    }
    rep.state = (alpha * base + ground_state(2)) /
                std::sqrt(1.0 + std::norm(alpha));
    rep.alpha = alpha;
  }

  const Residuals res = state_residuals(me, rep.state);
  if (res.collapse > 1000.0 * tol * scale || res.h > 1000.0 * tol * scale)
    throw NoDrivenDarkStateError(
        "driven_dark_state: candidate fails the stationarity check "
        "(collapse residual " +
        std::to_string(res.collapse) + ", eigen residual " + std::to_string(res.h) +
        ")");
  rep.state = phase_normalized(rep.state);
  rep.mu = res.mu;
  rep.residual_collapse = res.collapse;
  rep.residual_h = res.h;
  rep.gamma_d = (c.gamma(0) + c.gamma(1)) / (1.0 + std::norm(*rep.alpha));
  return rep;
}

BrightRates bright_decay_rates(const coeffs::CoefficientSet& c) {
  require_two_atoms(c.n_atoms, "bright_decay_rates");
  const double both = c.gamma(0) + c.gamma(1);
  const double cross = 2.0 * c.collective(0, 1).real();
  return BrightRates{(both + cross) / 2.0, (both - cross) / 2.0};
}

DarkConditions multi_atom_dark_conditions(const coeffs::CoefficientSet& c,
                                          double tol) {
  DarkConditions out;
  const auto n = static_cast<Eigen::Index>(c.n_atoms);

  double amp_max = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    amp_max = std::max({amp_max, std::abs(c.amp_right(j)), std::abs(c.amp_left(j))});
  out.all_decoupled = amp_max <= tol;

  out.amplitude_ratios_ok = true;
  for (Eigen::Index j = 0; j < n && out.amplitude_ratios_ok; ++j)
    for (Eigen::Index k = j + 1; k < n; ++k) {
      const Complex cross =
          c.amp_right(j) * c.amp_left(k) - c.amp_left(j) * c.amp_right(k);
      if (std::abs(cross) > tol * std::max(amp_max * amp_max, 1e-300)) {
        out.amplitude_ratios_ok = false;
        break;
      }
    }

  double w_spread = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j + 1; k < n; ++k)
      w_spread = std::max(w_spread,
                          std::abs(c.omega_prime(j) - c.omega_prime(k)));
  out.frequencies_aligned =
      w_spread <= tol * std::max(c.omega_prime.cwiseAbs().maxCoeff(), 1.0);

  out.exchange_real = true;
  for (Eigen::Index j = 0; j < n && out.exchange_real; ++j)
    for (Eigen::Index k = j + 1; k < n; ++k)
      if (std::abs(c.exchange(j, k).imag()) >
          tol * std::max(std::abs(c.exchange(j, k)), 1.0)) {
        out.exchange_real = false;
        break;
      }

  const DarkStateScan scan = find_dark_states(coeffs::assemble_model(c), tol);
  const Vector gg = ground_state(c.n_atoms);
  out.eigenstate_ok = false;
  for (const DarkStateReport& rep : scan.states)
    if (std::norm(gg.dot(rep.state)) < 1.0 - 1e-8) {
      out.eigenstate_ok = true;
      break;
    }
  return out;
}

SplitInvarianceReport verify_splitting_invariance(
    const topology::ValidatedLayout& layout, const topology::SplitSpec& spec,
    double tol) {
  const topology::SplitResult split = topology::split_point(layout, spec);

  auto nontrivial_span = [&](const topology::ValidatedLayout& lay) {
    const DarkStateScan scan =
        find_dark_states(coeffs::assemble_model(coeffs::compute_coefficients(lay)), tol);
    std::vector<Vector> keep;
    for (const DarkStateReport& rep : scan.states)
      if (rep.cls != DarkClass::Trivial) keep.push_back(rep.state);
    Matrix span(static_cast<Eigen::Index>(std::size_t{1} << lay.n_atoms()),
                static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i)
      span.col(static_cast<Eigen::Index>(i)) = keep[i];
    return span;
  };

  const Matrix before = nontrivial_span(layout);
  const Matrix after = nontrivial_span(topology::validate(split.layout));

  SplitInvarianceReport rep;
  rep.sum_rule_right = split.sum_rule_right;
  rep.sum_rule_left = split.sum_rule_left;
  rep.dark_dim_before = static_cast<std::size_t>(before.cols());
  rep.dark_dim_after = static_cast<std::size_t>(after.cols());

  if (before.cols() == 0 && after.cols() == 0) {
    rep.worst_fidelity = 1.0;
  } else if (before.cols() == 0 || after.cols() == 0) {
    rep.worst_fidelity = 0.0;
  } else {
    const Matrix overlap = before.adjoint() * after;
    Eigen::JacobiSVD<Matrix> svd(overlap);
    const auto k = svd.singularValues().size();
    const double worst = svd.singularValues()(k - 1);
    rep.worst_fidelity = worst * worst;
  }
  rep.preserved = rep.dark_dim_before == rep.dark_dim_after &&
                  rep.worst_fidelity >= 1.0 - 100.0 * tol;
  return rep;
}

}  // namespace chiralwg::analysis
