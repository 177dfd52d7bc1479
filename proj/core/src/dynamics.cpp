#include "chiralwg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chiralwg/errors.hpp"
#include "chiralwg/hilbert.hpp"

namespace chiralwg::dynamics {

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Matrix hermitized(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

bool is_power_of_two(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

std::size_t log2_exact(std::size_t x) {
  std::size_t n = 0;
  while ((std::size_t{1} << n) < x) ++n;
  return n;
}

// Dormand-Prince 4(5) tableau; row 7 doubles as the 5th-order weights (FSAL).
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640,
                 e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

struct Stepper {
  const MasterEquation& me;
  SolverOptions opts;
  Matrix k1;  // FSAL cache, valid when have_k1
  bool have_k1 = false;
  double prev_err = 1.0;
  bool just_rejected = false;

  double error_norm(const Matrix& err, const Matrix& y, const Matrix& ynew) const {
    double worst = 0.0;
    for (Eigen::Index c = 0; c < err.cols(); ++c)
      for (Eigen::Index r = 0; r < err.rows(); ++r) {
        const double scale =
            opts.abs_tol +
            opts.rel_tol * std::max(std::abs(y(r, c)), std::abs(ynew(r, c)));
        worst = std::max(worst, std::abs(err(r, c)) / scale);
      }
    return worst;
  }

  // Advances (t, rho) by exactly `span`, taking as many internal steps as the
  // tolerances require.
  void advance(double& t, Matrix& rho, double span, double& h) {
    const double t_end = t + span;
    std::size_t steps = 0;
    while (t < t_end) {
      if (++steps > 100'000'000)
        throw Error("evolve: step count exceeded 1e8");
      h = std::min(h, t_end - t);
      if (h < 1e-14 * std::max(std::abs(t), 1.0))
        throw StepSizeUnderflowError("evolve: step size underflow at t = " +
                                     std::to_string(t));
      if (!have_k1) {
        k1 = lindblad_rhs(me, rho);
        have_k1 = true;
      }
      const Matrix k2 = lindblad_rhs(me, rho + h * (a21 * k1));
      const Matrix k3 = lindblad_rhs(me, rho + h * (a31 * k1 + a32 * k2));
      const Matrix k4 = lindblad_rhs(me, rho + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const Matrix k5 =
          lindblad_rhs(me, rho + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Matrix k6 = lindblad_rhs(
          me, rho + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Matrix ynew =
          rho + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Matrix k7 = lindblad_rhs(me, ynew);
      const Matrix err_mat =
          h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double err = error_norm(err_mat, rho, ynew);

      if (err <= 1.0) {
        t += h;
        if (t_end - t < 1e-14 * std::max(std::abs(t_end), 1.0)) t = t_end;
        rho = ynew;
        k1 = k7;  // first-same-as-last
        double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.14) *
                        std::pow(prev_err, 0.08);
        factor = std::clamp(factor, 0.2, 10.0);
        if (just_rejected) factor = std::min(factor, 1.0);
        just_rejected = false;
        prev_err = std::max(err, 1e-4);
        h *= factor;
      } else {
        just_rejected = true;
        h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
      }
    }
  }
};

void check_sample(const Matrix& rho, double t) {
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-8)
    throw InvariantViolatedError("evolve: trace drifted to " + std::to_string(tr) +
                                 " at t = " + std::to_string(t));
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8)
    throw InvariantViolatedError("evolve: negative population at t = " +
                                 std::to_string(t));
  const double purity = (rho * rho).trace().real();
  if (purity > 1.0 + 1e-10)
    throw InvariantViolatedError("evolve: purity exceeded one at t = " +
                                 std::to_string(t));
}

}  // namespace

void check_master_equation(const MasterEquation& me) {
  const auto d = me.hamiltonian.rows();
  if (d == 0 || me.hamiltonian.cols() != d)
    throw DimensionError("master equation: Hamiltonian must be square");
  for (const Matrix& l : me.collapse)
    if (l.rows() != d || l.cols() != d)
      throw DimensionError("master equation: collapse operator dimension mismatch");
  const double scale = me.hamiltonian.norm();
  if ((me.hamiltonian - me.hamiltonian.adjoint()).norm() > 1e-10 * std::max(scale, 1e-300))
    throw NonHermitianError("master equation: Hamiltonian is not Hermitian");
}

Matrix lindblad_rhs(const MasterEquation& me, const Matrix& rho) {
  Matrix out = Complex(0.0, -1.0) *
               (me.hamiltonian * rho - rho * me.hamiltonian);
  for (const Matrix& l : me.collapse) {
    const Matrix ld_l = l.adjoint() * l;
    out += l * rho * l.adjoint() - 0.5 * (ld_l * rho + rho * ld_l);
  }
  return out;
}

const std::vector<double>& Trajectory::observable(const std::string& name) const {
  for (const auto& [key, series] : observables)
    if (key == name) return series;
  throw Error("trajectory: no observable named '" + name + "'");
}

std::vector<double> linspace(double t_final, std::size_t n_samples) {
  if (n_samples == 0) return {};
  if (n_samples == 1) return {t_final};
  std::vector<double> out(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i)
    out[i] = t_final * static_cast<double>(i) / static_cast<double>(n_samples - 1);
  return out;
}

Trajectory evolve(const MasterEquation& me, const Matrix& rho0, double t_final,
                  const std::vector<double>& sample_times,
                  const SolverOptions& opts) {
  check_master_equation(me);
  const auto d = me.hamiltonian.rows();
  if (rho0.rows() != d || rho0.cols() != d)
    throw DimensionError("evolve: initial state dimension mismatch");
  if (t_final < 0.0) throw Error("evolve: negative final time");
  const std::vector<double>& samples = sample_times;
  if (!std::is_sorted(samples.begin(), samples.end()))
    throw Error("evolve: sample times must be non-decreasing");
  if (!samples.empty() &&
      (samples.front() < 0.0 || samples.back() > t_final * (1.0 + 1e-12) + 1e-300))
    throw Error("evolve: sample times must lie within [0, t_final]");

  const std::size_t dim = static_cast<std::size_t>(d);
  const bool pow2 = is_power_of_two(dim);
  const std::size_t n_atoms = pow2 ? log2_exact(dim) : 0;

  Trajectory traj;
  for (std::size_t i = 0; i < dim; ++i) {
    const std::string label =
        pow2 ? hilbert::ket_label(i, n_atoms) : std::to_string(i);
    traj.observables.emplace_back("pop_" + label, std::vector<double>{});
  }
  if (dim == 4) {
    traj.observables.emplace_back("p_singlet", std::vector<double>{});
    traj.observables.emplace_back("p_triplet", std::vector<double>{});
  }
  traj.observables.emplace_back("trace", std::vector<double>{});
  traj.observables.emplace_back("purity", std::vector<double>{});

  auto record = [&](double t, const Matrix& rho) {
    const Matrix h = hermitized(rho);
    check_sample(h, t);
    traj.times.push_back(t);
    traj.states.push_back(h);
    std::size_t slot = 0;
    for (std::size_t i = 0; i < dim; ++i)
      traj.observables[slot++].second.push_back(
          h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real());
    if (dim == 4) {
      const double cross = h(1, 2).real();
      const double diag = h(1, 1).real() + h(2, 2).real();
      traj.observables[slot++].second.push_back(0.5 * diag - cross);
      traj.observables[slot++].second.push_back(0.5 * diag + cross);
    }
    traj.observables[slot++].second.push_back(h.trace().real());
    traj.observables[slot++].second.push_back((h * h).trace().real());
  };

  Stepper stepper{me, opts, Matrix{}, false, 1.0, false};
  Matrix rho = rho0;
  double t = 0.0;

  // Initial step from the local derivative scale.
  const Matrix f0 = lindblad_rhs(me, rho);
  const double y_scale = std::max(max_abs(rho), 1e-6);
  const double f_scale = max_abs(f0);
  double h = f_scale > 0.0 ? 0.01 * y_scale / f_scale
                           : std::max(t_final, 1.0) * 0.01;
  if (t_final > 0.0) h = std::min(h, t_final / 10.0);

  for (double target : samples) {
    if (target > t) stepper.advance(t, rho, target - t, h);
    record(target, rho);
  }
  return traj;
}

Matrix liouvillian(const MasterEquation& me) {
  check_master_equation(me);
  const auto d = me.hamiltonian.rows();
  const Matrix id = Matrix::Identity(d, d);
  Matrix out = Complex(0.0, -1.0) *
               (hilbert::kron(id, me.hamiltonian) -
                hilbert::kron(me.hamiltonian.transpose(), id));
  for (const Matrix& l : me.collapse) {
    const Matrix ld_l = l.adjoint() * l;
    out += hilbert::kron(l.conjugate(), l) -
           0.5 * hilbert::kron(id, ld_l) -
           0.5 * hilbert::kron(ld_l.transpose(), id);
  }
  return out;
}

Matrix steady_state(const MasterEquation& me, double tol) {
  const Matrix lv = liouvillian(me);
  const Matrix kernel = hilbert::null_space(lv, tol);
  const auto d = me.hamiltonian.rows();
  if (kernel.cols() == 0)
    throw Error("steady_state: no kernel vector found");
  if (kernel.cols() > 1) {
    std::vector<Matrix> basis;
    for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
      Matrix m = Eigen::Map<const Matrix>(kernel.col(c).data(), d, d);
      m = hermitized(m);
      const Complex tr = m.trace();
      if (std::abs(tr) > 1e-10)
        m /= tr;
      else if (m.norm() > 0.0)
        m /= m.norm();
      basis.push_back(std::move(m));
    }
    throw DegenerateSteadyStateError(
        "steady_state: kernel dimension " + std::to_string(kernel.cols()),
        std::move(basis));
  }
  Matrix rho = Eigen::Map<const Matrix>(kernel.col(0).data(), d, d);
  rho = hermitized(rho);
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-12)
    throw Error("steady_state: kernel vector is traceless");
  rho /= tr;
  return rho;
}

}  // namespace chiralwg::dynamics
