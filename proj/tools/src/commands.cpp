#include "chiralwg_cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "chiralwg/analysis.hpp"
#include "chiralwg/coefficients.hpp"
#include "chiralwg/dynamics.hpp"
#include "chiralwg/errors.hpp"
#include "chiralwg/hilbert.hpp"
#include "chiralwg/slh.hpp"
#include "chiralwg/topology.hpp"
#include "chiralwg_cli/config.hpp"
#include "chiralwg_cli/csv.hpp"

namespace chiralwg::cli {

namespace {

constexpr double pi = 3.14159265358979323846;

struct CommandInput {
  Config config;
  std::string hash;
};

std::size_t worker_count() {
  std::size_t n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("CHIRALWG_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && v > 0) n = std::min<std::size_t>(n, v);
  }
  return n;
}

Vector initial_state(const Config& cfg, const topology::ValidatedLayout& lay,
                     const coeffs::CoefficientSet& c) {
  const std::size_t n = lay.n_atoms();
  const std::size_t dim = std::size_t{1} << n;
  const std::string& name = cfg.initial;
  if (name == "ground") return analysis::ground_state(n);
  if (name == "singlet" || name == "triplet") {
    if (n != 2) throw SchemaError("initial: singlet/triplet need two atoms");
    return name == "singlet" ? analysis::singlet_state() : analysis::triplet_state();
  }
  if (name == "dark" || name == "bright") {
    if (!cfg.drive)
      throw SchemaError("initial: dark/bright need a drive section");
    const analysis::DarkStateReport rep =
        analysis::driven_dark_state(c, *cfg.drive);
    if (name == "dark") return rep.state;
    // orthogonal partner inside span{excited pair state, ground}
    const Vector gg = analysis::ground_state(2);
    const Complex a = *rep.alpha;
    const Vector base = rep.cls == analysis::DarkClass::DrivenTriplet
                            ? analysis::triplet_state()
                            : analysis::singlet_state();
    return (base - std::conj(a) * gg) / std::sqrt(1.0 + std::norm(a));
  }
  if (name.size() == n &&
      name.find_first_not_of("eg") == std::string::npos)
    return hilbert::basis_ket(hilbert::ket_index(name), dim);
  throw SchemaError("initial: unrecognized state '" + name + "'");
}

void emit(const ResultTable& table, const std::string& out_path,
          std::ostream& fallback) {
  if (out_path.empty()) {
    table.write(fallback);
    return;
  }
  std::ofstream file(out_path, std::ios::trunc);
  if (!file) throw Error("cannot open output file '" + out_path + "'");
  table.write(file);
}

// ---- coeffs ----

int cmd_coeffs(const CommandInput& in, const std::string& out_path,
               std::ostream& out) {
  const topology::ValidatedLayout lay = topology::validate(in.config.layout);
  const coeffs::CoefficientSet c = coeffs::compute_coefficients(lay);
  const auto n = static_cast<Eigen::Index>(c.n_atoms);

  ResultTable table("coeffs", in.hash);
  table.comment("collective(k,j) = conj(collective(j,k)); upper pairs listed");
  table.columns({"quantity", "atom_j", "atom_k", "value_re", "value_im"});
  auto name = [&](Eigen::Index j) { return lay.atoms()[static_cast<std::size_t>(j)].name; };
  for (Eigen::Index j = 0; j < n; ++j) {
    table.cell("delta_omega").cell(name(j)).cell("").cell(c.delta_omega(j)).cell(0.0).end_row();
    table.cell("omega_prime").cell(name(j)).cell("").cell(c.omega_prime(j)).cell(0.0).end_row();
    table.cell("detuning_prime").cell(name(j)).cell("").cell(c.detuning_prime(j)).cell(0.0).end_row();
    table.cell("gamma").cell(name(j)).cell("").cell(c.gamma(j)).cell(0.0).end_row();
    table.cell("amp_right").cell(name(j)).cell("").cell(c.amp_right(j)).end_row();
    table.cell("amp_left").cell(name(j)).cell("").cell(c.amp_left(j)).end_row();
  }
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j + 1; k < n; ++k) {
      table.cell("exchange").cell(name(j)).cell(name(k)).cell(c.exchange(j, k)).end_row();
      table.cell("collective").cell(name(j)).cell(name(k)).cell(c.collective(j, k)).end_row();
    }
  table.cell("total_phase").cell("").cell("").cell(c.total_phase).cell(0.0).end_row();
  table.cell("s_right").cell("").cell("").cell(c.s_right).end_row();
  emit(table, out_path, out);
  return 0;
}

// ---- compose ----

int cmd_compose(const CommandInput& in, const std::string& out_path,
                std::ostream& out) {
  const topology::ValidatedLayout lay = topology::validate(in.config.layout);
  const coeffs::CoefficientSet c = coeffs::compute_coefficients(lay);
  const dynamics::MasterEquation closed = coeffs::assemble_model(c, in.config.drive);
  const slh::Triplet cascade = slh::compose_layout(lay, in.config.drive);

  auto rel = [](const Matrix& a, const Matrix& b) {
    return (a - b).norm() / std::max(b.norm(), 1e-300);
  };
  const double dev_h = rel(closed.hamiltonian, cascade.hamiltonian);
  const double dev_r = rel(closed.collapse[0], cascade.collapse[0]);
  const double dev_l = rel(closed.collapse[1], cascade.collapse[1]);
  const double dev_s = std::abs(c.s_right - cascade.scattering(0, 0));
  const double worst = std::max({dev_h, dev_r, dev_l, dev_s});
  const double threshold = 1e-10;

  ResultTable table("compose", in.hash);
  table.comment("relative deviation between cascade and closed-form model");
  table.columns({"quantity", "value"});
  table.cell("deviation_hamiltonian").cell(dev_h).end_row();
  table.cell("deviation_l_right").cell(dev_r).end_row();
  table.cell("deviation_l_left").cell(dev_l).end_row();
  table.cell("deviation_s_right").cell(dev_s).end_row();
  table.cell("max_deviation").cell(worst).end_row();
  table.cell("threshold").cell(threshold).end_row();
  table.cell("pass").cell(worst <= threshold ? 1.0 : 0.0).end_row();
  emit(table, out_path, out);
  return worst <= threshold ? 0 : 1;
}

// ---- evolve ----

int cmd_evolve(const CommandInput& in, const std::string& out_path,
               std::ostream& out) {
  const Config& cfg = in.config;
  if (cfg.solver.t_final <= 0.0)
    throw SchemaError("evolve: solver t_final must be positive");
  const topology::ValidatedLayout lay = topology::validate(cfg.layout);
  const coeffs::CoefficientSet c = coeffs::compute_coefficients(lay);
  const dynamics::MasterEquation me = coeffs::assemble_model(c, cfg.drive);

  const Vector psi0 = initial_state(cfg, lay, c);
  const Matrix rho0 = psi0 * psi0.adjoint();

  std::optional<analysis::DarkStateReport> driven;
  if (cfg.drive && lay.n_atoms() == 2) {
    try {
      driven = analysis::driven_dark_state(c, *cfg.drive);
    } catch (const Error&) {
      // no analytic dark state for these parameters; plain series only
    }
  }

  dynamics::SolverOptions opts;
  opts.rel_tol = cfg.solver.rel_tol;
  opts.abs_tol = cfg.solver.abs_tol;
  const dynamics::Trajectory traj =
      dynamics::evolve(me, rho0, cfg.solver.t_final,
                       dynamics::linspace(cfg.solver.t_final, cfg.solver.samples),
                       opts);

  ResultTable table("evolve", in.hash);
  table.comment("initial state: " + cfg.initial);
  std::vector<std::string> cols{"t"};
  for (const auto& [name, series] : traj.observables) cols.push_back(name);
  Vector dark, bright;
  if (driven) {
    cols.push_back("p_dark");
    cols.push_back("p_bright");
    dark = driven->state;
    const Complex a = *driven->alpha;
    const Vector base = driven->cls == analysis::DarkClass::DrivenTriplet
                            ? analysis::triplet_state()
                            : analysis::singlet_state();
    bright = (base - std::conj(a) * analysis::ground_state(2)) /
             std::sqrt(1.0 + std::norm(a));
  }
  table.columns(cols);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    table.cell(traj.times[i]);
    for (const auto& [name, series] : traj.observables) table.cell(series[i]);
    if (driven) {
      const Matrix& rho = traj.states[i];
      table.cell(dark.dot(rho * dark).real());
      table.cell(bright.dot(rho * bright).real());
    }
    table.end_row();
  }
  emit(table, out_path, out);
  return 0;
}

// ---- steady ----

int cmd_steady(const CommandInput& in, const std::string& out_path,
               std::ostream& out) {
  const topology::ValidatedLayout lay = topology::validate(in.config.layout);
  const coeffs::CoefficientSet c = coeffs::compute_coefficients(lay);
  const dynamics::MasterEquation me = coeffs::assemble_model(c, in.config.drive);

  ResultTable table("steady", in.hash);
  table.columns({"kind", "row", "col", "value_re", "value_im"});
  try {
    const Matrix rho = dynamics::steady_state(me);
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
      for (Eigen::Index j = 0; j < rho.cols(); ++j)
        table.cell("rho").cell(static_cast<double>(i)).cell(static_cast<double>(j))
            .cell(rho(i, j)).end_row();

    bool pass = true;
    if (in.config.drive && lay.n_atoms() == 2) {
      try {
        const analysis::DarkStateReport rep =
            analysis::driven_dark_state(c, *in.config.drive);
        const double fid = rep.state.dot(rho * rep.state).real();
        table.comment("fidelity-to-analytic-dark: " + format_real(fid));
        pass = fid > 1.0 - 1e-6;
      } catch (const Error&) {
        // no analytic reference for these parameters
      }
    }
    emit(table, out_path, out);
    return pass ? 0 : 1;
  } catch (const DegenerateSteadyStateError& e) {
    table.comment(std::string("degenerate kernel: ") + e.what());
    for (std::size_t b = 0; b < e.kernel_basis.size(); ++b) {
      const Matrix& m = e.kernel_basis[b];
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
          table.cell("kernel" + std::to_string(b))
              .cell(static_cast<double>(i)).cell(static_cast<double>(j))
              .cell(m(i, j)).end_row();
    }
    emit(table, out_path, out);
    return 1;
  }
}

// ---- dark ----

int cmd_dark(const CommandInput& in, const std::string& out_path,
             std::ostream& out) {
  const topology::ValidatedLayout lay = topology::validate(in.config.layout);
  const coeffs::CoefficientSet c = coeffs::compute_coefficients(lay);
  const dynamics::MasterEquation me = coeffs::assemble_model(c, in.config.drive);
  const analysis::DarkStateScan scan = analysis::find_dark_states(me);

  ResultTable table("dark", in.hash);
  table.comment("kernel_dim: " + std::to_string(scan.kernel_dim));
  table.comment(std::string("fully_decoupled: ") +
                (scan.fully_decoupled ? "1" : "0"));
  std::vector<std::string> cols{"index",     "class",      "mu",
                                "residual_collapse", "residual_h", "alpha_re",
                                "alpha_im",  "gamma_d"};
  const auto dim = me.hamiltonian.rows();
  for (Eigen::Index i = 0; i < dim; ++i) {
    cols.push_back("amp" + std::to_string(i) + "_re");
    cols.push_back("amp" + std::to_string(i) + "_im");
  }
  table.columns(cols);
  for (std::size_t s = 0; s < scan.states.size(); ++s) {
    const analysis::DarkStateReport& rep = scan.states[s];
    table.cell(static_cast<double>(s)).cell(analysis::to_string(rep.cls));
    table.cell(rep.mu).cell(rep.residual_collapse).cell(rep.residual_h);
    const Complex alpha = rep.alpha.value_or(Complex(0.0, 0.0));
    table.cell(alpha);
    double gamma_d = 0.0;
    if (rep.alpha && c.n_atoms == 2)
      gamma_d = (c.gamma(0) + c.gamma(1)) / (1.0 + std::norm(alpha));
    table.cell(gamma_d);
    for (Eigen::Index i = 0; i < dim; ++i) table.cell(rep.state(i));
    table.end_row();
  }
  emit(table, out_path, out);
  return 0;
}

// ---- dfi ----

int cmd_dfi(const CommandInput& in, const std::string& out_path,
            std::ostream& out) {
  const topology::ValidatedLayout lay = topology::validate(in.config.layout);
  const coeffs::CoefficientSet c = coeffs::compute_coefficients(lay);
  const analysis::DfiReport rep = analysis::check_dfi(c);

  ResultTable table("dfi", in.hash);
  table.columns({"quantity", "atom_j", "atom_k", "value_re", "value_im"});
  table.cell("is_dfi").cell("").cell("").cell(rep.is_dfi ? 1.0 : 0.0).cell(0.0).end_row();
  table.cell("tolerance").cell("").cell("").cell(rep.tol).cell(0.0).end_row();
  table.cell("max_individual_decay").cell("").cell("").cell(rep.max_individual_decay).cell(0.0).end_row();
  table.cell("max_collective_decay").cell("").cell("").cell(rep.max_collective_decay).cell(0.0).end_row();
  table.cell("max_exchange").cell("").cell("").cell(rep.max_exchange).cell(0.0).end_row();
  const auto n = static_cast<Eigen::Index>(c.n_atoms);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j + 1; k < n; ++k)
      table.cell("exchange").cell(lay.atoms()[static_cast<std::size_t>(j)].name)
          .cell(lay.atoms()[static_cast<std::size_t>(k)].name)
          .cell(rep.residual_g(j, k)).end_row();
  emit(table, out_path, out);
  return 0;
}

// ---- sweep ----

struct SweepQuantities {
  bool ok = false;
  std::vector<double> gammas;
  double max_exchange = 0.0;
  double max_collective = 0.0;
  double is_dfi = 0.0;
  double dark_count = 0.0;
  double fully_decoupled = 0.0;
  Complex xi{0.0, 0.0};
  double gamma_d = 0.0;
  double driven_found = 0.0;
};

SweepQuantities sweep_point(const nlohmann::json& raw) {
  SweepQuantities q;
  const Config cfg = interpret_config(raw);
  const topology::ValidatedLayout lay = topology::validate(cfg.layout);
  const coeffs::CoefficientSet c = coeffs::compute_coefficients(lay);
  const auto n = static_cast<Eigen::Index>(c.n_atoms);
  for (Eigen::Index j = 0; j < n; ++j) q.gammas.push_back(c.gamma(j));
  const analysis::DfiReport dfi = analysis::check_dfi(c);
  q.max_exchange = dfi.max_exchange;
  q.max_collective = dfi.max_collective_decay;
  q.is_dfi = dfi.is_dfi ? 1.0 : 0.0;
  const analysis::DarkStateScan scan =
      analysis::find_dark_states(coeffs::assemble_model(c, cfg.drive));
  std::size_t nontrivial = 0;
  for (const auto& rep : scan.states)
    if (rep.cls != analysis::DarkClass::Trivial) ++nontrivial;
  q.dark_count = static_cast<double>(nontrivial);
  q.fully_decoupled = scan.fully_decoupled ? 1.0 : 0.0;
  if (c.n_atoms == 2) {
    const RealVector& w = cfg.drive ? c.detuning_prime : c.omega_prime;
    q.xi = (w(1) - w(0) + c.exchange(0, 1) - std::conj(c.exchange(0, 1))) / 2.0;
    if (cfg.drive) {
      try {
        q.gamma_d = analysis::driven_dark_state(c, *cfg.drive).gamma_d.value_or(0.0);
        q.driven_found = 1.0;
      } catch (const Error&) {
      }
    }
  }
  q.ok = true;
  return q;
}

int cmd_sweep(const CommandInput& in, const std::string& out_path,
              std::ostream& out) {
  const Config& cfg = in.config;
  if (cfg.sweep.empty())
    throw SchemaError("sweep: config needs a 'sweep' section with parameters");

  std::vector<std::vector<double>> axes;
  for (const SweepParameter& p : cfg.sweep) {
    std::vector<double> vals(p.count);
    for (std::size_t i = 0; i < p.count; ++i)
      vals[i] = p.start + (p.stop - p.start) * static_cast<double>(i) /
                              static_cast<double>(p.count - 1);
    axes.push_back(std::move(vals));
  }
  const std::size_t total =
      axes.size() == 1 ? axes[0].size() : axes[0].size() * axes[1].size();

  std::vector<std::vector<double>> param_values(total);
  std::vector<SweepQuantities> results(total);
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      std::vector<double> vals;
      if (axes.size() == 1) {
        vals = {axes[0][i]};
      } else {
        vals = {axes[0][i / axes[1].size()], axes[1][i % axes[1].size()]};
      }
      param_values[i] = vals;
      nlohmann::json raw = cfg.raw;
      raw.erase("sweep");
      try {
        for (std::size_t a = 0; a < vals.size(); ++a)
          apply_override(raw, cfg.sweep[a].path + "=" + format_real(vals[a]));
        results[i] = sweep_point(raw);
      } catch (const std::exception&) {
        results[i] = SweepQuantities{};  // ok stays false
        results[i].gammas.assign(cfg.layout.atoms.size(), 0.0);
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n_workers = std::min(worker_count(), total);
  for (std::size_t w = 0; w + 1 < n_workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  ResultTable table("sweep", in.hash);
  std::vector<std::string> cols;
  for (const SweepParameter& p : cfg.sweep) cols.push_back(p.path);
  cols.push_back("ok");
  for (const auto& a : cfg.layout.atoms) cols.push_back("gamma_" + a.name);
  cols.insert(cols.end(), {"max_exchange", "max_collective", "is_dfi",
                           "dark_count", "fully_decoupled"});
  const bool two = cfg.layout.atoms.size() == 2;
  if (two) {
    cols.push_back("xi_re");
    cols.push_back("xi_im");
    if (cfg.drive) {
      cols.push_back("gamma_d");
      cols.push_back("driven_found");
    }
  }
  table.columns(cols);
  for (std::size_t i = 0; i < total; ++i) {
    for (double v : param_values[i]) table.cell(v);
    const SweepQuantities& q = results[i];
    table.cell(q.ok ? 1.0 : 0.0);
    for (std::size_t j = 0; j < cfg.layout.atoms.size(); ++j)
      table.cell(j < q.gammas.size() ? q.gammas[j] : 0.0);
    table.cell(q.max_exchange).cell(q.max_collective).cell(q.is_dfi);
    table.cell(q.dark_count).cell(q.fully_decoupled);
    if (two) {
      table.cell(q.xi);
      if (cfg.drive) table.cell(q.gamma_d).cell(q.driven_found);
    }
    table.end_row();
  }
  emit(table, out_path, out);
  return 0;
}

// ---- verify-tables ----

enum class Topo { Small, Separate, Nested, Braided };

topology::Layout two_atom_layout(Topo topo, const std::vector<double>& phases,
                                 double g_r, double g_l, double freq = 0.0,
                                 double det_a = 0.0, double det_b = 0.0) {
  static const std::vector<std::vector<std::string>> owners = {
      {"a", "b"}, {"a", "a", "b", "b"}, {"a", "b", "b", "a"}, {"a", "b", "a", "b"}};
  topology::Layout lay;
  lay.atoms = {{"a", freq, det_a}, {"b", freq, det_b}};
  const auto& own = owners[static_cast<std::size_t>(topo)];
  for (std::size_t r = 0; r < own.size(); ++r)
    lay.points.push_back({own[r], static_cast<long long>(r), g_r, g_l});
  lay.phases = phases;
  return lay;
}

// Closed forms for equal per-point rates, transcribed independently of the
// library's generic double sums so the comparison can fail honestly.
struct PairCoefficients {
  double dw_a, dw_b, gamma_a, gamma_b;
  Complex coll, exch;
};

PairCoefficients reference_pair_coefficients(Topo topo, double gr, double gl,
                                             double p1, double p2, double p3) {
  const Complex i_unit(0.0, 1.0);
  auto e = [&](double phi) { return std::exp(i_unit * phi); };
  PairCoefficients r{};
  const double s = gr + gl;
  switch (topo) {
    case Topo::Small:
      r.dw_a = r.dw_b = 0.0;
      r.gamma_a = r.gamma_b = s;
      r.coll = gr * e(p1) + gl * e(-p1);
      r.exch = (gr * e(p1) - gl * e(-p1)) / (2.0 * i_unit);
      break;
    case Topo::Separate:
      r.dw_a = s * std::sin(p1);
      r.dw_b = s * std::sin(p3);
      r.gamma_a = 2.0 * s * (1.0 + std::cos(p1));
      r.gamma_b = 2.0 * s * (1.0 + std::cos(p3));
      r.coll = gr * (e(p1 + p2) + e(p1 + p2 + p3) + e(p2) + e(p2 + p3)) +
               gl * (e(-p1 - p2) + e(-p1 - p2 - p3) + e(-p2) + e(-p2 - p3));
      r.exch = (gr * (e(p1 + p2) + e(p1 + p2 + p3) + e(p2) + e(p2 + p3)) -
                gl * (e(-p1 - p2) + e(-p1 - p2 - p3) + e(-p2) + e(-p2 - p3))) /
               (2.0 * i_unit);
      break;
    case Topo::Nested:
      r.dw_a = s * std::sin(p1 + p2 + p3);
      r.dw_b = s * std::sin(p2);
      r.gamma_a = 2.0 * s * (1.0 + std::cos(p1 + p2 + p3));
      r.gamma_b = 2.0 * s * (1.0 + std::cos(p2));
      r.coll = gr * (e(p1) + e(p1 + p2) + e(-p2 - p3) + e(-p3)) +
               gl * (e(-p1) + e(-p1 - p2) + e(p2 + p3) + e(p3));
      r.exch = (gr * (e(p1) + e(p1 + p2) - e(-p2 - p3) - e(-p3)) -
                gl * (e(-p1) + e(-p1 - p2) - e(p2 + p3) - e(p3))) /
               (2.0 * i_unit);
      break;
    case Topo::Braided:
      r.dw_a = s * std::sin(p1 + p2);
      r.dw_b = s * std::sin(p2 + p3);
      r.gamma_a = 2.0 * s * (1.0 + std::cos(p1 + p2));
      r.gamma_b = 2.0 * s * (1.0 + std::cos(p2 + p3));
      r.coll = gr * (e(p1) + e(p1 + p2 + p3) + e(-p2) + e(p3)) +
               gl * (e(-p1) + e(-p1 - p2 - p3) + e(p2) + e(-p3));
      r.exch = (gr * (e(p1) + e(p1 + p2 + p3) - e(-p2) + e(p3)) -
                gl * (e(-p1) + e(-p1 - p2 - p3) - e(p2) + e(-p3))) /
               (2.0 * i_unit);
      break;
  }
  return r;
}

double reference_gamma_d(Topo topo, bool singlet, double gr, double gl,
                         double p2, double delta, double omega) {
  const double dg = gl - gr;
  const double s = gr + gl;
  const double om2 = omega * omega;
  switch (topo) {
    case Topo::Small:
      return 2.0 * s * (dg * dg + 4.0 * delta * delta) /
             (2.0 * om2 + dg * dg + 4.0 * delta * delta);
    case Topo::Separate:
      return 16.0 * s * (4.0 * dg * dg + delta * delta) /
             (om2 + 8.0 * dg * dg + 2.0 * delta * delta);
    case Topo::Nested:
      return 8.0 * s * (1.0 + std::cos(p2)) * delta * delta /
             (om2 + 2.0 * delta * delta);
    case Topo::Braided: {
      const double sign = singlet ? 1.0 : -1.0;
      return 8.0 * s * (1.0 + sign * std::cos(p2)) * (dg * dg + delta * delta) /
             (om2 + 2.0 * dg * dg + 2.0 * delta * delta);
    }
  }
  return 0.0;
}

const char* topo_name(Topo t) {
  switch (t) {
    case Topo::Small: return "small";
    case Topo::Separate: return "separate";
    case Topo::Nested: return "nested";
    case Topo::Braided: return "braided";
  }
  return "?";
}

int cmd_verify_tables(const std::string& hash, const std::string& out_path,
                      std::ostream& out) {
  ResultTable table("verify-tables", hash);
  table.comment("bundled two-atom fixtures; equal per-point rates");
  table.columns({"table", "row", "check", "expected", "actual", "deviation", "pass"});
  bool all_pass = true;

  auto check = [&](const std::string& tab, const std::string& row,
                   const std::string& what, double expected, double actual,
                   double tol) {
    const double dev = std::abs(expected - actual);
    const bool ok = dev <= tol;
    all_pass = all_pass && ok;
    table.cell(tab).cell(row).cell(what).cell(expected).cell(actual).cell(dev)
        .cell(ok ? 1.0 : 0.0).end_row();
  };

  // Coefficient closed forms per topology against the generic sums.
  const std::vector<std::vector<double>> phase_sets = {
      {0.0, 0.0, 0.0}, {pi / 2, pi / 3, pi / 4}, {pi, pi / 2, pi}};
  for (Topo topo : {Topo::Small, Topo::Separate, Topo::Nested, Topo::Braided}) {
    for (std::size_t ps = 0; ps < phase_sets.size(); ++ps) {
      const auto& full = phase_sets[ps];
      const std::vector<double> phases =
          topo == Topo::Small ? std::vector<double>{full[0]} : full;
      const double gr = 0.7, gl = 0.3;
      const topology::ValidatedLayout lay =
          topology::validate(two_atom_layout(topo, phases, gr, gl));
      const coeffs::CoefficientSet c = coeffs::compute_coefficients(lay);
      const PairCoefficients ref = reference_pair_coefficients(
          topo, gr, gl, full[0], full[1], full[2]);
      const std::string row = std::string(topo_name(topo)) + "/phase-set-" +
                              std::to_string(ps);
      check("coefficients", row, "delta_omega_a", ref.dw_a, c.delta_omega(0), 1e-12);
      check("coefficients", row, "delta_omega_b", ref.dw_b, c.delta_omega(1), 1e-12);
      check("coefficients", row, "gamma_a", ref.gamma_a, c.gamma(0), 1e-12);
      check("coefficients", row, "gamma_b", ref.gamma_b, c.gamma(1), 1e-12);
      check("coefficients", row, "collective_re", ref.coll.real(),
            c.collective(0, 1).real(), 1e-12);
      check("coefficients", row, "collective_im", ref.coll.imag(),
            c.collective(0, 1).imag(), 1e-12);
      check("coefficients", row, "exchange_re", ref.exch.real(),
            c.exchange(0, 1).real(), 1e-12);
      check("coefficients", row, "exchange_im", ref.exch.imag(),
            c.exchange(0, 1).imag(), 1e-12);
    }
  }
  {
    // Spot rows with pinned numbers.
    const topology::ValidatedLayout braided = topology::validate(
        two_atom_layout(Topo::Braided, {pi / 2, pi / 2, pi / 2}, 0.5, 0.5));
    const coeffs::CoefficientSet cb = coeffs::compute_coefficients(braided);
    check("coefficients", "braided/dfi-point", "gamma_a", 0.0, cb.gamma(0), 1e-12);
    check("coefficients", "braided/dfi-point", "gamma_b", 0.0, cb.gamma(1), 1e-12);
    check("coefficients", "braided/dfi-point", "collective_abs", 0.0,
          std::abs(cb.collective(0, 1)), 1e-12);
    check("coefficients", "braided/dfi-point", "exchange_re", 1.0,
          cb.exchange(0, 1).real(), 1e-12);
    check("coefficients", "braided/dfi-point", "exchange_im", 0.0,
          cb.exchange(0, 1).imag(), 1e-12);
    const topology::ValidatedLayout small =
        topology::validate(two_atom_layout(Topo::Small, {0.0}, 0.7, 0.3));
    const coeffs::CoefficientSet cs = coeffs::compute_coefficients(small);
    check("coefficients", "small/bidirectional-point", "collective_re", 1.0,
          cs.collective(0, 1).real(), 1e-12);
    check("coefficients", "small/bidirectional-point", "collective_im", 0.0,
          cs.collective(0, 1).imag(), 1e-12);
    check("coefficients", "small/bidirectional-point", "exchange_re", 0.0,
          cs.exchange(0, 1).real(), 1e-12);
    check("coefficients", "small/bidirectional-point", "exchange_im", -0.2,
          cs.exchange(0, 1).imag(), 1e-12);
  }

  // Dark-state condition rows: positive fixtures find the listed state,
  // negative fixtures find nothing nontrivial.
  struct DarkRow {
    const char* name;
    Topo topo;
    std::vector<double> phases;
    double gr, gl;
    analysis::DarkClass expect;  // Other encodes "none"
  };
  const std::vector<DarkRow> dark_rows = {
      {"small/S", Topo::Small, {0.0}, 0.5, 0.5, analysis::DarkClass::Singlet},
      {"small/T", Topo::Small, {pi}, 0.5, 0.5, analysis::DarkClass::Triplet},
      {"separate/S", Topo::Separate, {pi / 3, -pi / 3, pi / 3}, 0.5, 0.5,
       analysis::DarkClass::Singlet},
      {"separate/T", Topo::Separate, {pi / 3, 2 * pi / 3, pi / 3}, 0.5, 0.5,
       analysis::DarkClass::Triplet},
      {"nested/S-chiral", Topo::Nested, {0.0, 2 * pi / 3, 0.0}, 0.2, 0.8,
       analysis::DarkClass::Singlet},
      {"nested/T-chiral", Topo::Nested, {pi, pi / 2, pi}, 0.3, 0.7,
       analysis::DarkClass::Triplet},
      {"braided/S", Topo::Braided, {0.0, pi / 2, 0.0}, 0.5, 0.5,
       analysis::DarkClass::Singlet},
      {"braided/T", Topo::Braided, {pi, pi / 2, pi}, 0.5, 0.5,
       analysis::DarkClass::Triplet},
      {"small/chiral-none", Topo::Small, {0.0}, 1.0, 0.0,
       analysis::DarkClass::Other},
      {"braided/chiral-none", Topo::Braided, {0.0, pi / 2, 0.0}, 0.2, 0.8,
       analysis::DarkClass::Other},
  };
  for (const DarkRow& row : dark_rows) {
    const topology::ValidatedLayout lay =
        topology::validate(two_atom_layout(row.topo, row.phases, row.gr, row.gl));
    const analysis::DarkStateScan scan = analysis::find_dark_states(
        coeffs::assemble_model(coeffs::compute_coefficients(lay)));
    double found = 0.0, residual = 0.0;
    std::size_t nontrivial = 0;
    for (const auto& rep : scan.states) {
      if (rep.cls == analysis::DarkClass::Trivial) continue;
      ++nontrivial;
      if (rep.cls == row.expect) {
        found = 1.0;
        residual = std::max(rep.residual_collapse, rep.residual_h);
      }
    }
    if (row.expect == analysis::DarkClass::Other) {
      check("dark-conditions", row.name, "nontrivial_count", 0.0,
            static_cast<double>(nontrivial), 0.0);
    } else {
      check("dark-conditions", row.name, "state_found", 1.0, found, 0.0);
      check("dark-conditions", row.name, "residual", 0.0, residual, 1e-9);
    }
  }

  // Driven populating rates against the closed forms.
  struct DrivenRow {
    const char* name;
    Topo topo;
    bool singlet;
    std::vector<double> phases;
  };
  const std::vector<DrivenRow> driven_rows = {
      {"small/DS", Topo::Small, true, {0.0}},
      {"small/DT", Topo::Small, false, {pi}},
      {"separate/DS", Topo::Separate, true, {0.0, 0.0, 0.0}},
      {"separate/DT", Topo::Separate, false, {0.0, pi, 0.0}},
      {"nested/DS", Topo::Nested, true, {0.0, pi / 2, 0.0}},
      {"nested/DT", Topo::Nested, false, {pi, pi / 2, pi}},
      {"braided/DS", Topo::Braided, true, {0.0, pi / 2, 0.0}},
      {"braided/DT", Topo::Braided, false, {pi, pi / 2, pi}},
  };
  const double gr = 0.25, gl = 0.75, delta = 0.5, omega = 1.0;
  for (const DrivenRow& row : driven_rows) {
    const topology::ValidatedLayout lay = topology::validate(
        two_atom_layout(row.topo, row.phases, gr, gl, 0.0, delta, -delta));
    const coeffs::CoefficientSet c = coeffs::compute_coefficients(lay);
    const topology::DriveSpec drive =
        coeffs::drive_for_rabi(c, 0, Complex(omega, 0.0));
    const analysis::DarkStateReport rep = analysis::driven_dark_state(c, drive);
    const double expected = reference_gamma_d(row.topo, row.singlet, gr, gl,
                                              pi / 2, delta, omega);
    check("populating-rate", row.name, "gamma_d", expected,
          rep.gamma_d.value_or(-1.0), 1e-9);
    const bool right_class =
        rep.cls == (row.singlet ? analysis::DarkClass::DrivenSinglet
                                : analysis::DarkClass::DrivenTriplet);
    check("populating-rate", row.name, "class", 1.0, right_class ? 1.0 : 0.0, 0.0);
  }

  emit(table, out_path, out);
  return all_pass ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"chiral waveguide atom network simulator"};
  app.require_subcommand(1);

  const std::vector<std::string> names = {"coeffs",  "compose", "evolve",
                                          "steady",  "dark",    "dfi",
                                          "sweep",   "verify-tables"};
  const std::vector<std::string> descriptions = {
      "master-equation coefficients for a layout",
      "cascade vs closed-form cross-check",
      "integrate the master equation and emit time series",
      "steady state of the Liouvillian",
      "dark-state scan",
      "decoherence-free interaction check",
      "grid scan over one or two config parameters",
      "reproduce the bundled coefficient/dark-state/rate tables"};
  struct SubOptions {
    std::string config_path;
    std::string out_path;
    std::vector<std::string> params;
  };
  std::vector<SubOptions> opts(names.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < names.size(); ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descriptions[i]);
    auto* config_opt =
        sub->add_option("--config", opts[i].config_path, "JSON layout config");
    if (names[i] != "verify-tables") config_opt->required();
    sub->add_option("--out", opts[i].out_path, "output CSV path (default stdout)");
    sub->add_option("--param", opts[i].params,
                    "config override key=value, repeatable");
    subs.push_back(sub);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  std::size_t which = names.size();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (subs[i]->parsed()) which = i;
  const SubOptions& chosen = opts[which];

  try {
    CommandInput in;
    if (!chosen.config_path.empty()) {
      nlohmann::json raw = load_json(chosen.config_path);
      for (const std::string& p : chosen.params) apply_override(raw, p);
      in.config = interpret_config(raw);
      in.hash = config_hash_hex(raw);
    } else {
      in.hash = config_hash_hex(nlohmann::json::object());
    }

    const std::string& cmd = names[which];
    if (cmd == "coeffs") return cmd_coeffs(in, chosen.out_path, out);
    if (cmd == "compose") return cmd_compose(in, chosen.out_path, out);
    if (cmd == "evolve") return cmd_evolve(in, chosen.out_path, out);
    if (cmd == "steady") return cmd_steady(in, chosen.out_path, out);
    if (cmd == "dark") return cmd_dark(in, chosen.out_path, out);
    if (cmd == "dfi") return cmd_dfi(in, chosen.out_path, out);
    if (cmd == "sweep") return cmd_sweep(in, chosen.out_path, out);
    return cmd_verify_tables(in.hash, chosen.out_path, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const LayoutError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "physics error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace chiralwg::cli
