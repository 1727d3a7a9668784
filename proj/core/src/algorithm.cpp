// Copyright 2026 The isothc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "isothc/algorithm.hpp"

#include <climits>
#include <cmath>
#include <vector>

#include "isothc/errors.hpp"

namespace isothc {

namespace {

constexpr double kVacuumTolerance = 1e-10;

Eigen::VectorXd diagonal_of_rotated_h(const ElectronicHamiltonian& h_rotated) {
  const Eigen::MatrixXd& h = h_rotated.h();
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  Eigen::MatrixXd off = h;
  off.diagonal().setZero();
  if (off.size() && off.cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw DomainError("one-body matrix is not diagonal; rotate to the h eigenbasis first");
  }
  return h.diagonal();
}

double spectral_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

SpinMode spin_of(const ModeLayout& layout) {
  return layout.spinful ? SpinMode::spinful : SpinMode::spinless;
}

}  // namespace

std::string to_string(Variant variant) { return variant == Variant::basic ? "basic" : "improved"; }

Variant parse_variant(const std::string& text) {
  if (text == "basic") return Variant::basic;
  if (text == "improved") return Variant::improved;
  throw DomainError("unknown variant '" + text + "' (expected basic or improved)");
}

void StepSpec::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("tau must be a positive finite number");
  for (double p : phases)
    if (!std::isfinite(p)) throw DomainError("phases must be finite");
}

// ---------------------------------------------------------------------------
// Circuit

StepCircuit::StepCircuit(const ThcFactorization& thc, const ElectronicHamiltonian& h_rotated,
                         SpinMode spin, StepSpec spec)
    : StepCircuit(thc, diagonal_of_rotated_h(h_rotated), spin, spec) {
  if (thc.n() != h_rotated.n_orbitals()) throw DomainError("factorization and Hamiltonian sizes differ");
}

StepCircuit::StepCircuit(const ThcFactorization& thc, const Eigen::VectorXd& orbital_energies,
                         SpinMode spin, StepSpec spec)
    : layout_{thc.n(), thc.m() - thc.n(), spin == SpinMode::spinful}, spec_(spec) {
  spec_.validate();
  if (orbital_energies.size() != thc.n()) throw DomainError("need one orbital energy per orbital");
  layout_.validate(kDensityModeCap);
  rotation_ = givens_decompose(complete_isometry(thc.u()), thc.n());
  interaction_energies_ = diagonal_two_body_energies(layout_, thc.vtilde());
  const Eigen::VectorXd mode_energies = system_mode_energies(layout_, orbital_energies);
  one_body_energies_ = Eigen::VectorXd::Zero(layout_.dim());
  for (Eigen::Index x = 0; x < one_body_energies_.size(); ++x)
    for (int p = 0; p < layout_.n_modes(); ++p)
      if (fock::is_occupied(static_cast<fock::BasisIndex>(x), p)) one_body_energies_(x) += mode_energies(p);
}

void StepCircuit::apply_block(Eigen::MatrixXcd& m, double tau) const {
  kernel::basis_rotation(m, layout_, rotation_, Direction::inverse, SpinSector::both);
  kernel::diagonal_phase(m, interaction_energies_, tau);
  kernel::basis_rotation(m, layout_, rotation_, Direction::forward, SpinSector::both);
}

void StepCircuit::apply_interaction(Eigen::MatrixXcd& m) const {
  if (spec_.variant == Variant::basic) {
    apply_block(m, spec_.tau);
    return;
  }
  const double quarter = spec_.tau / 4.0;
  apply_block(m, quarter);
  kernel::ancilla_phase(m, layout_, spec_.phases[2]);
  apply_block(m, quarter);
  kernel::ancilla_phase(m, layout_, spec_.phases[1]);
  apply_block(m, quarter);
  kernel::ancilla_phase(m, layout_, spec_.phases[0]);
  apply_block(m, quarter);
}

void StepCircuit::apply_unitary(Eigen::MatrixXcd& m) const {
  kernel::diagonal_phase(m, one_body_energies_, spec_.tau / 2.0);
  apply_interaction(m);
  kernel::diagonal_phase(m, one_body_energies_, spec_.tau / 2.0);
}

const Eigen::MatrixXcd& StepCircuit::fused_unitary() const {
  if (!fused_) {
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(layout_.dim(), layout_.dim());
    apply_unitary(u);
    fused_ = std::move(u);
  }
  return *fused_;
}

FockDensity step_channel(const FockDensity& rho, const StepCircuit& circuit, CircuitPath path) {
  if (!(rho.layout() == circuit.layout())) throw DomainError("step_channel: density layout differs from circuit");
  const double leak = ancilla_weight(rho);
  if (leak > kVacuumTolerance) {
    throw DomainError("step_channel: input has weight " + std::to_string(leak) + " outside the b-vacuum");
  }
  Eigen::MatrixXcd m = rho.matrix();
  if (path == CircuitPath::reference) {
    kernel::conjugate(m, [&](Eigen::MatrixXcd& x) { circuit.apply_unitary(x); });
  } else {
    const Eigen::MatrixXcd& u = circuit.fused_unitary();
    m = u * m * u.adjoint();
  }
  return reset_ancillas(FockDensity(rho.layout(), std::move(m)));
}

FockDensity step_channel(const FockDensity& rho, const ThcFactorization& thc,
                         const ElectronicHamiltonian& h_rotated, const StepSpec& spec, CircuitPath path) {
  const StepCircuit circuit(thc, h_rotated, spin_of(rho.layout()), spec);
  return step_channel(rho, circuit, path);
}

int step_count(double t, double tau, double tolerance) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("total time must be finite and >= 0");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("tau must be a positive finite number");
  const double ratio = t / tau;
  if (ratio > static_cast<double>(INT_MAX)) throw DomainError("too many steps");
  const double steps = std::round(ratio);
  if (std::abs(ratio - steps) > tolerance) {
    throw DomainError("t / tau = " + std::to_string(ratio) + " is not an integer step count");
  }
  return static_cast<int>(steps);
}

EvolveResult evolve(const FockState& psi0, const ThcFactorization& thc,
                    const ElectronicHamiltonian& h_rotated, double t, const StepSpec& spec,
                    EvolveOptions options) {
  const ModeLayout& sys = psi0.layout();
  if (sys.n_ancilla != 0 || sys.n_system != h_rotated.n_orbitals()) {
    throw DomainError("evolve: initial state must live on the system modes");
  }
  const int steps = step_count(t, spec.tau, options.step_tolerance);
  const SpinMode spin = spin_of(sys);
  const StepCircuit circuit(thc, h_rotated, spin, spec);
  FockDensity rho = embed_system(FockDensity::pure(psi0), circuit.layout());
  for (int s = 0; s < steps; ++s) rho = step_channel(rho, circuit, options.path);
  FockDensity reduced = trace_out_ancillas(rho);
  if (t == 0.0) return {std::move(reduced), 0.0, steps};

  const ManyBodyOperator op = build_many_body_operator(h_rotated, spin);
  const FockState exact = exact_evolution(op, psi0, t);
  const double error = trace_distance(reduced, FockDensity::pure(exact));
  return {std::move(reduced), error, steps};
}

FockState hartree_fock_state(int n_orbitals, int n_electrons, bool spinful, int ms2) {
  if (n_orbitals < 1) throw DomainError("need at least one orbital");
  const ModeLayout layout = ModeLayout::system_only(n_orbitals, spinful);
  fock::BasisIndex index = 0;
  if (!spinful) {
    if (n_electrons < 0 || n_electrons > n_orbitals) throw DomainError("electron count out of range");
    for (int i = 0; i < n_electrons; ++i) index |= fock::BasisIndex{1} << i;
  } else {
    if ((n_electrons + ms2) % 2 != 0) throw DomainError("n_electrons and ms2 must have equal parity");
    const int up = (n_electrons + ms2) / 2;
    const int down = n_electrons - up;
    if (up < 0 || down < 0 || up > n_orbitals || down > n_orbitals) {
      throw DomainError("electron count out of range");
    }
    for (int i = 0; i < up; ++i) index |= fock::BasisIndex{1} << layout.a_mode(0, i);
    for (int i = 0; i < down; ++i) index |= fock::BasisIndex{1} << layout.a_mode(1, i);
  }
  return FockState::basis_state(layout, index);
}

// ---------------------------------------------------------------------------
// Error terms

ManyBodyOperator projected_operator(const ThcFactorization& thc, SpinMode spin, int mode_cap) {
  return build_two_body_operator(projected_interaction(thc), thc.n(), spin, mode_cap);
}

double trotter_bound(const ManyBodyOperator& h_op, const ManyBodyOperator& vprime_op, double tau) {
  if (h_op.n_modes() != vprime_op.n_modes() || h_op.spin() != vprime_op.spin()) {
    throw DomainError("trotter_bound: operators act on different spaces");
  }
  const Eigen::SparseMatrix<double>& h = h_op.matrix();
  const Eigen::SparseMatrix<double>& v = vprime_op.matrix();
  const Eigen::SparseMatrix<double> vh = v * h - h * v;
  const Eigen::SparseMatrix<double> outer_v = v * vh - vh * v;
  const Eigen::SparseMatrix<double> hv = h * v - v * h;
  const Eigen::SparseMatrix<double> outer_h = h * hv - hv * h;
  const double a = operator_norm(ManyBodyOperator(h_op.n_modes(), h_op.spin(), outer_v));
  const double b = operator_norm(ManyBodyOperator(h_op.n_modes(), h_op.spin(), outer_h));
  const double t3 = tau * tau * tau;
  return t3 / 12.0 * a + t3 / 24.0 * b;
}

double splitting_error(const ManyBodyOperator& h_op, const ManyBodyOperator& vprime_op, double tau) {
  const Eigen::MatrixXcd half = evolution_operator(h_op, tau / 2.0);
  const Eigen::MatrixXcd split = half * evolution_operator(vprime_op, tau) * half;
  const Eigen::MatrixXcd exact = evolution_operator(h_op + vprime_op, tau);
  return spectral_norm(split - exact);
}

ThcBound thc_bound(const ElectronicHamiltonian& hamiltonian, const ThcFactorization& thc, double t,
                   SpinMode spin, int mode_cap) {
  if (thc.n() != hamiltonian.n_orbitals()) throw DomainError("factorization and Hamiltonian sizes differ");
  if (!(t >= 0.0)) throw DomainError("t must be >= 0");
  const int n = thc.n();
  const Eigen::MatrixXd diff = hamiltonian.eri() - projected_interaction(thc);
  ThcBound out;
  out.element_norm_rate = (spin == SpinMode::spinful ? 2.0 : 1.0) * n * n * diff.norm();
  double rate = out.element_norm_rate;
  if (spin_factor(spin) * n <= mode_cap) {
    out.operator_norm_rate = operator_norm(build_two_body_operator(diff, n, spin, mode_cap));
    if (*out.operator_norm_rate <= rate) {
      rate = *out.operator_norm_rate;
      out.branch = ThcBoundBranch::operator_norm;
    }
  }
  out.value = rate * t;
  return out;
}

double projection_error_measured(const ThcFactorization& thc, const FockDensity& rho, const StepSpec& spec) {
  const ModeLayout& sys = rho.layout();
  if (sys.n_ancilla != 0 || sys.n_system != thc.n()) {
    throw DomainError("projection_error_measured: density must live on the system modes");
  }
  const SpinMode spin = spin_of(sys);
  const StepCircuit circuit(thc, Eigen::VectorXd::Zero(thc.n()), spin, spec);
  Eigen::MatrixXcd m = embed_system(rho, circuit.layout()).matrix();
  kernel::conjugate(m, [&](Eigen::MatrixXcd& x) { circuit.apply_interaction(x); });
  const FockDensity reduced = trace_out_ancillas(FockDensity(circuit.layout(), std::move(m)));
  const FockDensity ideal = exact_evolution(projected_operator(thc, spin), rho, spec.tau);
  return trace_distance(reduced, ideal);
}

double projection_error_bound(const ThcFactorization& thc, const StepSpec& spec, SpinMode spin) {
  const StepCircuit circuit(thc, Eigen::VectorXd::Zero(thc.n()), spin, spec);
  const ModeLayout& layout = circuit.layout();
  const ModeLayout sys = layout.system_layout();
  const Eigen::Index sdim = sys.dim();
  std::vector<Eigen::Index> embedded(static_cast<std::size_t>(sdim));
  std::vector<bool> in_vacuum(static_cast<std::size_t>(layout.dim()), false);
  Eigen::MatrixXcd cols = Eigen::MatrixXcd::Zero(layout.dim(), sdim);
  for (Eigen::Index xs = 0; xs < sdim; ++xs) {
    embedded[static_cast<std::size_t>(xs)] =
        static_cast<Eigen::Index>(layout.embed_system(static_cast<fock::BasisIndex>(xs)));
    in_vacuum[static_cast<std::size_t>(embedded[static_cast<std::size_t>(xs)])] = true;
    cols(embedded[static_cast<std::size_t>(xs)], xs) = 1.0;
  }
  circuit.apply_interaction(cols);
  const Eigen::MatrixXcd ideal = evolution_operator(projected_operator(thc, spin), spec.tau);
  Eigen::MatrixXcd inside(sdim, sdim);
  for (Eigen::Index xs = 0; xs < sdim; ++xs) inside.row(xs) = cols.row(embedded[static_cast<std::size_t>(xs)]);
  Eigen::MatrixXcd outside(layout.dim() - sdim, sdim);
  Eigen::Index r = 0;
  for (Eigen::Index x = 0; x < layout.dim(); ++x)
    if (!in_vacuum[static_cast<std::size_t>(x)]) outside.row(r++) = cols.row(x);
  const double leak = spectral_norm(outside);
  return spectral_norm(inside - ideal) + 0.5 * leak * leak;
}

std::array<std::complex<double>, 4> phase_cancellation_sums(const std::array<double, 3>& phases) {
  auto e = [](double x) { return std::polar(1.0, x); };
  std::array<std::complex<double>, 4> out;
  for (int k = 0; k < 2; ++k) {
    const double f = k + 1.0;
    const double p1 = f * phases[0];
    const double p2 = f * phases[1];
    const double p3 = f * phases[2];
    out[static_cast<std::size_t>(k)] = 1.0 + e(p1) + e(p1 + p2) + e(p1 + p2 + p3);
    out[static_cast<std::size_t>(k + 2)] =
        2.0 + e(p1) + e(p2) + e(p3) + e(p1 + p2) + e(p2 + p3) + e(p1 + p2 + p3);
  }
  return out;
}

ErrorBudget error_budget(const ElectronicHamiltonian& h_rotated, const ThcFactorization& thc,
                         const StepSpec& spec, SpinMode spin) {
  spec.validate();
  ErrorBudget out;
  out.eps_thc_rate = thc_bound(h_rotated, thc, 1.0, spin).value;
  const ManyBodyOperator h_op = build_one_body_operator(h_rotated.h(), spin);
  out.eps_tr = trotter_bound(h_op, projected_operator(thc, spin), spec.tau);
  out.eps_pr = projection_error_bound(thc, spec, spin);
  return out;
}

double one_step_error(const FockDensity& rho, const ThcFactorization& thc,
                      const ElectronicHamiltonian& h_rotated, const StepSpec& spec) {
  const ModeLayout& sys = rho.layout();
  if (sys.n_ancilla != 0 || sys.n_system != h_rotated.n_orbitals()) {
    throw DomainError("one_step_error: density must live on the system modes");
  }
  const SpinMode spin = spin_of(sys);
  const StepCircuit circuit(thc, h_rotated, spin, spec);
  const FockDensity out = trace_out_ancillas(step_channel(embed_system(rho, circuit.layout()), circuit));
  const FockDensity exact = exact_evolution(build_many_body_operator(h_rotated, spin), rho, spec.tau);
  return trace_distance(out, exact);
}

}  // namespace isothc
