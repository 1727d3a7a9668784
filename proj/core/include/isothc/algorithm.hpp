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

// Per-step channels of the ancilla-extended Trotter algorithm, multi-step
// evolution against exact dynamics, and the analytic error terms.
//
// One step on the extended space (h diagonal in the system orbitals):
//
//   basic:     e^{-i h tau/2}  V(tau)  e^{-i h tau/2},  then reset
//   improved:  e^{-i h tau/2}  V(tau/4) P(phi_1) V(tau/4) P(phi_2) V(tau/4) P(phi_3) V(tau/4)
//              e^{-i h tau/2},  then reset
//
// written as operator products, with V(s) = U e^{-i vtilde s} U^dag the
// diagonal kernel in the rotated modes and P(phi) = e^{i phi N_b}.

#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>

#include "isothc/focksim.hpp"
#include "isothc/hamiltonian.hpp"
#include "isothc/thc.hpp"

namespace isothc {

enum class Variant { basic, improved };
enum class CircuitPath { reference, fused };

std::string to_string(Variant variant);
Variant parse_variant(const std::string& text);

inline constexpr std::array<double, 3> kDefaultPhases = {-M_PI / 2, M_PI, M_PI / 2};

struct StepSpec {
  Variant variant = Variant::basic;
  double tau = 0.0;
  std::array<double, 3> phases = kDefaultPhases;

  void validate() const;
};

/// Precomputed data for repeated steps of one (thc, H, spin, spec).
class StepCircuit {
 public:
  /// `h_rotated` must have a diagonal one-body matrix; thc.u is expressed in
  /// the same orbitals.
  StepCircuit(const ThcFactorization& thc, const ElectronicHamiltonian& h_rotated, SpinMode spin,
              StepSpec spec);
  /// Same with explicit orbital energies (the diagonal of h).
  StepCircuit(const ThcFactorization& thc, const Eigen::VectorXd& orbital_energies, SpinMode spin,
              StepSpec spec);

  const ModeLayout& layout() const { return layout_; }
  const StepSpec& spec() const { return spec_; }
  const GivensSequence& rotation() const { return rotation_; }

  /// Row action of the full pre-reset unitary, gate by gate.
  void apply_unitary(Eigen::MatrixXcd& m) const;
  /// Row action of the interaction part only (no h layers).
  void apply_interaction(Eigen::MatrixXcd& m) const;
  /// Dense pre-reset unitary, computed once.
  const Eigen::MatrixXcd& fused_unitary() const;

 private:
  void apply_block(Eigen::MatrixXcd& m, double tau) const;

  ModeLayout layout_;
  StepSpec spec_;
  GivensSequence rotation_;
  Eigen::VectorXd interaction_energies_;  // per basis string, unit time
  Eigen::VectorXd one_body_energies_;     // per basis string, unit time
  mutable std::optional<Eigen::MatrixXcd> fused_;
};

/// One step followed by the ancilla reset. rho lives on circuit.layout() and
/// must be b-vacuum supported (weight outside <= 1e-10).
FockDensity step_channel(const FockDensity& rho, const StepCircuit& circuit,
                         CircuitPath path = CircuitPath::fused);
FockDensity step_channel(const FockDensity& rho, const ThcFactorization& thc,
                         const ElectronicHamiltonian& h_rotated, const StepSpec& spec,
                         CircuitPath path = CircuitPath::reference);

/// round(t / tau); throws DomainError when |t/tau - steps| > tolerance.
int step_count(double t, double tau, double tolerance = 1e-6);

struct EvolveOptions {
  double step_tolerance = 1e-6;
  CircuitPath path = CircuitPath::fused;
};

struct EvolveResult {
  FockDensity rho_final;  // system layout
  double error_vs_exact = 0.0;
  int steps = 0;
};

/// Repeats step_channel from psi0 (system layout) and compares with the
/// exact evolution under the full Hamiltonian.
EvolveResult evolve(const FockState& psi0, const ThcFactorization& thc,
                    const ElectronicHamiltonian& h_rotated, double t, const StepSpec& spec,
                    EvolveOptions options = {});

/// Lowest occupation of the system orbitals: n_electrons modes when
/// spinless, (n + ms2)/2 up and (n - ms2)/2 down orbitals when spinful.
FockState hartree_fock_state(int n_orbitals, int n_electrons, bool spinful, int ms2 = 0);

// ---------------------------------------------------------------------------
// Error terms

/// Many-body operator of the projected interaction V' = <0_b| vtilde |0_b>.
ManyBodyOperator projected_operator(const ThcFactorization& thc, SpinMode spin,
                                    int mode_cap = kDefaultModeCap);

/// tau^3/12 ||[V',[V',h]]|| + tau^3/24 ||[h,[h,V']]||.
double trotter_bound(const ManyBodyOperator& h_op, const ManyBodyOperator& vprime_op, double tau);

/// || e^{-i h tau/2} e^{-i V' tau} e^{-i h tau/2} - e^{-i (h + V') tau} ||.
double splitting_error(const ManyBodyOperator& h_op, const ManyBodyOperator& vprime_op, double tau);

enum class ThcBoundBranch { operator_norm, element_norm };

struct ThcBound {
  double value = 0.0;
  ThcBoundBranch branch = ThcBoundBranch::element_norm;
  std::optional<double> operator_norm_rate;  // ||V - V'||, when within the mode cap
  double element_norm_rate = 0.0;            // c N^2 ||V - V'||_2
};

/// min(||V - V'||, c N^2 ||V||_2 eps_v) t with c = 1 (spinless) or 2 (spinful).
ThcBound thc_bound(const ElectronicHamiltonian& hamiltonian, const ThcFactorization& thc, double t,
                   SpinMode spin, int mode_cap = kDefaultModeCap);

/// Trace distance between tr_b(U (rho (x) |0><0|) U^dag) and
/// e^{-i V' tau} rho e^{i V' tau}, U the interaction part of one step.
double projection_error_measured(const ThcFactorization& thc, const FockDensity& rho,
                                 const StepSpec& spec);

/// || P U P - e^{-i V' tau} P || + 1/2 || P_perp U P ||^2 with P the b-vacuum projector.
double projection_error_bound(const ThcFactorization& thc, const StepSpec& spec, SpinMode spin);

/// The four sums that vanish for the default phases:
///   1 + e^{i p1} + e^{i(p1+p2)} + e^{i(p1+p2+p3)}, the same at doubled phases,
///   2 + e^{i p1} + e^{i p2} + e^{i p3} + e^{i(p1+p2)} + e^{i(p2+p3)} + e^{i(p1+p2+p3)},
///   and the same at doubled phases.
std::array<std::complex<double>, 4> phase_cancellation_sums(const std::array<double, 3>& phases);

struct ErrorBudget {
  double eps_thc_rate = 0.0;  // per unit time
  double eps_tr = 0.0;        // per step
  double eps_pr = 0.0;        // per step
};

ErrorBudget error_budget(const ElectronicHamiltonian& h_rotated, const ThcFactorization& thc,
                         const StepSpec& spec, SpinMode spin);

/// Trace distance after one step from rho (system layout) against the exact
/// one-step evolution under h_rotated.
double one_step_error(const FockDensity& rho, const ThcFactorization& thc,
                      const ElectronicHamiltonian& h_rotated, const StepSpec& spec);

}  // namespace isothc
