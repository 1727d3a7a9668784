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

#include "isothc/focksim.hpp"

#include <cmath>
#include <string>

#include "isothc/errors.hpp"

namespace isothc {

using fock::BasisIndex;

namespace {

constexpr double kStateTolerance = 1e-10;

void require_same_layout(const ModeLayout& a, const ModeLayout& b, const char* what) {
  if (!(a == b)) throw DomainError(std::string(what) + ": layouts differ");
}

nlohmann::json complex_list(const Eigen::VectorXcd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// ModeLayout

BasisIndex ModeLayout::ancilla_mask() const {
  BasisIndex mask = 0;
  for (int s = 0; s < spin_sectors(); ++s)
    for (int m = 0; m < n_ancilla; ++m) mask |= BasisIndex{1} << b_mode(s, m);
  return mask;
}

BasisIndex ModeLayout::embed_system(BasisIndex system_index) const {
  BasisIndex out = 0;
  for (int s = 0; s < spin_sectors(); ++s)
    for (int i = 0; i < n_system; ++i)
      if (fock::is_occupied(system_index, s * n_system + i)) out |= BasisIndex{1} << a_mode(s, i);
  return out;
}

BasisIndex ModeLayout::extract_system(BasisIndex index) const {
  BasisIndex out = 0;
  for (int s = 0; s < spin_sectors(); ++s)
    for (int i = 0; i < n_system; ++i)
      if (fock::is_occupied(index, a_mode(s, i))) out |= BasisIndex{1} << (s * n_system + i);
  return out;
}

int ModeLayout::reorder_sign(BasisIndex index) const {
  if (!spinful || n_ancilla == 0) return 1;
  int b_up = 0;
  int a_dn = 0;
  for (int m = 0; m < n_ancilla; ++m) b_up += fock::is_occupied(index, b_mode(0, m));
  for (int i = 0; i < n_system; ++i) a_dn += fock::is_occupied(index, a_mode(1, i));
  return (b_up * a_dn) % 2 ? -1 : 1;
}

void ModeLayout::validate(int cap) const {
  if (n_system < 0 || n_ancilla < 0) throw DomainError("mode counts must be >= 0");
  if (n_modes() > cap) {
    throw SizeError(std::to_string(n_modes()) + " modes exceed the simulator cap of " +
                    std::to_string(cap));
  }
}

// ---------------------------------------------------------------------------
// States

FockState::FockState(ModeLayout layout, Eigen::VectorXcd amplitudes, int mode_cap)
    : layout_(layout), amplitudes_(std::move(amplitudes)) {
  layout_.validate(mode_cap);
  if (amplitudes_.size() != layout_.dim()) throw DomainError("state size does not match layout");
  if (std::abs(amplitudes_.norm() - 1.0) > kStateTolerance) {
    throw DomainError("state is not normalized (norm " + std::to_string(amplitudes_.norm()) + ")");
  }
}

FockState FockState::basis_state(ModeLayout layout, BasisIndex index) {
  layout.validate(kStateModeCap);
  if (index >= static_cast<BasisIndex>(layout.dim())) throw DomainError("basis index out of range");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(layout.dim());
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return FockState(layout, std::move(v));
}

nlohmann::json FockState::to_json() const {
  return {{"n_system", layout_.n_system},
          {"n_ancilla", layout_.n_ancilla},
          {"spinful", layout_.spinful},
          {"amplitudes", complex_list(amplitudes_)}};
}

FockDensity::FockDensity(ModeLayout layout, Eigen::MatrixXcd matrix, int mode_cap)
    : layout_(layout), matrix_(std::move(matrix)) {
  layout_.validate(mode_cap);
  if (matrix_.rows() != layout_.dim() || matrix_.cols() != layout_.dim()) {
    throw DomainError("density size does not match layout");
  }
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kStateTolerance) {
    throw DomainError("density matrix is not Hermitian");
  }
  if (std::abs(matrix_.trace() - cplx(1.0)) > kStateTolerance) {
    throw DomainError("density matrix trace is not 1");
  }
}

FockDensity FockDensity::pure(const FockState& state) {
  state.layout().validate(kDensityModeCap);
  return FockDensity(state.layout(), state.amplitudes() * state.amplitudes().adjoint());
}

bool FockDensity::is_positive(double tolerance) const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(matrix_, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tolerance;
}

nlohmann::json FockDensity::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < matrix_.rows(); ++i) rows.push_back(complex_list(matrix_.row(i).transpose()));
  return {{"n_system", layout_.n_system},
          {"n_ancilla", layout_.n_ancilla},
          {"spinful", layout_.spinful},
          {"matrix", rows}};
}

// ---------------------------------------------------------------------------
// Kernels

namespace kernel {

namespace {

void givens_rows(Eigen::MatrixXcd& m, int p, double theta, double phi) {
  const BasisIndex bp = BasisIndex{1} << p;
  const BasisIndex bq = BasisIndex{1} << (p + 1);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const cplx upper = -s * std::polar(1.0, phi);
  const cplx lower = s * std::polar(1.0, -phi);
  const auto dim = static_cast<BasisIndex>(m.rows());
  for (BasisIndex x = 0; x < dim; ++x) {
    if (!(x & bp) || (x & bq)) continue;
    const auto i10 = static_cast<Eigen::Index>(x);
    const auto i01 = static_cast<Eigen::Index>((x ^ bp) | bq);
    const Eigen::RowVectorXcd a = m.row(i10);
    const Eigen::RowVectorXcd b = m.row(i01);
    m.row(i10) = c * a + upper * b;
    m.row(i01) = lower * a + c * b;
  }
}

void mode_phase_rows(Eigen::MatrixXcd& m, int p, double phase) {
  const cplx z = std::polar(1.0, phase);
  const BasisIndex bp = BasisIndex{1} << p;
  for (Eigen::Index x = 0; x < m.rows(); ++x)
    if (static_cast<BasisIndex>(x) & bp) m.row(x) *= z;
}

}  // namespace

void basis_rotation(Eigen::MatrixXcd& m, const ModeLayout& layout, const GivensSequence& sequence,
                    Direction direction, SpinSector sector) {
  if (sequence.n_modes != layout.sector_size()) {
    throw DomainError("Givens sequence has " + std::to_string(sequence.n_modes) +
                      " modes, layout sector has " + std::to_string(layout.sector_size()));
  }
  if (m.rows() != layout.dim()) throw DomainError("operand size does not match layout");
  for (const GivensRotation& r : sequence.rotations) {
    if (r.p < 0 || r.q() >= sequence.n_modes) throw DomainError("Givens rotation outside the sector");
  }
  std::vector<int> sectors;
  if (sector == SpinSector::both || sector == SpinSector::up) sectors.push_back(0);
  if (sector == SpinSector::both || sector == SpinSector::down) {
    if (!layout.spinful) {
      if (sector == SpinSector::down) throw DomainError("spin-down sector requested on a spinless layout");
    } else {
      sectors.push_back(1);
    }
  }
  const int phase_count = static_cast<int>(sequence.residual_phases.size());
  for (int sigma : sectors) {
    const int offset = sigma * layout.sector_size();
    if (direction == Direction::forward) {
      for (const GivensRotation& r : sequence.rotations) givens_rows(m, offset + r.p, r.theta, r.phi);
      for (int p = 0; p < phase_count; ++p)
        if (sequence.residual_phases(p) != 0.0) mode_phase_rows(m, offset + p, sequence.residual_phases(p));
    } else {
      for (int p = 0; p < phase_count; ++p)
        if (sequence.residual_phases(p) != 0.0) mode_phase_rows(m, offset + p, -sequence.residual_phases(p));
      for (auto it = sequence.rotations.rbegin(); it != sequence.rotations.rend(); ++it)
        givens_rows(m, offset + it->p, -it->theta, it->phi);
    }
  }
}

void diagonal_phase(Eigen::MatrixXcd& m, const Eigen::VectorXd& energies, double tau) {
  if (energies.size() != m.rows()) throw DomainError("energy table does not match operand size");
  for (Eigen::Index x = 0; x < m.rows(); ++x) {
    if (energies(x) != 0.0) m.row(x) *= std::polar(1.0, -tau * energies(x));
  }
}

void ancilla_phase(Eigen::MatrixXcd& m, const ModeLayout& layout, double phi) {
  if (m.rows() != layout.dim()) throw DomainError("operand size does not match layout");
  const BasisIndex mask = layout.ancilla_mask();
  for (Eigen::Index x = 0; x < m.rows(); ++x) {
    const int nb = fock::particle_count(static_cast<BasisIndex>(x) & mask);
    if (nb) m.row(x) *= std::polar(1.0, phi * nb);
  }
}

}  // namespace kernel

namespace {

template <typename RowAction>
FockState act(const FockState& state, RowAction&& apply) {
  Eigen::MatrixXcd v = state.amplitudes();
  apply(v);
  return FockState(state.layout(), v.col(0));
}

template <typename RowAction>
FockDensity act(const FockDensity& rho, RowAction&& apply) {
  Eigen::MatrixXcd m = rho.matrix();
  kernel::conjugate(m, apply);
  return FockDensity(rho.layout(), std::move(m));
}

}  // namespace

FockState apply_basis_rotation(const FockState& state, const GivensSequence& sequence,
                               Direction direction, SpinSector sector) {
  return act(state, [&](Eigen::MatrixXcd& m) {
    kernel::basis_rotation(m, state.layout(), sequence, direction, sector);
  });
}

FockDensity apply_basis_rotation(const FockDensity& rho, const GivensSequence& sequence,
                                 Direction direction, SpinSector sector) {
  return act(rho, [&](Eigen::MatrixXcd& m) {
    kernel::basis_rotation(m, rho.layout(), sequence, direction, sector);
  });
}

// ---------------------------------------------------------------------------
// Diagonal layers

Eigen::VectorXd diagonal_two_body_energies(const ModeLayout& layout, const Eigen::MatrixXd& vtilde) {
  const int s = layout.sector_size();
  if (vtilde.rows() != s || vtilde.cols() != s) {
    throw DomainError("vtilde must be " + std::to_string(s) + " x " + std::to_string(s));
  }
  const int n_modes = layout.n_modes();
  Eigen::VectorXd energies(layout.dim());
  std::vector<int> occupied;
  occupied.reserve(static_cast<std::size_t>(n_modes));
  for (Eigen::Index x = 0; x < energies.size(); ++x) {
    occupied.clear();
    for (int p = 0; p < n_modes; ++p)
      if (fock::is_occupied(static_cast<BasisIndex>(x), p)) occupied.push_back(p % s);
    double e = 0.0;
    for (std::size_t a = 0; a < occupied.size(); ++a)
      for (std::size_t b = a + 1; b < occupied.size(); ++b)
        e += 0.5 * (vtilde(occupied[a], occupied[b]) + vtilde(occupied[b], occupied[a]));
    energies(x) = e;
  }
  return energies;
}

FockState apply_diagonal_two_body(const FockState& state, const Eigen::MatrixXd& vtilde, double tau) {
  const Eigen::VectorXd e = diagonal_two_body_energies(state.layout(), vtilde);
  return act(state, [&](Eigen::MatrixXcd& m) { kernel::diagonal_phase(m, e, tau); });
}

FockDensity apply_diagonal_two_body(const FockDensity& rho, const Eigen::MatrixXd& vtilde, double tau) {
  const Eigen::VectorXd e = diagonal_two_body_energies(rho.layout(), vtilde);
  return act(rho, [&](Eigen::MatrixXcd& m) { kernel::diagonal_phase(m, e, tau); });
}

namespace {

Eigen::VectorXd one_body_energies(const ModeLayout& layout, const Eigen::VectorXd& mode_energies) {
  if (mode_energies.size() != layout.n_modes()) {
    throw DomainError("need one energy per mode (" + std::to_string(layout.n_modes()) + ")");
  }
  Eigen::VectorXd e = Eigen::VectorXd::Zero(layout.dim());
  for (Eigen::Index x = 0; x < e.size(); ++x)
    for (int p = 0; p < layout.n_modes(); ++p)
      if (fock::is_occupied(static_cast<BasisIndex>(x), p)) e(x) += mode_energies(p);
  return e;
}

}  // namespace

FockState apply_diagonal_one_body(const FockState& state, const Eigen::VectorXd& mode_energies,
                                  double tau) {
  const Eigen::VectorXd e = one_body_energies(state.layout(), mode_energies);
  return act(state, [&](Eigen::MatrixXcd& m) { kernel::diagonal_phase(m, e, tau); });
}

FockDensity apply_diagonal_one_body(const FockDensity& rho, const Eigen::VectorXd& mode_energies,
                                    double tau) {
  const Eigen::VectorXd e = one_body_energies(rho.layout(), mode_energies);
  return act(rho, [&](Eigen::MatrixXcd& m) { kernel::diagonal_phase(m, e, tau); });
}

Eigen::VectorXd system_mode_energies(const ModeLayout& layout, const Eigen::VectorXd& orbital_energies) {
  if (orbital_energies.size() != layout.n_system) throw DomainError("need one energy per system orbital");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(layout.n_modes());
  for (int s = 0; s < layout.spin_sectors(); ++s)
    for (int i = 0; i < layout.n_system; ++i) out(layout.a_mode(s, i)) = orbital_energies(i);
  return out;
}

FockState phase_on_ancillas(const FockState& state, double phi) {
  return act(state, [&](Eigen::MatrixXcd& m) { kernel::ancilla_phase(m, state.layout(), phi); });
}

FockDensity phase_on_ancillas(const FockDensity& rho, double phi) {
  return act(rho, [&](Eigen::MatrixXcd& m) { kernel::ancilla_phase(m, rho.layout(), phi); });
}

// ---------------------------------------------------------------------------
// Ancillas

FockDensity trace_out_ancillas(const FockDensity& rho) {
  const ModeLayout& layout = rho.layout();
  const ModeLayout sys = layout.system_layout();
  const Eigen::MatrixXcd& m = rho.matrix();
  const auto dim = static_cast<BasisIndex>(layout.dim());
  for (BasisIndex x = 0; x < dim; ++x)
    for (BasisIndex y = 0; y < dim; ++y)
      if ((fock::particle_count(x) ^ fock::particle_count(y)) & 1) {
        if (std::abs(m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y))) > 1e-8) {
          throw NumericalError("density has coherences between opposite fermion parities");
        }
      }
  const auto sdim = static_cast<BasisIndex>(sys.dim());
  std::vector<BasisIndex> embedded(sdim);
  for (BasisIndex xs = 0; xs < sdim; ++xs) embedded[xs] = layout.embed_system(xs);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(sys.dim(), sys.dim());
  const BasisIndex mask = layout.ancilla_mask();
  BasisIndex b = 0;
  do {
    for (BasisIndex xs = 0; xs < sdim; ++xs) {
      const BasisIndex x = embedded[xs] | b;
      const int sx = layout.reorder_sign(x);
      for (BasisIndex ys = 0; ys < sdim; ++ys) {
        const BasisIndex y = embedded[ys] | b;
        out(static_cast<Eigen::Index>(xs), static_cast<Eigen::Index>(ys)) +=
            static_cast<double>(sx * layout.reorder_sign(y)) *
            m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
      }
    }
    b = (b - mask) & mask;
  } while (b != 0);
  return FockDensity(sys, std::move(out));
}

FockDensity embed_system(const FockDensity& rho, const ModeLayout& layout) {
  require_same_layout(rho.layout(), layout.system_layout(), "embed_system");
  layout.validate(kDensityModeCap);
  const auto sdim = static_cast<BasisIndex>(rho.layout().dim());
  std::vector<Eigen::Index> embedded(sdim);
  for (BasisIndex xs = 0; xs < sdim; ++xs) embedded[xs] = static_cast<Eigen::Index>(layout.embed_system(xs));
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(layout.dim(), layout.dim());
  for (BasisIndex xs = 0; xs < sdim; ++xs)
    for (BasisIndex ys = 0; ys < sdim; ++ys)
      out(embedded[xs], embedded[ys]) = rho.matrix()(static_cast<Eigen::Index>(xs), static_cast<Eigen::Index>(ys));
  return FockDensity(layout, std::move(out));
}

FockState embed_system(const FockState& state, const ModeLayout& layout) {
  require_same_layout(state.layout(), layout.system_layout(), "embed_system");
  layout.validate(kStateModeCap);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(layout.dim());
  for (Eigen::Index xs = 0; xs < state.amplitudes().size(); ++xs)
    out(static_cast<Eigen::Index>(layout.embed_system(static_cast<BasisIndex>(xs)))) = state.amplitudes()(xs);
  return FockState(layout, std::move(out));
}

FockDensity reset_ancillas(const FockDensity& rho) {
  return embed_system(trace_out_ancillas(rho), rho.layout());
}

double ancilla_weight(const FockDensity& rho) {
  const BasisIndex mask = rho.layout().ancilla_mask();
  double w = 0.0;
  for (Eigen::Index x = 0; x < rho.matrix().rows(); ++x)
    if (static_cast<BasisIndex>(x) & mask) w += rho.matrix()(x, x).real();
  return w;
}

double trace_distance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols() || rho.rows() != rho.cols()) {
    throw DomainError("trace_distance: dimension mismatch");
  }
  const Eigen::MatrixXcd d = rho - sigma;
  const Eigen::MatrixXcd herm = 0.5 * (d + d.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm, Eigen::EigenvaluesOnly);
  return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const FockDensity& rho, const FockDensity& sigma) {
  require_same_layout(rho.layout(), sigma.layout(), "trace_distance");
  return trace_distance(rho.matrix(), sigma.matrix());
}

Eigen::VectorXd occupation_numbers(const FockState& state) {
  const int n = state.layout().n_modes();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index x = 0; x < state.amplitudes().size(); ++x) {
    const double w = std::norm(state.amplitudes()(x));
    for (int p = 0; p < n; ++p)
      if (fock::is_occupied(static_cast<BasisIndex>(x), p)) out(p) += w;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact dynamics

Eigen::MatrixXcd evolution_operator(const ManyBodyOperator& op, double t) {
  const SpectralDecomposition& spec = op.spectrum();
  Eigen::VectorXcd phases(spec.eigenvalues.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::polar(1.0, -t * spec.eigenvalues(k));
  const Eigen::MatrixXcd v = spec.eigenvectors.cast<cplx>();
  return v * phases.asDiagonal() * v.transpose();
}

namespace {

void require_operator_layout(const ManyBodyOperator& op, const ModeLayout& layout) {
  if (layout.n_ancilla != 0 || op.n_modes() != layout.n_modes() ||
      (op.spin() == SpinMode::spinful) != layout.spinful) {
    throw DomainError("operator does not act on this system layout");
  }
}

}  // namespace

FockState exact_evolution(const ManyBodyOperator& op, const FockState& state, double t) {
  require_operator_layout(op, state.layout());
  const SpectralDecomposition& spec = op.spectrum();
  const Eigen::MatrixXcd v = spec.eigenvectors.cast<cplx>();
  Eigen::VectorXcd coeff = v.transpose() * state.amplitudes();
  for (Eigen::Index k = 0; k < coeff.size(); ++k) coeff(k) *= std::polar(1.0, -t * spec.eigenvalues(k));
  return FockState(state.layout(), v * coeff);
}

FockDensity exact_evolution(const ManyBodyOperator& op, const FockDensity& rho, double t) {
  require_operator_layout(op, rho.layout());
  const Eigen::MatrixXcd u = evolution_operator(op, t);
  return FockDensity(rho.layout(), u * rho.matrix() * u.adjoint());
}

}  // namespace isothc
