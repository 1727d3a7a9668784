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

#include <benchmark/benchmark.h>

#include <random>

#include "isothc/algorithm.hpp"
#include "isothc/focksim.hpp"
#include "isothc/thc.hpp"

namespace isothc {
namespace {

void BM_GivensDecompose(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd w = complete_isometry(random_coisometry(m / 2, m, rng));
  for (auto _ : state) benchmark::DoNotOptimize(givens_decompose(w, m / 2));
  state.SetComplexityN(m);
}
BENCHMARK(BM_GivensDecompose)->RangeMultiplier(2)->Range(8, 128)->Complexity();

void BM_BasisRotationState(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  const ModeLayout layout{m / 2, m / 2, false};
  const GivensSequence s = givens_decompose(complete_isometry(random_coisometry(m / 2, m, rng)), m / 2);
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v(layout.dim());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(normal(rng), normal(rng));
  const FockState psi(layout, v.normalized());
  for (auto _ : state) benchmark::DoNotOptimize(apply_basis_rotation(psi, s, Direction::forward));
  state.SetComplexityN(layout.dim());
}
BENCHMARK(BM_BasisRotationState)->DenseRange(8, 16, 4)->Complexity();

void BM_StepChannel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto path = state.range(1) == 0 ? CircuitPath::reference : CircuitPath::fused;
  std::mt19937_64 rng(3);
  const ThcFactorization thc(random_coisometry(n, n + 2, rng), Eigen::MatrixXd::Identity(n + 2, n + 2));
  const StepCircuit circuit(thc, Eigen::VectorXd::LinSpaced(n, -1.0, 1.0), SpinMode::spinless,
                            {Variant::improved, 0.05});
  circuit.fused_unitary();
  const FockDensity rho = embed_system(FockDensity::pure(FockState::basis_state(circuit.layout().system_layout(), 1)),
                                       circuit.layout());
  for (auto _ : state) benchmark::DoNotOptimize(step_channel(rho, circuit, path));
  state.SetLabel(path == CircuitPath::fused ? "fused" : "reference");
}
BENCHMARK(BM_StepChannel)->ArgsProduct({{2, 3, 4}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_ResetAncillas(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ModeLayout layout{n, n, false};
  const FockDensity rho = FockDensity::pure(FockState::basis_state(layout, (1u << n) - 1));
  for (auto _ : state) benchmark::DoNotOptimize(reset_ancillas(rho));
}
BENCHMARK(BM_ResetAncillas)->DenseRange(2, 5, 1);

}  // namespace
}  // namespace isothc
