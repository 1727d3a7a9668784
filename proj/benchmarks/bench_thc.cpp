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

#include "isothc/hamiltonian.hpp"
#include "isothc/thc.hpp"

namespace isothc {
namespace {

ElectronicHamiltonian random_hamiltonian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd h(n, n), eri(n * n, n * n);
  for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < eri.size(); ++i) eri.data()[i] = normal(rng);
  return ElectronicHamiltonian(0.0, 0.5 * (h + h.transpose()), symmetrize_eri(eri));
}

void BM_ContractVtilde(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  const ElectronicHamiltonian h = random_hamiltonian(n, rng);
  const Eigen::MatrixXd u = random_coisometry(n, 3 * n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(contract_vtilde(u, h));
  state.SetComplexityN(n);
}
BENCHMARK(BM_ContractVtilde)->DenseRange(4, 16, 4)->Complexity();

void BM_LossGradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  const ElectronicHamiltonian h = random_hamiltonian(n, rng);
  const ThcFactorization thc = factorization_from_u(random_coisometry(n, 3 * n, rng), h);
  for (auto _ : state) benchmark::DoNotOptimize(loss_gradient(thc.u(), thc.vtilde(), h));
  state.SetComplexityN(n);
}
BENCHMARK(BM_LossGradient)->DenseRange(4, 16, 4)->Complexity();

void BM_RefineRound(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  const ElectronicHamiltonian h = random_hamiltonian(n, rng);
  const ThcFactorization start = factorization_from_u(random_coisometry(n, 2 * n, rng), h);
  RefineConfig cfg;
  cfg.rounds_phase1 = 10;
  cfg.rounds_phase2 = 0;
  for (auto _ : state) benchmark::DoNotOptimize(refine(start, h, cfg));
  state.SetItemsProcessed(state.iterations() * cfg.rounds_phase1);
}
BENCHMARK(BM_RefineRound)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ExactFactorize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(4);
  const ElectronicHamiltonian h = random_hamiltonian(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(exact_factorize(h));
}
BENCHMARK(BM_ExactFactorize)->DenseRange(2, 6, 2);

}  // namespace
}  // namespace isothc
