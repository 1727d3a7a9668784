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

// Closed-form gate, depth, and qubit counts for one algorithm step, and the
// double-factorized Trotter step it is compared against.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace isothc {

enum class Architecture { all_to_all, linear };

std::string to_string(Architecture architecture);
Architecture parse_architecture(const std::string& text);

std::int64_t binomial2(std::int64_t n);  // C(n, 2), 0 for n < 2

struct ResourceReport {
  std::string method;
  std::int64_t qubits = 0;
  /// Adjacent Givens rotations in one basis-rotation layer (both spins).
  std::int64_t givens_per_layer = 0;
  /// Givens rotations per step.
  std::int64_t givens_rotations = 0;
  std::int64_t zz_rotations = 0;
  std::int64_t swap_gates = 0;
  std::int64_t circuit_depth = 0;
  std::int64_t single_qubit_rotations = 0;
  /// 2 givens + zz + Z layers, reported beside the headline count.
  std::int64_t component_rotations = 0;
  std::optional<std::int64_t> t_gates;
  Architecture architecture = Architecture::all_to_all;
  bool spinful = true;

  nlohmann::json to_json() const;
};

/// Counts for one step of the algorithm with N orbitals and M THC modes.
ResourceReport estimate_step(int n, int m, bool spinful, Architecture architecture = Architecture::all_to_all,
                             std::optional<double> eps_rot = std::nullopt);

/// T gates per synthesized rotation, round(1.15 log2(1/eps) + 9.2), times `rotations`.
std::int64_t t_count(std::int64_t rotations, double eps_rot);

struct MottaParams {
  int n = 0;
  int l = 0;
  int xi = 0;
};

ResourceReport motta_estimate(const MottaParams& params, std::optional<double> eps_rot = std::nullopt);

struct ResourceRatios {
  double rotations = 0.0;
  double depth = 0.0;
};

ResourceRatios ratios(const ResourceReport& baseline, const ResourceReport& ours);

/// Aligned text table with one row per report (scaling and count per cell)
/// and a ratio row when a baseline is given.
std::string render_table(const ResourceReport& ours, const std::optional<ResourceReport>& baseline);

}  // namespace isothc
