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

#include "isothc/resources.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <vector>

#include "isothc/errors.hpp"

namespace isothc {

std::string to_string(Architecture architecture) {
  return architecture == Architecture::linear ? "linear" : "all_to_all";
}

Architecture parse_architecture(const std::string& text) {
  if (text == "all_to_all") return Architecture::all_to_all;
  if (text == "linear") return Architecture::linear;
  throw DomainError("unknown architecture '" + text + "' (expected all_to_all or linear)");
}

std::int64_t binomial2(std::int64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

nlohmann::json ResourceReport::to_json() const {
  nlohmann::json doc = {{"method", method},
                        {"qubits", qubits},
                        {"givens_per_layer", givens_per_layer},
                        {"givens_rotations", givens_rotations},
                        {"zz_rotations", zz_rotations},
                        {"circuit_depth", circuit_depth},
                        {"single_qubit_rotations", single_qubit_rotations},
                        {"component_rotations", component_rotations},
                        {"architecture", to_string(architecture)},
                        {"spinful", spinful}};
  if (architecture == Architecture::linear) doc["swap_gates"] = swap_gates;
  doc["t_gates"] = t_gates ? nlohmann::json(*t_gates) : nlohmann::json(nullptr);
  return doc;
}

std::int64_t t_count(std::int64_t rotations, double eps_rot) {
  if (!(eps_rot > 0.0 && eps_rot < 1.0)) throw DomainError("eps_rot must lie in (0, 1)");
  if (rotations < 0) throw DomainError("rotation count must be >= 0");
  const auto per_rotation = static_cast<std::int64_t>(std::llround(1.15 * std::log2(1.0 / eps_rot) + 9.2));
  return rotations * per_rotation;
}

ResourceReport estimate_step(int n, int m, bool spinful, Architecture architecture,
                             std::optional<double> eps_rot) {
  if (n < 1 || m < n) throw DomainError("estimate_step needs M >= N >= 1");
  const std::int64_t big_n = n;
  const std::int64_t big_m = m;
  const std::int64_t spin = spinful ? 2 : 1;
  const std::int64_t modes = spin * big_m;

  ResourceReport r;
  r.method = "This work";
  r.spinful = spinful;
  r.architecture = architecture;
  r.qubits = modes;
  r.givens_per_layer = spin * (binomial2(big_m) - binomial2(big_m - big_n));
  r.givens_rotations = 2 * r.givens_per_layer;
  r.zz_rotations = binomial2(modes);
  r.component_rotations = 2 * r.givens_rotations + r.zz_rotations + spin * (big_m + big_n);
  r.single_qubit_rotations = spinful ? 2 * big_m * big_m + 8 * big_m * big_n - 4 * big_n * big_n
                                     : r.component_rotations;
  const std::int64_t rotation_depth = r.givens_per_layer > 0 ? big_m + big_n : 0;
  const std::int64_t diagonal_depth = r.zz_rotations > 0 ? modes : 0;
  r.circuit_depth = 2 * rotation_depth + diagonal_depth + (diagonal_depth == 0 ? 1 : 0);
  if (architecture == Architecture::linear) r.swap_gates = binomial2(modes);
  if (eps_rot) r.t_gates = t_count(r.single_qubit_rotations, *eps_rot);
  return r;
}

ResourceReport motta_estimate(const MottaParams& p, std::optional<double> eps_rot) {
  if (p.n < 1 || p.l < 1 || p.xi < 1) throw DomainError("Motta parameters must be positive");
  if (p.xi > p.n) throw DomainError("Xi must not exceed N");
  const std::int64_t n = p.n;
  const std::int64_t l = p.l;
  const std::int64_t xi = p.xi;
  ResourceReport r;
  r.method = "Double factorization";
  r.spinful = true;
  r.qubits = 2 * n;
  r.givens_per_layer = 2 * binomial2(n) - 2 * binomial2(n - xi);
  r.givens_rotations = l * r.givens_per_layer;
  r.zz_rotations = l * binomial2(2 * xi);
  r.component_rotations = 2 * r.givens_rotations + r.zz_rotations;
  r.single_qubit_rotations = 4 * l * n * xi;
  r.circuit_depth = l * (n + 3 * xi);
  if (eps_rot) r.t_gates = t_count(r.single_qubit_rotations, *eps_rot);
  return r;
}

ResourceRatios ratios(const ResourceReport& baseline, const ResourceReport& ours) {
  if (ours.single_qubit_rotations <= 0 || ours.circuit_depth <= 0) {
    throw DomainError("ratios need positive counts");
  }
  return {static_cast<double>(baseline.single_qubit_rotations) / static_cast<double>(ours.single_qubit_rotations),
          static_cast<double>(baseline.circuit_depth) / static_cast<double>(ours.circuit_depth)};
}

namespace {

std::string scientific(std::int64_t value) {
  std::ostringstream s;
  s << std::setprecision(1) << std::scientific << static_cast<double>(value);
  return s.str();
}

std::string cell(const std::string& scaling, std::int64_t value) {
  return scaling + "  " + std::to_string(value) + " (" + scientific(value) + ")";
}

}  // namespace

std::string render_table(const ResourceReport& ours, const std::optional<ResourceReport>& baseline) {
  const bool with_t = ours.t_gates.has_value() || (baseline && baseline->t_gates.has_value());
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"Algorithm", "Qubits", "Circuit depth", "Single-qubit rotations"};
  if (with_t) header.push_back("T gates");
  rows.push_back(header);
  auto add = [&](const ResourceReport& r, const char* q, const char* d, const char* s) {
    std::vector<std::string> row = {r.method, cell(q, r.qubits), cell(d, r.circuit_depth),
                                    cell(s, r.single_qubit_rotations)};
    if (with_t) row.push_back(r.t_gates ? std::to_string(*r.t_gates) : "-");
    rows.push_back(row);
  };
  add(ours, "O(N)", "O(N)", "O(N^2)");
  if (baseline) {
    add(*baseline, "O(N)", "O(N^2)", "O(N^2 Xi)");
    const ResourceRatios ratio = ratios(*baseline, ours);
    std::ostringstream d, s;
    d << std::fixed << std::setprecision(1) << ratio.depth << "x";
    s << std::fixed << std::setprecision(1) << ratio.rotations << "x";
    std::vector<std::string> row = {"Ratio", "-", d.str(), s.str()};
    if (with_t) row.push_back("-");
    rows.push_back(row);
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      out << (c ? " | " : "") << std::left << std::setw(static_cast<int>(width[c])) << rows[r][c];
    }
    out << '\n';
    if (r == 0) {
      for (std::size_t c = 0; c < width.size(); ++c) out << (c ? "-+-" : "") << std::string(width[c], '-');
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace isothc
