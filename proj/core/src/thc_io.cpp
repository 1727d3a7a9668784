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

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "isothc/errors.hpp"
#include "isothc/thc.hpp"

namespace isothc {

namespace {

std::vector<double> row_major(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

Eigen::MatrixXd from_row_major(const nlohmann::json& values, int rows, int cols, const char* name) {
  const auto flat = values.get<std::vector<double>>();
  if (flat.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw ParseError(std::string(name) + ": expected " + std::to_string(rows * cols) + " entries, got " +
                         std::to_string(flat.size()),
                     0);
  }
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = flat[static_cast<std::size_t>(i) * cols + j];
  return m;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const ThcFactorization& thc) {
  nlohmann::json doc;
  doc["n"] = thc.n();
  doc["m"] = thc.m();
  doc["u"] = row_major(thc.u());
  doc["vtilde"] = row_major(thc.vtilde());
  if (thc.htilde()) {
    doc["htilde"] = std::vector<double>(thc.htilde()->data(), thc.htilde()->data() + thc.htilde()->size());
  }
  const ThcProvenance& p = thc.provenance();
  doc["provenance"] = {{"eps_v", optional_json(p.eps_v)},
                       {"eps_h", optional_json(p.eps_h)},
                       {"seed", p.seed ? nlohmann::json(*p.seed) : nlohmann::json(nullptr)},
                       {"config", p.config}};
  return doc;
}

ThcFactorization thc_from_json(const nlohmann::json& doc) {
  try {
    const int n = doc.at("n").get<int>();
    const int m = doc.at("m").get<int>();
    if (n <= 0 || m < n) throw DomainError("THC JSON: need m >= n >= 1");
    Eigen::MatrixXd u = from_row_major(doc.at("u"), n, m, "u");
    Eigen::MatrixXd vtilde = from_row_major(doc.at("vtilde"), m, m, "vtilde");
    std::optional<Eigen::VectorXd> htilde;
    if (doc.contains("htilde") && !doc["htilde"].is_null()) {
      const auto flat = doc["htilde"].get<std::vector<double>>();
      if (flat.size() != static_cast<std::size_t>(m)) throw ParseError("htilde: expected m entries", 0);
      htilde = Eigen::Map<const Eigen::VectorXd>(flat.data(), m);
    }
    ThcProvenance provenance;
    if (doc.contains("provenance")) {
      const auto& p = doc["provenance"];
      if (p.contains("eps_v") && !p["eps_v"].is_null()) provenance.eps_v = p["eps_v"].get<double>();
      if (p.contains("eps_h") && !p["eps_h"].is_null()) provenance.eps_h = p["eps_h"].get<double>();
      if (p.contains("seed") && !p["seed"].is_null()) provenance.seed = p["seed"].get<std::uint64_t>();
      if (p.contains("config")) provenance.config = p["config"];
    }
    return ThcFactorization(std::move(u), std::move(vtilde), std::move(htilde), std::move(provenance));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("THC JSON: ") + e.what(), 0);
  }
}

ThcFactorization read_thc(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open THC file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
  return thc_from_json(doc);
}

ThcFactorFile parse_factor_file(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw ParseError("empty factor file", 0);

  ThcFactorFile out;
  if (text[first] == '{') {
    try {
      const nlohmann::json doc = nlohmann::json::parse(text);
      const int n = doc.at("n").get<int>();
      const int m = doc.at("m").get<int>();
      if (n <= 0 || m <= 0) throw DomainError("factor file: n and m must be positive");
      out.x = from_row_major(doc.at("x"), n, m, "x");
      if (doc.contains("w") && !doc["w"].is_null()) out.w = from_row_major(doc["w"], m, m, "w");
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("factor JSON: ") + e.what(), 0);
    }
    return out;
  }

  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  int number = 0;
  while (std::getline(lines, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::vector<double> row;
    std::string token;
    while (tokens >> token) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw ParseError("not a number: '" + token + "'", number);
      }
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("ragged matrix row (" + std::to_string(row.size()) + " vs " +
                           std::to_string(rows.front().size()) + " columns)",
                       number);
    }
    rows.push_back(std::move(row));
  }
  out.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      out.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return out;
}

ThcFactorFile read_factor_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open factor file '" + path + "'");
  try {
    return parse_factor_file(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

}  // namespace isothc
