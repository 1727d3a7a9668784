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

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "isothc/errors.hpp"
#include "isothc/hamiltonian.hpp"

namespace isothc {

namespace {

constexpr double kConflictTolerance = 1e-10;

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

// Parses the namelist between "&FCI" and "&END" (or "/"), keyed by upper-case name.
std::map<std::string, std::string> parse_namelist(const std::string& body, int line) {
  std::map<std::string, std::string> fields;
  std::string key;
  std::string value;
  bool in_value = false;
  auto flush = [&] {
    if (!key.empty()) fields[upper(key)] = value;
    key.clear();
    value.clear();
    in_value = false;
  };
  // Split on '=' boundaries: a new key starts at an identifier followed by '='.
  std::size_t i = 0;
  while (i < body.size()) {
    const std::size_t eq = body.find('=', i);
    if (eq == std::string::npos) break;
    // Key is the identifier immediately before '='.
    std::size_t k_end = eq;
    while (k_end > i && std::isspace(static_cast<unsigned char>(body[k_end - 1]))) --k_end;
    std::size_t k_begin = k_end;
    while (k_begin > i && (std::isalnum(static_cast<unsigned char>(body[k_begin - 1])) ||
                           body[k_begin - 1] == '_'))
      --k_begin;
    if (k_begin == k_end) throw ParseError("malformed FCIDUMP header near '='", line);
    if (in_value) {
      value += body.substr(i, k_begin - i);
      flush();
    }
    key = body.substr(k_begin, k_end - k_begin);
    in_value = true;
    i = eq + 1;
  }
  if (in_value) {
    value += body.substr(i);
    flush();
  }
  return fields;
}

int header_int(const std::map<std::string, std::string>& fields, const std::string& name,
               int line) {
  auto it = fields.find(name);
  if (it == fields.end()) throw ParseError("FCIDUMP header lacks " + name, line);
  std::string digits = it->second;
  digits.erase(std::remove_if(digits.begin(), digits.end(),
                              [](unsigned char c) { return std::isspace(c) || c == ','; }),
               digits.end());
  try {
    std::size_t used = 0;
    const int v = std::stoi(digits, &used);
    if (used != digits.size()) throw std::invalid_argument(digits);
    return v;
  } catch (const std::exception&) {
    throw ParseError("FCIDUMP header field " + name + " is not an integer", line);
  }
}

double parse_real(std::string token, int line) {
  std::replace(token.begin(), token.end(), 'D', 'E');
  std::replace(token.begin(), token.end(), 'd', 'e');
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ParseError("cannot parse value '" + token + "'", line);
  }
}

class IntegralSink {
 public:
  explicit IntegralSink(int n)
      : n_(n),
        h_(Eigen::MatrixXd::Zero(n, n)),
        eri_(Eigen::MatrixXd::Zero(n * n, n * n)),
        h_set_(n * n, false),
        eri_set_(static_cast<std::size_t>(n) * n * n * n, false) {}

  void set_h(int i, int j, double v, int line) {
    for (auto [a, b] : {std::pair{i, j}, std::pair{j, i}}) {
      const std::size_t idx = static_cast<std::size_t>(a) * n_ + b;
      if (h_set_[idx] && std::abs(h_(a, b) - v) > kConflictTolerance) {
        throw ParseError("conflicting duplicate one-body entry", line);
      }
      h_(a, b) = v;
      h_set_[idx] = true;
    }
  }

  void set_eri(int i, int j, int k, int l, double v, int line) {
    const std::array<std::array<int, 4>, 8> images{{{i, j, k, l},
                                                    {j, i, k, l},
                                                    {i, j, l, k},
                                                    {j, i, l, k},
                                                    {k, l, i, j},
                                                    {l, k, i, j},
                                                    {k, l, j, i},
                                                    {l, k, j, i}}};
    for (const auto& [a, b, c, d] : images) {
      const Eigen::Index row = a * n_ + b;
      const Eigen::Index col = c * n_ + d;
      const std::size_t idx = static_cast<std::size_t>(row) * n_ * n_ + col;
      if (eri_set_[idx] && std::abs(eri_(row, col) - v) > kConflictTolerance) {
        throw ParseError("conflicting duplicate two-electron entry", line);
      }
      eri_(row, col) = v;
      eri_set_[idx] = true;
    }
  }

  Eigen::MatrixXd take_h() { return std::move(h_); }
  Eigen::MatrixXd take_eri() { return std::move(eri_); }

 private:
  int n_;
  Eigen::MatrixXd h_;
  Eigen::MatrixXd eri_;
  std::vector<bool> h_set_;
  std::vector<bool> eri_set_;
};

}  // namespace

ElectronicHamiltonian parse_fcidump(std::istream& in) {
  std::string line_text;
  int line = 0;
  std::string header;
  bool started = false;
  bool finished = false;
  int header_line = 0;
  while (!finished && std::getline(in, line_text)) {
    ++line;
    std::string u = upper(line_text);
    if (!started) {
      const auto pos = u.find("&FCI");
      if (pos == std::string::npos) {
        if (u.find_first_not_of(" \t\r") == std::string::npos) continue;
        throw ParseError("expected '&FCI' header", line);
      }
      started = true;
      header_line = line;
      u = u.substr(pos + 4);
    }
    std::size_t end = u.find("&END");
    if (end == std::string::npos) end = u.find('/');
    if (end != std::string::npos) {
      header += u.substr(0, end) + " ";
      finished = true;
    } else {
      header += u + " ";
    }
  }
  if (!finished) throw ParseError("FCIDUMP header is not terminated by &END", header_line);

  const auto fields = parse_namelist(header, header_line);
  const int n = header_int(fields, "NORB", header_line);
  if (n <= 0) throw ParseError("NORB must be positive", header_line);
  HamiltonianMetadata meta;
  if (fields.count("NELEC")) meta.n_electrons = header_int(fields, "NELEC", header_line);
  if (fields.count("MS2")) meta.ms2 = header_int(fields, "MS2", header_line);

  IntegralSink sink(n);
  double core = 0.0;
  bool core_set = false;
  while (std::getline(in, line_text)) {
    ++line;
    std::istringstream ls(line_text);
    std::string value_token;
    if (!(ls >> value_token)) continue;
    const double value = parse_real(value_token, line);
    std::array<int, 4> idx{};
    for (int& x : idx) {
      if (!(ls >> x)) throw ParseError("integral line needs a value and four indices", line);
    }
    std::string extra;
    if (ls >> extra) throw ParseError("trailing tokens on integral line", line);
    for (int x : idx) {
      if (x < 0 || x > n) {
        throw ParseError("index " + std::to_string(x) + " outside [0, " + std::to_string(n) + "]",
                         line);
      }
    }
    const auto [i, j, k, l] = idx;
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      if (core_set && std::abs(core - value) > kConflictTolerance) {
        throw ParseError("conflicting duplicate core energy", line);
      }
      core = value;
      core_set = true;
    } else if (k == 0 && l == 0) {
      if (i == 0) throw ParseError("one-body entry with zero first index", line);
      if (j == 0) continue;  // orbital energy lines "e i 0 0 0" carry no integrals
      sink.set_h(i - 1, j - 1, value, line);
    } else {
      if (i == 0 || j == 0 || k == 0 || l == 0) {
        throw ParseError("two-electron entry with a zero index", line);
      }
      sink.set_eri(i - 1, j - 1, k - 1, l - 1, value, line);
    }
  }
  return ElectronicHamiltonian(core, sink.take_h(), sink.take_eri(), meta);
}

ElectronicHamiltonian read_fcidump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open FCIDUMP '" + path + "'");
  try {
    return parse_fcidump(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

void write_fcidump(std::ostream& out, const ElectronicHamiltonian& hamiltonian) {
  const int n = hamiltonian.n_orbitals();
  const auto& meta = hamiltonian.metadata();
  out << " &FCI NORB=" << n << ",NELEC=" << meta.n_electrons.value_or(0)
      << ",MS2=" << meta.ms2.value_or(0) << ",\n  ORBSYM=";
  for (int i = 0; i < n; ++i) out << "1,";
  out << "\n  ISYM=1,\n &END\n";
  out << std::setprecision(17) << std::scientific;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l <= k; ++l) {
          if (i * n + j < k * n + l) continue;
          const double v = hamiltonian.eri(i, j, k, l);
          if (v == 0.0) continue;
          out << v << ' ' << i + 1 << ' ' << j + 1 << ' ' << k + 1 << ' ' << l + 1 << '\n';
        }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = hamiltonian.h()(i, j);
      if (v == 0.0) continue;
      out << v << ' ' << i + 1 << ' ' << j + 1 << " 0 0\n";
    }
  out << hamiltonian.core_energy() << " 0 0 0 0\n";
}

nlohmann::json to_json(const ElectronicHamiltonian& hamiltonian) {
  const int n = hamiltonian.n_orbitals();
  nlohmann::json doc;
  doc["n_orbitals"] = n;
  doc["core_energy"] = hamiltonian.core_energy();
  std::vector<double> h;
  h.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h.push_back(hamiltonian.h()(i, j));
  doc["h"] = h;
  nlohmann::json eri = nlohmann::json::array();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l <= k; ++l) {
          if (i * n + j < k * n + l) continue;
          const double v = hamiltonian.eri(i, j, k, l);
          if (v != 0.0) eri.push_back({i, j, k, l, v});
        }
  doc["eri"] = std::move(eri);
  if (hamiltonian.metadata().n_electrons) doc["n_electrons"] = *hamiltonian.metadata().n_electrons;
  if (hamiltonian.metadata().ms2) doc["ms2"] = *hamiltonian.metadata().ms2;
  return doc;
}

ElectronicHamiltonian hamiltonian_from_json(const nlohmann::json& doc) {
  try {
    const int n = doc.at("n_orbitals").get<int>();
    if (n <= 0) throw DomainError("n_orbitals must be positive");
    const auto h_flat = doc.at("h").get<std::vector<double>>();
    if (h_flat.size() != static_cast<std::size_t>(n) * n) {
      throw DomainError("h must hold n_orbitals^2 entries");
    }
    Eigen::MatrixXd h(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h(i, j) = h_flat[static_cast<std::size_t>(i) * n + j];
    IntegralSink sink(n);
    int entry = 0;
    for (const auto& e : doc.at("eri")) {
      ++entry;
      const int i = e.at(0).get<int>(), j = e.at(1).get<int>(), k = e.at(2).get<int>(),
                l = e.at(3).get<int>();
      for (int x : {i, j, k, l}) {
        if (x < 0 || x >= n) throw ParseError("eri index out of range", entry);
      }
      sink.set_eri(i, j, k, l, e.at(4).get<double>(), entry);
    }
    HamiltonianMetadata meta;
    if (doc.contains("n_electrons")) meta.n_electrons = doc["n_electrons"].get<int>();
    if (doc.contains("ms2")) meta.ms2 = doc["ms2"].get<int>();
    return ElectronicHamiltonian(doc.at("core_energy").get<double>(), std::move(h),
                                 sink.take_eri(), meta);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("Hamiltonian JSON: ") + e.what(), 0);
  }
}

}  // namespace isothc
