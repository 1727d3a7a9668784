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

#include "isothc/fit.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>

#include "isothc/csv.hpp"
#include "isothc/errors.hpp"

namespace isothc {

FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y, int k_last) {
  if (x.size() != y.size()) throw DomainError("fit: x and y lengths differ");
  const int n = static_cast<int>(x.size());
  if (k_last < 0) throw DomainError("fit: k_last must be >= 0");
  const int k = k_last == 0 ? n : k_last;
  if (k < 2) throw DomainError("fit: need at least two points");
  if (k > n) throw DomainError("fit: k_last exceeds the number of points");
  for (int i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("fit: values must be positive");
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return x[a] < x[b]; });

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx, ly;
  for (int i = n - k; i < n; ++i) {
    lx.push_back(std::log(x[order[i]]));
    ly.push_back(std::log(y[order[i]]));
  }
  for (int i = 0; i < k; ++i) {
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / k;
  const double my = sy / k;
  for (int i = 0; i < k; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit: x values are all equal");
  FitResult out;
  out.points_used = k;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (int i = 0; i < k; ++i) {
    const double r = ly[i] - (out.intercept + out.slope * lx[i]);
    ss_res += r * r;
    ss_tot += (ly[i] - my) * (ly[i] - my);
  }
  out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

Series read_series_csv(std::istream& in, const std::string& x_column, const std::string& y_column) {
  const CsvTable table = parse_csv(in);
  if (table.header.size() < 2) throw ParseError("series CSV needs at least two columns", 1);
  auto column = [&](const std::string& name, std::size_t fallback) {
    if (name.empty()) return fallback;
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) throw ParseError("no column named '" + name + "'", 1);
    return static_cast<std::size_t>(it - table.header.begin());
  };
  const std::size_t cx = column(x_column, 0);
  const std::size_t cy = column(y_column, 1);
  Series s;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const int line = static_cast<int>(r) + 2;
    auto number = [&](std::size_t c) {
      if (c >= row.size()) throw ParseError("missing column", line);
      try {
        std::size_t used = 0;
        const double v = std::stod(row[c], &used);
        if (used != row[c].size()) throw std::invalid_argument(row[c]);
        return v;
      } catch (const std::exception&) {
        throw ParseError("not a number: '" + row[c] + "'", line);
      }
    };
    s.x.push_back(number(cx));
    s.y.push_back(number(cy));
  }
  return s;
}

}  // namespace isothc
