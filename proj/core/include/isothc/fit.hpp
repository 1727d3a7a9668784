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

// Log-log least-squares fits over the tail of a series.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isothc {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;  // natural log
  int points_used = 0;
  double r_squared = 0.0;
};

/// Ordinary least squares of log y on log x over the k_last points with the
/// largest x (all points when k_last is 0). Requires x, y > 0.
FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y, int k_last = 0);

struct Series {
  std::vector<double> x;
  std::vector<double> y;
};

/// Reads two columns from an RFC-4180 CSV with a header row. Columns are
/// chosen by header name; empty names select the first two columns.
Series read_series_csv(std::istream& in, const std::string& x_column = "",
                       const std::string& y_column = "");

}  // namespace isothc
