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

#include <cmath>
#include <string>

#include "isothc/errors.hpp"
#include "isothc/focksim.hpp"

namespace isothc {

namespace {

constexpr double kOrthogonalityTolerance = 1e-8;
constexpr double kZeroEntry = 1e-14;

}  // namespace

nlohmann::json GivensSequence::to_json() const {
  nlohmann::json rots = nlohmann::json::array();
  for (const GivensRotation& r : rotations) {
    rots.push_back({{"p", r.p}, {"q", r.q()}, {"theta", r.theta}, {"phi", r.phi}});
  }
  return {{"n_modes", n_modes},
          {"rotations", rots},
          {"residual_phases",
           std::vector<double>(residual_phases.data(), residual_phases.data() + residual_phases.size())}};
}

GivensSequence GivensSequence::from_json(const nlohmann::json& doc) {
  try {
    GivensSequence out;
    out.n_modes = doc.at("n_modes").get<int>();
    for (const auto& r : doc.at("rotations")) {
      GivensRotation g{r.at("p").get<int>(), r.at("theta").get<double>(), r.value("phi", 0.0)};
      if (r.contains("q") && r["q"].get<int>() != g.q()) {
        throw DomainError("Givens rotation on non-adjacent modes " + std::to_string(g.p) + ", " +
                          std::to_string(r["q"].get<int>()));
      }
      if (g.p < 0 || g.q() >= out.n_modes) throw DomainError("Givens rotation outside the mode range");
      out.rotations.push_back(g);
    }
    const auto phases = doc.value("residual_phases", std::vector<double>(static_cast<std::size_t>(out.n_modes), 0.0));
    if (phases.size() != static_cast<std::size_t>(out.n_modes)) throw DomainError("residual_phases length");
    out.residual_phases = Eigen::Map<const Eigen::VectorXd>(phases.data(), out.n_modes);
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("Givens JSON: ") + e.what(), 0);
  }
}

Eigen::MatrixXcd single_particle_matrix(const GivensSequence& sequence) {
  const int m = sequence.n_modes;
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(m, m);
  for (const GivensRotation& r : sequence.rotations) {
    const double c = std::cos(r.theta);
    const double s = std::sin(r.theta);
    const Eigen::RowVectorXcd a = w.row(r.p);
    const Eigen::RowVectorXcd b = w.row(r.q());
    w.row(r.p) = c * a - s * std::polar(1.0, r.phi) * b;
    w.row(r.q()) = s * std::polar(1.0, -r.phi) * a + c * b;
  }
  for (int p = 0; p < sequence.residual_phases.size(); ++p) w.row(p) *= std::polar(1.0, sequence.residual_phases(p));
  return w;
}

Eigen::MatrixXd complete_isometry(const Eigen::MatrixXd& u) {
  const Eigen::Index n = u.rows();
  const Eigen::Index m = u.cols();
  if (n == 0 || m < n) throw DomainError("complete_isometry: need M >= N >= 1");
  const double defect = (u * u.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (defect > kOrthogonalityTolerance) {
    throw DomainError("complete_isometry: u is not a co-isometry (defect " + std::to_string(defect) + ")");
  }
  Eigen::MatrixXd w(m, m);
  w.topRows(n) = u;
  for (Eigen::Index row = n; row < m; ++row) {
    const auto basis = w.topRows(row);
    double best_norm = -1.0;
    Eigen::VectorXd best_vec;
    for (Eigen::Index k = 0; k < m; ++k) {
      Eigen::VectorXd e = Eigen::VectorXd::Unit(m, k);
      e -= basis.transpose() * (basis * e);
      const double norm = e.norm();
      if (norm > best_norm + 1e-12) {
        best_norm = norm;
        best_vec = std::move(e);
      }
    }
    for (int pass = 0; pass < 2; ++pass) {
      best_vec -= basis.transpose() * (basis * best_vec);
      best_vec.normalize();
    }
    w.row(row) = best_vec.transpose();
  }
  return w;
}

GivensSequence givens_decompose(const Eigen::MatrixXd& w, int n_relevant) {
  const Eigen::Index m = w.rows();
  if (w.cols() != m) throw DomainError("givens_decompose: W must be square");
  if (n_relevant < 0 || n_relevant > m) throw DomainError("givens_decompose: need 0 <= N <= M");
  const double defect = (w * w.transpose() - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
  if (defect > kOrthogonalityTolerance) {
    throw DomainError("givens_decompose: W is not orthogonal (defect " + std::to_string(defect) + ")");
  }
  GivensSequence out;
  out.n_modes = static_cast<int>(m);
  out.residual_phases = Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd u = w.topRows(n_relevant);
  for (Eigen::Index i = 0; i < n_relevant; ++i) {
    for (Eigen::Index j = m - 1; j > i; --j) {
      const double a = u(i, j - 1);
      const double b = u(i, j);
      if (std::abs(b) <= kZeroEntry) {
        u(i, j) = 0.0;
        continue;
      }
      const double r = std::hypot(a, b);
      const double c = a / r;
      const double s = b / r;
      const Eigen::VectorXd left = u.col(j - 1);
      const Eigen::VectorXd right = u.col(j);
      u.col(j - 1) = c * left + s * right;
      u.col(j) = -s * left + c * right;
      out.rotations.push_back({static_cast<int>(j - 1), -std::atan2(s, c), 0.0});
    }
    if (u(i, i) < 0.0) out.residual_phases(i) = M_PI;
  }
  return out;
}

}  // namespace isothc
