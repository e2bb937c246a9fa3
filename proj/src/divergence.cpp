/*
 * Copyright 2026 The asne authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "asne/divergence.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace asne {
namespace {

bool near_zero(double alpha) { return std::abs(alpha) < kAlphaLimitTolerance; }
bool near_one(double alpha) { return std::abs(alpha - 1.0) < kAlphaLimitTolerance; }

void check_alpha_range(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
}

void check_same_size(const NeighborProbabilities& input,
                     const NeighborProbabilities& output) {
  if (input.size() != output.size()) {
    throw std::invalid_argument("input/output probability sizes differ: " +
                                std::to_string(input.size()) + " vs " +
                                std::to_string(output.size()));
  }
}

// Elementwise log of the floored matrix, with the diagonal zeroed so it
// drops out of products against matrices that have a zero diagonal.
Matrix floored_log(const Matrix& m) {
  Matrix lm = m.cwiseMax(kProbabilityFloor).array().log().matrix();
  lm.diagonal().setZero();
  return lm;
}

// Row-wise sum_j a_ij (log_a_ij - log_b_ij).  Rows of `a` with zero entries
// contribute nothing for those entries (0 * finite = 0 after flooring).
Vector kl_rows(const Matrix& a, const Matrix& log_a, const Matrix& log_b) {
  return (a.array() * (log_a - log_b).array()).rowwise().sum();
}

}  // namespace

double alpha_divergence(const Vector& p, const Vector& q, double alpha) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("probability vector lengths differ: " +
                                std::to_string(p.size()) + " vs " + std::to_string(q.size()));
  }
  if ((p.array() < 0.0).any() || (q.array() < 0.0).any()) {
    throw std::invalid_argument("probability vectors must be non-negative");
  }
  check_alpha_range(alpha);

  const Eigen::ArrayXd pf = p.array().max(kProbabilityFloor);
  const Eigen::ArrayXd qf = q.array().max(kProbabilityFloor);
  if (near_one(alpha)) {
    return (p.array() * (pf.log() - qf.log())).sum() - p.sum() + q.sum();
  }
  if (near_zero(alpha)) {
    return (q.array() * (qf.log() - pf.log())).sum() - q.sum() + p.sum();
  }
  const double mixed = (alpha * pf.log() + (1.0 - alpha) * qf.log()).exp().sum();
  return (mixed - alpha * p.sum() + (alpha - 1.0) * q.sum()) / (alpha * (alpha - 1.0));
}

AsneObjective::AsneObjective(const NeighborProbabilities& input, double alpha)
    : alpha_(alpha),
      n_(input.size()),
      probs_(input.probs()),
      log_probs_(floored_log(input.probs())),
      alpha_log_probs_(alpha * log_probs_),
      row_sums_(input.probs().rowwise().sum()) {
  check_alpha_range(alpha);
}

Matrix AsneObjective::weight_matrix(const Matrix& log_q) const {
  // W_ij = p_ij^alpha q_ij^{1-alpha}; at alpha == 1 this is P exactly, so
  // skip the exp/log round-trip.
  if (near_one(alpha_)) {
    return probs_;
  }
  Matrix w = (alpha_log_probs_ + (1.0 - alpha_) * log_q).array().exp().matrix();
  w.diagonal().setZero();
  return w;
}

CostReport AsneObjective::cost(const NeighborProbabilities& output) const {
  if (output.size() != n_) {
    throw std::invalid_argument("input/output probability sizes differ: " +
                                std::to_string(n_) + " vs " + std::to_string(output.size()));
  }
  const Matrix& q = output.probs();
  const Matrix log_q = floored_log(q);

  CostReport report;
  report.alpha = alpha_;
  if (near_one(alpha_)) {
    report.per_point = kl_rows(probs_, log_probs_, log_q);
    report.theta = row_sums_;
  } else if (near_zero(alpha_)) {
    report.per_point = kl_rows(q, log_q, log_probs_);
    report.theta = q.rowwise().sum();
  } else {
    const Matrix w = weight_matrix(log_q);
    report.theta = w.rowwise().sum();
    const Vector q_sums = q.rowwise().sum();
    report.per_point = (report.theta.array() - alpha_ * row_sums_.array() +
                        (alpha_ - 1.0) * q_sums.array()) /
                       (alpha_ * (alpha_ - 1.0));
  }
  report.total = report.per_point.sum();
  return report;
}

Matrix AsneObjective::gradient(const NeighborProbabilities& output,
                               const Matrix& coords) const {
  if (output.size() != n_ || coords.rows() != n_) {
    throw std::invalid_argument("gradient size mismatch: P is " + std::to_string(n_) +
                                ", Q is " + std::to_string(output.size()) +
                                ", coords have " + std::to_string(coords.rows()) + " rows");
  }
  const Matrix& q = output.probs();
  const Matrix log_q = floored_log(q);

  Matrix asym(n_, n_);
  double scale = 0.0;
  if (near_zero(alpha_)) {
    // Limit of the general formula as alpha -> 0:
    //   asym_ij = q_ij (KL(q_i||p_i) - log(q_ij / p_ij)),  scale 2.
    const Vector row_kl = kl_rows(q, log_q, log_probs_);
    asym = q.cwiseProduct(((log_probs_ - log_q).colwise() + row_kl).eval());
    scale = 2.0;
  } else {
    const Matrix w = weight_matrix(log_q);
    const Vector theta = w.rowwise().sum();
    asym = w - theta.asDiagonal() * q;
    scale = 2.0 / alpha_;
  }
  const Matrix sym = asym + asym.transpose();
  const Vector row_totals = sym.rowwise().sum();
  return scale * (row_totals.asDiagonal() * coords - sym * coords);
}

CostReport asne_cost(const NeighborProbabilities& input,
                     const NeighborProbabilities& output, double alpha) {
  check_same_size(input, output);
  return AsneObjective(input, alpha).cost(output);
}

double nerv_cost(const NeighborProbabilities& input,
                 const NeighborProbabilities& output, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("lambda must lie in [0, 1], got " + std::to_string(lambda));
  }
  check_same_size(input, output);
  const Matrix& p = input.probs();
  const Matrix& q = output.probs();
  const Matrix log_p = floored_log(p);
  const Matrix log_q = floored_log(q);
  return lambda * kl_rows(p, log_p, log_q).sum() +
         (1.0 - lambda) * kl_rows(q, log_q, log_p).sum();
}

Matrix asne_gradient(const NeighborProbabilities& input,
                     const NeighborProbabilities& output, const Matrix& coords,
                     double alpha) {
  check_same_size(input, output);
  return AsneObjective(input, alpha).gradient(output, coords);
}

Matrix sne_gradient(const NeighborProbabilities& input,
                    const NeighborProbabilities& output, const Matrix& coords) {
  check_same_size(input, output);
  if (coords.rows() != input.size()) {
    throw std::invalid_argument("coords have " + std::to_string(coords.rows()) +
                                " rows but probabilities describe " +
                                std::to_string(input.size()) + " points");
  }
  const Matrix diff = input.probs() - output.probs();
  const Matrix sym = diff + diff.transpose();
  const Vector row_totals = sym.rowwise().sum();
  return 2.0 * (row_totals.asDiagonal() * coords - sym * coords);
}

}  // namespace asne
