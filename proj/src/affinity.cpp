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
#include "asne/affinity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace asne {
namespace {

void check_square_distances(const Matrix& sq_dists) {
  if (sq_dists.rows() == 0 || sq_dists.rows() != sq_dists.cols()) {
    throw std::invalid_argument("distance matrix must be square and non-empty, got " +
                                std::to_string(sq_dists.rows()) + "x" +
                                std::to_string(sq_dists.cols()));
  }
}

// Floors every off-diagonal entry at kProbabilityFloor, zeroes the diagonal,
// and renormalizes each row to sum exactly to 1.
Matrix floor_and_normalize(Matrix probs) {
  const Index n = probs.rows();
  probs = probs.cwiseMax(kProbabilityFloor);
  probs.diagonal().setZero();
  for (Index i = 0; i < n; ++i) {
    const double total = probs.row(i).sum();
    probs.row(i) /= total;
  }
  return probs;
}

}  // namespace

NeighborProbabilities::NeighborProbabilities(Matrix probs, ProbabilityKind kind)
    : probs_(std::move(probs)), kind_(kind) {
  const Index n = probs_.rows();
  if (n < 2 || probs_.cols() != n) {
    throw std::invalid_argument("neighbor probabilities must be square with n >= 2, got " +
                                std::to_string(n) + "x" + std::to_string(probs_.cols()));
  }
  for (Index i = 0; i < n; ++i) {
    if (probs_(i, i) != 0.0) {
      throw std::invalid_argument("neighbor probabilities must have a zero diagonal (row " +
                                  std::to_string(i) + ")");
    }
    double sum = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double p = probs_(i, j);
      if (!(p >= 0.0)) {  // catches negatives and NaN
        throw std::invalid_argument("neighbor probability (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") is negative or non-finite");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw std::invalid_argument("neighbor probability row " + std::to_string(i) +
                                  " sums to " + std::to_string(sum) + ", expected 1");
    }
  }
}

Matrix pairwise_sq_distances(const Matrix& data) {
  if (data.rows() == 0) {
    throw std::invalid_argument("cannot compute distances of an empty dataset");
  }
  if (!data.allFinite()) {
    throw std::invalid_argument("dataset contains non-finite values");
  }
  const Index n = data.rows();
  const Vector sq_norms = data.rowwise().squaredNorm();
  Matrix d2 = sq_norms.replicate(1, n) + sq_norms.transpose().replicate(n, 1) -
              2.0 * (data * data.transpose());
  d2 = d2.cwiseMax(0.0);  // clip tiny negative values from cancellation
  d2.diagonal().setZero();
  return d2;
}

BandwidthSet calibrate_bandwidths(const Matrix& sq_dists, double perplexity) {
  check_square_distances(sq_dists);
  const Index n = sq_dists.rows();
  if (!(perplexity > 1.0) || !(perplexity < static_cast<double>(n))) {
    throw std::invalid_argument("perplexity must lie in (1, n); got " +
                                std::to_string(perplexity) + " with n = " + std::to_string(n));
  }

  constexpr int kMaxIters = 100;
  constexpr double kRelTol = 1e-4;
  // Target entropy in nats: perplexity = 2^{H_bits} = e^{H_nats}.
  const double target_h = std::log(perplexity);

  BandwidthSet out;
  out.perplexity = perplexity;
  out.sigmas.resize(n);
  out.entropies_bits.resize(n);
  out.degenerate.assign(static_cast<std::size_t>(n), 0);

  Vector row(n);
  for (Index i = 0; i < n; ++i) {
    row = sq_dists.row(i);
    row(i) = 0.0;

    // No signal: every off-diagonal distance identical (e.g. duplicated
    // points).  The entropy is then independent of beta, so searching is
    // pointless; fall back to sigma = 1 and tell the caller.
    double first = (i == 0) ? row(1) : row(0);
    bool all_equal = true;
    for (Index j = 0; j < n; ++j) {
      if (j != i && row(j) != first) {
        all_equal = false;
        break;
      }
    }
    if (all_equal) {
      out.sigmas(i) = 1.0;
      out.entropies_bits(i) = std::log2(static_cast<double>(n - 1));
      out.degenerate[static_cast<std::size_t>(i)] = 1;
      out.warnings.push_back("row " + std::to_string(i) +
                             ": all neighbor distances equal; bandwidth search has no "
                             "signal, using sigma = 1");
      continue;
    }

    // Bisection on beta = 1/(2 sigma^2); entropy decreases monotonically in
    // beta.  The entropy of p_j ∝ exp(-beta d_j) is
    //   H = log(sum_j w_j) + beta * sum_j d_j w_j / sum_j w_j
    // with w_j = exp(-beta d_j), computed with the row max subtracted.
    double beta = 1.0;
    double beta_lo = 0.0;
    double beta_hi = std::numeric_limits<double>::infinity();
    double entropy = 0.0;
    double min_d = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      if (j != i) min_d = std::min(min_d, row(j));
    }
    for (int iter = 0; iter < kMaxIters; ++iter) {
      double sum_w = 0.0;
      double sum_dw = 0.0;
      for (Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const double w = std::exp(-beta * (row(j) - min_d));
        sum_w += w;
        sum_dw += (row(j) - min_d) * w;
      }
      entropy = std::log(sum_w) + beta * sum_dw / sum_w;
      const double diff = entropy - target_h;
      if (std::abs(diff) < kRelTol * target_h) break;
      if (diff > 0.0) {
        beta_lo = beta;
        beta = std::isinf(beta_hi) ? beta * 2.0 : 0.5 * (beta_lo + beta_hi);
      } else {
        beta_hi = beta;
        beta = (beta_lo == 0.0) ? beta / 2.0 : 0.5 * (beta_lo + beta_hi);
      }
    }
    out.sigmas(i) = std::sqrt(1.0 / (2.0 * beta));
    out.entropies_bits(i) = entropy / std::log(2.0);
  }
  return out;
}

NeighborProbabilities input_probabilities(const Matrix& sq_dists,
                                          const BandwidthSet& bandwidths) {
  check_square_distances(sq_dists);
  const Index n = sq_dists.rows();
  if (bandwidths.sigmas.size() != n) {
    throw std::invalid_argument("bandwidth count " + std::to_string(bandwidths.sigmas.size()) +
                                " does not match point count " + std::to_string(n));
  }
  Matrix probs(n, n);
  for (Index i = 0; i < n; ++i) {
    const double beta = 1.0 / (2.0 * bandwidths.sigmas(i) * bandwidths.sigmas(i));
    double min_d = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      if (j != i) min_d = std::min(min_d, sq_dists(i, j));
    }
    for (Index j = 0; j < n; ++j) {
      probs(i, j) = (j == i) ? 0.0 : std::exp(-beta * (sq_dists(i, j) - min_d));
    }
    probs.row(i) /= probs.row(i).sum();
  }
  return NeighborProbabilities(floor_and_normalize(std::move(probs)),
                               ProbabilityKind::kInput);
}

NeighborProbabilities output_probabilities(const Matrix& coords) {
  if (!coords.allFinite()) {
    throw std::invalid_argument("embedding coordinates contain non-finite values");
  }
  const Matrix d2 = pairwise_sq_distances(coords);
  const Index n = d2.rows();
  if (n < 2) {
    throw std::invalid_argument("need at least two points for output probabilities");
  }
  Matrix probs(n, n);
  for (Index i = 0; i < n; ++i) {
    double min_d = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      if (j != i) min_d = std::min(min_d, d2(i, j));
    }
    for (Index j = 0; j < n; ++j) {
      probs(i, j) = (j == i) ? 0.0 : std::exp(-(d2(i, j) - min_d));
    }
    probs.row(i) /= probs.row(i).sum();
  }
  return NeighborProbabilities(floor_and_normalize(std::move(probs)),
                               ProbabilityKind::kOutput);
}

NeighborProbabilities output_probabilities(const Embedding& embedding) {
  return output_probabilities(embedding.coords);
}

}  // namespace asne
