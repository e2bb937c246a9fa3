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
#pragma once

#include "asne/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace asne {

/// Smallest probability kept in a neighbor row before renormalization.
inline constexpr double kProbabilityFloor = 1e-12;

/// Row-sum slack tolerated by NeighborProbabilities validation.
inline constexpr double kRowSumTolerance = 1e-12;

enum class ProbabilityKind { kInput, kOutput };

/// A row-stochastic matrix of neighbor probabilities with a zero diagonal.
/// The constructor validates shape, non-negativity, the diagonal, and row
/// sums (each row must sum to 1 within kRowSumTolerance) and throws
/// std::invalid_argument on violation, so a constructed instance is always
/// safe to feed to cost/gradient code.
class NeighborProbabilities {
 public:
  NeighborProbabilities(Matrix probs, ProbabilityKind kind);

  const Matrix& probs() const { return probs_; }
  ProbabilityKind kind() const { return kind_; }
  Index size() const { return probs_.rows(); }

 private:
  Matrix probs_;
  ProbabilityKind kind_;
};

/// Per-point Gaussian bandwidths found by the perplexity search.
struct BandwidthSet {
  Vector sigmas;                      // sigma_i, one per point
  double perplexity = 0.0;            // requested perplexity
  Vector entropies_bits;              // achieved row entropy, base-2
  std::vector<std::uint8_t> degenerate;  // 1 where the search had no signal
  std::vector<std::string> warnings;
};

/// Full matrix of squared Euclidean distances with an exactly-zero diagonal.
/// Throws std::invalid_argument on empty input or non-finite entries.
Matrix pairwise_sq_distances(const Matrix& data);

/// Binary-searches beta_i = 1/(2 sigma_i^2) per row until the entropy of the
/// conditional Gaussian row matches log2(perplexity) within 1e-4 relative
/// (at most 100 bisection steps).  Rows whose distances carry no signal
/// (all off-diagonal distances equal) get sigma = 1 and a warning instead of
/// an error.  Requires 1 < perplexity < n.
BandwidthSet calibrate_bandwidths(const Matrix& sq_dists, double perplexity);

/// Conditional input probabilities p_{j|i} from squared distances and
/// calibrated bandwidths; entries below kProbabilityFloor are clamped up and
/// the row renormalized, so every off-diagonal entry is strictly positive.
NeighborProbabilities input_probabilities(const Matrix& sq_dists,
                                          const BandwidthSet& bandwidths);

/// Output-space probabilities q_{j|i} from embedding coordinates using a
/// unit-bandwidth Gaussian kernel exp(-|y_i - y_j|^2), row-normalized and
/// floored like input_probabilities.  Throws on non-finite coordinates.
NeighborProbabilities output_probabilities(const Matrix& coords);
NeighborProbabilities output_probabilities(const Embedding& embedding);

}  // namespace asne
