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

#include "asne/affinity.hpp"
#include "asne/types.hpp"

namespace asne {

/// |alpha| (resp. |alpha - 1|) below this routes to the KL limit branch.
inline constexpr double kAlphaLimitTolerance = 1e-9;

/// Cost of a full embedding state, with per-point detail.  theta holds the
/// compatibility factors theta_i = sum_{j != i} p_ij^alpha q_ij^{1-alpha};
/// theta_i <= 1 for alpha in (0, 1] and theta_i = 1 exactly when the rows
/// match.
struct CostReport {
  double total = 0.0;
  Vector per_point;
  Vector theta;
  double alpha = 0.0;
};

/// Alpha-divergence between two probability vectors (same length, entries
/// >= 0, each summing to ~1):
///   D_alpha(p||q) = sum_j (p_j^alpha q_j^{1-alpha} - alpha p_j
///                          + (alpha-1) q_j) / (alpha (alpha-1)).
/// alpha within kAlphaLimitTolerance of 0 or 1 uses the KL limits
/// (KL(q||p) and KL(p||q) respectively).  Entries are floored at
/// kProbabilityFloor before logs/powers so zeros are safe.
double alpha_divergence(const Vector& p, const Vector& q, double alpha);

/// Sum of row-wise alpha-divergences D_alpha(p_i || q_i) over all points.
CostReport asne_cost(const NeighborProbabilities& input,
                     const NeighborProbabilities& output, double alpha);

/// Neighbor-retrieval cost: lambda * sum_i KL(p_i||q_i)
///                        + (1-lambda) * sum_i KL(q_i||p_i), lambda in [0,1].
double nerv_cost(const NeighborProbabilities& input,
                 const NeighborProbabilities& output, double lambda);

/// Exact gradient of asne_cost with respect to the embedding coordinates.
/// For alpha away from 0:
///   dC/dy_i = (2/alpha) sum_{j != i} (y_i - y_j)
///             (W_ij - theta_i q_ij + W_ji - theta_j q_ji),
/// with W_ij = p_ij^alpha q_ij^{1-alpha}; the alpha -> 0 limit replaces the
/// bracket with q_ij (KL(q_i||p_i) - log(q_ij/p_ij)) + the ji mirror term.
Matrix asne_gradient(const NeighborProbabilities& input,
                     const NeighborProbabilities& output, const Matrix& coords,
                     double alpha);

/// Gradient of the classic objective sum_i KL(p_i||q_i):
///   dC/dy_i = 2 sum_{j != i} (y_i - y_j)(p_ij - q_ij + p_ji - q_ji).
Matrix sne_gradient(const NeighborProbabilities& input,
                    const NeighborProbabilities& output, const Matrix& coords);

/// Precomputes everything about the input side (alpha * log P, row sums) so
/// the optimizer pays only for the output-dependent part each iteration.
/// The free functions asne_cost/asne_gradient delegate here, keeping a
/// single implementation of the formulas.
class AsneObjective {
 public:
  AsneObjective(const NeighborProbabilities& input, double alpha);

  CostReport cost(const NeighborProbabilities& output) const;
  Matrix gradient(const NeighborProbabilities& output, const Matrix& coords) const;
  double alpha() const { return alpha_; }

 private:
  // exp(alpha log P + (1-alpha) log Q) with a zeroed diagonal.
  Matrix weight_matrix(const Matrix& log_q) const;

  double alpha_;
  Index n_;
  Matrix probs_;         // copy of P
  Matrix log_probs_;     // log of floored P, zero diagonal
  Matrix alpha_log_probs_;
  Vector row_sums_;      // sum_j p_ij (1 up to floor effects)
};

}  // namespace asne
