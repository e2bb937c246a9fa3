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

#include <utility>
#include <vector>

namespace asne {

/// Exact k-nearest-neighbor index sets (self excluded).  Distance ties are
/// broken by ascending point index, so the sets are deterministic.
struct NeighborSets {
  std::vector<std::vector<int>> sets;
  int k = 0;
};

/// One point per retrieval size k = 1..k_max: (mean recall, mean precision)
/// of output-space k-neighborhoods against fixed input-space neighborhoods.
struct RetrievalCurve {
  std::vector<std::pair<double, double>> points;  // (recall, precision)
  double auc = 0.0;
  int k_input = 0;
  int k_max = 0;
  bool k_max_capped = false;  // true when k_max was clamped to n - 1
};

/// Idealized two-level retrieval distribution: the first r_out ranks get
/// probability mass 1 - delta spread evenly, the remainder shares delta.
/// Counts split the N - 1 candidate ranks of a query into the four
/// relevant/retrieved cells.
struct BinaryModel {
  int n_total = 0;   // number of points N
  int k_in = 0;      // relevant set size
  int r_out = 0;     // retrieved set size
  double delta = 0.0;
  long long n_tp = 0;
  long long n_miss = 0;
  long long n_fp = 0;
  long long n_tn = 0;

  /// Builds a model with consistent cell counts; throws std::invalid_argument
  /// when sizes/counts are inconsistent or delta is outside (0, 1).
  static BinaryModel from_counts(int n_total, int k_in, int r_out, long long n_tp,
                                 double delta);
};

/// Exact k nearest neighbors per point under squared Euclidean distance.
/// Requires 1 <= k <= n - 1.
NeighborSets knn_sets(const Matrix& points, int k);

/// Mean precision and recall of `retrieved` against `relevant` neighborhoods:
/// per point, precision = |hits| / k_retrieved and recall = |hits| / k_relevant,
/// averaged over points.  Returns (mean_precision, mean_recall).
std::pair<double, double> precision_recall(const NeighborSets& relevant,
                                           const NeighborSets& retrieved);

/// Precision/recall curve over output retrieval sizes k = 1..k_max against
/// input neighborhoods of size k_input, plus the area under the curve.
/// Points are sorted by recall (stable), extended to recall 0 and 1 by
/// duplicating the end precisions, and integrated by the trapezoid rule.
/// Requires matching row counts and n > k_input; k_max is capped at n - 1.
RetrievalCurve retrieval_auc(const Matrix& input_points, const Matrix& output_points,
                             int k_input = 20, int k_max = 100);

/// Alpha-divergence between the model's relevant and retrieved rank
/// distributions (each renormalized over the N - 1 candidate ranks).
/// Requires alpha strictly inside (0, 1).
double binary_model_divergence(const BinaryModel& model, double alpha);

/// Weighted geometric mean of the model's precision and recall:
///   n_tp / (r_out^alpha * k_in^{1-alpha}).
double pr_geometric_mean(const BinaryModel& model, double alpha);

}  // namespace asne
