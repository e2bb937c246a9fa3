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
#include "asne/evaluation.hpp"

#include "asne/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace asne {
namespace {

// Indices 0..n-1 except `self`, sorted by (distance, index) ascending.
std::vector<int> ranked_neighbors(const Matrix& sq_dists, Index self) {
  const Index n = sq_dists.rows();
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n - 1));
  for (Index j = 0; j < n; ++j) {
    if (j != self) order.push_back(static_cast<int>(j));
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double da = sq_dists(self, a);
    const double db = sq_dists(self, b);
    return da != db ? da < db : a < b;
  });
  return order;
}

}  // namespace

NeighborSets knn_sets(const Matrix& points, int k) {
  const Index n = points.rows();
  if (k < 1 || k > n - 1) {
    throw std::invalid_argument("k must lie in [1, n-1]; got k = " + std::to_string(k) +
                                " with n = " + std::to_string(n));
  }
  const Matrix sq_dists = pairwise_sq_distances(points);
  NeighborSets result;
  result.k = k;
  result.sets.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    std::vector<int> order = ranked_neighbors(sq_dists, i);
    order.resize(static_cast<std::size_t>(k));
    result.sets[static_cast<std::size_t>(i)] = std::move(order);
  }
  return result;
}

std::pair<double, double> precision_recall(const NeighborSets& relevant,
                                           const NeighborSets& retrieved) {
  const std::size_t n = relevant.sets.size();
  if (n == 0 || retrieved.sets.size() != n) {
    throw std::invalid_argument("neighbor set counts differ: " + std::to_string(n) +
                                " vs " + std::to_string(retrieved.sets.size()));
  }
  const auto check_indices = [n](const NeighborSets& sets, const char* label) {
    for (const auto& set : sets.sets) {
      for (int j : set) {
        if (j < 0 || static_cast<std::size_t>(j) >= n) {
          throw std::invalid_argument(std::string(label) + " neighbor index " +
                                      std::to_string(j) + " is outside [0, " +
                                      std::to_string(n) + ")");
        }
      }
    }
  };
  check_indices(relevant, "relevant");
  check_indices(retrieved, "retrieved");

  std::vector<char> member(n, 0);
  double precision_sum = 0.0;
  double recall_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (int j : relevant.sets[i]) member[static_cast<std::size_t>(j)] = 1;
    int hits = 0;
    for (int j : retrieved.sets[i]) hits += member[static_cast<std::size_t>(j)];
    for (int j : relevant.sets[i]) member[static_cast<std::size_t>(j)] = 0;
    precision_sum += static_cast<double>(hits) / static_cast<double>(retrieved.k);
    recall_sum += static_cast<double>(hits) / static_cast<double>(relevant.k);
  }
  const double count = static_cast<double>(n);
  return {precision_sum / count, recall_sum / count};
}

RetrievalCurve retrieval_auc(const Matrix& input_points, const Matrix& output_points,
                             int k_input, int k_max) {
  const Index n = input_points.rows();
  if (output_points.rows() != n) {
    throw std::invalid_argument("input and output point counts differ: " +
                                std::to_string(n) + " vs " +
                                std::to_string(output_points.rows()));
  }
  if (k_input < 1 || k_max < 1) {
    throw std::invalid_argument("neighborhood sizes must be positive");
  }
  if (n <= k_input) {
    throw std::invalid_argument("need more points than k_input = " + std::to_string(k_input) +
                                ", got n = " + std::to_string(n));
  }

  RetrievalCurve curve;
  curve.k_input = k_input;
  curve.k_max = k_max;
  if (k_max > n - 1) {
    curve.k_max = static_cast<int>(n) - 1;
    curve.k_max_capped = true;
  }

  const NeighborSets relevant = knn_sets(input_points, k_input);
  const Matrix out_dists = pairwise_sq_distances(output_points);

  // hits(i, k-1) = |relevant_i ∩ first k output neighbors of i|, filled by a
  // single pass down each output ranking.
  Eigen::MatrixXi hits(n, curve.k_max);
  std::vector<char> member(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i) {
    for (int j : relevant.sets[static_cast<std::size_t>(i)]) {
      member[static_cast<std::size_t>(j)] = 1;
    }
    const std::vector<int> order = ranked_neighbors(out_dists, i);
    int running = 0;
    for (int k = 0; k < curve.k_max; ++k) {
      running += member[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
      hits(i, k) = running;
    }
    for (int j : relevant.sets[static_cast<std::size_t>(i)]) {
      member[static_cast<std::size_t>(j)] = 0;
    }
  }

  // Mean precision/recall per retrieval size, averaging per-point ratios in
  // index order (the same arithmetic as precision_recall).
  curve.points.reserve(static_cast<std::size_t>(curve.k_max));
  const double count = static_cast<double>(n);
  for (int k = 1; k <= curve.k_max; ++k) {
    double precision_sum = 0.0;
    double recall_sum = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double h = static_cast<double>(hits(i, k - 1));
      precision_sum += h / static_cast<double>(k);
      recall_sum += h / static_cast<double>(k_input);
    }
    curve.points.emplace_back(recall_sum / count, precision_sum / count);
  }

  // Integrate precision over recall: sort by recall (stable, so equal-recall
  // points keep their k order), pin the curve down at recall 0 and 1, and
  // apply the trapezoid rule.
  std::vector<std::pair<double, double>> sorted = curve.points;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<double, double>> path;
  path.reserve(sorted.size() + 2);
  path.emplace_back(0.0, sorted.front().second);
  path.insert(path.end(), sorted.begin(), sorted.end());
  path.emplace_back(1.0, sorted.back().second);
  double auc = 0.0;
  for (std::size_t t = 1; t < path.size(); ++t) {
    auc += (path[t].first - path[t - 1].first) * 0.5 *
           (path[t].second + path[t - 1].second);
  }
  curve.auc = auc;
  return curve;
}

BinaryModel BinaryModel::from_counts(int n_total, int k_in, int r_out, long long n_tp,
                                     double delta) {
  if (n_total < 3) {
    throw std::invalid_argument("binary model needs at least 3 points");
  }
  if (k_in < 1 || k_in > n_total - 1 || r_out < 1 || r_out > n_total - 1) {
    throw std::invalid_argument("neighborhood sizes must lie in [1, N-1]");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1), got " + std::to_string(delta));
  }
  const long long candidates = n_total - 1;
  const long long lo = std::max<long long>(0, k_in + r_out - candidates);
  const long long hi = std::min<long long>(k_in, r_out);
  if (n_tp < lo || n_tp > hi) {
    throw std::invalid_argument("n_tp = " + std::to_string(n_tp) +
                                " is infeasible for k = " + std::to_string(k_in) +
                                ", r = " + std::to_string(r_out) +
                                ", N = " + std::to_string(n_total));
  }
  BinaryModel model;
  model.n_total = n_total;
  model.k_in = k_in;
  model.r_out = r_out;
  model.delta = delta;
  model.n_tp = n_tp;
  model.n_miss = k_in - n_tp;
  model.n_fp = r_out - n_tp;
  model.n_tn = candidates - k_in - r_out + n_tp;
  return model;
}

double binary_model_divergence(const BinaryModel& model, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie strictly inside (0, 1), got " +
                                std::to_string(alpha));
  }
  const double n = static_cast<double>(model.n_total);
  const double k = static_cast<double>(model.k_in);
  const double r = static_cast<double>(model.r_out);
  const double delta = model.delta;

  // Two-level rank distributions; the raw masses do not sum exactly to one
  // over the N - 1 candidate ranks, so renormalize each row first.
  double a = (1.0 - delta) / k;
  double b = delta / (n - k + 1.0);
  double c = (1.0 - delta) / r;
  double d = delta / (n - r + 1.0);
  const double p_total = k * a + (n - 1.0 - k) * b;
  const double q_total = r * c + (n - 1.0 - r) * d;
  a /= p_total;
  b /= p_total;
  c /= q_total;
  d /= q_total;

  const double tp = static_cast<double>(model.n_tp);
  const double miss = static_cast<double>(model.n_miss);
  const double fp = static_cast<double>(model.n_fp);
  const double tn = static_cast<double>(model.n_tn);
  const double mixed = tp * std::pow(a, alpha) * std::pow(c, 1.0 - alpha) +
                       miss * std::pow(a, alpha) * std::pow(d, 1.0 - alpha) +
                       fp * std::pow(b, alpha) * std::pow(c, 1.0 - alpha) +
                       tn * std::pow(b, alpha) * std::pow(d, 1.0 - alpha);
  const double p_sum = tp * a + miss * a + fp * b + tn * b;
  const double q_sum = tp * c + miss * d + fp * c + tn * d;
  return (mixed - alpha * p_sum + (alpha - 1.0) * q_sum) / (alpha * (alpha - 1.0));
}

double pr_geometric_mean(const BinaryModel& model, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  return static_cast<double>(model.n_tp) /
         (std::pow(static_cast<double>(model.r_out), alpha) *
          std::pow(static_cast<double>(model.k_in), 1.0 - alpha));
}

}  // namespace asne
