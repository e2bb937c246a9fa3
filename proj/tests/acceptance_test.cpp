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

// End-to-end acceptance gate for the toolkit.  Each numbered check prints a
// single [PASS]/[FAIL] line with its measured quantities and wall time; the
// process exit code is the number of failing checks.  Tolerances are pinned
// in the code next to each check.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "asne/affinity.hpp"
#include "asne/data_io.hpp"
#include "asne/divergence.hpp"
#include "asne/eda.hpp"
#include "asne/evaluation.hpp"
#include "asne/optimizer.hpp"
#include "asne/pipeline.hpp"

namespace {

using asne::Index;
using asne::Matrix;
using asne::Vector;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void run_check(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = body();
  } catch (const std::exception& e) {
    outcome.pass = false;
    outcome.detail = std::string("exception: ") + e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!outcome.pass) ++g_failures;
  std::printf("[%s] check %2d (%6.1f s): %s — %s\n", outcome.pass ? "PASS" : "FAIL", id,
              seconds, title.c_str(), outcome.detail.c_str());
  std::fflush(stdout);
}

std::string format(const char* fmt, ...) {
  char buffer[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buffer, sizeof(buffer), fmt, args);
  va_end(args);
  return buffer;
}

asne::NeighborProbabilities random_neighbor_probs(Index n, std::mt19937& rng,
                                                  asne::ProbabilityKind kind) {
  std::uniform_real_distribution<double> uniform(0.05, 1.0);
  Matrix probs(n, n);
  for (Index i = 0; i < n; ++i) {
    double sum = 0.0;
    for (Index j = 0; j < n; ++j) {
      probs(i, j) = (i == j) ? 0.0 : uniform(rng);
      sum += probs(i, j);
    }
    probs.row(i) /= sum;
  }
  return asne::NeighborProbabilities(std::move(probs), kind);
}

Matrix random_coords(Index n, Index d, std::mt19937& rng, double std_dev = 1.0) {
  std::normal_distribution<double> gauss(0.0, std_dev);
  Matrix coords(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) coords(i, j) = gauss(rng);
  }
  return coords;
}

// ---------------------------------------------------------------------------
// Check 1: analytic gradient vs central finite differences.

Outcome check_gradient_finite_differences() {
  std::mt19937 rng(101);
  const double h = 1e-5;
  double worst = 0.0;
  for (int instance = 0; instance < 20; ++instance) {
    const asne::NeighborProbabilities input =
        random_neighbor_probs(8, rng, asne::ProbabilityKind::kInput);
    Matrix coords = random_coords(8, 2, rng);
    for (double alpha : {0.0, 0.2, 0.5, 0.8, 1.0}) {
      const Matrix analytic =
          asne::asne_gradient(input, asne::output_probabilities(coords), coords, alpha);
      Matrix fd(coords.rows(), coords.cols());
      for (Index i = 0; i < coords.rows(); ++i) {
        for (Index c = 0; c < coords.cols(); ++c) {
          const double saved = coords(i, c);
          coords(i, c) = saved + h;
          const double up =
              asne::asne_cost(input, asne::output_probabilities(coords), alpha).total;
          coords(i, c) = saved - h;
          const double down =
              asne::asne_cost(input, asne::output_probabilities(coords), alpha).total;
          coords(i, c) = saved;
          fd(i, c) = (up - down) / (2.0 * h);
        }
      }
      const double rel = (analytic - fd).norm() / std::max(fd.norm(), 1e-12);
      worst = std::max(worst, rel);
    }
  }
  Outcome outcome;
  outcome.pass = worst < 1e-5;
  outcome.detail = format("max relative gradient error %.3e over 20 instances x 5 alphas "
                          "(tolerance 1e-5)",
                          worst);
  return outcome;
}

// ---------------------------------------------------------------------------
// Check 2: limit-case identities at alpha = 1 and alpha -> 0.

Outcome check_limit_identities() {
  std::mt19937 rng(202);
  double worst_gradient = 0.0;
  double worst_cost = 0.0;
  for (int instance = 0; instance < 10; ++instance) {
    const asne::NeighborProbabilities input =
        random_neighbor_probs(10, rng, asne::ProbabilityKind::kInput);
    const Matrix coords = random_coords(10, 2, rng);
    const asne::NeighborProbabilities output = asne::output_probabilities(coords);

    const Matrix g_alpha = asne::asne_gradient(input, output, coords, 1.0);
    const Matrix g_sne = asne::sne_gradient(input, output, coords);
    worst_gradient =
        std::max(worst_gradient, (g_alpha - g_sne).cwiseAbs().maxCoeff());

    // Directly transcribed KL sums.
    const Matrix& p = input.probs();
    const Matrix& q = output.probs();
    double kl_pq = 0.0;
    double kl_qp = 0.0;
    for (Index i = 0; i < p.rows(); ++i) {
      for (Index j = 0; j < p.cols(); ++j) {
        if (i == j) continue;
        kl_pq += p(i, j) * std::log(p(i, j) / q(i, j));
        kl_qp += q(i, j) * std::log(q(i, j) / p(i, j));
      }
    }

    const double cost_at_one = asne::asne_cost(input, output, 1.0).total;
    worst_cost = std::max(worst_cost, std::abs(cost_at_one - kl_pq));
    worst_cost =
        std::max(worst_cost, std::abs(cost_at_one - asne::nerv_cost(input, output, 1.0)));

    const double cost_at_zero = asne::asne_cost(input, output, 0.0).total;
    worst_cost = std::max(worst_cost, std::abs(cost_at_zero - kl_qp));
    worst_cost = std::max(worst_cost,
                          std::abs(cost_at_zero - asne::nerv_cost(input, output, 0.0)));
  }
  Outcome outcome;
  outcome.pass = worst_gradient < 1e-12 && worst_cost < 1e-10;
  outcome.detail =
      format("gradient max |diff| %.3e (tol 1e-12), cost identities max |diff| %.3e "
             "(tol 1e-10)",
             worst_gradient, worst_cost);
  return outcome;
}

// ---------------------------------------------------------------------------
// Check 3: compatibility factors bounded by one.

Outcome check_compatibility_bound() {
  std::mt19937 rng(303);
  std::uniform_real_distribution<double> alpha_dist(1e-6, 1.0);
  const Index n = 11;
  int rows_checked = 0;
  double worst_excess = -1.0;
  for (int instance = 0; instance < 100; ++instance) {
    const asne::NeighborProbabilities p =
        random_neighbor_probs(n, rng, asne::ProbabilityKind::kInput);
    const asne::NeighborProbabilities q =
        random_neighbor_probs(n, rng, asne::ProbabilityKind::kOutput);
    for (double alpha : {alpha_dist(rng), 0.2, 0.6, 1.0}) {
      const Vector theta = asne::asne_cost(p, q, alpha).theta;
      for (Index i = 0; i < theta.size(); ++i) {
        worst_excess = std::max(worst_excess, theta[i] - 1.0);
      }
    }
    rows_checked += static_cast<int>(n);
  }

  double worst_equality = 0.0;
  for (int instance = 0; instance < 20; ++instance) {
    const asne::NeighborProbabilities p =
        random_neighbor_probs(n, rng, asne::ProbabilityKind::kInput);
    const asne::NeighborProbabilities q(p.probs(), asne::ProbabilityKind::kOutput);
    const Vector theta = asne::asne_cost(p, q, alpha_dist(rng)).theta;
    for (Index i = 0; i < theta.size(); ++i) {
      worst_equality = std::max(worst_equality, std::abs(theta[i] - 1.0));
    }
  }

  Outcome outcome;
  outcome.pass = worst_excess <= 1e-10 && worst_equality <= 1e-12;
  outcome.detail = format("%d row pairs: max(theta - 1) = %.3e (tol 1e-10); "
                          "matched rows |theta - 1| max %.3e (tol 1e-12)",
                          rows_checked, worst_excess, worst_equality);
  return outcome;
}

// ---------------------------------------------------------------------------
// Check 4: binary retrieval model — geometric-mean bound and ordering
// reversal at small delta.

Outcome check_binary_model() {
  std::mt19937 rng(404);
  std::uniform_real_distribution<double> alpha_dist(0.0, 1.0);

  double worst_violation = -1.0;
  for (int instance = 0; instance < 500; ++instance) {
    std::uniform_int_distribution<int> n_dist(10, 200);
    const int n_total = n_dist(rng);
    std::uniform_int_distribution<int> size_dist(1, std::min(40, n_total - 2));
    const int k_in = size_dist(rng);
    const int r_out = size_dist(rng);
    const long long lo = std::max(0, k_in + r_out - (n_total - 1));
    const long long hi = std::min(k_in, r_out);
    std::uniform_int_distribution<long long> tp_dist(lo, hi);
    const asne::BinaryModel model =
        asne::BinaryModel::from_counts(n_total, k_in, r_out, tp_dist(rng), 0.1);
    const double precision =
        static_cast<double>(model.n_tp) / static_cast<double>(r_out);
    const double recall = static_cast<double>(model.n_tp) / static_cast<double>(k_in);
    for (double alpha : {alpha_dist(rng), 0.0, 0.5, 1.0}) {
      const double geometric = asne::pr_geometric_mean(model, alpha);
      const double arithmetic = alpha * precision + (1.0 - alpha) * recall;
      worst_violation = std::max(worst_violation, geometric - arithmetic);
    }
  }

  // Reversal: among models sharing (N, k, r), more true positives means a
  // strictly better geometric mean and a strictly smaller divergence.
  int comparable = 0;
  int reversed = 0;
  const double delta = 1e-8;
  while (comparable < 250) {
    std::uniform_int_distribution<int> n_dist(12, 150);
    const int n_total = n_dist(rng);
    std::uniform_int_distribution<int> size_dist(2, std::min(30, n_total - 2));
    const int k_in = size_dist(rng);
    const int r_out = size_dist(rng);
    const long long lo = std::max(0, k_in + r_out - (n_total - 1));
    const long long hi = std::min(k_in, r_out);
    if (hi <= lo) continue;
    std::uniform_int_distribution<long long> tp_dist(lo, hi);
    long long tp_a = tp_dist(rng);
    long long tp_b = tp_dist(rng);
    if (tp_a == tp_b) continue;
    if (tp_a > tp_b) std::swap(tp_a, tp_b);
    const asne::BinaryModel worse =
        asne::BinaryModel::from_counts(n_total, k_in, r_out, tp_a, delta);
    const asne::BinaryModel better =
        asne::BinaryModel::from_counts(n_total, k_in, r_out, tp_b, delta);
    ++comparable;
    bool all_alpha_reversed = true;
    for (double alpha : {0.25, 0.5, 0.75}) {
      const bool pr_improves = asne::pr_geometric_mean(better, alpha) >
                               asne::pr_geometric_mean(worse, alpha);
      const bool divergence_drops = asne::binary_model_divergence(better, alpha) <
                                    asne::binary_model_divergence(worse, alpha);
      if (!(pr_improves && divergence_drops)) all_alpha_reversed = false;
    }
    if (all_alpha_reversed) ++reversed;
  }

  Outcome outcome;
  outcome.pass = worst_violation <= 1e-12 && reversed == comparable;
  outcome.detail = format("500 models: max geometric-minus-arithmetic %.3e (tol 1e-12); "
                          "ordering reversed in %d/%d comparable pairs at delta 1e-8",
                          worst_violation, reversed, comparable);
  return outcome;
}

// ---------------------------------------------------------------------------
// Check 5: scale-transform divergence equivalence.

double beta_divergence_reference(const Vector& u, const Vector& mu, double beta) {
  double total = 0.0;
  for (Index i = 0; i < u.size(); ++i) {
    if (beta == 0.0) {
      total += u[i] * std::log(u[i] / mu[i]) - u[i] + mu[i];
    } else {
      total += std::pow(u[i], beta + 1.0) / (beta * (beta + 1.0)) -
               u[i] * std::pow(mu[i], beta) / beta +
               std::pow(mu[i], beta + 1.0) / (beta + 1.0);
    }
  }
  return total;
}

Outcome check_transform_equivalence() {
  std::mt19937 rng(505);
  std::normal_distribution<double> gauss(0.0, 0.7);
  double worst = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    Vector v(6);
    Vector m(6);
    for (Index i = 0; i < 6; ++i) {
      v[i] = std::exp(gauss(rng));
      m[i] = std::exp(gauss(rng));
    }
    for (double alpha : {0.25, 0.5, 0.75, 1.0}) {
      const double beta = asne::beta_from_alpha(alpha);
      const Vector u = asne::transform_to_beta(v, alpha);
      const Vector mu = asne::transform_to_beta(m, alpha);
      const double lhs = beta_divergence_reference(u, mu, beta);
      const double rhs = asne::alpha_divergence_positive(v, m, alpha);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  Outcome outcome;
  outcome.pass = worst < 1e-9;
  outcome.detail =
      format("max |D_beta(u||mu) - D_alpha(v||m)| = %.3e over 100 pairs x 4 alphas "
             "(tolerance 1e-9)",
             worst);
  return outcome;
}

// ---------------------------------------------------------------------------
// Check 6: density normalizer vs closed forms.

Outcome check_normalizer_closed_forms() {
  constexpr double kPi = 3.14159265358979323846;
  // Gaussian member: exponent -(u - mu)^2 / (2 phi) with negligible
  // truncation at mu = 10, phi = 1.
  const double gaussian = asne::eda_normalizer(asne::EdaParams{1.0, 1.0}, 10.0);
  const double gaussian_expected = std::sqrt(2.0 * kPi);
  const double gaussian_rel =
      std::abs(gaussian - gaussian_expected) / gaussian_expected;

  // Inverse-Gaussian member: u^{-3/2} exp(-(u-mu)^2 / (2 phi mu^2 u))
  // integrates to sqrt(2 pi phi) for every mu.
  double ig_rel = 0.0;
  for (const auto& [mu, phi] : {std::pair{1.5, 0.5}, std::pair{4.0, 1.0},
                                std::pair{0.7, 0.25}}) {
    const double z = asne::eda_normalizer(asne::EdaParams{-2.0, phi}, mu);
    const double expected = std::sqrt(2.0 * kPi * phi);
    ig_rel = std::max(ig_rel, std::abs(z - expected) / expected);
  }

  Outcome outcome;
  outcome.pass = gaussian_rel < 1e-6 && ig_rel < 1e-5;
  outcome.detail = format("Gaussian rel err %.3e (tol 1e-6); inverse-Gaussian rel err "
                          "%.3e over 3 configs (tol 1e-5)",
                          gaussian_rel, ig_rel);
  return outcome;
}

// ---------------------------------------------------------------------------
// Checks 7-9: dataset sweeps and density-based selection.

struct SweepResult {
  std::vector<double> grid;
  std::vector<double> mean_aucs;
  asne::NeighborProbabilities input;
  Matrix data;
  double seconds = 0.0;
};

SweepResult sweep_dataset(const std::string& file, const std::string& label_column,
                          int repeats, std::uint64_t base_seed) {
  const auto start = std::chrono::steady_clock::now();
  const asne::Dataset dataset = asne::load_csv(file, label_column);
  const Matrix sq_dists = asne::pairwise_sq_distances(dataset.data);
  const asne::BandwidthSet bandwidths = asne::calibrate_bandwidths(sq_dists, 20.0);
  asne::NeighborProbabilities input = asne::input_probabilities(sq_dists, bandwidths);

  const std::vector<double> grid = asne::default_alpha_grid();
  const int total = static_cast<int>(grid.size()) * repeats;
  std::vector<double> aucs(static_cast<std::size_t>(total), 0.0);

  const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  const int workers = static_cast<int>(std::min<unsigned>(hardware, 8));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (int index = next.fetch_add(1); index < total; index = next.fetch_add(1)) {
      try {
        const int a = index / repeats;
        const int r = index % repeats;
        asne::OptimizerConfig config;
        config.alpha = grid[static_cast<std::size_t>(a)];
        config.seed = base_seed + static_cast<std::uint64_t>(r);
        const asne::EmbedResult result = asne::run_embedding(input, config);
        aucs[static_cast<std::size_t>(index)] =
            asne::retrieval_auc(dataset.data, result.embedding.coords, 20, 100).auc;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result{grid, std::vector<double>(grid.size(), 0.0), std::move(input),
                     dataset.data, 0.0};
  for (std::size_t a = 0; a < grid.size(); ++a) {
    double sum = 0.0;
    for (int r = 0; r < repeats; ++r) {
      sum += aucs[a * static_cast<std::size_t>(repeats) + static_cast<std::size_t>(r)];
    }
    result.mean_aucs[a] = sum / static_cast<double>(repeats);
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::size_t argmax(const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

Outcome check_iris_sweep(const SweepResult& sweep) {
  const std::size_t best = argmax(sweep.mean_aucs);
  Outcome outcome;
  outcome.pass = sweep.mean_aucs[best] >= 0.85 && sweep.seconds < 600.0;
  outcome.detail = format("iris: best mean AUC %.4f at alpha %.2f over 20 repeats "
                          "(threshold 0.85, budget 600 s, took %.0f s)",
                          sweep.mean_aucs[best], sweep.grid[best], sweep.seconds);
  return outcome;
}

Outcome check_wine_sweep(const SweepResult& sweep) {
  const std::size_t best = argmax(sweep.mean_aucs);
  const double at_one = sweep.mean_aucs.back();  // grid ends exactly at 1.0
  const double gap = sweep.mean_aucs[best] - at_one;
  Outcome outcome;
  outcome.pass = gap >= 0.02 && sweep.seconds < 600.0;
  outcome.detail = format("wine: best mean AUC %.4f at alpha %.2f vs %.4f at alpha 1.0, "
                          "gap %.4f (threshold 0.02, budget 600 s, took %.0f s)",
                          sweep.mean_aucs[best], sweep.grid[best], at_one, gap,
                          sweep.seconds);
  return outcome;
}

struct SelectionOutcome {
  double selected = 0.0;
  double sweep_argmax = 0.0;
  double auc_at_selected = 0.0;
  double auc_max = 0.0;
  bool pass = false;
};

SelectionOutcome selection_vs_sweep(const SweepResult& sweep, std::uint64_t seed) {
  const auto embed = [&](double alpha) {
    asne::OptimizerConfig config;
    config.alpha = alpha;
    config.seed = seed;
    return asne::run_embedding(sweep.input, config).embedding;
  };
  const asne::EdaFit fit = asne::estimate_alpha(
      sweep.input, embed, sweep.grid, asne::EstimationMethod::kScoreMatching);

  SelectionOutcome outcome;
  outcome.selected = fit.selected_alpha;
  const std::size_t best = argmax(sweep.mean_aucs);
  outcome.sweep_argmax = sweep.grid[best];
  outcome.auc_max = sweep.mean_aucs[best];
  for (std::size_t i = 0; i < sweep.grid.size(); ++i) {
    if (sweep.grid[i] == fit.selected_alpha) {
      outcome.auc_at_selected = sweep.mean_aucs[i];
      break;
    }
  }
  outcome.pass = std::abs(outcome.selected - outcome.sweep_argmax) <= 0.2 + 1e-12 &&
                 outcome.auc_max - outcome.auc_at_selected <= 0.05 + 1e-12;
  return outcome;
}

Outcome check_selection(const std::optional<SweepResult>& iris,
                        const std::optional<SweepResult>& wine) {
  if (!iris || !wine) {
    return {false, "prerequisite sweep unavailable"};
  }
  const SelectionOutcome iris_sel = selection_vs_sweep(*iris, 1);
  const SelectionOutcome wine_sel = selection_vs_sweep(*wine, 1);
  Outcome outcome;
  outcome.pass = iris_sel.pass && wine_sel.pass;
  outcome.detail = format(
      "iris: selected %.2f vs argmax %.2f, AUC %.4f vs max %.4f; "
      "wine: selected %.2f vs argmax %.2f, AUC %.4f vs max %.4f "
      "(|diff| <= 0.2, AUC within 0.05)",
      iris_sel.selected, iris_sel.sweep_argmax, iris_sel.auc_at_selected,
      iris_sel.auc_max, wine_sel.selected, wine_sel.sweep_argmax,
      wine_sel.auc_at_selected, wine_sel.auc_max);
  return outcome;
}

// ---------------------------------------------------------------------------
// Check 10: retrieval AUC vs a from-scratch recomputation.

double brute_force_auc(const Matrix& input, const Matrix& output, int k_input,
                       int k_max) {
  const int n = static_cast<int>(input.rows());
  const auto ranked = [n](const Matrix& pts, int self) {
    std::vector<std::pair<double, int>> order;
    for (int j = 0; j < n; ++j) {
      if (j == self) continue;
      double dist = 0.0;
      for (Index c = 0; c < pts.cols(); ++c) {
        const double diff = pts(self, c) - pts(j, c);
        dist += diff * diff;
      }
      order.emplace_back(dist, j);
    }
    std::stable_sort(order.begin(), order.end());
    return order;
  };

  std::vector<std::vector<char>> relevant(
      static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i) {
    const auto order = ranked(input, i);
    for (int t = 0; t < k_input; ++t) {
      relevant[static_cast<std::size_t>(i)][static_cast<std::size_t>(order[t].second)] =
          1;
    }
  }
  std::vector<std::vector<int>> output_order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (const auto& entry : ranked(output, i)) {
      output_order[static_cast<std::size_t>(i)].push_back(entry.second);
    }
  }

  std::vector<std::pair<double, double>> points;
  for (int k = 1; k <= k_max; ++k) {
    double precision_sum = 0.0;
    double recall_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      int hits = 0;
      for (int t = 0; t < k; ++t) {
        hits += relevant[static_cast<std::size_t>(i)][static_cast<std::size_t>(
            output_order[static_cast<std::size_t>(i)][t])];
      }
      precision_sum += static_cast<double>(hits) / static_cast<double>(k);
      recall_sum += static_cast<double>(hits) / static_cast<double>(k_input);
    }
    points.emplace_back(recall_sum / n, precision_sum / n);
  }

  std::stable_sort(points.begin(), points.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<double, double>> path;
  path.emplace_back(0.0, points.front().second);
  path.insert(path.end(), points.begin(), points.end());
  path.emplace_back(1.0, points.back().second);
  double auc = 0.0;
  for (std::size_t t = 1; t < path.size(); ++t) {
    auc += (path[t].first - path[t - 1].first) * 0.5 *
           (path[t].second + path[t - 1].second);
  }
  return auc;
}

Outcome check_auc_oracle() {
  std::mt19937 rng(1010);
  int exact = 0;
  for (int instance = 0; instance < 20; ++instance) {
    const Matrix input = random_coords(30, 5, rng);
    const Matrix output = random_coords(30, 2, rng);
    const int k_input = 3 + (instance % 8);
    const int k_max = 29;
    const double library = asne::retrieval_auc(input, output, k_input, k_max).auc;
    const double oracle = brute_force_auc(input, output, k_input, k_max);
    if (library == oracle) ++exact;
  }
  Outcome outcome;
  outcome.pass = exact == 20;
  outcome.detail = format("%d/20 instances bit-identical to the brute-force AUC", exact);
  return outcome;
}

}  // namespace

int main() {
  std::printf("acceptance checks (library %s)\n", "asne_core");
  std::fflush(stdout);

  run_check(1, "analytic gradient matches central finite differences",
            check_gradient_finite_differences);
  run_check(2, "alpha limit cases collapse to the classic costs and gradients",
            check_limit_identities);
  run_check(3, "compatibility factors stay within [0, 1]", check_compatibility_bound);
  run_check(4, "binary retrieval model bound and ordering reversal", check_binary_model);
  run_check(5, "scale transform preserves the divergence", check_transform_equivalence);
  run_check(6, "density normalizer matches closed forms", check_normalizer_closed_forms);

  std::optional<SweepResult> iris;
  std::optional<SweepResult> wine;
  run_check(7, "iris sweep reaches the target retrieval quality", [&]() -> Outcome {
    iris = sweep_dataset(std::string(ASNE_DATA_DIR) + "/iris.csv", "species", 20, 1);
    return check_iris_sweep(*iris);
  });
  run_check(8, "wine sweep beats its alpha=1 baseline", [&]() -> Outcome {
    wine = sweep_dataset(std::string(ASNE_DATA_DIR) + "/wine.csv", "class", 20, 1);
    return check_wine_sweep(*wine);
  });
  run_check(9, "density-fit selection lands near the sweep optimum",
            [&] { return check_selection(iris, wine); });

  run_check(10, "retrieval AUC matches brute-force recomputation", check_auc_oracle);

  std::printf("%d of 10 checks passed\n", 10 - g_failures);
  return g_failures;
}
