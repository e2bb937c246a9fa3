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
#include "asne/optimizer.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace asne {

void OptimizerConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  if (output_dim < 1) {
    throw std::invalid_argument("output_dim must be positive, got " +
                                std::to_string(output_dim));
  }
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("learning_rate must be positive, got " +
                                std::to_string(learning_rate));
  }
  if (!(momentum_initial >= 0.0 && momentum_initial < 1.0) ||
      !(momentum_final >= 0.0 && momentum_final < 1.0)) {
    throw std::invalid_argument("momentum values must lie in [0, 1)");
  }
  if (max_iters < 1) {
    throw std::invalid_argument("max_iters must be positive, got " +
                                std::to_string(max_iters));
  }
  if (momentum_switch_iter < 0 || jitter_iters < 0 || max_step_retries < 0 ||
      convergence_window < 1) {
    throw std::invalid_argument("iteration counts must be non-negative");
  }
  if (!(jitter_std >= 0.0) || !(init_std > 0.0)) {
    throw std::invalid_argument("jitter_std must be >= 0 and init_std > 0");
  }
  if (!(convergence_tol > 0.0)) {
    throw std::invalid_argument("convergence_tol must be positive");
  }
}

Embedding init_embedding(Index n, const OptimizerConfig& config) {
  config.validate();
  if (n < 2) {
    throw std::invalid_argument("need at least two points to embed, got " +
                                std::to_string(n));
  }
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, config.init_std);
  Embedding embedding;
  embedding.seed = config.seed;
  embedding.coords.resize(n, config.output_dim);
  for (Index i = 0; i < n; ++i) {
    for (Index d = 0; d < config.output_dim; ++d) {
      embedding.coords(i, d) = gauss(rng);
    }
  }
  return embedding;
}

EmbedResult run_embedding(const NeighborProbabilities& input,
                          const OptimizerConfig& config) {
  config.validate();
  const Index n = input.size();

  const AsneObjective objective(input, config.alpha);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> init_gauss(0.0, config.init_std);
  std::normal_distribution<double> jitter_gauss(0.0, config.jitter_std);

  EmbedResult result;
  result.embedding.seed = config.seed;
  Matrix coords(n, config.output_dim);
  for (Index i = 0; i < n; ++i) {
    for (Index d = 0; d < config.output_dim; ++d) {
      coords(i, d) = init_gauss(rng);
    }
  }

  Matrix velocity = Matrix::Zero(n, config.output_dim);
  Matrix jitter = Matrix::Zero(n, config.output_dim);
  double learning_rate = config.learning_rate;
  result.cost_trace.reserve(static_cast<std::size_t>(config.max_iters));

  NeighborProbabilities output = output_probabilities(coords);
  int iters_run = 0;
  for (int iter = 0; iter < config.max_iters; ++iter) {
    const double momentum = (iter < config.momentum_switch_iter)
                                ? config.momentum_initial
                                : config.momentum_final;
    const bool jitter_on = iter < config.jitter_iters && config.jitter_std > 0.0;
    if (jitter_on) {
      for (Index i = 0; i < n; ++i) {
        for (Index d = 0; d < config.output_dim; ++d) {
          jitter(i, d) = jitter_gauss(rng);
        }
      }
    }

    const Matrix gradient = objective.gradient(output, coords);
    bool accepted = false;
    for (int attempt = 0; attempt <= config.max_step_retries; ++attempt) {
      Matrix step = momentum * velocity - learning_rate * gradient;
      Matrix candidate = coords + step;
      if (jitter_on) candidate += jitter;
      if (candidate.allFinite()) {
        // Finite coordinates can still be extreme enough to overflow the
        // squared distances and poison the kernel rows; that validation
        // failure is just another form of divergence and belongs in the
        // retry path.
        try {
          NeighborProbabilities cand_output = output_probabilities(candidate);
          const double cand_cost = objective.cost(cand_output).total;
          if (std::isfinite(cand_cost)) {
            coords = std::move(candidate);
            velocity = std::move(step);
            output = std::move(cand_output);
            result.cost_trace.push_back(cand_cost);
            accepted = true;
            break;
          }
        } catch (const std::invalid_argument&) {
        }
      }
      // Divergence: the step blew up numerically.  Halve the rate (the
      // halved value persists for the rest of the run) and try again.
      learning_rate *= 0.5;
    }
    if (!accepted) {
      throw std::runtime_error(
          "optimization diverged at iteration " + std::to_string(iter) + ": step stayed " +
          "non-finite after " + std::to_string(config.max_step_retries) +
          " learning-rate halvings");
    }
    iters_run = iter + 1;

    // Converged when the relative cost change across the trailing window is
    // negligible; only meaningful once the jitter phase is over.
    const std::size_t window = static_cast<std::size_t>(config.convergence_window);
    if (iter >= config.jitter_iters && result.cost_trace.size() > window) {
      const double past = result.cost_trace[result.cost_trace.size() - 1 - window];
      const double present = result.cost_trace.back();
      const double denom = std::max(std::abs(past), 1e-300);
      if (std::abs(past - present) / denom < config.convergence_tol) {
        result.converged = true;
        break;
      }
    }
  }

  result.embedding.coords = std::move(coords);
  result.embedding.iterations = iters_run;
  result.final_cost = result.cost_trace.back();
  return result;
}

}  // namespace asne
