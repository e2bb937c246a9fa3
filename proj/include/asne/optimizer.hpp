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
#include "asne/divergence.hpp"
#include "asne/types.hpp"

#include <cstdint>
#include <vector>

namespace asne {

/// Knobs for the momentum gradient descent.  Defaults follow the usual SNE
/// recipe; validate() throws std::invalid_argument on out-of-range values.
struct OptimizerConfig {
  double alpha = 1.0;              // divergence parameter, in [0, 1]
  int output_dim = 2;
  double learning_rate = 0.2;      // stable across alpha for unit-kernel rows
  double momentum_initial = 0.5;
  double momentum_final = 0.8;
  int momentum_switch_iter = 250;  // iterations before momentum_final kicks in
  int max_iters = 1000;
  double jitter_std = 0.3;         // Gaussian noise added to early updates
  int jitter_iters = 50;           // iterations with jitter (0 disables)
  double init_std = 1e-4;          // std of the random initial coordinates
  std::uint64_t seed = 0;
  int max_step_retries = 10;       // learning-rate halvings before giving up
  double convergence_tol = 1e-6;   // relative cost change over the window
  int convergence_window = 50;

  void validate() const;
};

/// Outcome of a full optimization run.
struct EmbedResult {
  Embedding embedding;
  std::vector<double> cost_trace;  // cost after every accepted iteration
  double final_cost = 0.0;
  bool converged = false;          // relative-change criterion met
};

/// Draws the n x output_dim starting coordinates from N(0, init_std^2),
/// deterministically from config.seed.
Embedding init_embedding(Index n, const OptimizerConfig& config);

/// Minimizes the alpha-divergence cost of `input` by momentum gradient
/// descent with jittered early iterations.  Steps that produce non-finite
/// or degenerate coordinates (overflowing kernel rows) or a non-finite cost
/// halve the learning rate and retry (up to max_step_retries per step, after
/// which a std::runtime_error reports the iteration).  Deterministic for a
/// fixed config.
EmbedResult run_embedding(const NeighborProbabilities& input,
                          const OptimizerConfig& config);

}  // namespace asne
