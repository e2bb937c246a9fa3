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

#include "asne/data_io.hpp"
#include "asne/eda.hpp"
#include "asne/optimizer.hpp"
#include "asne/types.hpp"

#include <string>
#include <vector>

namespace asne {

/// Full configuration of a run; every field maps 1:1 to a CLI flag.
struct PipelineConfig {
  std::string data_path;
  std::string label_column;
  std::string out_dir = "asne-out";
  std::string embedding_path;  // evaluate: previously saved embedding
  std::string metrics_path;    // curve: previously saved metrics
  double perplexity = 20.0;
  int k_input = 20;
  int k_max = 100;
  std::vector<double> alpha_grid;  // empty -> default_alpha_grid()
  int repeats = 5;
  int jobs = 1;
  EstimationMethod method = EstimationMethod::kScoreMatching;
  OptimizerConfig optimizer;
};

/// {0.05, 0.10, ..., 1.00}; the 1.0 endpoint is exact.
std::vector<double> default_alpha_grid();

/// Serialized config snapshot (JSON) stored inside every metrics file.
std::string config_to_json(const PipelineConfig& config, const std::string& subcommand);

/// Dataset loading + affinity calibration shared by every subcommand;
/// bandwidth warnings go to stderr.
NeighborProbabilities input_affinities(const Dataset& dataset, double perplexity);

/// Single embedding run at config.optimizer.alpha: saves embedding.csv,
/// curve.csv, metrics.json under out_dir; prints a RESULT line.
RunArtifacts cmd_embed(const PipelineConfig& config);

/// Embeds `repeats` times per grid alpha (seeds seed, seed+1, ...), averages
/// the retrieval AUC per alpha, and reports the argmax; artifacts cover the
/// best single run at the winning alpha.
RunArtifacts cmd_sweep_alpha(const PipelineConfig& config);

/// Density-based alpha selection: fits the transformed (P, Q) pair per grid
/// alpha, then embeds `repeats` times at the selected alpha for its AUC.
RunArtifacts cmd_estimate_alpha(const PipelineConfig& config);

/// Scores a previously saved embedding against the dataset's input
/// neighborhoods.
RunArtifacts cmd_evaluate(const PipelineConfig& config);

/// Re-emits plot-ready CSV files (retrieval curve and/or alpha-objective
/// table) from a saved metrics file.
RunArtifacts cmd_curve(const PipelineConfig& config);

}  // namespace asne
