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
#include "asne/pipeline.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>
#include <vector>

namespace {

// Attaches the flags shared by the dataset-consuming subcommands.
void add_common_options(CLI::App* cmd, asne::PipelineConfig& config, bool require_data) {
  auto* data = cmd->add_option("--data", config.data_path, "input CSV dataset");
  if (require_data) data->required();
  cmd->add_option("--labels-col", config.label_column,
                  "label column (header name or zero-based index)");
  cmd->add_option("--out-dir", config.out_dir, "artifact output directory")
      ->capture_default_str();
  cmd->add_option("--perplexity", config.perplexity, "neighborhood perplexity")
      ->capture_default_str();
  cmd->add_option("--k-input", config.k_input, "input-space neighborhood size")
      ->capture_default_str();
  cmd->add_option("--k-max", config.k_max, "largest retrieval size on the curve")
      ->capture_default_str();
  cmd->add_option("--seed", config.optimizer.seed, "base random seed")
      ->capture_default_str();
  cmd->add_option("--iters", config.optimizer.max_iters, "maximum optimizer iterations")
      ->capture_default_str();
  cmd->add_option("--learning-rate", config.optimizer.learning_rate,
                  "gradient descent learning rate")
      ->capture_default_str();
  cmd->add_option("--momentum-initial", config.optimizer.momentum_initial,
                  "momentum before the switch iteration")
      ->capture_default_str();
  cmd->add_option("--momentum-final", config.optimizer.momentum_final,
                  "momentum after the switch iteration")
      ->capture_default_str();
  cmd->add_option("--momentum-switch", config.optimizer.momentum_switch_iter,
                  "iteration at which momentum switches")
      ->capture_default_str();
  cmd->add_option("--jitter-std", config.optimizer.jitter_std,
                  "std of the early-iteration coordinate jitter")
      ->capture_default_str();
  cmd->add_option("--jitter-iters", config.optimizer.jitter_iters,
                  "number of jittered iterations")
      ->capture_default_str();
  cmd->add_option("--init-std", config.optimizer.init_std,
                  "std of the random initialization")
      ->capture_default_str();
  cmd->add_option("--output-dim", config.optimizer.output_dim, "embedding dimension")
      ->capture_default_str();
  cmd->add_option("--jobs", config.jobs, "parallel workers for sweeps")
      ->capture_default_str();
}

void add_grid_options(CLI::App* cmd, asne::PipelineConfig& config,
                      std::string& method_flag) {
  cmd->add_option("--alpha-grid", config.alpha_grid,
                  "comma-separated candidate alphas (default 0.05..1.0 step 0.05)")
      ->delimiter(',');
  cmd->add_option("--repeats", config.repeats,
                  "embeddings averaged per alpha (distinct seeds)")
      ->capture_default_str();
  cmd->add_option("--method", method_flag, "dispersion fit: sm or ml")
      ->check(CLI::IsMember({"sm", "ml"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alpha-divergence stochastic neighbor embedding toolkit"};
  app.require_subcommand(1);

  asne::PipelineConfig config;
  std::string method_flag = "sm";

  CLI::App* embed = app.add_subcommand("embed", "embed a dataset at a fixed alpha");
  add_common_options(embed, config, /*require_data=*/true);
  embed->add_option("--alpha", config.optimizer.alpha, "divergence parameter in [0, 1]")
      ->required();

  CLI::App* sweep =
      app.add_subcommand("sweep-alpha", "embed across an alpha grid and report mean AUCs");
  add_common_options(sweep, config, /*require_data=*/true);
  add_grid_options(sweep, config, method_flag);

  CLI::App* estimate = app.add_subcommand(
      "estimate-alpha", "select alpha by fitting the transformed density");
  add_common_options(estimate, config, /*require_data=*/true);
  add_grid_options(estimate, config, method_flag);

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "score a previously saved embedding");
  add_common_options(evaluate, config, /*require_data=*/true);
  evaluate->add_option("--embedding", config.embedding_path, "embedding CSV to score")
      ->required();

  CLI::App* curve =
      app.add_subcommand("curve", "re-emit plot-ready CSVs from a metrics file");
  curve->add_option("--metrics", config.metrics_path, "metrics JSON produced by a run")
      ->required();
  curve->add_option("--out-dir", config.out_dir, "artifact output directory")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  config.method = method_flag == "ml" ? asne::EstimationMethod::kMaxLikelihood
                                      : asne::EstimationMethod::kScoreMatching;

  try {
    if (embed->parsed()) {
      asne::cmd_embed(config);
    } else if (sweep->parsed()) {
      asne::cmd_sweep_alpha(config);
    } else if (estimate->parsed()) {
      asne::cmd_estimate_alpha(config);
    } else if (evaluate->parsed()) {
      asne::cmd_evaluate(config);
    } else if (curve->parsed()) {
      asne::cmd_curve(config);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
