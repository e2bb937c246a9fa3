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

#include "asne/evaluation.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>

namespace asne {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buffer;
}

// Runs `fn` and prefixes any escaping error with the pipeline stage name.
template <typename F>
auto with_stage(const char* stage, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(stage) + ": " + e.what());
  }
}

std::vector<double> grid_or_default(const PipelineConfig& config) {
  return config.alpha_grid.empty() ? default_alpha_grid() : config.alpha_grid;
}

std::string method_name(EstimationMethod method) {
  return method == EstimationMethod::kScoreMatching ? "sm" : "ml";
}

// Everything produced by one embedding run that the sweeps aggregate.
struct RunOutcome {
  double auc = 0.0;
  double final_cost = 0.0;
  bool converged = false;
  RetrievalCurve curve;
  Embedding embedding;
};

RunOutcome run_once(const Dataset& dataset, const NeighborProbabilities& input,
                    const PipelineConfig& config, double alpha, std::uint64_t seed) {
  OptimizerConfig opt = config.optimizer;
  opt.alpha = alpha;
  opt.seed = seed;
  EmbedResult result = with_stage("optimize", [&] { return run_embedding(input, opt); });
  RunOutcome outcome;
  outcome.curve = with_stage("evaluate", [&] {
    return retrieval_auc(dataset.data, result.embedding.coords, config.k_input,
                         config.k_max);
  });
  outcome.auc = outcome.curve.auc;
  outcome.final_cost = result.final_cost;
  outcome.converged = result.converged;
  outcome.embedding = std::move(result.embedding);
  return outcome;
}

// Runs tasks 0..count-1 on min(jobs, count) workers; results keyed by index
// so the outcome is independent of scheduling.
void run_indexed(int count, int jobs, const std::function<void(int)>& task) {
  const int workers = std::max(1, std::min(jobs, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& thread : pool) thread.join();
  if (failure) std::rethrow_exception(failure);
}

void write_retrieval_curve_csv(const RetrievalCurve& curve, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write to '" + path + "'");
  out << "k,recall,precision\n";
  for (std::size_t k = 0; k < curve.points.size(); ++k) {
    out << (k + 1) << "," << curve.points[k].first << "," << curve.points[k].second
        << "\n";
  }
}

void write_alpha_table_csv(const std::vector<double>& grid,
                           const std::vector<double>& values, const char* value_name,
                           const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write to '" + path + "'");
  out << "alpha," << value_name << "\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << grid[i] << "," << values[i] << "\n";
  }
}

struct ArtifactPaths {
  std::string embedding;
  std::string metrics;
  std::string curve;
};

ArtifactPaths prepare_out_dir(const PipelineConfig& config) {
  std::filesystem::create_directories(config.out_dir);
  const std::filesystem::path dir(config.out_dir);
  return {(dir / "embedding.csv").string(), (dir / "metrics.json").string(),
          (dir / "curve.csv").string()};
}

RunArtifacts make_artifacts(const ArtifactPaths& paths, const std::string& config_json) {
  RunArtifacts artifacts;
  artifacts.embedding_path = paths.embedding;
  artifacts.metrics_path = paths.metrics;
  artifacts.curve_path = paths.curve;
  artifacts.config_snapshot = config_json;
  artifacts.created_at = utc_timestamp();
  return artifacts;
}

}  // namespace

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  grid.reserve(20);
  for (int i = 1; i <= 20; ++i) {
    grid.push_back(static_cast<double>(i) / 20.0);
  }
  return grid;
}

std::string config_to_json(const PipelineConfig& config, const std::string& subcommand) {
  ordered_json doc;
  doc["subcommand"] = subcommand;
  doc["data"] = config.data_path;
  doc["labels_col"] = config.label_column;
  doc["out_dir"] = config.out_dir;
  if (!config.embedding_path.empty()) doc["embedding"] = config.embedding_path;
  if (!config.metrics_path.empty()) doc["metrics"] = config.metrics_path;
  doc["perplexity"] = config.perplexity;
  doc["k_input"] = config.k_input;
  doc["k_max"] = config.k_max;
  doc["alpha_grid"] = grid_or_default(config);
  doc["repeats"] = config.repeats;
  doc["jobs"] = config.jobs;
  doc["method"] = config.method == EstimationMethod::kScoreMatching ? "score_matching"
                                                                    : "max_likelihood";
  ordered_json opt;
  opt["alpha"] = config.optimizer.alpha;
  opt["output_dim"] = config.optimizer.output_dim;
  opt["learning_rate"] = config.optimizer.learning_rate;
  opt["momentum_initial"] = config.optimizer.momentum_initial;
  opt["momentum_final"] = config.optimizer.momentum_final;
  opt["momentum_switch_iter"] = config.optimizer.momentum_switch_iter;
  opt["max_iters"] = config.optimizer.max_iters;
  opt["jitter_std"] = config.optimizer.jitter_std;
  opt["jitter_iters"] = config.optimizer.jitter_iters;
  opt["init_std"] = config.optimizer.init_std;
  opt["seed"] = config.optimizer.seed;
  opt["max_step_retries"] = config.optimizer.max_step_retries;
  opt["convergence_tol"] = config.optimizer.convergence_tol;
  opt["convergence_window"] = config.optimizer.convergence_window;
  doc["optimizer"] = std::move(opt);
  return doc.dump();
}

NeighborProbabilities input_affinities(const Dataset& dataset, double perplexity) {
  return with_stage("affinity", [&] {
    const Matrix sq_dists = pairwise_sq_distances(dataset.data);
    const BandwidthSet bandwidths = calibrate_bandwidths(sq_dists, perplexity);
    for (const auto& warning : bandwidths.warnings) {
      std::cerr << "warning: " << warning << "\n";
    }
    return input_probabilities(sq_dists, bandwidths);
  });
}

RunArtifacts cmd_embed(const PipelineConfig& config) {
  const Dataset dataset =
      with_stage("load", [&] { return load_csv(config.data_path, config.label_column); });
  const NeighborProbabilities input = input_affinities(dataset, config.perplexity);
  const RunOutcome outcome =
      run_once(dataset, input, config, config.optimizer.alpha, config.optimizer.seed);

  const ArtifactPaths paths = prepare_out_dir(config);
  const std::string config_json = config_to_json(config, "embed");
  with_stage("save", [&] {
    save_embedding(outcome.embedding, dataset.labels, dataset.label_names,
                   paths.embedding);
    MetricsRecord record;
    record.curve = outcome.curve;
    record.final_cost = outcome.final_cost;
    record.config_json = config_json;
    save_metrics(record, paths.metrics);
    write_retrieval_curve_csv(outcome.curve, paths.curve);
    return 0;
  });

  std::cout << "embedded " << dataset.n() << " points at alpha = " << config.optimizer.alpha
            << ": AUC = " << outcome.auc << ", final cost = " << outcome.final_cost
            << (outcome.converged ? " (converged)" : "") << "\n";
  std::cout << "RESULT cmd=embed alpha=" << config.optimizer.alpha
            << " seed=" << config.optimizer.seed << " auc=" << outcome.auc
            << " final_cost=" << outcome.final_cost
            << " converged=" << (outcome.converged ? 1 : 0)
            << " metrics=" << paths.metrics << "\n";
  return make_artifacts(paths, config_json);
}

RunArtifacts cmd_sweep_alpha(const PipelineConfig& config) {
  const Dataset dataset =
      with_stage("load", [&] { return load_csv(config.data_path, config.label_column); });
  const NeighborProbabilities input = input_affinities(dataset, config.perplexity);
  const std::vector<double> grid = grid_or_default(config);
  const int repeats = std::max(1, config.repeats);
  const int total = static_cast<int>(grid.size()) * repeats;

  std::vector<RunOutcome> outcomes(static_cast<std::size_t>(total));
  run_indexed(total, config.jobs, [&](int index) {
    const int a = index / repeats;
    const int r = index % repeats;
    outcomes[static_cast<std::size_t>(index)] =
        run_once(dataset, input, config, grid[static_cast<std::size_t>(a)],
                 config.optimizer.seed + static_cast<std::uint64_t>(r));
  });

  std::vector<double> mean_aucs(grid.size(), 0.0);
  std::vector<std::vector<double>> repeat_aucs(grid.size());
  for (std::size_t a = 0; a < grid.size(); ++a) {
    auto& per_alpha = repeat_aucs[a];
    per_alpha.reserve(static_cast<std::size_t>(repeats));
    for (int r = 0; r < repeats; ++r) {
      per_alpha.push_back(outcomes[a * static_cast<std::size_t>(repeats) +
                                   static_cast<std::size_t>(r)].auc);
    }
    double sum = 0.0;
    for (double v : per_alpha) sum += v;
    mean_aucs[a] = sum / static_cast<double>(repeats);
  }

  std::size_t best_alpha_idx = 0;
  for (std::size_t a = 1; a < grid.size(); ++a) {
    if (mean_aucs[a] > mean_aucs[best_alpha_idx]) best_alpha_idx = a;
  }
  // Representative artifacts: the best single repeat at the winning alpha.
  std::size_t best_run = best_alpha_idx * static_cast<std::size_t>(repeats);
  for (int r = 1; r < repeats; ++r) {
    const std::size_t candidate =
        best_alpha_idx * static_cast<std::size_t>(repeats) + static_cast<std::size_t>(r);
    if (outcomes[candidate].auc > outcomes[best_run].auc) best_run = candidate;
  }

  const ArtifactPaths paths = prepare_out_dir(config);
  const std::string config_json = config_to_json(config, "sweep-alpha");
  with_stage("save", [&] {
    save_embedding(outcomes[best_run].embedding, dataset.labels, dataset.label_names,
                   paths.embedding);
    MetricsRecord record;
    record.curve = outcomes[best_run].curve;
    record.alpha_grid = grid;
    record.objectives = mean_aucs;
    record.selected_alpha = grid[best_alpha_idx];
    record.repeat_aucs = repeat_aucs;
    record.final_cost = outcomes[best_run].final_cost;
    record.config_json = config_json;
    save_metrics(record, paths.metrics);
    write_alpha_table_csv(grid, mean_aucs, "mean_auc", paths.curve);
    return 0;
  });

  std::cout << "alpha sweep over " << grid.size() << " candidates x " << repeats
            << " repeats:\n";
  for (std::size_t a = 0; a < grid.size(); ++a) {
    std::cout << "  alpha = " << grid[a] << ": mean AUC = " << mean_aucs[a]
              << (a == best_alpha_idx ? "  <-- best" : "") << "\n";
  }
  std::cout << "RESULT cmd=sweep-alpha best_alpha=" << grid[best_alpha_idx]
            << " best_mean_auc=" << mean_aucs[best_alpha_idx] << " repeats=" << repeats
            << " grid_size=" << grid.size() << " metrics=" << paths.metrics << "\n";
  return make_artifacts(paths, config_json);
}

RunArtifacts cmd_estimate_alpha(const PipelineConfig& config) {
  const Dataset dataset =
      with_stage("load", [&] { return load_csv(config.data_path, config.label_column); });
  const NeighborProbabilities input = input_affinities(dataset, config.perplexity);
  const std::vector<double> grid = grid_or_default(config);

  const auto embed = [&](double alpha) {
    OptimizerConfig opt = config.optimizer;
    opt.alpha = alpha;
    return run_embedding(input, opt).embedding;
  };
  const EdaFit fit = with_stage(
      "estimate", [&] { return estimate_alpha(input, embed, grid, config.method); });

  // Score the selection the same way the sweep would: repeats runs with
  // paired seeds, mean AUC.
  const int repeats = std::max(1, config.repeats);
  std::vector<RunOutcome> outcomes(static_cast<std::size_t>(repeats));
  run_indexed(repeats, config.jobs, [&](int r) {
    outcomes[static_cast<std::size_t>(r)] =
        run_once(dataset, input, config, fit.selected_alpha,
                 config.optimizer.seed + static_cast<std::uint64_t>(r));
  });
  double mean_auc = 0.0;
  std::vector<double> aucs;
  aucs.reserve(outcomes.size());
  for (const auto& outcome : outcomes) {
    mean_auc += outcome.auc;
    aucs.push_back(outcome.auc);
  }
  mean_auc /= static_cast<double>(repeats);

  const ArtifactPaths paths = prepare_out_dir(config);
  const std::string config_json = config_to_json(config, "estimate-alpha");
  with_stage("save", [&] {
    save_embedding(outcomes.front().embedding, dataset.labels, dataset.label_names,
                   paths.embedding);
    MetricsRecord record = metrics_from_fit(fit);
    record.curve = outcomes.front().curve;
    record.repeat_aucs = std::vector<std::vector<double>>{aucs};
    record.final_cost = outcomes.front().final_cost;
    record.config_json = config_json;
    save_metrics(record, paths.metrics);
    write_alpha_table_csv(grid, fit.objectives, "objective", paths.curve);
    return 0;
  });

  std::cout << "density fit (" << method_name(config.method) << ") selected alpha = "
            << fit.selected_alpha << "; mean AUC over " << repeats
            << " repeats = " << mean_auc << "\n";
  std::cout << "RESULT cmd=estimate-alpha selected_alpha=" << fit.selected_alpha
            << " method=" << method_name(config.method) << " mean_auc=" << mean_auc
            << " metrics=" << paths.metrics << "\n";
  return make_artifacts(paths, config_json);
}

RunArtifacts cmd_evaluate(const PipelineConfig& config) {
  const Dataset dataset =
      with_stage("load", [&] { return load_csv(config.data_path, config.label_column); });
  const Embedding embedding =
      with_stage("load", [&] { return load_embedding(config.embedding_path); });
  if (embedding.coords.rows() != dataset.n()) {
    throw std::runtime_error("evaluate: dataset has " + std::to_string(dataset.n()) +
                             " points but embedding has " +
                             std::to_string(embedding.coords.rows()));
  }
  const RetrievalCurve curve = with_stage("evaluate", [&] {
    return retrieval_auc(dataset.data, embedding.coords, config.k_input, config.k_max);
  });

  const ArtifactPaths paths = prepare_out_dir(config);
  const std::string config_json = config_to_json(config, "evaluate");
  with_stage("save", [&] {
    MetricsRecord record;
    record.curve = curve;
    record.config_json = config_json;
    save_metrics(record, paths.metrics);
    write_retrieval_curve_csv(curve, paths.curve);
    return 0;
  });

  std::cout << "evaluated " << dataset.n() << " points: AUC = " << curve.auc << "\n";
  std::cout << "RESULT cmd=evaluate auc=" << curve.auc << " n=" << dataset.n()
            << " metrics=" << paths.metrics << "\n";
  return make_artifacts(paths, config_json);
}

RunArtifacts cmd_curve(const PipelineConfig& config) {
  const MetricsRecord record =
      with_stage("load", [&] { return load_metrics(config.metrics_path); });
  if (!record.curve && !record.alpha_grid) {
    throw std::runtime_error("curve: '" + config.metrics_path +
                             "' contains neither a retrieval curve nor an alpha grid");
  }

  std::filesystem::create_directories(config.out_dir);
  const std::filesystem::path dir(config.out_dir);
  ArtifactPaths paths;
  paths.metrics = config.metrics_path;
  int files = 0;
  with_stage("save", [&] {
    if (record.curve) {
      paths.curve = (dir / "curve.csv").string();
      write_retrieval_curve_csv(*record.curve, paths.curve);
      ++files;
    }
    if (record.alpha_grid && record.objectives) {
      const std::string table_path = (dir / "alpha_table.csv").string();
      write_alpha_table_csv(*record.alpha_grid, *record.objectives, "objective",
                            table_path);
      if (paths.curve.empty()) paths.curve = table_path;
      ++files;
    }
    return 0;
  });

  std::cout << "re-emitted " << files << " curve file(s) from " << config.metrics_path
            << "\n";
  std::cout << "RESULT cmd=curve files=" << files << " out_dir=" << config.out_dir << "\n";
  RunArtifacts artifacts = make_artifacts(paths, record.config_json);
  return artifacts;
}

}  // namespace asne
