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

#include "asne/divergence.hpp"
#include "asne/eda.hpp"
#include "asne/evaluation.hpp"
#include "asne/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace asne {

/// Files produced by a run, with the exact config they were produced under.
struct RunArtifacts {
  std::string embedding_path;
  std::string metrics_path;
  std::string curve_path;
  std::string config_snapshot;  // serialized JSON
  std::string created_at;       // ISO-8601 UTC
};

/// Everything save_metrics may serialize.  Absent optionals are omitted from
/// the file entirely (never written as null).  Key set:
///   auc, curve, alpha_grid, objectives, phis, alt_objectives, failed,
///   selected_alpha, method, repeat_aucs, final_cost, config.
/// For sweeps, `objectives` holds mean AUC per grid alpha; for estimation it
/// holds the fitted EDA objective (see metrics_from_fit).
struct MetricsRecord {
  std::optional<RetrievalCurve> curve;
  std::optional<std::vector<double>> alpha_grid;
  std::optional<std::vector<double>> objectives;
  std::optional<std::vector<double>> phis;
  std::optional<std::vector<double>> alt_objectives;
  std::optional<std::vector<int>> failed;
  std::optional<double> selected_alpha;
  std::optional<std::string> method;
  std::optional<std::vector<std::vector<double>>> repeat_aucs;  // per grid alpha
  std::optional<double> final_cost;
  std::string config_json = "{}";
};

/// Copies an EdaFit's grid/objectives/phis/selection into a record.
MetricsRecord metrics_from_fit(const EdaFit& fit);

/// Loads a rectangular numeric CSV.  A header row is auto-detected (any
/// non-numeric first row).  `label_column` selects the label column by
/// header name, or by zero-based index when it parses as an integer or the
/// file has no header; pass an empty string for no labels.  Label values are
/// mapped to dense integers 0..c-1 in first-appearance order.  Malformed
/// input (ragged rows, non-numeric feature cells, fewer than 2 data rows)
/// raises std::runtime_error naming the row/column.
Dataset load_csv(const std::string& path, const std::string& label_column = "");

/// Writes coordinates as CSV with header y1..yd[,label], shortest
/// round-trip decimals, one row per point.  Deterministic byte-for-byte.
void save_embedding(const Embedding& embedding, const std::vector<int>& labels,
                    const std::vector<std::string>& label_names, const std::string& path);

/// Reads an embedding written by save_embedding (header y1..yd[,label]).
Embedding load_embedding(const std::string& path);

/// Serializes a MetricsRecord as pretty-printed JSON.  Deterministic.
void save_metrics(const MetricsRecord& record, const std::string& path);

/// Parses a metrics file back into a record (curve points, grids, config).
MetricsRecord load_metrics(const std::string& path);

}  // namespace asne
