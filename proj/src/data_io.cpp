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
#include "asne/data_io.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <unordered_map>
#include <utility>
#include <vector>

namespace asne {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) {
    cells.push_back(trim(cell));
  }
  if (!line.empty() && line.back() == ',') {
    cells.push_back("");
  }
  return cells;
}

bool parse_double(const std::string& cell, double& out) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto result = std::from_chars(begin, end, out);
  return result.ec == std::errc() && result.ptr == end && !cell.empty();
}

bool parse_int(const std::string& cell, int& out) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto result = std::from_chars(begin, end, out);
  return result.ec == std::errc() && result.ptr == end && !cell.empty();
}

std::string shortest_decimal(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write to '" + path + "'");
  }
  return out;
}

ordered_json curve_to_json(const RetrievalCurve& curve) {
  ordered_json node;
  node["k_input"] = curve.k_input;
  node["k_max"] = curve.k_max;
  node["k_max_capped"] = curve.k_max_capped;
  ordered_json points = ordered_json::array();
  for (const auto& [recall, precision] : curve.points) {
    points.push_back(ordered_json::array({recall, precision}));
  }
  node["points"] = std::move(points);
  return node;
}

// Failed candidates are stored as NaN, which JSON renders as null; map the
// nulls back to NaN on the way in.
std::vector<double> doubles_or_nan(const ordered_json& arr) {
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& value : arr) {
    out.push_back(value.is_number() ? value.get<double>()
                                    : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

RetrievalCurve curve_from_json(const ordered_json& node, double auc) {
  RetrievalCurve curve;
  curve.k_input = node.at("k_input").get<int>();
  curve.k_max = node.at("k_max").get<int>();
  curve.k_max_capped = node.at("k_max_capped").get<bool>();
  for (const auto& point : node.at("points")) {
    curve.points.emplace_back(point.at(0).get<double>(), point.at(1).get<double>());
  }
  curve.auc = auc;
  return curve;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }

  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) {
    throw std::runtime_error("'" + path + "' is empty");
  }

  const std::size_t width = rows.front().size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw std::runtime_error("'" + path + "': row " + std::to_string(r + 1) + " has " +
                               std::to_string(rows[r].size()) + " cells, expected " +
                               std::to_string(width));
    }
  }

  // Header detection: a first row with any non-numeric cell is a header.
  bool has_header = false;
  for (const auto& cell : rows.front()) {
    double ignored;
    if (!parse_double(cell, ignored)) {
      has_header = true;
      break;
    }
  }
  std::vector<std::string> header;
  std::size_t first_data_row = 0;
  if (has_header) {
    header = rows.front();
    first_data_row = 1;
  }

  // Resolve the label column: by header name first, then as an index.
  int label_index = -1;
  if (!label_column.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == label_column) {
        label_index = static_cast<int>(c);
        break;
      }
    }
    if (label_index < 0) {
      int parsed = -1;
      if (parse_int(label_column, parsed) && parsed >= 0 &&
          parsed < static_cast<int>(width)) {
        label_index = parsed;
      } else {
        throw std::runtime_error("'" + path + "': no column named '" + label_column +
                                 "' and it is not a valid column index");
      }
    }
  }

  const std::size_t n = rows.size() - first_data_row;
  if (n < 2) {
    throw std::runtime_error("'" + path + "' has " + std::to_string(n) +
                             " data rows; at least 2 are required");
  }
  const std::size_t feature_count = (label_index >= 0) ? width - 1 : width;
  if (feature_count == 0) {
    throw std::runtime_error("'" + path + "' has no feature columns");
  }

  Dataset dataset;
  dataset.name = path;
  dataset.data.resize(static_cast<Index>(n), static_cast<Index>(feature_count));
  std::unordered_map<std::string, int> label_ids;
  for (std::size_t r = 0; r < n; ++r) {
    const auto& cells = rows[r + first_data_row];
    Index feature = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (static_cast<int>(c) == label_index) {
        const std::string& raw = cells[c];
        auto [it, inserted] = label_ids.emplace(raw, static_cast<int>(label_ids.size()));
        if (inserted) dataset.label_names.push_back(raw);
        dataset.labels.push_back(it->second);
        continue;
      }
      double value;
      if (!parse_double(cells[c], value)) {
        throw std::runtime_error("'" + path + "': row " +
                                 std::to_string(r + first_data_row + 1) + ", column " +
                                 std::to_string(c + 1) + ": '" + cells[c] +
                                 "' is not numeric");
      }
      dataset.data(static_cast<Index>(r), feature++) = value;
    }
  }
  return dataset;
}

void save_embedding(const Embedding& embedding, const std::vector<int>& labels,
                    const std::vector<std::string>& label_names, const std::string& path) {
  const Index n = embedding.coords.rows();
  const Index d = embedding.coords.cols();
  if (!labels.empty() && static_cast<Index>(labels.size()) != n) {
    throw std::invalid_argument("label count " + std::to_string(labels.size()) +
                                " does not match point count " + std::to_string(n));
  }
  std::ofstream out = open_for_write(path);
  for (Index c = 0; c < d; ++c) {
    out << (c ? "," : "") << "y" << (c + 1);
  }
  if (!labels.empty()) out << ",label";
  out << "\n";
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < d; ++c) {
      out << (c ? "," : "") << shortest_decimal(embedding.coords(i, c));
    }
    if (!labels.empty()) {
      const int id = labels[static_cast<std::size_t>(i)];
      if (!label_names.empty()) {
        out << "," << label_names.at(static_cast<std::size_t>(id));
      } else {
        out << "," << id;
      }
    }
    out << "\n";
  }
  if (!out) {
    throw std::runtime_error("failed while writing '" + path + "'");
  }
}

Embedding load_embedding(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }
  std::string header_line;
  std::getline(in, header_line);
  const auto header = split_csv_line(header_line);
  const bool labeled = !header.empty() && header.back() == "label";
  const Dataset parsed = load_csv(path, labeled ? "label" : "");
  Embedding embedding;
  embedding.coords = parsed.data;
  return embedding;
}

MetricsRecord metrics_from_fit(const EdaFit& fit) {
  MetricsRecord record;
  record.alpha_grid = fit.grid;
  record.objectives = fit.objectives;
  record.phis = fit.phis;
  record.alt_objectives = fit.alt_objectives;
  record.failed = std::vector<int>(fit.failed.begin(), fit.failed.end());
  record.selected_alpha = fit.selected_alpha;
  record.method = fit.method == EstimationMethod::kScoreMatching ? "score_matching"
                                                                 : "max_likelihood";
  return record;
}

void save_metrics(const MetricsRecord& record, const std::string& path) {
  ordered_json doc;
  if (record.curve) {
    doc["auc"] = record.curve->auc;
    doc["curve"] = curve_to_json(*record.curve);
  }
  if (record.alpha_grid) doc["alpha_grid"] = *record.alpha_grid;
  if (record.objectives) doc["objectives"] = *record.objectives;
  if (record.phis) doc["phis"] = *record.phis;
  if (record.alt_objectives) doc["alt_objectives"] = *record.alt_objectives;
  if (record.failed) doc["failed"] = *record.failed;
  if (record.selected_alpha) doc["selected_alpha"] = *record.selected_alpha;
  if (record.method) doc["method"] = *record.method;
  if (record.repeat_aucs) doc["repeat_aucs"] = *record.repeat_aucs;
  if (record.final_cost) doc["final_cost"] = *record.final_cost;
  doc["config"] = ordered_json::parse(record.config_json);

  std::ofstream out = open_for_write(path);
  out << doc.dump(2) << "\n";
  if (!out) {
    throw std::runtime_error("failed while writing '" + path + "'");
  }
}

MetricsRecord load_metrics(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }
  ordered_json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("'" + path + "' is not valid metrics JSON: " + e.what());
  }

  MetricsRecord record;
  if (doc.contains("curve")) {
    record.curve = curve_from_json(doc.at("curve"), doc.at("auc").get<double>());
  }
  if (doc.contains("alpha_grid")) {
    record.alpha_grid = doc.at("alpha_grid").get<std::vector<double>>();
  }
  if (doc.contains("objectives")) record.objectives = doubles_or_nan(doc.at("objectives"));
  if (doc.contains("phis")) record.phis = doubles_or_nan(doc.at("phis"));
  if (doc.contains("alt_objectives")) {
    record.alt_objectives = doubles_or_nan(doc.at("alt_objectives"));
  }
  if (doc.contains("failed")) record.failed = doc.at("failed").get<std::vector<int>>();
  if (doc.contains("selected_alpha")) {
    record.selected_alpha = doc.at("selected_alpha").get<double>();
  }
  if (doc.contains("method")) record.method = doc.at("method").get<std::string>();
  if (doc.contains("repeat_aucs")) {
    record.repeat_aucs = doc.at("repeat_aucs").get<std::vector<std::vector<double>>>();
  }
  if (doc.contains("final_cost")) {
    record.final_cost = doc.at("final_cost").get<double>();
  }
  if (doc.contains("config")) {
    record.config_json = doc.at("config").dump();
  }
  return record;
}

}  // namespace asne
