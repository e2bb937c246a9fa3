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

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace asne {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// A dataset: one row per sample, plus optional integer class labels
/// (dense 0..c-1) used only for plotting/reporting, never by the embedding.
struct Dataset {
  Matrix data;
  std::vector<int> labels;       // empty when the source had no label column
  std::vector<std::string> label_names;  // label_names[labels[i]] is the raw label
  std::string name;

  Index n() const { return data.rows(); }
  Index dim() const { return data.cols(); }
};

/// A low-dimensional embedding produced by the optimizer.
struct Embedding {
  Matrix coords;      // n x output_dim
  int iterations = 0; // iterations actually run
  std::uint64_t seed = 0;
};

}  // namespace asne
