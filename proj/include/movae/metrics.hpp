// Copyright 2026 The MoVAE Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "movae/error.hpp"

namespace movae {

enum class MetricKind { pcc, rmse };

inline std::string_view metric_name(MetricKind k) { return k == MetricKind::pcc ? "pcc" : "rmse"; }

inline MetricKind parse_metric(std::string_view s) {
  if (s == "pcc") return MetricKind::pcc;
  if (s == "rmse") return MetricKind::rmse;
  throw ConfigError("unknown metric '" + std::string(s) + "' (expected pcc or rmse)");
}

/// Pearson correlation. Two-pass (center first), accumulated in double.
template <class T>
double pcc(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw DimensionError("pcc: length mismatch");
  if (a.size() < 2) throw ArgumentError("pcc: need at least 2 components");
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  bool a_const = true, b_const = true;
  for (std::size_t i = 0; i < n; ++i) {
    ma += static_cast<double>(a[i]);
    mb += static_cast<double>(b[i]);
    a_const = a_const && a[i] == a[0];
    b_const = b_const && b[i] == b[0];
  }
  // The mean of a constant vector can be off by an ulp; catch it exactly.
  if (a_const || b_const) throw DomainError("pcc: zero-variance input");
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = static_cast<double>(a[i]) - ma;
    const double db = static_cast<double>(b[i]) - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) throw DomainError("pcc: zero-variance input");
  const double r = sab / std::sqrt(saa * sbb);
  return std::clamp(r, -1.0, 1.0);
}

template <class T>
double rmse(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw DimensionError("rmse: length mismatch");
  if (a.empty()) throw ArgumentError("rmse: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(a.size()));
}

inline constexpr double kWorstPccDistance = 2.0;

/// pcc -> 1 - r in [0, 2], with degenerate (constant) inputs at 2; rmse as is.
template <class T>
double distance(std::span<const T> a, std::span<const T> b, MetricKind kind) {
  if (kind == MetricKind::rmse) return rmse(a, b);
  try {
    return 1.0 - pcc(a, b);
  } catch (const DomainError&) {
    return kWorstPccDistance;
  }
}

template <class Label>
double accuracy(std::span<const Label> predictions, std::span<const Label> truths) {
  if (predictions.size() != truths.size()) throw ArgumentError("accuracy: length mismatch");
  if (predictions.empty()) throw ArgumentError("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) hits += predictions[i] == truths[i];
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

template <class Label>
double accuracy(const std::vector<Label>& predictions, const std::vector<Label>& truths) {
  return accuracy(std::span<const Label>(predictions), std::span<const Label>(truths));
}

}  // namespace movae
