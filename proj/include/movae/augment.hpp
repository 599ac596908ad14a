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
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "movae/error.hpp"
#include "movae/prng.hpp"
#include "movae/tensor.hpp"

namespace movae {

inline constexpr int kImageSide = 28;
inline constexpr int kImagePixels = kImageSide * kImageSide;

struct AugmentPolicy {
  double rotation_deg = 0.0;
  double shift_frac = 0.0;
  double shear = 0.0;
  double zoom_low = 1.0;
  double zoom_high = 1.0;
  bool hflip = false;

  static AugmentPolicy none() { return {}; }
  /// Rotations and small shifts.
  static AugmentPolicy mnist() { return {10.0, 0.1, 0.0, 1.0, 1.0, false}; }
  /// Horizontal flips and slight zoom.
  static AugmentPolicy fashion() { return {0.0, 0.0, 0.0, 0.9, 1.1, true}; }
  static AugmentPolicy omniglot() { return {20.0, 0.2, 0.2, 0.8, 1.2, false}; }

  static AugmentPolicy named(std::string_view name) {
    if (name == "none") return none();
    if (name == "mnist") return mnist();
    if (name == "fashion") return fashion();
    if (name == "omniglot") return omniglot();
    throw ConfigError("unknown augmentation policy '" + std::string(name) +
                      "' (expected none, mnist, fashion, omniglot)");
  }

  bool is_identity() const {
    return rotation_deg == 0.0 && shift_frac == 0.0 && shear == 0.0 && zoom_low == 1.0 &&
           zoom_high == 1.0 && !hflip;
  }

  void validate() const {
    if (!(rotation_deg >= 0)) throw ConfigError("augment: rotation_deg must be >= 0");
    if (!(shift_frac >= 0 && shift_frac < 1)) throw ConfigError("augment: shift_frac must be in [0, 1)");
    if (!(shear >= 0)) throw ConfigError("augment: shear must be >= 0");
    if (!(zoom_low > 0 && zoom_low <= zoom_high)) {
      throw ConfigError("augment: zoom range must satisfy 0 < low <= high");
    }
  }
};

/// Parameters drawn for one augmented image.
struct TransformParams {
  double rotation_deg = 0.0;
  double shear = 0.0;
  double zoom_x = 1.0;
  double zoom_y = 1.0;
  double shift_x = 0.0;  // pixels, positive moves content right
  double shift_y = 0.0;  // pixels, positive moves content down
  bool flip = false;
};

/// Maps output pixel coordinates (x = column, y = row) to input coordinates:
/// [x_in, y_in] = [[a, b, c], [d, e, f]] * [x_out, y_out, 1].
struct AffineTransform {
  std::array<double, 6> m{1, 0, 0, 0, 1, 0};

  static AffineTransform identity() { return {}; }

  static AffineTransform translation(double dx, double dy) { return {{1, 0, -dx, 0, 1, -dy}}; }

  static AffineTransform horizontal_flip(int side = kImageSide) {
    return {{-1, 0, static_cast<double>(side - 1), 0, 1, 0}};
  }

  /// Linear map `lin` (row-major 2x2, output -> input) about the image centre.
  static AffineTransform centered(const std::array<double, 4>& lin, double tx = 0, double ty = 0,
                                  int side = kImageSide) {
    const double c = (side - 1) / 2.0;
    // in - c = lin * (out - c) + t
    return {{lin[0], lin[1], c - lin[0] * c - lin[1] * c + tx,
             lin[2], lin[3], c - lin[2] * c - lin[3] * c + ty}};
  }

  /// (this after other): apply `other` to output coords first, then `this`.
  AffineTransform after(const AffineTransform& o) const {
    return {{m[0] * o.m[0] + m[1] * o.m[3], m[0] * o.m[1] + m[1] * o.m[4],
             m[0] * o.m[2] + m[1] * o.m[5] + m[2],
             m[3] * o.m[0] + m[4] * o.m[3], m[3] * o.m[1] + m[4] * o.m[4],
             m[3] * o.m[2] + m[4] * o.m[5] + m[5]}};
  }

  bool operator==(const AffineTransform&) const = default;
};

inline TransformParams sample_parameters(const AugmentPolicy& policy, Prng& prng,
                                         int side = kImageSide) {
  TransformParams p;
  // Every draw happens regardless of range so streams stay aligned across policies.
  p.rotation_deg = prng.uniform(-policy.rotation_deg, policy.rotation_deg);
  p.shear = prng.uniform(-policy.shear, policy.shear);
  p.zoom_x = prng.uniform(policy.zoom_low, policy.zoom_high);
  p.zoom_y = prng.uniform(policy.zoom_low, policy.zoom_high);
  p.shift_x = prng.uniform(-policy.shift_frac, policy.shift_frac) * side;
  p.shift_y = prng.uniform(-policy.shift_frac, policy.shift_frac) * side;
  p.flip = prng.bernoulli(0.5) && policy.hflip;
  return p;
}

/// rotate . shear . zoom . shift . flip, each acting on output coordinates.
inline AffineTransform to_transform(const TransformParams& p, int side = kImageSide) {
  const double theta = p.rotation_deg * 3.14159265358979323846 / 180.0;
  const double cs = std::cos(theta), sn = std::sin(theta);
  auto rot = AffineTransform::centered({cs, -sn, sn, cs}, 0, 0, side);
  auto shr = AffineTransform::centered({1, p.shear, 0, 1}, 0, 0, side);
  auto zoom = AffineTransform::centered({p.zoom_x, 0, 0, p.zoom_y}, 0, 0, side);
  auto shift = AffineTransform::translation(p.shift_x, p.shift_y);
  auto t = rot.after(shr).after(zoom).after(shift);
  if (p.flip) t = t.after(AffineTransform::horizontal_flip(side));
  return t;
}

inline AffineTransform sample_transform(const AugmentPolicy& policy, Prng& prng,
                                        int side = kImageSide) {
  return to_transform(sample_parameters(policy, prng, side), side);
}

/// Bilinear resampling of a square image; reads outside the image are 0.
template <class T>
std::vector<T> apply_transform(std::span<const T> image, const AffineTransform& t,
                               int side = kImageSide) {
  if (image.size() != static_cast<std::size_t>(side) * static_cast<std::size_t>(side)) {
    throw DimensionError("apply_transform: expected " + std::to_string(side * side) + " pixels, got " +
                         std::to_string(image.size()));
  }
  auto at = [&](int x, int y) -> double {
    if (x < 0 || y < 0 || x >= side || y >= side) return 0.0;
    return static_cast<double>(image[static_cast<std::size_t>(y * side + x)]);
  };
  std::vector<T> out(image.size());
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const double sx = t.m[0] * x + t.m[1] * y + t.m[2];
      const double sy = t.m[3] * x + t.m[4] * y + t.m[5];
      const double fx0 = std::floor(sx), fy0 = std::floor(sy);
      const int x0 = static_cast<int>(fx0), y0 = static_cast<int>(fy0);
      const double wx = sx - fx0, wy = sy - fy0;
      double v = (1 - wx) * (1 - wy) * at(x0, y0);
      if (wx > 0) v += wx * (1 - wy) * at(x0 + 1, y0);
      if (wy > 0) v += (1 - wx) * wy * at(x0, y0 + 1);
      if (wx > 0 && wy > 0) v += wx * wy * at(x0 + 1, y0 + 1);
      out[static_cast<std::size_t>(y * side + x)] = static_cast<T>(std::clamp(v, 0.0, 1.0));
    }
  }
  return out;
}

/// The originals followed by transformed copies of sources taken round-robin,
/// `target_count` rows in total.
inline Tensorf augment_pool(const Tensorf& images, const AugmentPolicy& policy,
                            std::size_t target_count, Prng& prng) {
  if (images.rows() == 0) throw ArgumentError("augment_pool: empty source set");
  policy.validate();
  const auto n = static_cast<std::size_t>(images.rows());
  if (target_count < n) {
    throw ArgumentError("augment_pool: target_count " + std::to_string(target_count) +
                        " is smaller than the source set (" + std::to_string(n) + ")");
  }
  require_width(images, kImagePixels, "augment_pool");
  Tensorf out(static_cast<Eigen::Index>(target_count), images.cols());
  out.topRows(images.rows()) = images;
  for (std::size_t j = n; j < target_count; ++j) {
    const auto src = static_cast<Eigen::Index>((j - n) % n);
    const auto t = sample_transform(policy, prng);
    const auto img = apply_transform(
        std::span<const float>(images.row(src).data(), static_cast<std::size_t>(images.cols())), t);
    std::copy(img.begin(), img.end(), out.row(static_cast<Eigen::Index>(j)).data());
  }
  return out;
}

}  // namespace movae
