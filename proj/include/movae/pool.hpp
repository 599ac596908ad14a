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

#include <cstddef>
#include <vector>

#include "movae/tensor.hpp"

namespace movae {

/// Unlabeled images plus a consumed flag per image. Consumed images are
/// never rescored or reselected.
struct UnlabeledPool {
  Tensorf images;
  std::vector<bool> consumed;

  UnlabeledPool() = default;
  explicit UnlabeledPool(Tensorf imgs)
      : images(std::move(imgs)), consumed(static_cast<std::size_t>(images.rows()), false) {}

  std::size_t size() const { return consumed.size(); }

  std::size_t remaining() const {
    std::size_t n = 0;
    for (bool c : consumed) n += !c;
    return n;
  }

  std::vector<std::size_t> unconsumed_indices() const {
    std::vector<std::size_t> out;
    out.reserve(remaining());
    for (std::size_t i = 0; i < consumed.size(); ++i) {
      if (!consumed[i]) out.push_back(i);
    }
    return out;
  }
};

}  // namespace movae
