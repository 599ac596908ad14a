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

#include "movae/augment.hpp"
#include "movae/baselines.hpp"
#include "movae/datasets.hpp"
#include "movae/dense.hpp"
#include "movae/error.hpp"
#include "movae/generalize.hpp"
#include "movae/metrics.hpp"
#include "movae/mixture.hpp"
#include "movae/pool.hpp"
#include "movae/prng.hpp"
#include "movae/rmsprop.hpp"
#include "movae/tensor.hpp"
#include "movae/vae.hpp"
