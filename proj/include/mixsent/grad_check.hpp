// Copyright 2026 The mixsent Authors. All Rights Reserved.
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

#ifndef MIXSENT_GRAD_CHECK_HPP
#define MIXSENT_GRAD_CHECK_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mixsent/tensor.hpp"

namespace mixsent {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  bool finite = true;  // false when either side produced NaN/Inf
  std::string message;

  bool passed(double tolerance) const { return finite && max_rel_error <= tolerance; }
};

/// Compares reverse-mode gradients of `loss_fn` against central differences
/// (f(θ+eps) − f(θ−eps)) / (2·eps) for every entry of every parameter.
/// The error per entry is |a−n| / max(|a|, |n|, 1e-8). `loss_fn` must be
/// deterministic and rebuild its graph on every call. `skip_leading[k]`
/// entries at the front of parameter k are left out (a masked padding row).
GradCheckResult grad_check(const std::function<Tensor()>& loss_fn, std::vector<Tensor> params,
                           double eps = 1e-5, std::vector<std::size_t> skip_leading = {});

}  // namespace mixsent

#endif  // MIXSENT_GRAD_CHECK_HPP
