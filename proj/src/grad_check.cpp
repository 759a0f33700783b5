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

#include "mixsent/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace mixsent {

GradCheckResult grad_check(const std::function<Tensor()>& loss_fn, std::vector<Tensor> params, double eps,
                           std::vector<std::size_t> skip_leading) {
  skip_leading.resize(params.size(), 0);
  GradCheckResult result;
  for (auto& p : params) p.zero_grad();
  backward(loss_fn());
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const auto& p : params) analytic.push_back(p.grad());

  for (std::size_t k = 0; k < params.size(); ++k) {
    auto values = params[k].mutable_data();
    for (std::size_t i = skip_leading[k]; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + eps;
      const double up = loss_fn().item();
      values[i] = saved - eps;
      const double down = loss_fn().item();
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[k][i];
      if (!std::isfinite(a) || !std::isfinite(numeric)) {
        result.finite = false;
        result.worst_param = k;
        result.worst_index = i;
        result.message = "non-finite gradient at param " + std::to_string(k) + " index " + std::to_string(i);
        return result;
      }
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_param = k;
        result.worst_index = i;
      }
    }
  }
  for (auto& p : params) p.zero_grad();
  return result;
}

}  // namespace mixsent
