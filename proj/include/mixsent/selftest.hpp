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

#ifndef MIXSENT_SELFTEST_HPP
#define MIXSENT_SELFTEST_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mixsent {

struct CheckOutcome {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Reverse-mode vs central differences (eps 1e-5) on a toy CNN classifier
/// (L=6, d=4, 2 maps per filter size, word-level mixing in the loss) and a
/// 3-step LSTM classifier (sentence-level mixing in the loss).
CheckOutcome check_gradient_fidelity(double tolerance = 1e-4, std::uint64_t seed = 1);

/// Endpoint identity, symmetry, convexity, CE target linearity (1e-12) and
/// linear-encoder commutation (1e-10) on randomized instances.
CheckOutcome check_mixup_algebra(std::size_t instances = 100, std::uint64_t seed = 2);

/// Mean, variance and Kolmogorov-Smirnov distance to U(0,1) of Beta(1,1) draws.
CheckOutcome check_lambda_statistics(std::size_t draws = 10000, std::uint64_t seed = 3);

/// Mixup with λ forced to 1 and identity pairing against the unregularized
/// baseline: per-step losses must agree bitwise.
CheckOutcome check_endpoint_equivalence(std::size_t steps = 200, std::uint64_t seed = 4);

/// Mixup runs never sample a dropout mask nor add an L2 term.
CheckOutcome check_regime_gating(std::uint64_t seed = 5);

std::vector<CheckOutcome> run_selftests();

/// One-sample KS statistic against U(0,1).
double ks_uniform(std::vector<double> samples);

}  // namespace mixsent

#endif  // MIXSENT_SELFTEST_HPP
