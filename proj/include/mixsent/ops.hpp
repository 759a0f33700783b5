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

#ifndef MIXSENT_OPS_HPP
#define MIXSENT_OPS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "mixsent/rng.hpp"
#include "mixsent/tensor.hpp"

namespace mixsent {

enum class Activation { kIdentity, kTanh, kRelu };

/// x[m×n]·W[n×p] + b[p]. A rank-1 x of length n is treated as one row and
/// yields a rank-1 result of length p.
Tensor affine(const Tensor& x, const Tensor& weight, const Tensor& bias);

/// Valid 1-D convolution over time followed by max-over-time pooling.
///
/// seq is [N×d], filters [h×d×F], bias [F]. For every window start t in
/// [0, N−h] and map f, c[t,f] = act(Σ seq[t+u,v]·filters[u,v,f] + bias[f]);
/// the result is max_t c[t,f]. The max subgradient goes to the first
/// maximal window.
Tensor conv1d_maxpool(const Tensor& seq, const Tensor& filters, const Tensor& bias,
                      Activation activation);

/// Gate layout along the 4H axis: input, forget, candidate, output.
struct LstmWeights {
  Tensor w_input;   // [d×4H]
  Tensor w_hidden;  // [H×4H]
  Tensor bias;      // [4H]

  std::size_t input_dim() const { return w_input.dim(0); }
  std::size_t hidden_dim() const { return w_hidden.dim(0); }
};

struct LstmState {
  Tensor h;
  Tensor c;
};

/// One LSTM cell update. x is [d] or [m×d]; h_prev and c_prev match the
/// batch layout with H columns.
LstmState lstm_step(const Tensor& x, const Tensor& h_prev, const Tensor& c_prev,
                    const LstmWeights& weights);

/// Mean over rows of −Σ_k target[k]·log softmax(logits)[k]. logits is [c]
/// or [m×c]; target holds m·c probabilities, each row summing to one.
Tensor softmax_cross_entropy_soft(const Tensor& logits, std::span<const double> target);

std::vector<double> softmax(std::span<const double> logits);

Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor sum(const Tensor& a);
Tensor square_sum(const Tensor& a);
Tensor reshape(const Tensor& a, Shape shape);

/// lambda·a + (1−lambda)·b for equally shaped tensors.
Tensor lerp(const Tensor& a, const Tensor& b, double lambda);

/// Row p of the result is lambdas[p]·x[p] + (1−lambdas[p])·x[partner[p]].
Tensor mix_rows(const Tensor& x, std::span<const std::size_t> partner,
                std::span<const double> lambdas);

/// Concatenation of rank-1 tensors.
Tensor concat(const std::vector<Tensor>& parts);

/// Stacks m rank-1 tensors of equal length k into [m×k].
Tensor stack_rows(const std::vector<Tensor>& rows);

/// Gathers row `row` of each [L×d] matrix into an [m×d] batch.
Tensor gather_row(const std::vector<Tensor>& matrices, std::size_t row);

/// Columns [begin, end) of a rank-2 tensor.
Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end);

/// Rows table[ids[t]] as an [L×d] matrix. When `mask_row_zero` is set the
/// gradient of table row 0 is dropped.
Tensor embedding_lookup(const Tensor& table, std::span<const std::size_t> ids, bool mask_row_zero);

/// Inverted dropout: each entry is zeroed with probability `rate` and the
/// survivors are scaled by 1/(1−rate).
Tensor dropout(const Tensor& x, double rate, Rng& rng);

}  // namespace mixsent

#endif  // MIXSENT_OPS_HPP
