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

#include "mixsent/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mixsent/errors.hpp"

namespace mixsent {

namespace {

using detail::Node;

// Gradient buffer of parent `k`, or nullptr when it does not take gradients.
double* grad_of(Node& self, std::size_t k) {
  Node& p = *self.parents[k];
  if (!p.requires_grad) return nullptr;
  p.ensure_grad();
  return p.grad.data();
}

const double* data_of(Node& self, std::size_t k) { return self.parents[k]->data.data(); }

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shapes " + shape_str(a.shape()) + " and " +
                         shape_str(b.shape()) + " differ");
  }
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// Rows and columns of a tensor viewed as a matrix (rank 1 is one row).
std::pair<std::size_t, std::size_t> as_matrix(const Tensor& t, const char* op) {
  if (t.rank() == 1) return {1, t.dim(0)};
  if (t.rank() == 2) return {t.dim(0), t.dim(1)};
  throw DimensionError(std::string(op) + ": expected rank 1 or 2, got " + shape_str(t.shape()));
}

}  // namespace

Tensor affine(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  auto [m, n] = as_matrix(x, "affine");
  if (weight.rank() != 2 || weight.dim(0) != n || bias.rank() != 1 || bias.dim(0) != weight.dim(1)) {
    throw DimensionError("affine: x " + shape_str(x.shape()) + " incompatible with W " +
                         shape_str(weight.shape()) + " and b " + shape_str(bias.shape()));
  }
  const std::size_t p = weight.dim(1);
  std::vector<double> out(m * p);
  const double* xd = x.data().data();
  const double* wd = weight.data().data();
  const double* bd = bias.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    double* row = out.data() + i * p;
    std::copy(bd, bd + p, row);
    for (std::size_t k = 0; k < n; ++k) {
      const double xv = xd[i * n + k];
      const double* wr = wd + k * p;
      for (std::size_t j = 0; j < p; ++j) row[j] += xv * wr[j];
    }
  }
  Shape shape = x.rank() == 1 ? Shape{p} : Shape{m, p};
  return make_result(std::move(shape), std::move(out), {x, weight, bias}, [m, n, p](Node& self) {
    const double* g = self.grad.data();
    const double* xv = data_of(self, 0);
    const double* wv = data_of(self, 1);
    if (double* dx = grad_of(self, 0)) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < n; ++k) {
          double acc = 0.0;
          for (std::size_t j = 0; j < p; ++j) acc += g[i * p + j] * wv[k * p + j];
          dx[i * n + k] += acc;
        }
    }
    if (double* dw = grad_of(self, 1)) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < n; ++k) {
          const double xik = xv[i * n + k];
          for (std::size_t j = 0; j < p; ++j) dw[k * p + j] += xik * g[i * p + j];
        }
    }
    if (double* db = grad_of(self, 2)) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < p; ++j) db[j] += g[i * p + j];
    }
  });
}

Tensor conv1d_maxpool(const Tensor& seq, const Tensor& filters, const Tensor& bias,
                      Activation activation) {
  if (seq.rank() != 2 || filters.rank() != 3 || bias.rank() != 1 || filters.dim(1) != seq.dim(1) ||
      filters.dim(2) != bias.dim(0)) {
    throw DimensionError("conv1d_maxpool: seq " + shape_str(seq.shape()) + ", filters " +
                         shape_str(filters.shape()) + ", bias " + shape_str(bias.shape()));
  }
  const std::size_t len = seq.dim(0), d = seq.dim(1);
  const std::size_t h = filters.dim(0), maps = filters.dim(2);
  if (len < h) {
    throw ContractError("conv1d_maxpool: sequence of length " + std::to_string(len) +
                        " is shorter than filter height " + std::to_string(h));
  }
  const double* sd = seq.data().data();
  const double* fd = filters.data().data();
  const double* bd = bias.data().data();
  const std::size_t windows = len - h + 1;
  std::vector<double> best(maps, 0.0);
  std::vector<std::size_t> argmax(maps, 0);
  std::vector<double> acc(maps);
  for (std::size_t t = 0; t < windows; ++t) {
    std::copy(bd, bd + maps, acc.begin());
    for (std::size_t u = 0; u < h; ++u) {
      const double* srow = sd + (t + u) * d;
      const double* frow = fd + u * d * maps;
      for (std::size_t v = 0; v < d; ++v) {
        const double s = srow[v];
        if (s == 0.0) continue;
        const double* fv = frow + v * maps;
        for (std::size_t f = 0; f < maps; ++f) acc[f] += s * fv[f];
      }
    }
    for (std::size_t f = 0; f < maps; ++f) {
      double a = acc[f];
      switch (activation) {
        case Activation::kTanh: a = std::tanh(a); break;
        case Activation::kRelu: a = a > 0.0 ? a : 0.0; break;
        case Activation::kIdentity: break;
      }
      if (t == 0 || a > best[f]) {
        best[f] = a;
        argmax[f] = t;
      }
    }
  }
  std::vector<double> out = best;
  return make_result({maps}, std::move(out), {seq, filters, bias},
                     [d, h, maps, activation, argmax = std::move(argmax)](Node& self) {
                       const double* g = self.grad.data();
                       const double* y = self.data.data();
                       const double* sv = data_of(self, 0);
                       const double* fv = data_of(self, 1);
                       double* dseq = grad_of(self, 0);
                       double* dfil = grad_of(self, 1);
                       double* dbias = grad_of(self, 2);
                       for (std::size_t f = 0; f < maps; ++f) {
                         double slope = 1.0;
                         if (activation == Activation::kTanh) slope = 1.0 - y[f] * y[f];
                         if (activation == Activation::kRelu) slope = y[f] > 0.0 ? 1.0 : 0.0;
                         const double gp = g[f] * slope;
                         if (gp == 0.0) continue;
                         const std::size_t t = argmax[f];
                         for (std::size_t u = 0; u < h; ++u)
                           for (std::size_t v = 0; v < d; ++v) {
                             const std::size_t si = (t + u) * d + v;
                             const std::size_t fi = (u * d + v) * maps + f;
                             if (dfil) dfil[fi] += sv[si] * gp;
                             if (dseq) dseq[si] += fv[fi] * gp;
                           }
                         if (dbias) dbias[f] += gp;
                       }
                     });
}

LstmState lstm_step(const Tensor& x, const Tensor& h_prev, const Tensor& c_prev,
                    const LstmWeights& weights) {
  const std::size_t d = weights.input_dim(), hd = weights.hidden_dim();
  if (weights.w_input.rank() != 2 || weights.w_input.dim(1) != 4 * hd ||
      weights.w_hidden.rank() != 2 || weights.w_hidden.dim(1) != 4 * hd ||
      weights.bias.rank() != 1 || weights.bias.dim(0) != 4 * hd) {
    throw DimensionError("lstm_step: inconsistent weights W_x " + shape_str(weights.w_input.shape()) +
                         ", W_h " + shape_str(weights.w_hidden.shape()) + ", b " +
                         shape_str(weights.bias.shape()));
  }
  auto [m, xd] = as_matrix(x, "lstm_step");
  auto [mh, hcols] = as_matrix(h_prev, "lstm_step");
  auto [mc, ccols] = as_matrix(c_prev, "lstm_step");
  if (xd != d || mh != m || mc != m || hcols != hd || ccols != hd || h_prev.rank() != x.rank() ||
      c_prev.rank() != x.rank()) {
    throw DimensionError("lstm_step: x " + shape_str(x.shape()) + ", h " + shape_str(h_prev.shape()) +
                         ", c " + shape_str(c_prev.shape()) + " do not fit d=" + std::to_string(d) +
                         " H=" + std::to_string(hd));
  }
  const std::size_t g4 = 4 * hd;
  const double* xv = x.data().data();
  const double* hv = h_prev.data().data();
  const double* cv = c_prev.data().data();
  const double* wx = weights.w_input.data().data();
  const double* wh = weights.w_hidden.data().data();
  const double* bv = weights.bias.data().data();

  // gates holds i, f, g, o activations followed by tanh(c) per row: 5H.
  std::vector<double> gates(m * 5 * hd);
  std::vector<double> out(m * 2 * hd);
  std::vector<double> z(g4);
  for (std::size_t r = 0; r < m; ++r) {
    std::copy(bv, bv + g4, z.begin());
    for (std::size_t k = 0; k < d; ++k) {
      const double a = xv[r * d + k];
      if (a == 0.0) continue;
      const double* w = wx + k * g4;
      for (std::size_t j = 0; j < g4; ++j) z[j] += a * w[j];
    }
    for (std::size_t k = 0; k < hd; ++k) {
      const double a = hv[r * hd + k];
      if (a == 0.0) continue;
      const double* w = wh + k * g4;
      for (std::size_t j = 0; j < g4; ++j) z[j] += a * w[j];
    }
    double* gr = gates.data() + r * 5 * hd;
    double* o = out.data() + r * 2 * hd;
    for (std::size_t j = 0; j < hd; ++j) {
      const double ig = sigmoid(z[j]);
      const double fg = sigmoid(z[hd + j]);
      const double gg = std::tanh(z[2 * hd + j]);
      const double og = sigmoid(z[3 * hd + j]);
      const double c = fg * cv[r * hd + j] + ig * gg;
      const double tc = std::tanh(c);
      gr[j] = ig;
      gr[hd + j] = fg;
      gr[2 * hd + j] = gg;
      gr[3 * hd + j] = og;
      gr[4 * hd + j] = tc;
      o[j] = og * tc;
      o[hd + j] = c;
    }
  }
  Tensor hc = make_result(
      {m, 2 * hd}, std::move(out), {x, h_prev, c_prev, weights.w_input, weights.w_hidden, weights.bias},
      [m, d, hd, gates = std::move(gates)](Node& self) {
        const std::size_t g4 = 4 * hd;
        const double* g = self.grad.data();
        const double* xv = data_of(self, 0);
        const double* hv = data_of(self, 1);
        const double* cv = data_of(self, 2);
        const double* wx = data_of(self, 3);
        const double* wh = data_of(self, 4);
        double* dx = grad_of(self, 0);
        double* dh = grad_of(self, 1);
        double* dc = grad_of(self, 2);
        double* dwx = grad_of(self, 3);
        double* dwh = grad_of(self, 4);
        double* db = grad_of(self, 5);
        std::vector<double> dz(g4);
        for (std::size_t r = 0; r < m; ++r) {
          const double* gr = gates.data() + r * 5 * hd;
          const double* go = g + r * 2 * hd;
          for (std::size_t j = 0; j < hd; ++j) {
            const double ig = gr[j], fg = gr[hd + j], gg = gr[2 * hd + j], og = gr[3 * hd + j];
            const double tc = gr[4 * hd + j];
            const double dh_out = go[j];
            const double dc_total = go[hd + j] + dh_out * og * (1.0 - tc * tc);
            dz[j] = dc_total * gg * ig * (1.0 - ig);
            dz[hd + j] = dc_total * cv[r * hd + j] * fg * (1.0 - fg);
            dz[2 * hd + j] = dc_total * ig * (1.0 - gg * gg);
            dz[3 * hd + j] = dh_out * tc * og * (1.0 - og);
            if (dc) dc[r * hd + j] += dc_total * fg;
          }
          if (db)
            for (std::size_t j = 0; j < g4; ++j) db[j] += dz[j];
          for (std::size_t k = 0; k < d; ++k) {
            const double* w = wx + k * g4;
            if (dx) {
              double acc = 0.0;
              for (std::size_t j = 0; j < g4; ++j) acc += dz[j] * w[j];
              dx[r * d + k] += acc;
            }
            if (dwx) {
              const double a = xv[r * d + k];
              if (a != 0.0) {
                double* dw = dwx + k * g4;
                for (std::size_t j = 0; j < g4; ++j) dw[j] += a * dz[j];
              }
            }
          }
          for (std::size_t k = 0; k < hd; ++k) {
            const double* w = wh + k * g4;
            if (dh) {
              double acc = 0.0;
              for (std::size_t j = 0; j < g4; ++j) acc += dz[j] * w[j];
              dh[r * hd + k] += acc;
            }
            if (dwh) {
              const double a = hv[r * hd + k];
              if (a != 0.0) {
                double* dw = dwh + k * g4;
                for (std::size_t j = 0; j < g4; ++j) dw[j] += a * dz[j];
              }
            }
          }
        }
      });
  LstmState next{slice_cols(hc, 0, hd), slice_cols(hc, hd, 2 * hd)};
  if (x.rank() == 1) {
    next.h = reshape(next.h, {hd});
    next.c = reshape(next.c, {hd});
  }
  return next;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const double mx = *std::max_element(p.begin(), p.end());
  double total = 0.0;
  for (auto& v : p) {
    v = std::exp(v - mx);
    total += v;
  }
  for (auto& v : p) v /= total;
  return p;
}

Tensor softmax_cross_entropy_soft(const Tensor& logits, std::span<const double> target) {
  auto [m, c] = as_matrix(logits, "softmax_cross_entropy_soft");
  if (target.size() != m * c) {
    throw DimensionError("softmax_cross_entropy_soft: logits " + shape_str(logits.shape()) +
                         " but target holds " + std::to_string(target.size()) + " values");
  }
  for (std::size_t r = 0; r < m; ++r) {
    double total = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      const double t = target[r * c + k];
      if (!(t >= 0.0)) throw ContractError("invalid target: negative or NaN probability in row " +
                                           std::to_string(r));
      total += t;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw ContractError("invalid target: row " + std::to_string(r) + " sums to " +
                          std::to_string(total));
    }
  }
  const double* z = logits.data().data();
  std::vector<double> probs(m * c);
  double loss = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const double* zr = z + r * c;
    const double mx = *std::max_element(zr, zr + c);
    double total = 0.0;
    for (std::size_t k = 0; k < c; ++k) total += std::exp(zr[k] - mx);
    const double lse = mx + std::log(total);
    double row = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      const double logp = zr[k] - lse;
      probs[r * c + k] = std::exp(logp);
      row -= target[r * c + k] * logp;
    }
    loss += row;
  }
  loss /= static_cast<double>(m);
  std::vector<double> tgt(target.begin(), target.end());
  return make_result({1}, {loss}, {logits},
                     [m, c, probs = std::move(probs), tgt = std::move(tgt)](Node& self) {
                       double* dz = grad_of(self, 0);
                       if (!dz) return;
                       const double scale = self.grad[0] / static_cast<double>(m);
                       for (std::size_t i = 0; i < m * c; ++i) dz[i] += scale * (probs[i] - tgt[i]);
                     });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    const std::size_t n = self.data.size();
    for (std::size_t k = 0; k < 2; ++k)
      if (double* d = grad_of(self, k))
        for (std::size_t i = 0; i < n; ++i) d[i] += self.grad[i];
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    const std::size_t n = self.data.size();
    const double* av = data_of(self, 0);
    const double* bv = data_of(self, 1);
    if (double* da = grad_of(self, 0))
      for (std::size_t i = 0; i < n; ++i) da[i] += self.grad[i] * bv[i];
    if (double* db = grad_of(self, 1))
      for (std::size_t i = 0; i < n; ++i) db[i] += self.grad[i] * av[i];
  });
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * factor;
  return make_result(a.shape(), std::move(out), {a}, [factor](Node& self) {
    if (double* d = grad_of(self, 0))
      for (std::size_t i = 0; i < self.data.size(); ++i) d[i] += self.grad[i] * factor;
  });
}

Tensor sum(const Tensor& a) {
  double total = 0.0;
  for (double v : a.data()) total += v;
  return make_result({1}, {total}, {a}, [](Node& self) {
    double* d = grad_of(self, 0);
    if (!d) return;
    const std::size_t n = self.parents[0]->data.size();
    for (std::size_t i = 0; i < n; ++i) d[i] += self.grad[0];
  });
}

Tensor square_sum(const Tensor& a) {
  double total = 0.0;
  for (double v : a.data()) total += v * v;
  return make_result({1}, {total}, {a}, [](Node& self) {
    double* d = grad_of(self, 0);
    if (!d) return;
    const double* av = data_of(self, 0);
    const std::size_t n = self.parents[0]->data.size();
    for (std::size_t i = 0; i < n; ++i) d[i] += 2.0 * av[i] * self.grad[0];
  });
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_size(shape) != a.size()) {
    throw DimensionError("reshape: " + shape_str(a.shape()) + " to " + shape_str(shape));
  }
  std::vector<double> out(a.data().begin(), a.data().end());
  return make_result(std::move(shape), std::move(out), {a}, [](Node& self) {
    if (double* d = grad_of(self, 0))
      for (std::size_t i = 0; i < self.data.size(); ++i) d[i] += self.grad[i];
  });
}

Tensor lerp(const Tensor& a, const Tensor& b, double lambda) {
  require_same_shape(a, b, "lerp");
  const double mu = 1.0 - lambda;
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = lambda * a[i] + mu * b[i];
  return make_result(a.shape(), std::move(out), {a, b}, [lambda, mu](Node& self) {
    const std::size_t n = self.data.size();
    if (double* da = grad_of(self, 0))
      for (std::size_t i = 0; i < n; ++i) da[i] += lambda * self.grad[i];
    if (double* db = grad_of(self, 1))
      for (std::size_t i = 0; i < n; ++i) db[i] += mu * self.grad[i];
  });
}

Tensor mix_rows(const Tensor& x, std::span<const std::size_t> partner, std::span<const double> lambdas) {
  if (x.rank() != 2 || partner.size() != x.dim(0) || lambdas.size() != x.dim(0)) {
    throw DimensionError("mix_rows: x " + shape_str(x.shape()) + " with " +
                         std::to_string(partner.size()) + " partners and " +
                         std::to_string(lambdas.size()) + " mixing ratios");
  }
  const std::size_t m = x.dim(0), k = x.dim(1);
  std::vector<std::size_t> part(partner.begin(), partner.end());
  std::vector<double> lam(lambdas.begin(), lambdas.end());
  std::vector<double> out(m * k);
  for (std::size_t p = 0; p < m; ++p) {
    if (part[p] >= m) throw DimensionError("mix_rows: partner index out of range");
    const double mu = 1.0 - lam[p];
    for (std::size_t j = 0; j < k; ++j) out[p * k + j] = lam[p] * x[p * k + j] + mu * x[part[p] * k + j];
  }
  return make_result(x.shape(), std::move(out), {x},
                     [m, k, part = std::move(part), lam = std::move(lam)](Node& self) {
                       double* dx = grad_of(self, 0);
                       if (!dx) return;
                       for (std::size_t p = 0; p < m; ++p) {
                         const double mu = 1.0 - lam[p];
                         for (std::size_t j = 0; j < k; ++j) {
                           dx[p * k + j] += lam[p] * self.grad[p * k + j];
                           dx[part[p] * k + j] += mu * self.grad[p * k + j];
                         }
                       }
                     });
}

Tensor concat(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw DimensionError("concat of nothing");
  std::vector<double> out;
  for (const auto& p : parts) {
    if (p.rank() != 1) throw DimensionError("concat expects rank-1 parts, got " + shape_str(p.shape()));
    out.insert(out.end(), p.data().begin(), p.data().end());
  }
  const std::size_t n = out.size();
  return make_result({n}, std::move(out), parts, [](Node& self) {
    std::size_t offset = 0;
    for (std::size_t k = 0; k < self.parents.size(); ++k) {
      const std::size_t len = self.parents[k]->data.size();
      if (double* d = grad_of(self, k))
        for (std::size_t i = 0; i < len; ++i) d[i] += self.grad[offset + i];
      offset += len;
    }
  });
}

Tensor stack_rows(const std::vector<Tensor>& rows) {
  if (rows.empty()) throw DimensionError("stack_rows of nothing");
  const std::size_t k = rows.front().size();
  std::vector<double> out;
  out.reserve(rows.size() * k);
  for (const auto& r : rows) {
    if (r.rank() != 1 || r.size() != k) {
      throw DimensionError("stack_rows: row " + shape_str(r.shape()) + " vs length " + std::to_string(k));
    }
    out.insert(out.end(), r.data().begin(), r.data().end());
  }
  return make_result({rows.size(), k}, std::move(out), rows, [k](Node& self) {
    for (std::size_t p = 0; p < self.parents.size(); ++p)
      if (double* d = grad_of(self, p))
        for (std::size_t j = 0; j < k; ++j) d[j] += self.grad[p * k + j];
  });
}

Tensor gather_row(const std::vector<Tensor>& matrices, std::size_t row) {
  if (matrices.empty()) throw DimensionError("gather_row of nothing");
  const auto& first = matrices.front();
  if (first.rank() != 2 || row >= first.dim(0)) {
    throw DimensionError("gather_row: row " + std::to_string(row) + " of " + shape_str(first.shape()));
  }
  const std::size_t d = first.dim(1);
  std::vector<double> out;
  out.reserve(matrices.size() * d);
  for (const auto& mtx : matrices) {
    if (mtx.shape() != first.shape()) require_same_shape(first, mtx, "gather_row");
    auto src = mtx.data().subspan(row * d, d);
    out.insert(out.end(), src.begin(), src.end());
  }
  return make_result({matrices.size(), d}, std::move(out), matrices, [row, d](Node& self) {
    for (std::size_t p = 0; p < self.parents.size(); ++p)
      if (double* g = grad_of(self, p))
        for (std::size_t j = 0; j < d; ++j) g[row * d + j] += self.grad[p * d + j];
  });
}

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end) {
  if (x.rank() != 2 || begin >= end || end > x.dim(1)) {
    throw DimensionError("slice_cols [" + std::to_string(begin) + "," + std::to_string(end) + ") of " +
                         shape_str(x.shape()));
  }
  const std::size_t m = x.dim(0), n = x.dim(1), w = end - begin;
  std::vector<double> out(m * w);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < w; ++j) out[i * w + j] = x[i * n + begin + j];
  return make_result({m, w}, std::move(out), {x}, [m, n, w, begin](Node& self) {
    if (double* d = grad_of(self, 0))
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < w; ++j) d[i * n + begin + j] += self.grad[i * w + j];
  });
}

Tensor embedding_lookup(const Tensor& table, std::span<const std::size_t> ids, bool mask_row_zero) {
  if (table.rank() != 2) throw DimensionError("embedding table must be rank 2, got " + shape_str(table.shape()));
  if (ids.empty()) throw DimensionError("embedding_lookup of an empty id list");
  const std::size_t vocab = table.dim(0), d = table.dim(1);
  std::vector<std::size_t> idv(ids.begin(), ids.end());
  std::vector<double> out(idv.size() * d);
  for (std::size_t t = 0; t < idv.size(); ++t) {
    if (idv[t] >= vocab) {
      throw std::out_of_range("embedding id " + std::to_string(idv[t]) + " outside vocabulary of size " +
                              std::to_string(vocab));
    }
    auto src = table.data().subspan(idv[t] * d, d);
    std::copy(src.begin(), src.end(), out.begin() + static_cast<std::ptrdiff_t>(t * d));
  }
  const std::size_t len = idv.size();
  return make_result({len, d}, std::move(out), {table},
                     [d, mask_row_zero, idv = std::move(idv)](Node& self) {
                       double* g = grad_of(self, 0);
                       if (!g) return;
                       for (std::size_t t = 0; t < idv.size(); ++t) {
                         if (mask_row_zero && idv[t] == 0) continue;
                         for (std::size_t j = 0; j < d; ++j) g[idv[t] * d + j] += self.grad[t * d + j];
                       }
                     });
}

Tensor dropout(const Tensor& x, double rate, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw ConfigError("dropout rate must lie in [0,1), got " + std::to_string(rate));
  if (rate == 0.0) return x;
  const double keep = 1.0 / (1.0 - rate);
  std::vector<double> mask(x.size());
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask[i] = rng.uniform() >= rate ? keep : 0.0;
    out[i] = x[i] * mask[i];
  }
  return make_result(x.shape(), std::move(out), {x}, [mask = std::move(mask)](Node& self) {
    if (double* d = grad_of(self, 0))
      for (std::size_t i = 0; i < mask.size(); ++i) d[i] += self.grad[i] * mask[i];
  });
}

}  // namespace mixsent
