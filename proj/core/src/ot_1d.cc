// Copyright 2026 The otbary Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "otbary/ot_1d.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "otbary/errors.h"

namespace otbary {
namespace {

// Neumaier compensated running sum.
class CompensatedSum {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::vector<uint32_t> SortedOrder(std::span<const double> x,
                                  std::span<const double> w) {
  std::vector<uint32_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::sort(idx.begin(), idx.end(), [&](uint32_t i, uint32_t j) {
    if (x[i] != x[j]) return x[i] < x[j];
    return w[i] < w[j];
  });
  return idx;
}

std::vector<double> Cumulative(std::span<const double> w,
                               const std::vector<uint32_t>& order) {
  std::vector<double> c(order.size());
  CompensatedSum s;
  for (size_t i = 0; i < order.size(); ++i) {
    s.Add(w[order[i]]);
    c[i] = s.value();
  }
  c.back() = 1.0;
  return c;
}

double Power(double d, double p) {
  d = std::abs(d);
  if (p == 2.0) return d * d;
  if (p == 1.0) return d;
  return std::pow(d, p);
}

}  // namespace

double W1dRaw(std::span<const double> x, std::span<const double> a,
              std::span<const double> y, std::span<const double> b,
              const CostSpec& cost, std::vector<QuantileSegment>* segments) {
  if (x.empty() || y.empty() || x.size() != a.size() || y.size() != b.size()) {
    throw InputError("1-D transport needs nonempty, matching positions/weights");
  }
  const auto ox = SortedOrder(x, a);
  const auto oy = SortedOrder(y, b);
  const auto cx = Cumulative(a, ox);
  const auto cy = Cumulative(b, oy);
  if (segments != nullptr) segments->clear();

  CompensatedSum total;
  double prev = 0.0;
  size_t i = 0;
  size_t j = 0;
  while (i < ox.size() && j < oy.size()) {
    const double next = std::min(cx[i], cy[j]);
    const double len = next - prev;
    if (len > 0.0) {
      total.Add(len * Power(x[ox[i]] - y[oy[j]], cost.p()));
      if (segments != nullptr) segments->push_back({ox[i], oy[j], len});
      prev = next;
    }
    const bool step_x = cx[i] <= next;
    const bool step_y = cy[j] <= next;
    if (step_x) ++i;
    if (step_y) ++j;
  }
  return total.value();
}

double W1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
           const CostSpec& cost) {
  if (mu.dim() != 1 || nu.dim() != 1) {
    throw InputError("W1d needs one-dimensional measures");
  }
  return W1dRaw(mu.coords(), mu.weights(), nu.coords(), nu.weights(), cost);
}

}  // namespace otbary
