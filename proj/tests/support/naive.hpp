// Copyright 2026 The clusterfid Authors
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

// Literal term-by-term evaluations used as independent oracles. Nothing
// here is shared with the library's evaluation shortcuts.

#include <vector>

#include "clusterfid/bounds.hpp"
#include "clusterfid/lattice.hpp"
#include "clusterfid/noise.hpp"

namespace naive {

using clusterfid::BoundId;
using clusterfid::ClusterGraph;
using clusterfid::GeneratorClass;
using clusterfid::Label;
using clusterfid::SyndromeSample;

struct View {
  std::vector<Label> a, b;
  std::vector<int> bit;  // bit[q], 1-based
  long nx;
};

inline View view(const ClusterGraph& g, const SyndromeSample& s) {
  View v;
  v.bit.assign(g.size() + 1, 0);
  for (Label q = 1; q <= g.size(); ++q) {
    v.bit[q] = s.satisfied(q) ? 1 : 0;
    (g.class_of(q) == GeneratorClass::A ? v.a : v.b).push_back(q);
  }
  v.nx = static_cast<long>(g.nx());
  return v;
}

inline long G(const View& v, Label q) { return v.bit[q]; }
inline long E(const View& v, Label q) { return 1 - v.bit[q]; }
inline long prod_all(const View& v, const std::vector<Label>& ls) {
  long p = 1;
  for (Label q : ls) p *= G(v, q);
  return p;
}

/// E_i E_j prod_{A, k<i} G_k prod_{B, m>j} G_m.
inline long e2(const View& v, Label i, Label j) {
  long p = E(v, i) * E(v, j);
  for (Label k : v.a)
    if (k < i) p *= G(v, k);
  for (Label m : v.b)
    if (m > j) p *= G(v, m);
  return p;
}

inline long bound(const ClusterGraph& g, const SyndromeSample& s, BoundId id) {
  const View v = view(g, s);
  if (id == BoundId::F_exact) {
    long p = 1;
    for (Label q = 1; q <= g.size(); ++q) p *= G(v, q);
    return p;
  }
  long total = prod_all(v, v.a) + prod_all(v, v.b) - 1;
  if (id == BoundId::P0) return total;
  for (Label i : v.a)
    for (Label j : v.b) {
      const long li = i, lj = j;
      bool in = false;
      switch (id) {
        case BoundId::P1D: in = lj >= li - 3; break;
        case BoundId::P1D_simplified: in = lj > li - 3; break;
        default: in = lj - li >= v.nx; break;
      }
      if (in) total += e2(v, i, j);
    }
  return total;
}

/// 1 - G_B == sum_{i in B} E_i prod_{B, k>i} G_k, and the mirror for A.
inline bool grouping_identity_holds(const ClusterGraph& g, const SyndromeSample& s) {
  const View v = view(g, s);
  long rhs_b = 0, rhs_a = 0;
  for (Label i : v.b) {
    long t = E(v, i);
    for (Label k : v.b)
      if (k > i) t *= G(v, k);
    rhs_b += t;
  }
  for (Label i : v.a) {
    long t = E(v, i);
    for (Label k : v.a)
      if (k < i) t *= G(v, k);
    rhs_a += t;
  }
  return 1 - prod_all(v, v.b) == rhs_b && 1 - prod_all(v, v.a) == rhs_a;
}

/// Three-way (chain) split of (1-G_A)(1-G_B): j-i > 3, |i-j| <= 3, i-j > 3.
inline bool chain_split_holds(const ClusterGraph& g, const SyndromeSample& s) {
  const View v = view(g, s);
  long far_right = 0, near = 0, far_left = 0;
  for (Label i : v.a)
    for (Label j : v.b) {
      const long d = static_cast<long>(j) - static_cast<long>(i);
      const long t = e2(v, i, j);
      if (d > 3) far_right += t;
      else if (d >= -3) near += t;
      else far_left += t;
    }
  return (1 - prod_all(v, v.a)) * (1 - prod_all(v, v.b)) == far_right + near + far_left;
}

/// Two-way (grid) split: j-i >= N_x and j-i < N_x.
inline bool grid_split_holds(const ClusterGraph& g, const SyndromeSample& s) {
  const View v = view(g, s);
  long apart = 0, close = 0;
  for (Label i : v.a)
    for (Label j : v.b) {
      const long d = static_cast<long>(j) - static_cast<long>(i);
      (d >= v.nx ? apart : close) += e2(v, i, j);
    }
  return (1 - prod_all(v, v.a)) * (1 - prod_all(v, v.b)) == apart + close;
}

}  // namespace naive
