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

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "clusterfid/error.hpp"
#include "clusterfid/lattice.hpp"
#include "clusterfid/noise.hpp"
#include "clusterfid/rng.hpp"

namespace clusterfid {

enum class BoundId : std::uint8_t { F_exact, P0, P1D, P1D_simplified, P2D, P2D_even };

inline constexpr BoundId kAllBounds[] = {BoundId::F_exact, BoundId::P0,  BoundId::P1D,
                                         BoundId::P1D_simplified, BoundId::P2D, BoundId::P2D_even};

inline std::string_view to_string(BoundId b) {
  switch (b) {
    case BoundId::F_exact: return "F_exact";
    case BoundId::P0: return "P0";
    case BoundId::P1D: return "P1D";
    case BoundId::P1D_simplified: return "P1D_simplified";
    case BoundId::P2D: return "P2D";
    case BoundId::P2D_even: return "P2D_even";
  }
  return "?";
}

/// Accepts the canonical names plus "F".
inline BoundId parse_bound(std::string_view s) {
  if (s == "F") return BoundId::F_exact;
  for (BoundId b : kAllBounds)
    if (to_string(b) == s) return b;
  throw Error(ErrorKind::parse, "unknown bound '" + std::string(s) + "'");
}

inline std::vector<BoundId> parse_bounds(std::string_view list) {
  std::vector<BoundId> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    std::size_t end = list.find(',', start);
    if (end == std::string_view::npos) end = list.size();
    auto tok = list.substr(start, end - start);
    if (!tok.empty()) out.push_back(parse_bound(tok));
    start = end + 1;
  }
  if (out.empty()) throw Error(ErrorKind::parse, "empty bound list");
  return out;
}

/// Throws wrong-kind if `b` cannot be evaluated on `g`.
inline void check_compatible(const ClusterGraph& g, BoundId b) {
  switch (b) {
    case BoundId::F_exact:
    case BoundId::P0: return;
    case BoundId::P1D:
    case BoundId::P1D_simplified:
      if (!g.is_chain())
        throw Error(ErrorKind::wrong_kind, std::string(to_string(b)) + " requires a chain, got " + g.describe());
      return;
    case BoundId::P2D:
      if (!g.is_grid()) throw Error(ErrorKind::wrong_kind, "P2D requires a grid, got " + g.describe());
      if (g.nx() % 2 == 0)
        throw Error(ErrorKind::wrong_kind, "P2D on the even-width grid " + g.describe() + " requires P2D_even");
      return;
    case BoundId::P2D_even:
      if (!g.is_grid()) throw Error(ErrorKind::wrong_kind, "P2D_even requires a grid, got " + g.describe());
      if (g.nx() % 2 != 0)
        throw Error(ErrorKind::wrong_kind, "P2D_even on the odd-width grid " + g.describe() + " requires P2D");
      return;
  }
}

/// Syndrome-wise evaluation of every bound.
///
/// A correction term E_i E_j prod_{A, k<i} G_k prod_{B, m>j} G_m is nonzero
/// only when i is the first flipped A generator and j the last flipped B
/// generator, so each bound reduces to P0 plus one indicator.
class BoundEvaluator {
 public:
  explicit BoundEvaluator(const ClusterGraph& g) : n_(g.size()), nx_(g.nx()) {
    const std::size_t words = (n_ + 63) / 64;
    mask_a_.assign(words, 0);
    mask_b_.assign(words, 0);
    for (Label q = 1; q <= n_; ++q) {
      auto& m = g.class_of(q) == GeneratorClass::A ? mask_a_ : mask_b_;
      m[(q - 1) >> 6] |= 1ull << ((q - 1) & 63);
    }
  }

  struct Summary {
    bool g_a = true;       // all class-A generators satisfied
    bool g_b = true;       // all class-B generators satisfied
    Label first_a = 0;     // first flipped A label (0 if none)
    Label last_b = 0;      // last flipped B label (0 if none)
    bool all = true;
  };

  Summary summarize(const SyndromeSample& s) const {
    if (s.size() != n_) throw Error(ErrorKind::invalid_size, "syndrome length does not match the graph");
    Summary r;
    auto w = s.words();
    for (std::size_t k = 0; k < w.size(); ++k) {
      const std::uint64_t bad = ~w[k] & s.full_word(k);
      const std::uint64_t ba = bad & mask_a_[k];
      if (ba && r.g_a) {
        r.g_a = false;
        r.first_a = static_cast<Label>(64 * k + std::countr_zero(ba) + 1);
      }
      const std::uint64_t bb = bad & mask_b_[k];
      if (bb) {
        r.g_b = false;
        r.last_b = static_cast<Label>(64 * k + 63 - std::countl_zero(bb) + 1);
      }
    }
    r.all = r.g_a && r.g_b;
    return r;
  }

  /// Value of `b` given a summary. No compatibility check.
  int value(BoundId b, const Summary& r) const {
    if (b == BoundId::F_exact) return r.all ? 1 : 0;
    int v = static_cast<int>(r.g_a) + static_cast<int>(r.g_b) - 1;
    if (b == BoundId::P0 || r.first_a == 0 || r.last_b == 0) return v;
    const long i = r.first_a, j = r.last_b;
    bool fires = false;
    switch (b) {
      case BoundId::P1D: fires = j >= i - 3; break;
      case BoundId::P1D_simplified: fires = j > i - 3; break;
      case BoundId::P2D:
      case BoundId::P2D_even: fires = j - i >= static_cast<long>(nx_); break;
      default: break;
    }
    return v + (fires ? 1 : 0);
  }

  int eval(BoundId b, const SyndromeSample& s) const { return value(b, summarize(s)); }

 private:
  std::size_t n_, nx_;
  std::vector<std::uint64_t> mask_a_, mask_b_;
};

inline int eval_F(const SyndromeSample& s) { return s.all_satisfied() ? 1 : 0; }

inline int eval_bound(const ClusterGraph& g, BoundId b, const SyndromeSample& s) {
  check_compatible(g, b);
  return BoundEvaluator(g).eval(b, s);
}
inline int eval_P0(const ClusterGraph& g, const SyndromeSample& s) { return eval_bound(g, BoundId::P0, s); }
inline int eval_P1D(const ClusterGraph& g, const SyndromeSample& s) { return eval_bound(g, BoundId::P1D, s); }
inline int eval_P1D_simplified(const ClusterGraph& g, const SyndromeSample& s) {
  return eval_bound(g, BoundId::P1D_simplified, s);
}
inline int eval_P2D(const ClusterGraph& g, const SyndromeSample& s) { return eval_bound(g, BoundId::P2D, s); }
inline int eval_P2D_even(const ClusterGraph& g, const SyndromeSample& s) {
  return eval_bound(g, BoundId::P2D_even, s);
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

struct BoundEstimate {
  BoundId bound = BoundId::F_exact;
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t repetitions = 0;
  std::uint64_t seed = 0;
};

/// Mean and standard error from integer sums (exact, order independent).
inline BoundEstimate make_estimate(BoundId b, std::int64_t sum, std::uint64_t sum_sq, std::uint64_t m,
                                   std::uint64_t seed) {
  BoundEstimate e{b, 0.0, 0.0, m, seed};
  const long double lm = static_cast<long double>(m);
  e.mean = static_cast<double>(static_cast<long double>(sum) / lm);
  if (m > 1) {
    long double var = (static_cast<long double>(sum_sq) - static_cast<long double>(sum) * sum / lm) / (lm - 1);
    if (var < 0) var = 0;
    e.std_error = static_cast<double>(std::sqrt(var / lm));
  }
  return e;
}

/// Worker count: CLUSTERFID_THREADS if set, else hardware concurrency.
inline unsigned default_threads() {
  if (const char* env = std::getenv("CLUSTERFID_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

/// Runs `body(begin, end, slot)` over [0, total) in fixed-size chunks spread
/// over `threads` workers. Each chunk writes only to its own slot.
template <class Body>
void parallel_chunks(std::uint64_t total, std::uint64_t chunk, unsigned threads, Body&& body) {
  const std::uint64_t nchunks = (total + chunk - 1) / chunk;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(std::max(threads, 1u), std::max<std::uint64_t>(nchunks, 1)));
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t c; (c = next.fetch_add(1)) < nchunks;)
      body(c * chunk, std::min(total, (c + 1) * chunk), c);
  };
  if (threads <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

/// Repetition r draws from substream(seed, r); the result is bitwise
/// independent of `threads`.
inline std::vector<BoundEstimate> monte_carlo(const ClusterGraph& g, const PauliErrorModel& model,
                                              const std::vector<BoundId>& bounds, std::uint64_t m,
                                              std::uint64_t seed, unsigned threads = 0) {
  if (m == 0) throw Error(ErrorKind::invalid_size, "Monte Carlo needs at least one repetition");
  for (BoundId b : bounds) check_compatible(g, b);
  const SyndromeSampler sampler(g, model);
  const BoundEvaluator eval(g);
  if (threads == 0) threads = default_threads();

  constexpr std::uint64_t kChunk = 1 << 14;
  const std::size_t nb = bounds.size();
  const std::uint64_t nchunks = (m + kChunk - 1) / kChunk;
  std::vector<std::int64_t> sums(nchunks * nb, 0);
  std::vector<std::uint64_t> sq(nchunks * nb, 0);

  parallel_chunks(m, kChunk, threads, [&](std::uint64_t begin, std::uint64_t end, std::uint64_t slot) {
    SyndromeSample s(g.size());
    std::vector<std::int64_t> ls(nb, 0);
    std::vector<std::uint64_t> lq(nb, 0);
    for (std::uint64_t r = begin; r < end; ++r) {
      RngStream rng = substream(seed, r, kDomainMonteCarlo);
      sampler.sample(rng, s);
      const auto sum = eval.summarize(s);
      for (std::size_t k = 0; k < nb; ++k) {
        const int v = eval.value(bounds[k], sum);
        ls[k] += v;
        lq[k] += static_cast<std::uint64_t>(v * v);
      }
    }
    for (std::size_t k = 0; k < nb; ++k) {
      sums[slot * nb + k] = ls[k];
      sq[slot * nb + k] = lq[k];
    }
  });

  std::vector<BoundEstimate> out;
  for (std::size_t k = 0; k < nb; ++k) {
    std::int64_t s = 0;
    std::uint64_t q = 0;
    for (std::uint64_t c = 0; c < nchunks; ++c) s += sums[c * nb + k], q += sq[c * nb + k];
    out.push_back(make_estimate(bounds[k], s, q, m, seed));
  }
  return out;
}

}  // namespace clusterfid
