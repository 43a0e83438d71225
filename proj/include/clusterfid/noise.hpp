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

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <span>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "clusterfid/error.hpp"
#include "clusterfid/lattice.hpp"
#include "clusterfid/pauli.hpp"
#include "clusterfid/rng.hpp"

namespace clusterfid {

// ---------------------------------------------------------------------------
// SyndromeSample
// ---------------------------------------------------------------------------

/// Bit i-1 set means generator g_i is satisfied. Padding bits past N are 0.
class SyndromeSample {
 public:
  SyndromeSample() = default;
  explicit SyndromeSample(std::size_t n) : n_(n), words_((n + 63) / 64, ~0ull) { clear_padding(); }

  static SyndromeSample all_ones(std::size_t n) { return SyndromeSample(n); }
  /// bits[k] for k = 0..N-1 (label k+1).
  static SyndromeSample from_bits(const std::vector<int>& bits) {
    SyndromeSample s(bits.size());
    for (std::size_t k = 0; k < bits.size(); ++k)
      if (!bits[k]) s.flip(static_cast<Label>(k + 1));
    return s;
  }
  /// Bit k of `mask` is label k+1; N <= 64.
  static SyndromeSample from_mask(std::size_t n, std::uint64_t satisfied_mask) {
    SyndromeSample s(n);
    s.words_[0] = satisfied_mask;
    s.clear_padding();
    return s;
  }

  std::size_t size() const { return n_; }
  bool satisfied(Label q) const { return (words_[(q - 1) >> 6] >> ((q - 1) & 63)) & 1u; }
  void flip(Label q) { words_[(q - 1) >> 6] ^= 1ull << ((q - 1) & 63); }
  void set(Label q, bool value) {
    if (satisfied(q) != value) flip(q);
  }
  void reset() {
    for (auto& w : words_) w = ~0ull;
    clear_padding();
  }
  bool all_satisfied() const {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w] != full_word(w)) return false;
    return true;
  }
  std::vector<int> bits() const {
    std::vector<int> out(n_);
    for (std::size_t k = 0; k < n_; ++k) out[k] = satisfied(static_cast<Label>(k + 1)) ? 1 : 0;
    return out;
  }

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  /// Word with exactly the in-range bits of word `w` set.
  std::uint64_t full_word(std::size_t w) const {
    const std::size_t rem = n_ - 64 * w;
    return rem >= 64 ? ~0ull : ((1ull << rem) - 1);
  }

  /// Adds the flip pattern of `flips` (relative to all-ones) in place.
  void apply_flips(const SyndromeSample& flips) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= ~flips.words_[w] & full_word(w);
  }

  /// XOR of the flip patterns of two syndromes (relative to all-ones).
  friend SyndromeSample combine(const SyndromeSample& a, const SyndromeSample& b) {
    SyndromeSample out(a.n_);
    for (std::size_t w = 0; w < out.words_.size(); ++w)
      out.words_[w] = ~(a.words_[w] ^ b.words_[w]) & out.full_word(w);
    return out;
  }

  friend bool operator==(const SyndromeSample&, const SyndromeSample&) = default;

 private:
  void clear_padding() {
    if (!words_.empty()) words_.back() &= full_word(words_.size() - 1);
  }

  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// bits[i] = 0 iff e anticommutes with g_i. Z on q flips q, X on q flips the
/// neighbors of q, Y flips both.
inline SyndromeSample syndrome_of(const ClusterGraph& g, const PauliString& e) {
  SyndromeSample s(g.size());
  for (const auto& site : e.sites()) {
    if (!g.contains(site.label))
      throw Error(ErrorKind::invalid_label, "error acts outside the graph");
    if (has_z(site.pauli)) s.flip(site.label);
    if (has_x(site.pauli))
      for (Label n : g.neighbors(site.label)) s.flip(n);
  }
  return s;
}

// ---------------------------------------------------------------------------
// PauliErrorModel
// ---------------------------------------------------------------------------

/// One independently firing error source.
struct ErrorEvent {
  struct Branch {
    std::array<Pauli, 2> letters{Pauli::I, Pauli::I};  // in support order
    double weight = 0.0;
  };

  std::vector<Label> support;  // one label or an adjacent pair
  double trigger = 0.0;
  std::vector<Branch> dist;

  PauliString branch_string(std::size_t k) const {
    std::vector<PauliString::Site> sites;
    for (std::size_t s = 0; s < support.size(); ++s) sites.push_back({support[s], dist[k].letters[s]});
    return PauliString::from_sites(std::move(sites));
  }
  std::string branch_key(std::size_t k) const {
    std::string key;
    for (std::size_t s = 0; s < support.size(); ++s) key += to_char(dist[k].letters[s]);
    return key;
  }
};

inline void check_probability(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(ErrorKind::invalid_probability, what + " must lie in [0,1], got " + std::to_string(p));
}

/// Product channel of independent events.
class PauliErrorModel {
 public:
  PauliErrorModel() = default;
  explicit PauliErrorModel(std::vector<ErrorEvent> events) : events_(std::move(events)) {}

  std::span<const ErrorEvent> events() const { return events_; }
  std::size_t size() const { return events_.size(); }

  /// Checks probabilities and that supports fit (and pairs are adjacent in) g.
  void validate(const ClusterGraph& g) const {
    for (const auto& ev : events_) {
      check_probability(ev.trigger, "trigger probability");
      if (ev.support.empty() || ev.support.size() > 2)
        throw Error(ErrorKind::invalid_size, "event support must be one qubit or a pair");
      for (Label q : ev.support)
        if (!g.contains(q)) throw Error(ErrorKind::invalid_label, "event support outside the graph");
      if (ev.support.size() == 2 && !g.adjacent(ev.support[0], ev.support[1]))
        throw Error(ErrorKind::invalid_label, "pair event on non-adjacent qubits");
      double total = 0.0;
      for (const auto& b : ev.dist) {
        check_probability(b.weight, "conditional probability");
        total += b.weight;
      }
      if (ev.dist.empty() || std::abs(total - 1.0) > 1e-9)
        throw Error(ErrorKind::invalid_probability, "conditional probabilities must sum to 1");
    }
  }

 private:
  std::vector<ErrorEvent> events_;
};

/// One event per qubit; X, Y, Z each with conditional probability 1/3.
inline PauliErrorModel standard_single_depolarizing(const ClusterGraph& g, double p) {
  check_probability(p, "p");
  std::vector<ErrorEvent> events;
  for (Label q = 1; q <= g.size(); ++q) {
    ErrorEvent ev;
    ev.support = {q};
    ev.trigger = p;
    for (Pauli l : {Pauli::X, Pauli::Y, Pauli::Z}) ev.dist.push_back({{l, Pauli::I}, 1.0 / 3.0});
    events.push_back(std::move(ev));
  }
  return PauliErrorModel(std::move(events));
}

/// One event per edge; the nine non-identity pair combinations each 1/9.
inline PauliErrorModel standard_pair_depolarizing(const ClusterGraph& g, double p) {
  check_probability(p, "p");
  std::vector<ErrorEvent> events;
  for (auto [a, b] : g.edges()) {
    ErrorEvent ev;
    ev.support = {a, b};
    ev.trigger = p;
    for (Pauli l : {Pauli::X, Pauli::Y, Pauli::Z})
      for (Pauli m : {Pauli::X, Pauli::Y, Pauli::Z}) ev.dist.push_back({{l, m}, 1.0 / 9.0});
    events.push_back(std::move(ev));
  }
  return PauliErrorModel(std::move(events));
}

namespace detail {

inline std::uint64_t trigger_threshold(double p) {
  if (p <= 0.0) return 0;
  return static_cast<std::uint64_t>(std::ldexp(p, 64));
}

/// Draws for one event: returns the fired branch or -1. Consumes one word,
/// plus one more if the event fires.
template <class Rng>
int draw_event(std::uint64_t threshold, bool always, std::span<const double> cdf, Rng& rng) {
  const std::uint64_t u = rng();
  if (!always && u >= threshold) return -1;
  const double r = rng.uniform();
  for (std::size_t k = 0; k + 1 < cdf.size(); ++k)
    if (r < cdf[k]) return static_cast<int>(k);
  return static_cast<int>(cdf.size()) - 1;
}

inline std::vector<double> cumulative(const ErrorEvent& ev) {
  std::vector<double> cdf;
  double acc = 0.0;
  for (const auto& b : ev.dist) cdf.push_back(acc += b.weight);
  return cdf;
}

}  // namespace detail

/// Product of the independently fired events' Pauli strings.
inline PauliString sample_error(const PauliErrorModel& m, RngStream& rng) {
  std::vector<PauliString::Site> sites;
  for (const auto& ev : m.events()) {
    const auto cdf = detail::cumulative(ev);
    const int k = detail::draw_event(detail::trigger_threshold(ev.trigger), ev.trigger >= 1.0, cdf, rng);
    if (k < 0) continue;
    for (std::size_t s = 0; s < ev.support.size(); ++s)
      sites.push_back({ev.support[s], ev.dist[static_cast<std::size_t>(k)].letters[s]});
  }
  // from_sites multiplies repeated labels in event order; the fired events
  // are Hermitian Paulis, so any residual phase is a global sign we drop.
  return PauliString::from_sites(std::move(sites)).with_phase(0);
}

/// Compiled form of a model that samples syndromes directly, consuming the
/// stream exactly as sample_error does.
class SyndromeSampler {
 public:
  SyndromeSampler(const ClusterGraph& g, const PauliErrorModel& m) : n_(g.size()) {
    m.validate(g);
    for (const auto& ev : m.events()) {
      Compiled c;
      c.threshold = detail::trigger_threshold(ev.trigger);
      c.always = ev.trigger >= 1.0;
      c.never = ev.trigger <= 0.0;
      c.cdf_begin = cdf_.size();
      for (double v : detail::cumulative(ev)) cdf_.push_back(v);
      c.cdf_end = cdf_.size();
      c.flip_begin = flips_.size();
      for (std::size_t k = 0; k < ev.dist.size(); ++k) {
        SyndromeSample s = syndrome_of(g, ev.branch_string(k));
        FlipSpan span{words_.size(), 0};
        for (std::size_t w = 0; w < s.words().size(); ++w) {
          std::uint64_t fl = ~s.words()[w] & s.full_word(w);
          if (fl) {
            words_.push_back({w, fl});
            ++span.count;
          }
        }
        flips_.push_back(span);
      }
      events_.push_back(c);
    }
  }

  std::size_t size() const { return n_; }

  /// Overwrites `out` (which must have size N) with a fresh sample.
  void sample(RngStream& rng, SyndromeSample& out) const {
    out.reset();
    auto words = out.words();
    for (const auto& ev : events_) {
      if (ev.never) {
        (void)rng();
        continue;
      }
      const int k = detail::draw_event(ev.threshold, ev.always,
                                       std::span<const double>(cdf_).subspan(ev.cdf_begin, ev.cdf_end - ev.cdf_begin),
                                       rng);
      if (k < 0) continue;
      const FlipSpan& fs = flips_[ev.flip_begin + static_cast<std::size_t>(k)];
      for (std::size_t f = fs.begin; f < fs.begin + fs.count; ++f) words[words_[f].first] ^= words_[f].second;
    }
  }

 private:
  struct Compiled {
    std::uint64_t threshold = 0;
    bool always = false, never = false;
    std::size_t cdf_begin = 0, cdf_end = 0, flip_begin = 0;
  };
  struct FlipSpan {
    std::size_t begin, count;
  };
  std::size_t n_;
  std::vector<Compiled> events_;
  std::vector<double> cdf_;
  std::vector<FlipSpan> flips_;
  std::vector<std::pair<std::size_t, std::uint64_t>> words_;
};

// ---------------------------------------------------------------------------
// KrausChannel
// ---------------------------------------------------------------------------

/// Single Kraus operator written in the Pauli basis, acting on one qubit
/// (E = alpha + sum_j beta_j sigma_j) or an adjacent pair
/// (E = sum_{j,j'} beta_{jj'} sigma_j sigma_j', sigma_0 = identity).
/// Coefficients are indexed in the order I, X, Y, Z.
struct KrausChannel {
  std::vector<Label> target;
  std::array<std::complex<double>, 4> single{};      // alpha, beta_x, beta_y, beta_z
  std::array<std::complex<double>, 16> pair{};       // beta_{jj'} at 4*j + j'

  static constexpr std::array<Pauli, 4> kOrder{Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};

  static KrausChannel single_qubit(Label q, std::complex<double> alpha, std::complex<double> bx,
                                   std::complex<double> by, std::complex<double> bz) {
    KrausChannel ch;
    ch.target = {q};
    ch.single = {alpha, bx, by, bz};
    return ch;
  }
  static KrausChannel two_qubit(Label m, Label n, const std::array<std::complex<double>, 16>& beta) {
    KrausChannel ch;
    ch.target = {m, n};
    ch.pair = beta;
    return ch;
  }

  bool is_pair() const { return target.size() == 2; }

  /// Number of Pauli terms and the k-th term's coefficient and string.
  std::size_t term_count() const { return is_pair() ? 16 : 4; }
  std::complex<double> coefficient(std::size_t k) const { return is_pair() ? pair[k] : single[k]; }
  PauliString term(std::size_t k) const {
    if (!is_pair()) return PauliString::from_sites({{target[0], kOrder[k]}});
    return PauliString::from_sites({{target[0], kOrder[k / 4]}, {target[1], kOrder[k % 4]}});
  }

  /// |alpha|^2 + sum |beta|^2.
  double weight() const {
    double w = 0.0;
    for (std::size_t k = 0; k < term_count(); ++k) w += std::norm(coefficient(k));
    return w;
  }

  void validate(const ClusterGraph& g) const {
    if (target.empty() || target.size() > 2)
      throw Error(ErrorKind::invalid_size, "Kraus target must be one qubit or a pair");
    for (Label q : target)
      if (!g.contains(q)) throw Error(ErrorKind::invalid_label, "Kraus target outside the graph");
    if (is_pair() && !g.adjacent(target[0], target[1]))
      throw Error(ErrorKind::invalid_label, "Kraus pair target must be adjacent");
    if (weight() > 1.0 + 1e-12) throw Error(ErrorKind::invalid_probability, "Kraus weight exceeds 1");
  }
};

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline nlohmann::json model_to_json(const PauliErrorModel& m) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& ev : m.events()) {
    nlohmann::json dist = nlohmann::json::object();
    for (std::size_t k = 0; k < ev.dist.size(); ++k) dist[ev.branch_key(k)] = ev.dist[k].weight;
    events.push_back({{"support", ev.support}, {"p", ev.trigger}, {"dist", dist}});
  }
  return {{"events", events}};
}

inline PauliErrorModel model_from_json(const nlohmann::json& j, const ClusterGraph& g) {
  std::vector<ErrorEvent> events;
  try {
    for (const auto& je : j.at("events")) {
      ErrorEvent ev;
      ev.support = je.at("support").get<std::vector<Label>>();
      ev.trigger = je.at("p").get<double>();
      for (const auto& [key, w] : je.at("dist").items()) {
        if (key.size() != ev.support.size())
          throw Error(ErrorKind::parse, "dist key '" + key + "' does not match the support size");
        ErrorEvent::Branch b;
        bool any = false;
        for (std::size_t s = 0; s < key.size(); ++s) {
          b.letters[s] = pauli_from_char(key[s]);
          any |= b.letters[s] != Pauli::I;
        }
        if (!any) throw Error(ErrorKind::parse, "dist key must contain a non-identity Pauli");
        b.weight = w.get<double>();
        ev.dist.push_back(b);
      }
      events.push_back(std::move(ev));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("error model JSON: ") + e.what());
  }
  PauliErrorModel m(std::move(events));
  m.validate(g);
  return m;
}

}  // namespace clusterfid
