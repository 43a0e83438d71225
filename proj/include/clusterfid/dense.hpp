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

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "clusterfid/bounds.hpp"
#include "clusterfid/error.hpp"
#include "clusterfid/lattice.hpp"
#include "clusterfid/noise.hpp"
#include "clusterfid/pauli.hpp"
#include "clusterfid/settings.hpp"

namespace clusterfid {

using cplx = std::complex<double>;

inline constexpr std::size_t kMaxPureQubits = 14;
inline constexpr std::size_t kMaxMixedQubits = 10;
inline constexpr double kEnumerationBudget = 1e7;

// Basis index convention: label 1 is the most significant bit.

namespace detail {

struct PauliAction {
  std::uint64_t xmask = 0, zmask = 0, ymask = 0;  // ymask: sites carrying Y
  cplx global{1.0, 0.0};
};

inline PauliAction action_of(const PauliString& p, std::size_t n) {
  PauliAction a;
  for (const auto& s : p.sites()) {
    if (s.label < 1 || s.label > n) throw Error(ErrorKind::invalid_label, "Pauli acts outside the state");
    const std::uint64_t bit = 1ull << (n - s.label);
    if (has_x(s.pauli)) a.xmask |= bit;
    if (has_z(s.pauli)) a.zmask |= bit;
    if (s.pauli == Pauli::Y) a.ymask |= bit;
  }
  static const cplx kPhase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  // Y|b> = i (-1)^b |b^1>: one factor i per Y site.
  a.global = kPhase[(p.log_i() + std::popcount(a.ymask)) & 3];
  return a;
}

/// P|a> = phi(a) |a ^ xmask>.
inline cplx phi(const PauliAction& a, std::uint64_t idx) {
  return (std::popcount(idx & a.zmask) & 1) ? -a.global : a.global;
}

}  // namespace detail

/// Pure state on N <= 14 qubits.
struct StateVector {
  std::size_t n = 0;
  std::vector<cplx> amp;

  std::size_t dim() const { return amp.size(); }
  double norm_sq() const {
    double s = 0;
    for (const auto& c : amp) s += std::norm(c);
    return s;
  }
  cplx inner(const StateVector& o) const {
    cplx s = 0;
    for (std::size_t k = 0; k < amp.size(); ++k) s += std::conj(amp[k]) * o.amp[k];
    return s;
  }
};

/// Density matrix on N <= 10 qubits, row-major.
struct DensityMatrix {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<cplx> m;

  cplx& at(std::size_t r, std::size_t c) { return m[r * dim + c]; }
  const cplx& at(std::size_t r, std::size_t c) const { return m[r * dim + c]; }
  cplx trace() const {
    cplx s = 0;
    for (std::size_t k = 0; k < dim; ++k) s += at(k, k);
    return s;
  }
};

/// |+>^N followed by CZ on every edge.
inline StateVector build_cluster_state(const ClusterGraph& g) {
  if (g.size() > kMaxPureQubits)
    throw Error(ErrorKind::too_large, "dense state limited to " + std::to_string(kMaxPureQubits) + " qubits");
  const std::size_t n = g.size(), dim = std::size_t{1} << n;
  StateVector s{n, std::vector<cplx>(dim)};
  const double a = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<std::uint64_t> edge_masks;
  for (auto [u, v] : g.edges()) edge_masks.push_back((1ull << (n - u)) | (1ull << (n - v)));
  for (std::size_t idx = 0; idx < dim; ++idx) {
    int parity = 0;
    for (auto m : edge_masks) parity ^= ((idx & m) == m);
    s.amp[idx] = parity ? -a : a;
  }
  return s;
}

inline StateVector apply_pauli(const StateVector& s, const PauliString& p) {
  const auto a = detail::action_of(p, s.n);
  StateVector out{s.n, std::vector<cplx>(s.dim())};
  for (std::size_t idx = 0; idx < s.dim(); ++idx) out.amp[idx ^ a.xmask] = detail::phi(a, idx) * s.amp[idx];
  return out;
}

/// <s|P|s>.
inline cplx expectation(const StateVector& s, const PauliString& p) {
  const auto a = detail::action_of(p, s.n);
  cplx acc = 0;
  for (std::size_t idx = 0; idx < s.dim(); ++idx)
    acc += std::conj(s.amp[idx ^ a.xmask]) * detail::phi(a, idx) * s.amp[idx];
  return acc;
}

inline DensityMatrix to_density(const StateVector& s) {
  if (s.n > kMaxMixedQubits)
    throw Error(ErrorKind::too_large, "density matrix limited to " + std::to_string(kMaxMixedQubits) + " qubits");
  DensityMatrix r{s.n, s.dim(), std::vector<cplx>(s.dim() * s.dim())};
  for (std::size_t i = 0; i < r.dim; ++i)
    for (std::size_t j = 0; j < r.dim; ++j) r.at(i, j) = s.amp[i] * std::conj(s.amp[j]);
  return r;
}

/// P rho P^dagger.
inline DensityMatrix conjugate(const DensityMatrix& rho, const PauliString& p) {
  const auto a = detail::action_of(p, rho.n);
  DensityMatrix out{rho.n, rho.dim, std::vector<cplx>(rho.m.size())};
  std::vector<cplx> ph(rho.dim);
  for (std::size_t k = 0; k < rho.dim; ++k) ph[k] = detail::phi(a, k);
  for (std::size_t i = 0; i < rho.dim; ++i)
    for (std::size_t j = 0; j < rho.dim; ++j)
      out.at(i ^ a.xmask, j ^ a.xmask) = ph[i] * std::conj(ph[j]) * rho.at(i, j);
  return out;
}

/// Tr(P rho).
inline cplx trace_with(const DensityMatrix& rho, const PauliString& p) {
  const auto a = detail::action_of(p, rho.n);
  cplx acc = 0;
  for (std::size_t b = 0; b < rho.dim; ++b) acc += detail::phi(a, b) * rho.at(b, b ^ a.xmask);
  return acc;
}

/// Cluster state pushed through every event of the model, in order.
inline DensityMatrix noisy_density(const ClusterGraph& g, const PauliErrorModel& model) {
  model.validate(g);
  DensityMatrix rho = to_density(build_cluster_state(g));
  for (const auto& ev : model.events()) {
    if (ev.trigger <= 0.0) continue;
    DensityMatrix next = rho;
    for (auto& c : next.m) c *= 1.0 - ev.trigger;
    for (std::size_t k = 0; k < ev.dist.size(); ++k) {
      const double w = ev.trigger * ev.dist[k].weight;
      if (w == 0.0) continue;
      const DensityMatrix c = conjugate(rho, ev.branch_string(k));
      for (std::size_t e = 0; e < next.m.size(); ++e) next.m[e] += w * c.m[e];
    }
    rho = std::move(next);
  }
  return rho;
}

/// <Psi| rho |Psi>.
inline double dense_fidelity(const DensityMatrix& rho, const StateVector& psi) {
  cplx acc = 0;
  for (std::size_t i = 0; i < rho.dim; ++i)
    for (std::size_t j = 0; j < rho.dim; ++j) acc += std::conj(psi.amp[i]) * rho.at(i, j) * psi.amp[j];
  return acc.real();
}

/// Tr{P_b rho} with P_b built from the exact expansion.
inline double dense_bound_expectation(const ClusterGraph& g, const PauliErrorModel& model, BoundId b) {
  check_compatible(g, b);
  const DensityMatrix rho = noisy_density(g, model);
  const TermExpansion ex = expand_bound(g, b);
  double v = ex.constant.to_double();
  for (const auto& [t, c] : ex.terms) v += c.to_double() * trace_with(rho, pauli_of_subset(g, t)).real();
  return v;
}

/// Number of distinct error patterns (zero-probability branches pruned).
inline double pattern_count(const PauliErrorModel& model) {
  double n = 1;
  for (const auto& ev : model.events()) {
    double branches = ev.trigger < 1.0 ? 1 : 0;
    if (ev.trigger > 0.0)
      for (const auto& b : ev.dist) branches += b.weight > 0.0 ? 1 : 0;
    n *= std::max(branches, 1.0);
  }
  return n;
}

/// Exact sum over error patterns of probability x bound value. Falls back to
/// the density matrix when the pattern count exceeds the budget.
inline double exact_bound_expectation(const ClusterGraph& g, const PauliErrorModel& model, BoundId b) {
  check_compatible(g, b);
  model.validate(g);
  if (pattern_count(model) > kEnumerationBudget) {
    if (g.size() <= kMaxMixedQubits) return dense_bound_expectation(g, model, b);
    throw Error(ErrorKind::too_large, "error-pattern enumeration exceeds the budget and N > " +
                                          std::to_string(kMaxMixedQubits));
  }
  struct Option {
    long double prob;
    SyndromeSample flips;  // syndrome relative to all-ones
  };
  std::vector<std::vector<Option>> levels;
  for (const auto& ev : model.events()) {
    std::vector<Option> opts;
    if (ev.trigger < 1.0) opts.push_back({1.0L - ev.trigger, SyndromeSample(g.size())});
    if (ev.trigger > 0.0)
      for (std::size_t k = 0; k < ev.dist.size(); ++k)
        if (ev.dist[k].weight > 0.0)
          opts.push_back({static_cast<long double>(ev.trigger) * ev.dist[k].weight,
                          syndrome_of(g, ev.branch_string(k))});
    levels.push_back(std::move(opts));
  }
  const BoundEvaluator eval(g);
  // Neumaier summation: up to 1e7 leaves of mixed sign.
  long double total = 0.0L, comp = 0.0L;
  auto add = [&](long double v) {
    const long double t = total + v;
    comp += std::fabs(total) >= std::fabs(v) ? (total - t) + v : (v - t) + total;
    total = t;
  };
  std::vector<SyndromeSample> stack(levels.size() + 1, SyndromeSample(g.size()));
  auto dfs = [&](auto&& self, std::size_t depth, long double prob) -> void {
    if (depth == levels.size()) {
      const int v = eval.eval(b, stack[depth]);
      if (v != 0) add(static_cast<long double>(prob) * v);
      return;
    }
    for (const auto& o : levels[depth]) {
      stack[depth + 1] = stack[depth];
      stack[depth + 1].apply_flips(o.flips);
      self(self, depth + 1, prob * o.prob);
    }
  };
  dfs(dfs, 0, 1.0L);
  return static_cast<double>(total + comp);
}

// ---------------------------------------------------------------------------
// Coherent channels
// ---------------------------------------------------------------------------

inline StateVector apply_kraus(const StateVector& s, const KrausChannel& ch) {
  StateVector out{s.n, std::vector<cplx>(s.dim())};
  for (std::size_t k = 0; k < ch.term_count(); ++k) {
    const cplx c = ch.coefficient(k);
    if (c == cplx{}) continue;
    const StateVector t = apply_pauli(s, ch.term(k));
    for (std::size_t i = 0; i < s.dim(); ++i) out.amp[i] += c * t.amp[i];
  }
  return out;
}

/// True if two distinct nonzero terms of the channel differ by a
/// stabilizer-group element (cross terms then survive, as for pair errors
/// overlapping two-body edge stabilizers of a chain).
inline bool has_surviving_cross_terms(const ClusterGraph& g, const KrausChannel& ch) {
  for (std::size_t a = 0; a < ch.term_count(); ++a)
    for (std::size_t b = a + 1; b < ch.term_count(); ++b) {
      if (ch.coefficient(a) == cplx{} || ch.coefficient(b) == cplx{}) continue;
      if (syndrome_of(g, ch.term(a) * ch.term(b)).all_satisfied()) return true;
    }
  return false;
}

struct MixtureCheck {
  double lhs = 0, rhs = 0;
  bool edge_flagged = false;
};

/// lhs = <Psi|E^dag (prod_T g) E|Psi> from the state vector; rhs = the
/// Pauli-mixture value sum_k |c_k|^2 * (+-1 per anticommuting generator).
inline MixtureCheck coherent_mixture_check(const ClusterGraph& g, const KrausChannel& ch, const Subset& t) {
  if (g.size() > kMaxMixedQubits)
    throw Error(ErrorKind::too_large, "coherent check limited to " + std::to_string(kMaxMixedQubits) + " qubits");
  ch.validate(g);
  const StateVector psi = build_cluster_state(g);
  const StateVector e_psi = apply_kraus(psi, ch);
  const PauliString obs = pauli_of_subset(g, t);
  MixtureCheck r;
  r.lhs = expectation(e_psi, obs).real();
  for (std::size_t k = 0; k < ch.term_count(); ++k) {
    const double w = std::norm(ch.coefficient(k));
    if (w == 0.0) continue;
    const SyndromeSample s = syndrome_of(g, ch.term(k));
    bool neg = false;
    for (Label i : t) neg ^= !s.satisfied(i);
    r.rhs += neg ? -w : w;
  }
  r.edge_flagged = has_surviving_cross_terms(g, ch);
  return r;
}

/// |<Psi|E|Psi>|^2.
inline double kraus_fidelity(const ClusterGraph& g, const KrausChannel& ch) {
  ch.validate(g);
  const StateVector psi = build_cluster_state(g);
  return std::norm(psi.inner(apply_kraus(psi, ch)));
}

}  // namespace clusterfid
