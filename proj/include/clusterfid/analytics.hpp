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
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "clusterfid/bounds.hpp"
#include "clusterfid/lattice.hpp"
#include "clusterfid/noise.hpp"
#include "clusterfid/pauli.hpp"

namespace clusterfid {

// ---------------------------------------------------------------------------
// Closed forms (single-qubit depolarizing chains, second order in p)
// ---------------------------------------------------------------------------

inline double fidelity_closed_form(std::size_t n, double p) {
  check_probability(p, "p");
  return std::pow(1.0 - p, static_cast<double>(n));
}

inline double p0_closed_form(std::size_t n, double p) {
  check_probability(p, "p");
  return 2.0 * std::pow(1.0 - 2.0 * p / 3.0, static_cast<double>(n)) - 1.0;
}

/// Index convention of the far-separated double sum.
///  printed:   i even, j odd,  j > i+2, weight (4p/3)^2 q^{N+i-j}
///  corrected: i odd,  j even, j > i+1, same weight
/// (q = 1 - 2p/3). Only the corrected form matches Monte Carlo.
enum class FarSumConvention { printed, corrected };

struct P1DTerms {
  double p0 = 0, far = 0, adjacent_right = 0, adjacent_left = 0, skip3 = 0;
  double total() const { return p0 + far + adjacent_right + adjacent_left + skip3; }
};

inline P1DTerms p1d_closed_form_terms(std::size_t n, double p, FarSumConvention conv = FarSumConvention::printed) {
  check_probability(p, "p");
  const double N = static_cast<double>(n), q = 1.0 - 2.0 * p / 3.0, p3 = p / 3.0;
  P1DTerms t;
  t.p0 = p0_closed_form(n, p);
  const long ln = static_cast<long>(n);
  const bool printed = conv == FarSumConvention::printed;
  for (long i = printed ? 2 : 1; i <= ln; i += 2)
    for (long j = printed ? 1 : 2; j <= ln; j += 2)
      if (printed ? j > i + 2 : j > i + 1)
        t.far += std::pow(4.0 * p / 3.0, 2) * std::pow(q, static_cast<double>(ln + i - j));
  t.adjacent_right = N * p3 * std::pow(q, N - 3) + N / 2 * p3 * p3 * std::pow(q, N - 2);
  t.adjacent_left = N / 2 * p3 * p3 * std::pow(q, N - 2) + N * p3 * p3 * std::pow(q, N - 3) * (1 - p);
  t.skip3 = N * p3 * p3 * std::pow(q, N - 4) * (1 - p) * (1 - p);
  return t;
}

inline double p1d_closed_form(std::size_t n, double p, FarSumConvention conv = FarSumConvention::printed) {
  return p1d_closed_form_terms(n, p, conv).total();
}

// ---------------------------------------------------------------------------
// Detection table
// ---------------------------------------------------------------------------

struct DetectionRow {
  PauliString pattern;
  std::vector<Label> support;
  int value = 0;       // bound value on the pattern's syndrome
  int reference = 0;   // eval_F on the same syndrome (1 for stabilizer patterns)
  bool detected = false;
  bool bulk = false;
  std::string class_key;  // lattice-translation class of the pattern

  std::string pattern_text() const {
    std::string s;
    for (const auto& site : pattern.sites()) {
      if (!s.empty()) s += '.';
      s += to_char(site.pauli) + std::to_string(site.label);
    }
    return s;
  }
  std::string support_text() const {
    std::string s;
    for (Label q : support) s += (s.empty() ? "" : "-") + std::to_string(q);
    return s;
  }
};

struct DetectionTable {
  BoundId bound = BoundId::P0;
  std::vector<DetectionRow> rows;
};

namespace detail {

/// Support lies at least two sites away from every boundary.
inline bool in_bulk(const ClusterGraph& g, const std::vector<Label>& support) {
  for (Label q : support) {
    if (g.is_chain()) {
      if (q < 3 || q + 2 > g.size()) return false;
    } else {
      const std::size_t r = g.row(q), c = g.col(q);
      if (r < 3 || r + 2 > g.ny() || c < 3 || c + 2 > g.nx()) return false;
    }
  }
  return true;
}

inline std::string class_key(const ClusterGraph& g, Label a, Label b, const std::string& letters) {
  std::string key = g.class_of(a) == GeneratorClass::A ? "A:" : "B:";
  if (b != 0) key += (b == a + 1 ? "h:" : "v:");
  return key + letters;
}

}  // namespace detail

/// All 3N single-qubit and 9 * |edges| adjacent-pair patterns.
/// detected = (value == 0): the bound registers exactly one unit of
/// infidelity for the pattern.
inline DetectionTable detection_table(const ClusterGraph& g, BoundId b) {
  check_compatible(g, b);
  const BoundEvaluator eval(g);
  DetectionTable t{b, {}};
  constexpr Pauli kLetters[] = {Pauli::X, Pauli::Y, Pauli::Z};
  auto push = [&](PauliString e, std::vector<Label> support, std::string key) {
    const SyndromeSample s = syndrome_of(g, e);
    DetectionRow row;
    row.value = eval.eval(b, s);
    row.reference = eval_F(s);
    row.detected = row.value == 0;
    row.bulk = detail::in_bulk(g, support);
    row.pattern = std::move(e);
    row.support = std::move(support);
    row.class_key = std::move(key);
    t.rows.push_back(std::move(row));
  };
  for (Label q = 1; q <= g.size(); ++q)
    for (Pauli l : kLetters) push(PauliString::single(q, l), {q}, detail::class_key(g, q, 0, std::string(1, to_char(l))));
  for (auto [a, c] : g.edges())
    for (Pauli l : kLetters)
      for (Pauli m : kLetters)
        push(PauliString::from_sites({{a, l}, {c, m}}), {a, c},
             detail::class_key(g, a, c, std::string{to_char(l), to_char(m)}));
  return t;
}

inline void write_detection_csv(std::ostream& os, const DetectionTable& t) {
  os << "pattern,support,value,detected\n";
  for (const auto& r : t.rows)
    os << r.pattern_text() << ',' << r.support_text() << ',' << r.value << ',' << (r.detected ? 1 : 0) << '\n';
}

struct ClassTally {
  std::size_t instances = 0, detected = 0;
  bool uniform() const { return detected == 0 || detected == instances; }
};

/// Bulk rows grouped by translation class; `weight` selects single (1) or
/// pair (2) patterns.
inline std::map<std::string, ClassTally> bulk_classes(const DetectionTable& t, std::size_t weight) {
  std::map<std::string, ClassTally> out;
  for (const auto& r : t.rows) {
    if (!r.bulk || r.support.size() != weight) continue;
    auto& c = out[r.class_key];
    ++c.instances;
    c.detected += r.detected ? 1 : 0;
  }
  return out;
}

/// Fraction of bulk pattern classes of the given weight that are detected.
inline double bulk_detected_fraction(const DetectionTable& t, std::size_t weight) {
  const auto classes = bulk_classes(t, weight);
  if (classes.empty()) return 0.0;
  double det = 0;
  for (const auto& [k, c] : classes) det += static_cast<double>(c.detected) / static_cast<double>(c.instances);
  return det / static_cast<double>(classes.size());
}

/// Infidelity the reference registers over the infidelity b registers, over
/// bulk single and pair patterns with equal weights. A pattern whose
/// syndrome gives value v registers 1 - v units of infidelity. The
/// reference is P1D on chains and F on grids.
inline double first_order_catch_fraction(const ClusterGraph& g, BoundId b) {
  const BoundId ref = g.is_chain() ? BoundId::P1D : BoundId::F_exact;
  const DetectionTable tb = detection_table(g, b);
  const DetectionTable tr = detection_table(g, ref);
  double num = 0, den = 0;
  for (std::size_t k = 0; k < tb.rows.size(); ++k) {
    if (!tb.rows[k].bulk) continue;
    num += 1 - tr.rows[k].value;
    den += 1 - tb.rows[k].value;
  }
  return den == 0 ? 1.0 : num / den;
}

// ---------------------------------------------------------------------------
// CSV helpers
// ---------------------------------------------------------------------------

/// Decimal, 12 significant digits.
inline std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace clusterfid
