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
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "clusterfid/bounds.hpp"
#include "clusterfid/error.hpp"
#include "clusterfid/lattice.hpp"
#include "clusterfid/pauli.hpp"
#include "clusterfid/rational.hpp"

namespace clusterfid {

using Subset = std::vector<Label>;  // sorted generator labels

inline constexpr std::size_t kDefaultTermCap = 1'000'000;

// ---------------------------------------------------------------------------
// Expansion
// ---------------------------------------------------------------------------

/// bound = constant + sum_T c_T <prod_{i in T} g_i>.
struct TermExpansion {
  Rational constant;
  std::map<Subset, Rational> terms;

  /// Expansion evaluated on a syndrome (g_i -> +1 if satisfied else -1).
  Rational value(const SyndromeSample& s) const {
    Rational v = constant;
    for (const auto& [t, c] : terms) {
      bool neg = false;
      for (Label q : t) neg ^= !s.satisfied(q);
      v += neg ? -c : c;
    }
    return v;
  }
};

namespace detail {

/// One product of G/E factors read off a bound.
struct Product {
  std::vector<Label> labels;  // sorted
  std::vector<bool> is_e;
  int sign = 1;
};

inline std::vector<Product> bound_products(const ClusterGraph& g, BoundId b) {
  std::vector<Product> out;
  auto all_g = [](std::span<const Label> ls, int sign) {
    Product p;
    p.labels.assign(ls.begin(), ls.end());
    p.is_e.assign(ls.size(), false);
    p.sign = sign;
    return p;
  };
  const auto A = g.members(GeneratorClass::A);
  const auto B = g.members(GeneratorClass::B);
  if (b == BoundId::F_exact) {
    std::vector<Label> all;
    for (Label q = 1; q <= g.size(); ++q) all.push_back(q);
    out.push_back(all_g(all, 1));
    return out;
  }
  out.push_back(all_g(A, 1));
  out.push_back(all_g(B, 1));
  if (b == BoundId::P0) return out;
  const long nx = static_cast<long>(g.nx());
  for (Label i : A)
    for (Label j : B) {
      const long li = i, lj = j;
      bool ok = false;
      if (b == BoundId::P1D) ok = lj >= li - 3;
      else if (b == BoundId::P1D_simplified) ok = lj > li - 3;
      else ok = lj - li >= nx;
      if (!ok) continue;
      std::vector<std::pair<Label, bool>> f;
      for (Label k : A)
        if (k < i) f.push_back({k, false});
      f.push_back({i, true});
      f.push_back({j, true});
      for (Label m : B)
        if (m > j) f.push_back({m, false});
      std::sort(f.begin(), f.end());
      Product p;
      for (auto [l, e] : f) p.labels.push_back(l), p.is_e.push_back(e);
      out.push_back(std::move(p));
    }
  return out;
}

}  // namespace detail

/// Raw subset count sum 2^{|factors|} (saturating); this is what the cap
/// is checked against.
inline double raw_term_count(const ClusterGraph& g, BoundId b) {
  check_compatible(g, b);
  double total = 0.0;
  for (const auto& p : detail::bound_products(g, b)) total += std::ldexp(1.0, static_cast<int>(p.labels.size()));
  return total;
}

/// Exact expansion via G = (1+g)/2, E = (1-g)/2. Zero coefficients dropped.
inline TermExpansion expand_bound(const ClusterGraph& g, BoundId b, std::size_t cap = kDefaultTermCap) {
  check_compatible(g, b);
  const double raw = raw_term_count(g, b);
  if (raw > static_cast<double>(cap)) {
    char need[32];
    std::snprintf(need, sizeof need, "%.4g", raw);
    throw Error(ErrorKind::too_large, "expansion of " + std::string(to_string(b)) + " on " + g.describe() +
                                          " needs " + need + " subsets (cap " + std::to_string(cap) + ")");
  }
  TermExpansion ex;
  std::map<Subset, Rational>& acc = ex.terms;
  Rational constant = b == BoundId::F_exact ? Rational(0) : Rational(-1);
  for (const auto& p : detail::bound_products(g, b)) {
    const std::size_t k = p.labels.size();
    const Rational unit(p.sign, std::int64_t{1} << k);
    std::uint64_t emask = 0;
    for (std::size_t f = 0; f < k; ++f)
      if (p.is_e[f]) emask |= 1ull << f;
    for (std::uint64_t sub = 0; sub < (1ull << k); ++sub) {
      const Rational c = (std::popcount(sub & emask) & 1) ? -unit : unit;
      if (sub == 0) {
        constant += c;
        continue;
      }
      Subset t;
      for (std::size_t f = 0; f < k; ++f)
        if (sub >> f & 1) t.push_back(p.labels[f]);
      acc[std::move(t)] += c;
    }
  }
  for (auto it = acc.begin(); it != acc.end();) it = it->second.is_zero() ? acc.erase(it) : std::next(it);
  ex.constant = constant;
  return ex;
}

/// Ordered product of generators in T. The generators commute, so the
/// phase must be real; it is -1 when the induced edge count plus the
/// number of Y sites is odd (e.g. g1 g2 g3 = -Y1 X2 Y3 on a chain).
inline PauliString pauli_of_subset(const ClusterGraph& g, const Subset& t) {
  if (t.empty()) throw Error(ErrorKind::invalid_size, "subset must be non-empty");
  PauliString p;
  for (Label i : t) {
    if (!g.contains(i)) throw Error(ErrorKind::invalid_label, "subset label out of range");
    p = p * stabilizer(g, i);
  }
  if (!p.is_hermitian()) throw Error(ErrorKind::internal, "generator product with imaginary phase: " + p.to_string());
  return p;
}

/// Per-qubit letters of prod_{i in T} g_i without phase tracking.
inline std::vector<Pauli> letters_of_subset(const ClusterGraph& g, const Subset& t) {
  std::vector<std::uint8_t> x(g.size() + 1, 0), z(g.size() + 1, 0);
  for (Label i : t) {
    x[i] ^= 1;
    for (Label n : g.neighbors(i)) z[n] ^= 1;
  }
  std::vector<Pauli> out(g.size());
  for (Label q = 1; q <= g.size(); ++q) out[q - 1] = pauli_from_bits(x[q], z[q]);
  return out;
}

// ---------------------------------------------------------------------------
// Settings
// ---------------------------------------------------------------------------

struct MeasurementSetting {
  std::string id;
  std::vector<Pauli> basis;             // basis[q-1]
  std::vector<Subset> terms;            // every expansion key measurable here
  std::vector<Subset> primary;          // keys estimated from this setting

  Pauli at(Label q) const { return basis.at(q - 1); }
  bool measures(const PauliString& p) const {
    for (const auto& s : p.sites())
      if (basis.at(s.label - 1) != s.pauli) return false;
    return true;
  }
  std::string basis_string() const {
    std::string s;
    for (Pauli p : basis) s += to_char(p);
    return s;
  }
};

namespace detail {

inline Pauli left_pattern(const ClusterGraph& g, Label q) {
  return g.class_of(q) == GeneratorClass::A ? Pauli::X : Pauli::Z;
}
inline Pauli right_pattern(const ClusterGraph& g, Label q) {
  return g.class_of(q) == GeneratorClass::A ? Pauli::Z : Pauli::X;
}

/// Labels < lo take the left pattern, labels > hi the right pattern, and
/// labels in [lo, hi] carry the letters of prod_{W} g (Z where trivial).
inline std::vector<Pauli> window_basis(const ClusterGraph& g, long lo, long hi, const Subset& w) {
  std::vector<Pauli> letters = w.empty() ? std::vector<Pauli>(g.size(), Pauli::I) : letters_of_subset(g, w);
  std::vector<Pauli> b(g.size());
  for (Label q = 1; q <= g.size(); ++q) {
    const long lq = q;
    if (lq < lo) b[q - 1] = left_pattern(g, q);
    else if (lq > hi) b[q - 1] = right_pattern(g, q);
    else b[q - 1] = letters[q - 1] == Pauli::I ? Pauli::Z : letters[q - 1];
  }
  return b;
}

class BasisList {
 public:
  void add(std::string id, std::vector<Pauli> basis) {
    if (!seen_.insert(basis).second) return;
    out_.push_back({std::move(id), std::move(basis), {}, {}});
  }
  std::vector<MeasurementSetting> take() { return std::move(out_); }

 private:
  std::set<std::vector<Pauli>> seen_;
  std::vector<MeasurementSetting> out_;
};

}  // namespace detail

/// Window construction only (no expansion); works at any size. Settings
/// come back with empty term lists. Duplicate bases keep the first id.
inline std::vector<MeasurementSetting> compile_bases(const ClusterGraph& g, BoundId b) {
  check_compatible(g, b);
  if (b == BoundId::F_exact)
    throw Error(ErrorKind::too_large, "F_exact needs the full stabilizer group; refusing to compile");
  const long n = static_cast<long>(g.size());
  detail::BasisList list;
  list.add("Mo", detail::window_basis(g, n + 1, n + 1, {}));
  list.add("Me", detail::window_basis(g, 0, 0, {}));
  if (b == BoundId::P0) return list.take();

  auto in_range = [&](std::initializer_list<long> ls) {
    Subset s;
    for (long l : ls)
      if (l >= 1 && l <= n) s.push_back(static_cast<Label>(l));
    std::sort(s.begin(), s.end());
    return s;
  };
  auto at = [](const char* name, long i) { return std::string(name) + "@" + std::to_string(i); };

  for (Label ia : g.members(GeneratorClass::A)) {
    const long i = ia;
    if (g.is_grid()) {
      const long j = i + static_cast<long>(g.nx());
      if (j > n) continue;
      list.add(at("Mc", i), detail::window_basis(g, i, j, in_range({i})));
      list.add(at("Md", i), detail::window_basis(g, i, j, in_range({i, j})));
      continue;
    }
    if (i + 1 <= n) {
      list.add(at("M1", i), detail::window_basis(g, i + 1, i + 1, in_range({i})));
      list.add(at("M2", i), detail::window_basis(g, i, i + 1, in_range({i, i + 1})));
    }
    if (i - 1 >= 1) {
      const long lo = i - 2, hi = std::min(i + 1, n);
      list.add(at("M3", i), detail::window_basis(g, lo, hi, in_range({i - 2, i - 1, i, i + 1})));
      list.add(at("M4", i), detail::window_basis(g, lo, hi, in_range({i - 2, i - 1, i})));
      list.add(at("M5", i), detail::window_basis(g, lo, hi, in_range({i - 1, i, i + 1})));
      list.add(at("M6", i), detail::window_basis(g, lo, hi, in_range({i - 1, i})));
    }
    if (b == BoundId::P1D && i - 3 >= 1) {
      const long lo = std::max(i - 4, 1L), hi = std::min(i + 1, n);
      const Subset extra = in_range({i - 4, i - 2, i - 1, i + 1});
      for (std::uint32_t u = 0; u < (1u << extra.size()); ++u) {
        Subset w{static_cast<Label>(i - 3), ia};
        for (std::size_t k = 0; k < extra.size(); ++k)
          if (u >> k & 1) w.push_back(extra[k]);
        std::sort(w.begin(), w.end());
        list.add(at(("M" + std::to_string(7 + u)).c_str(), i), detail::window_basis(g, lo, hi, w));
      }
    }
  }
  return list.take();
}

/// Settings plus term coverage. Every key of the expansion is covered and
/// gets exactly one primary setting (the first covering one in order).
inline std::vector<MeasurementSetting> compile(const ClusterGraph& g, BoundId b,
                                               std::size_t cap = kDefaultTermCap) {
  auto settings = compile_bases(g, b);
  const TermExpansion ex = expand_bound(g, b, cap);
  for (const auto& [t, c] : ex.terms) {
    const PauliString p = pauli_of_subset(g, t);
    bool assigned = false;
    for (auto& s : settings) {
      if (!s.measures(p)) continue;
      s.terms.push_back(t);
      if (!assigned) s.primary.push_back(t), assigned = true;
    }
    if (!assigned) {
      std::string ts;
      for (Label q : t) ts += (ts.empty() ? "" : ",") + std::to_string(q);
      throw Error(ErrorKind::internal, "term {" + ts + "} is not covered by any setting");
    }
  }
  return settings;
}

// ---------------------------------------------------------------------------
// Shots and estimation
// ---------------------------------------------------------------------------

struct ShotRecord {
  std::string setting_id;
  std::vector<std::int8_t> outcomes;  // +1 / -1 per qubit, index q-1
};

/// Sign of p times the product of outcomes over its support: the sampled
/// value of p.
inline int outcome_product(const PauliString& p, const std::vector<std::int8_t>& outcomes) {
  int v = p.log_i() == 2 ? -1 : 1;
  for (const auto& s : p.sites()) v *= outcomes.at(s.label - 1);
  return v;
}

/// Per-setting combined estimator: y = sum_{T primary here} c_T o_T per
/// shot. Setting means add; their variances add (settings independent).
inline BoundEstimate estimate_from_shots(const ClusterGraph& g, BoundId b,
                                         const std::vector<MeasurementSetting>& settings,
                                         const std::vector<ShotRecord>& shots, std::uint64_t seed = 0,
                                         std::size_t cap = kDefaultTermCap) {
  const TermExpansion ex = expand_bound(g, b, cap);
  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < settings.size(); ++k) index[settings[k].id] = k;

  struct Acc {
    std::vector<std::pair<std::vector<Label>, double>> terms;  // support, coefficient
    double sum = 0, sum_sq = 0;
    std::uint64_t n = 0;
  };
  std::vector<Acc> acc(settings.size());
  std::set<Subset> assigned;
  for (std::size_t k = 0; k < settings.size(); ++k)
    for (const auto& t : settings[k].primary) {
      auto it = ex.terms.find(t);
      if (it == ex.terms.end()) throw Error(ErrorKind::incomplete_data, "setting lists a term outside the expansion");
      if (!assigned.insert(t).second) throw Error(ErrorKind::incomplete_data, "term has two primary settings");
      const PauliString p = pauli_of_subset(g, t);
      std::vector<Label> support;
      for (const auto& s : p.sites()) support.push_back(s.label);
      const double sign = p.log_i() == 2 ? -1.0 : 1.0;
      acc[k].terms.push_back({std::move(support), sign * it->second.to_double()});
    }
  if (assigned.size() != ex.terms.size())
    throw Error(ErrorKind::incomplete_data, "settings do not cover every term of " + std::string(to_string(b)));

  std::uint64_t total = 0;
  for (const auto& rec : shots) {
    auto it = index.find(rec.setting_id);
    if (it == index.end()) throw Error(ErrorKind::incomplete_data, "shot for unknown setting '" + rec.setting_id + "'");
    if (rec.outcomes.size() != g.size()) throw Error(ErrorKind::invalid_size, "shot length does not match the graph");
    Acc& a = acc[it->second];
    double y = 0;
    for (const auto& [support, c] : a.terms) {
      int v = 1;
      for (Label q : support) v *= rec.outcomes[q - 1];
      y += c * v;
    }
    a.sum += y;
    a.sum_sq += y * y;
    ++a.n;
    ++total;
  }

  double mean = ex.constant.to_double(), var = 0;
  for (std::size_t k = 0; k < settings.size(); ++k) {
    const Acc& a = acc[k];
    if (a.terms.empty()) continue;
    if (a.n == 0) throw Error(ErrorKind::incomplete_data, "no shots for setting '" + settings[k].id + "'");
    const double m = a.sum / static_cast<double>(a.n);
    mean += m;
    if (a.n > 1) {
      const double v = std::max(0.0, (a.sum_sq - a.sum * m) / static_cast<double>(a.n - 1));
      var += v / static_cast<double>(a.n);
    }
  }
  return BoundEstimate{b, mean, std::sqrt(var), total, seed};
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

inline nlohmann::json graph_to_json(const ClusterGraph& g) {
  return {{"kind", g.is_chain() ? "chain" : "grid"}, {"nx", g.nx()}, {"ny", g.ny()}, {"spec", g.describe()}};
}

inline ClusterGraph graph_from_json(const nlohmann::json& j) {
  try {
    if (j.is_string()) return parse_graph(j.get<std::string>());
    if (j.contains("spec")) return parse_graph(j.at("spec").get<std::string>());
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "chain") return build_chain(j.at("nx").get<std::size_t>());
    if (kind == "grid") return build_grid(j.at("nx").get<std::size_t>(), j.at("ny").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("graph JSON: ") + e.what());
  }
  throw Error(ErrorKind::parse, "graph JSON: unknown kind");
}

inline nlohmann::json settings_to_json(const ClusterGraph& g, BoundId b, const std::vector<MeasurementSetting>& ss) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : ss) {
    nlohmann::json basis = nlohmann::json::object();
    for (Label q = 1; q <= s.basis.size(); ++q) basis[std::to_string(q)] = std::string(1, to_char(s.at(q)));
    arr.push_back({{"id", s.id}, {"basis", basis}, {"terms", s.terms}, {"primary", s.primary}});
  }
  return {{"graph", graph_to_json(g)}, {"bound", to_string(b)}, {"settings", arr}};
}

struct SettingsFile {
  ClusterGraph graph;
  BoundId bound;
  std::vector<MeasurementSetting> settings;
};

inline SettingsFile settings_from_json(const nlohmann::json& j) {
  try {
    ClusterGraph g = graph_from_json(j.at("graph"));
    const BoundId b = parse_bound(j.at("bound").get<std::string>());
    std::vector<MeasurementSetting> ss;
    for (const auto& js : j.at("settings")) {
      MeasurementSetting s;
      s.id = js.at("id").get<std::string>();
      s.basis.assign(g.size(), Pauli::I);
      for (const auto& [k, v] : js.at("basis").items()) {
        const auto q = static_cast<Label>(std::stoul(k));
        if (!g.contains(q)) throw Error(ErrorKind::invalid_label, "basis label out of range");
        const auto str = v.get<std::string>();
        if (str.size() != 1) throw Error(ErrorKind::parse, "basis letter must be one of X, Y, Z");
        s.basis[q - 1] = pauli_from_char(str[0]);
      }
      for (Pauli p : s.basis)
        if (p == Pauli::I) throw Error(ErrorKind::parse, "basis must assign every qubit");
      s.terms = js.value("terms", std::vector<Subset>{});
      s.primary = js.value("primary", std::vector<Subset>{});
      ss.push_back(std::move(s));
    }
    return {std::move(g), b, std::move(ss)};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("settings JSON: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error(ErrorKind::parse, "settings JSON: bad qubit label");
  }
}

/// Shot CSV; `provenance` (if non-empty) goes on a leading "# " line.
inline void write_shots(std::ostream& os, std::size_t n, const std::vector<ShotRecord>& shots,
                        const std::string& provenance = {}) {
  if (!provenance.empty()) os << "# " << provenance << '\n';
  os << "setting_id";
  for (std::size_t q = 1; q <= n; ++q) os << ",q" << q;
  os << '\n';
  std::string line;
  for (const auto& r : shots) {
    line = r.setting_id;
    for (auto o : r.outcomes) line += o > 0 ? ",1" : ",-1";
    line += '\n';
    os << line;
  }
}

inline std::vector<ShotRecord> read_shots(std::istream& is, std::size_t n) {
  std::vector<ShotRecord> out;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (!header) {
      if (cells.size() != n + 1 || cells[0] != "setting_id") throw Error(ErrorKind::parse, "bad shot CSV header");
      header = true;
      continue;
    }
    if (cells.size() != n + 1) throw Error(ErrorKind::parse, "shot row has wrong length");
    ShotRecord r{cells[0], {}};
    for (std::size_t k = 1; k <= n; ++k) {
      if (cells[k] == "1") r.outcomes.push_back(1);
      else if (cells[k] == "-1") r.outcomes.push_back(-1);
      else throw Error(ErrorKind::parse, "outcome must be 1 or -1");
    }
    out.push_back(std::move(r));
  }
  if (!header) throw Error(ErrorKind::parse, "shot CSV without header");
  return out;
}

}  // namespace clusterfid
