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
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clusterfid/error.hpp"

namespace clusterfid {

/// 1-based qubit / generator label.
using Label = std::uint32_t;

/// Single-qubit Pauli; the low bit is the X component, the high bit the Z
/// component, so Y = X|Z.
enum class Pauli : std::uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

inline bool has_x(Pauli p) { return (static_cast<std::uint8_t>(p) & 1u) != 0; }
inline bool has_z(Pauli p) { return (static_cast<std::uint8_t>(p) & 2u) != 0; }
inline Pauli pauli_from_bits(bool x, bool z) {
  return static_cast<Pauli>((x ? 1u : 0u) | (z ? 2u : 0u));
}

inline char to_char(Pauli p) {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  return '?';
}

inline Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default: throw Error(ErrorKind::parse, std::string("bad Pauli letter '") + c + "'");
  }
}

/// Non-commuting single-site Paulis anticommute.
inline bool anticommute(Pauli a, Pauli b) { return a != Pauli::I && b != Pauli::I && a != b; }

/// Product of two single-qubit Paulis: returns the resulting letter and the
/// phase as a power of i (0..3).
inline std::pair<Pauli, std::uint8_t> multiply_site(Pauli a, Pauli b) {
  if (a == Pauli::I) return {b, 0};
  if (b == Pauli::I) return {a, 0};
  if (a == b) return {Pauli::I, 0};
  // Cyclic order X -> Y -> Z -> X picks up +i, the reverse -i.
  auto cyc = [](Pauli p) { return p == Pauli::X ? 0 : (p == Pauli::Y ? 1 : 2); };
  int d = (cyc(b) - cyc(a) + 3) % 3;
  int rest = 3 - cyc(a) - cyc(b);
  Pauli c = rest == 0 ? Pauli::X : (rest == 1 ? Pauli::Y : Pauli::Z);
  return {c, static_cast<std::uint8_t>(d == 1 ? 1 : 3)};
}

/// Signed multi-qubit Pauli operator, phase in {+1, +i, -1, -i}.
///
/// Stored sparsely as label-sorted (label, letter) pairs with identity sites
/// omitted, so multiplication costs O(support).
class PauliString {
 public:
  struct Site {
    Label label;
    Pauli pauli;
    friend bool operator==(const Site&, const Site&) = default;
  };

  PauliString() = default;

  /// Builds from arbitrary sites; duplicate labels are multiplied in order.
  static PauliString from_sites(std::vector<Site> sites, std::uint8_t log_i = 0) {
    PauliString out;
    out.log_i_ = log_i & 3u;
    std::stable_sort(sites.begin(), sites.end(),
                     [](const Site& a, const Site& b) { return a.label < b.label; });
    for (const Site& s : sites) {
      if (s.label == 0) throw Error(ErrorKind::invalid_label, "labels are 1-based");
      if (!out.sites_.empty() && out.sites_.back().label == s.label) {
        auto [c, ph] = multiply_site(out.sites_.back().pauli, s.pauli);
        out.log_i_ = (out.log_i_ + ph) & 3u;
        out.sites_.back().pauli = c;
        if (c == Pauli::I) out.sites_.pop_back();
      } else if (s.pauli != Pauli::I) {
        out.sites_.push_back(s);
      }
    }
    return out;
  }

  static PauliString single(Label q, Pauli p) { return from_sites({{q, p}}); }

  std::span<const Site> sites() const { return sites_; }
  std::size_t weight() const { return sites_.size(); }
  bool is_identity() const { return sites_.empty(); }
  /// Phase as a power of i.
  std::uint8_t log_i() const { return log_i_; }
  bool is_hermitian() const { return (log_i_ & 1u) == 0; }
  /// Largest label in the support, 0 for the identity.
  Label max_label() const { return sites_.empty() ? 0 : sites_.back().label; }

  Pauli at(Label q) const {
    auto it = std::lower_bound(sites_.begin(), sites_.end(), q,
                               [](const Site& s, Label l) { return s.label < l; });
    return (it != sites_.end() && it->label == q) ? it->pauli : Pauli::I;
  }

  PauliString with_phase(std::uint8_t log_i) const {
    PauliString out = *this;
    out.log_i_ = log_i & 3u;
    return out;
  }

  friend PauliString operator*(const PauliString& a, const PauliString& b) {
    PauliString out;
    out.log_i_ = (a.log_i_ + b.log_i_) & 3u;
    out.sites_.reserve(a.sites_.size() + b.sites_.size());
    auto ia = a.sites_.begin();
    auto ib = b.sites_.begin();
    while (ia != a.sites_.end() || ib != b.sites_.end()) {
      if (ib == b.sites_.end() || (ia != a.sites_.end() && ia->label < ib->label)) {
        out.sites_.push_back(*ia++);
      } else if (ia == a.sites_.end() || ib->label < ia->label) {
        out.sites_.push_back(*ib++);
      } else {
        auto [c, ph] = multiply_site(ia->pauli, ib->pauli);
        out.log_i_ = (out.log_i_ + ph) & 3u;
        if (c != Pauli::I) out.sites_.push_back({ia->label, c});
        ++ia;
        ++ib;
      }
    }
    return out;
  }

  friend bool operator==(const PauliString&, const PauliString&) = default;

  /// "+Z2.Y3.Y4.Z5"; the identity renders as "+I".
  std::string to_string() const {
    static constexpr const char* kPhase[] = {"+", "+i", "-", "-i"};
    std::string out = kPhase[log_i_];
    if (sites_.empty()) return out + "I";
    for (std::size_t k = 0; k < sites_.size(); ++k) {
      if (k) out += '.';
      out += to_char(sites_[k].pauli);
      out += std::to_string(sites_[k].label);
    }
    return out;
  }

  static PauliString parse(std::string_view text) {
    std::uint8_t log_i = 0;
    auto fail = [&] { throw Error(ErrorKind::parse, "bad Pauli string '" + std::string(text) + "'"); };
    std::string_view rest = text;
    if (rest.starts_with("+i")) { log_i = 1; rest.remove_prefix(2); }
    else if (rest.starts_with("-i")) { log_i = 3; rest.remove_prefix(2); }
    else if (rest.starts_with("+")) { rest.remove_prefix(1); }
    else if (rest.starts_with("-")) { log_i = 2; rest.remove_prefix(1); }
    if (rest == "I") return PauliString().with_phase(log_i);
    if (rest.empty()) fail();
    std::vector<Site> sites;
    while (!rest.empty()) {
      auto dot = rest.find('.');
      std::string_view tok = rest.substr(0, dot);
      if (tok.size() < 2) fail();
      Pauli p = pauli_from_char(tok[0]);
      std::uint64_t label = 0;
      for (char c : tok.substr(1)) {
        if (c < '0' || c > '9') fail();
        label = label * 10 + static_cast<std::uint64_t>(c - '0');
        if (label > 0xffffffffu) fail();
      }
      if (label == 0 || p == Pauli::I) fail();
      if (!sites.empty() && sites.back().label >= label) fail();
      sites.push_back({static_cast<Label>(label), p});
      if (dot == std::string_view::npos) break;
      rest.remove_prefix(dot + 1);
      if (rest.empty()) fail();
    }
    PauliString out;
    out.sites_ = std::move(sites);
    out.log_i_ = log_i;
    return out;
  }

 private:
  std::vector<Site> sites_;
  std::uint8_t log_i_ = 0;
};

inline PauliString multiply(const PauliString& a, const PauliString& b) { return a * b; }

/// True iff the number of sites carrying different non-identity Paulis is even.
inline bool commutes(const PauliString& a, const PauliString& b) {
  auto sa = a.sites();
  auto sb = b.sites();
  std::size_t ia = 0, ib = 0;
  bool odd = false;
  while (ia < sa.size() && ib < sb.size()) {
    if (sa[ia].label < sb[ib].label) {
      ++ia;
    } else if (sb[ib].label < sa[ia].label) {
      ++ib;
    } else {
      odd ^= anticommute(sa[ia].pauli, sb[ib].pauli);
      ++ia;
      ++ib;
    }
  }
  return !odd;
}

}  // namespace clusterfid
