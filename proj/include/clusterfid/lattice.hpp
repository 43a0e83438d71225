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

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clusterfid/error.hpp"
#include "clusterfid/pauli.hpp"

namespace clusterfid {

enum class LatticeKind { chain, grid };

/// Two-coloring of the generators. A plays the role of the "odd" set in the
/// bound formulas, B the "even" set.
enum class GeneratorClass : std::uint8_t { A, B };

/// Chain or rectangular grid cluster state. Labels run 1..N in row-major
/// order. Immutable after construction.
class ClusterGraph {
 public:
  LatticeKind kind() const { return kind_; }
  bool is_chain() const { return kind_ == LatticeKind::chain; }
  bool is_grid() const { return kind_ == LatticeKind::grid; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t size() const { return nx_ * ny_; }

  std::span<const Label> neighbors(Label q) const { return neighbors_.at(index(q)); }
  GeneratorClass class_of(Label q) const { return class_.at(index(q)); }
  /// Sorted labels of one class.
  std::span<const Label> members(GeneratorClass c) const {
    return c == GeneratorClass::A ? class_a_ : class_b_;
  }
  /// Sorted (lo, hi) pairs, lo < hi.
  std::span<const std::pair<Label, Label>> edges() const { return edges_; }

  bool contains(Label q) const { return q >= 1 && q <= size(); }
  bool adjacent(Label a, Label b) const {
    if (!contains(a) || !contains(b)) return false;
    for (Label n : neighbors(a))
      if (n == b) return true;
    return false;
  }
  /// 1-based row and column of a label.
  std::size_t row(Label q) const { return (index(q) / nx_) + 1; }
  std::size_t col(Label q) const { return (index(q) % nx_) + 1; }

  /// "chain:5" or "grid:3x3".
  std::string describe() const {
    if (is_chain()) return "chain:" + std::to_string(nx_);
    return "grid:" + std::to_string(nx_) + "x" + std::to_string(ny_);
  }

  friend ClusterGraph build_chain(std::size_t n);
  friend ClusterGraph build_grid(std::size_t nx, std::size_t ny);

 private:
  ClusterGraph(LatticeKind kind, std::size_t nx, std::size_t ny) : kind_(kind), nx_(nx), ny_(ny) {
    const std::size_t n = nx * ny;
    neighbors_.resize(n);
    class_.resize(n);
    for (Label q = 1; q <= n; ++q) {
      const std::size_t r = (q - 1) / nx, c = (q - 1) % nx;
      auto& nb = neighbors_[q - 1];
      if (r > 0) nb.push_back(q - static_cast<Label>(nx));
      if (c > 0) nb.push_back(q - 1);
      if (c + 1 < nx) nb.push_back(q + 1);
      if (r + 1 < ny) nb.push_back(q + static_cast<Label>(nx));
      for (Label m : nb)
        if (m > q) edges_.emplace_back(q, m);
      // Odd widths make label parity a checkerboard. Even widths use the
      // row-dependent S1/S2 split: odd labels on odd rows, even on even rows.
      bool a = (nx % 2 == 1 || ny == 1) ? (q % 2 == 1) : (((r + 1) % 2) == (q % 2));
      class_[q - 1] = a ? GeneratorClass::A : GeneratorClass::B;
      (a ? class_a_ : class_b_).push_back(q);
    }
  }

  std::size_t index(Label q) const {
    if (!contains(q))
      throw Error(ErrorKind::invalid_label, "label " + std::to_string(q) + " outside 1.." +
                                                std::to_string(size()));
    return q - 1;
  }

  LatticeKind kind_;
  std::size_t nx_, ny_;
  std::vector<std::vector<Label>> neighbors_;
  std::vector<GeneratorClass> class_;
  std::vector<Label> class_a_, class_b_;
  std::vector<std::pair<Label, Label>> edges_;
};

inline ClusterGraph build_chain(std::size_t n) {
  if (n < 2) throw Error(ErrorKind::invalid_size, "chains need at least 2 qubits");
  if (n > 0xffffffffu) throw Error(ErrorKind::invalid_size, "chain too long");
  return ClusterGraph(LatticeKind::chain, n, 1);
}

inline ClusterGraph build_grid(std::size_t nx, std::size_t ny) {
  if (nx < 2 || ny < 2) throw Error(ErrorKind::invalid_size, "grid dimensions must be at least 2");
  if (nx * ny > 0xffffffffu) throw Error(ErrorKind::invalid_size, "grid too large");
  return ClusterGraph(LatticeKind::grid, nx, ny);
}

/// g_i: X on i, Z on every neighbor of i.
inline PauliString stabilizer(const ClusterGraph& g, Label i) {
  std::vector<PauliString::Site> sites;
  sites.push_back({i, Pauli::X});
  for (Label n : g.neighbors(i)) sites.push_back({n, Pauli::Z});
  return PauliString::from_sites(std::move(sites));
}

/// Parses "chain:N", "grid:NXxNY" (also accepts 'X' or the multiplication sign).
inline ClusterGraph parse_graph(const std::string& spec) {
  auto fail = [&] { throw Error(ErrorKind::parse, "bad graph spec '" + spec + "'"); };
  auto colon = spec.find(':');
  if (colon == std::string::npos) fail();
  std::string kind = spec.substr(0, colon), dims = spec.substr(colon + 1);
  auto to_size = [&](const std::string& s) -> std::size_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) fail();
    return std::stoul(s);
  };
  if (kind == "chain") return build_chain(to_size(dims));
  if (kind != "grid") fail();
  std::size_t sep = dims.find_first_of("xX");
  std::size_t width = 1;
  if (sep == std::string::npos) {
    sep = dims.find("\xc3\x97");  // U+00D7
    width = 2;
  }
  if (sep == std::string::npos) fail();
  return build_grid(to_size(dims.substr(0, sep)), to_size(dims.substr(sep + width)));
}

}  // namespace clusterfid
