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

#include <bit>
#include <cstdint>
#include <vector>

#include "clusterfid/bounds.hpp"
#include "clusterfid/error.hpp"
#include "clusterfid/lattice.hpp"
#include "clusterfid/noise.hpp"
#include "clusterfid/pauli.hpp"
#include "clusterfid/rng.hpp"
#include "clusterfid/settings.hpp"

namespace clusterfid {

/// CHP-style stabilizer tableau with destabilizers. Rows 0..N-1 are
/// destabilizers, N..2N-1 stabilizers. A row with bits (x, z, r) stands for
/// (-1)^r i^{|x&z|} X^x Z^z, so x=z=1 on a qubit reads as Y.
class Tableau {
 public:
  /// |0...0>: destabilizers X_q, stabilizers Z_q.
  explicit Tableau(std::size_t n) : n_(n), w_((n + 63) / 64), x_(2 * n * w_, 0), z_(2 * n * w_, 0), r_(2 * n, 0) {
    for (std::size_t q = 0; q < n; ++q) {
      set_bit(x_, q, q);
      set_bit(z_, n + q, q);
    }
  }

  std::size_t size() const { return n_; }

  /// Stabilizer row i (1-based, aligned with generator labels).
  PauliString stabilizer_row(Label i) const { return row_string(n_ + i - 1); }
  PauliString destabilizer_row(Label i) const { return row_string(i - 1); }

  /// Replaces stabilizer row i (and destabilizer row i) by the given strings.
  void set_rows(Label i, const PauliString& stab, const PauliString& destab) {
    load_row(n_ + i - 1, stab);
    load_row(i - 1, destab);
  }

  /// Flips the sign of every row anticommuting with e.
  void apply_error(const PauliString& e) {
    for (const auto& s : e.sites()) {
      if (s.label < 1 || s.label > n_) throw Error(ErrorKind::invalid_label, "error acts outside the tableau");
      const std::size_t q = s.label - 1;
      const bool ex = has_x(s.pauli), ez = has_z(s.pauli);
      for (std::size_t row = 0; row < 2 * n_; ++row)
        if ((ez && bit(x_, row, q)) != (ex && bit(z_, row, q))) r_[row] ^= 1;
    }
  }

  /// Measures the single-qubit Pauli `basis` on qubit q; returns +1 or -1.
  template <class Rng>
  int measure(Label ql, Pauli basis, Rng& rng) {
    if (basis == Pauli::I) throw Error(ErrorKind::invalid_label, "cannot measure the identity");
    const std::size_t q = ql - 1;
    const bool px = has_x(basis), pz = has_z(basis);
    auto anti = [&](std::size_t row) { return (pz && bit(x_, row, q)) != (px && bit(z_, row, q)); };

    std::size_t p = 2 * n_;
    for (std::size_t row = n_; row < 2 * n_; ++row)
      if (anti(row)) {
        p = row;
        break;
      }
    if (p < 2 * n_) {
      for (std::size_t row = 0; row < 2 * n_; ++row)
        if (row != p && anti(row)) mul_into(row, p);
      copy_row(p - n_, p);
      clear_row(p);
      if (px) set_bit(x_, p, q);
      if (pz) set_bit(z_, p, q);
      r_[p] = static_cast<std::uint8_t>(rng() >> 63);
      return r_[p] ? -1 : 1;
    }
    // Deterministic: the product of stabilizers paired with anticommuting
    // destabilizers equals +-P.
    std::vector<std::uint64_t> sx(w_, 0), sz(w_, 0);
    std::uint8_t sr = 0;
    for (std::size_t d = 0; d < n_; ++d)
      if (anti(d)) sr = mul_raw(sx.data(), sz.data(), sr, n_ + d);
    return sr ? -1 : 1;
  }

  friend bool operator==(const Tableau&, const Tableau&) = default;

 private:
  static bool bit(const std::vector<std::uint64_t>& v, std::size_t row, std::size_t q, std::size_t w) {
    return (v[row * w + (q >> 6)] >> (q & 63)) & 1u;
  }
  bool bit(const std::vector<std::uint64_t>& v, std::size_t row, std::size_t q) const { return bit(v, row, q, w_); }
  void set_bit(std::vector<std::uint64_t>& v, std::size_t row, std::size_t q) {
    v[row * w_ + (q >> 6)] |= 1ull << (q & 63);
  }
  void clear_row(std::size_t row) {
    for (std::size_t k = 0; k < w_; ++k) x_[row * w_ + k] = z_[row * w_ + k] = 0;
    r_[row] = 0;
  }
  void copy_row(std::size_t dst, std::size_t src) {
    for (std::size_t k = 0; k < w_; ++k) {
      x_[dst * w_ + k] = x_[src * w_ + k];
      z_[dst * w_ + k] = z_[src * w_ + k];
    }
    r_[dst] = r_[src];
  }

  /// (hx, hz, hr) <- (h) * row src; returns the new sign bit.
  std::uint8_t mul_raw(std::uint64_t* hx, std::uint64_t* hz, std::uint8_t hr, std::size_t src) const {
    const std::uint64_t* sx = &x_[src * w_];
    const std::uint64_t* sz = &z_[src * w_];
    int e = 0;
    for (std::size_t k = 0; k < w_; ++k) {
      const std::uint64_t nx = hx[k] ^ sx[k], nz = hz[k] ^ sz[k];
      e += std::popcount(hx[k] & hz[k]) + std::popcount(sx[k] & sz[k]) - std::popcount(nx & nz) +
           2 * std::popcount(hz[k] & sx[k]);
      hx[k] = nx;
      hz[k] = nz;
    }
    e &= 3;
    return static_cast<std::uint8_t>(hr ^ r_[src] ^ ((e >> 1) & 1));
  }
  void mul_into(std::size_t dst, std::size_t src) { r_[dst] = mul_raw(&x_[dst * w_], &z_[dst * w_], r_[dst], src); }

  PauliString row_string(std::size_t row) const {
    std::vector<PauliString::Site> sites;
    for (std::size_t q = 0; q < n_; ++q) {
      const Pauli p = pauli_from_bits(bit(x_, row, q), bit(z_, row, q));
      if (p != Pauli::I) sites.push_back({static_cast<Label>(q + 1), p});
    }
    return PauliString::from_sites(std::move(sites), r_[row] ? 2 : 0);
  }
  void load_row(std::size_t row, const PauliString& p) {
    if (!p.is_hermitian()) throw Error(ErrorKind::internal, "tableau rows must be Hermitian");
    clear_row(row);
    for (const auto& s : p.sites()) {
      if (has_x(s.pauli)) set_bit(x_, row, s.label - 1);
      if (has_z(s.pauli)) set_bit(z_, row, s.label - 1);
    }
    r_[row] = p.log_i() == 2 ? 1 : 0;
  }

  std::size_t n_, w_;
  std::vector<std::uint64_t> x_, z_;
  std::vector<std::uint8_t> r_;
};

/// Stabilizers g_i with + signs; destabilizers Z_i.
inline Tableau prepare_cluster(const ClusterGraph& g) {
  Tableau t(g.size());
  for (Label i = 1; i <= g.size(); ++i) t.set_rows(i, stabilizer(g, i), PauliString::single(i, Pauli::Z));
  return t;
}

inline Tableau apply_error(Tableau t, const PauliString& e) {
  t.apply_error(e);
  return t;
}

/// Measures every qubit in ascending label order.
inline std::vector<std::int8_t> measure_all(Tableau t, const std::vector<Pauli>& basis, RngStream& rng) {
  if (basis.size() != t.size()) throw Error(ErrorKind::invalid_size, "basis must cover every qubit");
  std::vector<std::int8_t> out(t.size());
  for (Label q = 1; q <= t.size(); ++q) out[q - 1] = static_cast<std::int8_t>(t.measure(q, basis[q - 1], rng));
  return out;
}

/// Shot (setting s, index k) uses substream(seed, s * shots + k): first the
/// error draw, then the measurement draws. Output order is (setting, shot).
inline std::vector<ShotRecord> run_shots(const ClusterGraph& g, const PauliErrorModel& model,
                                         const std::vector<MeasurementSetting>& settings,
                                         std::uint64_t shots_per_setting, std::uint64_t seed,
                                         unsigned threads = 0) {
  if (shots_per_setting == 0) throw Error(ErrorKind::invalid_size, "need at least one shot per setting");
  model.validate(g);
  for (const auto& s : settings)
    if (s.basis.size() != g.size()) throw Error(ErrorKind::invalid_size, "setting basis does not match the graph");
  const Tableau ideal = prepare_cluster(g);
  const std::uint64_t total = shots_per_setting * settings.size();
  std::vector<ShotRecord> out(total);
  if (threads == 0) threads = default_threads();
  parallel_chunks(total, 1024, threads, [&](std::uint64_t begin, std::uint64_t end, std::uint64_t) {
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      const auto& s = settings[idx / shots_per_setting];
      RngStream rng = substream(seed, idx, kDomainShots);
      const PauliString e = sample_error(model, rng);
      out[idx] = ShotRecord{s.id, measure_all(apply_error(ideal, e), s.basis, rng)};
    }
  });
  return out;
}

}  // namespace clusterfid
