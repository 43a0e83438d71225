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

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "clusterfid/noise.hpp"

using namespace clusterfid;

namespace {

std::vector<int> bits(const ClusterGraph& g, const char* e) { return syndrome_of(g, PauliString::parse(e)).bits(); }

/// Syndrome via explicit commutation with every generator.
std::vector<int> by_commutation(const ClusterGraph& g, const PauliString& e) {
  std::vector<int> out;
  for (Label i = 1; i <= g.size(); ++i) out.push_back(commutes(e, stabilizer(g, i)) ? 1 : 0);
  return out;
}

}  // namespace

TEST(Noise, SingleDepolarizingShape) {
  auto g = build_chain(3);
  auto m = standard_single_depolarizing(g, 0.02);
  ASSERT_EQ(m.size(), 3u);
  for (const auto& ev : m.events()) {
    EXPECT_DOUBLE_EQ(ev.trigger, 0.02);
    ASSERT_EQ(ev.dist.size(), 3u);
    for (const auto& b : ev.dist) EXPECT_DOUBLE_EQ(b.weight, 1.0 / 3.0);
  }
  EXPECT_THROW(standard_single_depolarizing(g, 1.5), Error);
  EXPECT_THROW(standard_single_depolarizing(g, -0.1), Error);
}

TEST(Noise, PairDepolarizingShape) {
  auto m = standard_pair_depolarizing(build_chain(5), 0.01);
  ASSERT_EQ(m.size(), 4u);
  EXPECT_EQ(m.events()[0].support, (std::vector<Label>{1, 2}));
  EXPECT_EQ(m.events()[3].support, (std::vector<Label>{4, 5}));
  EXPECT_EQ(m.events()[0].dist.size(), 9u);
  EXPECT_EQ(standard_pair_depolarizing(build_grid(3, 3), 0.01).size(), 12u);
  auto z = standard_pair_depolarizing(build_chain(2), 0.0);
  ASSERT_EQ(z.size(), 1u);
  RngStream rng(1);
  for (int k = 0; k < 100; ++k) EXPECT_TRUE(sample_error(z, rng).is_identity());
}

TEST(Noise, ZeroNoiseSamplesIdentity) {
  auto m = standard_single_depolarizing(build_chain(3), 0.0);
  RngStream rng(3);
  for (int k = 0; k < 1000; ++k) EXPECT_TRUE(sample_error(m, rng).is_identity());
}

TEST(Noise, CertainSingleQubitEventIsUniformOverPaulis) {
  ErrorEvent ev;
  ev.support = {1};
  ev.trigger = 1.0;
  for (Pauli l : {Pauli::X, Pauli::Y, Pauli::Z}) ev.dist.push_back({{l, Pauli::I}, 1.0 / 3.0});
  PauliErrorModel m({ev});
  RngStream rng(2024);
  std::map<Pauli, int> count;
  const int n = 1'000'000;
  for (int k = 0; k < n; ++k) ++count[sample_error(m, rng).at(1)];
  EXPECT_EQ(count[Pauli::I], 0);
  const double sigma = std::sqrt(n * (1.0 / 3) * (2.0 / 3));
  for (Pauli l : {Pauli::X, Pauli::Y, Pauli::Z}) EXPECT_LT(std::abs(count[l] - n / 3.0), 5 * sigma);
}

TEST(Noise, EventFrequenciesMatchModel) {
  // Qubit 1 is touched only by the (1,2) event, qubit 4 only by (3,4).
  auto m = standard_pair_depolarizing(build_chain(4), 0.1);
  RngStream rng(77);
  const int n = 1'000'000;
  int x1 = 0, any4 = 0;
  for (int k = 0; k < n; ++k) {
    auto e = sample_error(m, rng);
    x1 += e.at(1) == Pauli::X;
    any4 += e.at(4) != Pauli::I;
  }
  const double p1 = 0.1 * 3.0 / 9.0, p4 = 0.1;
  EXPECT_LT(std::abs(x1 - n * p1), 5 * std::sqrt(n * p1 * (1 - p1)));
  EXPECT_LT(std::abs(any4 - n * p4), 5 * std::sqrt(n * p4 * (1 - p4)));
}

TEST(Noise, Determinism) {
  auto m = standard_single_depolarizing(build_chain(10), 0.2);
  RngStream a = substream(42, 7), b = substream(42, 7);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(sample_error(m, a), sample_error(m, b));
}

TEST(Noise, SyndromeFlipRules) {
  auto c = build_chain(5);
  EXPECT_EQ(bits(c, "+X3"), (std::vector<int>{1, 0, 1, 0, 1}));
  EXPECT_EQ(bits(c, "+Z1"), (std::vector<int>{0, 1, 1, 1, 1}));
  EXPECT_EQ(bits(c, "+Y5"), (std::vector<int>{1, 1, 1, 0, 0}));
  EXPECT_EQ(bits(build_grid(3, 3), "+X5"), (std::vector<int>{1, 0, 1, 0, 1, 0, 1, 0, 1}));
}

TEST(Noise, SyndromeMatchesCommutationExhaustive) {
  constexpr Pauli L[] = {Pauli::X, Pauli::Y, Pauli::Z};
  for (std::size_t n = 2; n <= 8; ++n) {
    auto g = build_chain(n);
    for (Label q = 1; q <= n; ++q)
      for (Pauli l : L) {
        auto e = PauliString::single(q, l);
        EXPECT_EQ(syndrome_of(g, e).bits(), by_commutation(g, e));
      }
    for (auto [a, b] : g.edges())
      for (Pauli l : L)
        for (Pauli r : L) {
          auto e = PauliString::from_sites({{a, l}, {b, r}});
          EXPECT_EQ(syndrome_of(g, e).bits(), by_commutation(g, e));
        }
  }
}

TEST(Noise, SyndromeIsAdditive) {
  auto g = build_grid(4, 3);
  RngStream rng(8);
  auto m = standard_single_depolarizing(g, 0.3);
  for (int k = 0; k < 200; ++k) {
    auto a = sample_error(m, rng), b = sample_error(m, rng);
    EXPECT_EQ(syndrome_of(g, a * b), combine(syndrome_of(g, a), syndrome_of(g, b)));
  }
}

TEST(Noise, FastSamplerConsumesStreamLikeSampleError) {
  for (auto g : {build_chain(7), build_grid(3, 3), build_chain(130)}) {
    auto m = standard_pair_depolarizing(g, 0.15);
    SyndromeSampler sampler(g, m);
    SyndromeSample s(g.size());
    for (std::uint64_t r = 0; r < 300; ++r) {
      RngStream a = substream(5, r), b = substream(5, r);
      sampler.sample(a, s);
      EXPECT_EQ(s, syndrome_of(g, sample_error(m, b)));
      EXPECT_EQ(a(), b());
    }
  }
}

TEST(Noise, ValidationRejectsBadModels) {
  auto g = build_chain(4);
  ErrorEvent ev;
  ev.support = {1, 3};
  ev.trigger = 0.1;
  ev.dist.push_back({{Pauli::X, Pauli::X}, 1.0});
  EXPECT_THROW(PauliErrorModel({ev}).validate(g), Error);  // non-adjacent
  ev.support = {1, 2};
  ev.dist[0].weight = 0.5;
  EXPECT_THROW(PauliErrorModel({ev}).validate(g), Error);  // does not sum to 1
}

TEST(Noise, JsonRoundTrip) {
  auto g = build_chain(4);
  auto m = standard_pair_depolarizing(g, 0.05);
  auto j = model_to_json(m);
  EXPECT_TRUE(j["events"][0]["dist"].contains("ZZ"));
  auto back = model_from_json(j, g);
  EXPECT_EQ(model_to_json(back), j);
  auto bad = nlohmann::json::parse(R"({"events":[{"support":[1],"p":0.1,"dist":{"XX":1}}]})");
  EXPECT_THROW(model_from_json(bad, g), Error);
}

TEST(Noise, KrausWeightValidated) {
  auto g = build_chain(3);
  auto ok = KrausChannel::single_qubit(2, 0.8, 0.6, 0, 0);
  EXPECT_NO_THROW(ok.validate(g));
  auto bad = KrausChannel::single_qubit(2, 1.0, 0.5, 0, 0);
  EXPECT_THROW(bad.validate(g), Error);
}
