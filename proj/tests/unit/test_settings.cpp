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

#include <sstream>

#include "clusterfid/settings.hpp"
#include "clusterfid/tableau.hpp"

using namespace clusterfid;

TEST(Settings, ExpansionOfP0OnShortChains) {
  auto e3 = expand_bound(build_chain(3), BoundId::P0);
  EXPECT_EQ(e3.constant, Rational(-1, 4));
  std::map<Subset, Rational> want3{{{1}, Rational(1, 4)}, {{3}, Rational(1, 4)}, {{1, 3}, Rational(1, 4)},
                                   {{2}, Rational(1, 2)}};
  EXPECT_EQ(e3.terms, want3);
  auto e2 = expand_bound(build_chain(2), BoundId::P0);
  EXPECT_EQ(e2.constant, Rational(0));
  std::map<Subset, Rational> want2{{{1}, Rational(1, 2)}, {{2}, Rational(1, 2)}};
  EXPECT_EQ(e2.terms, want2);
}

TEST(Settings, FullProjectorExpansion) {
  auto g = build_grid(3, 3);
  auto e = expand_bound(g, BoundId::F_exact);
  EXPECT_EQ(e.constant, Rational(1, 512));
  EXPECT_EQ(e.terms.size(), 511u);
  for (const auto& [t, c] : e.terms) EXPECT_EQ(c, Rational(1, 512));
}

TEST(Settings, ExpansionReproducesSyndromeValuesExhaustively) {
  auto check = [](const ClusterGraph& g, BoundId b) {
    auto e = expand_bound(g, b);
    BoundEvaluator ev(g);
    for (std::uint64_t m = 0; m < (1ull << g.size()); ++m) {
      auto s = SyndromeSample::from_mask(g.size(), m);
      ASSERT_EQ(e.value(s), Rational(ev.eval(b, s))) << g.describe() << ' ' << to_string(b) << ' ' << m;
    }
  };
  for (std::size_t n = 2; n <= 10; ++n)
    for (BoundId b : {BoundId::F_exact, BoundId::P0, BoundId::P1D, BoundId::P1D_simplified}) check(build_chain(n), b);
  for (BoundId b : {BoundId::F_exact, BoundId::P0, BoundId::P2D}) check(build_grid(3, 3), b);
  check(build_grid(4, 3), BoundId::P2D_even);
}

TEST(Settings, PauliOfSubset) {
  auto g = build_chain(10);
  EXPECT_EQ(pauli_of_subset(g, {7, 8}).to_string(), "+Z6.Y7.Y8.Z9");
  EXPECT_EQ(pauli_of_subset(g, {1}).to_string(), "+X1.Z2");
  EXPECT_EQ(pauli_of_subset(g, {1, 2}).to_string(), "+Y1.Y2.Z3");
  // Real but negative: two Y sites and two induced edges.
  EXPECT_EQ(pauli_of_subset(build_chain(3), {1, 2, 3}).to_string(), "-Y1.X2.Y3");
  EXPECT_THROW(pauli_of_subset(g, {}), Error);
}

TEST(Settings, SubsetProductsAreRealExhaustive) {
  for (auto g : {build_chain(8), build_grid(3, 3)})
    for (std::uint64_t m = 1; m < (1ull << g.size()); ++m) {
      Subset t;
      for (Label q = 1; q <= g.size(); ++q)
        if (m >> (q - 1) & 1) t.push_back(q);
      EXPECT_NO_THROW(pauli_of_subset(g, t));
    }
}

TEST(Settings, P0NeedsTwoSettings) {
  auto s = compile(build_chain(5), BoundId::P0);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].basis_string(), "XZXZX");
  EXPECT_EQ(s[1].basis_string(), "ZXZXZ");
  for (std::size_t n : {2, 3, 17, 30}) EXPECT_EQ(compile(build_chain(n), BoundId::P0).size(), 2u);
  EXPECT_EQ(compile(build_grid(4, 4), BoundId::P0).size(), 2u);
  for (std::size_t n : {100, 1000, 10000}) EXPECT_EQ(compile_bases(build_chain(n), BoundId::P0).size(), 2u);
  EXPECT_EQ(compile_bases(build_grid(31, 31), BoundId::P0).size(), 2u);
}

TEST(Settings, SettingCountBudgets) {
  for (std::size_t n = 4; n <= 12; ++n)
    EXPECT_EQ(compile(build_chain(n), BoundId::P1D_simplified).size(), 3 * (n - 1)) << n;
  for (std::size_t n = 5; n <= 11; ++n) EXPECT_LE(compile(build_chain(n), BoundId::P1D).size(), 11 * n) << n;
  EXPECT_EQ(compile(build_chain(5), BoundId::P1D_simplified).size(), 12u);
  EXPECT_EQ(compile(build_grid(3, 3), BoundId::P2D).size(), 8u);
  EXPECT_EQ(compile(build_grid(5, 5), BoundId::P2D).size(), 22u);
  EXPECT_EQ(compile(build_grid(5, 3), BoundId::P2D).size(), 5u * 2 + 2);
  EXPECT_EQ(compile(build_grid(3, 5), BoundId::P2D).size(), 3u * 4 + 2);
}

TEST(Settings, CoverageAndBasisConsistency) {
  std::vector<std::pair<ClusterGraph, BoundId>> cases;
  for (std::size_t n = 2; n <= 12; ++n)
    for (BoundId b : {BoundId::P0, BoundId::P1D, BoundId::P1D_simplified}) cases.push_back({build_chain(n), b});
  for (auto [x, y] : {std::pair{3, 3}, {5, 5}, {3, 5}, {5, 3}, {3, 4}}) cases.push_back({build_grid(x, y), BoundId::P2D});
  for (auto [x, y] : {std::pair{2, 2}, {4, 4}, {4, 3}, {2, 5}}) cases.push_back({build_grid(x, y), BoundId::P2D_even});
  for (const auto& [g, b] : cases) {
    auto ex = expand_bound(g, b);
    auto ss = compile(g, b);
    std::set<Subset> covered, primary;
    for (const auto& s : ss) {
      for (const auto& t : s.terms) {
        covered.insert(t);
        const auto p = pauli_of_subset(g, t);
        for (const auto& site : p.sites()) ASSERT_EQ(s.at(site.label), site.pauli);
      }
      for (const auto& t : s.primary) ASSERT_TRUE(primary.insert(t).second);
    }
    ASSERT_EQ(covered.size(), ex.terms.size()) << g.describe() << ' ' << to_string(b);
    ASSERT_EQ(primary.size(), ex.terms.size());
    for (const auto& [t, c] : ex.terms) ASSERT_TRUE(covered.count(t));
  }
}

TEST(Settings, RefusesTooLarge) {
  EXPECT_THROW(compile(build_chain(6), BoundId::F_exact), Error);
  try {
    compile(build_chain(80), BoundId::P0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::too_large);
  }
  EXPECT_THROW(expand_bound(build_grid(5, 5), BoundId::F_exact), Error);
  EXPECT_THROW(compile(build_chain(12), BoundId::P1D, 100), Error);
}

TEST(Settings, SettingIds) {
  auto ss = compile(build_chain(5), BoundId::P1D_simplified);
  EXPECT_EQ(ss[0].id, "Mo");
  EXPECT_EQ(ss[1].id, "Me");
  EXPECT_EQ(ss[2].id, "M1@1");
  auto g = compile(build_grid(3, 3), BoundId::P2D);
  EXPECT_EQ(g[2].id, "Mc@1");
}

TEST(Settings, NoiselessShotsGiveOne) {
  auto g = build_chain(6);
  auto ss = compile(g, BoundId::P0);
  auto shots = run_shots(g, standard_single_depolarizing(g, 0.0), ss, 50, 1);
  auto e = estimate_from_shots(g, BoundId::P0, ss, shots);
  EXPECT_DOUBLE_EQ(e.mean, 1.0);
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(Settings, FixedPatternGivesDeterministicEstimate) {
  auto g = build_chain(5);
  ErrorEvent ev;
  ev.support = {3};
  ev.trigger = 1.0;
  ev.dist.push_back({{Pauli::X, Pauli::I}, 1.0});
  PauliErrorModel m({ev});
  auto ss = compile(g, BoundId::P0);
  auto shots = run_shots(g, m, ss, 200, 2);
  auto e = estimate_from_shots(g, BoundId::P0, ss, shots);
  EXPECT_NEAR(e.mean, 0.0, 1e-12);
  EXPECT_NEAR(e.std_error, 0.0, 1e-12);
}

TEST(Settings, MissingShotsAreIncompleteData) {
  auto g = build_chain(4);
  auto ss = compile(g, BoundId::P1D_simplified);
  auto shots = run_shots(g, standard_single_depolarizing(g, 0.0), {ss[0]}, 5, 1);
  try {
    estimate_from_shots(g, BoundId::P1D_simplified, ss, shots);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::incomplete_data);
  }
}

TEST(Settings, JsonRoundTrip) {
  auto g = build_chain(6);
  auto ss = compile(g, BoundId::P1D);
  auto j = settings_to_json(g, BoundId::P1D, ss);
  EXPECT_EQ(j["settings"][0]["basis"]["1"], "X");
  auto back = settings_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.graph.describe(), "chain:6");
  EXPECT_EQ(back.bound, BoundId::P1D);
  ASSERT_EQ(back.settings.size(), ss.size());
  for (std::size_t k = 0; k < ss.size(); ++k) {
    EXPECT_EQ(back.settings[k].basis, ss[k].basis);
    EXPECT_EQ(back.settings[k].primary, ss[k].primary);
  }
}

TEST(Settings, ShotCsvIsBitExact) {
  std::vector<ShotRecord> shots{{"Mo", {1, -1, 1}}, {"M1@1", {-1, -1, 1}}};
  std::ostringstream os;
  write_shots(os, 3, shots, "{\"seed\":1}");
  EXPECT_EQ(os.str(), "# {\"seed\":1}\nsetting_id,q1,q2,q3\nMo,1,-1,1\nM1@1,-1,-1,1\n");
  std::istringstream is(os.str());
  auto back = read_shots(is, 3);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].setting_id, "M1@1");
  EXPECT_EQ(back[1].outcomes, shots[1].outcomes);
  std::istringstream bad("setting_id,q1\nMo,2\n");
  EXPECT_THROW(read_shots(bad, 1), Error);
}

TEST(Settings, RationalArithmetic) {
  EXPECT_EQ(Rational(1, 4) + Rational(1, 4), Rational(1, 2));
  EXPECT_EQ(Rational(2, -4), Rational(-1, 2));
  EXPECT_EQ((Rational(3, 8) * Rational(-2, 3)).to_string(), "-1/4");
  EXPECT_THROW(Rational(1, 0), Error);
  EXPECT_THROW(Rational(INT64_MAX) + Rational(INT64_MAX), Error);
}
