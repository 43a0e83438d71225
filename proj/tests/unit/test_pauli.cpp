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

#include "clusterfid/error.hpp"
#include "clusterfid/pauli.hpp"
#include "clusterfid/rng.hpp"

using namespace clusterfid;

namespace {

PauliString P(const char* s) { return PauliString::parse(s); }

PauliString random_string(RngStream& rng, Label n) {
  std::vector<PauliString::Site> sites;
  for (Label q = 1; q <= n; ++q) sites.push_back({q, static_cast<Pauli>(rng() & 3)});
  return PauliString::from_sites(std::move(sites), static_cast<std::uint8_t>(rng() & 3));
}

}  // namespace

TEST(Pauli, ProductOfNeighbouringGenerators) {
  const auto r = P("+X1.Z2") * P("+Z1.X2.Z3");
  EXPECT_EQ(r.to_string(), "+Y1.Y2.Z3");
}

TEST(Pauli, SingleSiteRelations) {
  EXPECT_EQ((P("+X1") * P("+Z1")).to_string(), "-iY1");
  EXPECT_EQ((P("+Z1") * P("+X1")).to_string(), "+iY1");
  EXPECT_EQ((P("+Y1") * P("+Z1")).to_string(), "+iX1");
  EXPECT_EQ((P("+Y1") * P("+Y1")).to_string(), "+I");
}

TEST(Pauli, HermitianStringsSquareToIdentity) {
  RngStream rng(11);
  for (int k = 0; k < 200; ++k) {
    auto a = random_string(rng, 12).with_phase(2 * (rng() & 1));
    EXPECT_TRUE((a * a).is_identity());
    EXPECT_EQ((a * a).log_i(), 0);
  }
}

TEST(Pauli, Commutation) {
  EXPECT_FALSE(commutes(P("+X1"), P("+Z1")));
  EXPECT_TRUE(commutes(P("+X1.Z2"), P("+Z1.X2")));
  EXPECT_FALSE(commutes(P("+Z3"), P("+Z2.X3.Z4")));
}

TEST(Pauli, ReversedProductDiffersBySignExactlyWhenAnticommuting) {
  RngStream rng(5);
  for (int k = 0; k < 500; ++k) {
    auto a = random_string(rng, 6), b = random_string(rng, 6);
    const auto ab = a * b, ba = b * a;
    EXPECT_EQ(commutes(a, b), commutes(b, a));
    if (commutes(a, b)) EXPECT_EQ(ab, ba);
    else EXPECT_EQ(ab, ba.with_phase((ba.log_i() + 2) & 3));
  }
}

TEST(Pauli, Associativity) {
  RngStream rng(9);
  for (int k = 0; k < 200; ++k) {
    auto a = random_string(rng, 5), b = random_string(rng, 5), c = random_string(rng, 5);
    EXPECT_EQ((a * b) * c, a * (b * c));
  }
}

TEST(Pauli, TextRoundTrip) {
  for (const char* s : {"+Z2.Y3.Y4.Z5", "-X1", "+iY7.Z10", "-iX3.X4", "+I"}) EXPECT_EQ(P(s).to_string(), s);
  EXPECT_THROW(P("+Z3.Z2"), Error);
  EXPECT_THROW(P("Q1"), Error);
  EXPECT_THROW(P("+X0"), Error);
}

TEST(Pauli, SparseProductScalesWithSupport) {
  // 10^4-qubit labels, tiny support.
  auto a = P("+X1.Z10000"), b = P("+X9999.Z10000");
  auto c = a * b;
  EXPECT_EQ(c.to_string(), "+X1.X9999");
  EXPECT_EQ(c.max_label(), 9999u);
}
