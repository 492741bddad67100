#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ncfbm/combinat.hpp"
#include "ncfbm/errors.hpp"

using namespace ncfbm;

namespace {

// Crossing count straight from the definition, over unordered block pairs.
std::int64_t brute_crossings(const Pairing& p) {
  std::int64_t c = 0;
  for (const auto& [a1, b1] : p.blocks) {
    for (const auto& [a2, b2] : p.blocks) {
      if (a1 < a2 && a2 < b1 && b1 < b2) ++c;
    }
  }
  return c;
}

Pairing make(std::vector<std::pair<int, int>> b) { return Pairing{std::move(b)}; }

}  // namespace

TEST(Combinat, SmallPairingCounts) {
  EXPECT_EQ(enumerate_pairings(1).size(), 1u);
  EXPECT_EQ(enumerate_pairings(1).front().to_string(), "(1,2)");
  EXPECT_EQ(enumerate_pairings(2).size(), 3u);
  EXPECT_EQ(enumerate_pairings(3).size(), 15u);
  for (int m = 1; m <= kPairingListCap; ++m) {
    EXPECT_EQ(enumerate_pairings(m).size(), double_factorial_odd(m)) << m;
  }
}

TEST(Combinat, NoncrossingCounts) {
  const auto nc2 = enumerate_noncrossing(2);
  ASSERT_EQ(nc2.size(), 2u);
  std::set<std::string> got{nc2[0].to_string(), nc2[1].to_string()};
  EXPECT_EQ(got, (std::set<std::string>{"(1,2)(3,4)", "(1,4)(2,3)"}));
  EXPECT_EQ(enumerate_noncrossing(3).size(), 5u);
  EXPECT_EQ(enumerate_noncrossing(5).size(), 42u);
}

TEST(Combinat, CrossingNumberExamples) {
  EXPECT_EQ(crossing_number(make({{1, 2}, {3, 4}})).value, 0);
  EXPECT_EQ(crossing_number(make({{1, 3}, {2, 4}})).value, 1);
  EXPECT_EQ(crossing_number(make({{1, 4}, {2, 5}, {3, 6}})).value, 3);
}

TEST(Combinat, CatalanValues) {
  EXPECT_EQ(catalan(0), 1u);
  EXPECT_EQ(catalan(3), 5u);
  EXPECT_EQ(catalan(7), 429u);
  // Segner recurrence as an independent route.
  std::vector<std::uint64_t> c{1};
  for (int m = 0; m < 30; ++m) {
    unsigned __int128 s = 0;
    for (int i = 0; i <= m; ++i) s += static_cast<unsigned __int128>(c[i]) * c[m - i];
    c.push_back(static_cast<std::uint64_t>(s));
  }
  for (int m = 0; m <= 30; ++m) EXPECT_EQ(catalan(m), c[m]) << m;
  EXPECT_THROW(catalan(31), SizeLimitError);
}

TEST(Combinat, NoncrossingIsTheZeroCrossingSubset) {
  for (int m = 1; m <= 6; ++m) {
    const auto all = enumerate_pairings(m);
    const auto nc = enumerate_noncrossing(m);
    EXPECT_EQ(nc.size(), catalan(m));
    std::set<Pairing> ncset(nc.begin(), nc.end());
    EXPECT_EQ(ncset.size(), nc.size());
    std::size_t zero = 0;
    for (const auto& p : all) {
      const auto c = crossing_number(p).value;
      EXPECT_EQ(c, brute_crossings(p));
      if (c == 0) {
        ++zero;
        EXPECT_TRUE(ncset.count(p)) << p.to_string();
      }
    }
    EXPECT_EQ(zero, nc.size());
  }
}

TEST(Combinat, CanonicalFormAndOrder) {
  const auto all = enumerate_pairings(4);
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
  for (const auto& p : all) {
    std::vector<int> seen;
    for (const auto& [a, b] : p.blocks) {
      EXPECT_LT(a, b);
      seen.push_back(a);
      seen.push_back(b);
    }
    EXPECT_TRUE(std::is_sorted(p.blocks.begin(), p.blocks.end()));
    std::sort(seen.begin(), seen.end());
    for (int i = 0; i < 8; ++i) EXPECT_EQ(seen[i], i + 1);
  }
  EXPECT_EQ(enumerate_pairings(3), enumerate_pairings(3));
}

TEST(Combinat, VisitorsMatchLists) {
  for (int m = 1; m <= 5; ++m) {
    std::vector<Pairing> seen;
    for_each_pairing(m, [&](const auto& blocks, std::int64_t cr) {
      Pairing p;
      for (auto [a, b] : blocks) p.blocks.emplace_back(a + 1, b + 1);
      std::sort(p.blocks.begin(), p.blocks.end());
      EXPECT_EQ(cr, crossing_number(p).value);
      seen.push_back(p);
    });
    EXPECT_EQ(seen, enumerate_pairings(m));
  }
  std::uint64_t count = 0;
  for_each_noncrossing(10, [&](const auto&, std::int64_t cr) {
    EXPECT_EQ(cr, 0);
    ++count;
  });
  EXPECT_EQ(count, catalan(10));
}

TEST(Combinat, CatalanRootsApproachTwo) {
  double prev = 0.0;
  for (int m : {5, 10, 15, 20}) {
    const double r = std::pow(static_cast<double>(catalan(m)), 1.0 / (2.0 * m));
    EXPECT_GT(r, 1.4);
    EXPECT_LE(r, 2.0);
    EXPECT_GT(r, prev);
    prev = r;
  }
}

TEST(Combinat, CapsRaiseSizeErrors) {
  EXPECT_THROW(enumerate_pairings(kPairingListCap + 1), SizeLimitError);
  EXPECT_THROW(enumerate_noncrossing(kNoncrossingCap + 1), SizeLimitError);
  EXPECT_THROW(for_each_pairing(kPairingVisitCap + 1, [](const auto&, std::int64_t) {}), SizeLimitError);
  try {
    enumerate_pairings(9);
  } catch (const SizeLimitError& e) {
    EXPECT_NE(std::string(e.what()).find("34459425"), std::string::npos) << e.what();
  }
}
