#include <gtest/gtest.h>

#include "msf/topology.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace msf;
using msf::test::points;
using msf::test::topology;

namespace {

FiniteTopology discrete2() { return topology(2, {{}, {0}, {1}, {0, 1}}); }
FiniteTopology sierpinski() { return topology(2, {{}, {0}, {0, 1}}); }
FiniteTopology indiscrete2() { return topology(2, {{}, {0, 1}}); }
// Two open points 0 and 2 with a common limit point 1.
FiniteTopology line3() { return topology(3, {{}, {0}, {2}, {0, 2}, {0, 1, 2}}); }

std::vector<FiniteTopology> spaces() { return {discrete2(), sierpinski(), indiscrete2(), line3()}; }

}  // namespace

TEST(Topology, RejectsMissingEmptySet) {
  EXPECT_THROW(topology(2, {{0}, {0, 1}}), TopologyError);
}

TEST(Topology, RejectsMissingWholeSpace) {
  EXPECT_THROW(topology(2, {{}, {0}}), TopologyError);
}

TEST(Topology, RejectsFamilyNotClosedUnderUnion) {
  EXPECT_THROW(topology(3, {{}, {0}, {1}, {0, 1, 2}}), TopologyError);
}

TEST(Topology, RejectsFamilyNotClosedUnderIntersection) {
  EXPECT_THROW(topology(3, {{}, {0, 1}, {1, 2}, {0, 1, 2}}), TopologyError);
}

TEST(Topology, MinimalNeighbourhoods) {
  const auto t = sierpinski();
  EXPECT_EQ(t.minimal_nbhd(PointId(0)), points({0}));
  EXPECT_EQ(t.minimal_nbhd(PointId(1)), points({0, 1}));
  EXPECT_EQ(line3().minimal_nbhd(PointId(1)), points({0, 1, 2}));
}

TEST(Topology, GeneratedMatchesExplicitOpens) {
  const auto g = FiniteTopology::generated_by(3, {points({0}), points({2})});
  EXPECT_EQ(g.opens(), line3().opens());
}

TEST(Topology, InteriorAndClosureMatchOracle) {
  for (const auto& t : spaces()) {
    for (std::uint64_t bits = 0; bits < (1u << t.size()); ++bits) {
      const PointSet s = PointSet::from_bits(bits);
      EXPECT_EQ(interior(t, s), oracle::interior(t, s));
      EXPECT_EQ(closure(t, s), oracle::closure(t, s));
    }
  }
}

TEST(Topology, InteriorClosureMonotoneIdempotent) {
  for (const auto& t : spaces()) {
    const std::uint64_t n = std::uint64_t{1} << t.size();
    for (std::uint64_t a = 0; a < n; ++a) {
      const PointSet s = PointSet::from_bits(a);
      EXPECT_TRUE(interior(t, s).subset_of(s));
      EXPECT_TRUE(s.subset_of(closure(t, s)));
      EXPECT_EQ(interior(t, interior(t, s)), interior(t, s));
      EXPECT_EQ(closure(t, closure(t, s)), closure(t, s));
      for (std::uint64_t b = 0; b < n; ++b) {
        const PointSet r = PointSet::from_bits(b);
        if (!s.subset_of(r)) continue;
        EXPECT_TRUE(interior(t, s).subset_of(interior(t, r)));
        EXPECT_TRUE(closure(t, s).subset_of(closure(t, r)));
      }
    }
  }
}

TEST(Topology, RegularOpensMatchOracle) {
  for (const auto& t : spaces()) EXPECT_EQ(regular_opens(t), oracle::regular_opens(t));
}

TEST(Topology, SierpinskiRegularOpens) {
  const auto t = sierpinski();
  EXPECT_TRUE(is_regular_open(t, points({0, 1})));
  EXPECT_FALSE(is_regular_open(t, points({0})));
  EXPECT_EQ(regularize(t, points({0})), points({0, 1}));
}

TEST(Topology, RegularizeIsRegular) {
  for (const auto& t : spaces()) {
    for (PointSet o : t.opens()) {
      EXPECT_TRUE(is_regular_open(t, regularize(t, o)));
      EXPECT_TRUE(o.subset_of(regularize(t, o)));
    }
  }
}

TEST(Topology, RegularComplementIsInteriorOfComplement) {
  const auto t = line3();
  EXPECT_EQ(regular_complement(t, points({0})), points({2}));
  EXPECT_EQ(regular_complement(t, points({0, 1, 2})), PointSet{});
}

// For regular opens with A \ B nonempty, some nonempty regular open sits in A and misses B.
TEST(Topology, RegularOpenDifferenceContainsRegularOpen) {
  for (const auto& t : spaces()) {
    const auto ro = regular_opens(t);
    for (PointSet a : ro) {
      for (PointSet b : ro) {
        if ((a - b).empty()) continue;
        bool found = false;
        for (PointSet c : ro) found = found || (!c.empty() && c.subset_of(a) && (c & b).empty());
        EXPECT_TRUE(found);
      }
    }
  }
}

TEST(Topology, RegularSpaceDetection) {
  EXPECT_TRUE(is_regular_space(discrete2()));
  EXPECT_TRUE(is_regular_space(indiscrete2()));
  EXPECT_FALSE(is_regular_space(sierpinski()));
  EXPECT_FALSE(is_regular_space(line3()));
}

TEST(Topology, UltrafiltersOnePerAtom) {
  const auto d = enumerate_regular_ultrafilters(discrete2());
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].members(), (std::vector<PointSet>{points({0}), points({0, 1})}));
  EXPECT_EQ(d[1].members(), (std::vector<PointSet>{points({1}), points({0, 1})}));
  EXPECT_EQ(enumerate_regular_ultrafilters(indiscrete2()).size(), 1u);
  EXPECT_EQ(enumerate_regular_ultrafilters(line3()).size(), 2u);
  for (const auto& t : spaces()) {
    for (const auto& f : enumerate_regular_ultrafilters(t)) {
      EXPECT_TRUE(f.is_filter(t));
      EXPECT_TRUE(f.is_ultra_over_regular(t));
    }
  }
}

TEST(Topology, NonUltraFilterDetected) {
  const auto t = discrete2();
  const OpenFilter top({points({0, 1})}, true);
  EXPECT_TRUE(top.is_filter(t));
  EXPECT_FALSE(top.is_ultra_over_regular(t));
  const OpenFilter broken({points({0}), points({1}), points({0, 1})}, true);
  EXPECT_FALSE(broken.is_filter(t));
}

TEST(Topology, FilterTrace) {
  const OpenFilter f({points({0}), points({0, 1})}, true);
  EXPECT_EQ(filter_trace(f, {points({0}), points({0, 1})}), (std::vector<PointSet>{points({0})}));
  EXPECT_EQ(filter_trace(f, {}), f.members());
  EXPECT_THROW(filter_trace(f, {points({1})}), EmptyTrace);
}
