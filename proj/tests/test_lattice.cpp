#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "nullcollapse/lattice.hpp"

using namespace nullcollapse;

TEST(Lattice, RejectsInvalidSpec) {
  EXPECT_THROW(build_lattice({0, 1}), std::invalid_argument);
  EXPECT_THROW(build_lattice({1, 0}), std::invalid_argument);
}

TEST(Lattice, SmallestLattice) {
  const auto g = build_lattice({1, 1});
  EXPECT_EQ(g.slot_count(), 2);
  EXPECT_EQ(g.link_count(), 4);
  EXPECT_EQ(g.left_in(0), 0);
  EXPECT_EQ(g.right_in(0), 1);
  const auto s0 = g.surface_at(g.row_major(), 0);
  const auto s1 = g.surface_at(g.row_major(), 1);
  EXPECT_EQ(s0.links, (std::vector<int>{0, 1}));
  EXPECT_EQ(s1.links, (std::vector<int>{2, 3}));
}

// Hand enumeration for N=2, depth 4 under the stated adjacency:
// v0=(0,0): in {0, 3} -> out {4@slot0, 5@slot3}
// v1=(0,1): in {2, 1} -> out {6@slot2, 7@slot1}
// v2=(1,0): in {4, 7} -> out {8@slot0, 9@slot1}
// v3=(1,1): in {6, 5} -> out {10@slot2, 11@slot3}
TEST(Lattice, WidthTwoDepthFourByHand) {
  const auto g = build_lattice({2, 4});
  EXPECT_EQ(g.left_in(0), 0);
  EXPECT_EQ(g.right_in(0), 3);
  EXPECT_EQ(g.left_in(1), 2);
  EXPECT_EQ(g.right_in(1), 1);
  EXPECT_EQ(g.left_in(2), 4);
  EXPECT_EQ(g.right_in(2), 7);
  EXPECT_EQ(g.left_in(3), 6);
  EXPECT_EQ(g.right_in(3), 5);
  EXPECT_EQ(g.slot_of(4), 0);
  EXPECT_EQ(g.slot_of(5), 3);
  EXPECT_EQ(g.slot_of(6), 2);
  EXPECT_EQ(g.slot_of(7), 1);
  EXPECT_EQ(g.slot_of(9), 1);
  EXPECT_EQ(g.slot_of(11), 3);

  const auto l = g.row_major();
  EXPECT_EQ(g.surface_at(l, 2).links, (std::vector<int>{4, 7, 6, 5}));
  EXPECT_EQ(g.surface_at(l, 4).links, (std::vector<int>{8, 9, 10, 11}));
  for (int k = 0; k < 4; ++k) {
    const auto& links = g.surface_at(l, 4).links;
    EXPECT_TRUE(std::find(links.begin(), links.end(), k) == links.end()) << "initial link " << k << " survives";
  }

  EXPECT_TRUE(g.precedes(0, 2));
  EXPECT_TRUE(g.precedes(0, 3));
  EXPECT_TRUE(g.precedes(1, 2));
  EXPECT_TRUE(g.precedes(1, 3));
  EXPECT_TRUE(g.spacelike(0, 1));
  EXPECT_TRUE(g.spacelike(2, 3));
}

TEST(Lattice, WidthSixDepthSixIsOneSpacelikeRow) {
  const auto g = build_lattice({6, 6});
  for (int u = 0; u < 6; ++u) {
    EXPECT_EQ(g.vertex(u).row, 0);
    for (int v = 0; v < 6; ++v)
      if (u != v) {
        EXPECT_TRUE(g.spacelike(u, v));
      }
  }
  EXPECT_EQ(g.slot_count(), 12);
}

TEST(Lattice, InitialLinksKeepTheirIndexAsSlot) {
  const auto g = build_lattice({3, 5});
  for (int k = 0; k < 6; ++k) EXPECT_EQ(g.slot_of(k), k);
  // l_1 inherits the slot of v_1's left-going ingoing link
  const auto l = g.row_major();
  EXPECT_EQ(g.slot_of(g.labelled_link(l, 1)), g.slot_of(g.left_in(l.order[0])));
  EXPECT_EQ(g.slot_of(g.labelled_link(l, 2)), g.slot_of(g.right_in(l.order[0])));
}

TEST(Lattice, LabellingValidation) {
  const auto g = build_lattice({2, 4});
  EXPECT_NO_THROW(g.validate_labelling({1, 2, 3, 4}));
  EXPECT_NO_THROW(g.validate_labelling({2, 1, 3, 4}));  // spacelike swap
  EXPECT_NO_THROW(g.validate_labelling({2, 1, 4, 3}));
  try {
    g.validate_labelling({1, 3, 2, 4});
    FAIL() << "causal violation accepted";
  } catch (const LabellingError& e) {
    EXPECT_EQ(e.earlier(), 2);
    EXPECT_EQ(e.later(), 3);
  }
  EXPECT_THROW(g.validate_labelling({1, 1, 2, 3}), LabellingError);
  EXPECT_THROW(g.validate_labelling({1, 2, 3}), LabellingError);
}

TEST(Lattice, SurfaceRangeChecked) {
  const auto g = build_lattice({2, 3});
  EXPECT_THROW(g.surface_at(g.row_major(), 4), std::out_of_range);
  EXPECT_THROW(g.surface_at(g.row_major(), -1), std::out_of_range);
}

TEST(Lattice, SpacelikeReorderingGivesSameSurface) {
  const auto g = build_lattice({3, 6});
  const auto a = g.row_major();
  const auto b = g.validate_labelling({2, 1, 3, 4, 5, 6});
  for (int n = 2; n <= 6; ++n) EXPECT_EQ(g.surface_at(a, n).links, g.surface_at(b, n).links);
  EXPECT_EQ(g.surface_at(a, 0).links, g.surface_at(b, 0).links);
}

// Exhaustive structural properties over small lattices and every linear
// extension found by permutation enumeration.
TEST(Lattice, SurfacePropertiesForAllLinearExtensions) {
  for (int width = 1; width <= 3; ++width) {
    for (int depth = 1; depth <= 6; ++depth) {
      const auto g = build_lattice({width, depth});
      // strict partial order
      for (int u = 0; u < depth; ++u) {
        EXPECT_FALSE(g.precedes(u, u));
        for (int v = 0; v < depth; ++v) {
          if (g.precedes(u, v)) {
            EXPECT_LT(g.vertex(u).row, g.vertex(v).row);
            EXPECT_FALSE(g.precedes(v, u));
          }
          for (int w = 0; w < depth; ++w)
            if (g.precedes(u, v) && g.precedes(v, w)) {
              EXPECT_TRUE(g.precedes(u, w));
            }
        }
      }
      std::vector<int> perm(depth);
      for (int i = 0; i < depth; ++i) perm[i] = i + 1;
      do {
        NaturalLabelling l;
        try {
          l = g.validate_labelling(perm);
        } catch (const LabellingError&) {
          continue;
        }
        std::set<int> past;
        for (int n = 0; n <= depth; ++n) {
          const auto s = g.surface_at(l, n);
          ASSERT_EQ(static_cast<int>(s.links.size()), 2 * width);
          std::set<int> slots;
          for (int k = 0; k < 2 * width; ++k) {
            EXPECT_EQ(g.slot_of(s.links[k]), k);
            slots.insert(g.slot_of(s.links[k]));
            const int src = g.link(s.links[k]).source;
            EXPECT_TRUE(src < 0 || past.count(src)) << "link source not yet evolved over";
          }
          EXPECT_EQ(static_cast<int>(slots.size()), 2 * width);
          // mutually spacelike: no link ends at a vertex that another link starts from
          for (int a : s.links)
            for (int b : s.links) {
              const int src_b = g.link(b).source;
              if (src_b < 0) continue;
              EXPECT_FALSE(g.left_in(src_b) == a || g.right_in(src_b) == a);
            }
          if (n > 0) {
            const auto prev = g.surface_at(l, n - 1);
            int changed = 0;
            for (int k = 0; k < 2 * width; ++k) changed += prev.links[k] != s.links[k];
            EXPECT_EQ(changed, 2);
          }
          if (n < depth) past.insert(l.order[n]);
        }
      } while (depth <= 5 && std::next_permutation(perm.begin(), perm.end()));
      EXPECT_NO_THROW(g.validate_labelling(g.row_major()));
    }
  }
}
