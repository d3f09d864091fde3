#include <gtest/gtest.h>

#include <set>
#include <tuple>

#include "gmcf/work_distribution.hpp"

using namespace gmcf;

TEST(BoundaryRange, Examples) {
  EXPECT_EQ(boundary_range(150, 150, 90), 49500);
  EXPECT_EQ(boundary_range(1, 1, 1), 3);
  EXPECT_EQ(boundary_range(2, 3, 4), 26);
}

TEST(MapGid, Examples) {
  auto p0 = map_boundary_gid(0, 2, 3, 4);
  ASSERT_TRUE(p0);
  EXPECT_EQ(p0->face, Face::YZ);
  EXPECT_EQ(p0->coords[0], 0);  // j
  EXPECT_EQ(p0->coords[1], 0);  // k

  auto p12 = map_boundary_gid(12, 2, 3, 4);
  ASSERT_TRUE(p12);
  EXPECT_EQ(p12->face, Face::ZX);
  EXPECT_EQ(p12->coords[0], 0);  // k
  EXPECT_EQ(p12->coords[1], 0);  // i

  auto p25 = map_boundary_gid(25, 2, 3, 4);
  ASSERT_TRUE(p25);
  EXPECT_EQ(p25->face, Face::XY);
  EXPECT_EQ(p25->coords[0], 2);  // j
  EXPECT_EQ(p25->coords[1], 1);  // i

  EXPECT_FALSE(map_boundary_gid(26, 2, 3, 4).has_value());
  EXPECT_FALSE(map_boundary_gid(1000, 2, 3, 4).has_value());
}

TEST(MapGid, BranchArithmetic) {
  // YZ: k = gid / jp, j = gid % jp.
  auto p = map_boundary_gid(7, 2, 3, 4);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->face, Face::YZ);
  EXPECT_EQ(p->coords[0], 1);
  EXPECT_EQ(p->coords[1], 2);
  // ZX: r = gid - jp kp, k = r / ip, i = r % ip.
  p = map_boundary_gid(17, 2, 3, 4);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->face, Face::ZX);
  EXPECT_EQ(p->coords[0], 2);
  EXPECT_EQ(p->coords[1], 1);
}

TEST(PaddedRange, Examples) {
  EXPECT_EQ(padded_range(49500, 32, 15), 49920);
  EXPECT_EQ(padded_range(480, 32, 15), 480);
  EXPECT_EQ(padded_range(0, 32, 15), 0);
  EXPECT_EQ(padded_range(26, 2, 3), 30);
}

TEST(PaddedRange, Properties) {
  for (std::int64_t range = 0; range < 300; ++range)
    for (std::int64_t t = 1; t <= 6; ++t)
      for (std::int64_t u = 1; u <= 5; ++u) {
        const auto r = padded_range(range, t, u);
        EXPECT_EQ(r % (t * u), 0);
        EXPECT_GE(r, range);
        EXPECT_LT(r - range, t * u);
      }
}

// Brute force: every (face, point) pair is hit exactly once.
TEST(Coverage, ExhaustiveUpTo8) {
  for (std::int64_t ip = 1; ip <= 8; ++ip)
    for (std::int64_t jp = 1; jp <= 8; ++jp)
      for (std::int64_t kp = 1; kp <= 8; ++kp) {
        std::set<std::tuple<int, std::int64_t, std::int64_t>> seen;
        const auto range = boundary_range(ip, jp, kp);
        const auto padded = padded_range(range, 4, 3);
        for (std::int64_t gid = 0; gid < padded; ++gid) {
          auto p = map_boundary_gid(gid, ip, jp, kp);
          if (gid >= range) {
            ASSERT_FALSE(p.has_value());
            continue;
          }
          ASSERT_TRUE(p.has_value());
          // (j,k) on YZ, (k,i) on ZX, (j,i) on XY.
          const auto [n0, n1] = p->face == Face::YZ   ? std::pair{jp, kp}
                                : p->face == Face::ZX ? std::pair{kp, ip}
                                                      : std::pair{jp, ip};
          ASSERT_TRUE(p->coords[0] >= 0 && p->coords[0] < n0);
          ASSERT_TRUE(p->coords[1] >= 0 && p->coords[1] < n1);
          ASSERT_TRUE(seen.insert({static_cast<int>(p->face), p->coords[0], p->coords[1]}).second);
        }
        EXPECT_EQ(static_cast<std::int64_t>(seen.size()), range);
      }
}

TEST(Audit, Examples) {
  auto a = audit_boundary_coverage(2, 3, 4, 2, 3);
  EXPECT_TRUE(a.ok());
  EXPECT_EQ(a.covered, 26);
  EXPECT_EQ(a.padding, 4);

  a = audit_boundary_coverage(1, 1, 1, 1, 1);
  EXPECT_TRUE(a.ok());
  EXPECT_EQ(a.covered, 3);
  EXPECT_EQ(a.padding, 0);

  a = audit_boundary_coverage(150, 150, 90, 32, 15);
  EXPECT_TRUE(a.ok());
  EXPECT_EQ(a.boundary_range, 49500);
  EXPECT_EQ(a.padded_range, 49920);
  EXPECT_EQ(a.covered, 49500);
  EXPECT_EQ(a.padding, 420);
}
