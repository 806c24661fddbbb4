#include <gtest/gtest.h>

#include <cmath>

#include "scem/domain.hpp"

using namespace scem;

namespace {

DomainSpec spec(int nx, int ny, double dx, double dy) {
    DomainSpec s;
    s.nx = nx;
    s.ny = ny;
    s.dx = dx;
    s.dy = dy;
    return s;
}

}  // namespace

TEST(Domain, TableOneExtentGivesRectangularCells) {
    const double dx = 664.3e3 / 64;
    const double dy = 443.0e3 / 42;
    EXPECT_NEAR(dx, 10380.0, 1.0);
    EXPECT_NEAR(dy, 10547.6, 1.0);
    Domain d = Domain::build(spec(64, 42, dx, dy), Grid2<double>(64, 42, 4600.0));
    EXPECT_EQ(d.water_cells(), 64 * 42);
    EXPECT_NEAR(d.width(), 664.3e3, 1e-6);
}

TEST(Domain, AllLandIsValid) {
    Domain d = Domain::build(spec(4, 3, 100, 100), Grid2<double>(4, 3, 0.0));
    EXPECT_EQ(d.water_cells(), 0);
    EXPECT_EQ(d.land_cells(), 12);
    EXPECT_THROW(d.depth_levels(1, 1), ModelError);
}

TEST(Domain, LevelsFiftyMetres) {
    auto s = spec(3, 3, 100, 100);
    s.coarse_step = 5.0;
    Domain d = Domain::build(s, Grid2<double>(3, 3, 50.0));
    std::vector<double> want;
    for (int k = 0; k <= 10; ++k) want.push_back(0.5 * k);
    for (int m = 10; m <= 50; m += 5) want.push_back(m);
    const auto& got = d.depth_levels(0, 0);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t k = 0; k < want.size(); ++k) EXPECT_NEAR(got[k], want[k], 1e-12);
}

TEST(Domain, DepthEqualToZcritIsFineOnly) {
    auto levels = build_depth_levels(5.0, 0.5, 10, 5.0, 25.0);
    EXPECT_EQ(levels.size(), 11u);
    EXPECT_DOUBLE_EQ(levels.back(), 5.0);
}

TEST(Domain, ShallowerThanZcritIsTruncated) {
    auto levels = build_depth_levels(3.2, 0.5, 10, 8.0, 25.0);
    EXPECT_DOUBLE_EQ(levels.back(), 3.2);
    EXPECT_DOUBLE_EQ(levels[levels.size() - 2], 3.0);
}

TEST(Domain, DeepColumnLevelCount) {
    // Direct construction: surface, N_crit fine layers, then ceil((4600 - z_crit) / 25)
    // coarse levels with the last one landing on the bottom.
    const int n_crit = 10;
    const double z_crit = 5.0;
    auto levels = build_depth_levels(4600.0, 0.5, n_crit, z_crit, 25.0);
    const std::size_t expected = 1 + n_crit + static_cast<std::size_t>(std::ceil((4600.0 - z_crit) / 25.0));
    EXPECT_EQ(levels.size(), expected);
    EXPECT_DOUBLE_EQ(levels.back(), 4600.0);
}

TEST(Domain, RejectsBadInput) {
    EXPECT_THROW(Domain::build(spec(4, 3, 100, 100), Grid2<double>(3, 3, 1.0)), ConfigError);
    Grid2<double> neg(3, 3, 10.0);
    neg(1, 1) = -1.0;
    EXPECT_THROW(Domain::build(spec(3, 3, 100, 100), neg), ConfigError);
    Grid2<double> shallow(3, 3, 10.0);
    shallow(0, 0) = 2.0;  // fine mesh is 5 m deep
    EXPECT_THROW(Domain::build(spec(3, 3, 100, 100), shallow), ConfigError);
    EXPECT_THROW(Domain::build(spec(2, 3, 100, 100), Grid2<double>(2, 3, 10.0)), ConfigError);
}

TEST(Domain, CellOfRoundTripAndEdges) {
    Domain d = Domain::build(spec(7, 5, 30.0, 20.0), Grid2<double>(7, 5, 10.0));
    for (int j = 0; j < 5; ++j) {
        for (int i = 0; i < 7; ++i) {
            Vec2 c = d.centre_of(i, j);
            auto cell = d.cell_of(c.x, c.y);
            ASSERT_TRUE(cell);
            EXPECT_EQ(*cell, (CellIndex{i, j}));
        }
    }
    EXPECT_EQ(*d.cell_of(30.0, 0.0), (CellIndex{1, 0}));
    EXPECT_FALSE(d.cell_of(-1.0, -1.0));
    EXPECT_FALSE(d.cell_of(210.0, 10.0));
    EXPECT_FALSE(d.cell_of(NAN, 10.0));
}

TEST(Domain, LevelsStrictlyIncreasing) {
    Grid2<double> bathy(6, 4, 0.0);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 6; ++i) bathy(i, j) = (i + j) % 3 == 0 ? 0.0 : 5.0 + 37.3 * i + 11.1 * j;
    Domain d = Domain::build(spec(6, 4, 100, 100), bathy);
    EXPECT_EQ(d.water_cells() + d.land_cells(), 24);
    for (int j = 0; j < 4; ++j) {
        for (int i = 0; i < 6; ++i) {
            if (!d.is_water(i, j)) continue;
            const auto& z = d.depth_levels(i, j);
            EXPECT_EQ(z.front(), 0.0);
            EXPECT_EQ(z.back(), bathy(i, j));
            for (std::size_t k = 1; k < z.size(); ++k) EXPECT_GT(z[k], z[k - 1]);
        }
    }
}

TEST(Domain, GeographicRoundTrip) {
    auto s = spec(10, 10, 1000, 1000);
    s.origin_lon = -6.0;
    s.origin_lat = 45.0;
    Domain d = Domain::build(s, Grid2<double>(10, 10, 100.0));
    Vec2 ll = d.to_geographic(3500.0, 7200.0);
    Vec2 xy = d.to_local(ll.x, ll.y);
    EXPECT_NEAR(xy.x, 3500.0, 1e-6);
    EXPECT_NEAR(xy.y, 7200.0, 1e-6);
}
