#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "lu25d/grid.hpp"

using namespace lu25d;

TEST(MakeGrid, PresetShapes) {
  const auto flat = make_grid(16, GridPreset::SquareFlat);
  EXPECT_EQ(flat, GridConfig(4, 4, 1));
  EXPECT_EQ(make_grid(8, GridPreset::SquareTwoLayer), GridConfig(2, 2, 2));
  EXPECT_EQ(make_grid(27, GridPreset::Cube), GridConfig(3, 3, 3));
  EXPECT_EQ(make_grid(1, GridPreset::Cube), GridConfig(1, 1, 1));
  EXPECT_EQ(make_grid(32, GridPreset::SquareTwoLayer), GridConfig(4, 4, 2));
}

TEST(MakeGrid, InadmissibleCountsRejected) {
  EXPECT_THROW(make_grid(8, GridPreset::SquareFlat), ShapeError);
  EXPECT_THROW(make_grid(16, GridPreset::SquareTwoLayer), ShapeError);
  EXPECT_THROW(make_grid(9, GridPreset::SquareTwoLayer), ShapeError);
  EXPECT_THROW(make_grid(16, GridPreset::Cube), ShapeError);
  EXPECT_THROW(make_grid(0, GridPreset::SquareFlat), ShapeError);
}

TEST(MakeGrid, ExactRootsOnLargeValues) {
  EXPECT_EQ(exact_sqrt(1u << 20), std::optional<std::size_t>(1u << 10));
  EXPECT_EQ(exact_cbrt(1000000), std::optional<std::size_t>(100));
  EXPECT_FALSE(exact_cbrt(999999).has_value());
  EXPECT_FALSE(exact_sqrt(2).has_value());
}

TEST(ParseGrid, RoundTrip) {
  const auto g = parse_grid("3x4x2");
  EXPECT_EQ(g.px(), 3u);
  EXPECT_EQ(g.py(), 4u);
  EXPECT_EQ(g.pz(), 2u);
  EXPECT_EQ(g.p(), 24u);
  EXPECT_EQ(g.p1(), 12u);
  EXPECT_EQ(g.to_string(), "3x4x2");
}

TEST(ParseGrid, Malformed) {
  for (const char* bad : {"", "4x4", "4x4x", "x4x4", "4x4x4x4", "4*4*1", "ax1x1", "0x1x1"}) {
    EXPECT_THROW(parse_grid(bad), InvalidArgument) << bad;
  }
}

TEST(ParsePreset, ShortAndLongNames) {
  EXPECT_EQ(parse_preset("flat"), GridPreset::SquareFlat);
  EXPECT_EQ(parse_preset("square-two-layer"), GridPreset::SquareTwoLayer);
  EXPECT_EQ(parse_preset("cube"), GridPreset::Cube);
  EXPECT_THROW(parse_preset("ring"), InvalidArgument);
}

TEST(Ownership, BlockCyclicOnLayerZero) {
  EXPECT_EQ(owner_of_block(GridConfig(2, 2, 1), {3, 2}, 8), (ProcId{1, 0, 0}));
  EXPECT_EQ(owner_of_block(GridConfig(3, 3, 3), {4, 7}, 8), (ProcId{1, 1, 0}));
  EXPECT_THROW(owner_of_block(GridConfig(2, 2, 1), {8, 0}, 8), InvalidArgument);
}

TEST(Ownership, RankRoundTrip) {
  const GridConfig g(3, 2, 4);
  std::set<std::size_t> seen;
  for (std::size_t r = 0; r < g.p(); ++r) {
    const auto id = g.proc(r);
    EXPECT_TRUE(g.contains(id));
    EXPECT_EQ(g.rank(id), r);
    seen.insert(r);
  }
  EXPECT_EQ(seen.size(), g.p());
  EXPECT_EQ(g.rank({1, 0, 0}), 1u);  // pi fastest
}

TEST(ActiveSet, ColumnPanelSet) {
  const GridConfig g(3, 3, 3);
  for (std::size_t t = 0; t < 7; ++t) {
    const auto set = panel_active_set(g, t);
    EXPECT_EQ(set.size(), g.px() * g.pz());
    for (const auto& id : set) EXPECT_EQ(id.pj, t % g.py());
    EXPECT_EQ(std::set<ProcId>(set.begin(), set.end()).size(), set.size());
  }
}

TEST(ActiveSet, RowPanelSetMirrors) {
  const GridConfig g(2, 4, 2);
  const auto set = row_panel_active_set(g, 5);
  EXPECT_EQ(set.size(), g.py() * g.pz());
  for (const auto& id : set) EXPECT_EQ(id.pi, 1u);
}

TEST(ProcIdPrint, Format) {
  std::ostringstream os;
  os << ProcId{1, 2, 3};
  EXPECT_EQ(os.str(), "(1,2,3)");
}
