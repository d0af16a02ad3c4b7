#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lu25d/tournament.hpp"

using namespace lu25d;

namespace {

std::vector<ProcId> line(std::size_t count) {
  std::vector<ProcId> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back({i, 0, 0});
  return out;
}

}  // namespace

TEST(Tournament, SingleParticipantMovesNothing) {
  CommFabric f(GridConfig(1, 1, 1));
  f.begin_superstep(Phase::PivotTournament, 0);
  std::vector<std::vector<PivotCandidate>> rows{{{0, 0, {1.0, 2.0}}, {1, 1, {3.0, 1.0}}}};
  const auto r = tournament_pivot(f, line(1), rows, 2, 0, 0);
  EXPECT_EQ(f.end_superstep().total_sent(), 0u);
  ASSERT_EQ(r.pivots.size(), 2u);
  EXPECT_EQ(r.pivots[0].original, 1u);
  EXPECT_EQ(r.rounds, 0u);
}

TEST(Tournament, LargerMagnitudeWins) {
  CommFabric f(GridConfig(2, 1, 1));
  f.begin_superstep(Phase::PivotTournament, 0);
  std::vector<std::vector<PivotCandidate>> rows{{{0, 0, {3.0}}}, {{1, 1, {-5.0}}}};
  const auto r = tournament_pivot(f, line(2), rows, 1, 0, 0);
  const auto& s = f.end_superstep();
  EXPECT_EQ(r.pivots.at(0).original, 1u);
  EXPECT_EQ(s.received[0], 2u);  // one value plus one index
}

TEST(Tournament, FourParticipantsTwoRoundsGlobalMax) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<PivotCandidate>> rows(4);
    double best = -1;
    std::size_t best_orig = 0;
    std::size_t orig = 0;
    for (auto& set : rows) {
      for (int k = 0; k < 3; ++k, ++orig) {
        const double x = u(gen);
        set.push_back({orig, orig, {x}});
        if (std::abs(x) > best) {
          best = std::abs(x);
          best_orig = orig;
        }
      }
    }
    CommFabric f(GridConfig(4, 1, 1));
    f.begin_superstep(Phase::PivotTournament, 0);
    const auto r = tournament_pivot(f, line(4), rows, 1, 0, 0);
    f.end_superstep();
    EXPECT_EQ(r.rounds, 2u);
    EXPECT_EQ(r.pivots.at(0).original, best_orig);
  }
}

TEST(Tournament, TieGoesToSmallestOriginalIndex) {
  CommFabric f(GridConfig(2, 1, 1));
  f.begin_superstep(Phase::PivotTournament, 0);
  std::vector<std::vector<PivotCandidate>> rows{{{0, 7, {2.0}}}, {{1, 3, {-2.0}}}};
  const auto r = tournament_pivot(f, line(2), rows, 1, 0, 0);
  f.end_superstep();
  EXPECT_EQ(r.pivots.at(0).original, 3u);
}

TEST(Tournament, SingularPanelRaisedAtTheRoot) {
  CommFabric f(GridConfig(2, 1, 1));
  f.begin_superstep(Phase::PivotTournament, 4);
  std::vector<std::vector<PivotCandidate>> rows{{{0, 0, {0.0, 1.0}}, {1, 1, {0.0, 2.0}}},
                                                {{2, 2, {0.0, 3.0}}}};
  try {
    tournament_pivot(f, line(2), rows, 2, 4, 8);
    FAIL() << "expected SingularPanelError";
  } catch (const SingularPanelError& e) {
    EXPECT_EQ(e.iteration(), 4u);
    EXPECT_EQ(e.column(), 8u);
  }
}

TEST(Tournament, ReturnedRowsCarryOriginalValues) {
  CommFabric f(GridConfig(1, 1, 1));
  f.begin_superstep(Phase::PivotTournament, 0);
  std::vector<std::vector<PivotCandidate>> rows{{{0, 0, {4.0, 2.0}}, {1, 1, {2.0, 5.0}}}};
  const auto r = tournament_pivot(f, line(1), rows, 2, 0, 0);
  f.end_superstep();
  EXPECT_EQ(r.pivots[1].values, (std::vector<double>{2.0, 5.0}));
}

TEST(Tournament, TooFewCandidates) {
  CommFabric f(GridConfig(1, 1, 1));
  f.begin_superstep(Phase::PivotTournament, 0);
  std::vector<std::vector<PivotCandidate>> rows{{{0, 0, {1.0, 0.0}}}};
  EXPECT_THROW(tournament_pivot(f, line(1), rows, 2, 0, 0), InvalidArgument);
}
