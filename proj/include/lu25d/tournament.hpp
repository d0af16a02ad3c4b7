#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "lu25d/error.hpp"
#include "lu25d/fabric.hpp"
#include "lu25d/matrix.hpp"

namespace lu25d {

/// One panel row competing for a pivot slot.
struct PivotCandidate {
  std::size_t position = 0;  // current row position in the matrix
  std::size_t original = 0;  // row index in the unpermuted input (tie-breaker)
  std::vector<double> values;  // the row's v panel entries, unreduced by elimination
};

struct TournamentResult {
  std::vector<PivotCandidate> pivots;  // in pivot order
  std::size_t rounds = 0;
};

/// Partial-pivoted elimination over a stacked candidate set, keeping up to v
/// winners in the order they were chosen. Eliminated values are scratch; the
/// returned rows carry their original entries.
///
/// Only the final merge may declare the panel singular. Intermediate merges
/// that run out of nonzero pivots still pick rows (by tie-break) so the
/// candidate count stays v.
inline std::vector<PivotCandidate> select_pivot_rows(std::vector<PivotCandidate> rows,
                                                     std::size_t v, bool final_merge,
                                                     std::size_t iteration,
                                                     std::size_t first_column) {
  const std::size_t keep = std::min(v, rows.size());
  std::vector<std::vector<double>> work;
  work.reserve(rows.size());
  for (const auto& r : rows) work.push_back(r.values);
  std::vector<bool> taken(rows.size(), false);
  std::vector<std::size_t> order;
  order.reserve(keep);

  for (std::size_t j = 0; j < keep; ++j) {
    std::size_t best = rows.size();
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (taken[r]) continue;
      if (best == rows.size() ||
          detail::pivot_precedes(std::abs(work[r][j]), rows[r].original,
                                 std::abs(work[best][j]), rows[best].original)) {
        best = r;
      }
    }
    taken[best] = true;
    order.push_back(best);
    if (std::abs(work[best][j]) < kSingularityThreshold) {
      if (final_merge) throw SingularPanelError(iteration, first_column + j);
      continue;
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!taken[r]) detail::eliminate_with_pivot(work[r], work[best], j);
    }
  }

  std::vector<PivotCandidate> out;
  out.reserve(keep);
  for (std::size_t idx : order) out.push_back(std::move(rows[idx]));
  return out;
}

/// Tournament pivoting over a binary reduction tree.
///
/// `local_rows[i]` holds the panel rows of `participants[i]`. Each participant
/// first reduces its own rows to a candidate set; in round r, participant i
/// with i % 2^(r+1) == 0 receives its partner's set (v*v values plus v row
/// indices) and merges. Participant 0 ends with the pivots. Must be called
/// inside an open superstep.
inline TournamentResult tournament_pivot(CommFabric& fabric, std::span<const ProcId> participants,
                                         std::vector<std::vector<PivotCandidate>> local_rows,
                                         std::size_t v, std::size_t iteration,
                                         std::size_t first_column) {
  const std::size_t count = participants.size();
  if (count == 0) throw InvalidArgument("tournament needs at least one participant");
  if (local_rows.size() != count) throw DimensionError("one row set per participant required");

  std::vector<std::vector<PivotCandidate>> sets(count);
  for (std::size_t i = 0; i < count; ++i) {
    sets[i] = select_pivot_rows(std::move(local_rows[i]), v, count == 1, iteration, first_column);
  }

  TournamentResult result;
  for (std::size_t mask = 1; mask < count; mask <<= 1) {
    ++result.rounds;
    const bool last_round = mask * 2 >= count;
    for (std::size_t i = 0; i + mask < count; i += 2 * mask) {
      auto& mine = sets[i];
      auto& theirs = sets[i + mask];
      const auto n_cand = static_cast<Words>(theirs.size());
      fabric.send(participants[i + mask], participants[i], n_cand * v + n_cand);
      for (auto& c : theirs) mine.push_back(std::move(c));
      theirs.clear();
      mine = select_pivot_rows(std::move(mine), v, last_round && i == 0, iteration, first_column);
    }
  }
  result.pivots = std::move(sets[0]);
  if (result.pivots.size() < v) {
    throw InvalidArgument("tournament saw fewer than v candidate rows");
  }
  return result;
}

}  // namespace lu25d
