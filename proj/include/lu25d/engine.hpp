#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "lu25d/error.hpp"
#include "lu25d/fabric.hpp"
#include "lu25d/grid.hpp"
#include "lu25d/matrix.hpp"
#include "lu25d/tournament.hpp"

namespace lu25d {

struct EngineConfig {
  std::size_t n = 0;
  std::size_t v = 0;
  GridConfig grid{1, 1, 1};
  std::uint64_t seed = 0;
  Collective collective = Collective::Rsag;

  void validate() const {
    if (n == 0 || v == 0) throw InvalidArgument("n and v must be >= 1");
    if (n % v != 0) throw InvalidArgument("panel width v must divide n");
    if (n % (v * grid.px()) != 0 || n % (v * grid.py()) != 0) {
      throw InvalidArgument("n=" + std::to_string(n) + " is not a multiple of v*px and v*py for v=" +
                            std::to_string(v) + " on grid " + grid.to_string());
    }
  }
};

/// Largest v <= 8 with v | n, (v*px) | n and (v*py) | n.
inline std::size_t default_panel_width(std::size_t n, const GridConfig& g) {
  for (std::size_t v = 8; v >= 1; --v) {
    if (n % v == 0 && n % (v * g.px()) == 0 && n % (v * g.py()) == 0) return v;
  }
  throw InvalidArgument("no panel width <= 8 fits n=" + std::to_string(n) + " on grid " +
                        g.to_string());
}

struct FactorizationRun {
  EngineConfig config;
  LUFactors factors;
  CommLedger ledger;
  /// Selected pivot rows per processor, indexed by grid rank. A pivot is
  /// credited to the layer-0 holder of its row at selection time.
  std::vector<std::size_t> pivot_owner_counts;
  /// Original row indices in the order they were chosen as pivots.
  std::vector<std::size_t> pivot_sequence;

  std::size_t pivot_count(const ProcId& id) const {
    return pivot_owner_counts.at(config.grid.rank(id));
  }
};

namespace detail {

/// [begin, end) of part `index` when `total` items are split into `parts`
/// contiguous pieces whose sizes differ by at most one.
inline std::pair<std::size_t, std::size_t> contiguous_part(std::size_t total, std::size_t parts,
                                                           std::size_t index) {
  return {total * index / parts, total * (index + 1) / parts};
}

/// Throws if any processor outside `allowed` moved data in `step`.
inline void check_confined(const GridConfig& g, const Superstep& step,
                           std::span<const ProcId> allowed) {
  std::vector<bool> ok(g.p(), false);
  for (const auto& id : allowed) ok[g.rank(id)] = true;
  for (std::size_t r = 0; r < g.p(); ++r) {
    if (!ok[r] && (step.sent[r] != 0 || step.received[r] != 0)) {
      throw InvariantViolation("processor outside the active set moved data in " +
                               std::string(to_string(step.phase)) + " of iteration " +
                               std::to_string(step.iteration));
    }
  }
}

// The simulated 2.5D factorization. Layer 0 keeps the resident matrix in a 2D
// block-cyclic layout; layers 1..c-1 keep Schur-update accumulators in the
// same layout. Matrix values are stored globally per layer and the ownership
// map decides who "holds" what; every movement between holders goes through
// the fabric.
class Engine {
 public:
  Engine(const EngineConfig& cfg, const DenseMatrix& a)
      : cfg_(cfg),
        g_(cfg.grid),
        n_(cfg.n),
        v_(cfg.v),
        nb_(cfg.n / cfg.v),
        fabric_(cfg.grid),
        orig_(cfg.n),
        pivot_counts_(cfg.grid.p(), 0) {
    cfg_.validate();
    if (a.rows() != n_ || a.cols() != n_) {
      throw DimensionError("engine input must be " + std::to_string(n_) + "x" + std::to_string(n_));
    }
    layers_.reserve(g_.pz());
    layers_.push_back(a);
    for (std::size_t k = 1; k < g_.pz(); ++k) layers_.emplace_back(n_, n_);
    std::iota(orig_.begin(), orig_.end(), std::size_t{0});
  }

  FactorizationRun run() && {
    for (std::size_t t = 0; t < nb_; ++t) iteration(t);
    FactorizationRun out;
    out.config = cfg_;
    out.factors = split_combined(layers_[0], RowPermutation(orig_));
    out.ledger = std::move(fabric_).take_ledger();
    out.pivot_owner_counts = std::move(pivot_counts_);
    out.pivot_sequence = std::move(pivot_sequence_);
    return out;
  }

 private:
  struct PanelRow {
    std::vector<double> values;
  };

  void iteration(std::size_t t) {
    const std::size_t r0 = t * v_;
    const auto col_set = panel_active_set(g_, t);

    // Column panel rows [r0, n) are split contiguously over the active set.
    const std::size_t rows = n_ - r0;
    std::vector<std::pair<std::size_t, std::size_t>> row_chunks;
    for (std::size_t a = 0; a < col_set.size(); ++a) {
      const auto [lo, hi] = contiguous_part(rows, col_set.size(), a);
      row_chunks.emplace_back(r0 + lo, r0 + hi);
    }
    auto owner_of_row = [&](std::size_t r) -> const ProcId& {
      for (std::size_t a = 0; a < row_chunks.size(); ++a) {
        if (r >= row_chunks[a].first && r < row_chunks[a].second) return col_set[a];
      }
      throw InvariantViolation("row outside the panel");
    };

    std::vector<std::vector<double>> panel = reduce_column_panel(t, col_set, row_chunks);
    const auto pivots = select_pivots(t, col_set, row_chunks, panel);
    std::vector<std::vector<double>> lu00 = factor_panel(t, col_set, row_chunks, pivots, panel);
    apply_swaps_and_return_panel(t, pivots, panel, owner_of_row);
    if (t + 1 < nb_) {
      auto u01 = reduce_row_panel(t);
      solve_row_panel(t, lu00, u01);
      schur_update(t);
    } else {
      // The last iteration has no trailing matrix; the phases still get
      // their (empty) supersteps so every iteration lists every phase.
      for (Phase p : {Phase::PanelReduceA01, Phase::Trsm, Phase::SchurUpdate}) {
        fabric_.begin_superstep(p, t);
        fabric_.end_superstep();
      }
    }
  }

  /// The copies of one block position across all layers.
  std::vector<ProcId> layer_fiber(std::size_t pi, std::size_t pj) const {
    std::vector<ProcId> fiber;
    for (std::size_t k = 0; k < g_.pz(); ++k) fiber.push_back({pi, pj, k});
    return fiber;
  }

  // Each layer's partial of every panel row is combined on the
  // row's 1D owner.
  std::vector<std::vector<double>> reduce_column_panel(
      std::size_t t, const std::vector<ProcId>& col_set,
      const std::vector<std::pair<std::size_t, std::size_t>>& row_chunks) {
    const std::size_t r0 = t * v_;
    const std::size_t c0 = t * v_;
    const std::size_t pj = t % g_.py();
    fabric_.begin_superstep(Phase::PanelReduceA10, t);
    for (std::size_t a = 0; a < col_set.size(); ++a) {
      std::vector<Words> rows_by_holder(g_.px(), 0);
      for (std::size_t r = row_chunks[a].first; r < row_chunks[a].second; ++r) {
        ++rows_by_holder[(r / v_) % g_.px()];
      }
      for (std::size_t pi = 0; pi < g_.px(); ++pi) {
        if (rows_by_holder[pi] == 0) continue;
        fabric_.reduce_to(layer_fiber(pi, pj), col_set[a], rows_by_holder[pi] * v_,
                          cfg_.collective);
      }
    }
    check_confined(g_, fabric_.current(), col_set);
    fabric_.end_superstep();

    std::vector<std::vector<double>> panel(n_ - r0, std::vector<double>(v_));
    for (std::size_t r = r0; r < n_; ++r) {
      for (std::size_t j = 0; j < v_; ++j) panel[r - r0][j] = combine_layers(r, c0 + j);
    }
    return panel;
  }

  std::vector<PivotCandidate> select_pivots(
      std::size_t t, const std::vector<ProcId>& col_set,
      const std::vector<std::pair<std::size_t, std::size_t>>& row_chunks,
      const std::vector<std::vector<double>>& panel) {
    const std::size_t r0 = t * v_;
    std::vector<ProcId> participants;
    std::vector<std::vector<PivotCandidate>> local;
    for (std::size_t a = 0; a < col_set.size(); ++a) {
      const auto [lo, hi] = row_chunks[a];
      if (lo == hi) continue;
      participants.push_back(col_set[a]);
      std::vector<PivotCandidate> rows;
      for (std::size_t r = lo; r < hi; ++r) rows.push_back({r, orig_[r], panel[r - r0]});
      local.push_back(std::move(rows));
    }
    fabric_.begin_superstep(Phase::PivotTournament, t);
    auto result = tournament_pivot(fabric_, participants, std::move(local), v_, t, t * v_);
    check_confined(g_, fabric_.current(), col_set);
    fabric_.end_superstep();

    participants_ = std::move(participants);
    for (const auto& p : result.pivots) {
      ++pivot_counts_[g_.rank(block_holder(g_, p.position / v_, t, 0))];
      pivot_sequence_.push_back(p.original);
    }
    return std::move(result.pivots);
  }

  // The winning rows reach every participant; each computes the pivot block
  // and the L rows of its own slice.
  std::vector<std::vector<double>> factor_panel(
      std::size_t t, const std::vector<ProcId>& col_set,
      const std::vector<std::pair<std::size_t, std::size_t>>& row_chunks,
      const std::vector<PivotCandidate>& pivots, std::vector<std::vector<double>>& panel) {
    (void)row_chunks;
    const std::size_t r0 = t * v_;
    fabric_.begin_superstep(Phase::PanelFactor, t);
    fabric_.broadcast(participants_, participants_.front(), v_ * v_ + v_, cfg_.collective);
    check_confined(g_, fabric_.current(), col_set);
    fabric_.end_superstep();

    std::vector<std::vector<double>> lu00(v_);
    std::vector<bool> is_pivot(n_ - r0, false);
    for (std::size_t j = 0; j < v_; ++j) {
      lu00[j] = pivots[j].values;
      for (std::size_t i = 0; i < j; ++i) detail::eliminate_with_pivot(lu00[j], lu00[i], i);
      is_pivot[pivots[j].position - r0] = true;
    }
    for (std::size_t j = 0; j < v_; ++j) panel[pivots[j].position - r0] = lu00[j];
    for (std::size_t r = 0; r < panel.size(); ++r) {
      if (is_pivot[r]) continue;
      for (std::size_t j = 0; j < v_; ++j) detail::eliminate_with_pivot(panel[r], lu00[j], j);
    }
    return lu00;
  }

  // Row interchanges on every layer, then the factored column panel goes
  // back from the 1D owners to its layer-0 holders.
  template <typename OwnerOf>
  void apply_swaps_and_return_panel(std::size_t t, const std::vector<PivotCandidate>& pivots,
                                    const std::vector<std::vector<double>>& panel,
                                    OwnerOf&& owner_of_row) {
    const std::size_t r0 = t * v_;
    const std::size_t c0 = t * v_;
    // source[pos] = pre-swap position of the row that ends up at pos
    std::vector<std::size_t> source(n_ - r0), where(n_ - r0);
    std::iota(source.begin(), source.end(), r0);
    std::iota(where.begin(), where.end(), r0);
    for (std::size_t j = 0; j < v_; ++j) {
      const std::size_t cur = where[pivots[j].position - r0];
      const std::size_t dst = r0 + j;
      if (cur == dst) continue;
      std::swap(source[cur - r0], source[dst - r0]);
      where[source[cur - r0] - r0] = cur;
      where[source[dst - r0] - r0] = dst;
    }

    fabric_.begin_superstep(Phase::Bcast, t);
    std::vector<std::size_t> moved;
    for (std::size_t pos = r0; pos < n_; ++pos) {
      if (source[pos - r0] != pos) moved.push_back(pos);
    }
    for (std::size_t k = 0; k < g_.pz(); ++k) {
      for (std::size_t pos : moved) {
        const std::size_t src = source[pos - r0];
        for (std::size_t bj = (k == 0 ? 0 : t + 1); bj < nb_; ++bj) {
          if (bj == t) continue;
          fabric_.send(block_holder(g_, src / v_, bj, k), block_holder(g_, pos / v_, bj, k), v_);
        }
      }
      if (moved.empty()) continue;
      std::vector<std::vector<double>> saved;
      saved.reserve(moved.size());
      for (std::size_t pos : moved) {
        const auto row = layers_[k].row(source[pos - r0]);
        saved.emplace_back(row.begin(), row.end());
      }
      for (std::size_t m = 0; m < moved.size(); ++m) {
        auto dst = layers_[k].row(moved[m]);
        for (std::size_t c = 0; c < n_; ++c) {
          if (c >= c0 && c < c0 + v_) continue;
          dst[c] = saved[m][c];
        }
      }
    }
    {
      std::vector<std::size_t> new_orig(moved.size());
      for (std::size_t m = 0; m < moved.size(); ++m) new_orig[m] = orig_[source[moved[m] - r0]];
      for (std::size_t m = 0; m < moved.size(); ++m) orig_[moved[m]] = new_orig[m];
    }
    for (std::size_t pos = r0; pos < n_; ++pos) {
      const std::size_t src = source[pos - r0];
      fabric_.send(owner_of_row(src), block_holder(g_, pos / v_, t, 0), v_);
      for (std::size_t j = 0; j < v_; ++j) layers_[0](pos, c0 + j) = panel[src - r0][j];
    }
    fabric_.end_superstep();
  }

  // The row panel (block row t right of the diagonal) is combined on
  // its 1D column owners.
  std::vector<std::vector<double>> reduce_row_panel(std::size_t t) {
    const std::size_t r0 = t * v_;
    const std::size_t c1 = (t + 1) * v_;
    const std::size_t pi = t % g_.px();
    const auto row_set = row_panel_active_set(g_, t);
    col_chunks_.clear();
    for (std::size_t b = 0; b < row_set.size(); ++b) {
      const auto [lo, hi] = contiguous_part(n_ - c1, row_set.size(), b);
      col_chunks_.emplace_back(c1 + lo, c1 + hi);
    }

    fabric_.begin_superstep(Phase::PanelReduceA01, t);
    for (std::size_t b = 0; b < row_set.size(); ++b) {
      std::vector<Words> cols_by_holder(g_.py(), 0);
      for (std::size_t c = col_chunks_[b].first; c < col_chunks_[b].second; ++c) {
        ++cols_by_holder[(c / v_) % g_.py()];
      }
      for (std::size_t pj = 0; pj < g_.py(); ++pj) {
        if (cols_by_holder[pj] == 0) continue;
        fabric_.reduce_to(layer_fiber(pi, pj), row_set[b], cols_by_holder[pj] * v_,
                          cfg_.collective);
      }
    }
    check_confined(g_, fabric_.current(), row_set);
    fabric_.end_superstep();

    std::vector<std::vector<double>> u01(v_, std::vector<double>(n_ - c1));
    for (std::size_t i = 0; i < v_; ++i) {
      for (std::size_t c = c1; c < n_; ++c) u01[i][c - c1] = combine_layers(r0 + i, c);
    }
    return u01;
  }

  void solve_row_panel(std::size_t t, const std::vector<std::vector<double>>& lu00,
                       std::vector<std::vector<double>>& u01) {
    const std::size_t r0 = t * v_;
    const std::size_t c1 = (t + 1) * v_;
    const auto row_set = row_panel_active_set(g_, t);
    const ProcId diag = block_holder(g_, t, t, 0);

    fabric_.begin_superstep(Phase::Trsm, t);
    std::vector<ProcId> group{diag};
    for (std::size_t b = 0; b < row_set.size(); ++b) {
      if (col_chunks_[b].first < col_chunks_[b].second && !(row_set[b] == diag)) {
        group.push_back(row_set[b]);
      }
    }
    fabric_.broadcast(group, diag, v_ * v_, cfg_.collective);
    check_confined(g_, fabric_.current(), row_set);
    fabric_.end_superstep();

    for (std::size_t c = 0; c < n_ - c1; ++c) {
      for (std::size_t i = 0; i < v_; ++i) {
        for (std::size_t jr = i + 1; jr < v_; ++jr) u01[jr][c] -= lu00[jr][i] * u01[i][c];
      }
    }

    fabric_.begin_superstep(Phase::Bcast, t);
    for (std::size_t b = 0; b < row_set.size(); ++b) {
      std::vector<Words> cols_by_holder(g_.py(), 0);
      for (std::size_t c = col_chunks_[b].first; c < col_chunks_[b].second; ++c) {
        ++cols_by_holder[(c / v_) % g_.py()];
      }
      for (std::size_t pj = 0; pj < g_.py(); ++pj) {
        fabric_.send(row_set[b], ProcId{t % g_.px(), pj, 0}, cols_by_holder[pj] * v_);
      }
    }
    fabric_.end_superstep();
    for (std::size_t i = 0; i < v_; ++i) {
      for (std::size_t c = c1; c < n_; ++c) layers_[0](r0 + i, c) = u01[i][c - c1];
    }
  }

  // Layer k owns columns [v*k/c, v*(k+1)/c) of the panel. Its processors
  // receive the matching slices of L10 (along grid rows) and U01 (along grid
  // columns) and fold the product into their accumulators; layer 0 updates
  // the resident matrix directly.
  void schur_update(std::size_t t) {
    const std::size_t c0 = t * v_;
    const std::size_t c1 = (t + 1) * v_;
    const std::size_t c = g_.pz();

    std::vector<Words> blocks_per_pi(g_.px(), 0), blocks_per_pj(g_.py(), 0);
    for (std::size_t b = t + 1; b < nb_; ++b) {
      ++blocks_per_pi[b % g_.px()];
      ++blocks_per_pj[b % g_.py()];
    }

    fabric_.begin_superstep(Phase::SchurUpdate, t);
    for (std::size_t k = 0; k < c; ++k) {
      const auto [k0, k1] = contiguous_part(v_, c, k);
      const Words width = k1 - k0;
      if (width == 0) continue;
      for (std::size_t pi = 0; pi < g_.px(); ++pi) {
        if (blocks_per_pi[pi] == 0) continue;
        const ProcId root{pi, t % g_.py(), 0};
        std::vector<ProcId> group{root};
        for (std::size_t pj = 0; pj < g_.py(); ++pj) {
          const ProcId m{pi, pj, k};
          if (!(m == root)) group.push_back(m);
        }
        fabric_.broadcast(group, root, blocks_per_pi[pi] * v_ * width, cfg_.collective);
      }
      for (std::size_t pj = 0; pj < g_.py(); ++pj) {
        if (blocks_per_pj[pj] == 0) continue;
        const ProcId root{t % g_.px(), pj, 0};
        std::vector<ProcId> group{root};
        for (std::size_t pi = 0; pi < g_.px(); ++pi) {
          const ProcId m{pi, pj, k};
          if (!(m == root)) group.push_back(m);
        }
        fabric_.broadcast(group, root, blocks_per_pj[pj] * v_ * width, cfg_.collective);
      }
    }
    fabric_.end_superstep();

    const DenseMatrix& resident = layers_[0];
    for (std::size_t k = 0; k < c; ++k) {
      const auto [k0, k1] = contiguous_part(v_, c, k);
      if (k0 == k1) continue;
      DenseMatrix& target = layers_[k];
      for (std::size_t r = c1; r < n_; ++r) {
        for (std::size_t col = c1; col < n_; ++col) {
          double x = target(r, col);
          for (std::size_t kk = k0; kk < k1; ++kk) {
            x -= resident(r, c0 + kk) * resident(c0 + kk, col);
          }
          target(r, col) = x;
        }
      }
    }
  }

  /// Resident value plus every layer's accumulator (in layer order); the
  /// accumulators are consumed.
  double combine_layers(std::size_t r, std::size_t col) {
    double x = layers_[0](r, col);
    for (std::size_t k = 1; k < layers_.size(); ++k) {
      x += layers_[k](r, col);
      layers_[k](r, col) = 0.0;
    }
    return x;
  }

  EngineConfig cfg_;
  GridConfig g_;
  std::size_t n_;
  std::size_t v_;
  std::size_t nb_;
  CommFabric fabric_;
  std::vector<DenseMatrix> layers_;
  std::vector<std::size_t> orig_;
  std::vector<std::size_t> pivot_counts_;
  std::vector<std::size_t> pivot_sequence_;
  std::vector<ProcId> participants_;
  std::vector<std::pair<std::size_t, std::size_t>> col_chunks_;
};

}  // namespace detail

/// Runs the simulated 2.5D LU with tournament pivoting on `a`.
inline FactorizationRun run(const EngineConfig& cfg, const DenseMatrix& a) {
  return detail::Engine(cfg, a).run();
}

/// Critical-path words per (iteration, phase).
class PhaseCostTable {
 public:
  PhaseCostTable() = default;
  explicit PhaseCostTable(std::size_t iterations) : rows_(iterations) {}

  Words at(std::size_t iteration, Phase phase) const {
    return rows_.at(iteration)[static_cast<std::size_t>(phase)];
  }
  void add(std::size_t iteration, Phase phase, Words w) {
    rows_.at(iteration)[static_cast<std::size_t>(phase)] += w;
  }
  std::size_t iterations() const noexcept { return rows_.size(); }

  Words phase_total(Phase phase) const {
    Words s = 0;
    for (const auto& r : rows_) s += r[static_cast<std::size_t>(phase)];
    return s;
  }
  Words total() const {
    Words s = 0;
    for (const auto& r : rows_) {
      for (Words w : r) s += w;
    }
    return s;
  }

 private:
  std::vector<std::array<Words, kAllPhases.size()>> rows_;
};

inline PhaseCostTable phase_costs(const FactorizationRun& run) {
  PhaseCostTable table(run.config.n / run.config.v);
  for (const auto& s : run.ledger.supersteps()) table.add(s.iteration, s.phase, s.critical_words());
  return table;
}

}  // namespace lu25d
