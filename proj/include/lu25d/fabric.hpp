#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lu25d/error.hpp"
#include "lu25d/grid.hpp"

namespace lu25d {

using Words = std::uint64_t;

enum class Phase : std::uint8_t {
  PanelReduceA10,
  PivotTournament,
  PanelFactor,
  PanelReduceA01,
  Trsm,
  Bcast,
  SchurUpdate,
};

inline constexpr std::array<Phase, 7> kAllPhases = {
    Phase::PanelReduceA10, Phase::PivotTournament, Phase::PanelFactor,
    Phase::PanelReduceA01, Phase::Trsm,            Phase::Bcast,
    Phase::SchurUpdate};

inline std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::PanelReduceA10: return "panel-reduce-A10";
    case Phase::PivotTournament: return "pivot-tournament";
    case Phase::PanelFactor: return "panel-factor";
    case Phase::PanelReduceA01: return "panel-reduce-A01";
    case Phase::Trsm: return "trsm";
    case Phase::Bcast: return "bcast";
    case Phase::SchurUpdate: return "schur-update";
  }
  return "?";
}

inline Phase parse_phase(std::string_view s) {
  for (Phase p : kAllPhases) {
    if (to_string(p) == s) return p;
  }
  throw InvalidArgument("unknown phase '" + std::string(s) + "'");
}

/// Phases confined to the column-panel or row-panel active set.
inline bool is_panel_phase(Phase p) {
  return p == Phase::PanelReduceA10 || p == Phase::PivotTournament ||
         p == Phase::PanelFactor || p == Phase::PanelReduceA01 || p == Phase::Trsm;
}

enum class Collective { Binomial, Rsag };

inline std::string_view to_string(Collective c) {
  return c == Collective::Binomial ? "binomial" : "rsag";
}

inline Collective parse_collective(std::string_view s) {
  if (s == "binomial") return Collective::Binomial;
  if (s == "rsag") return Collective::Rsag;
  throw InvalidArgument("unknown collective '" + std::string(s) + "'");
}

struct Superstep {
  std::size_t id = 0;
  Phase phase = Phase::PanelReduceA10;
  std::size_t iteration = 0;
  std::vector<Words> sent;      // indexed by grid rank
  std::vector<Words> received;  // indexed by grid rank
  std::uint64_t messages = 0;

  Words critical_words() const {
    return received.empty() ? 0 : *std::max_element(received.begin(), received.end());
  }
  Words total_sent() const {
    Words s = 0;
    for (Words w : sent) s += w;
    return s;
  }
  Words total_received() const {
    Words s = 0;
    for (Words w : received) s += w;
    return s;
  }
};

struct SuperstepCost {
  std::size_t superstep = 0;
  Words critical_words = 0;
};

class CommLedger {
 public:
  CommLedger() = default;
  explicit CommLedger(GridConfig grid) : grid_(grid) {}

  const GridConfig& grid() const noexcept { return grid_; }
  const std::vector<Superstep>& supersteps() const noexcept { return steps_; }
  bool empty() const noexcept { return steps_.empty(); }

  void append(Superstep s) { steps_.push_back(std::move(s)); }

  std::vector<SuperstepCost> costs() const {
    std::vector<SuperstepCost> out;
    out.reserve(steps_.size());
    for (const auto& s : steps_) out.push_back({s.id, s.critical_words()});
    return out;
  }

  friend bool operator==(const CommLedger& a, const CommLedger& b) {
    if (!(a.grid_ == b.grid_) || a.steps_.size() != b.steps_.size()) return false;
    for (std::size_t i = 0; i < a.steps_.size(); ++i) {
      const auto& x = a.steps_[i];
      const auto& y = b.steps_[i];
      if (x.id != y.id || x.phase != y.phase || x.iteration != y.iteration ||
          x.sent != y.sent || x.received != y.received || x.messages != y.messages) {
        return false;
      }
    }
    return true;
  }

 private:
  GridConfig grid_{1, 1, 1};
  std::vector<Superstep> steps_;
};

/// Sum over supersteps of the largest per-processor receive volume.
inline Words critical_path_cost(const CommLedger& ledger,
                                std::optional<std::span<const Phase>> phases = std::nullopt) {
  Words total = 0;
  for (const auto& s : ledger.supersteps()) {
    if (phases && std::find(phases->begin(), phases->end(), s.phase) == phases->end()) {
      continue;
    }
    total += s.critical_words();
  }
  return total;
}

inline Words critical_path_cost(const CommLedger& ledger, Phase phase) {
  const std::array<Phase, 1> one = {phase};
  return critical_path_cost(ledger, std::span<const Phase>(one));
}

/// Throws InvariantViolation on the first superstep whose sent and received totals differ.
inline void check_conservation(const CommLedger& ledger) {
  for (const auto& s : ledger.supersteps()) {
    if (s.total_sent() != s.total_received()) {
      throw InvariantViolation("superstep " + std::to_string(s.id) + " sent " +
                               std::to_string(s.total_sent()) + " but received " +
                               std::to_string(s.total_received()));
    }
  }
}

/// CSV columns: superstep, phase, proc_pi, proc_pj, proc_pk, sent_words, recv_words.
/// Only processors with traffic in a superstep get a row.
inline void write_ledger_csv(std::ostream& os, const CommLedger& ledger) {
  os << "superstep,phase,proc_pi,proc_pj,proc_pk,sent_words,recv_words\n";
  const auto& g = ledger.grid();
  for (const auto& s : ledger.supersteps()) {
    for (std::size_t r = 0; r < s.sent.size(); ++r) {
      if (s.sent[r] == 0 && s.received[r] == 0) continue;
      const ProcId id = g.proc(r);
      os << s.id << ',' << to_string(s.phase) << ',' << id.pi << ',' << id.pj << ','
         << id.pk << ',' << s.sent[r] << ',' << s.received[r] << '\n';
    }
  }
}

/// Deterministic virtual message-passing layer. Every transfer is a counted
/// point-to-point send inside an explicitly opened superstep; collectives are
/// expanded into their constituent sends.
class CommFabric {
 public:
  explicit CommFabric(GridConfig grid) : grid_(grid), ledger_(grid) {}

  const GridConfig& grid() const noexcept { return grid_; }
  const CommLedger& ledger() const noexcept { return ledger_; }
  bool in_superstep() const noexcept { return open_.has_value(); }
  const Superstep& current() const {
    if (!open_) throw FabricError("no open superstep");
    return *open_;
  }

  void begin_superstep(Phase phase, std::size_t iteration) {
    if (open_) throw FabricError("superstep already open");
    Superstep s;
    s.id = next_id_++;
    s.phase = phase;
    s.iteration = iteration;
    s.sent.assign(grid_.p(), 0);
    s.received.assign(grid_.p(), 0);
    open_ = std::move(s);
  }

  /// Closes the open superstep after checking sent == received.
  const Superstep& end_superstep() {
    if (!open_) throw FabricError("end_superstep without an open superstep");
    if (open_->total_sent() != open_->total_received()) {
      throw InvariantViolation("conservation violated in superstep " +
                               std::to_string(open_->id));
    }
    ledger_.append(std::move(*open_));
    open_.reset();
    return ledger_.supersteps().back();
  }

  void send(const ProcId& from, const ProcId& to, Words words) {
    if (!open_) throw FabricError("send outside an open superstep");
    if (!grid_.contains(from) || !grid_.contains(to)) {
      throw FabricError("send between processors outside the " + grid_.to_string() + " grid");
    }
    if (from == to || words == 0) return;
    open_->sent[grid_.rank(from)] += words;
    open_->received[grid_.rank(to)] += words;
    ++open_->messages;
  }

  /// Combines `words` from every member onto `root`.
  ///
  /// Binomial: ceil(log2 g) rounds, each surviving member pairs with a partner
  /// and one of them sends its full partial; (g-1)*words move in total.
  /// Rsag: direct reduce-scatter into g slices followed by a gather of the
  /// slices onto the root.
  void reduce(std::span<const ProcId> group, const ProcId& root, Words words,
              Collective algorithm = Collective::Binomial) {
    const auto order = root_first(group, root);
    const std::size_t g = order.size();
    if (algorithm == Collective::Binomial) {
      for (std::size_t mask = 1; mask < g; mask <<= 1) {
        for (std::size_t r = mask; r < g; r += 2 * mask) send(order[r], order[r - mask], words);
      }
      return;
    }
    for (std::size_t j = 0; j < g; ++j) {
      const Words slice = slice_size(words, g, j);
      for (std::size_t i = 0; i < g; ++i) {
        if (i != j) send(order[i], order[j], slice);
      }
    }
    for (std::size_t j = 1; j < g; ++j) send(order[j], order[0], slice_size(words, g, j));
  }

  /// Combines `words` from every contributor onto `destination`, which need
  /// not hold a partial itself. Binomial reduces onto the first contributor
  /// and forwards; Rsag reduce-scatters among the contributors and gathers
  /// the slices on the destination.
  void reduce_to(std::span<const ProcId> contributors, const ProcId& destination, Words words,
                 Collective algorithm = Collective::Binomial) {
    if (std::find(contributors.begin(), contributors.end(), destination) != contributors.end()) {
      reduce(contributors, destination, words, algorithm);
      return;
    }
    if (contributors.empty()) throw FabricError("collective over an empty group");
    if (!grid_.contains(destination)) throw FabricError("collective member outside the grid");
    const auto order = root_first(contributors, contributors.front());
    const std::size_t g = order.size();
    if (algorithm == Collective::Binomial) {
      reduce(contributors, order[0], words, algorithm);
      send(order[0], destination, words);
      return;
    }
    for (std::size_t j = 0; j < g; ++j) {
      const Words slice = slice_size(words, g, j);
      for (std::size_t i = 0; i < g; ++i) {
        if (i != j) send(order[i], order[j], slice);
      }
      send(order[j], destination, slice);
    }
  }

  /// Delivers `words` from `root` to every other member.
  ///
  /// Binomial: mirror of the binomial reduce; every non-root receives exactly
  /// once. Rsag: scatter of g slices followed by an allgather among the
  /// non-roots.
  void broadcast(std::span<const ProcId> group, const ProcId& root, Words words,
                 Collective algorithm = Collective::Binomial) {
    const auto order = root_first(group, root);
    const std::size_t g = order.size();
    if (algorithm == Collective::Binomial) {
      std::size_t top = 1;
      while (top < g) top <<= 1;
      for (std::size_t mask = top >> 1; mask >= 1; mask >>= 1) {
        for (std::size_t r = 0; r + mask < g; r += 2 * mask) send(order[r], order[r + mask], words);
      }
      return;
    }
    for (std::size_t j = 1; j < g; ++j) send(order[0], order[j], slice_size(words, g, j));
    for (std::size_t i = 0; i < g; ++i) {
      const Words slice = slice_size(words, g, i);
      for (std::size_t j = 1; j < g; ++j) {
        if (j != i) send(order[i], order[j], slice);
      }
    }
  }

  CommLedger take_ledger() && {
    if (open_) throw FabricError("ledger taken while a superstep is open");
    return std::move(ledger_);
  }

 private:
  static Words slice_size(Words words, std::size_t g, std::size_t j) {
    return words * (j + 1) / g - words * j / g;
  }

  std::vector<ProcId> root_first(std::span<const ProcId> group, const ProcId& root) const {
    if (group.empty()) throw FabricError("collective over an empty group");
    std::vector<ProcId> order;
    order.reserve(group.size());
    order.push_back(root);
    bool found = false;
    for (const auto& id : group) {
      if (!grid_.contains(id)) throw FabricError("collective member outside the grid");
      if (id == root) {
        if (found) throw FabricError("duplicate root in collective group");
        found = true;
        continue;
      }
      order.push_back(id);
    }
    if (!found) throw FabricError("collective root is not a member of the group");
    std::vector<ProcId> sorted(order.begin(), order.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw FabricError("duplicate member in collective group");
    }
    return order;
  }

  GridConfig grid_;
  CommLedger ledger_;
  std::optional<Superstep> open_;
  std::size_t next_id_ = 0;
};

}  // namespace lu25d
