#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lu25d/error.hpp"

namespace lu25d {

enum class GridPreset { SquareFlat, SquareTwoLayer, Cube };

inline std::string_view to_string(GridPreset preset) {
  switch (preset) {
    case GridPreset::SquareFlat: return "square-flat";
    case GridPreset::SquareTwoLayer: return "square-two-layer";
    case GridPreset::Cube: return "cube";
  }
  return "?";
}

/// Accepts the long names and the short CLI forms flat | two-layer | cube.
inline GridPreset parse_preset(std::string_view s) {
  if (s == "square-flat" || s == "flat") return GridPreset::SquareFlat;
  if (s == "square-two-layer" || s == "two-layer") return GridPreset::SquareTwoLayer;
  if (s == "cube") return GridPreset::Cube;
  throw InvalidArgument("unknown grid preset '" + std::string(s) + "'");
}

struct ProcId {
  std::size_t pi = 0;
  std::size_t pj = 0;
  std::size_t pk = 0;

  friend auto operator<=>(const ProcId&, const ProcId&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const ProcId& id) {
  return os << '(' << id.pi << ',' << id.pj << ',' << id.pk << ')';
}

struct BlockCoord {
  std::size_t bi = 0;
  std::size_t bj = 0;
};

/// A px x py x pz processor grid; pz is the layer count c.
class GridConfig {
 public:
  GridConfig(std::size_t px, std::size_t py, std::size_t pz) : px_(px), py_(py), pz_(pz) {
    if (px == 0 || py == 0 || pz == 0) {
      throw InvalidArgument("grid dimensions must be >= 1");
    }
  }

  std::size_t px() const noexcept { return px_; }
  std::size_t py() const noexcept { return py_; }
  std::size_t pz() const noexcept { return pz_; }
  std::size_t layers() const noexcept { return pz_; }
  std::size_t p() const noexcept { return px_ * py_ * pz_; }
  std::size_t p1() const noexcept { return px_ * py_; }

  bool contains(const ProcId& id) const noexcept {
    return id.pi < px_ && id.pj < py_ && id.pk < pz_;
  }

  /// Linear rank, pi fastest.
  std::size_t rank(const ProcId& id) const noexcept {
    return id.pi + px_ * (id.pj + py_ * id.pk);
  }

  ProcId proc(std::size_t rank) const noexcept {
    return {rank % px_, (rank / px_) % py_, rank / (px_ * py_)};
  }

  std::string to_string() const {
    return std::to_string(px_) + "x" + std::to_string(py_) + "x" + std::to_string(pz_);
  }

  friend bool operator==(const GridConfig&, const GridConfig&) = default;

 private:
  std::size_t px_;
  std::size_t py_;
  std::size_t pz_;
};

namespace detail {

inline std::optional<std::size_t> exact_root(std::size_t value, int degree) {
  const auto guess = static_cast<std::size_t>(
      std::llround(std::pow(static_cast<double>(value), 1.0 / degree)));
  for (std::size_t r = guess > 0 ? guess - 1 : 0; r <= guess + 1; ++r) {
    std::size_t pw = 1;
    for (int i = 0; i < degree; ++i) pw *= r;
    if (pw == value) return r;
  }
  return std::nullopt;
}

}  // namespace detail

inline std::optional<std::size_t> exact_sqrt(std::size_t value) {
  return detail::exact_root(value, 2);
}

inline std::optional<std::size_t> exact_cbrt(std::size_t value) {
  return detail::exact_root(value, 3);
}

inline GridConfig make_grid(std::size_t p, GridPreset preset) {
  if (p == 0) throw ShapeError("processor count must be >= 1");
  switch (preset) {
    case GridPreset::SquareFlat: {
      const auto s = exact_sqrt(p);
      if (!s) throw ShapeError("square-flat needs p = q^2, got p = " + std::to_string(p));
      return {*s, *s, 1};
    }
    case GridPreset::SquareTwoLayer: {
      const auto s = p % 2 == 0 ? exact_sqrt(p / 2) : std::nullopt;
      if (!s) {
        throw ShapeError("square-two-layer needs p = 2 q^2, got p = " + std::to_string(p));
      }
      return {*s, *s, 2};
    }
    case GridPreset::Cube: {
      const auto s = exact_cbrt(p);
      if (!s) throw ShapeError("cube needs p = q^3, got p = " + std::to_string(p));
      return {*s, *s, *s};
    }
  }
  throw ShapeError("unknown preset");
}

/// Parses "PXxPYxPZ", e.g. "4x4x1".
inline GridConfig parse_grid(std::string_view text) {
  std::size_t dims[3] = {0, 0, 0};
  std::size_t idx = 0;
  bool have_digit = false;
  for (char ch : text) {
    if (ch >= '0' && ch <= '9') {
      dims[idx] = dims[idx] * 10 + static_cast<std::size_t>(ch - '0');
      have_digit = true;
    } else if ((ch == 'x' || ch == 'X') && have_digit && idx < 2) {
      ++idx;
      have_digit = false;
    } else {
      throw InvalidArgument("malformed grid '" + std::string(text) + "', expected PXxPYxPZ");
    }
  }
  if (idx != 2 || !have_digit) {
    throw InvalidArgument("malformed grid '" + std::string(text) + "', expected PXxPYxPZ");
  }
  return {dims[0], dims[1], dims[2]};
}

/// Home of the resident copy of a v x v block: 2D block-cyclic on layer 0.
inline ProcId owner_of_block(const GridConfig& g, BlockCoord b, std::size_t block_count) {
  if (b.bi >= block_count || b.bj >= block_count) {
    throw InvalidArgument("block (" + std::to_string(b.bi) + "," + std::to_string(b.bj) +
                          ") outside a " + std::to_string(block_count) + "-block matrix");
  }
  return {b.bi % g.px(), b.bj % g.py(), 0};
}

/// Unchecked variant used by the engine's inner loops; `layer` selects the copy.
inline ProcId block_holder(const GridConfig& g, std::size_t bi, std::size_t bj,
                           std::size_t layer) noexcept {
  return {bi % g.px(), bj % g.py(), layer};
}

/// Processors taking part in the column-panel phases of iteration t:
/// {(pi, t mod py, pk)}, ordered layer-major then by pi.
inline std::vector<ProcId> panel_active_set(const GridConfig& g, std::size_t t) {
  std::vector<ProcId> out;
  out.reserve(g.px() * g.pz());
  for (std::size_t pk = 0; pk < g.pz(); ++pk) {
    for (std::size_t pi = 0; pi < g.px(); ++pi) out.push_back({pi, t % g.py(), pk});
  }
  return out;
}

/// Processors taking part in the row-panel (A01) phases of iteration t:
/// {(t mod px, pj, pk)}, the column-panel set with rows and columns exchanged.
inline std::vector<ProcId> row_panel_active_set(const GridConfig& g, std::size_t t) {
  std::vector<ProcId> out;
  out.reserve(g.py() * g.pz());
  for (std::size_t pk = 0; pk < g.pz(); ++pk) {
    for (std::size_t pj = 0; pj < g.py(); ++pj) out.push_back({t % g.px(), pj, pk});
  }
  return out;
}

}  // namespace lu25d
