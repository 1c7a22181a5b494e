#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gdh {

using Complex = std::complex<double>;
using MultiIndex = std::vector<int>;

inline constexpr std::size_t kDefaultGridCap = std::size_t{1} << 26;
inline constexpr std::size_t kDefaultDenseCap = 4'000'000;

// Axis-aligned integer box with inclusive corners. Arrays over a box are
// stored row-major (last axis fastest).
struct Box {
  MultiIndex lo;
  MultiIndex hi;

  Box() = default;
  Box(MultiIndex lo_, MultiIndex hi_);

  static Box from_extents(MultiIndex lo, std::span<const int> extents);

  int dim() const { return static_cast<int>(lo.size()); }
  int extent(int axis) const { return hi[axis] - lo[axis] + 1; }
  std::vector<int> extents() const;
  std::size_t count() const;
  bool empty() const;
  bool contains(std::span<const int> idx) const;
  std::size_t offset(std::span<const int> idx) const;
  MultiIndex index(std::size_t offset) const;

  /// Intersection; may be empty (some hi < lo).
  Box intersect(const Box& other) const;
  /// Minkowski sum of the two boxes.
  Box plus(const Box& other) const;
  /// Point reflection x -> -x.
  Box negated() const;
  Box translated(std::span<const int> shift) const;

  friend bool operator==(const Box&, const Box&) = default;
};

/// Advances `idx` through `box` in row-major order; returns false after the last.
bool next_index(const Box& box, MultiIndex& idx);

std::size_t checked_product(std::span<const int> sizes, std::size_t cap, const char* what);

}  // namespace gdh
