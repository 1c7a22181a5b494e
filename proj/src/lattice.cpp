#include "gdh/lattice.hpp"

#include <algorithm>
#include <string>

#include "gdh/errors.hpp"

namespace gdh {

Box::Box(MultiIndex lo_, MultiIndex hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size() || lo.empty()) {
    throw PreconditionError("box: corners must have equal, positive dimension");
  }
}

Box Box::from_extents(MultiIndex lo, std::span<const int> extents) {
  MultiIndex hi(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) hi[i] = lo[i] + extents[i] - 1;
  return Box(std::move(lo), std::move(hi));
}

std::vector<int> Box::extents() const {
  std::vector<int> e(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) e[i] = hi[i] - lo[i] + 1;
  return e;
}

std::size_t Box::count() const {
  if (empty()) return 0;
  std::size_t n = 1;
  for (std::size_t i = 0; i < lo.size(); ++i) n *= static_cast<std::size_t>(hi[i] - lo[i] + 1);
  return n;
}

bool Box::empty() const {
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (hi[i] < lo[i]) return true;
  }
  return lo.empty();
}

bool Box::contains(std::span<const int> idx) const {
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (idx[i] < lo[i] || idx[i] > hi[i]) return false;
  }
  return true;
}

std::size_t Box::offset(std::span<const int> idx) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    off = off * static_cast<std::size_t>(hi[i] - lo[i] + 1) + static_cast<std::size_t>(idx[i] - lo[i]);
  }
  return off;
}

MultiIndex Box::index(std::size_t off) const {
  MultiIndex idx(lo.size());
  for (std::size_t i = lo.size(); i-- > 0;) {
    const auto ext = static_cast<std::size_t>(hi[i] - lo[i] + 1);
    idx[i] = lo[i] + static_cast<int>(off % ext);
    off /= ext;
  }
  return idx;
}

Box Box::intersect(const Box& other) const {
  Box out = *this;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    out.lo[i] = std::max(lo[i], other.lo[i]);
    out.hi[i] = std::min(hi[i], other.hi[i]);
  }
  return out;
}

Box Box::plus(const Box& other) const {
  Box out = *this;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    out.lo[i] = lo[i] + other.lo[i];
    out.hi[i] = hi[i] + other.hi[i];
  }
  return out;
}

Box Box::negated() const {
  Box out = *this;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    out.lo[i] = -hi[i];
    out.hi[i] = -lo[i];
  }
  return out;
}

Box Box::translated(std::span<const int> shift) const {
  Box out = *this;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    out.lo[i] += shift[i];
    out.hi[i] += shift[i];
  }
  return out;
}

bool next_index(const Box& box, MultiIndex& idx) {
  for (std::size_t i = idx.size(); i-- > 0;) {
    if (idx[i] < box.hi[i]) {
      ++idx[i];
      return true;
    }
    idx[i] = box.lo[i];
  }
  return false;
}

std::size_t checked_product(std::span<const int> sizes, std::size_t cap, const char* what) {
  std::size_t n = 1;
  for (int s : sizes) {
    if (s < 1) throw PreconditionError(std::string(what) + ": sizes must be >= 1");
    if (n > cap / static_cast<std::size_t>(s)) {
      throw ResourceError(std::string(what) + ": size exceeds cap of " + std::to_string(cap));
    }
    n *= static_cast<std::size_t>(s);
  }
  if (n > cap) throw ResourceError(std::string(what) + ": size exceeds cap of " + std::to_string(cap));
  return n;
}

}  // namespace gdh
