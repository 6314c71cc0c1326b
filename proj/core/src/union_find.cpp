#include "nodal/union_find.hpp"

#include <limits>
#include <numeric>
#include <utility>

#include "nodal/error.hpp"

namespace nodal {

UnionFind::UnionFind(std::size_t n) : parent_(n), size_(n, 1), sets_(n) {
  if (n > std::numeric_limits<std::uint32_t>::max()) throw ResourceError("UnionFind: too many elements");
  std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
}

std::size_t UnionFind::find(std::size_t v) {
  std::uint32_t x = static_cast<std::uint32_t>(v);
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool UnionFind::unite(std::size_t a, std::size_t b) {
  std::size_t ra = find(a);
  std::size_t rb = find(b);
  if (ra == rb) return false;
  if (size_[ra] < size_[rb]) std::swap(ra, rb);
  parent_[rb] = static_cast<std::uint32_t>(ra);
  size_[ra] += size_[rb];
  --sets_;
  return true;
}

}  // namespace nodal
