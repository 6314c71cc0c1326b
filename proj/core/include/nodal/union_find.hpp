#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace nodal {

/// Disjoint-set forest with union by size and path halving.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n);

  std::size_t find(std::size_t v);

  /// Returns true if a and b were in different sets.
  bool unite(std::size_t a, std::size_t b);

  std::size_t set_size(std::size_t v) { return size_[find(v)]; }
  std::size_t set_count() const { return sets_; }
  std::size_t element_count() const { return parent_.size(); }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
  std::size_t sets_;
};

}  // namespace nodal
