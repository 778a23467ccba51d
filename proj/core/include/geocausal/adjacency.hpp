#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace geocausal {

/// Directed coupling structure: entry (i, j) set means j drives i.
/// The diagonal is always zero.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(std::size_t n) : n_(n), entries_(n * n, 0) {}

  /// Builds from directed (source, target) pairs.
  static AdjacencyMatrix from_edges(
      std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

  std::size_t size() const noexcept { return n_; }

  bool at(std::size_t i, std::size_t j) const { return entries_[i * n_ + j] != 0; }

  /// Throws ValidationError for out-of-range indices or i == j with value true.
  void set(std::size_t i, std::size_t j, bool value = true);

  std::size_t edge_count() const noexcept;

  /// Parents of node i (the j with a_ij = 1), ascending.
  std::vector<std::size_t> parents(std::size_t i) const;

  /// (source, target) pairs in row-major order of (target, source).
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  AdjacencyMatrix permuted(const std::vector<std::size_t>& perm) const;

  friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> entries_;
};

}  // namespace geocausal
