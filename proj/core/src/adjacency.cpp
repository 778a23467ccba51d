#include "geocausal/adjacency.hpp"

#include <string>

#include "geocausal/error.hpp"

namespace geocausal {

AdjacencyMatrix AdjacencyMatrix::from_edges(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  AdjacencyMatrix a(n);
  for (const auto& [source, target] : edges) a.set(target, source);
  return a;
}

void AdjacencyMatrix::set(std::size_t i, std::size_t j, bool value) {
  if (i >= n_ || j >= n_) {
    throw ValidationError("adjacency index (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") out of range for " + std::to_string(n_) + " nodes");
  }
  if (i == j && value) {
    throw ValidationError("self-loop on node " + std::to_string(i) + " is not allowed");
  }
  entries_[i * n_ + j] = value ? 1 : 0;
}

std::size_t AdjacencyMatrix::edge_count() const noexcept {
  std::size_t count = 0;
  for (auto e : entries_) count += e;
  return count;
}

std::vector<std::size_t> AdjacencyMatrix::parents(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n_; ++j)
    if (at(i, j)) out.push_back(j);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> AdjacencyMatrix::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (at(i, j)) out.emplace_back(j, i);
  return out;
}

AdjacencyMatrix AdjacencyMatrix::permuted(const std::vector<std::size_t>& perm) const {
  if (perm.size() != n_) throw ValidationError("permutation size does not match node count");
  AdjacencyMatrix out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (at(i, j)) out.set(perm[i], perm[j]);
  return out;
}

}  // namespace geocausal
