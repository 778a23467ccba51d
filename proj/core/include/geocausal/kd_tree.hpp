#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "geocausal/point_cloud.hpp"

namespace geocausal {

/// Ascending radii r_0 < r_1 < ... < r_{n-1}. A linear table computes
/// r_k = origin + k * step, which lets the pair kernels locate a distance's
/// bin arithmetically instead of by search.
class RadiusTable {
 public:
  static RadiusTable linear(double origin, double step, std::size_t n);
  /// Throws ValidationError unless radii are finite, positive and strictly
  /// ascending.
  static RadiusTable from_radii(std::vector<double> radii);

  std::size_t size() const noexcept { return radii_.size(); }
  double operator[](std::size_t k) const { return radii_[k]; }
  const std::vector<double>& radii() const noexcept { return radii_; }

  bool is_linear() const noexcept { return linear_; }
  double origin() const noexcept { return origin_; }
  double step() const noexcept { return step_; }

  /// Number of radii r_k with r_k <= d; a pair at distance d is counted at
  /// radius k iff bin(d) <= k. For the Euclidean norm pass the squared
  /// distance and squared = true.
  std::size_t bin(double d, bool squared = false) const;

 private:
  std::vector<double> radii_;
  std::vector<double> squared_;
  bool linear_ = false;
  double origin_ = 0.0;
  double step_ = 0.0;
};

/// Balanced kd-tree over a point cloud, built once and read-only afterwards
/// (safe for concurrent queries). Pair counting uses a dual-tree traversal:
/// node pairs whose distance bounds fall inside one radius bin are counted in
/// bulk, the rest go through a vectorized brute-force leaf kernel.
class KdTree {
 public:
  /// leaf_size 0 picks a size suited to the cloud's dimension.
  explicit KdTree(const PointCloud& cloud, std::size_t leaf_size = 0);

  std::size_t size() const noexcept { return n_points_; }
  std::size_t dim() const noexcept { return dim_; }

  /// hist[b] = number of unordered pairs i < j whose distance has bin b
  /// (b in 0..radii.size()).
  std::vector<std::uint64_t> pair_histogram(const RadiusTable& radii, Norm norm) const;

  /// counts[k] = number of unordered pairs with distance < radii[k].
  std::vector<std::uint64_t> count_pairs(const RadiusTable& radii, Norm norm) const;

  struct Node {
    std::size_t begin;
    std::size_t end;
    std::size_t left;   // 0 for leaves; the root is never a child
    std::size_t right;
  };

 private:
  std::size_t build(std::size_t begin, std::size_t end, std::vector<std::size_t>& order,
                    const PointCloud& cloud);

  std::size_t n_points_ = 0;
  std::size_t dim_ = 0;
  std::size_t leaf_size_ = 0;
  std::vector<double> coords_;  // dimension-major: coords_[k * n_points_ + i]
  std::vector<Node> nodes_;
  std::vector<double> lo_;      // per node bounding boxes, nodes_.size() x dim_
  std::vector<double> hi_;

  friend class DualTreeCounter;
};

}  // namespace geocausal
