#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace geocausal {

enum class Norm { max, euclidean };

/// n_points points of dimension dim, row-major.
class PointCloud {
 public:
  PointCloud() = default;

  /// Throws ValidationError unless coords.size() == n_points * dim, dim >= 1,
  /// n_points >= 2 and every coordinate is finite.
  PointCloud(std::size_t n_points, std::size_t dim, std::vector<double> coords);

  std::size_t size() const noexcept { return n_points_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  double coord(std::size_t i, std::size_t k) const { return coords_[i * dim_ + k]; }
  std::span<const double> coords() const noexcept { return coords_; }

  /// Chebyshev (max) diameter, or Euclidean when requested.
  double diameter(Norm norm = Norm::max) const;

 private:
  std::size_t n_points_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

/// Pairwise distance under `norm`. For the Euclidean norm comparisons are
/// made on squared distances; see within().
double distance(std::span<const double> a, std::span<const double> b, Norm norm);

/// Whether ||a - b|| < eps under `norm`, evaluated exactly as the pair
/// counters do (squared sums against eps * eps for the Euclidean norm).
bool within(std::span<const double> a, std::span<const double> b, double eps, Norm norm);

}  // namespace geocausal
