#include "geocausal/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "geocausal/error.hpp"

namespace geocausal {

PointCloud::PointCloud(std::size_t n_points, std::size_t dim, std::vector<double> coords)
    : n_points_(n_points), dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw ValidationError("point cloud dimension must be positive");
  if (n_points_ < 2) throw ValidationError("point cloud needs at least 2 points");
  if (coords_.size() != n_points_ * dim_) {
    throw ValidationError("point cloud holds " + std::to_string(coords_.size()) +
                          " coordinates, expected " + std::to_string(n_points_ * dim_));
  }
  for (std::size_t k = 0; k < coords_.size(); ++k) {
    if (!std::isfinite(coords_[k])) {
      throw ValidationError("non-finite coordinate in point " + std::to_string(k / dim_));
    }
  }
}

double PointCloud::diameter(Norm norm) const {
  if (norm == Norm::max) {
    double d = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      double lo = coord(0, k), hi = lo;
      for (std::size_t i = 1; i < n_points_; ++i) {
        lo = std::min(lo, coord(i, k));
        hi = std::max(hi, coord(i, k));
      }
      d = std::max(d, hi - lo);
    }
    return d;
  }
  double d = 0.0;
  for (std::size_t i = 0; i < n_points_; ++i)
    for (std::size_t j = i + 1; j < n_points_; ++j)
      d = std::max(d, distance(point(i), point(j), norm));
  return d;
}

double distance(std::span<const double> a, std::span<const double> b, Norm norm) {
  double d = 0.0;
  if (norm == Norm::max) {
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
  }
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    d += diff * diff;
  }
  return std::sqrt(d);
}

bool within(std::span<const double> a, std::span<const double> b, double eps, Norm norm) {
  if (norm == Norm::max) return distance(a, b, norm) < eps;
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    d2 += diff * diff;
  }
  return d2 < eps * eps;
}

}  // namespace geocausal
