#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "geocausal/kd_tree.hpp"
#include "geocausal/point_cloud.hpp"

namespace geocausal {

enum class RadiusSpacing { linear, log };

/// Radii for the correlation sum. Linear spacing follows
/// r_k = eps_min + k * (eps_max - eps_min) / steps for k = 0..steps-1
/// (eps_max itself is excluded).
struct RadiusGrid {
  double eps_min = 0.0562;
  double eps_max = 0.630;
  std::size_t steps = 50;
  RadiusSpacing spacing = RadiusSpacing::linear;

  /// Throws ValidationError unless 0 < eps_min < eps_max and steps >= 2.
  void validate() const;
  double radius(std::size_t k) const;
  std::vector<double> radii() const;
  RadiusTable table() const;

  friend bool operator==(const RadiusGrid&, const RadiusGrid&) = default;
};

/// Automatic linear-region selection: among contiguous runs of at least
/// min_points curve points, take the longest whose RMS residual is within
/// `tolerance` of the best achievable RMS residual.
struct RegionOptions {
  std::size_t min_points = 10;
  double tolerance = 1.5;

  friend bool operator==(const RegionOptions&, const RegionOptions&) = default;
};

struct CorrDimOptions {
  Norm norm = Norm::max;
  /// Pairs with 0 < |i - j| <= theiler_window (time index distance) are
  /// excluded. 0 disables the window.
  std::size_t theiler_window = 0;
  bool auto_region = false;
  RegionOptions region;
  /// 0 picks a leaf size suited to the cloud dimension.
  std::size_t leaf_size = 0;

  friend bool operator==(const CorrDimOptions&, const CorrDimOptions&) = default;
};

struct CurvePoint {
  double ln_eps;
  double ln_c;
};

struct CorrSumCurve {
  std::vector<CurvePoint> points;
  std::size_t n_dropped = 0;
};

struct DimEstimate {
  double d2 = 0.0;
  double intercept = 0.0;
  double residual_sum = 0.0;
  std::size_t n_points_used = 0;
  /// Index range [first, last) of the curve points the fit used.
  std::size_t first = 0;
  std::size_t last = 0;
  /// Set when every retained point has the same ln_c (saturated sums).
  bool degenerate = false;
};

/// Exact number of unordered pairs (i < j) with distance < eps.
std::uint64_t count_pairs_within(const PointCloud& cloud, double eps,
                                 const CorrDimOptions& options = {});

/// Exact pair counts for every radius of `radii`.
std::vector<std::uint64_t> count_pairs(const PointCloud& cloud, const RadiusTable& radii,
                                       const CorrDimOptions& options = {});

/// Number of pairs the correlation sum normalizes by: T(T-1)/2, minus the
/// pairs removed by the Theiler window.
std::uint64_t eligible_pairs(std::size_t n_points, std::size_t theiler_window);

/// Fraction of eligible pairs closer than eps (2/(T(T-1)) * count when no
/// Theiler window is set).
double correlation_sum(const PointCloud& cloud, double eps, const CorrDimOptions& options = {});

/// (ln r, ln C(r)) over the grid; radii with C(r) = 0 are dropped and
/// tallied. Throws EstimationError when every radius is dropped.
CorrSumCurve correlation_curve(const PointCloud& cloud, const RadiusGrid& grid,
                               const CorrDimOptions& options = {});

/// Ordinary least squares of ln_c on ln_eps over the whole curve; the slope
/// is D2. Throws EstimationError for fewer than two points or a degenerate
/// abscissa.
DimEstimate estimate_d2(const CorrSumCurve& curve);

/// Fit restricted to an automatically selected linear region.
DimEstimate estimate_d2_region(const CorrSumCurve& curve, const RegionOptions& region);

/// correlation_curve followed by estimate_d2 (or the region selector when
/// options.auto_region is set).
DimEstimate correlation_dimension(const PointCloud& cloud, const RadiusGrid& grid,
                                  const CorrDimOptions& options = {});

}  // namespace geocausal
