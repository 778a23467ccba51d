#include "geocausal/corrdim.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <optional>
#include <sstream>

#include "geocausal/error.hpp"

namespace geocausal {

void RadiusGrid::validate() const {
  if (!(eps_min > 0.0) || !std::isfinite(eps_min)) {
    throw ValidationError("eps_min must be finite and > 0");
  }
  if (!(eps_max > eps_min) || !std::isfinite(eps_max)) {
    throw ValidationError("eps_max must be finite and > eps_min");
  }
  if (steps < 2) throw ValidationError("radius grid needs at least 2 steps");
}

double RadiusGrid::radius(std::size_t k) const {
  if (spacing == RadiusSpacing::linear) {
    const double step = (eps_max - eps_min) / static_cast<double>(steps);
    return eps_min + static_cast<double>(k) * step;
  }
  const double ratio = std::log(eps_max / eps_min) / static_cast<double>(steps);
  return eps_min * std::exp(static_cast<double>(k) * ratio);
}

std::vector<double> RadiusGrid::radii() const {
  std::vector<double> r(steps);
  for (std::size_t k = 0; k < steps; ++k) r[k] = radius(k);
  return r;
}

RadiusTable RadiusGrid::table() const {
  validate();
  if (spacing == RadiusSpacing::linear) {
    return RadiusTable::linear(eps_min, (eps_max - eps_min) / static_cast<double>(steps), steps);
  }
  return RadiusTable::from_radii(radii());
}

namespace {

// Pairs removed by a Theiler window, counted per bin so they can be
// subtracted from the tree histogram.
std::vector<std::uint64_t> theiler_histogram(const PointCloud& cloud, const RadiusTable& radii,
                                             const CorrDimOptions& options) {
  std::vector<std::uint64_t> hist(radii.size() + 1, 0);
  const std::size_t n = cloud.size();
  const bool squared = options.norm == Norm::euclidean;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n && j - i <= options.theiler_window; ++j) {
      double d = 0.0;
      auto a = cloud.point(i);
      auto b = cloud.point(j);
      for (std::size_t k = 0; k < cloud.dim(); ++k) {
        const double diff = a[k] - b[k];
        if (squared) {
          d += diff * diff;
        } else {
          d = std::max(d, std::abs(diff));
        }
      }
      ++hist[radii.bin(d, squared)];
    }
  }
  return hist;
}

}  // namespace

std::vector<std::uint64_t> count_pairs(const PointCloud& cloud, const RadiusTable& radii,
                                       const CorrDimOptions& options) {
  KdTree tree(cloud, options.leaf_size);
  auto counts = tree.count_pairs(radii, options.norm);
  if (options.theiler_window > 0) {
    const auto removed = theiler_histogram(cloud, radii, options);
    std::uint64_t running = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      running += removed[k];
      counts[k] -= running;
    }
  }
  return counts;
}

std::uint64_t count_pairs_within(const PointCloud& cloud, double eps,
                                 const CorrDimOptions& options) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ValidationError("eps must be finite and > 0");
  // A one-entry linear table is exactly {eps}.
  return count_pairs(cloud, RadiusTable::linear(eps, 1.0, 1), options)[0];
}

std::uint64_t eligible_pairs(std::size_t n_points, std::size_t theiler_window) {
  const std::uint64_t n = n_points;
  std::uint64_t total = n * (n - 1) / 2;
  for (std::uint64_t lag = 1; lag <= theiler_window && lag < n; ++lag) total -= n - lag;
  return total;
}

double correlation_sum(const PointCloud& cloud, double eps, const CorrDimOptions& options) {
  const auto eligible = eligible_pairs(cloud.size(), options.theiler_window);
  if (eligible == 0) throw EstimationError("Theiler window leaves no pairs to count");
  return static_cast<double>(count_pairs_within(cloud, eps, options)) /
         static_cast<double>(eligible);
}

CorrSumCurve correlation_curve(const PointCloud& cloud, const RadiusGrid& grid,
                               const CorrDimOptions& options) {
  grid.validate();
  const auto eligible = eligible_pairs(cloud.size(), options.theiler_window);
  if (eligible == 0) throw EstimationError("Theiler window leaves no pairs to count");
  const auto table = grid.table();
  const auto counts = count_pairs(cloud, table, options);

  CorrSumCurve curve;
  curve.points.reserve(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) {
      ++curve.n_dropped;
      continue;
    }
    const double c = static_cast<double>(counts[k]) / static_cast<double>(eligible);
    curve.points.push_back({std::log(table[k]), std::log(c)});
  }
  if (curve.points.empty()) {
    std::ostringstream os;
    os << "empty correlation curve: no pairs closer than any radius in [eps_min=" << grid.eps_min
       << ", eps_max=" << grid.eps_max << ")";
    throw EstimationError(os.str());
  }
  return curve;
}

namespace {

DimEstimate fit_range(const std::vector<CurvePoint>& pts, std::size_t first, std::size_t last) {
  const std::size_t n = last - first;
  if (n < 2) {
    throw EstimationError("correlation dimension needs at least 2 curve points, got " +
                          std::to_string(n));
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = first; k < last; ++k) {
    mx += pts[k].ln_eps;
    my += pts[k].ln_c;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  bool flat = true;
  for (std::size_t k = first; k < last; ++k) {
    const double dx = pts[k].ln_eps - mx;
    sxx += dx * dx;
    sxy += dx * (pts[k].ln_c - my);
    flat = flat && pts[k].ln_c == pts[first].ln_c;
  }
  if (!(sxx > 0.0)) throw EstimationError("degenerate abscissa: every ln_eps is identical");

  DimEstimate e;
  e.d2 = sxy / sxx;
  e.intercept = my - e.d2 * mx;
  for (std::size_t k = first; k < last; ++k) {
    const double r = pts[k].ln_c - (e.intercept + e.d2 * pts[k].ln_eps);
    e.residual_sum += r * r;
  }
  e.n_points_used = n;
  e.first = first;
  e.last = last;
  e.degenerate = flat;
  return e;
}

}  // namespace

DimEstimate estimate_d2(const CorrSumCurve& curve) {
  return fit_range(curve.points, 0, curve.points.size());
}

DimEstimate estimate_d2_region(const CorrSumCurve& curve, const RegionOptions& region) {
  const auto& pts = curve.points;
  const std::size_t n = pts.size();
  const std::size_t min_len = std::max<std::size_t>(2, std::min(region.min_points, n));
  if (n < 2) return fit_range(pts, 0, n);

  auto rms = [](const DimEstimate& e) {
    return std::sqrt(e.residual_sum / static_cast<double>(e.n_points_used));
  };
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t len = min_len; len <= n; ++len)
    for (std::size_t first = 0; first + len <= n; ++first)
      best = std::min(best, rms(fit_range(pts, first, first + len)));

  const double accept = best * region.tolerance + 1e-12;
  for (std::size_t len = n; len >= min_len; --len) {
    std::optional<DimEstimate> pick;
    for (std::size_t first = 0; first + len <= n; ++first) {
      auto e = fit_range(pts, first, first + len);
      if (rms(e) <= accept && (!pick || rms(e) < rms(*pick))) pick = e;
    }
    if (pick) return *pick;
  }
  return fit_range(pts, 0, n);
}

DimEstimate correlation_dimension(const PointCloud& cloud, const RadiusGrid& grid,
                                  const CorrDimOptions& options) {
  const auto curve = correlation_curve(cloud, grid, options);
  return options.auto_region ? estimate_d2_region(curve, options.region) : estimate_d2(curve);
}

}  // namespace geocausal
