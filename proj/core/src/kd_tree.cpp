#include "geocausal/kd_tree.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "geocausal/error.hpp"

namespace geocausal {

RadiusTable RadiusTable::linear(double origin, double step, std::size_t n) {
  if (n == 0) throw ValidationError("radius table needs at least one radius");
  if (!(origin > 0.0) || !(step > 0.0) || !std::isfinite(origin) || !std::isfinite(step)) {
    throw ValidationError("linear radius table needs a positive origin and step");
  }
  RadiusTable t;
  t.linear_ = true;
  t.origin_ = origin;
  t.step_ = step;
  t.radii_.resize(n);
  t.squared_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    t.radii_[k] = origin + static_cast<double>(k) * step;
    t.squared_[k] = t.radii_[k] * t.radii_[k];
  }
  return t;
}

RadiusTable RadiusTable::from_radii(std::vector<double> radii) {
  if (radii.empty()) throw ValidationError("radius table needs at least one radius");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || !std::isfinite(radii[k]))
      throw ValidationError("radii must be finite and positive");
    if (k > 0 && !(radii[k] > radii[k - 1]))
      throw ValidationError("radii must be strictly ascending");
  }
  RadiusTable t;
  t.radii_ = std::move(radii);
  t.squared_.resize(t.radii_.size());
  for (std::size_t k = 0; k < t.radii_.size(); ++k) t.squared_[k] = t.radii_[k] * t.radii_[k];
  return t;
}

std::size_t RadiusTable::bin(double d, bool squared) const {
  const auto& r = squared ? squared_ : radii_;
  return static_cast<std::size_t>(std::upper_bound(r.begin(), r.end(), d) - r.begin());
}

KdTree::KdTree(const PointCloud& cloud, std::size_t leaf_size)
    : n_points_(cloud.size()), dim_(cloud.dim()) {
  leaf_size_ = leaf_size != 0 ? leaf_size : (dim_ == 1 ? 32 : 256);
  std::vector<std::size_t> order(n_points_);
  for (std::size_t i = 0; i < n_points_; ++i) order[i] = i;
  nodes_.reserve(2 * (n_points_ / leaf_size_ + 1));
  build(0, n_points_, order, cloud);

  coords_.resize(n_points_ * dim_);
  for (std::size_t i = 0; i < n_points_; ++i)
    for (std::size_t k = 0; k < dim_; ++k) coords_[k * n_points_ + i] = cloud.coord(order[i], k);
}

std::size_t KdTree::build(std::size_t begin, std::size_t end, std::vector<std::size_t>& order,
                          const PointCloud& cloud) {
  const std::size_t id = nodes_.size();
  nodes_.push_back({begin, end, 0, 0});
  lo_.resize((id + 1) * dim_);
  hi_.resize((id + 1) * dim_);

  std::size_t split_dim = 0;
  double widest = -1.0;
  for (std::size_t k = 0; k < dim_; ++k) {
    double lo = cloud.coord(order[begin], k);
    double hi = lo;
    for (std::size_t i = begin + 1; i < end; ++i) {
      const double v = cloud.coord(order[i], k);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    lo_[id * dim_ + k] = lo;
    hi_[id * dim_ + k] = hi;
    if (hi - lo > widest) {
      widest = hi - lo;
      split_dim = k;
    }
  }

  if (end - begin > leaf_size_ && widest > 0.0) {
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order.begin() + static_cast<std::ptrdiff_t>(begin),
                     order.begin() + static_cast<std::ptrdiff_t>(mid),
                     order.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) {
                       const double va = cloud.coord(a, split_dim);
                       const double vb = cloud.coord(b, split_dim);
                       return va < vb || (va == vb && a < b);
                     });
    const std::size_t left = build(begin, mid, order, cloud);
    const std::size_t right = build(mid, end, order, cloud);
    nodes_[id].left = left;
    nodes_[id].right = right;
  }
  return id;
}

namespace {

constexpr std::size_t kLanes = 8;
constexpr std::size_t kBlock = 256;

/// Vectorizable bin lookup for a linear table; bins[j] receives the number
/// of radii <= dist[j] (or, with Squared, radii whose square is <= dist[j]).
template <bool Squared>
void linear_bins(const double* dist, std::int32_t* bins, std::size_t m, double origin,
                 double step, double inv_step, std::int32_t n) {
  const double top = static_cast<double>(n);
  for (std::size_t j = 0; j < m; ++j) {
    const double d = dist[j];
    const double approx = Squared ? std::sqrt(d) : d;
    const double q = std::min(std::max((approx - origin) * inv_step, -1.0), top);
    std::int32_t b = static_cast<std::int32_t>(q + 1.0);
    const double lo = origin + static_cast<double>(b - 1) * step;
    const double hi = origin + static_cast<double>(b) * step;
    if constexpr (Squared) {
      b = b - static_cast<std::int32_t>((b > 0) & (lo * lo > d)) +
          static_cast<std::int32_t>(hi * hi <= d);
    } else {
      b = b - static_cast<std::int32_t>(lo > d) + static_cast<std::int32_t>(hi <= d);
    }
    bins[j] = std::min(std::max(b, std::int32_t{0}), n);
  }
}

}  // namespace

/// Dual-tree traversal that fills a per-bin pair histogram.
class DualTreeCounter {
 public:
  DualTreeCounter(const KdTree& tree, const RadiusTable& radii, Norm norm)
      : tree_(tree),
        radii_(radii),
        squared_(norm == Norm::euclidean),
        n_bins_(radii.size() + 1),
        lanes_(kLanes * n_bins_, 0) {}

  std::vector<std::uint64_t> run() {
    if (tree_.n_points_ >= 2) visit(0, 0);
    std::vector<std::uint64_t> hist(n_bins_, 0);
    for (std::size_t l = 0; l < kLanes; ++l)
      for (std::size_t b = 0; b < n_bins_; ++b) hist[b] += lanes_[l * n_bins_ + b];
    return hist;
  }

 private:
  void bounds(std::size_t a, std::size_t b, double& dmin, double& dmax) const {
    const std::size_t dim = tree_.dim_;
    const double* alo = &tree_.lo_[a * dim];
    const double* ahi = &tree_.hi_[a * dim];
    const double* blo = &tree_.lo_[b * dim];
    const double* bhi = &tree_.hi_[b * dim];
    dmin = 0.0;
    dmax = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double gap = std::max({blo[k] - ahi[k], alo[k] - bhi[k], 0.0});
      const double span = std::max(ahi[k] - blo[k], bhi[k] - alo[k]);
      if (squared_) {
        dmin += gap * gap;
        dmax += span * span;
      } else {
        dmin = std::max(dmin, gap);
        dmax = std::max(dmax, span);
      }
    }
  }

  void visit(std::size_t a, std::size_t b) {
    const auto& na = tree_.nodes_[a];
    const auto& nb = tree_.nodes_[b];
    const std::uint64_t size_a = na.end - na.begin;
    const std::uint64_t size_b = nb.end - nb.begin;
    const std::uint64_t pairs = a == b ? size_a * (size_a - 1) / 2 : size_a * size_b;
    if (pairs == 0) return;

    double dmin = 0.0;
    double dmax = 0.0;
    bounds(a, b, dmin, dmax);
    if (a == b) dmin = 0.0;
    const std::size_t bmin = radii_.bin(dmin, squared_);
    const std::size_t bmax = radii_.bin(dmax, squared_);
    if (bmin == bmax) {
      lanes_[bmin] += pairs;
      return;
    }

    const bool leaf_a = na.left == 0;
    const bool leaf_b = nb.left == 0;
    if (leaf_a && leaf_b) {
      leaf_pairs(a, b);
      return;
    }
    if (a == b) {
      visit(na.left, na.left);
      visit(na.left, na.right);
      visit(na.right, na.right);
      return;
    }
    if (leaf_b || (!leaf_a && size_a >= size_b)) {
      visit(na.left, b);
      visit(na.right, b);
    } else {
      visit(a, nb.left);
      visit(a, nb.right);
    }
  }

  void leaf_pairs(std::size_t a, std::size_t b) {
    switch (tree_.dim_) {
      case 1: return leaf_pairs_fixed<1>(a, b);
      case 2: return leaf_pairs_fixed<2>(a, b);
      case 3: return leaf_pairs_fixed<3>(a, b);
      case 4: return leaf_pairs_fixed<4>(a, b);
      case 5: return leaf_pairs_fixed<5>(a, b);
      case 6: return leaf_pairs_fixed<6>(a, b);
      case 7: return leaf_pairs_fixed<7>(a, b);
      case 8: return leaf_pairs_fixed<8>(a, b);
      default: return leaf_pairs_fixed<0>(a, b);
    }
  }

  // Dim == 0 selects the runtime-dimension path.
  template <std::size_t Dim>
  void leaf_pairs_fixed(std::size_t a, std::size_t b) {
    const std::size_t dim = Dim == 0 ? tree_.dim_ : Dim;
    const std::size_t n = tree_.n_points_;
    const double* coords = tree_.coords_.data();
    const auto& na = tree_.nodes_[a];
    const auto& nb = tree_.nodes_[b];

    alignas(64) double dist[kBlock];
    alignas(64) std::int32_t bins[kBlock];
    std::array<double, Dim == 0 ? 1 : Dim> fixed_xi{};
    std::vector<double> dynamic_xi(Dim == 0 ? dim : 0);
    double* xi = Dim == 0 ? dynamic_xi.data() : fixed_xi.data();

    for (std::size_t i = na.begin; i < na.end; ++i) {
      for (std::size_t k = 0; k < dim; ++k) xi[k] = coords[k * n + i];
      const std::size_t first = a == b ? i + 1 : nb.begin;
      for (std::size_t s = first; s < nb.end; s += kBlock) {
        const std::size_t m = std::min(kBlock, nb.end - s);
        if (squared_) {
          for (std::size_t j = 0; j < m; ++j) {
            const double diff = coords[s + j] - xi[0];
            dist[j] = diff * diff;
          }
          for (std::size_t k = 1; k < dim; ++k) {
            const double* ck = coords + k * n + s;
            const double x = xi[k];
            for (std::size_t j = 0; j < m; ++j) {
              const double diff = ck[j] - x;
              dist[j] += diff * diff;
            }
          }
        } else {
          for (std::size_t j = 0; j < m; ++j) dist[j] = std::abs(coords[s + j] - xi[0]);
          for (std::size_t k = 1; k < dim; ++k) {
            const double* ck = coords + k * n + s;
            const double x = xi[k];
            for (std::size_t j = 0; j < m; ++j) dist[j] = std::max(dist[j], std::abs(ck[j] - x));
          }
        }
        bin_block(dist, bins, m);
        scatter(bins, m);
      }
    }
  }

  void bin_block(const double* dist, std::int32_t* bins, std::size_t m) const {
    const auto n = static_cast<std::int32_t>(radii_.size());
    if (radii_.is_linear()) {
      const double step = radii_.step();
      if (squared_) {
        linear_bins<true>(dist, bins, m, radii_.origin(), step, 1.0 / step, n);
      } else {
        linear_bins<false>(dist, bins, m, radii_.origin(), step, 1.0 / step, n);
      }
      return;
    }
    for (std::size_t j = 0; j < m; ++j)
      bins[j] = static_cast<std::int32_t>(radii_.bin(dist[j], squared_));
  }

  void scatter(const std::int32_t* bins, std::size_t m) {
    std::uint64_t* h = lanes_.data();
    const std::size_t stride = n_bins_;
    std::size_t j = 0;
    for (; j + kLanes <= m; j += kLanes) {
      for (std::size_t l = 0; l < kLanes; ++l) ++h[l * stride + static_cast<std::size_t>(bins[j + l])];
    }
    for (; j < m; ++j) ++h[static_cast<std::size_t>(bins[j])];
  }

  const KdTree& tree_;
  const RadiusTable& radii_;
  bool squared_;
  std::size_t n_bins_;
  std::vector<std::uint64_t> lanes_;
};

std::vector<std::uint64_t> KdTree::pair_histogram(const RadiusTable& radii, Norm norm) const {
  return DualTreeCounter(*this, radii, norm).run();
}

std::vector<std::uint64_t> KdTree::count_pairs(const RadiusTable& radii, Norm norm) const {
  const auto hist = pair_histogram(radii, norm);
  std::vector<std::uint64_t> counts(radii.size());
  std::uint64_t running = 0;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    running += hist[k];
    counts[k] = running;
  }
  return counts;
}

}  // namespace geocausal
