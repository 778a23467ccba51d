#include <doctest.h>

#include <cmath>

#include "geocausal/corrdim.hpp"
#include "geocausal/dynamics.hpp"
#include "geocausal/error.hpp"
#include "geocausal/kd_tree.hpp"
#include "oracles.hpp"

using namespace geocausal;

TEST_CASE("two points at distance 0.5") {
  PointCloud cloud(2, 1, {0.0, 0.5});
  CHECK(count_pairs_within(cloud, 1.0) == 1);
  CHECK(count_pairs_within(cloud, 0.4) == 0);
  // Strict inequality: a pair exactly at the radius is not counted.
  CHECK(count_pairs_within(cloud, 0.5) == 0);
}

TEST_CASE("tree counts match the naive double loop") {
  Rng pick(11);
  for (std::size_t trial = 0; trial < 120; ++trial) {
    const std::size_t n = 2 + pick.below(400);
    const std::size_t dim = 1 + pick.below(6);
    const auto norm = trial % 2 == 0 ? Norm::max : Norm::euclidean;
    // Clustered clouds exercise ties and the bulk-accept path.
    const double scale = trial % 3 == 0 ? 0.2 : 1.0;
    const auto cloud = oracle::uniform_cloud(n, dim, 1000 + trial, scale);
    CorrDimOptions options;
    options.norm = norm;
    options.leaf_size = 1 + pick.below(40);
    for (int r = 0; r < 5; ++r) {
      const double eps = 0.01 + pick.uniform() * 0.8;
      INFO("trial " << trial << " n=" << n << " dim=" << dim << " eps=" << eps);
      CHECK(count_pairs_within(cloud, eps, options) == oracle::naive_pairs(cloud, eps, norm));
    }
  }
}

TEST_CASE("linear and explicit radius tables agree with the naive count") {
  const auto cloud = oracle::uniform_cloud(300, 3, 5);
  RadiusGrid grid;
  const auto linear = count_pairs(cloud, grid.table());
  const auto explicit_table = count_pairs(cloud, RadiusTable::from_radii(grid.radii()));
  REQUIRE(linear.size() == grid.steps);
  CHECK(linear == explicit_table);
  for (std::size_t k = 0; k < grid.steps; ++k)
    CHECK(linear[k] == oracle::naive_pairs(cloud, grid.radius(k)));
}

TEST_CASE("counts on a lattice with exact radius ties") {
  // Integer lattice scaled so pair distances coincide with grid radii.
  std::vector<double> coords;
  for (int x = 0; x < 12; ++x)
    for (int y = 0; y < 12; ++y) {
      coords.push_back(0.05 * x);
      coords.push_back(0.05 * y);
    }
  PointCloud cloud(144, 2, coords);
  const auto table = RadiusTable::linear(0.05, 0.05, 10);
  for (auto norm : {Norm::max, Norm::euclidean}) {
    CorrDimOptions options;
    options.norm = norm;
    const auto counts = count_pairs(cloud, table, options);
    for (std::size_t k = 0; k < table.size(); ++k)
      CHECK(counts[k] == oracle::naive_pairs(cloud, table[k], norm));
  }
}

TEST_CASE("duplicate points") {
  PointCloud cloud(4, 2, {0.3, 0.3, 0.3, 0.3, 0.3, 0.3, 0.9, 0.9});
  CHECK(count_pairs_within(cloud, 0.01) == 3);
  CHECK(count_pairs_within(cloud, 1.0) == 6);
}

TEST_CASE("Theiler window removes temporally close pairs") {
  const auto cloud = oracle::uniform_cloud(200, 2, 3);
  for (std::size_t w : {1u, 3u, 10u}) {
    CorrDimOptions options;
    options.theiler_window = w;
    CHECK(count_pairs_within(cloud, 0.3, options) ==
          oracle::naive_pairs(cloud, 0.3, Norm::max, w));
  }
  CHECK(eligible_pairs(10, 0) == 45);
  CHECK(eligible_pairs(10, 1) == 36);
  CHECK(eligible_pairs(10, 20) == 0);
}

TEST_CASE("correlation sum") {
  PointCloud collinear(3, 1, {0.0, 0.3, 1.0});
  CHECK(correlation_sum(collinear, 0.5) == doctest::Approx(1.0 / 3.0));
  CHECK(correlation_sum(collinear, 2.0) == 1.0);
  CHECK(correlation_sum(collinear, 0.1) == 0.0);
}

TEST_CASE("correlation sum is invariant under translation and point order") {
  const auto cloud = oracle::uniform_cloud(250, 3, 8);
  std::vector<double> moved(cloud.coords().begin(), cloud.coords().end());
  for (std::size_t i = 0; i < moved.size(); ++i) moved[i] += 0.25;
  Rng rng(4);
  const auto perm = rng.permutation(cloud.size());
  std::vector<double> shuffled;
  for (auto i : perm)
    for (double c : cloud.point(i)) shuffled.push_back(c);
  const PointCloud translated(250, 3, moved);
  const PointCloud permuted(250, 3, shuffled);
  for (double eps : {0.05, 0.1, 0.2, 0.4}) {
    CHECK(correlation_sum(translated, eps) == correlation_sum(cloud, eps));
    CHECK(correlation_sum(permuted, eps) == correlation_sum(cloud, eps));
  }
}

TEST_CASE("correlation sum is monotone in the radius") {
  const auto cloud = oracle::uniform_cloud(400, 2, 9);
  double previous = 0.0;
  for (double eps = 0.01; eps < 1.5; eps += 0.037) {
    const double c = correlation_sum(cloud, eps);
    CHECK(c >= previous);
    previous = c;
  }
}

TEST_CASE("radius grid") {
  RadiusGrid grid;
  CHECK(grid.radius(0) == 0.0562);
  CHECK(grid.radius(1) == doctest::Approx(0.0562 + (0.630 - 0.0562) / 50));
  CHECK(grid.radii().size() == 50);
  CHECK(grid.radius(49) < grid.eps_max);
  const auto table = grid.table();
  for (std::size_t k = 0; k < grid.steps; ++k) CHECK(table[k] == grid.radius(k));

  CHECK_THROWS_AS((RadiusGrid{0.0, 1.0, 10}.validate()), ValidationError);
  CHECK_THROWS_AS((RadiusGrid{0.5, 0.4, 10}.validate()), ValidationError);
  CHECK_THROWS_AS((RadiusGrid{0.1, 0.4, 1}.validate()), ValidationError);

  RadiusGrid log_grid{0.01, 1.0, 4, RadiusSpacing::log};
  CHECK(log_grid.radius(2) == doctest::Approx(0.1));
}

TEST_CASE("curve above the diameter is flat at zero") {
  const auto cloud = oracle::uniform_cloud(100, 2, 1, 0.01);
  const auto curve = correlation_curve(cloud, RadiusGrid{});
  CHECK(curve.points.size() == 50);
  for (const auto& p : curve.points) CHECK(p.ln_c == 0.0);
  const auto estimate = estimate_d2(curve);
  CHECK(estimate.d2 == doctest::Approx(0.0));
  CHECK(estimate.degenerate);
}

TEST_CASE("zero-count radii are dropped") {
  PointCloud cloud(3, 1, {0.0, 0.1, 0.5});
  RadiusGrid grid{0.06, 0.46, 8};
  const auto curve = correlation_curve(cloud, grid);
  CHECK(curve.n_dropped == 1);  // only r = 0.06 sees no pair
  CHECK(curve.points.size() == 7);
  for (std::size_t k = 1; k < curve.points.size(); ++k)
    CHECK(curve.points[k].ln_c >= curve.points[k - 1].ln_c);

  PointCloud sparse(2, 1, {0.0, 0.9});
  CHECK_THROWS_AS(correlation_curve(sparse, grid), EstimationError);
  try {
    correlation_curve(sparse, grid);
  } catch (const EstimationError& e) {
    CHECK(std::string(e.what()).find("eps_min=0.06") != std::string::npos);
  }
}

TEST_CASE("least squares slope of an exact line") {
  CorrSumCurve curve;
  for (int k = 0; k < 10; ++k) {
    const double x = -3.0 + 0.2 * k;
    curve.points.push_back({x, 2.0 * x + 1.0});
  }
  const auto e = estimate_d2(curve);
  CHECK(e.d2 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(e.intercept == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.residual_sum == doctest::Approx(0.0).epsilon(1e-20));
  CHECK(e.n_points_used == 10);

  // Rescaling coordinates by s shifts the abscissa by ln s only.
  CorrSumCurve shifted = curve;
  for (auto& p : shifted.points) p.ln_eps += std::log(3.0);
  CHECK(estimate_d2(shifted).d2 == doctest::Approx(e.d2).epsilon(1e-9));
}

TEST_CASE("least squares failure modes") {
  CorrSumCurve one;
  one.points.push_back({0.0, 0.0});
  CHECK_THROWS_AS(estimate_d2(one), EstimationError);
  CorrSumCurve vertical;
  vertical.points = {{1.0, 0.0}, {1.0, 1.0}};
  CHECK_THROWS_AS(estimate_d2(vertical), EstimationError);
}

TEST_CASE("region selector prefers the longest well-fitting run") {
  CorrSumCurve curve;
  for (int k = 0; k < 30; ++k) {
    const double x = -4.0 + 0.1 * k;
    // Straight with slope 1.5 for k < 20, then saturates.
    const double y = k < 20 ? 1.5 * x : 1.5 * (-4.0 + 1.9) + 0.01 * (k - 19);
    curve.points.push_back({x, y});
  }
  const auto e = estimate_d2_region(curve, RegionOptions{});
  CHECK(e.first == 0);
  CHECK(e.last == 20);
  CHECK(e.d2 == doctest::Approx(1.5));
}

TEST_CASE("uniform cubes match the analytic finite-grid slope") {
  // For uniform samples on [0, L]^m under the max norm, C(r) = (2r/L - (r/L)^2)^m
  // exactly, so the least-squares slope over the grid is known in closed form.
  const RadiusGrid grid;
  for (std::size_t m = 1; m <= 3; ++m) {
    for (double extent : {1.0, 4.0}) {
      CorrSumCurve expected;
      for (double r : grid.radii()) {
        const double u = r / extent;
        expected.points.push_back(
            {std::log(r), static_cast<double>(m) * std::log(2.0 * u - u * u)});
      }
      const double analytic = estimate_d2(expected).d2;
      const auto cloud = oracle::uniform_cloud(10000, m, 20 + m, extent);
      const double d2 = correlation_dimension(cloud, grid).d2;
      INFO("m=" << m << " L=" << extent << " analytic=" << analytic << " estimate=" << d2);
      CHECK(std::abs(d2 - analytic) < 0.03);
      CHECK(d2 <= static_cast<double>(m) + 0.2);
    }
  }
}

TEST_CASE("logistic map invariant set on the default grid") {
  NetworkSpec spec;
  spec.adjacency = AdjacencyMatrix(1);
  SimulationOptions sim;
  sim.keep = 10000;
  sim.seed = 3;
  const auto panel = simulate(spec, sim);
  const auto series = panel.series(0);
  PointCloud cloud(10000, 1, std::vector<double>(series.begin(), series.end()));
  const auto curve = correlation_curve(cloud, RadiusGrid{});
  CHECK(curve.points.size() == 50);
  for (const auto& p : curve.points) CHECK(std::isfinite(p.ln_c));
  const double d2 = estimate_d2(curve).d2;
  CHECK(d2 > 0.5);
  CHECK(d2 <= 1.05);
}

TEST_CASE("point cloud validation") {
  CHECK_THROWS_AS(PointCloud(1, 1, {0.0}), ValidationError);
  CHECK_THROWS_AS(PointCloud(2, 1, {0.0}), ValidationError);
  CHECK_THROWS_AS(PointCloud(2, 1, {0.0, NAN}), ValidationError);
  CHECK_THROWS_AS(count_pairs_within(PointCloud(2, 1, {0.0, 1.0}), 0.0), ValidationError);
}
