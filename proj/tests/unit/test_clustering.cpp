#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "siftwood/clustering.hpp"
#include "siftwood/errors.hpp"
#include "siftwood/parallel.hpp"
#include "siftwood/rng.hpp"

using namespace siftwood;
using namespace siftwood::clustering;

namespace {

PointSet line(std::vector<double> xs) { return PointSet(1, std::move(xs)); }

PointSet random_points(std::size_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n * dim);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return PointSet(dim, std::move(v));
}

// Ten well-separated Gaussian blobs in 2-D.
PointSet blobs(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v;
  for (int c = 0; c < 10; ++c) {
    const double cx = 100.0 * (c % 5);
    const double cy = 100.0 * (c / 5);
    for (int i = 0; i < 30; ++i) {
      v.push_back(rng.normal(cx, 1.0));
      v.push_back(rng.normal(cy, 1.0));
    }
  }
  return PointSet(2, std::move(v));
}

bool non_increasing(const std::vector<double>& h) {
  for (std::size_t i = 1; i < h.size(); ++i)
    if (h[i] > h[i - 1]) return false;
  return true;
}

}  // namespace

TEST_SUITE("clustering") {

TEST_CASE("config validation") {
  ClusteringConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.k = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.tolerance = -1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("point set rejects mismatched dimensions") {
  CHECK_THROWS_AS(PointSet(3, {1.0, 2.0}), InvalidArgument);
  PointSet p(2);
  const std::vector<double> three{1, 2, 3};
  CHECK_THROWS_AS(p.add(three), InvalidArgument);
}

TEST_CASE("assign_nearest examples") {
  const PointSet c3(2, {0, 0, 5, 5, 2, 7});
  const std::vector<double> on_third{2, 7};
  const Assignment a = assign_nearest(on_third, c3);
  CHECK(a.index == 2);
  CHECK(a.squared_distance == 0.0);

  const PointSet c2 = line({0.0, 1.0});
  const std::vector<double> p04{0.4};
  const Assignment b = assign_nearest(p04, c2);
  CHECK(b.index == 0);
  CHECK(b.squared_distance == doctest::Approx(0.16).epsilon(1e-12));

  const std::vector<double> half{0.5};
  CHECK(assign_nearest(half, c2).index == 0);
}

TEST_CASE("assign_nearest errors") {
  const PointSet c2 = line({0.0, 1.0});
  const std::vector<double> p2{0.0, 0.0};
  CHECK_THROWS_AS(assign_nearest(p2, c2), InvalidArgument);
  const std::vector<double> p1{0.0};
  CHECK_THROWS_AS(assign_nearest(p1, PointSet(1)), InvalidArgument);
}

TEST_CASE("assignments satisfy the assignment inequality") {
  const PointSet pts = random_points(1000, 8, 11);
  ClusteringConfig cfg;
  cfg.k = 7;
  cfg.rng_seed = 3;
  const KMeansResult r = kmeans(pts, cfg);
  const PointSet& c = r.codebook.centroids;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double own = squared_distance(pts[i], c[r.assignments[i]]);
    for (std::size_t j = 0; j < c.size(); ++j) {
      const double d = squared_distance(pts[i], c[j]);
      CHECK(own <= d);
      if (d == own) CHECK(r.assignments[i] <= j);
    }
  }
}

TEST_CASE("kmeans++ with k=1 picks a single reproducible point") {
  const PointSet pts = line({1, 2, 3, 4, 5});
  const SeedResult a = kmeanspp_seed(pts, 1, 42);
  const SeedResult b = kmeanspp_seed(pts, 1, 42);
  REQUIRE(a.chosen.size() == 1);
  CHECK(a.chosen == b.chosen);
  CHECK(a.centroids.size() == 1);
}

TEST_CASE("kmeans++ first centre is uniform") {
  const PointSet pts = line({0, 1, 2, 3});
  std::vector<int> counts(4, 0);
  const int trials = 4000;
  for (int s = 0; s < trials; ++s) ++counts[kmeanspp_seed(pts, 1, s).chosen[0]];
  for (int c : counts) CHECK(std::abs(c / double(trials) - 0.25) < 0.03);
}

TEST_CASE("kmeans++ second centre follows the D^2 weights") {
  const std::vector<std::vector<double>> raw{{0.0}, {1.0}, {3.0}, {6.0}};
  const PointSet pts = line({0, 1, 3, 6});
  std::vector<std::vector<int>> counts(4, std::vector<int>(4, 0));
  std::vector<int> firsts(4, 0);
  const int trials = 20000;
  for (int s = 0; s < trials; ++s) {
    const SeedResult r = kmeanspp_seed(pts, 2, s);
    ++firsts[r.chosen[0]];
    ++counts[r.chosen[0]][r.chosen[1]];
  }
  for (std::size_t f = 0; f < 4; ++f) {
    const std::vector<double> p = oracle::second_centre_probabilities(raw, f);
    for (std::size_t j = 0; j < 4; ++j) {
      const double observed = counts[f][j] / double(firsts[f]);
      CHECK(std::abs(observed - p[j]) < 0.03);
    }
  }
}

TEST_CASE("kmeans++ second centre lands in the other group") {
  std::vector<double> v;
  Rng rng(5);
  for (int i = 0; i < 10; ++i) v.push_back(rng.uniform(0.0, 0.1));
  for (int i = 0; i < 10; ++i) v.push_back(100.0 + rng.uniform(0.0, 0.1));
  const PointSet pts = line(v);

  std::vector<std::vector<double>> raw;
  for (double x : v) raw.push_back({x});
  for (std::size_t f = 0; f < raw.size(); ++f) {
    const std::vector<double> p = oracle::second_centre_probabilities(raw, f);
    double other = 0.0;
    for (std::size_t j = 0; j < raw.size(); ++j)
      if ((j < 10) != (f < 10)) other += p[j];
    CHECK(other >= 0.99);
  }

  int hits = 0;
  for (int s = 0; s < 1000; ++s) {
    const SeedResult r = kmeanspp_seed(pts, 2, s);
    if ((r.chosen[0] < 10) != (r.chosen[1] < 10)) ++hits;
  }
  CHECK(hits >= 990);
}

TEST_CASE("kmeans++ on identical points falls back to uniform") {
  const PointSet pts(2, {3, 3, 3, 3, 3, 3});
  const SeedResult r = kmeanspp_seed(pts, 2, 9);
  CHECK(r.degenerate);
  CHECK(r.centroids.size() == 2);
  CHECK(r.chosen[1] < 3);

  ClusteringConfig cfg;
  cfg.k = 2;
  const KMeansResult k = kmeans(pts, cfg);
  CHECK(k.seeding_degenerate);
  CHECK(k.codebook.wcss == 0.0);
}

TEST_CASE("kmeans++ with distinct points is not degenerate") {
  const SeedResult r = kmeanspp_seed(line({0, 1, 2}), 3, 1);
  CHECK_FALSE(r.degenerate);
  std::vector<std::size_t> chosen = r.chosen;
  std::sort(chosen.begin(), chosen.end());
  CHECK(chosen == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("seeding errors") {
  CHECK_THROWS_AS(kmeanspp_seed(line({1}), 0, 0), InvalidArgument);
  CHECK_THROWS_AS(kmeanspp_seed(PointSet(1), 1, 0), InvalidArgument);
  CHECK_THROWS_AS(uniform_seed(line({1, 2}), 3, 0), InvalidArgument);
}

TEST_CASE("uniform seeding picks distinct points") {
  const PointSet pts = line({0, 1, 2, 3, 4, 5});
  for (std::uint64_t s = 0; s < 50; ++s) {
    std::vector<std::size_t> c = uniform_seed(pts, 4, s).chosen;
    std::sort(c.begin(), c.end());
    CHECK(std::adjacent_find(c.begin(), c.end()) == c.end());
  }
}

TEST_CASE("kmeans on {0,1,9,10} with k=2") {
  ClusteringConfig cfg;
  cfg.k = 2;
  for (std::uint64_t s = 0; s < 20; ++s) {
    cfg.rng_seed = s;
    const KMeansResult r = kmeans(line({0, 1, 9, 10}), cfg);
    std::vector<double> c{r.codebook.centroids[0][0], r.codebook.centroids[1][0]};
    std::sort(c.begin(), c.end());
    CHECK(c[0] == doctest::Approx(0.5));
    CHECK(c[1] == doctest::Approx(9.5));
    CHECK(r.codebook.wcss == doctest::Approx(1.0));
  }
  CHECK(oracle::optimal_wcss_1d({0, 1, 9, 10}, 2) == doctest::Approx(1.0));
}

TEST_CASE("k equal to n gives zero WCSS") {
  const PointSet pts = random_points(12, 3, 8);
  ClusteringConfig cfg;
  cfg.k = 12;
  const KMeansResult r = kmeans(pts, cfg);
  CHECK(r.codebook.wcss == 0.0);
  CHECK(r.codebook.k() == 12);
}

TEST_CASE("kmeans errors") {
  ClusteringConfig cfg;
  cfg.k = 2;
  CHECK_THROWS_AS(kmeans(PointSet(2), cfg), InvalidArgument);
  CHECK_THROWS_AS(kmeans_from(line({1, 2}), line({1}), cfg), InvalidArgument);
  CHECK_THROWS_AS(kmeans_from(line({1, 2}), PointSet(2, {0, 0, 1, 1}), cfg), InvalidArgument);
  cfg.k = 0;
  CHECK_THROWS_AS(kmeans(line({1, 2}), cfg), InvalidArgument);
}

TEST_CASE("WCSS is non-increasing on random instances") {
  const std::size_t dims[] = {2, 8, 128};
  int violations = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t dim = dims[t % 3];
    const PointSet pts = random_points(60 + t, dim, 1000 + t);
    ClusteringConfig cfg;
    cfg.k = 2 + t % 9;
    cfg.rng_seed = t;
    cfg.tolerance = 0.0;
    const KMeansResult r = kmeans(pts, cfg);
    if (!non_increasing(r.wcss_history)) ++violations;
    CHECK(r.wcss_history.size() == r.codebook.iterations + 1);
    CHECK(r.codebook.wcss == r.wcss_history.back());
  }
  CHECK(violations == 0);
}

TEST_CASE("final WCSS matches the wcss function") {
  const PointSet pts = random_points(200, 4, 2);
  ClusteringConfig cfg;
  cfg.k = 5;
  const KMeansResult r = kmeans(pts, cfg);
  const double direct = wcss(pts, r.assignments, r.codebook.centroids);
  CHECK(direct == doctest::Approx(r.codebook.wcss).epsilon(1e-12));
}

TEST_CASE("kmeans from k-means++ seeds reaches the 1-D optimum") {
  std::mt19937_64 gen(77);
  int optimal = 0;
  int violations = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const std::size_t n = 2 + gen() % 7;
    const std::size_t k = 1 + gen() % std::min<std::size_t>(n, 3);
    std::vector<double> xs(n);
    for (double& x : xs) x = static_cast<double>(gen() % 1000) / 10.0;
    ClusteringConfig cfg;
    cfg.k = k;
    cfg.rng_seed = t;
    const KMeansResult r = kmeans(line(xs), cfg);
    if (!non_increasing(r.wcss_history)) ++violations;
    const double best = oracle::optimal_wcss_1d(xs, k);
    if (std::abs(r.codebook.wcss - best) <= 1e-9 * std::max(1.0, best)) ++optimal;
  }
  CHECK(violations == 0);
  CHECK(optimal >= trials * 8 / 10);
}

TEST_CASE("k-means++ seeding beats uniform seeding on separated blobs") {
  double pp = 0.0, uni = 0.0;
  for (std::uint64_t s = 0; s < 30; ++s) {
    const PointSet pts = blobs(500 + s);
    ClusteringConfig cfg;
    cfg.k = 10;
    cfg.rng_seed = s;
    pp += kmeans(pts, cfg).codebook.wcss;
    uni += kmeans_from(pts, uniform_seed(pts, 10, s).centroids, cfg).codebook.wcss;
  }
  CHECK(pp / 30 <= uni / 30 + 1e-9);
}

TEST_CASE("empty clusters are repaired") {
  const PointSet pts = line({0, 1, 2, 10});
  // The third centroid is far from every point and starts empty.
  ClusteringConfig cfg;
  cfg.k = 3;
  const KMeansResult r = kmeans_from(pts, line({0, 1, 1000}), cfg);
  CHECK(r.empty_cluster_repairs >= 1);
  std::vector<std::size_t> used(r.assignments);
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  CHECK(used.size() == 3);
  CHECK(r.codebook.wcss == doctest::Approx(oracle::optimal_wcss_1d({0, 1, 2, 10}, 3)));
  CHECK(non_increasing(r.wcss_history));
}

TEST_CASE("max_iterations caps the run") {
  const PointSet pts = random_points(500, 2, 4);
  ClusteringConfig cfg;
  cfg.k = 20;
  cfg.max_iterations = 1;
  CHECK(kmeans(pts, cfg).codebook.iterations == 1);
}

TEST_CASE("codebook records seed and iterations") {
  ClusteringConfig cfg;
  cfg.k = 2;
  cfg.rng_seed = 1234;
  const KMeansResult r = kmeans(line({0, 1, 9, 10}), cfg);
  CHECK(r.codebook.seed == 1234);
  CHECK(r.codebook.iterations >= 1);
  CHECK(r.codebook.dim() == 1);
  CHECK(r.codebook.wcss >= 0.0);
}

TEST_CASE("kmeans is bit-reproducible across runs and thread counts") {
  const PointSet pts = random_points(3000, 16, 21);
  ClusteringConfig cfg;
  cfg.k = 12;
  cfg.rng_seed = 6;
  parallel::set_max_threads(1);
  const KMeansResult a = kmeans(pts, cfg);
  const KMeansResult b = kmeans(pts, cfg);
  parallel::set_max_threads(4);
  const KMeansResult c = kmeans(pts, cfg);
  parallel::set_max_threads(1);
  const auto av = a.codebook.centroids.values();
  for (const KMeansResult* o : {&b, &c}) {
    const auto ov = o->codebook.centroids.values();
    CHECK(std::equal(av.begin(), av.end(), ov.begin(), ov.end()));
    CHECK(o->assignments == a.assignments);
    CHECK(o->codebook.wcss == a.codebook.wcss);
    CHECK(o->codebook.iterations == a.codebook.iterations);
  }
}

TEST_CASE("wcss examples") {
  const PointSet pts = line({0, 2});
  const std::vector<std::size_t> one{0, 0};
  CHECK(wcss(pts, one, line({1})) == doctest::Approx(2.0));
  const std::vector<std::size_t> own{0, 1};
  CHECK(wcss(pts, own, line({0, 2})) == 0.0);
  const PointSet swapped = line({2, 0});
  CHECK(wcss(swapped, one, line({1})) == wcss(pts, one, line({1})));
}

TEST_CASE("wcss errors") {
  const PointSet pts = line({0, 2});
  const std::vector<std::size_t> short_labels{0};
  CHECK_THROWS_AS(wcss(pts, short_labels, line({1})), InvalidArgument);
  const std::vector<std::size_t> bad{0, 5};
  CHECK_THROWS_AS(wcss(pts, bad, line({1})), InvalidArgument);
  const std::vector<std::size_t> ok{0, 0};
  CHECK_THROWS_AS(wcss(pts, ok, PointSet(2, {0, 0})), InvalidArgument);
}

}
