#include "siftwood/clustering.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "siftwood/errors.hpp"
#include "siftwood/parallel.hpp"
#include "siftwood/rng.hpp"

namespace siftwood::clustering {

PointSet::PointSet(std::size_t dim, std::vector<double> values)
    : dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) throw InvalidArgument("PointSet: dimension must be positive");
  if (values_.size() % dim_ != 0)
    throw InvalidArgument("PointSet: value count is not a multiple of the dimension");
}

void PointSet::check_dim(std::size_t n) const {
  if (dim_ == 0) throw InvalidArgument("PointSet: dimension must be positive");
  if (n != dim_)
    throw InvalidArgument("PointSet: point has " + std::to_string(n) + " entries, expected " +
                          std::to_string(dim_));
}

void PointSet::add(std::span<const double> point) {
  check_dim(point.size());
  values_.insert(values_.end(), point.begin(), point.end());
}

void ClusteringConfig::validate() const {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
  if (!(tolerance >= 0.0)) throw InvalidArgument("tolerance must be >= 0");
}

// Four interleaved partial sums, combined in a fixed order.
double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  const std::size_t n = a.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double d0 = a[i] - b[i];
    const double d1 = a[i + 1] - b[i + 1];
    const double d2 = a[i + 2] - b[i + 2];
    const double d3 = a[i + 3] - b[i + 3];
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s0 += d * d;
  }
  return (s0 + s1) + (s2 + s3);
}

Assignment assign_nearest(std::span<const double> point, const PointSet& centroids) {
  if (centroids.empty()) throw InvalidArgument("assign_nearest: no centroids");
  if (point.size() != centroids.dim())
    throw InvalidArgument("assign_nearest: point dimension " + std::to_string(point.size()) +
                          " does not match centroid dimension " +
                          std::to_string(centroids.dim()));
  Assignment best{0, squared_distance(point, centroids[0])};
  for (std::size_t i = 1; i < centroids.size(); ++i) {
    const double d = squared_distance(point, centroids[i]);
    if (d < best.squared_distance) best = {i, d};
  }
  return best;
}

SeedResult kmeanspp_seed(const PointSet& points, std::size_t k, std::uint64_t rng_seed) {
  if (k < 1) throw InvalidArgument("kmeanspp_seed: k must be >= 1");
  if (points.empty()) throw InvalidArgument("kmeanspp_seed: no points");
  const std::size_t n = points.size();
  Rng rng(rng_seed);

  SeedResult out;
  out.centroids = PointSet(points.dim());
  out.centroids.reserve(k);
  auto choose = [&](std::size_t idx) {
    out.chosen.push_back(idx);
    out.centroids.add(points[idx]);
  };

  choose(static_cast<std::size_t>(rng.uniform_index(n)));
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_distance(points[i], out.centroids[0]);

  while (out.chosen.size() < k) {
    const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = rng.uniform01() * total;
      double running = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        running += nearest[i];
        if (running > target && nearest[i] > 0.0) {
          pick = i;
          break;
        }
      }
      // Rounding can leave the target just above the final partial sum.
      if (pick == n)
        for (std::size_t i = n; i-- > 0;)
          if (nearest[i] > 0.0) {
            pick = i;
            break;
          }
    } else {
      out.degenerate = true;
      pick = static_cast<std::size_t>(rng.uniform_index(n));
    }
    choose(pick);
    const auto centre = out.centroids[out.chosen.size() - 1];
    for (std::size_t i = 0; i < n; ++i)
      nearest[i] = std::min(nearest[i], squared_distance(points[i], centre));
  }
  return out;
}

SeedResult uniform_seed(const PointSet& points, std::size_t k, std::uint64_t rng_seed) {
  if (k < 1) throw InvalidArgument("uniform_seed: k must be >= 1");
  if (k > points.size()) throw InvalidArgument("uniform_seed: k exceeds the number of points");
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(rng_seed);
  // Partial Fisher-Yates: the first k slots are a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(order.size() - i));
    std::swap(order[i], order[j]);
  }
  SeedResult out;
  out.centroids = PointSet(points.dim());
  for (std::size_t i = 0; i < k; ++i) {
    out.chosen.push_back(order[i]);
    out.centroids.add(points[order[i]]);
  }
  return out;
}

double wcss(const PointSet& points, std::span<const std::size_t> assignments,
            const PointSet& centroids) {
  if (assignments.size() != points.size())
    throw InvalidArgument("wcss: assignment count does not match point count");
  if (!points.empty() && points.dim() != centroids.dim())
    throw InvalidArgument("wcss: point and centroid dimensions differ");
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (assignments[i] >= centroids.size())
      throw InvalidArgument("wcss: assignment index out of range");
    total += squared_distance(points[i], centroids[assignments[i]]);
  }
  return total;
}

namespace {

// Parallel over points; the WCSS reduction runs serially in point order.
double assign_all(const PointSet& points, const PointSet& centroids,
                  std::vector<std::size_t>& labels, std::vector<double>& distances) {
  constexpr std::size_t kChunk = 256;
  const std::size_t n = points.size();
  parallel::parallel_for((n + kChunk - 1) / kChunk, [&](std::size_t chunk) {
    const std::size_t end = std::min(n, (chunk + 1) * kChunk);
    for (std::size_t i = chunk * kChunk; i < end; ++i) {
      const Assignment a = assign_nearest(points[i], centroids);
      labels[i] = a.index;
      distances[i] = a.squared_distance;
    }
  });
  double total = 0.0;
  for (double d : distances) total += d;
  return total;
}

}  // namespace

KMeansResult kmeans_from(const PointSet& points, PointSet initial, const ClusteringConfig& cfg) {
  cfg.validate();
  if (points.empty()) throw InvalidArgument("kmeans: empty point set");
  if (initial.size() != cfg.k)
    throw InvalidArgument("kmeans: expected " + std::to_string(cfg.k) + " initial centroids");
  if (initial.dim() != points.dim())
    throw InvalidArgument("kmeans: centroid dimension does not match points");

  const std::size_t n = points.size();
  const std::size_t dim = points.dim();
  const std::size_t k = cfg.k;

  KMeansResult result;
  result.codebook.seed = cfg.rng_seed;
  std::vector<double> centroids(initial.values().begin(), initial.values().end());
  std::vector<std::size_t> labels(n);
  std::vector<double> distances(n);

  auto view = [&] { return PointSet(dim, centroids); };
  double current = assign_all(points, view(), labels, distances);
  result.wcss_history.push_back(current);

  std::vector<double> sums(k * dim);
  std::vector<std::size_t> counts(k);
  std::size_t iterations = 0;
  while (iterations < cfg.max_iterations) {
    ++iterations;
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = points[i];
      double* s = sums.data() + labels[i] * dim;
      for (std::size_t d = 0; d < dim; ++d) s[d] += p[d];
      ++counts[labels[i]];
    }
    std::vector<bool> taken(n, false);
    for (std::size_t c = 0; c < k; ++c) {
      double* m = centroids.data() + c * dim;
      if (counts[c] > 0) {
        for (std::size_t d = 0; d < dim; ++d)
          m[d] = sums[c * dim + d] / static_cast<double>(counts[c]);
        continue;
      }
      // Empty cluster: move the centroid onto the point farthest from its own centroid.
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i)
        if (!taken[i] && (far == n || distances[i] > distances[far])) far = i;
      if (far == n) continue;
      taken[far] = true;
      distances[far] = 0.0;
      std::copy(points[far].begin(), points[far].end(), m);
      ++result.empty_cluster_repairs;
    }

    const double previous = current;
    current = assign_all(points, view(), labels, distances);
    result.wcss_history.push_back(current);
    if (previous <= 0.0 || (previous - current) <= cfg.tolerance * previous) break;
  }

  result.codebook.centroids = view();
  result.codebook.iterations = iterations;
  result.codebook.wcss = current;
  result.assignments = std::move(labels);
  return result;
}

KMeansResult kmeans(const PointSet& points, const ClusteringConfig& cfg) {
  cfg.validate();
  if (points.empty()) throw InvalidArgument("kmeans: empty point set");
  SeedResult seeds = kmeanspp_seed(points, cfg.k, cfg.rng_seed);
  KMeansResult result = kmeans_from(points, std::move(seeds.centroids), cfg);
  result.seeding_degenerate = seeds.degenerate;
  return result;
}

}  // namespace siftwood::clustering
