#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace siftwood::clustering {

/// Dense row-major set of equal-length points.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {}
  PointSet(std::size_t dim, std::vector<double> values);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : values_.size() / dim_; }
  bool empty() const { return size() == 0; }

  std::span<const double> operator[](std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }

  void add(std::span<const double> point);
  template <typename T>
  void add_converted(std::span<const T> point) {
    check_dim(point.size());
    values_.insert(values_.end(), point.begin(), point.end());
  }
  void reserve(std::size_t points) { values_.reserve(points * dim_); }

  std::span<const double> values() const { return values_; }

 private:
  void check_dim(std::size_t n) const;

  std::size_t dim_ = 0;
  std::vector<double> values_;
};

struct ClusteringConfig {
  std::size_t k = 1;
  std::size_t max_iterations = 300;
  double tolerance = 1e-6;  // relative WCSS change
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct Assignment {
  std::size_t index = 0;
  double squared_distance = 0.0;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

/// Nearest centroid by squared Euclidean distance; ties go to the lowest index.
Assignment assign_nearest(std::span<const double> point, const PointSet& centroids);

struct SeedResult {
  PointSet centroids;
  std::vector<std::size_t> chosen;  // indices into the input points
  bool degenerate = false;  // a uniform fallback draw was needed (sum of D^2 was 0)
};

/// k-means++: first centre uniform, then each next centre with probability
/// D(x)^2 / sum D(x)^2. When every remaining D(x) is 0 the draw falls back to
/// uniform over all points, which can duplicate centres.
SeedResult kmeanspp_seed(const PointSet& points, std::size_t k, std::uint64_t rng_seed);

/// k distinct points chosen uniformly without replacement (k <= n).
SeedResult uniform_seed(const PointSet& points, std::size_t k, std::uint64_t rng_seed);

/// A learned visual vocabulary.
struct Codebook {
  PointSet centroids;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  double wcss = 0.0;

  std::size_t k() const { return centroids.size(); }
  std::size_t dim() const { return centroids.dim(); }
};

struct KMeansResult {
  Codebook codebook;
  std::vector<std::size_t> assignments;
  std::vector<double> wcss_history;  // after the initial assignment and each iteration
  bool seeding_degenerate = false;
  std::size_t empty_cluster_repairs = 0;
};

/// Lloyd iterations from k-means++ seeds.
KMeansResult kmeans(const PointSet& points, const ClusteringConfig& cfg);

/// Lloyd iterations from caller-supplied initial centroids.
KMeansResult kmeans_from(const PointSet& points, PointSet initial, const ClusteringConfig& cfg);

double wcss(const PointSet& points, std::span<const std::size_t> assignments,
            const PointSet& centroids);

}  // namespace siftwood::clustering
