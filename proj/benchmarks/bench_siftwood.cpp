#include <benchmark/benchmark.h>

#include "siftwood/bow.hpp"
#include "siftwood/clustering.hpp"
#include "siftwood/image.hpp"
#include "siftwood/knn.hpp"
#include "siftwood/parallel.hpp"
#include "siftwood/rng.hpp"
#include "siftwood/sift.hpp"
#include "siftwood/synthetic.hpp"
#include "siftwood/texture.hpp"

using namespace siftwood;

namespace {

GrayImage texture(int size) {
  synthetic::SyntheticSpec spec;
  spec.size = size;
  return synthetic::synthesize_texture(1, 0, spec);
}

clustering::PointSet random_points(std::size_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n * dim);
  for (double& x : v) x = rng.uniform(0.0, 1.0);
  return clustering::PointSet(dim, std::move(v));
}

void BM_GaussianBlur(benchmark::State& state) {
  const GrayImage img = texture(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_blur(img, 1.6));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_GaussianBlur)->Arg(256)->Arg(600);

void BM_SiftExtract(benchmark::State& state) {
  parallel::set_max_threads(1);
  const GrayImage img = texture(static_cast<int>(state.range(0)));
  std::size_t keypoints = 0;
  for (auto _ : state) keypoints = sift::extract_keypoints(img).size();
  state.counters["keypoints"] = static_cast<double>(keypoints);
}
BENCHMARK(BM_SiftExtract)->Arg(256)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  parallel::set_max_threads(1);
  const clustering::PointSet pts = random_points(static_cast<std::size_t>(state.range(0)), 128, 3);
  clustering::ClusteringConfig cfg;
  cfg.k = static_cast<std::size_t>(state.range(1));
  cfg.max_iterations = 10;
  for (auto _ : state) benchmark::DoNotOptimize(clustering::kmeans(pts, cfg).codebook.wcss);
}
BENCHMARK(BM_KMeans)->Args({5000, 100})->Args({5000, 300})->Unit(benchmark::kMillisecond);

void BM_AssignNearest(benchmark::State& state) {
  const clustering::PointSet centroids = random_points(static_cast<std::size_t>(state.range(0)), 128, 1);
  const clustering::PointSet queries = random_points(256, 128, 2);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(clustering::assign_nearest(queries[i++ % 256], centroids));
}
BENCHMARK(BM_AssignNearest)->Arg(100)->Arg(400);

void BM_EncodeHistogram(benchmark::State& state) {
  const auto descriptors = sift::extract_keypoints(texture(256));
  clustering::Codebook codebook;
  codebook.centroids = random_points(static_cast<std::size_t>(state.range(0)), 128, 4);
  for (auto _ : state) benchmark::DoNotOptimize(bow::encode_histogram(descriptors, codebook));
  state.counters["descriptors"] = static_cast<double>(descriptors.size());
}
BENCHMARK(BM_EncodeHistogram)->Arg(100)->Arg(400);

void BM_Lbp(benchmark::State& state) {
  const GrayImage img = texture(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(texture::lbp_histogram(img));
}
BENCHMARK(BM_Lbp)->Arg(256)->Arg(600);

void BM_Glcm(benchmark::State& state) {
  const GrayImage img = texture(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(texture::glcm_feature_vector(img));
}
BENCHMARK(BM_Glcm)->Arg(256)->Arg(600);

void BM_KnnPredict(benchmark::State& state) {
  const clustering::PointSet pts = random_points(160, static_cast<std::size_t>(state.range(0)), 5);
  ml::SampleSet train(pts.dim(), 5);
  for (std::size_t i = 0; i < pts.size(); ++i) train.add(pts[i], static_cast<int>(i % 5));
  const ml::KnnModel model = ml::knn_train(train, 1);
  const clustering::PointSet q = random_points(40, pts.dim(), 6);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ml::knn_predict(model, q[i++ % 40]));
}
BENCHMARK(BM_KnnPredict)->Arg(100)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
