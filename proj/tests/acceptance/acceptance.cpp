#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "siftwood/classifier.hpp"
#include "siftwood/clustering.hpp"
#include "siftwood/experiments.hpp"
#include "siftwood/parallel.hpp"
#include "siftwood/pipeline.hpp"
#include "siftwood/rng.hpp"
#include "siftwood/sift.hpp"

using namespace siftwood;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Shared state of the synthetic end-to-end run, reused by later criteria.
struct Synthetic {
  PipelineConfig cfg;
  Corpus corpus;
  RunReport report;
  double seconds = 0.0;
};

PipelineConfig synthetic_config() {
  PipelineConfig cfg;
  cfg.extraction.resize_width = 0;
  cfg.extraction.resize_height = 0;
  cfg.clusters = 100;
  cfg.classifier = ml::KnnSpec{};
  cfg.split.mode = SplitMode::TrainTest;
  cfg.split.seed = 0;
  return cfg;
}

Synthetic run_synthetic(unsigned threads) {
  parallel::set_max_threads(threads);
  Synthetic s;
  s.cfg = synthetic_config();
  const auto t0 = std::chrono::steady_clock::now();
  s.corpus = extract_corpus(fixtures::synthetic_set(), s.cfg.extraction);
  s.report = run_pipeline(s.corpus, s.cfg);
  s.seconds = seconds_since(t0);
  return s;
}

experiments::ComparisonConfig comparison_config() {
  experiments::ComparisonConfig cfg;
  cfg.base = synthetic_config();
  cfg.base.split.mode = SplitMode::TrainValTest;
  cfg.clusters = 100;
  cfg.seeds = {0, 1, 2};
  for (const auto& spec : ml::default_classifier_grid(0)) {
    if (const auto* m = std::get_if<ml::MlpSpec>(&spec); m && m->options.hidden != 60) continue;
    cfg.candidates.push_back(spec);
  }
  return cfg;
}

experiments::ComparisonResult run_comparison(unsigned threads) {
  parallel::set_max_threads(threads);
  return experiments::method_comparison(fixtures::synthetic_set(), comparison_config());
}

Outcome criterion1(const Synthetic& s) {
  const double acc = s.report.accuracy();
  return {acc >= 0.80 && s.seconds <= 600.0,
          fmt("accuracy %.4f (chance 0.20), %.1f s single-threaded", acc, s.seconds)};
}

Outcome criterion2(const experiments::ComparisonResult& r) {
  const double chance = 1.0 / 5.0;
  bool ok = r.cells.size() == 9 && r.feature_counts == std::vector<std::size_t>{100, 256, 24};
  std::string table;
  for (const auto& cell : r.cells) {
    ok = ok && cell.applicable && cell.seed_accuracies.size() == 3;
    for (double a : cell.seed_accuracies) ok = ok && a >= chance && a <= 1.0;
    table += fmt(" %.3f", cell.accuracy);
  }
  return {ok, fmt("features {%zu,%zu,%zu}, cells", r.feature_counts.at(0), r.feature_counts.at(1),
                  r.feature_counts.at(2)) + table};
}

// One trial per seed t: instance drawn from mt19937_64(t), k-means seeded with t.
Outcome criterion3() {
  const auto trial = [](std::uint64_t t, std::size_t& violations) {
    std::mt19937_64 gen(t);
    const std::size_t n = 2 + gen() % 7;
    const std::size_t k = 1 + gen() % std::min<std::size_t>(n, 3);
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(static_cast<double>(gen() % 1000) / 10.0);
    clustering::ClusteringConfig cfg;
    cfg.k = k;
    cfg.rng_seed = t;
    const auto r = clustering::kmeans(clustering::PointSet(1, xs), cfg);
    for (std::size_t i = 1; i < r.wcss_history.size(); ++i)
      violations += r.wcss_history[i] > r.wcss_history[i - 1];
    const double best = oracle::optimal_wcss_1d(xs, k);
    return std::abs(r.codebook.wcss - best) <= 1e-9 * std::max(1.0, best);
  };
  std::size_t optimal = 0, violations = 0, wide = 0, wide_violations = 0;
  for (std::uint64_t t = 0; t < 100; ++t) optimal += trial(t, violations);
  for (std::uint64_t t = 0; t < 1000; ++t) wide += trial(t, wide_violations);
  return {optimal >= 80 && violations == 0 && wide_violations == 0,
          fmt("optimal in %zu/100 trials (%zu/1000 over a wider run), %zu monotonicity violations",
              optimal, wide, violations + wide_violations)};
}

Outcome criterion4() {
  double pp = 0.0, uni = 0.0;
  for (std::uint64_t s = 0; s < 30; ++s) {
    Rng rng(500 + s);
    std::vector<double> v;
    for (int c = 0; c < 10; ++c)
      for (int i = 0; i < 30; ++i) {
        v.push_back(rng.normal(100.0 * (c % 5), 1.0));
        v.push_back(rng.normal(100.0 * (c / 5), 1.0));
      }
    const clustering::PointSet pts(2, std::move(v));
    clustering::ClusteringConfig cfg;
    cfg.k = 10;
    cfg.rng_seed = s;
    pp += clustering::kmeans(pts, cfg).codebook.wcss;
    uni += clustering::kmeans_from(pts, clustering::uniform_seed(pts, 10, s).centroids, cfg)
               .codebook.wcss;
  }
  pp /= 30;
  uni /= 30;
  return {pp < uni || std::abs(pp - uni) <= 1e-9,
          fmt("mean WCSS k-means++ %.3f, uniform %.3f", pp, uni)};
}

Outcome criterion5() {
  const GrayImage img = fixtures::blob(128, 128, 64, 64, 4.0);
  const sift::ScaleSpaceConfig cfg;
  const sift::ScalePyramid dog = sift::build_dog_pyramid(sift::build_gaussian_pyramid(img, cfg));
  std::vector<std::array<int, 4>> got;
  for (const auto& c : sift::find_candidates(dog)) got.push_back({c.octave, c.level, c.x, c.y});
  auto want = oracle::scan_extrema(dog);
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  std::size_t near = 0;
  for (const auto& kp : sift::detect_extrema(dog, cfg)) near += std::hypot(kp.x - 64, kp.y - 64) <= 2.0;
  return {got == want && near == 1,
          fmt("%zu candidates, oracle %zu, %s; %zu keypoints within 2 px", got.size(), want.size(),
              got == want ? "identical" : "different", near)};
}

GrayImage grating_with_blob(int size) {
  std::vector<float> v(static_cast<std::size_t>(size) * size);
  const double c = (size - 1) / 2.0;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double g = std::sin(2.0 * M_PI * (x * std::cos(0.4) + y * std::sin(0.4)) / 12.0);
      const double r2 = (x - c) * (x - c) + (y - c) * (y - c);
      v[static_cast<std::size_t>(y) * size + x] =
          static_cast<float>(0.35 + 0.12 * g + 0.45 * std::exp(-r2 / (2.0 * 25.0)));
    }
  return GrayImage(size, size, std::move(v));
}

double l2(const sift::KeypointDescriptor& a, const sift::KeypointDescriptor& b) {
  double s = 0.0;
  for (int i = 0; i < sift::kDescriptorLength; ++i) s += (a.bins[i] - b.bins[i]) * (a.bins[i] - b.bins[i]);
  return std::sqrt(s);
}

Outcome criterion6(const Synthetic& s) {
  const GrayImage img = grating_with_blob(129);
  const auto a = sift::extract_keypoints(img);
  const auto b = sift::extract_keypoints(fixtures::rotate90(img));
  std::size_t total = 0, bad = 0;
  const auto audit = [&](const std::vector<sift::KeypointDescriptor>& ds) {
    for (const auto& d : ds) {
      double n = 0.0;
      bool neg = false;
      for (float v : d.bins) {
        n += double(v) * v;
        neg = neg || v < 0.0f;
      }
      ++total;
      bad += neg || std::abs(std::sqrt(n) - 1.0) > 1e-6;
    }
  };
  for (const auto& im : s.corpus.images) audit(im.descriptors);
  audit(a);
  audit(b);

  double worst = 0.0;
  std::size_t compared = 0;
  for (const auto& da : a) {
    if (std::hypot(da.keypoint.x - 64, da.keypoint.y - 64) > 3.0) continue;
    const double rx = da.keypoint.y, ry = img.width() - 1 - da.keypoint.x;
    double best = 1e9;
    for (const auto& db : b)
      if (std::hypot(db.keypoint.x - rx, db.keypoint.y - ry) < 1.0 &&
          std::abs(std::log(db.keypoint.scale_sigma / da.keypoint.scale_sigma)) < 0.05)
        best = std::min(best, l2(da, db));
    worst = std::max(worst, best);
    ++compared;
  }
  return {bad == 0 && total > 0 && compared > 0 && worst <= 0.35,
          fmt("%zu/%zu descriptors unit-norm and non-negative; rotation L2 %.4f over %zu keypoints",
              total - bad, total, worst, compared)};
}

Outcome criterion7() {
  Rng rng(5);
  ml::SampleSet five(4, 3);
  for (int i = 0; i < 5; ++i) {
    std::vector<double> x(4);
    for (int d = 0; d < 4; ++d) x[d] = rng.normal(d == i % 3 ? 3.0 : 0.0, 1.0);
    five.add(x, i % 3);
  }
  ml::MlpModel m = ml::MlpModel::zeros(4, 6, 3);
  std::vector<double> p = m.flatten();
  for (double& v : p) v = rng.uniform(-1.0, 1.0);
  m.unflatten(p);
  const auto lg = ml::mlp_loss_and_gradient(m, five);
  const auto numeric = oracle::central_gradient(
      [&](const std::vector<double>& q) {
        ml::MlpModel t = m;
        t.unflatten(q);
        return ml::mlp_loss(t, five);
      },
      p, 1e-5);
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double denom = std::max({std::abs(lg.gradient[i]), std::abs(numeric[i]), 1e-8});
    worst = std::max(worst, std::abs(lg.gradient[i] - numeric[i]) / denom);
  }
  return {worst < 1e-4, fmt("max relative error %.2e over %zu parameters", worst, p.size())};
}

Outcome criterion8(const Synthetic& s) {
  const Partition part = split(s.corpus.dataset, s.cfg.split).at(0);
  const EncodedPartition enc = encode_partition(s.corpus, part, s.cfg);
  const ml::SampleSet train = enc.samples(s.corpus.dataset, enc.train_ids);
  std::size_t machines = 0, bad = 0;
  double worst_balance = 0.0;
  const auto audit = [&](const ml::SvmModel& m) {
    for (const auto& bm : m.machines) {
      ++machines;
      double balance = 0.0;
      for (std::size_t i = 0; i < bm.support_count(); ++i) {
        bad += bm.alpha[i] < 0.0 || bm.alpha[i] > m.C;
        balance += bm.alpha[i] * bm.y[i];
      }
      worst_balance = std::max(worst_balance, std::abs(balance));
    }
  };
  for (auto preset : {ml::KernelPreset::Linear, ml::KernelPreset::MediumGaussian,
                      ml::KernelPreset::CoarseGaussian, ml::KernelPreset::Quadratic,
                      ml::KernelPreset::Cubic})
    for (double C : {1.0, 10.0}) audit(ml::svm_train(train, ml::resolve_kernel(preset, train.dim()), C));

  ml::SampleSet xor_set(2, 2);
  xor_set.add(std::vector<double>{0, 0}, 0);
  xor_set.add(std::vector<double>{1, 1}, 0);
  xor_set.add(std::vector<double>{0, 1}, 1);
  xor_set.add(std::vector<double>{1, 0}, 1);
  const ml::SvmModel x = ml::svm_train(xor_set, ml::KernelSpec::rbf(1.0), 10.0);
  audit(x);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < xor_set.size(); ++i) correct += ml::svm_predict(x, xor_set.row(i)) == xor_set.label(i);
  return {bad == 0 && worst_balance < 1e-6 && correct == 4,
          fmt("%zu machines, %zu alphas outside [0, C], max |sum alpha y| %.2e; XOR %zu/4", machines,
              bad, worst_balance, correct)};
}

Outcome criterion9(const Synthetic& s, const experiments::ComparisonResult& cmp) {
  std::size_t runs = 0, passed = 0;
  const auto count = [&](const RunReport& r) {
    for (const auto& f : r.folds) {
      ++runs;
      passed += f.audit && f.audit->passed();
    }
  };
  count(s.report);
  PipelineConfig cfg = s.cfg;
  cfg.split.mode = SplitMode::KFold;
  count(run_pipeline(s.corpus, cfg));
  cfg.split.mode = SplitMode::TrainValTest;
  cfg.classifier = ml::parse_classifier("mlp-60");
  count(run_pipeline(s.corpus, cfg));
  std::size_t cells = 0, cells_passed = 0;
  for (const auto& cell : cmp.cells)
    if (cell.method == FeatureMethod::SiftBow) {
      ++cells;
      cells_passed += cell.audit_passed;
    }
  const auto& a = *s.report.folds.at(0).audit;
  return {runs == passed && cells == cells_passed && cells > 0,
          fmt("%zu/%zu pipeline runs and %zu/%zu comparison cells audited; hold-out run: %zu "
              "descriptors clustered, %zu in the training partition",
              passed, runs, cells_passed, cells, a.clustering_input_descriptors,
              a.training_descriptor_total)};
}

Outcome criterion10(const Synthetic& s1, const experiments::ComparisonResult& c1) {
  const Synthetic s4 = run_synthetic(4);
  const auto c4 = run_comparison(4);
  bool models = s1.report.folds.size() == s4.report.folds.size();
  for (std::size_t i = 0; models && i < s1.report.folds.size(); ++i)
    models = s1.report.folds[i].model_bytes == s4.report.folds[i].model_bytes;
  const bool metrics = s1.report.metrics_json() == s4.report.metrics_json();
  const bool table = c1.to_json() == c4.to_json();
  return {models && metrics && table,
          fmt("1 vs 4 threads: run metrics %s, model bytes %s, comparison %s",
              metrics ? "identical" : "differ", models ? "identical" : "differ",
              table ? "identical" : "differs")};
}

}  // namespace

int main() {
  int failures = 0;
  const auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  };

  const Synthetic s = run_synthetic(1);
  const experiments::ComparisonResult cmp = run_comparison(1);

  report(1, "end-to-end synthetic run", [&] { return criterion1(s); });
  report(2, "method comparison grid", [&] { return criterion2(cmp); });
  report(3, "k-means oracle equivalence", criterion3);
  report(4, "k-means++ quality", criterion4);
  report(5, "SIFT detector oracle", criterion5);
  report(6, "descriptor invariants", [&] { return criterion6(s); });
  report(7, "MLP gradient check", criterion7);
  report(8, "SVM KKT audit", [&] { return criterion8(s); });
  report(9, "leakage audit", [&] { return criterion9(s, cmp); });
  report(10, "determinism", [&] { return criterion10(s, cmp); });
  return failures == 0 ? 0 : 1;
}
