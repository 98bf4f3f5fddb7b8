#include "siftwood/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <set>
#include <utility>

#include "json_convert.hpp"
#include "siftwood/bow.hpp"
#include "siftwood/errors.hpp"
#include "siftwood/formats.hpp"
#include "siftwood/model_io.hpp"
#include "siftwood/parallel.hpp"
#include "siftwood/rng.hpp"

#ifndef SIFTWOOD_VERSION
#define SIFTWOOD_VERSION "0.0.0"
#endif

namespace siftwood {

namespace {

constexpr std::uint64_t kCarveTag = 0xCA4E;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<std::size_t> sorted_union(std::span<const std::size_t> a,
                                      std::span<const std::size_t> b) {
  std::vector<std::size_t> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::string_view version() { return SIFTWOOD_VERSION; }

void ExtractionConfig::validate() const {
  sift.validate();
  glcm.validate();
  if (resize_width < 0 || resize_height < 0)
    throw InvalidArgument("resize dimensions must be non-negative");
  if ((resize_width == 0) != (resize_height == 0))
    throw InvalidArgument("resize width and height must both be 0 or both be positive");
}

ImageFeatures extract_image(const GrayImage& img, const ExtractionConfig& cfg) {
  ImageFeatures out;
  out.vector.method = cfg.method;
  switch (cfg.method) {
    case FeatureMethod::SiftBow:
      out.descriptors = sift::extract_keypoints(img, cfg.sift);
      break;
    case FeatureMethod::Lbp:
      out.vector = texture::lbp_histogram(img);
      break;
    case FeatureMethod::Glcm:
      out.vector = texture::glcm_feature_vector(img, cfg.glcm);
      break;
  }
  return out;
}

ImageFeatures extract_file(const std::filesystem::path& path, const ExtractionConfig& cfg) {
  const GrayImage img = load_gray(path, cfg.resize_width, cfg.resize_height);
  try {
    return extract_image(img, cfg);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

Corpus extract_corpus(const Dataset& dataset, const ExtractionConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  Corpus corpus{dataset, cfg, std::vector<ImageFeatures>(dataset.size()), 0.0};
  parallel::parallel_for(dataset.size(), [&](std::size_t i) {
    corpus.images[i] = extract_file(dataset.items[i].path, cfg);
  });
  corpus.seconds = seconds_since(start);
  return corpus;
}

void PipelineConfig::validate() const {
  extraction.validate();
  split.validate();
  if (extraction.method == FeatureMethod::SiftBow) clustering_config().validate();
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    throw InvalidArgument("validation_fraction must lie in (0, 1)");
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ml::KnnSpec>) {
          if (s.k < 1) throw InvalidArgument("k-NN k must be at least 1");
        } else if constexpr (std::is_same_v<T, ml::SvmSpec>) {
          if (!(s.C > 0.0)) throw InvalidArgument("SVM C must be positive");
          if (!(s.smo.tolerance > 0.0)) throw InvalidArgument("SMO tolerance must be positive");
        } else {
          if (s.options.hidden < 1) throw InvalidArgument("MLP hidden size must be positive");
          if (!(s.options.learning_rate > 0.0))
            throw InvalidArgument("MLP learning rate must be positive");
          if (s.options.momentum < 0.0 || s.options.momentum >= 1.0)
            throw InvalidArgument("MLP momentum must lie in [0, 1)");
          if (s.options.max_epochs < 1) throw InvalidArgument("MLP max_epochs must be positive");
        }
      },
      classifier);
}

bool PipelineConfig::standardize_for(FeatureMethod method, ml::Family family) const {
  if (standardize) return *standardize;
  return method == FeatureMethod::Glcm || family != ml::Family::Knn;
}

clustering::ClusteringConfig PipelineConfig::clustering_config() const {
  return {clusters, kmeans_max_iterations, kmeans_tolerance, kmeans_seed};
}

ml::SampleSet EncodedPartition::samples(const Dataset& dataset,
                                        std::span<const std::size_t> ids) const {
  ml::SampleSet set(feature_length, static_cast<int>(dataset.class_count()));
  for (std::size_t id : ids) {
    if (features.at(id).empty()) throw InvalidArgument("image " + dataset.image_id(id) + " was not encoded");
    set.add(features[id], dataset.items[id].class_id);
  }
  return set;
}

EncodedPartition encode_partition(const Corpus& corpus, const Partition& partition,
                                  const PipelineConfig& cfg) {
  const Dataset& ds = corpus.dataset;
  if (corpus.images.size() != ds.size())
    throw InvalidArgument("corpus does not match its dataset");

  EncodedPartition enc;
  enc.features.resize(ds.size());
  const bool sift = corpus.config.method == FeatureMethod::SiftBow;
  auto keep = [&](std::span<const std::size_t> ids, std::vector<std::size_t>& out) {
    for (std::size_t id : ids) {
      if (id >= ds.size()) throw InvalidArgument("partition refers to an unknown image");
      if (sift && corpus.images[id].descriptors.empty()) enc.excluded.push_back(id);
      else out.push_back(id);
    }
  };
  keep(partition.train, enc.train_ids);
  keep(partition.validation, enc.validation_ids);
  keep(partition.test, enc.test_ids);
  std::sort(enc.excluded.begin(), enc.excluded.end());

  if (!sift) {
    enc.feature_length = 0;
    for (const auto& ids : {enc.train_ids, enc.validation_ids, enc.test_ids}) {
      for (std::size_t id : ids) {
        const auto& v = corpus.images[id].vector.values;
        if (enc.feature_length == 0) enc.feature_length = v.size();
        if (v.size() != enc.feature_length)
          throw InvalidArgument("inconsistent feature length at " + ds.image_id(id));
        enc.features[id] = v;
      }
    }
    return enc;
  }

  // Only training-role images feed k-means.
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::size_t> pool_ids = sorted_union(enc.train_ids, enc.validation_ids);
  ClusteringAudit audit;
  clustering::PointSet pool(sift::kDescriptorLength);
  std::size_t pool_size = 0;
  for (std::size_t id : pool_ids) pool_size += corpus.images[id].descriptors.size();
  pool.reserve(pool_size);
  for (std::size_t id : pool_ids) {
    bow::append_descriptors(pool, corpus.images[id].descriptors);
    audit.clustering_images.push_back(id);
  }
  audit.clustering_input_descriptors = pool.size();
  for (const auto& ids : {partition.train, partition.validation})
    for (std::size_t id : ids) audit.training_descriptor_total += corpus.images[id].descriptors.size();
  const std::set<std::size_t> test_set(partition.test.begin(), partition.test.end());
  for (std::size_t id : audit.clustering_images) audit.test_images_in_clustering += test_set.count(id);

  if (cfg.clusters > pool.size())
    throw InvalidArgument("k=" + std::to_string(cfg.clusters) + " exceeds the " +
                          std::to_string(pool.size()) + " training descriptors available");
  clustering::KMeansResult km = clustering::kmeans(pool, cfg.clustering_config());
  enc.seeding_degenerate = km.seeding_degenerate;
  // The codebook file stores 32-bit floats; encode with exactly what a reader sees.
  enc.codebook = io::decode_codebook(io::encode_codebook(km.codebook));
  enc.audit = std::move(audit);
  enc.feature_length = enc.codebook->k();

  const std::set<std::size_t> train_role(pool_ids.begin(), pool_ids.end());
  std::vector<std::size_t> all = pool_ids;
  all.insert(all.end(), enc.test_ids.begin(), enc.test_ids.end());
  parallel::parallel_for(all.size(), [&](std::size_t i) {
    const std::size_t id = all[i];
    const auto& d = corpus.images[id].descriptors;
    enc.features[id] = train_role.count(id) != 0
                           ? bow::encode_histogram(d, *enc.codebook).values
                           : bow::encode_with_training_codebook(d, *enc.codebook).values;
  });
  enc.clustering_seconds = seconds_since(start);
  return enc;
}

PipelineModel fit_model(const Corpus& corpus, const EncodedPartition& encoded,
                        const ml::ClassifierSpec& spec, const PipelineConfig& cfg) {
  const Dataset& ds = corpus.dataset;
  const ml::Family family = ml::family_of(spec);
  std::vector<std::size_t> train_ids;
  std::vector<std::size_t> validation_ids;
  if (family == ml::Family::Mlp) {
    train_ids = encoded.train_ids;
    validation_ids = encoded.validation_ids;
    if (validation_ids.empty()) {
      Partition carved = carve_validation(ds, Partition{train_ids, {}, {}}, cfg.validation_fraction,
                                          derive_seed(cfg.split.seed, kCarveTag));
      train_ids = std::move(carved.train);
      validation_ids = std::move(carved.validation);
    }
  } else {
    train_ids = sorted_union(encoded.train_ids, encoded.validation_ids);
  }

  const ml::SampleSet train = encoded.samples(ds, train_ids);
  const ml::SampleSet validation = encoded.samples(ds, validation_ids);
  ml::TrainOptions opts;
  opts.standardize = cfg.standardize_for(corpus.config.method, family);

  PipelineModel model;
  model.extraction = corpus.config;
  model.class_names = ds.classes;
  model.codebook = encoded.codebook;
  model.classifier = ml::train_classifier(spec, train, validation, opts);
  return io::decode_model(io::encode_model(model));
}

std::vector<double> model_features(const PipelineModel& model, const ImageFeatures& raw) {
  if (model.extraction.method == FeatureMethod::SiftBow) {
    if (!model.codebook) throw ModelMismatch("sift-bow model without a codebook");
    return bow::encode_with_training_codebook(raw.descriptors, *model.codebook).values;
  }
  if (raw.vector.method != model.extraction.method)
    throw ModelMismatch("features were extracted with " + std::string(to_string(raw.vector.method)) +
                        " but the model expects " +
                        std::string(to_string(model.extraction.method)));
  return raw.vector.values;
}

ConfusionMatrix evaluate(const PipelineModel& model, const ml::SampleSet& test) {
  ConfusionMatrix cm(model.class_names.size());
  std::vector<int> predicted(test.size());
  parallel::parallel_for(test.size(), [&](std::size_t i) {
    predicted[i] = ml::predict(model.classifier, test.row(i));
  });
  for (std::size_t i = 0; i < test.size(); ++i) cm.add(test.label(i), predicted[i]);
  return cm;
}

bool RunReport::leakage_audit_passed() const {
  for (const auto& f : folds)
    if (f.audit && !f.audit->passed()) return false;
  return true;
}

RunReport run_pipeline(const Corpus& corpus, const PipelineConfig& cfg) {
  cfg.validate();
  if (detail::to_json(corpus.config) != detail::to_json(cfg.extraction))
    throw InvalidArgument("corpus was extracted with a different extraction config");

  const Dataset& ds = corpus.dataset;
  RunReport report;
  report.config = cfg;
  report.software_version = std::string(version());
  report.class_names = ds.classes;
  report.confusion = ConfusionMatrix(ds.class_count());
  report.timings.extraction = corpus.seconds;

  std::set<std::size_t> excluded;
  const std::vector<Partition> partitions = split(ds, cfg.split);
  for (const Partition& p : partitions) {
    EncodedPartition enc = encode_partition(corpus, p, cfg);
    report.timings.clustering += enc.clustering_seconds;
    excluded.insert(enc.excluded.begin(), enc.excluded.end());
    report.feature_length = enc.feature_length;
    if (enc.seeding_degenerate)
      report.warnings.push_back("k-means++ seeding fell back to uniform draws (duplicate descriptors)");

    auto t = std::chrono::steady_clock::now();
    PipelineModel model = fit_model(corpus, enc, cfg.classifier, cfg);
    report.timings.training += seconds_since(t);

    t = std::chrono::steady_clock::now();
    FoldReport fold;
    fold.confusion = evaluate(model, enc.samples(ds, enc.test_ids));
    report.timings.evaluation += seconds_since(t);

    fold.audit = enc.audit;
    if (enc.codebook) {
      fold.clustering_iterations = enc.codebook->iterations;
      fold.clustering_wcss = enc.codebook->wcss;
    }
    fold.test_count = enc.test_ids.size();
    fold.train_count = enc.train_ids.size();
    fold.validation_count = enc.validation_ids.size();
    fold.model_bytes = io::encode_model(model);
    fold.model_digest = fnv1a_hex(fold.model_bytes);
    report.confusion.merge(fold.confusion);
    report.folds.push_back(std::move(fold));
  }
  for (std::size_t id : excluded) report.excluded_images.push_back(ds.image_id(id));
  if (!report.excluded_images.empty())
    report.warnings.push_back(std::to_string(report.excluded_images.size()) +
                              " image(s) produced no keypoints and were excluded");
  std::sort(report.warnings.begin(), report.warnings.end());
  report.warnings.erase(std::unique(report.warnings.begin(), report.warnings.end()),
                        report.warnings.end());
  return report;
}

RunReport run_pipeline(const Dataset& dataset, const PipelineConfig& cfg) {
  cfg.validate();
  return run_pipeline(extract_corpus(dataset, cfg.extraction), cfg);
}

std::string fnv1a_hex(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace siftwood
