#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "siftwood/classifier.hpp"
#include "siftwood/clustering.hpp"
#include "siftwood/dataset.hpp"
#include "siftwood/features.hpp"
#include "siftwood/sift.hpp"
#include "siftwood/texture.hpp"

namespace siftwood {

/// How one image becomes features: decode, grayscale, optional resize, then
/// the chosen extractor.
struct ExtractionConfig {
  FeatureMethod method = FeatureMethod::SiftBow;
  sift::ScaleSpaceConfig sift;
  texture::GlcmConfig glcm;
  int resize_width = 600;  // 0 x 0 keeps the native size
  int resize_height = 400;

  void validate() const;
};

/// Raw per-image extraction output. SIFT keeps descriptors (the histogram
/// needs a codebook); LBP and GLCM produce their vector directly.
struct ImageFeatures {
  std::vector<sift::KeypointDescriptor> descriptors;
  FeatureVector vector;
};

ImageFeatures extract_image(const GrayImage& img, const ExtractionConfig& cfg);
ImageFeatures extract_file(const std::filesystem::path& path, const ExtractionConfig& cfg);

struct Corpus {
  Dataset dataset;
  ExtractionConfig config;
  std::vector<ImageFeatures> images;  // parallel to dataset.items
  double seconds = 0.0;
};

/// Extracts every image, in parallel across images.
Corpus extract_corpus(const Dataset& dataset, const ExtractionConfig& cfg);

struct PipelineConfig {
  ExtractionConfig extraction;
  std::size_t clusters = 300;
  std::size_t kmeans_max_iterations = 300;
  double kmeans_tolerance = 1e-6;
  std::uint64_t kmeans_seed = 0;
  ml::ClassifierSpec classifier = ml::KnnSpec{};
  SplitSpec split;
  // Unset: standardize GLCM features and MLP inputs, leave the rest raw.
  std::optional<bool> standardize;
  // Share of each class's training images held out for MLP early stopping when
  // the split itself has no validation set.
  double validation_fraction = 0.25;

  void validate() const;
  bool standardize_for(FeatureMethod method, ml::Family family) const;
  clustering::ClusteringConfig clustering_config() const;
};

/// Everything needed to classify a new image.
struct PipelineModel {
  ExtractionConfig extraction;
  std::vector<std::string> class_names;
  std::optional<clustering::Codebook> codebook;
  ml::TrainedModel classifier;
};

/// Proof that only training-partition descriptors reached k-means.
struct ClusteringAudit {
  std::vector<std::size_t> clustering_images;
  std::size_t clustering_input_descriptors = 0;  // rows handed to k-means
  std::size_t training_descriptor_total = 0;     // recount over the training partition
  std::size_t test_images_in_clustering = 0;

  bool passed() const {
    return clustering_input_descriptors == training_descriptor_total &&
           test_images_in_clustering == 0;
  }
};

struct EncodedPartition {
  std::size_t feature_length = 0;
  // Indexed by image id; empty for images outside the partition or excluded.
  std::vector<std::vector<double>> features;
  std::vector<std::size_t> train_ids;
  std::vector<std::size_t> validation_ids;
  std::vector<std::size_t> test_ids;
  std::vector<std::size_t> excluded;  // images without keypoints
  std::optional<clustering::Codebook> codebook;
  std::optional<ClusteringAudit> audit;
  bool seeding_degenerate = false;
  double clustering_seconds = 0.0;

  ml::SampleSet samples(const Dataset& dataset, std::span<const std::size_t> ids) const;
};

/// For SIFT: pools the descriptors of the partition's training and validation
/// images, learns the codebook, and encodes every image with it. Test images
/// are encoded only. Throws InvalidArgument when k exceeds the pooled
/// descriptor count.
EncodedPartition encode_partition(const Corpus& corpus, const Partition& partition,
                                  const PipelineConfig& cfg);

/// Trains on the encoded partition and returns the model as it would be read
/// back from disk. k-NN and SVM train on training plus validation images; the
/// MLP uses validation for early stopping, carving it from the training images
/// when the partition has none.
PipelineModel fit_model(const Corpus& corpus, const EncodedPartition& encoded,
                        const ml::ClassifierSpec& spec, const PipelineConfig& cfg);

/// Encodes one image's raw features with the model's codebook (if any).
std::vector<double> model_features(const PipelineModel& model, const ImageFeatures& raw);

ConfusionMatrix evaluate(const PipelineModel& model, const ml::SampleSet& test);

struct FoldReport {
  ConfusionMatrix confusion;
  std::optional<ClusteringAudit> audit;
  std::size_t clustering_iterations = 0;
  double clustering_wcss = 0.0;
  std::size_t train_count = 0;
  std::size_t validation_count = 0;
  std::size_t test_count = 0;
  std::vector<std::uint8_t> model_bytes;
  std::string model_digest;  // FNV-1a 64 of model_bytes, hex
};

struct StageTimings {
  double extraction = 0.0;
  double clustering = 0.0;
  double training = 0.0;
  double evaluation = 0.0;
};

struct RunReport {
  PipelineConfig config;
  std::string software_version;
  std::vector<std::string> class_names;
  std::size_t feature_length = 0;
  std::vector<FoldReport> folds;
  ConfusionMatrix confusion;  // summed over folds
  std::vector<std::string> excluded_images;
  std::vector<std::string> warnings;
  StageTimings timings;

  double accuracy() const { return confusion.accuracy(); }
  bool leakage_audit_passed() const;

  /// Deterministic part of the report (no timings).
  std::string metrics_json() const;
  std::string to_json() const;
};

/// decode -> grayscale -> resize -> extract -> (pool training descriptors ->
/// k-means++ -> k-means -> encode) -> train -> evaluate, for every partition
/// of cfg.split.
RunReport run_pipeline(const Dataset& dataset, const PipelineConfig& cfg);
RunReport run_pipeline(const Corpus& corpus, const PipelineConfig& cfg);

std::string_view version();

std::string fnv1a_hex(std::span<const std::uint8_t> bytes);

std::string pipeline_config_to_json(const PipelineConfig& cfg);
PipelineConfig pipeline_config_from_json(const std::string& text);

}  // namespace siftwood
