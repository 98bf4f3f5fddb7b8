#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "siftwood/pipeline.hpp"

namespace siftwood::experiments {

/// One grid cell. Inapplicable cells (k larger than the descriptor pool,
/// k-NN with k above the training count) carry a note instead of an accuracy.
struct Cell {
  FeatureMethod method = FeatureMethod::SiftBow;
  std::size_t clusters = 0;  // sift-bow only
  std::string classifier;    // spec name, or the selected name per seed
  std::size_t feature_length = 0;
  bool applicable = true;
  std::string note;
  double accuracy = 0.0;  // mean over seeds
  std::vector<double> seed_accuracies;
  std::vector<std::string> selected;  // chosen configuration per seed (comparison)
  bool audit_passed = true;
};

struct SweepConfig {
  PipelineConfig base;  // extraction must be sift-bow; clusters/classifier are overridden
  std::vector<std::size_t> clusters{250, 300, 350, 400};
  std::vector<ml::ClassifierSpec> classifiers;  // empty: knn-fine, svm-linear, mlp-100
};

struct SweepResult {
  SweepConfig config;
  std::vector<std::string> classifier_names;
  std::vector<Cell> cells;  // row-major: clusters x classifiers

  const Cell& at(std::size_t k_index, std::size_t classifier_index) const {
    return cells[k_index * classifier_names.size() + classifier_index];
  }
  std::string to_json() const;
  std::string to_table() const;
};

/// Accuracy over cluster counts x classifiers on one split. The codebook for a
/// given k is shared by every classifier of that row.
SweepResult cluster_sweep(const Corpus& sift_corpus, const SweepConfig& cfg);
SweepResult cluster_sweep(const Dataset& dataset, const SweepConfig& cfg);

struct ComparisonConfig {
  PipelineConfig base;  // split defaults to train-val-test below
  std::size_t clusters = 300;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::vector<FeatureMethod> methods{FeatureMethod::SiftBow, FeatureMethod::Lbp,
                                     FeatureMethod::Glcm};
  std::vector<ml::ClassifierSpec> candidates;  // empty: default_classifier_grid()

  ComparisonConfig();
};

struct ComparisonResult {
  ComparisonConfig config;
  std::vector<ml::Family> families{ml::Family::Knn, ml::Family::Svm, ml::Family::Mlp};
  std::vector<Cell> cells;  // row-major: methods x families
  std::vector<std::size_t> feature_counts;  // per method

  const Cell& at(std::size_t method_index, std::size_t family_index) const {
    return cells[method_index * families.size() + family_index];
  }
  std::string to_json() const;
  std::string to_table() const;
};

/// Per seed: split, then for every method pick each family's best candidate by
/// validation accuracy (trained on the training images only), refit it on the
/// full training role and score it on the test images. Cells report the mean
/// test accuracy over seeds.
ComparisonResult method_comparison(const Dataset& dataset, const ComparisonConfig& cfg);

}  // namespace siftwood::experiments
