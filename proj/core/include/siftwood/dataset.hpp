#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace siftwood {

struct ImageItem {
  int class_id = 0;
  std::filesystem::path path;
};

/// Directory-per-class image collection. Items are ordered by class name and
/// then by file name; an item's position is its image id.
struct Dataset {
  std::filesystem::path root;
  std::vector<std::string> classes;
  std::vector<ImageItem> items;

  std::size_t class_count() const { return classes.size(); }
  std::size_t size() const { return items.size(); }
  std::vector<std::size_t> count_per_class() const;
  std::string image_id(std::size_t index) const;  // "<class>/<file name>"
};

/// Loads root/<class>/<image>. Hidden entries are skipped. Throws IoError for
/// a missing root or an empty class directory and FormatError for a file that
/// is not PNG or JPEG.
Dataset load_dataset(const std::filesystem::path& root);

enum class SplitMode { TrainTest, TrainValTest, KFold };

/// Stratified split. TrainTest is 80/20 and TrainValTest is 60/20/20 per
/// class; both draw the same test set for a given seed, so the TrainTest
/// training set is the union of TrainValTest's training and validation sets.
struct SplitSpec {
  SplitMode mode = SplitMode::TrainTest;
  std::size_t folds = 5;
  std::uint64_t seed = 0;

  void validate() const;
};

std::string to_string(SplitMode m);
SplitMode parse_split_mode(const std::string& name);  // "train-test", "train-val-test", "k-fold"

/// Image ids per role. Validation is empty for TrainTest and KFold.
struct Partition {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// One partition for the hold-out modes, `folds` partitions for KFold.
/// Throws InvalidArgument when a class is too small for the requested split.
std::vector<Partition> split(const Dataset& dataset, const SplitSpec& spec);

/// Moves round(fraction * n_c) of each class's training images (at least one,
/// never all) to validation, choosing them with `seed`.
Partition carve_validation(const Dataset& dataset, Partition p, double fraction,
                           std::uint64_t seed);

/// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t classes);

  void add(int truth, int predicted);
  void merge(const ConfusionMatrix& other);

  std::size_t classes() const { return classes_; }
  std::size_t count(int truth, int predicted) const;
  std::size_t total() const;
  std::size_t correct() const;
  double accuracy() const;
  std::vector<double> recall() const;  // per class; 0 for classes without samples
  const std::vector<std::size_t>& counts() const { return counts_; }

 private:
  std::size_t classes_ = 0;
  std::vector<std::size_t> counts_;
};

}  // namespace siftwood
