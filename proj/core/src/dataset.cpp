#include "siftwood/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "siftwood/errors.hpp"
#include "siftwood/image.hpp"
#include "siftwood/rng.hpp"

namespace fs = std::filesystem;

namespace siftwood {

std::vector<std::size_t> Dataset::count_per_class() const {
  std::vector<std::size_t> out(classes.size(), 0);
  for (const auto& it : items) ++out[it.class_id];
  return out;
}

std::string Dataset::image_id(std::size_t index) const {
  const auto& it = items.at(index);
  return classes[it.class_id] + "/" + it.path.filename().string();
}

namespace {

bool hidden(const fs::path& p) {
  const auto name = p.filename().string();
  return !name.empty() && name.front() == '.';
}

ImageFormat sniff_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::uint8_t head[8] = {};
  in.read(reinterpret_cast<char*>(head), sizeof head);
  return sniff_format({head, static_cast<std::size_t>(in.gcount())});
}

}  // namespace

Dataset load_dataset(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError("dataset root is not a directory: " + root.string());

  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory() && !hidden(entry.path())) class_dirs.push_back(entry.path());
  std::sort(class_dirs.begin(), class_dirs.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

  Dataset ds;
  ds.root = root;
  for (const auto& dir : class_dirs) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && !hidden(entry.path())) files.push_back(entry.path());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    if (files.empty()) throw IoError("class directory is empty: " + dir.string());
    const int id = static_cast<int>(ds.classes.size());
    ds.classes.push_back(dir.filename().string());
    for (const auto& f : files) {
      if (sniff_file(f) == ImageFormat::Unknown)
        throw FormatError("not a PNG or JPEG image: " + f.string());
      ds.items.push_back({id, f});
    }
  }
  if (ds.classes.size() < 2)
    throw IoError("dataset needs at least two class directories: " + root.string());
  return ds;
}

void SplitSpec::validate() const {
  if (mode == SplitMode::KFold && folds < 2) throw InvalidArgument("k-fold needs at least 2 folds");
}

std::string to_string(SplitMode m) {
  switch (m) {
    case SplitMode::TrainTest:
      return "train-test";
    case SplitMode::TrainValTest:
      return "train-val-test";
    case SplitMode::KFold:
      return "k-fold";
  }
  return "unknown";
}

SplitMode parse_split_mode(const std::string& name) {
  if (name == "train-test") return SplitMode::TrainTest;
  if (name == "train-val-test") return SplitMode::TrainValTest;
  if (name == "k-fold") return SplitMode::KFold;
  throw InvalidArgument("unknown split mode '" + name +
                        "' (expected train-test, train-val-test or k-fold)");
}

namespace {

std::vector<std::vector<std::size_t>> shuffled_by_class(const Dataset& ds, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> by_class(ds.class_count());
  for (std::size_t i = 0; i < ds.items.size(); ++i) by_class[ds.items[i].class_id].push_back(i);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    Rng rng(derive_seed(seed, c));
    shuffle(std::span<std::size_t>(by_class[c]), rng);
  }
  return by_class;
}

std::size_t share(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
}

}  // namespace

std::vector<Partition> split(const Dataset& ds, const SplitSpec& spec) {
  spec.validate();
  const auto by_class = shuffled_by_class(ds, spec.seed);

  if (spec.mode == SplitMode::KFold) {
    std::vector<Partition> folds(spec.folds);
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      if (by_class[c].size() < spec.folds)
        throw InvalidArgument("class '" + ds.classes[c] + "' has " +
                              std::to_string(by_class[c].size()) + " images, fewer than " +
                              std::to_string(spec.folds) + " folds");
      for (std::size_t i = 0; i < by_class[c].size(); ++i) {
        const std::size_t fold = i % spec.folds;
        for (std::size_t f = 0; f < spec.folds; ++f)
          (f == fold ? folds[f].test : folds[f].train).push_back(by_class[c][i]);
      }
    }
    for (auto& p : folds) {
      std::sort(p.train.begin(), p.train.end());
      std::sort(p.test.begin(), p.test.end());
    }
    return folds;
  }

  Partition p;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    const auto& ids = by_class[c];
    const std::size_t n = ids.size();
    const std::size_t n_test = share(n, 0.2);
    const std::size_t n_val = spec.mode == SplitMode::TrainValTest ? share(n, 0.2) : 0;
    if (n_test < 1 || (spec.mode == SplitMode::TrainValTest && n_val < 1) ||
        n_test + n_val >= n)
      throw InvalidArgument("class '" + ds.classes[c] + "' has " + std::to_string(n) +
                            " images, too few for a " + to_string(spec.mode) + " split");
    for (std::size_t i = 0; i < n; ++i) {
      if (i < n_test) p.test.push_back(ids[i]);
      else if (i < n_test + n_val) p.validation.push_back(ids[i]);
      else p.train.push_back(ids[i]);
    }
  }
  std::sort(p.train.begin(), p.train.end());
  std::sort(p.validation.begin(), p.validation.end());
  std::sort(p.test.begin(), p.test.end());
  return {p};
}

Partition carve_validation(const Dataset& ds, Partition p, double fraction, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> by_class(ds.class_count());
  for (std::size_t id : p.train) by_class[ds.items.at(id).class_id].push_back(id);
  p.train.clear();
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& ids = by_class[c];
    if (ids.empty()) continue;
    Rng rng(derive_seed(seed, 0x5A17 + c));
    shuffle(std::span<std::size_t>(ids), rng);
    std::size_t n_val = std::max<std::size_t>(1, share(ids.size(), fraction));
    if (n_val >= ids.size()) n_val = ids.size() > 1 ? ids.size() - 1 : 0;
    for (std::size_t i = 0; i < ids.size(); ++i)
      (i < n_val ? p.validation : p.train).push_back(ids[i]);
  }
  std::sort(p.train.begin(), p.train.end());
  std::sort(p.validation.begin(), p.validation.end());
  return p;
}

ConfusionMatrix::ConfusionMatrix(std::size_t classes)
    : classes_(classes), counts_(classes * classes, 0) {}

void ConfusionMatrix::add(int truth, int predicted) {
  if (truth < 0 || predicted < 0 || static_cast<std::size_t>(truth) >= classes_ ||
      static_cast<std::size_t>(predicted) >= classes_)
    throw InvalidArgument("ConfusionMatrix: class id out of range");
  ++counts_[static_cast<std::size_t>(truth) * classes_ + static_cast<std::size_t>(predicted)];
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.classes_ != classes_) throw InvalidArgument("ConfusionMatrix: size mismatch");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

std::size_t ConfusionMatrix::count(int truth, int predicted) const {
  return counts_.at(static_cast<std::size_t>(truth) * classes_ + static_cast<std::size_t>(predicted));
}

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

std::size_t ConfusionMatrix::correct() const {
  std::size_t t = 0;
  for (std::size_t i = 0; i < classes_; ++i) t += counts_[i * classes_ + i];
  return t;
}

double ConfusionMatrix::accuracy() const {
  const std::size_t t = total();
  return t == 0 ? 0.0 : static_cast<double>(correct()) / static_cast<double>(t);
}

std::vector<double> ConfusionMatrix::recall() const {
  std::vector<double> out(classes_, 0.0);
  for (std::size_t i = 0; i < classes_; ++i) {
    std::size_t row = 0;
    for (std::size_t j = 0; j < classes_; ++j) row += counts_[i * classes_ + j];
    if (row > 0) out[i] = static_cast<double>(counts_[i * classes_ + i]) / static_cast<double>(row);
  }
  return out;
}

}  // namespace siftwood
