#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace siftwood {

enum class FeatureMethod { SiftBow, Lbp, Glcm };

std::string_view to_string(FeatureMethod m);
FeatureMethod parse_feature_method(std::string_view name);  // "sift", "sift-bow", "lbp", "glcm"

/// Fixed-length per-image feature. Histogram methods (SiftBow, Lbp) sum to 1.
struct FeatureVector {
  FeatureMethod method = FeatureMethod::SiftBow;
  std::vector<double> values;

  std::size_t length() const { return values.size(); }
};

}  // namespace siftwood
