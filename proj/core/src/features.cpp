#include "siftwood/features.hpp"

#include "siftwood/errors.hpp"

namespace siftwood {

std::string_view to_string(FeatureMethod m) {
  switch (m) {
    case FeatureMethod::SiftBow:
      return "sift-bow";
    case FeatureMethod::Lbp:
      return "lbp";
    case FeatureMethod::Glcm:
      return "glcm";
  }
  return "unknown";
}

FeatureMethod parse_feature_method(std::string_view name) {
  if (name == "sift" || name == "sift-bow") return FeatureMethod::SiftBow;
  if (name == "lbp") return FeatureMethod::Lbp;
  if (name == "glcm") return FeatureMethod::Glcm;
  throw InvalidArgument("unknown feature method '" + std::string(name) +
                        "' (expected sift, lbp or glcm)");
}

}  // namespace siftwood
