#include <string>

#include "json_convert.hpp"
#include "siftwood/errors.hpp"

namespace siftwood::detail {

namespace {

template <typename T>
void read_opt(const Json& j, const char* key, T& out) {
  if (!j.is_object()) throw InvalidArgument("config: expected an object");
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument(std::string("config: field '") + key + "' has the wrong type");
  }
}

void reject_unknown(const Json& j, std::initializer_list<const char*> keys, const char* where) {
  for (const auto& [name, value] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || name == k;
    if (!known) throw InvalidArgument(std::string("config: unknown field '") + name + "' in " + where);
  }
}

}  // namespace

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(what + ": " + e.what());
  }
}

Json to_json(const ExtractionConfig& cfg) {
  return Json{{"method", std::string(to_string(cfg.method))},
              {"resize_width", cfg.resize_width},
              {"resize_height", cfg.resize_height},
              {"sift",
               {{"base_sigma", cfg.sift.base_sigma},
                {"intervals_per_octave", cfg.sift.intervals_per_octave},
                {"octave_count", cfg.sift.octave_count},
                {"contrast_threshold", cfg.sift.contrast_threshold},
                {"edge_ratio", cfg.sift.edge_ratio}}},
              {"glcm", {{"gray_levels", cfg.glcm.gray_levels}, {"distance", cfg.glcm.distance}}}};
}

ExtractionConfig extraction_from_json(const Json& j) {
  reject_unknown(j, {"method", "resize_width", "resize_height", "sift", "glcm"}, "extraction");
  ExtractionConfig cfg;
  std::string method = std::string(to_string(cfg.method));
  read_opt(j, "method", method);
  cfg.method = parse_feature_method(method);
  read_opt(j, "resize_width", cfg.resize_width);
  read_opt(j, "resize_height", cfg.resize_height);
  if (j.contains("sift")) {
    const Json& s = j.at("sift");
    reject_unknown(s,
                   {"base_sigma", "intervals_per_octave", "octave_count", "contrast_threshold",
                    "edge_ratio"},
                   "sift");
    read_opt(s, "base_sigma", cfg.sift.base_sigma);
    read_opt(s, "intervals_per_octave", cfg.sift.intervals_per_octave);
    read_opt(s, "octave_count", cfg.sift.octave_count);
    read_opt(s, "contrast_threshold", cfg.sift.contrast_threshold);
    read_opt(s, "edge_ratio", cfg.sift.edge_ratio);
  }
  if (j.contains("glcm")) {
    const Json& g = j.at("glcm");
    reject_unknown(g, {"gray_levels", "distance"}, "glcm");
    read_opt(g, "gray_levels", cfg.glcm.gray_levels);
    read_opt(g, "distance", cfg.glcm.distance);
  }
  return cfg;
}

Json to_json(const ml::ClassifierSpec& spec) {
  Json j{{"name", ml::describe(spec)}, {"family", std::string(ml::to_string(ml::family_of(spec)))}};
  if (const auto* k = std::get_if<ml::KnnSpec>(&spec)) {
    j["k"] = k->k;
    j["weighting"] = k->weighting == ml::KnnWeighting::Uniform ? "uniform" : "inverse-distance";
  } else if (const auto* s = std::get_if<ml::SvmSpec>(&spec)) {
    j["kernel"] = std::string(ml::to_string(s->kernel));
    j["C"] = s->C;
    j["smo_tolerance"] = s->smo.tolerance;
    j["smo_max_iterations"] = s->smo.max_iterations;
  } else {
    const auto& o = std::get<ml::MlpSpec>(spec).options;
    j["hidden"] = o.hidden;
    j["rng_seed"] = o.rng_seed;
    j["learning_rate"] = o.learning_rate;
    j["momentum"] = o.momentum;
    j["patience"] = o.patience;
    j["max_epochs"] = o.max_epochs;
  }
  return j;
}

ml::ClassifierSpec classifier_from_json(const Json& j) {
  if (j.is_string()) return ml::parse_classifier(j.get<std::string>());
  reject_unknown(j,
                 {"name", "family", "k", "weighting", "kernel", "C", "smo_tolerance",
                  "smo_max_iterations", "hidden", "rng_seed", "learning_rate", "momentum",
                  "patience", "max_epochs"},
                 "classifier");
  std::string name;
  read_opt(j, "name", name);
  if (name.empty()) throw InvalidArgument("config: classifier needs a 'name'");
  ml::ClassifierSpec spec = ml::parse_classifier(name);
  if (auto* k = std::get_if<ml::KnnSpec>(&spec)) {
    read_opt(j, "k", k->k);
    std::string w = k->weighting == ml::KnnWeighting::Uniform ? "uniform" : "inverse-distance";
    read_opt(j, "weighting", w);
    if (w == "uniform") k->weighting = ml::KnnWeighting::Uniform;
    else if (w == "inverse-distance") k->weighting = ml::KnnWeighting::InverseDistance;
    else throw InvalidArgument("config: unknown k-NN weighting '" + w + "'");
  } else if (auto* s = std::get_if<ml::SvmSpec>(&spec)) {
    read_opt(j, "C", s->C);
    read_opt(j, "smo_tolerance", s->smo.tolerance);
    read_opt(j, "smo_max_iterations", s->smo.max_iterations);
  } else {
    auto& o = std::get<ml::MlpSpec>(spec).options;
    read_opt(j, "hidden", o.hidden);
    read_opt(j, "rng_seed", o.rng_seed);
    read_opt(j, "learning_rate", o.learning_rate);
    read_opt(j, "momentum", o.momentum);
    read_opt(j, "patience", o.patience);
    read_opt(j, "max_epochs", o.max_epochs);
  }
  return spec;
}

Json to_json(const SplitSpec& spec) {
  return Json{{"mode", to_string(spec.mode)}, {"folds", spec.folds}, {"seed", spec.seed}};
}

SplitSpec split_from_json(const Json& j) {
  reject_unknown(j, {"mode", "folds", "seed"}, "split");
  SplitSpec spec;
  std::string mode = to_string(spec.mode);
  read_opt(j, "mode", mode);
  spec.mode = parse_split_mode(mode);
  read_opt(j, "folds", spec.folds);
  read_opt(j, "seed", spec.seed);
  return spec;
}

Json to_json(const PipelineConfig& cfg) {
  Json j{{"extraction", to_json(cfg.extraction)},
         {"clusters", cfg.clusters},
         {"kmeans_max_iterations", cfg.kmeans_max_iterations},
         {"kmeans_tolerance", cfg.kmeans_tolerance},
         {"kmeans_seed", cfg.kmeans_seed},
         {"classifier", to_json(cfg.classifier)},
         {"split", to_json(cfg.split)},
         {"standardize", nullptr},
         {"validation_fraction", cfg.validation_fraction}};
  if (cfg.standardize) j["standardize"] = *cfg.standardize;
  return j;
}

PipelineConfig pipeline_from_json(const Json& j) {
  reject_unknown(j,
                 {"extraction", "clusters", "kmeans_max_iterations", "kmeans_tolerance",
                  "kmeans_seed", "classifier", "split", "standardize", "validation_fraction"},
                 "pipeline config");
  PipelineConfig cfg;
  if (j.contains("extraction")) cfg.extraction = extraction_from_json(j.at("extraction"));
  read_opt(j, "clusters", cfg.clusters);
  read_opt(j, "kmeans_max_iterations", cfg.kmeans_max_iterations);
  read_opt(j, "kmeans_tolerance", cfg.kmeans_tolerance);
  read_opt(j, "kmeans_seed", cfg.kmeans_seed);
  if (j.contains("classifier")) cfg.classifier = classifier_from_json(j.at("classifier"));
  if (j.contains("split")) cfg.split = split_from_json(j.at("split"));
  if (j.contains("standardize") && !j.at("standardize").is_null()) {
    bool s = false;
    read_opt(j, "standardize", s);
    cfg.standardize = s;
  }
  read_opt(j, "validation_fraction", cfg.validation_fraction);
  return cfg;
}

Json to_json(const ConfusionMatrix& m) {
  Json rows = Json::array();
  for (std::size_t t = 0; t < m.classes(); ++t) {
    Json row = Json::array();
    for (std::size_t p = 0; p < m.classes(); ++p)
      row.push_back(m.count(static_cast<int>(t), static_cast<int>(p)));
    rows.push_back(std::move(row));
  }
  return Json{{"counts", std::move(rows)},
              {"total", m.total()},
              {"correct", m.correct()},
              {"accuracy", m.accuracy()},
              {"recall", m.recall()}};
}

}  // namespace siftwood::detail

namespace siftwood {

std::string pipeline_config_to_json(const PipelineConfig& cfg) {
  return detail::to_json(cfg).dump(2);
}

PipelineConfig pipeline_config_from_json(const std::string& text) {
  PipelineConfig cfg = detail::pipeline_from_json(detail::parse_json(text, "pipeline config"));
  cfg.validate();
  return cfg;
}

}  // namespace siftwood
