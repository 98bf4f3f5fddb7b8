#include "json_convert.hpp"
#include "siftwood/pipeline.hpp"

namespace siftwood {

namespace {

detail::Json report_json(const RunReport& r, bool with_timings) {
  using detail::Json;
  Json folds = Json::array();
  Json audits = Json::array();
  for (std::size_t f = 0; f < r.folds.size(); ++f) {
    const FoldReport& fold = r.folds[f];
    Json jf{{"fold", f},
            {"train_images", fold.train_count},
            {"validation_images", fold.validation_count},
            {"test_images", fold.test_count},
            {"accuracy", fold.confusion.accuracy()},
            {"confusion", detail::to_json(fold.confusion)},
            {"model_digest", fold.model_digest}};
    if (fold.audit) {
      jf["clustering"] = Json{{"iterations", fold.clustering_iterations},
                              {"wcss", fold.clustering_wcss}};
      Json images = Json::array();
      for (std::size_t id : fold.audit->clustering_images) images.push_back(id);
      audits.push_back(Json{{"fold", f},
                            {"clustering_input_descriptors", fold.audit->clustering_input_descriptors},
                            {"training_descriptor_total", fold.audit->training_descriptor_total},
                            {"test_images_in_clustering", fold.audit->test_images_in_clustering},
                            {"passed", fold.audit->passed()},
                            {"clustering_image_ids", std::move(images)}});
    }
    folds.push_back(std::move(jf));
  }

  Json j{{"software", {{"name", "siftwood"}, {"version", r.software_version}}},
         {"config", detail::to_json(r.config)},
         {"classes", r.class_names},
         {"feature_length", r.feature_length},
         {"metrics",
          {{"accuracy", r.accuracy()},
           {"evaluated_images", r.confusion.total()},
           {"confusion", detail::to_json(r.confusion)},
           {"folds", std::move(folds)}}},
         {"excluded_images", r.excluded_images},
         {"leakage_audit", {{"passed", r.leakage_audit_passed()}, {"folds", std::move(audits)}}},
         {"warnings", r.warnings}};
  if (with_timings)
    j["timings_seconds"] = Json{{"extraction", r.timings.extraction},
                                {"clustering", r.timings.clustering},
                                {"training", r.timings.training},
                                {"evaluation", r.timings.evaluation}};
  return j;
}

}  // namespace

std::string RunReport::metrics_json() const { return report_json(*this, false).dump(2); }

std::string RunReport::to_json() const { return report_json(*this, true).dump(2); }

}  // namespace siftwood
