#pragma once

#include <json.hpp>

#include "siftwood/classifier.hpp"
#include "siftwood/pipeline.hpp"

namespace siftwood::detail {

using Json = nlohmann::ordered_json;

Json to_json(const ExtractionConfig& cfg);
ExtractionConfig extraction_from_json(const Json& j);

Json to_json(const ml::ClassifierSpec& spec);
ml::ClassifierSpec classifier_from_json(const Json& j);

Json to_json(const SplitSpec& spec);
SplitSpec split_from_json(const Json& j);

Json to_json(const PipelineConfig& cfg);
PipelineConfig pipeline_from_json(const Json& j);

Json to_json(const ConfusionMatrix& m);

Json parse_json(const std::string& text, const std::string& what);

}  // namespace siftwood::detail
