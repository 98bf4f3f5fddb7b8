#include "siftwood/experiments.hpp"

#include <cstdio>
#include <sstream>
#include <utility>

#include "json_convert.hpp"
#include "siftwood/errors.hpp"
#include "siftwood/rng.hpp"

namespace siftwood::experiments {

namespace {

using detail::Json;

std::string cell_text(const Cell& c) {
  if (!c.applicable) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", c.accuracy);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

Json cell_json(const Cell& c) {
  Json j{{"method", std::string(to_string(c.method))},
         {"classifier", c.classifier},
         {"feature_length", c.feature_length},
         {"applicable", c.applicable}};
  if (c.method == FeatureMethod::SiftBow) j["clusters"] = c.clusters;
  if (c.applicable) {
    j["accuracy"] = c.accuracy;
    j["seed_accuracies"] = c.seed_accuracies;
    if (!c.selected.empty()) j["selected"] = c.selected;
    j["leakage_audit_passed"] = c.audit_passed;
  } else {
    j["note"] = c.note;
  }
  return j;
}

std::vector<ml::ClassifierSpec> with_mlp_seed(std::vector<ml::ClassifierSpec> specs,
                                              std::uint64_t seed) {
  for (auto& s : specs)
    if (auto* m = std::get_if<ml::MlpSpec>(&s)) m->options.rng_seed = seed;
  return specs;
}

}  // namespace

SweepResult cluster_sweep(const Corpus& corpus, const SweepConfig& cfg) {
  if (corpus.config.method != FeatureMethod::SiftBow)
    throw InvalidArgument("cluster sweep needs sift-bow features");
  if (cfg.clusters.empty()) throw InvalidArgument("cluster sweep needs at least one k");
  SweepResult result;
  result.config = cfg;
  if (result.config.classifiers.empty())
    for (const char* name : {"knn-fine", "svm-linear", "mlp-100"})
      result.config.classifiers.push_back(ml::parse_classifier(name));
  result.config.base.extraction = corpus.config;
  for (const auto& spec : result.config.classifiers)
    result.classifier_names.push_back(ml::describe(spec));

  const Dataset& ds = corpus.dataset;
  const std::vector<Partition> partitions = split(ds, cfg.base.split);
  for (std::size_t k : result.config.clusters) {
    PipelineConfig pc = result.config.base;
    pc.clusters = k;
    pc.validate();

    const std::size_t nc = result.config.classifiers.size();
    std::vector<Cell> row(nc);
    std::vector<ConfusionMatrix> confusion(nc, ConfusionMatrix(ds.class_count()));
    for (std::size_t c = 0; c < nc; ++c) {
      row[c].method = FeatureMethod::SiftBow;
      row[c].clusters = k;
      row[c].classifier = result.classifier_names[c];
      row[c].feature_length = k;
    }
    for (const Partition& p : partitions) {
      EncodedPartition enc;
      try {
        enc = encode_partition(corpus, p, pc);
      } catch (const InvalidArgument& e) {
        for (auto& cell : row) {
          cell.applicable = false;
          cell.note = e.what();
        }
        break;
      }
      for (std::size_t c = 0; c < nc; ++c) {
        if (!row[c].applicable) continue;
        row[c].audit_passed = row[c].audit_passed && enc.audit && enc.audit->passed();
        try {
          const PipelineModel model = fit_model(corpus, enc, result.config.classifiers[c], pc);
          confusion[c].merge(evaluate(model, enc.samples(ds, enc.test_ids)));
        } catch (const InvalidArgument& e) {
          row[c].applicable = false;
          row[c].note = e.what();
        }
      }
    }
    for (std::size_t c = 0; c < nc; ++c) {
      if (!row[c].applicable) continue;
      row[c].accuracy = confusion[c].accuracy();
      row[c].seed_accuracies = {row[c].accuracy};
    }
    result.cells.insert(result.cells.end(), row.begin(), row.end());
  }
  return result;
}

SweepResult cluster_sweep(const Dataset& dataset, const SweepConfig& cfg) {
  ExtractionConfig ex = cfg.base.extraction;
  ex.method = FeatureMethod::SiftBow;
  return cluster_sweep(extract_corpus(dataset, ex), cfg);
}

std::string SweepResult::to_json() const {
  Json cells_json = Json::array();
  for (const Cell& c : cells) cells_json.push_back(cell_json(c));
  return Json{{"experiment", "cluster-sweep"},
              {"config", detail::to_json(config.base)},
              {"clusters", config.clusters},
              {"classifiers", classifier_names},
              {"cells", std::move(cells_json)}}
      .dump(2);
}

std::string SweepResult::to_table() const {
  std::ostringstream out;
  out << pad("clusters", 10);
  for (const auto& n : classifier_names) out << pad(n, 22);
  out << '\n';
  for (std::size_t i = 0; i < config.clusters.size(); ++i) {
    out << pad(std::to_string(config.clusters[i]), 10);
    for (std::size_t c = 0; c < classifier_names.size(); ++c) out << pad(cell_text(at(i, c)), 22);
    out << '\n';
  }
  return out.str();
}

ComparisonConfig::ComparisonConfig() { base.split.mode = SplitMode::TrainValTest; }

ComparisonResult method_comparison(const Dataset& dataset, const ComparisonConfig& cfg) {
  if (cfg.seeds.empty()) throw InvalidArgument("method comparison needs at least one seed");
  ComparisonResult result;
  result.config = cfg;
  if (result.config.candidates.empty()) result.config.candidates = ml::default_classifier_grid();
  const std::size_t nf = result.families.size();

  for (FeatureMethod method : cfg.methods) {
    PipelineConfig pc = cfg.base;
    pc.extraction.method = method;
    pc.clusters = cfg.clusters;
    pc.validate();
    const Corpus corpus = extract_corpus(dataset, pc.extraction);

    std::vector<Cell> row(nf);
    for (std::size_t f = 0; f < nf; ++f) row[f].method = method;

    for (std::uint64_t seed : cfg.seeds) {
      pc.split.seed = seed;
      pc.kmeans_seed = seed;
      const auto candidates = with_mlp_seed(result.config.candidates, seed);
      std::vector<ConfusionMatrix> confusion(nf, ConfusionMatrix(dataset.class_count()));
      std::vector<std::string> chosen(nf);

      for (Partition p : split(dataset, pc.split)) {
        if (p.validation.empty())
          p = carve_validation(dataset, std::move(p), pc.validation_fraction,
                               derive_seed(seed, 0x5E1EC7));
        const EncodedPartition enc = encode_partition(corpus, p, pc);
        const ml::SampleSet train = enc.samples(dataset, enc.train_ids);
        const ml::SampleSet validation = enc.samples(dataset, enc.validation_ids);

        std::vector<double> best(nf, -1.0);
        std::vector<const ml::ClassifierSpec*> pick(nf, nullptr);
        for (const auto& spec : candidates) {
          const ml::Family family = ml::family_of(spec);
          const std::size_t f = static_cast<std::size_t>(family);
          ml::TrainOptions opts{pc.standardize_for(method, family)};
          try {
            const ml::TrainedModel m = ml::train_classifier(spec, train, validation, opts);
            std::size_t correct = 0;
            for (std::size_t i = 0; i < validation.size(); ++i)
              correct += ml::predict(m, validation.row(i)) == validation.label(i) ? 1 : 0;
            const double acc = static_cast<double>(correct) / static_cast<double>(validation.size());
            if (acc > best[f]) {
              best[f] = acc;
              pick[f] = &spec;
            }
          } catch (const InvalidArgument&) {
          }
        }

        for (std::size_t f = 0; f < nf; ++f) {
          if (!pick[f]) {
            row[f].applicable = false;
            row[f].note = "no applicable " + std::string(ml::to_string(result.families[f])) +
                          " configuration";
            continue;
          }
          const PipelineModel model = fit_model(corpus, enc, *pick[f], pc);
          confusion[f].merge(evaluate(model, enc.samples(dataset, enc.test_ids)));
          if (!chosen[f].empty()) chosen[f] += ",";
          chosen[f] += ml::describe(*pick[f]);
          row[f].audit_passed = row[f].audit_passed && (!enc.audit || enc.audit->passed());
          row[f].feature_length = enc.feature_length;
        }
      }
      for (std::size_t f = 0; f < nf; ++f) {
        if (!row[f].applicable) continue;
        row[f].seed_accuracies.push_back(confusion[f].accuracy());
        row[f].selected.push_back(chosen[f]);
      }
    }

    for (std::size_t f = 0; f < nf; ++f) {
      Cell& cell = row[f];
      cell.clusters = method == FeatureMethod::SiftBow ? cfg.clusters : 0;
      cell.classifier = std::string(ml::to_string(result.families[f]));
      if (!cell.applicable) continue;
      double sum = 0.0;
      for (double a : cell.seed_accuracies) sum += a;
      cell.accuracy = sum / static_cast<double>(cell.seed_accuracies.size());
    }
    result.feature_counts.push_back(row[0].feature_length);
    result.cells.insert(result.cells.end(), row.begin(), row.end());
  }
  return result;
}

std::string ComparisonResult::to_json() const {
  Json rows = Json::array();
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    Json cells_json = Json::array();
    for (std::size_t f = 0; f < families.size(); ++f) cells_json.push_back(cell_json(at(m, f)));
    rows.push_back(Json{{"method", std::string(to_string(config.methods[m]))},
                        {"feature_count", feature_counts[m]},
                        {"cells", std::move(cells_json)}});
  }
  Json fam = Json::array();
  for (auto f : families) fam.push_back(std::string(ml::to_string(f)));
  return Json{{"experiment", "method-comparison"},
              {"config", detail::to_json(config.base)},
              {"clusters", config.clusters},
              {"seeds", config.seeds},
              {"families", std::move(fam)},
              {"rows", std::move(rows)}}
      .dump(2);
}

std::string ComparisonResult::to_table() const {
  std::ostringstream out;
  out << pad("method", 10) << pad("features", 10);
  for (auto f : families) out << pad(std::string(ml::to_string(f)), 10);
  out << '\n';
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    out << pad(std::string(to_string(config.methods[m])), 10)
        << pad(std::to_string(feature_counts[m]), 10);
    for (std::size_t f = 0; f < families.size(); ++f) out << pad(cell_text(at(m, f)), 10);
    out << '\n';
  }
  return out.str();
}

}  // namespace siftwood::experiments
