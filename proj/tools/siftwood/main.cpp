#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "siftwood/bow.hpp"
#include "siftwood/errors.hpp"
#include "siftwood/experiments.hpp"
#include "siftwood/formats.hpp"
#include "siftwood/model_io.hpp"
#include "siftwood/parallel.hpp"
#include "siftwood/pipeline.hpp"
#include "siftwood/synthetic.hpp"

namespace fs = std::filesystem;
using namespace siftwood;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kIo = 2, kNumeric = 3 };

// Flags shared by every command that builds a PipelineConfig. Unset optionals
// leave the config-file (or default) value alone.
struct ConfigFlags {
  std::string config_file;
  std::optional<std::string> method;
  std::optional<std::size_t> clusters;
  std::optional<std::string> classifier;
  std::optional<std::string> split;
  std::optional<std::size_t> folds;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> kmeans_seed;
  std::optional<std::uint64_t> mlp_seed;
  std::optional<std::string> resize;
  std::optional<double> contrast;
  std::optional<double> edge_ratio;
  std::optional<int> octaves;
  std::optional<int> glcm_levels;
  std::optional<int> glcm_distance;
  std::optional<bool> standardize;

  void attach(CLI::App& cmd, bool pipeline_flags) {
    cmd.add_option("--config", config_file, "JSON pipeline config; flags override its fields")
        ->check(CLI::ExistingFile);
    cmd.add_option("--method", method, "Feature method: sift | lbp | glcm");
    cmd.add_option("--resize", resize, "Analysis size WxH, or 'none' to keep native size");
    cmd.add_option("--contrast-threshold", contrast, "SIFT DoG contrast threshold");
    cmd.add_option("--edge-ratio", edge_ratio, "SIFT principal-curvature ratio limit");
    cmd.add_option("--octaves", octaves, "SIFT octave count (0 = automatic)");
    cmd.add_option("--glcm-levels", glcm_levels, "GLCM gray levels");
    cmd.add_option("--glcm-distance", glcm_distance, "GLCM pixel offset");
    if (!pipeline_flags) return;
    cmd.add_option("--clusters,-k", clusters, "Codebook size for sift features");
    cmd.add_option("--classifier", classifier,
                   "knn-fine | knn-medium | knn-coarse | knn-weighted | knn-k<k>[-weighted] | "
                   "svm-<linear|medium-gaussian|coarse-gaussian|quadratic|cubic>[-C<c>] | mlp-<h>");
    cmd.add_option("--split", split, "train-test | train-val-test | k-fold");
    cmd.add_option("--folds", folds, "Fold count for k-fold");
    cmd.add_option("--seed", seed, "Split seed (also the default k-means and MLP seed)");
    cmd.add_option("--kmeans-seed", kmeans_seed, "k-means++ seed");
    cmd.add_option("--mlp-seed", mlp_seed, "MLP weight-initialization seed");
    cmd.add_flag("--standardize,!--no-standardize", standardize,
                 "Force feature standardization on or off");
  }

  PipelineConfig build() const {
    PipelineConfig cfg;
    if (!config_file.empty()) {
      const auto bytes = io::read_file(config_file);
      cfg = pipeline_config_from_json(std::string(bytes.begin(), bytes.end()));
    }
    if (method) cfg.extraction.method = parse_feature_method(*method);
    if (resize) {
      if (*resize == "none") {
        cfg.extraction.resize_width = cfg.extraction.resize_height = 0;
      } else {
        int w = 0, h = 0;
        char x = 0;
        std::istringstream in(*resize);
        if (!(in >> w >> x >> h) || (x != 'x' && x != 'X') || !in.eof())
          throw InvalidArgument("--resize expects WxH or 'none', got '" + *resize + "'");
        cfg.extraction.resize_width = w;
        cfg.extraction.resize_height = h;
      }
    }
    if (contrast) cfg.extraction.sift.contrast_threshold = *contrast;
    if (edge_ratio) cfg.extraction.sift.edge_ratio = *edge_ratio;
    if (octaves) cfg.extraction.sift.octave_count = *octaves;
    if (glcm_levels) cfg.extraction.glcm.gray_levels = *glcm_levels;
    if (glcm_distance) cfg.extraction.glcm.distance = *glcm_distance;
    if (clusters) cfg.clusters = *clusters;
    if (classifier) cfg.classifier = ml::parse_classifier(*classifier);
    if (split) cfg.split.mode = parse_split_mode(*split);
    if (folds) cfg.split.folds = *folds;
    if (seed) {
      cfg.split.seed = *seed;
      cfg.kmeans_seed = *seed;
      if (auto* m = std::get_if<ml::MlpSpec>(&cfg.classifier)) m->options.rng_seed = *seed;
    }
    if (kmeans_seed) cfg.kmeans_seed = *kmeans_seed;
    if (mlp_seed)
      if (auto* m = std::get_if<ml::MlpSpec>(&cfg.classifier)) m->options.rng_seed = *mlp_seed;
    if (standardize) cfg.standardize = *standardize;
    cfg.validate();
    return cfg;
  }
};

void print_confusion(const ConfusionMatrix& cm, const std::vector<std::string>& names) {
  std::size_t width = 6;
  for (const auto& n : names) width = std::max(width, n.size() + 2);
  std::printf("%-*s", static_cast<int>(width), "true\\pred");
  for (std::size_t p = 0; p < names.size(); ++p) std::printf("%*zu", 6, p);
  std::printf("\n");
  for (std::size_t t = 0; t < names.size(); ++t) {
    std::printf("%-*s", static_cast<int>(width), names[t].c_str());
    for (std::size_t p = 0; p < names.size(); ++p)
      std::printf("%*zu", 6, cm.count(static_cast<int>(t), static_cast<int>(p)));
    std::printf("\n");
  }
  std::printf("accuracy %.4f (%zu/%zu)\n", cm.accuracy(), cm.correct(), cm.total());
}

std::vector<std::size_t> all_ids(const Dataset& ds) {
  std::vector<std::size_t> ids(ds.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  return ids;
}

int cmd_synth(int classes, int per_class, int size, std::uint64_t seed, const fs::path& out) {
  synthetic::SyntheticSpec spec{classes, per_class, size, seed};
  const Dataset ds = synthetic::generate_synthetic_dataset(spec, out);
  std::printf("wrote %zu images in %zu classes to %s\n", ds.size(), ds.class_count(),
              out.string().c_str());
  return kOk;
}

int cmd_extract(const ConfigFlags& flags, const fs::path& input, const fs::path& out, bool text) {
  const PipelineConfig cfg = flags.build();
  const Dataset ds = load_dataset(input);
  const Corpus corpus = extract_corpus(ds, cfg.extraction);
  if (cfg.extraction.method == FeatureMethod::SiftBow) {
    std::vector<io::DescriptorRecord> records;
    std::size_t empty = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      empty += corpus.images[i].descriptors.empty() ? 1 : 0;
      for (const auto& d : corpus.images[i].descriptors)
        records.push_back(io::DescriptorRecord::from(ds.image_id(i), d));
    }
    if (text) io::write_text(out, io::descriptors_to_text(records));
    else io::write_file(out, io::encode_descriptors(records));
    std::printf("extracted %zu descriptors from %zu images (%zu without keypoints) -> %s\n",
                records.size(), ds.size(), empty, out.string().c_str());
    return kOk;
  }
  io::FeatureMatrix m;
  m.method = cfg.extraction.method;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    m.rows.push_back(corpus.images[i].vector.values);
    m.info.push_back({ds.items[i].class_id, ds.classes[ds.items[i].class_id],
                      ds.items[i].path.string()});
  }
  m.length = m.rows.empty() ? 0 : m.rows.front().size();
  io::write_file(out, io::encode_feature_matrix(m));
  io::write_text(io::sidecar_path(out), io::feature_sidecar_text(m));
  std::printf("extracted %zu %s vectors of length %zu -> %s\n", m.rows.size(),
              std::string(to_string(m.method)).c_str(), m.length, out.string().c_str());
  return kOk;
}

int cmd_train(const ConfigFlags& flags, const fs::path& input, const fs::path& out,
              const std::string& codebook_out) {
  const PipelineConfig cfg = flags.build();
  const Dataset ds = load_dataset(input);
  const Corpus corpus = extract_corpus(ds, cfg.extraction);
  const EncodedPartition enc = encode_partition(corpus, Partition{all_ids(ds), {}, {}}, cfg);
  for (std::size_t id : enc.excluded)
    std::fprintf(stderr, "warning: %s has no keypoints; excluded\n", ds.image_id(id).c_str());
  const PipelineModel model = fit_model(corpus, enc, cfg.classifier, cfg);
  io::write_model(out, model);
  if (model.codebook) {
    if (!codebook_out.empty()) io::write_file(codebook_out, io::encode_codebook(*model.codebook));
    std::printf("codebook k=%zu dim=%zu from %zu descriptors (%zu iterations)\n",
                model.codebook->k(), model.codebook->dim(),
                enc.audit->clustering_input_descriptors, model.codebook->iterations);
  }
  std::printf("trained %s on %zu images, %zu features -> %s\n",
              ml::describe(cfg.classifier).c_str(), enc.train_ids.size(), enc.feature_length,
              out.string().c_str());
  return kOk;
}

int cmd_evaluate(const fs::path& model_path, const fs::path& input, const std::string& json_out) {
  const PipelineModel model = io::read_model(model_path);
  const Dataset ds = load_dataset(input);
  std::map<std::string, int> model_class;
  for (std::size_t c = 0; c < model.class_names.size(); ++c)
    model_class[model.class_names[c]] = static_cast<int>(c);
  std::vector<int> label_of(ds.class_count());
  for (std::size_t c = 0; c < ds.class_count(); ++c) {
    const auto it = model_class.find(ds.classes[c]);
    if (it == model_class.end())
      throw ModelMismatch("class '" + ds.classes[c] + "' is unknown to the model");
    label_of[c] = it->second;
  }

  const Corpus corpus = extract_corpus(ds, model.extraction);
  ml::SampleSet test(model.classifier.input_dim, static_cast<int>(model.class_names.size()));
  std::vector<std::string> excluded;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (model.extraction.method == FeatureMethod::SiftBow && corpus.images[i].descriptors.empty()) {
      excluded.push_back(ds.image_id(i));
      continue;
    }
    test.add(model_features(model, corpus.images[i]), label_of[ds.items[i].class_id]);
  }
  for (const auto& id : excluded) std::fprintf(stderr, "warning: %s has no keypoints; excluded\n", id.c_str());
  const ConfusionMatrix cm = evaluate(model, test);
  print_confusion(cm, model.class_names);
  if (!json_out.empty()) {
    std::ostringstream js;
    js << "{\n  \"accuracy\": " << cm.accuracy() << ",\n  \"evaluated\": " << cm.total()
       << ",\n  \"correct\": " << cm.correct() << ",\n  \"excluded\": " << excluded.size()
       << ",\n  \"counts\": [";
    for (std::size_t t = 0; t < cm.classes(); ++t) {
      js << (t ? ", " : "") << "[";
      for (std::size_t p = 0; p < cm.classes(); ++p)
        js << (p ? ", " : "") << cm.count(static_cast<int>(t), static_cast<int>(p));
      js << "]";
    }
    js << "]\n}\n";
    io::write_text(json_out, js.str());
  }
  return kOk;
}

int cmd_predict(const fs::path& model_path, const fs::path& image) {
  const PipelineModel model = io::read_model(model_path);
  const ImageFeatures raw = extract_file(image, model.extraction);
  const std::vector<double> x = model_features(model, raw);
  const int label = ml::predict(model.classifier, x);
  std::printf("%s\n", model.class_names.at(static_cast<std::size_t>(label)).c_str());
  const std::vector<double> probs = ml::predict_probabilities(model.classifier, x);
  for (std::size_t c = 0; c < probs.size(); ++c)
    std::printf("  %s %.6f\n", model.class_names[c].c_str(), probs[c]);
  return kOk;
}

int cmd_run(const ConfigFlags& flags, const fs::path& input, const std::string& report_out) {
  const PipelineConfig cfg = flags.build();
  const RunReport report = run_pipeline(load_dataset(input), cfg);
  print_confusion(report.confusion, report.class_names);
  std::printf("leakage audit %s\n", report.leakage_audit_passed() ? "passed" : "FAILED");
  for (const auto& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (!report_out.empty()) io::write_text(report_out, report.to_json());
  return kOk;
}

int cmd_experiment(const ConfigFlags& flags, const std::string& which, const fs::path& input,
                   const fs::path& out, const std::string& table_out,
                   const std::vector<std::size_t>& ks, const std::vector<std::uint64_t>& seeds,
                   const std::vector<std::string>& classifiers) {
  PipelineConfig base = flags.build();
  const Dataset ds = load_dataset(input);
  std::vector<ml::ClassifierSpec> specs;
  for (const auto& c : classifiers) specs.push_back(ml::parse_classifier(c));
  std::string json, table;
  if (which == "sweep") {
    experiments::SweepConfig sc;
    sc.base = base;
    sc.base.extraction.method = FeatureMethod::SiftBow;
    if (!ks.empty()) sc.clusters = ks;
    sc.classifiers = specs;
    const auto r = experiments::cluster_sweep(ds, sc);
    json = r.to_json();
    table = r.to_table();
  } else {
    experiments::ComparisonConfig cc;
    if (!flags.split && flags.config_file.empty()) base.split.mode = SplitMode::TrainValTest;
    cc.base = base;
    if (flags.clusters) cc.clusters = *flags.clusters;
    if (!seeds.empty()) cc.seeds = seeds;
    cc.candidates = specs;
    const auto r = experiments::method_comparison(ds, cc);
    json = r.to_json();
    table = r.to_table();
  }
  io::write_text(out, json + "\n");
  if (!table_out.empty()) io::write_text(table_out, table);
  std::fputs(table.c_str(), stdout);
  return kOk;
}

unsigned env_threads() {
  const char* v = std::getenv("SIFTWOOD_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const unsigned long n = std::strtoul(v, &end, 10);
  if (*end != '\0') throw InvalidArgument(std::string("SIFTWOOD_THREADS must be a number, got '") + v + "'");
  return static_cast<unsigned>(n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Texture classification with SIFT keypoint histograms, LBP and GLCM baselines"};
  app.require_subcommand(1);
  std::optional<unsigned> threads;
  app.add_option("--threads", threads,
                 "Worker thread cap (0 = all cores; default $SIFTWOOD_THREADS or 1)");

  fs::path input, out, model_path, image;
  std::string codebook_out, report_out, table_out, which = "sweep";
  bool text = false;
  int classes = 5, per_class = 40, size = 256;
  std::uint64_t synth_seed = 0;
  std::vector<std::size_t> ks;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> classifier_list;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic wood-like texture dataset");
  synth->add_option("--classes", classes, "Class count")->check(CLI::Range(2, 99));
  synth->add_option("--per-class", per_class, "Images per class")->check(CLI::Range(1, 999));
  synth->add_option("--size", size, "Image side in pixels")->check(CLI::Range(32, 4096));
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--out", out, "Output directory")->required();

  ConfigFlags extract_flags;
  auto* extract = app.add_subcommand("extract", "Extract descriptors or texture features");
  extract->add_option("--input", input, "Dataset root (one directory per class)")->required();
  extract->add_option("--out", out, "Output file")->required();
  extract->add_flag("--text", text, "Write sift descriptors as text instead of binary");
  extract_flags.attach(*extract, false);

  ConfigFlags train_flags;
  auto* train = app.add_subcommand("train", "Train a model on every image of a dataset");
  train->add_option("--input", input, "Dataset root")->required();
  train->add_option("--out", out, "Model file")->required();
  train->add_option("--codebook", codebook_out, "Also write the codebook to this file");
  train_flags.attach(*train, true);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a model on a labelled dataset");
  evaluate_cmd->add_option("--model", model_path, "Model file")->required();
  evaluate_cmd->add_option("--input", input, "Dataset root")->required();
  evaluate_cmd->add_option("--json", report_out, "Write the confusion matrix as JSON");

  auto* predict_cmd = app.add_subcommand("predict", "Classify one image");
  predict_cmd->add_option("--model", model_path, "Model file")->required();
  predict_cmd->add_option("--image", image, "Image file")->required();

  ConfigFlags run_flags;
  auto* run = app.add_subcommand("run", "Split, train and evaluate; write a run report");
  run->add_option("--input", input, "Dataset root")->required();
  run->add_option("--report", report_out, "Run report JSON file");
  run_flags.attach(*run, true);

  ConfigFlags exp_flags;
  auto* experiment = app.add_subcommand("experiment", "Cluster sweep or method comparison");
  experiment->add_option("--which", which, "sweep | comparison")
      ->check(CLI::IsMember({"sweep", "comparison"}));
  experiment->add_option("--input", input, "Dataset root")->required();
  experiment->add_option("--out", out, "Result JSON file")->required();
  experiment->add_option("--table", table_out, "Also write the text table here");
  experiment->add_option("--ks", ks, "Cluster counts for the sweep (default 250 300 350 400)");
  experiment->add_option("--seeds", seeds, "Seeds for the comparison (default 0 1 2)");
  experiment->add_option("--classifiers", classifier_list,
                         "Classifier names (sweep default: knn-fine svm-linear mlp-100; "
                         "comparison default: the full grid)");
  exp_flags.attach(*experiment, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    parallel::set_max_threads(threads ? *threads : env_threads());
    if (*synth) return cmd_synth(classes, per_class, size, synth_seed, out);
    if (*extract) return cmd_extract(extract_flags, input, out, text);
    if (*train) return cmd_train(train_flags, input, out, codebook_out);
    if (*evaluate_cmd) return cmd_evaluate(model_path, input, report_out);
    if (*predict_cmd) return cmd_predict(model_path, image);
    if (*run) return cmd_run(run_flags, input, report_out);
    if (*experiment)
      return cmd_experiment(exp_flags, which, input, out, table_out, ks, seeds, classifier_list);
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumeric;
  } catch (const NoKeypointsError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumeric;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::bad_alloc&) {
    std::fprintf(stderr, "error: out of memory\n");
    return kNumeric;
  }
  return kUsage;
}
