#include "siftwood/classifier.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "siftwood/errors.hpp"

namespace siftwood::ml {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::size_t parse_count(std::string_view text, std::string_view context) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value == 0)
    throw InvalidArgument("invalid number '" + std::string(text) + "' in classifier name '" +
                          std::string(context) + "'");
  return value;
}

double parse_real(std::string_view text, std::string_view context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(text), &used);
    if (used == text.size() && v > 0.0) return v;
  } catch (const std::exception&) {
  }
  throw InvalidArgument("invalid C value '" + std::string(text) + "' in classifier name '" +
                        std::string(context) + "'");
}

std::string format_c(double c) {
  std::ostringstream os;
  os << c;
  return os.str();
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::Knn:
      return "knn";
    case Family::Svm:
      return "svm";
    case Family::Mlp:
      return "mlp";
  }
  return "unknown";
}

std::string_view to_string(KernelPreset p) {
  switch (p) {
    case KernelPreset::Linear:
      return "linear";
    case KernelPreset::MediumGaussian:
      return "medium-gaussian";
    case KernelPreset::CoarseGaussian:
      return "coarse-gaussian";
    case KernelPreset::Quadratic:
      return "quadratic";
    case KernelPreset::Cubic:
      return "cubic";
  }
  return "unknown";
}

KernelSpec resolve_kernel(KernelPreset preset, std::size_t dim) {
  const double d = static_cast<double>(dim);
  switch (preset) {
    case KernelPreset::Linear:
      return KernelSpec::linear();
    case KernelPreset::MediumGaussian:
      return KernelSpec::rbf(1.0 / d);
    case KernelPreset::CoarseGaussian:
      return KernelSpec::rbf(1.0 / (4.0 * d));
    case KernelPreset::Quadratic:
      return KernelSpec::polynomial(2, 1.0);
    case KernelPreset::Cubic:
      return KernelSpec::polynomial(3, 1.0);
  }
  throw InvalidArgument("unknown kernel preset");
}

Family family_of(const ClassifierSpec& spec) {
  return std::visit(Overloaded{[](const KnnSpec&) { return Family::Knn; },
                               [](const SvmSpec&) { return Family::Svm; },
                               [](const MlpSpec&) { return Family::Mlp; }},
                    spec);
}

std::string describe(const ClassifierSpec& spec) {
  return std::visit(
      Overloaded{
          [](const KnnSpec& s) -> std::string {
            const bool weighted = s.weighting == KnnWeighting::InverseDistance;
            if (weighted && s.k == 10) return "knn-weighted";
            if (!weighted && s.k == 1) return "knn-fine";
            if (!weighted && s.k == 10) return "knn-medium";
            if (!weighted && s.k == 100) return "knn-coarse";
            return "knn-k" + std::to_string(s.k) + (weighted ? "-weighted" : "");
          },
          [](const SvmSpec& s) -> std::string {
            std::string name = "svm-" + std::string(to_string(s.kernel));
            if (s.C != 1.0) name += "-C" + format_c(s.C);
            return name;
          },
          [](const MlpSpec& s) -> std::string { return "mlp-" + std::to_string(s.options.hidden); }},
      spec);
}

ClassifierSpec parse_classifier(std::string_view name) {
  if (name == "knn-fine") return KnnSpec{1, KnnWeighting::Uniform};
  if (name == "knn-medium") return KnnSpec{10, KnnWeighting::Uniform};
  if (name == "knn-coarse") return KnnSpec{100, KnnWeighting::Uniform};
  if (name == "knn-weighted") return KnnSpec{10, KnnWeighting::InverseDistance};
  if (name.starts_with("knn-k")) {
    std::string_view rest = name.substr(5);
    KnnWeighting weighting = KnnWeighting::Uniform;
    if (rest.ends_with("-weighted")) {
      weighting = KnnWeighting::InverseDistance;
      rest.remove_suffix(9);
    }
    return KnnSpec{parse_count(rest, name), weighting};
  }
  if (name.starts_with("svm-")) {
    std::string_view rest = name.substr(4);
    double C = 1.0;
    if (const auto pos = rest.find("-C"); pos != std::string_view::npos) {
      C = parse_real(rest.substr(pos + 2), name);
      rest = rest.substr(0, pos);
    }
    for (KernelPreset p : {KernelPreset::Linear, KernelPreset::MediumGaussian,
                           KernelPreset::CoarseGaussian, KernelPreset::Quadratic,
                           KernelPreset::Cubic})
      if (rest == to_string(p)) return SvmSpec{p, C, {}};
  }
  if (name.starts_with("mlp-")) {
    MlpSpec s;
    s.options.hidden = parse_count(name.substr(4), name);
    return s;
  }
  throw InvalidArgument("unknown classifier '" + std::string(name) + "'");
}

std::vector<ClassifierSpec> default_classifier_grid(std::uint64_t mlp_seed) {
  std::vector<ClassifierSpec> grid;
  for (const char* n : {"knn-fine", "knn-medium", "knn-coarse", "knn-weighted", "svm-linear",
                        "svm-medium-gaussian", "svm-coarse-gaussian", "svm-quadratic",
                        "svm-cubic"})
    grid.push_back(parse_classifier(n));
  for (std::size_t hidden : {60, 80, 100, 120, 140}) {
    MlpSpec s;
    s.options.hidden = hidden;
    s.options.rng_seed = mlp_seed;
    grid.push_back(s);
  }
  return grid;
}

TrainedModel train_classifier(const ClassifierSpec& spec, const SampleSet& train_in,
                              const SampleSet& validation_in, const TrainOptions& options,
                              MlpTrainingLog* mlp_log) {
  if (train_in.empty()) throw InvalidArgument("train_classifier: empty training set");
  TrainedModel out;
  out.spec = spec;
  out.num_classes = train_in.num_classes();
  out.input_dim = train_in.dim();

  const SampleSet* train = &train_in;
  const SampleSet* validation = &validation_in;
  SampleSet train_scaled, validation_scaled;
  if (options.standardize) {
    out.standardizer = Standardizer::fit(train_in);
    train_scaled = out.standardizer->apply(train_in);
    train = &train_scaled;
    if (!validation_in.empty()) {
      validation_scaled = out.standardizer->apply(validation_in);
      validation = &validation_scaled;
    }
  }

  std::visit(Overloaded{[&](const KnnSpec& s) { out.model = knn_train(*train, s.k, s.weighting); },
                        [&](const SvmSpec& s) {
                          out.model = svm_train(*train, resolve_kernel(s.kernel, train->dim()),
                                                s.C, s.smo);
                        },
                        [&](const MlpSpec& s) {
                          out.model = mlp_train(*train, *validation, s.options, mlp_log);
                        }},
             spec);
  return out;
}

namespace {

std::vector<double> preprocess(const TrainedModel& model, std::span<const double> features) {
  if (features.size() != model.input_dim)
    throw ModelMismatch("feature length " + std::to_string(features.size()) +
                        " does not match the model input length " +
                        std::to_string(model.input_dim));
  if (model.standardizer) return model.standardizer->apply(features);
  return {features.begin(), features.end()};
}

}  // namespace

int predict(const TrainedModel& model, std::span<const double> features) {
  const std::vector<double> x = preprocess(model, features);
  return std::visit(Overloaded{[&](const KnnModel& m) { return knn_predict(m, x); },
                               [&](const SvmModel& m) { return svm_predict(m, x); },
                               [&](const MlpModel& m) { return mlp_predict(m, x).label; }},
                    model.model);
}

std::vector<double> predict_probabilities(const TrainedModel& model,
                                          std::span<const double> features) {
  const auto* mlp = std::get_if<MlpModel>(&model.model);
  if (!mlp) return {};
  return mlp_probabilities(*mlp, preprocess(model, features));
}

}  // namespace siftwood::ml
