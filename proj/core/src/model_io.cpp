#include "siftwood/model_io.hpp"

#include <string>
#include <utility>

#include "binary_io.hpp"
#include "json_convert.hpp"
#include "siftwood/errors.hpp"
#include "siftwood/formats.hpp"

namespace siftwood::io {

namespace {

using detail::ByteReader;
using detail::ByteWriter;
using detail::Json;

constexpr std::uint32_t kVersion = 1;

void section(ByteWriter& out, std::string_view tag, std::span<const std::uint8_t> payload) {
  out.raw(tag);
  out.u64(payload.size());
  out.raw(payload);
}

std::vector<std::uint8_t> encode_knn(const ml::KnnModel& m) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(m.k));
  w.u32(m.weighting == ml::KnnWeighting::Uniform ? 0 : 1);
  w.u32(static_cast<std::uint32_t>(m.samples.dim()));
  w.u32(static_cast<std::uint32_t>(m.samples.num_classes()));
  w.u64(m.samples.size());
  for (std::size_t i = 0; i < m.samples.size(); ++i) {
    w.i32(m.samples.label(i));
    for (double v : m.samples.row(i)) w.f32(v);
  }
  return std::move(w.bytes());
}

ml::KnnModel decode_knn(ByteReader& r) {
  ml::KnnModel m;
  m.k = r.u32();
  const std::uint32_t weighting = r.u32();
  if (weighting > 1) r.fail("unknown k-NN weighting");
  m.weighting = weighting == 0 ? ml::KnnWeighting::Uniform : ml::KnnWeighting::InverseDistance;
  const std::size_t dim = r.u32();
  const int classes = static_cast<int>(r.u32());
  const std::uint64_t n = r.u64();
  if (n * (4 + 4 * dim) > r.remaining()) r.fail("truncated k-NN payload");
  m.samples = ml::SampleSet(dim, classes);
  std::vector<double> row(dim);
  for (std::uint64_t i = 0; i < n; ++i) {
    const int label = r.i32();
    if (label < 0 || label >= classes) r.fail("k-NN label out of range");
    for (auto& v : row) v = r.f32();
    m.samples.add(row, label);
  }
  if (m.k < 1 || m.k > n) r.fail("k-NN k out of range");
  return m;
}

std::vector<std::uint8_t> encode_svm(const ml::SvmModel& m) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(m.kernel.kind));
  w.f32(m.kernel.gamma);
  w.u32(static_cast<std::uint32_t>(m.kernel.degree));
  w.f32(m.kernel.coef0);
  w.f32(m.C);
  w.u32(static_cast<std::uint32_t>(m.num_classes));
  w.u32(static_cast<std::uint32_t>(m.dim));
  w.u32(static_cast<std::uint32_t>(m.machines.size()));
  for (const auto& mc : m.machines) {
    w.i32(mc.positive_class);
    w.i32(mc.negative_class);
    w.f32(mc.rho);
    w.u64(mc.iterations);
    w.f32(mc.kkt_gap);
    w.u64(mc.support_count());
    for (std::size_t i = 0; i < mc.support_count(); ++i) {
      w.i32(mc.y[i]);
      w.f32(mc.alpha[i]);
      for (double v : mc.support_vector(i)) w.f32(v);
    }
  }
  return std::move(w.bytes());
}

ml::SvmModel decode_svm(ByteReader& r) {
  ml::SvmModel m;
  const std::uint32_t kind = r.u32();
  if (kind > 2) r.fail("unknown kernel kind");
  m.kernel.kind = static_cast<ml::KernelSpec::Kind>(kind);
  m.kernel.gamma = r.f32();
  m.kernel.degree = static_cast<int>(r.u32());
  m.kernel.coef0 = r.f32();
  m.C = r.f32();
  m.num_classes = static_cast<int>(r.u32());
  m.dim = r.u32();
  const std::uint32_t machines = r.u32();
  if (machines != static_cast<std::uint32_t>(m.num_classes * (m.num_classes - 1) / 2))
    r.fail("machine count does not match class count");
  for (std::uint32_t k = 0; k < machines; ++k) {
    ml::BinaryMachine mc;
    mc.positive_class = r.i32();
    mc.negative_class = r.i32();
    mc.dim = m.dim;
    mc.rho = r.f32();
    mc.iterations = r.u64();
    mc.kkt_gap = r.f32();
    const std::uint64_t n = r.u64();
    if (n * (8 + 4 * m.dim) > r.remaining()) r.fail("truncated SVM payload");
    mc.alpha.reserve(n);
    mc.y.reserve(n);
    mc.support_vectors.reserve(n * m.dim);
    for (std::uint64_t i = 0; i < n; ++i) {
      mc.y.push_back(r.i32());
      mc.alpha.push_back(r.f32());
      for (std::size_t d = 0; d < m.dim; ++d) mc.support_vectors.push_back(r.f32());
    }
    m.machines.push_back(std::move(mc));
  }
  try {
    m.kernel.validate();
  } catch (const InvalidArgument& e) {
    r.fail(e.what());
  }
  return m;
}

std::vector<std::uint8_t> encode_mlp(const ml::MlpModel& m) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(m.input_dim));
  w.u32(static_cast<std::uint32_t>(m.hidden));
  w.u32(static_cast<std::uint32_t>(m.classes));
  for (double v : m.flatten()) w.f32(v);
  return std::move(w.bytes());
}

ml::MlpModel decode_mlp(ByteReader& r) {
  const std::size_t in = r.u32();
  const std::size_t hidden = r.u32();
  const std::size_t classes = r.u32();
  ml::MlpModel m = ml::MlpModel::zeros(in, hidden, classes);
  if (m.parameter_count() * 4 > r.remaining()) r.fail("truncated MLP payload");
  std::vector<double> params(m.parameter_count());
  for (auto& v : params) v = r.f32();
  m.unflatten(params);
  return m;
}

}  // namespace

std::vector<std::uint8_t> encode_model(const PipelineModel& model) {
  const ml::TrainedModel& tm = model.classifier;
  Json meta{{"format", "siftwood-model"},
            {"extraction", detail::to_json(model.extraction)},
            {"class_names", model.class_names},
            {"classifier", detail::to_json(tm.spec)},
            {"num_classes", tm.num_classes},
            {"input_dim", tm.input_dim}};

  std::uint32_t sections = 2;
  if (tm.standardizer) ++sections;
  if (model.codebook) ++sections;

  ByteWriter out;
  out.raw(std::string_view("SWMD"));
  out.u32(kVersion);
  out.u32(sections);
  const std::string meta_text = meta.dump();
  section(out, "META",
          {reinterpret_cast<const std::uint8_t*>(meta_text.data()), meta_text.size()});
  if (tm.standardizer) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(tm.standardizer->mean.size()));
    for (double v : tm.standardizer->mean) w.f32(v);
    for (double v : tm.standardizer->scale) w.f32(v);
    section(out, "PREP", w.bytes());
  }
  if (model.codebook) section(out, "CBOK", encode_codebook(*model.codebook));
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ml::KnnModel>) section(out, "KNN ", encode_knn(m));
        else if constexpr (std::is_same_v<T, ml::SvmModel>) section(out, "SVM ", encode_svm(m));
        else section(out, "MLP ", encode_mlp(m));
      },
      tm.model);
  return std::move(out.bytes());
}

PipelineModel decode_model(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "model file");
  r.expect_magic("SWMD");
  const std::uint32_t version = r.u32();
  if (version != kVersion) r.fail("unsupported version " + std::to_string(version));
  const std::uint32_t sections = r.u32();

  PipelineModel model;
  bool have_meta = false;
  bool have_classifier = false;
  for (std::uint32_t s = 0; s < sections; ++s) {
    const std::string tag = r.raw(4);
    const std::uint64_t length = r.u64();
    if (length > r.remaining()) r.fail("section '" + tag + "' is truncated");
    ByteReader body(r.bytes(length), "model file section '" + tag + "'");
    if (tag == "META") {
      const Json meta = detail::parse_json(body.raw(length), "model metadata");
      try {
        model.extraction = detail::extraction_from_json(meta.at("extraction"));
        model.class_names = meta.at("class_names").get<std::vector<std::string>>();
        model.classifier.spec = detail::classifier_from_json(meta.at("classifier"));
        model.classifier.num_classes = meta.at("num_classes").get<int>();
        model.classifier.input_dim = meta.at("input_dim").get<std::size_t>();
      } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("model metadata: ") + e.what());
      } catch (const InvalidArgument& e) {
        throw FormatError(std::string("model metadata: ") + e.what());
      }
      have_meta = true;
    } else if (tag == "PREP") {
      const std::size_t dim = body.u32();
      if (dim * 8 != body.remaining()) body.fail("size mismatch");
      ml::Standardizer st;
      st.mean.resize(dim);
      st.scale.resize(dim);
      for (auto& v : st.mean) v = body.f32();
      for (auto& v : st.scale) v = body.f32();
      model.classifier.standardizer = std::move(st);
    } else if (tag == "CBOK") {
      model.codebook = decode_codebook(body.bytes(length));
    } else if (tag == "KNN " || tag == "SVM " || tag == "MLP ") {
      if (have_classifier) r.fail("more than one classifier section");
      if (tag == "KNN ") model.classifier.model = decode_knn(body);
      else if (tag == "SVM ") model.classifier.model = decode_svm(body);
      else model.classifier.model = decode_mlp(body);
      have_classifier = true;
    } else {
      r.fail("unknown section '" + tag + "'");
    }
    if (!body.at_end()) body.fail("trailing bytes");
  }
  if (!r.at_end()) r.fail("trailing bytes");
  if (!have_meta) r.fail("missing META section");
  if (!have_classifier) r.fail("missing classifier section");

  const auto& tm = model.classifier;
  const ml::Family declared = ml::family_of(tm.spec);
  const ml::Family stored = tm.model.index() == 0   ? ml::Family::Knn
                            : tm.model.index() == 1 ? ml::Family::Svm
                                                    : ml::Family::Mlp;
  if (declared != stored) r.fail("classifier section does not match the declared family");
  if (static_cast<int>(model.class_names.size()) != tm.num_classes)
    r.fail("class name count does not match the class count");
  if (tm.standardizer && tm.standardizer->mean.size() != tm.input_dim)
    r.fail("standardizer dimension does not match the input dimension");
  if (model.extraction.method == FeatureMethod::SiftBow &&
      (!model.codebook || model.codebook->k() != tm.input_dim))
    r.fail("sift-bow model needs a codebook with k equal to the input dimension");
  return model;
}

void write_model(const std::filesystem::path& path, const PipelineModel& model) {
  write_file(path, encode_model(model));
}

PipelineModel read_model(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_model(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace siftwood::io
