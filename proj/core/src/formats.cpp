#include "siftwood/formats.hpp"

#include <fstream>
#include <iomanip>
#include <iterator>
#include <limits>
#include <sstream>

#include "binary_io.hpp"
#include "siftwood/errors.hpp"

namespace siftwood::io {
namespace {

constexpr std::uint32_t kVersion = 1;

void check_text_field(const std::string& s, const char* what) {
  if (s.find_first_of("\t\r\n") != std::string::npos)
    throw InvalidArgument(std::string(what) + " may not contain tabs or newlines: " + s);
}

std::ostream& float_precision(std::ostream& os) {
  return os << std::setprecision(std::numeric_limits<float>::max_digits10);
}

}  // namespace

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("short write to " + path.string());
}

DescriptorRecord DescriptorRecord::from(std::string image_id, const sift::KeypointDescriptor& d) {
  DescriptorRecord r;
  r.image_id = std::move(image_id);
  r.x = static_cast<float>(d.keypoint.x);
  r.y = static_cast<float>(d.keypoint.y);
  r.scale = static_cast<float>(d.keypoint.scale_sigma);
  r.orientation = static_cast<float>(d.keypoint.orientation);
  r.bins = d.bins;
  return r;
}

std::vector<std::uint8_t> encode_descriptors(std::span<const DescriptorRecord> records) {
  detail::ByteWriter w;
  w.raw("SWKD");
  w.u32(kVersion);
  w.u64(records.size());
  for (const auto& r : records) {
    w.str(r.image_id);
    for (float v : {r.x, r.y, r.scale, r.orientation}) w.f32(v);
    for (float v : r.bins) w.f32(v);
  }
  return std::move(w.bytes());
}

std::vector<DescriptorRecord> decode_descriptors(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, "descriptor file");
  r.expect_magic("SWKD");
  if (r.u32() != kVersion) r.fail("unsupported version");
  const std::uint64_t count = r.u64();
  std::vector<DescriptorRecord> out;
  for (std::uint64_t i = 0; i < count; ++i) {
    DescriptorRecord rec;
    rec.image_id = r.str();
    rec.x = r.f32();
    rec.y = r.f32();
    rec.scale = r.f32();
    rec.orientation = r.f32();
    for (float& v : rec.bins) v = r.f32();
    out.push_back(std::move(rec));
  }
  if (!r.at_end()) r.fail("trailing bytes");
  return out;
}

std::string descriptors_to_text(std::span<const DescriptorRecord> records) {
  std::ostringstream os;
  float_precision(os);
  os << "# siftwood-descriptors v1\n";
  for (const auto& r : records) {
    check_text_field(r.image_id, "image id");
    os << r.image_id << '\t' << r.x << '\t' << r.y << '\t' << r.scale << '\t' << r.orientation;
    for (float v : r.bins) os << '\t' << v;
    os << '\n';
  }
  return os.str();
}

std::vector<DescriptorRecord> descriptors_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "# siftwood-descriptors v1")
    throw FormatError("descriptor text: missing header line");
  std::vector<DescriptorRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    DescriptorRecord r;
    std::getline(fields, r.image_id, '\t');
    fields >> r.x >> r.y >> r.scale >> r.orientation;
    for (float& v : r.bins) fields >> v;
    if (!fields) throw FormatError("descriptor text: malformed line " + std::to_string(line_no));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::uint8_t> encode_codebook(const clustering::Codebook& cb) {
  detail::ByteWriter w;
  w.raw("SWCB");
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(cb.k()));
  w.u32(static_cast<std::uint32_t>(cb.dim()));
  w.u64(cb.seed);
  w.f64(cb.wcss);
  w.u32(static_cast<std::uint32_t>(cb.iterations));
  for (double v : cb.centroids.values()) w.f32(v);
  return std::move(w.bytes());
}

clustering::Codebook decode_codebook(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, "codebook file");
  r.expect_magic("SWCB");
  if (r.u32() != kVersion) r.fail("unsupported version");
  const std::uint32_t k = r.u32();
  const std::uint32_t dim = r.u32();
  if (k == 0 || dim == 0) r.fail("empty codebook");
  clustering::Codebook cb;
  cb.seed = r.u64();
  cb.wcss = r.f64();
  cb.iterations = r.u32();
  if (r.remaining() != static_cast<std::size_t>(k) * dim * 4) r.fail("centroid payload size mismatch");
  std::vector<double> values(static_cast<std::size_t>(k) * dim);
  for (double& v : values) v = r.f32();
  cb.centroids = clustering::PointSet(dim, std::move(values));
  return cb;
}

std::string codebook_to_text(const clustering::Codebook& cb) {
  std::ostringstream os;
  os << "# siftwood-codebook v1 k=" << cb.k() << " dim=" << cb.dim() << " seed=" << cb.seed
     << " wcss=" << std::setprecision(17) << cb.wcss << '\n';
  float_precision(os);
  for (std::size_t i = 0; i < cb.k(); ++i) {
    const auto c = cb.centroids[i];
    for (std::size_t d = 0; d < c.size(); ++d) os << (d ? " " : "") << static_cast<float>(c[d]);
    os << '\n';
  }
  return os.str();
}

std::vector<std::uint8_t> encode_feature_matrix(const FeatureMatrix& m) {
  detail::ByteWriter w;
  w.raw("SWFM");
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(m.method));
  w.u32(static_cast<std::uint32_t>(m.length));
  w.u64(m.rows.size());
  for (const auto& row : m.rows) {
    if (row.size() != m.length) throw InvalidArgument("feature matrix row has the wrong length");
    for (double v : row) w.f32(v);
  }
  return std::move(w.bytes());
}

FeatureMatrix decode_feature_matrix(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, "feature matrix file");
  r.expect_magic("SWFM");
  if (r.u32() != kVersion) r.fail("unsupported version");
  FeatureMatrix m;
  const std::uint32_t method = r.u32();
  if (method > 2) r.fail("unknown method code");
  m.method = static_cast<FeatureMethod>(method);
  m.length = r.u32();
  const std::uint64_t count = r.u64();
  if (r.remaining() != count * m.length * 4) r.fail("row payload size mismatch");
  m.rows.assign(count, std::vector<double>(m.length));
  for (auto& row : m.rows)
    for (double& v : row) v = r.f32();
  return m;
}

std::string feature_sidecar_text(const FeatureMatrix& m) {
  std::ostringstream os;
  for (std::size_t i = 0; i < m.info.size(); ++i) {
    check_text_field(m.info[i].class_name, "class name");
    check_text_field(m.info[i].path, "path");
    os << i << '\t' << m.info[i].class_id << '\t' << m.info[i].class_name << '\t'
       << m.info[i].path << '\n';
  }
  return os.str();
}

void parse_feature_sidecar(const std::string& text, FeatureMatrix& m) {
  std::istringstream in(text);
  std::string line;
  m.info.clear();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string index, class_id;
    FeatureRowInfo info;
    std::getline(fields, index, '\t');
    std::getline(fields, class_id, '\t');
    std::getline(fields, info.class_name, '\t');
    std::getline(fields, info.path);
    try {
      if (std::stoul(index) != m.info.size()) throw FormatError("feature sidecar: rows out of order");
      info.class_id = std::stoi(class_id);
    } catch (const std::logic_error&) {
      throw FormatError("feature sidecar: malformed line '" + line + "'");
    }
    m.info.push_back(std::move(info));
  }
  if (m.info.size() != m.rows.size())
    throw FormatError("feature sidecar has " + std::to_string(m.info.size()) +
                      " lines but the matrix has " + std::to_string(m.rows.size()) + " rows");
}

std::filesystem::path sidecar_path(const std::filesystem::path& matrix_path) {
  auto p = matrix_path;
  p += ".labels.tsv";
  return p;
}

}  // namespace siftwood::io
