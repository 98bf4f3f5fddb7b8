#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "siftwood/clustering.hpp"
#include "siftwood/features.hpp"
#include "siftwood/sift.hpp"

namespace siftwood::io {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, const std::string& text);

// ---------------------------------------------------------------------------
// Descriptor dump.
//
// Binary: "SWKD", u32 version (1), u64 record count, then per record
//   u32 id length, id bytes (UTF-8), f32 x, y, scale, orientation, f32[128].
// Text: a "# siftwood-descriptors v1" line, then one tab-separated line per
//   record: image_id x y scale orientation d0 ... d127.
// All integers and floats little-endian.

struct DescriptorRecord {
  std::string image_id;
  float x = 0.0f;
  float y = 0.0f;
  float scale = 0.0f;
  float orientation = 0.0f;
  std::array<float, sift::kDescriptorLength> bins{};

  static DescriptorRecord from(std::string image_id, const sift::KeypointDescriptor& d);
};

std::vector<std::uint8_t> encode_descriptors(std::span<const DescriptorRecord> records);
std::vector<DescriptorRecord> decode_descriptors(std::span<const std::uint8_t> bytes);
std::string descriptors_to_text(std::span<const DescriptorRecord> records);
std::vector<DescriptorRecord> descriptors_from_text(const std::string& text);

// ---------------------------------------------------------------------------
// Codebook.
//
// Binary: "SWCB", u32 version (1), u32 k, u32 dim, u64 seed, f64 WCSS,
//   u32 iterations, then k*dim f32 centroid values row-major.
// Text: "# siftwood-codebook v1 k=<k> dim=<dim> seed=<seed> wcss=<wcss>"
//   followed by one whitespace-separated centroid per line.

std::vector<std::uint8_t> encode_codebook(const clustering::Codebook& codebook);
clustering::Codebook decode_codebook(std::span<const std::uint8_t> bytes);
std::string codebook_to_text(const clustering::Codebook& codebook);

// ---------------------------------------------------------------------------
// Feature matrix.
//
// Binary: "SWFM", u32 version (1), u32 method (0 sift-bow, 1 lbp, 2 glcm),
//   u32 length, u64 row count, then rows of f32.
// Sidecar (text, one line per row): index <TAB> class_id <TAB> class_name <TAB> path.

struct FeatureRowInfo {
  int class_id = 0;
  std::string class_name;
  std::string path;
};

struct FeatureMatrix {
  FeatureMethod method = FeatureMethod::SiftBow;
  std::size_t length = 0;
  std::vector<std::vector<double>> rows;
  std::vector<FeatureRowInfo> info;
};

std::vector<std::uint8_t> encode_feature_matrix(const FeatureMatrix& m);
FeatureMatrix decode_feature_matrix(std::span<const std::uint8_t> bytes);
std::string feature_sidecar_text(const FeatureMatrix& m);
void parse_feature_sidecar(const std::string& text, FeatureMatrix& m);

std::filesystem::path sidecar_path(const std::filesystem::path& matrix_path);

}  // namespace siftwood::io
