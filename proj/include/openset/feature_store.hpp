#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace openset {

/// One sample's concatenated activation vector plus its labels.
struct SampleRecord {
  std::uint32_t sample_id = 0;
  /// Class index in [0, C), or kUnknownLabel for unknown-class samples.
  std::int32_t true_label = -1;
  std::int32_t predicted_label = 0;
  std::vector<float> features;

  bool operator==(const SampleRecord&) const = default;
};

inline constexpr std::int32_t kUnknownLabel = -1;

struct ManifestInfo {
  std::string backbone_name = "unknown";
  std::vector<std::string> layer_names = {"features"};
  std::string pooling = "global_average";
  std::optional<std::vector<std::string>> class_names;
  std::string source_dataset;

  bool operator==(const ManifestInfo&) const = default;
};

bool is_recognized_pooling(const std::string& tag);

struct FeatureDataset {
  std::uint32_t dim = 0;
  std::uint32_t num_classes = 0;
  std::vector<SampleRecord> records;
  ManifestInfo manifest;

  bool operator==(const FeatureDataset&) const = default;
};

struct Violation {
  /// Absent for dataset-level problems (header or manifest).
  std::optional<std::uint32_t> sample_id;
  std::string field;
  std::string message;
};

std::vector<Violation> validate(const FeatureDataset& dataset);

/// Formats a violation as "sample 3: features[2]: non-finite value".
std::string describe(const Violation& v);

// GMF v1 layout, little-endian:
//   "GEMF" | u32 version=1 | u32 n_samples | u32 D | u32 C
//   n_samples x { i32 true_label | i32 predicted_label | D x f32 }
// sample_id is the 0-based record position. The manifest lives next to the
// binary as "<path>.manifest.json".
inline constexpr char kGmfMagic[4] = {'G', 'E', 'M', 'F'};
inline constexpr std::uint32_t kGmfVersion = 1;
inline constexpr std::size_t kGmfHeaderSize = 20;

std::size_t gmf_file_size(std::size_t n_samples, std::size_t dim);

std::filesystem::path manifest_path(const std::filesystem::path& path);

/// Throws DataError if the dataset is invalid or if a record's sample_id is
/// not its position (ids are implicit in the file).
void write_dataset(const FeatureDataset& dataset,
                   const std::filesystem::path& path);

/// Reads and validates a GMF file. A missing manifest yields the default
/// ManifestInfo.
FeatureDataset read_dataset(const std::filesystem::path& path);

}  // namespace openset
