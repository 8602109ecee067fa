#include "openset/feature_store.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "openset/error.hpp"

namespace openset {
namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

nlohmann::json manifest_to_json(const ManifestInfo& m) {
  nlohmann::json j;
  j["backbone_name"] = m.backbone_name;
  j["layer_names"] = m.layer_names;
  j["pooling"] = m.pooling;
  j["class_names"] = m.class_names ? nlohmann::json(*m.class_names) : nlohmann::json(nullptr);
  j["source_dataset"] = m.source_dataset;
  return j;
}

ManifestInfo manifest_from_json(const nlohmann::json& j) {
  ManifestInfo m;
  m.backbone_name = j.at("backbone_name").get<std::string>();
  m.layer_names = j.at("layer_names").get<std::vector<std::string>>();
  m.pooling = j.at("pooling").get<std::string>();
  if (j.contains("class_names") && !j.at("class_names").is_null()) {
    m.class_names = j.at("class_names").get<std::vector<std::string>>();
  }
  m.source_dataset = j.value("source_dataset", std::string{});
  return m;
}

}  // namespace

bool is_recognized_pooling(const std::string& tag) {
  return tag == "global_average" || tag == "max" || tag == "none";
}

std::vector<Violation> validate(const FeatureDataset& d) {
  std::vector<Violation> out;
  if (d.dim == 0) out.push_back({std::nullopt, "dim", "must be positive"});
  if (d.num_classes == 0) out.push_back({std::nullopt, "num_classes", "must be positive"});
  if (d.manifest.layer_names.empty()) {
    out.push_back({std::nullopt, "manifest.layer_names", "must be non-empty"});
  }
  if (!is_recognized_pooling(d.manifest.pooling)) {
    out.push_back({std::nullopt, "manifest.pooling", "unrecognized tag '" + d.manifest.pooling + "'"});
  }
  if (d.manifest.class_names && d.manifest.class_names->size() != d.num_classes) {
    out.push_back({std::nullopt, "manifest.class_names", "expected " + std::to_string(d.num_classes) +
                                                             " names, got " +
                                                             std::to_string(d.manifest.class_names->size())});
  }

  const auto C = static_cast<std::int64_t>(d.num_classes);
  std::unordered_set<std::uint32_t> seen;
  seen.reserve(d.records.size());
  for (const auto& r : d.records) {
    if (!seen.insert(r.sample_id).second) {
      out.push_back({r.sample_id, "sample_id", "duplicate id"});
    }
    if (r.predicted_label < 0 || r.predicted_label >= C) {
      out.push_back({r.sample_id, "predicted_label",
                     "value " + std::to_string(r.predicted_label) + " outside [0, " + std::to_string(C) + ")"});
    }
    if (r.true_label != kUnknownLabel && (r.true_label < 0 || r.true_label >= C)) {
      out.push_back({r.sample_id, "true_label",
                     "value " + std::to_string(r.true_label) + " outside {-1} U [0, " + std::to_string(C) + ")"});
    }
    if (r.features.size() != d.dim) {
      out.push_back({r.sample_id, "features",
                     "expected " + std::to_string(d.dim) + " values, got " + std::to_string(r.features.size())});
      continue;
    }
    for (std::size_t j = 0; j < r.features.size(); ++j) {
      if (!std::isfinite(r.features[j])) {
        out.push_back({r.sample_id, "features[" + std::to_string(j) + "]", "non-finite value"});
      }
    }
  }
  return out;
}

std::string describe(const Violation& v) {
  std::string s;
  if (v.sample_id) s += "sample " + std::to_string(*v.sample_id) + ": ";
  return s + v.field + ": " + v.message;
}

std::size_t gmf_file_size(std::size_t n_samples, std::size_t dim) {
  return kGmfHeaderSize + n_samples * (8 + 4 * dim);
}

std::filesystem::path manifest_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".manifest.json");
}

void write_dataset(const FeatureDataset& d, const std::filesystem::path& path) {
  if (auto v = validate(d); !v.empty()) {
    std::string msg = "invalid dataset (" + std::to_string(v.size()) + " violations); first: " + describe(v.front());
    throw DataError(msg);
  }
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    if (d.records[i].sample_id != i) {
      throw DataError("record " + std::to_string(i) + ": sample_id " + std::to_string(d.records[i].sample_id) +
                      " does not match its position");
    }
  }

  std::string buf;
  buf.reserve(gmf_file_size(d.records.size(), d.dim));
  buf.append(kGmfMagic, 4);
  put_u32(buf, kGmfVersion);
  put_u32(buf, static_cast<std::uint32_t>(d.records.size()));
  put_u32(buf, d.dim);
  put_u32(buf, d.num_classes);
  for (const auto& r : d.records) {
    put_u32(buf, std::bit_cast<std::uint32_t>(r.true_label));
    put_u32(buf, std::bit_cast<std::uint32_t>(r.predicted_label));
    for (float f : r.features) put_u32(buf, std::bit_cast<std::uint32_t>(f));
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DataError("write failed for '" + path.string() + "'");
  out.close();

  std::ofstream mf(manifest_path(path), std::ios::trunc);
  if (!mf) throw DataError("cannot open '" + manifest_path(path).string() + "' for writing");
  mf << manifest_to_json(d.manifest).dump(2) << '\n';
  if (!mf) throw DataError("write failed for '" + manifest_path(path).string() + "'");
}

FeatureDataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* bytes = reinterpret_cast<const unsigned char*>(buf.data());

  if (buf.size() < kGmfHeaderSize) {
    throw DataError(path.string() + ": truncated header (" + std::to_string(buf.size()) + " of " +
                    std::to_string(kGmfHeaderSize) + " bytes)");
  }
  if (std::memcmp(buf.data(), kGmfMagic, 4) != 0) {
    throw DataError(path.string() + ": bad magic (expected \"GEMF\")");
  }
  const std::uint32_t version = get_u32(bytes + 4);
  if (version != kGmfVersion) {
    throw DataError(path.string() + ": unsupported version " + std::to_string(version));
  }

  FeatureDataset d;
  const std::uint32_t n = get_u32(bytes + 8);
  d.dim = get_u32(bytes + 12);
  d.num_classes = get_u32(bytes + 16);

  const std::size_t expected = gmf_file_size(n, d.dim);
  if (buf.size() != expected) {
    throw DataError(path.string() + ": " + (buf.size() < expected ? "truncated body" : "trailing bytes") +
                    ": expected " + std::to_string(expected) + " bytes, got " + std::to_string(buf.size()));
  }

  d.records.resize(n);
  const unsigned char* p = bytes + kGmfHeaderSize;
  for (std::uint32_t i = 0; i < n; ++i) {
    auto& r = d.records[i];
    r.sample_id = i;
    r.true_label = std::bit_cast<std::int32_t>(get_u32(p));
    r.predicted_label = std::bit_cast<std::int32_t>(get_u32(p + 4));
    p += 8;
    r.features.resize(d.dim);
    for (std::uint32_t j = 0; j < d.dim; ++j, p += 4) r.features[j] = std::bit_cast<float>(get_u32(p));
  }

  if (const auto mp = manifest_path(path); std::filesystem::exists(mp)) {
    std::ifstream mf(mp);
    try {
      d.manifest = manifest_from_json(nlohmann::json::parse(mf));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(mp.string() + ": " + e.what());
    }
  }

  if (auto v = validate(d); !v.empty()) {
    throw DataError(path.string() + ": " + describe(v.front()));
  }
  return d;
}

}  // namespace openset
