#include "rsa/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "rsa/io.hpp"

namespace rsa {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidManifest: return "InvalidManifest";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::ZeroNormRow: return "ZeroNormRow";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::DuplicateConcept: return "DuplicateConcept";
    case ErrorCode::ConstantRow: return "ConstantRow";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::ConceptMismatch: return "ConceptMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ConstantVector: return "ConstantVector";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NoDerangementExists: return "NoDerangementExists";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SingleSubjectLowerBound: return "SingleSubjectLowerBound";
    case ErrorCode::UnknownNetwork: return "UnknownNetwork";
    case ErrorCode::MissingConcretenessRating: return "MissingConcretenessRating";
    case ErrorCode::MissingWordEmbedding: return "MissingWordEmbedding";
    case ErrorCode::DuplicatePair: return "DuplicatePair";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::Sentence: return "sentence";
    case Condition::Picture: return "picture";
    case Condition::Word: return "word";
  }
  return "sentence";
}

std::string_view to_string(Network n) {
  switch (n) {
    case Network::LanguageLH: return "language_lh";
    case Network::LanguageRH: return "language_rh";
    case Network::Visual: return "visual";
  }
  return "language_lh";
}

Condition parse_condition(std::string_view s) {
  if (s == "sentence") return Condition::Sentence;
  if (s == "picture") return Condition::Picture;
  if (s == "word") return Condition::Word;
  throw Error(ErrorCode::InvalidManifest, "unknown condition '" + std::string(s) + "'");
}

Network parse_network(std::string_view s) {
  if (s == "language_lh") return Network::LanguageLH;
  if (s == "language_rh") return Network::LanguageRH;
  if (s == "visual") return Network::Visual;
  throw Error(ErrorCode::UnknownNetwork, "unknown network '" + std::string(s) + "'");
}

bool is_language_network(Network n) { return n == Network::LanguageLH || n == Network::LanguageRH; }

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::SizeMismatch, "matrix data length " + std::to_string(data_.size()) +
                                             " != " + std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    auto src = row(indices[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

std::string normalize_concept(std::string_view word) {
  std::string out(word);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

namespace {

void check_concepts(const std::vector<std::string>& concepts) {
  if (concepts.empty()) throw Error(ErrorCode::EmptyDataset, "concept list is empty");
  std::unordered_set<std::string> seen;
  for (const auto& c : concepts) {
    if (!seen.insert(c).second) throw Error(ErrorCode::DuplicateConcept, "duplicate concept '" + c + "'");
  }
}

void check_finite(const Matrix& m, const std::string& where) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (float v : m.row(r)) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFiniteValue, where + ": non-finite value in row " + std::to_string(r));
      }
    }
  }
}

}  // namespace

void validate(const RepresentationSet& set) {
  check_concepts(set.concepts);
  if (set.layers.empty()) throw Error(ErrorCode::EmptyDataset, "representation set has no layers");
  std::unordered_set<int> indices;
  for (const auto& layer : set.layers) {
    if (!indices.insert(layer.layer_index).second) {
      throw Error(ErrorCode::InvalidManifest, "layer index " + std::to_string(layer.layer_index) + " listed twice");
    }
  }
  for (const auto& layer : set.layers) {
    const auto where = "layer " + std::to_string(layer.layer_index);
    if (layer.layer_index < 0) throw Error(ErrorCode::InvalidManifest, where + ": negative layer index");
    if (layer.data.rows() != set.concepts.size()) {
      throw Error(ErrorCode::ShapeMismatch, where + ": " + std::to_string(layer.data.rows()) +
                                                " rows for " + std::to_string(set.concepts.size()) + " concepts");
    }
    if (layer.dim() < 1) throw Error(ErrorCode::InvalidManifest, where + ": dim must be >= 1");
    check_finite(layer.data, where);
    for (std::size_t r = 0; r < layer.data.rows(); ++r) {
      double sq = 0.0;
      for (float v : layer.data.row(r)) sq += static_cast<double>(v) * v;
      if (!(sq > 0.0)) {
        throw Error(ErrorCode::ZeroNormRow, where + ": zero-norm row for concept '" + set.concepts[r] + "'");
      }
    }
  }
}

void validate(const BrainResponseSet& set) {
  check_concepts(set.concepts);
  if (set.participants.empty()) throw Error(ErrorCode::EmptyDataset, "brain set has no participants");
  for (const auto& p : set.participants) {
    const auto where = "participant " + p.participant_id;
    if (p.data.rows() != set.concepts.size()) {
      throw Error(ErrorCode::ShapeMismatch, where + ": " + std::to_string(p.data.rows()) + " rows for " +
                                                std::to_string(set.concepts.size()) + " concepts");
    }
    if (p.n_voxels() < 2) throw Error(ErrorCode::InvalidManifest, where + ": n_voxels must be >= 2");
    check_finite(p.data, where);
    for (std::size_t r = 0; r < p.data.rows(); ++r) {
      auto row = p.data.row(r);
      if (std::all_of(row.begin(), row.end(), [&](float v) { return v == row.front(); })) {
        throw Error(ErrorCode::ConstantRow, where + ": constant row for concept '" + set.concepts[r] + "'");
      }
    }
  }
}

namespace {

json parse_manifest(const fs::path& path) {
  const auto text = io::read_text_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidManifest, path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::InvalidManifest, path.string() + ": manifest is not an object");
  return doc;
}

template <typename T>
T field(const json& doc, const char* key) {
  if (!doc.contains(key)) throw Error(ErrorCode::InvalidManifest, std::string("missing field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidManifest, std::string("field '") + key + "' has the wrong type");
  }
}

void expect_value(const json& doc, const char* key, std::string_view expected) {
  const auto got = field<std::string>(doc, key);
  if (got != expected) {
    throw Error(ErrorCode::InvalidManifest,
                std::string("field '") + key + "' must be \"" + std::string(expected) + "\", got \"" + got + "\"");
  }
}

void check_header(const json& doc, std::string_view kind) {
  expect_value(doc, "kind", kind);
  expect_value(doc, "dtype", "float32");
  expect_value(doc, "byte_order", "little-endian");
  expect_value(doc, "layout", "row-major");
  const bool has_layers = doc.contains("layers");
  const bool has_participants = doc.contains("participants");
  if (has_layers == has_participants) {
    throw Error(ErrorCode::InvalidManifest, "exactly one of 'layers' or 'participants' must be present");
  }
}

std::vector<std::string> read_concepts(const json& doc) {
  auto raw = field<std::vector<std::string>>(doc, "concepts");
  std::vector<std::string> out;
  out.reserve(raw.size());
  for (const auto& c : raw) out.push_back(normalize_concept(c));
  check_concepts(out);
  return out;
}

std::size_t positive_int(const json& entry, const char* key, long long min_value) {
  const auto v = field<long long>(entry, key);
  if (v < min_value) {
    throw Error(ErrorCode::InvalidManifest,
                std::string("field '") + key + "' must be >= " + std::to_string(min_value));
  }
  return static_cast<std::size_t>(v);
}

json header_json(std::string_view name, std::string_view kind, Condition condition,
                 const std::vector<std::string>& concepts) {
  json doc;
  doc["name"] = name;
  doc["kind"] = kind;
  doc["condition"] = to_string(condition);
  doc["concepts"] = concepts;
  doc["dtype"] = "float32";
  doc["byte_order"] = "little-endian";
  doc["layout"] = "row-major";
  return doc;
}

}  // namespace

RepresentationSet load_representation_set(const fs::path& manifest_path) {
  const auto doc = parse_manifest(manifest_path);
  check_header(doc, "representations");
  if (!doc.contains("layers")) throw Error(ErrorCode::InvalidManifest, "representations manifest needs 'layers'");

  RepresentationSet set;
  set.model_name = field<std::string>(doc, "name");
  set.condition = parse_condition(field<std::string>(doc, "condition"));
  set.concepts = read_concepts(doc);
  if (doc.contains("provenance") && doc["provenance"].is_string()) set.provenance = doc["provenance"];

  const auto& layers = doc["layers"];
  if (!layers.is_array() || layers.empty()) throw Error(ErrorCode::EmptyDataset, "no layers listed");
  const auto base = manifest_path.parent_path();
  const auto n = set.concepts.size();
  for (const auto& entry : layers) {
    const auto index = positive_int(entry, "index", 0);
    const auto dim = positive_int(entry, "dim", 1);
    auto values = io::read_f32_le(base / field<std::string>(entry, "file"), n * dim);
    set.layers.push_back({static_cast<int>(index), Matrix(n, dim, std::move(values))});
  }
  validate(set);
  return set;
}

BrainResponseSet load_brain_set(const fs::path& manifest_path, Network default_network) {
  const auto doc = parse_manifest(manifest_path);
  check_header(doc, "brain");
  if (!doc.contains("participants")) throw Error(ErrorCode::InvalidManifest, "brain manifest needs 'participants'");

  BrainResponseSet set;
  set.dataset_name = field<std::string>(doc, "name");
  set.condition = parse_condition(field<std::string>(doc, "condition"));
  if (set.condition == Condition::Word) {
    throw Error(ErrorCode::InvalidManifest, "brain sets support sentence or picture conditions only");
  }
  set.network = doc.contains("network") ? parse_network(field<std::string>(doc, "network")) : default_network;
  set.concepts = read_concepts(doc);

  const auto& participants = doc["participants"];
  if (!participants.is_array() || participants.empty()) {
    throw Error(ErrorCode::EmptyDataset, "no participants listed");
  }
  const auto base = manifest_path.parent_path();
  const auto n = set.concepts.size();
  for (const auto& entry : participants) {
    const auto voxels = positive_int(entry, "n_voxels", 2);
    auto values = io::read_f32_le(base / field<std::string>(entry, "file"), n * voxels);
    set.participants.push_back({field<std::string>(entry, "id"), Matrix(n, voxels, std::move(values))});
  }
  validate(set);
  return set;
}

fs::path write_representation_set(const RepresentationSet& set, const fs::path& dir, const std::string& stem) {
  validate(set);
  auto doc = header_json(set.model_name, "representations", set.condition, set.concepts);
  if (!set.provenance.empty()) doc["provenance"] = set.provenance;
  doc["layers"] = json::array();
  for (const auto& layer : set.layers) {
    const auto file = stem + ".layer" + std::to_string(layer.layer_index) + ".f32";
    io::write_file_atomic(dir / file, io::encode_f32_le(layer.data.data()));
    doc["layers"].push_back({{"index", layer.layer_index}, {"dim", layer.dim()}, {"file", file}});
  }
  const auto manifest = dir / (stem + ".json");
  io::write_file_atomic(manifest, doc.dump(2) + "\n");
  return manifest;
}

fs::path write_brain_set(const BrainResponseSet& set, const fs::path& dir, const std::string& stem) {
  validate(set);
  auto doc = header_json(set.dataset_name, "brain", set.condition, set.concepts);
  doc["network"] = to_string(set.network);
  doc["participants"] = json::array();
  for (const auto& p : set.participants) {
    const auto file = stem + "." + p.participant_id + ".f32";
    io::write_file_atomic(dir / file, io::encode_f32_le(p.data.data()));
    doc["participants"].push_back({{"id", p.participant_id}, {"n_voxels", p.n_voxels()}, {"file", file}});
  }
  const auto manifest = dir / (stem + ".json");
  io::write_file_atomic(manifest, doc.dump(2) + "\n");
  return manifest;
}

bool ConceptAlignment::is_identity(std::size_t a_size, std::size_t b_size) const {
  if (a_size != b_size || a_indices.size() != a_size) return false;
  for (std::size_t i = 0; i < a_indices.size(); ++i) {
    if (a_indices[i] != i || b_indices[i] != i) return false;
  }
  return true;
}

ConceptAlignment intersect_concepts(std::span<const std::string> a, std::span<const std::string> b) {
  std::unordered_map<std::string_view, std::size_t> b_pos;
  for (std::size_t j = 0; j < b.size(); ++j) b_pos.emplace(b[j], j);
  ConceptAlignment out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (auto it = b_pos.find(a[i]); it != b_pos.end()) {
      out.a_indices.push_back(i);
      out.b_indices.push_back(it->second);
    }
  }
  if (out.a_indices.empty()) throw Error(ErrorCode::EmptyIntersection, "concept lists share no concepts");
  return out;
}

}  // namespace rsa
