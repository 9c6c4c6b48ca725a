#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rsa/error.hpp"

namespace rsa {

enum class Condition { Sentence, Picture, Word };
enum class Network { LanguageLH, LanguageRH, Visual };

std::string_view to_string(Condition c);
std::string_view to_string(Network n);
Condition parse_condition(std::string_view s);
/// Throws UnknownNetwork for anything outside {language_lh, language_rh, visual}.
Network parse_network(std::string_view s);
bool is_language_network(Network n);

/// Dense row-major float32 matrix; rows are concepts.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0F) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<float> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<const float> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<float> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  float operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  float& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  const std::vector<float>& data() const noexcept { return data_; }

  /// Rows picked in the given order.
  Matrix select_rows(std::span<const std::size_t> indices) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
};

struct LayerMatrix {
  int layer_index = 0;
  Matrix data;  // n_concepts x dim

  std::size_t dim() const noexcept { return data.cols(); }
};

struct RepresentationSet {
  std::string model_name;
  Condition condition = Condition::Sentence;
  std::vector<std::string> concepts;
  std::vector<LayerMatrix> layers;
  std::string provenance;
};

struct ParticipantMatrix {
  std::string participant_id;
  Matrix data;  // n_concepts x n_voxels

  std::size_t n_voxels() const noexcept { return data.cols(); }
};

struct BrainResponseSet {
  std::string dataset_name;
  Condition condition = Condition::Sentence;
  Network network = Network::LanguageLH;
  std::vector<std::string> concepts;
  std::vector<ParticipantMatrix> participants;
};

/// Lowercases ASCII letters; concept identifiers are compared after this.
std::string normalize_concept(std::string_view word);

// Validation. Each throws rsa::Error with the code named in its comment.

/// DuplicateConcept, EmptyDataset, ShapeMismatch, NonFiniteValue, ZeroNormRow.
void validate(const RepresentationSet& set);
/// DuplicateConcept, EmptyDataset, ShapeMismatch, NonFiniteValue, ConstantRow.
void validate(const BrainResponseSet& set);

RepresentationSet load_representation_set(const std::filesystem::path& manifest_path);
/// `network` is taken from the manifest's optional "network" key when present,
/// else from `default_network`.
BrainResponseSet load_brain_set(const std::filesystem::path& manifest_path,
                                Network default_network = Network::LanguageLH);

/// Writes `<dir>/<stem>.json` plus one `.f32` file per layer.
std::filesystem::path write_representation_set(const RepresentationSet& set,
                                               const std::filesystem::path& dir,
                                               const std::string& stem);
std::filesystem::path write_brain_set(const BrainResponseSet& set, const std::filesystem::path& dir,
                                      const std::string& stem);

struct ConceptAlignment {
  std::vector<std::size_t> a_indices;
  std::vector<std::size_t> b_indices;

  std::size_t size() const noexcept { return a_indices.size(); }
  bool is_identity(std::size_t a_size, std::size_t b_size) const;
};

/// Shared concepts in a's order. Throws EmptyIntersection when none are shared.
ConceptAlignment intersect_concepts(std::span<const std::string> a, std::span<const std::string> b);

}  // namespace rsa
