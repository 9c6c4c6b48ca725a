#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rsa/core.hpp"

namespace rsa {

/// Condensed representational dissimilarity matrix: the strict upper triangle
/// of an n x n cosine-distance matrix, pairs (i,j) with i<j in row-major order.
class Rdm {
 public:
  Rdm(std::size_t n, std::vector<double> values, std::string source_label = {});

  std::size_t n() const noexcept { return n_; }
  std::span<const double> values() const noexcept { return values_; }
  const std::string& source_label() const noexcept { return label_; }

  double at(std::size_t i, std::size_t j) const;

  friend bool operator==(const Rdm& a, const Rdm& b) { return a.n_ == b.n_ && a.values_ == b.values_; }

 private:
  std::size_t n_;
  std::vector<double> values_;
  std::string label_;
};

constexpr std::size_t condensed_length(std::size_t n) noexcept { return n < 2 ? 0 : n * (n - 1) / 2; }

/// Position of pair (i,j), i != j, in the condensed vector.
constexpr std::size_t condensed_index(std::size_t n, std::size_t i, std::size_t j) noexcept {
  if (i > j) std::swap(i, j);
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

/// 1 - cos(u,v) in double precision, clamped to [0,2].
/// Throws DimensionMismatch or ZeroNorm.
double cosine_distance(std::span<const float> u, std::span<const float> v);
double cosine_distance(std::span<const double> u, std::span<const double> v);

/// Data-parallel over pairs; the result does not depend on the thread count.
Rdm compute_rdm(const Matrix& m, std::string label = {});
/// Same, for an n x d row-major double matrix.
Rdm compute_rdm(std::span<const double> row_major, std::size_t n, std::size_t d, std::string label = {});

/// Element-wise mean of k equally shaped matrices (accumulated in double).
Matrix mean_over_contexts(std::span<const Matrix> stack);

/// Spearman correlation of the two condensed vectors.
double rdm_correlation(const Rdm& a, const Rdm& b);

/// Condensed vector of the RDM obtained by permuting concept rows with `perm`
/// (row r of the permuted matrix is original row perm[r]).
std::vector<double> permute_condensed(const Rdm& rdm, std::span<const std::size_t> perm);

/// Element-wise mean of k RDMs of equal n.
Rdm mean_rdm(std::span<const Rdm> rdms);

// Dump format: manifest JSON (kind "rdm") + little-endian float64 condensed vector.
std::filesystem::path write_rdm(const Rdm& rdm, const std::vector<std::string>& concepts,
                                const std::filesystem::path& dir, const std::string& stem);

struct LoadedRdm {
  Rdm rdm;
  std::vector<std::string> concepts;
};
LoadedRdm load_rdm(const std::filesystem::path& manifest_path);

}  // namespace rsa
