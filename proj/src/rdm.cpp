#include "rsa/rdm.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>
#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include "rsa/io.hpp"
#include "rsa/stats.hpp"

namespace rsa {

namespace fs = std::filesystem;
using nlohmann::json;

Rdm::Rdm(std::size_t n, std::vector<double> values, std::string source_label)
    : n_(n), values_(std::move(values)), label_(std::move(source_label)) {
  if (n_ < 2) throw Error(ErrorCode::InvalidArgument, "an RDM needs at least 2 concepts");
  if (values_.size() != condensed_length(n_)) {
    throw Error(ErrorCode::SizeMismatch, "condensed length " + std::to_string(values_.size()) +
                                             " does not match n=" + std::to_string(n_));
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0 || v > 2.0) {
      throw Error(ErrorCode::InvalidArgument, "RDM entry outside [0,2]: " + io::format_double(v));
    }
  }
}

double Rdm::at(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  return values_[condensed_index(n_, i, j)];
}

namespace {

template <typename T>
double squared_norm(std::span<const T> u) {
  double s = 0.0;
  for (T x : u) s += static_cast<double>(x) * static_cast<double>(x);
  return s;
}

template <typename T>
double dot(std::span<const T> u, std::span<const T> v) {
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += static_cast<double>(u[k]) * static_cast<double>(v[k]);
  return s;
}

// sqrt(|u|^2 |v|^2) is exact for u == v, so identical rows give distance 0.
double distance_from(double uv, double uu, double vv) {
  const double d = 1.0 - uv / std::sqrt(uu * vv);
  return std::clamp(d, 0.0, 2.0);
}

template <typename T>
double cosine_distance_impl(std::span<const T> u, std::span<const T> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "vectors of length " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
  }
  const double uu = squared_norm(u);
  const double vv = squared_norm(v);
  if (!(uu > 0.0) || !(vv > 0.0)) throw Error(ErrorCode::ZeroNorm, "cosine distance of a zero-norm vector");
  return distance_from(dot(u, v), uu, vv);
}

}  // namespace

double cosine_distance(std::span<const float> u, std::span<const float> v) { return cosine_distance_impl(u, v); }
double cosine_distance(std::span<const double> u, std::span<const double> v) {
  return cosine_distance_impl(u, v);
}

Rdm compute_rdm(const Matrix& m, std::string label) {
  // Promote once; every pair then reads the same double-precision rows.
  std::vector<double> rows(m.data().begin(), m.data().end());
  return compute_rdm(rows, m.rows(), m.cols(), std::move(label));
}

Rdm compute_rdm(std::span<const double> rows, std::size_t n, std::size_t d, std::string label) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "compute_rdm needs at least 2 rows");
  if (rows.size() != n * d) throw Error(ErrorCode::ShapeMismatch, "row-major data does not match n x d");
  auto row = [&](std::size_t i) { return rows.subspan(i * d, d); };

  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    norms[i] = squared_norm(row(i));
    if (!(norms[i] > 0.0)) {
      const std::size_t other = i == 0 ? 1 : 0;
      throw Error(ErrorCode::ZeroNorm, "pair (" + std::to_string(std::min(i, other)) + "," +
                                           std::to_string(std::max(i, other)) + "): row " + std::to_string(i) +
                                           " has zero norm");
    }
  }

  std::vector<double> values(condensed_length(n));
  // Each row i owns the contiguous block of pairs (i, j>i); entries are
  // computed independently, so scheduling cannot change the result.
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n - 1), [&](const tbb::blocked_range<std::size_t>& r) {
    for (std::size_t i = r.begin(); i != r.end(); ++i) {
      const auto ui = row(i);
      std::size_t k = condensed_index(n, i, i + 1);
      for (std::size_t j = i + 1; j < n; ++j, ++k) {
        values[k] = distance_from(dot(ui, row(j)), norms[i], norms[j]);
      }
    }
  });
  return Rdm(n, std::move(values), std::move(label));
}

Matrix mean_over_contexts(std::span<const Matrix> stack) {
  if (stack.empty()) throw Error(ErrorCode::InvalidArgument, "mean_over_contexts needs at least one matrix");
  const auto rows = stack.front().rows();
  const auto cols = stack.front().cols();
  std::vector<double> acc(rows * cols, 0.0);
  for (const auto& m : stack) {
    if (m.rows() != rows || m.cols() != cols) {
      throw Error(ErrorCode::ShapeMismatch, "context matrices differ in shape");
    }
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += m.data()[i];
  }
  std::vector<float> out(acc.size());
  const double k = static_cast<double>(stack.size());
  std::transform(acc.begin(), acc.end(), out.begin(), [k](double s) { return static_cast<float>(s / k); });
  return Matrix(rows, cols, std::move(out));
}

double rdm_correlation(const Rdm& a, const Rdm& b) {
  if (a.n() != b.n()) {
    throw Error(ErrorCode::SizeMismatch,
                "RDMs over " + std::to_string(a.n()) + " and " + std::to_string(b.n()) + " concepts");
  }
  return spearman(a.values(), b.values());
}

std::vector<double> permute_condensed(const Rdm& rdm, std::span<const std::size_t> perm) {
  const auto map = condensed_permutation(rdm.n(), perm);
  std::vector<double> out(map.size());
  for (std::size_t k = 0; k < map.size(); ++k) out[k] = rdm.values()[map[k]];
  return out;
}

Rdm mean_rdm(std::span<const Rdm> rdms) {
  if (rdms.empty()) throw Error(ErrorCode::InvalidArgument, "mean of zero RDMs");
  const auto n = rdms.front().n();
  std::vector<double> acc(condensed_length(n), 0.0);
  for (const auto& r : rdms) {
    if (r.n() != n) throw Error(ErrorCode::SizeMismatch, "RDMs differ in concept count");
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += r.values()[k];
  }
  const double k = static_cast<double>(rdms.size());
  for (auto& v : acc) v = std::clamp(v / k, 0.0, 2.0);
  return Rdm(n, std::move(acc), "mean");
}

fs::path write_rdm(const Rdm& rdm, const std::vector<std::string>& concepts, const fs::path& dir,
                   const std::string& stem) {
  if (concepts.size() != rdm.n()) throw Error(ErrorCode::ShapeMismatch, "concept list does not match RDM size");
  const auto file = stem + ".f64";
  io::write_file_atomic(dir / file, io::encode_f64_le(rdm.values()));
  json doc;
  doc["name"] = rdm.source_label();
  doc["kind"] = "rdm";
  doc["concepts"] = concepts;
  doc["dtype"] = "float64";
  doc["byte_order"] = "little-endian";
  doc["layout"] = "condensed-upper-triangle";
  doc["n"] = rdm.n();
  doc["condensed_length"] = rdm.values().size();
  doc["file"] = file;
  const auto manifest = dir / (stem + ".json");
  io::write_file_atomic(manifest, doc.dump(2) + "\n");
  return manifest;
}

LoadedRdm load_rdm(const fs::path& manifest_path) {
  const auto text = io::read_text_file(manifest_path);
  try {
    const auto doc = json::parse(text);
    if (doc.at("kind") != "rdm" || doc.at("dtype") != "float64" || doc.at("byte_order") != "little-endian") {
      throw Error(ErrorCode::InvalidManifest, manifest_path.string() + ": not a float64 little-endian rdm dump");
    }
    const auto n = doc.at("n").get<std::size_t>();
    if (doc.at("condensed_length").get<std::size_t>() != condensed_length(n)) {
      throw Error(ErrorCode::InvalidManifest, "condensed_length inconsistent with n");
    }
    auto values =
        io::read_f64_le(manifest_path.parent_path() / doc.at("file").get<std::string>(), condensed_length(n));
    auto concepts = doc.at("concepts").get<std::vector<std::string>>();
    return {Rdm(n, std::move(values), doc.at("name").get<std::string>()), std::move(concepts)};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidManifest, manifest_path.string() + ": " + e.what());
  }
}

}  // namespace rsa
