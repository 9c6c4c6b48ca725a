#include "rsa/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "rsa/io.hpp"
#include "rsa/stats.hpp"

namespace rsa::synthetic {

namespace fs = std::filesystem;

namespace {

std::vector<double> gaussian(std::size_t count, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(count);
  for (auto& v : out) v = normal(rng);
  return out;
}

// Rows of a (d x target) matrix with orthonormal rows, via Gram-Schmidt.
std::vector<double> orthonormal_rows(std::size_t d, std::size_t target, Rng& rng) {
  if (target < d) throw Error(ErrorCode::InvalidArgument, "embedding dimension smaller than latent dimension");
  auto q = gaussian(d * target, rng);
  for (std::size_t i = 0; i < d; ++i) {
    double* qi = q.data() + i * target;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < i; ++j) {
        const double* qj = q.data() + j * target;
        double dot = 0.0;
        for (std::size_t k = 0; k < target; ++k) dot += qi[k] * qj[k];
        for (std::size_t k = 0; k < target; ++k) qi[k] -= dot * qj[k];
      }
    }
    double norm = 0.0;
    for (std::size_t k = 0; k < target; ++k) norm += qi[k] * qi[k];
    norm = std::sqrt(norm);
    for (std::size_t k = 0; k < target; ++k) qi[k] /= norm;
  }
  return q;
}

// latents (n x d) times an isometry (d x target), plus optional noise.
Matrix project(const std::vector<double>& latents, std::size_t n, std::size_t d, std::size_t target, bool embed,
               double sigma, Rng& rng) {
  std::vector<double> out(n * target, 0.0);
  if (embed) {
    const auto q = orthonormal_rows(d, target, rng);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t i = 0; i < d; ++i) {
        const double l = latents[r * d + i];
        for (std::size_t k = 0; k < target; ++k) out[r * target + k] += l * q[i * target + k];
      }
    }
  } else {
    out = latents;
  }
  if (sigma > 0.0) {
    const auto noise = gaussian(out.size(), rng);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += sigma * noise[i];
  }
  std::vector<float> f(out.begin(), out.end());
  return Matrix(n, target, std::move(f));
}

}  // namespace

Data generate(const Spec& spec) {
  if (spec.n_concepts < 3) throw Error(ErrorCode::InvalidArgument, "need at least 3 concepts");
  if (spec.n_layers == 0 || spec.true_layer >= spec.n_layers) {
    throw Error(ErrorCode::InvalidArgument, "true_layer must index an existing layer");
  }
  if (spec.n_participants == 0) throw Error(ErrorCode::InvalidArgument, "need at least one participant");
  const std::size_t n = spec.n_concepts;
  const std::size_t d = spec.latent_dim;
  const std::size_t layer_dim = spec.layer_dim == 0 ? d : spec.layer_dim;

  Rng rng(derive_seed(spec.seed, 0));
  const auto latents = gaussian(n * d, rng);

  Data data;
  data.latents = Matrix(n, d, std::vector<float>(latents.begin(), latents.end()));

  std::vector<std::string> concepts = spec.concepts;
  if (concepts.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "c%03zu", i);
      concepts.emplace_back(buf);
    }
  }
  if (concepts.size() != n) throw Error(ErrorCode::InvalidArgument, "concept list length differs from n_concepts");

  data.reps.model_name = spec.model_name;
  data.reps.condition = spec.condition;
  data.reps.concepts = concepts;
  data.reps.provenance = "synthetic seed=" + std::to_string(spec.seed);
  for (std::size_t l = 0; l < spec.n_layers; ++l) {
    Rng layer_rng(derive_seed(spec.seed, 1000 + l));
    const double distance = std::fabs(static_cast<double>(l) - static_cast<double>(spec.true_layer));
    const double sigma = spec.distractor_scale * distance;
    const bool embed = layer_dim != d;
    data.reps.layers.push_back({static_cast<int>(l), project(latents, n, d, layer_dim, embed, sigma, layer_rng)});
  }

  const std::size_t vmin = spec.voxels_min == 0 ? d : spec.voxels_min;
  const std::size_t vmax = std::max(vmin, spec.voxels_max == 0 ? vmin : spec.voxels_max);
  for (std::size_t b = 0; b < spec.networks.size(); ++b) {
    BrainResponseSet brain;
    brain.dataset_name = "synthetic-subjects";
    brain.condition = spec.condition == Condition::Word ? Condition::Sentence : spec.condition;
    brain.network = spec.networks[b];
    brain.concepts = concepts;
    for (std::size_t p = 0; p < spec.n_participants; ++p) {
      Rng prng(derive_seed(spec.seed, 100000 + b * 1000 + p));
      std::size_t voxels = d;
      if (spec.embed_voxels) voxels = vmin + (vmax > vmin ? static_cast<std::size_t>(prng() % (vmax - vmin + 1)) : 0);
      char id[32];
      std::snprintf(id, sizeof(id), "P%02zu", p + 1);
      brain.participants.push_back({id, project(latents, n, d, voxels, spec.embed_voxels, spec.noise_sigma, prng)});
    }
    data.brain.push_back(std::move(brain));
  }
  return data;
}

fs::path write_fixture(const Data& data, const fs::path& dir, std::size_t n_shuffles, std::uint64_t seed) {
  fs::create_directories(dir);
  const auto reps_manifest = write_representation_set(data.reps, dir, "reps");
  nlohmann::ordered_json cfg;
  cfg["representations"] = {reps_manifest.filename().string()};
  cfg["brain"] = nlohmann::ordered_json::array();
  for (const auto& b : data.brain) {
    const std::string stem = "brain_" + std::string(to_string(b.network));
    const auto m = write_brain_set(b, dir, stem);
    cfg["brain"].push_back({{"network", to_string(b.network)}, {"manifest", m.filename().string()}});
  }
  cfg["shuffles"] = n_shuffles;
  cfg["seed"] = seed;
  cfg["min_samples"] = 20;
  cfg["output_dir"] = "out";
  const auto path = dir / "config.json";
  io::write_file_atomic(path, cfg.dump(2) + "\n");
  return path;
}

std::vector<std::string> read_concept_list(const fs::path& path) {
  std::istringstream in(io::read_text_file(path));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) out.push_back(normalize_concept(line));
  }
  return out;
}

}  // namespace rsa::synthetic
