#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rsa/core.hpp"

namespace rsa::synthetic {

/// Simulated subjects: every participant sees the same latent concept
/// geometry plus i.i.d. Gaussian voxel noise of scale `noise_sigma`.
/// With `embed_voxels`, each participant's voxels are a random isometric
/// embedding of the latents (so voxel counts can differ without changing
/// cosine geometry); otherwise voxels are the latent coordinates themselves.
struct Spec {
  std::size_t n_concepts = 12;
  std::size_t latent_dim = 8;
  std::size_t n_participants = 4;
  std::size_t n_layers = 3;
  std::size_t true_layer = 1;   // layer whose embedding equals the latents
  std::size_t layer_dim = 0;    // 0: latent_dim
  double distractor_scale = 0.75;  // noise per layer of distance from true_layer
  double noise_sigma = 0.0;
  bool embed_voxels = false;
  std::size_t voxels_min = 0;   // with embed_voxels; 0: latent_dim
  std::size_t voxels_max = 0;
  std::vector<Network> networks{Network::LanguageLH, Network::LanguageRH, Network::Visual};
  std::vector<std::string> concepts;  // empty: c000, c001, ...
  Condition condition = Condition::Sentence;
  std::string model_name = "synthetic-model";
  std::uint64_t seed = 1;
};

struct Data {
  Matrix latents;
  RepresentationSet reps;
  std::vector<BrainResponseSet> brain;  // one per network
};

Data generate(const Spec& spec);

/// Writes reps + brain manifests and a `config.json` for `rsatool run` into dir.
std::filesystem::path write_fixture(const Data& data, const std::filesystem::path& dir, std::size_t n_shuffles,
                                    std::uint64_t seed);

/// Lowercased concept list from a one-word-per-line file.
std::vector<std::string> read_concept_list(const std::filesystem::path& path);

}  // namespace rsa::synthetic
