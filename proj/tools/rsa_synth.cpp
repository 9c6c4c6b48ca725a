// Writes a synthetic experiment fixture (representations, brain sets, config).

#include <iostream>

#include <CLI11.hpp>

#include "rsa/cli.hpp"
#include "rsa/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic fixture for rsatool run", "rsa_synth"};
  rsa::synthetic::Spec spec;
  std::string out;
  std::string concept_file;
  std::size_t shuffles = 100;
  std::uint64_t run_seed = 42;
  app.add_option("--out", out, "Output directory")->required();
  app.add_option("--concepts", spec.n_concepts, "Number of concepts");
  app.add_option("--concept-file", concept_file, "One concept per line (overrides --concepts)");
  app.add_option("--latent-dim", spec.latent_dim, "Latent dimensionality");
  app.add_option("--participants", spec.n_participants, "Participants per network");
  app.add_option("--layers", spec.n_layers, "Model layers");
  app.add_option("--true-layer", spec.true_layer, "Layer equal to the latents");
  app.add_option("--layer-dim", spec.layer_dim, "Layer dimensionality (0: latent dim)");
  app.add_option("--sigma", spec.noise_sigma, "Voxel noise scale");
  app.add_flag("--embed-voxels", spec.embed_voxels, "Random isometric voxel embedding per participant");
  app.add_option("--voxels-min", spec.voxels_min, "Minimum voxels with --embed-voxels");
  app.add_option("--voxels-max", spec.voxels_max, "Maximum voxels with --embed-voxels");
  app.add_option("--seed", spec.seed, "Data generation seed");
  app.add_option("--run-seed", run_seed, "Seed written into config.json");
  app.add_option("--shuffles", shuffles, "Shuffle count written into config.json");
  CLI11_PARSE(app, argc, argv);

  try {
    if (!concept_file.empty()) {
      spec.concepts = rsa::synthetic::read_concept_list(concept_file);
      spec.n_concepts = spec.concepts.size();
    }
    const auto data = rsa::synthetic::generate(spec);
    const auto cfg = rsa::synthetic::write_fixture(data, out, shuffles, run_seed);
    std::cout << "wrote " << cfg.string() << '\n';
  } catch (const rsa::Error& e) {
    std::cerr << rsa::cli::error_line(e.code(), e.what()) << '\n';
    return rsa::cli::kExitFailure;
  }
  return 0;
}
