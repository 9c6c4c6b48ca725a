#include "rsa/pipeline.hpp"

#include <algorithm>
#include <numeric>

#include <tbb/parallel_for.h>

namespace rsa {

PreparedBrain prepare_brain(const BrainResponseSet& brain, std::span<const std::size_t> rows) {
  PreparedBrain out;
  out.network = brain.network;
  out.rdms.reserve(brain.participants.size());
  for (const auto& p : brain.participants) {
    out.participant_ids.push_back(p.participant_id);
    const Matrix m = rows.empty() ? p.data : p.data.select_rows(rows);
    try {
      out.rdms.push_back(compute_rdm(m, p.participant_id));
    } catch (const Error& e) {
      rethrow_with_context(e, "participant " + p.participant_id);
    }
  }
  out.ranked.resize(out.rdms.size());
  tbb::parallel_for(std::size_t{0}, out.rdms.size(),
                    [&](std::size_t i) { out.ranked[i] = rank_vector(out.rdms[i].values()); });
  return out;
}

std::vector<double> rsa_per_participant(const RankedVector& model, const PreparedBrain& brain) {
  std::vector<double> rhos(brain.ranked.size());
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    try {
      rhos[i] = correlate(model, brain.ranked[i]);
    } catch (const Error& e) {
      rethrow_with_context(e, "participant " + brain.participant_ids[i]);
    }
  }
  return rhos;
}

std::vector<double> rsa_per_participant(const Rdm& model_rdm, const BrainResponseSet& brain) {
  if (brain.concepts.size() != model_rdm.n()) {
    throw Error(ErrorCode::SizeMismatch, "model RDM has " + std::to_string(model_rdm.n()) +
                                             " concepts, brain set has " + std::to_string(brain.concepts.size()));
  }
  RankedVector model;
  try {
    model = rank_vector(model_rdm.values());
    if (model.sum_squares == 0.0) throw Error(ErrorCode::ConstantVector, "constant RDM");
  } catch (const Error& e) {
    rethrow_with_context(e, "model RDM");
  }
  return rsa_per_participant(model, prepare_brain(brain));
}

ConceptPlan plan_concepts(const std::vector<std::string>& model, const std::vector<std::string>& brain,
                          bool allow_intersection) {
  ConceptPlan plan;
  if (model == brain) {
    plan.model_rows.resize(model.size());
    std::iota(plan.model_rows.begin(), plan.model_rows.end(), std::size_t{0});
    plan.brain_rows = plan.model_rows;
    return plan;
  }
  if (!allow_intersection) {
    throw Error(ErrorCode::ConceptMismatch,
                "model and brain concept lists differ; enable concept intersection to use the shared subset");
  }
  auto aligned = intersect_concepts(model, brain);
  if (aligned.size() < 3) {
    throw Error(ErrorCode::EmptyIntersection,
                "only " + std::to_string(aligned.size()) + " shared concepts; at least 3 are needed");
  }
  plan.model_rows = std::move(aligned.a_indices);
  plan.brain_rows = std::move(aligned.b_indices);
  return plan;
}

std::vector<double> SweepResult::participant_rhos(int layer, Network network) const {
  std::vector<double> out;
  const auto it = participants.find(network);
  if (it == participants.end()) throw Error(ErrorCode::UnknownNetwork, "network not in sweep");
  for (const auto& id : it->second) out.push_back(cells.at({layer, network, id}));
  return out;
}

namespace {

struct PreparedNetwork {
  ConceptPlan plan;
  PreparedBrain brain;
};

// Model rankings per layer, shared between networks that use the same concept rows.
std::vector<RankedVector> rank_model_layers(const RepresentationSet& reps, const std::vector<std::size_t>& rows) {
  std::vector<RankedVector> out(reps.layers.size());
  tbb::parallel_for(std::size_t{0}, reps.layers.size(), [&](std::size_t l) {
    const auto& layer = reps.layers[l];
    const Rdm rdm = compute_rdm(layer.data.select_rows(rows), reps.model_name);
    out[l] = rank_vector(rdm.values());
  });
  for (std::size_t l = 0; l < out.size(); ++l) {
    if (out[l].sum_squares == 0.0) {
      throw Error(ErrorCode::ConstantVector,
                  "model layer " + std::to_string(reps.layers[l].layer_index) + " has a constant RDM");
    }
  }
  return out;
}

}  // namespace

SweepResult layer_sweep(const RepresentationSet& reps, std::span<const BrainResponseSet> brain_sets,
                        bool allow_intersection) {
  if (reps.layers.empty()) throw Error(ErrorCode::EmptyDataset, "representation set has no layers");
  if (brain_sets.empty()) throw Error(ErrorCode::EmptyDataset, "no brain sets given");

  SweepResult sweep;
  sweep.model_name = reps.model_name;
  sweep.condition = reps.condition;
  for (const auto& l : reps.layers) sweep.layers.push_back(l.layer_index);
  std::sort(sweep.layers.begin(), sweep.layers.end());

  std::vector<PreparedNetwork> prepared;
  for (const auto& brain : brain_sets) {
    if (std::find(sweep.networks.begin(), sweep.networks.end(), brain.network) != sweep.networks.end()) {
      throw Error(ErrorCode::InvalidArgument, "network " + std::string(to_string(brain.network)) + " given twice");
    }
    sweep.networks.push_back(brain.network);
    try {
      auto plan = plan_concepts(reps.concepts, brain.concepts, allow_intersection);
      auto pb = prepare_brain(brain, plan.brain_rows);
      prepared.push_back({std::move(plan), std::move(pb)});
    } catch (const Error& e) {
      rethrow_with_context(e, "network " + std::string(to_string(brain.network)));
    }
  }

  std::map<std::vector<std::size_t>, std::vector<RankedVector>> model_cache;
  for (std::size_t b = 0; b < prepared.size(); ++b) {
    const auto& net = prepared[b];
    const Network network = net.brain.network;
    auto cached = model_cache.find(net.plan.model_rows);
    if (cached == model_cache.end()) {
      cached = model_cache.emplace(net.plan.model_rows, rank_model_layers(reps, net.plan.model_rows)).first;
    }
    const auto& model_layers = cached->second;
    sweep.participants[network] = net.brain.participant_ids;
    sweep.concept_count[network] = net.plan.size();

    std::vector<std::vector<double>> grid(reps.layers.size());
    tbb::parallel_for(std::size_t{0}, reps.layers.size(),
                      [&](std::size_t l) { grid[l] = rsa_per_participant(model_layers[l], net.brain); });
    for (std::size_t l = 0; l < reps.layers.size(); ++l) {
      const int layer = reps.layers[l].layer_index;
      for (std::size_t p = 0; p < grid[l].size(); ++p) {
        sweep.cells[{layer, network, net.brain.participant_ids[p]}] = grid[l][p];
      }
      sweep.per_layer_network_mean[{layer, network}] =
          std::accumulate(grid[l].begin(), grid[l].end(), 0.0) / static_cast<double>(grid[l].size());
    }
  }
  return sweep;
}

int select_best_layer(const SweepResult& sweep, const std::set<Network>& combine) {
  if (combine.empty()) throw Error(ErrorCode::UnknownNetwork, "no networks to combine");
  for (Network n : combine) {
    if (std::find(sweep.networks.begin(), sweep.networks.end(), n) == sweep.networks.end()) {
      throw Error(ErrorCode::UnknownNetwork, "network " + std::string(to_string(n)) + " is not in the sweep");
    }
  }
  int best = sweep.layers.front();
  double best_score = -2.0;
  for (int layer : sweep.layers) {  // ascending, strict > keeps the lowest index on ties
    double score = 0.0;
    for (Network n : combine) score += sweep.per_layer_network_mean.at({layer, n});
    score /= static_cast<double>(combine.size());
    if (score > best_score) {
      best_score = score;
      best = layer;
    }
  }
  return best;
}

std::vector<AlignmentReport> run_brain_experiment(const RepresentationSet& reps,
                                                  std::span<const BrainResponseSet> brain_sets,
                                                  const ExperimentOptions& options) {
  if (options.n_shuffles == 0) throw Error(ErrorCode::InvalidArgument, "shuffle count must be >= 1");
  SweepResult sweep;
  try {
    sweep = layer_sweep(reps, brain_sets, options.allow_intersection);
  } catch (const Error& e) {
    rethrow_with_context(e, "layer sweep");
  }

  std::set<Network> language;
  for (Network n : sweep.networks) {
    if (is_language_network(n)) language.insert(n);
  }

  std::vector<AlignmentReport> reports;
  for (std::size_t b = 0; b < brain_sets.size(); ++b) {
    const auto& brain = brain_sets[b];
    const Network network = brain.network;
    const std::string stage_prefix = "network " + std::string(to_string(network));
    try {
      AlignmentReport r;
      r.model_name = reps.model_name;
      r.condition = reps.condition;
      r.network = network;
      const std::set<Network> combine = is_language_network(network) ? language : std::set<Network>{network};
      r.best_layer = select_best_layer(sweep, combine);
      for (Network n : combine) {
        if (!r.layer_selection.empty()) r.layer_selection += "+";
        r.layer_selection += to_string(n);
      }
      r.participant_ids = sweep.participants.at(network);
      r.per_participant_rho = sweep.participant_rhos(r.best_layer, network);
      r.mean_rho = std::accumulate(r.per_participant_rho.begin(), r.per_participant_rho.end(), 0.0) /
                   static_cast<double>(r.per_participant_rho.size());
      for (int layer : sweep.layers) r.layer_means[layer] = sweep.per_layer_network_mean.at({layer, network});

      const auto plan = plan_concepts(reps.concepts, brain.concepts, options.allow_intersection);
      const auto prepared = prepare_brain(brain, plan.brain_rows);
      const auto& layer = *std::find_if(reps.layers.begin(), reps.layers.end(),
                                        [&](const LayerMatrix& l) { return l.layer_index == r.best_layer; });
      const Rdm model_rdm = compute_rdm(layer.data.select_rows(plan.model_rows), reps.model_name);
      const RankedVector model_ranked = rank_vector(model_rdm.values());

      r.baseline.n_shuffles = options.n_shuffles;
      r.baseline.seed = options.seed;
      const std::uint64_t network_seed = derive_seed(options.seed, static_cast<std::uint64_t>(network));
      for (std::size_t p = 0; p < prepared.rdms.size(); ++p) {
        const auto est = shuffled_baseline(model_ranked, prepared.rdms[p], options.n_shuffles,
                                           derive_seed(network_seed, p));
        r.baseline.per_participant_mean_rho.push_back(est.mean_rho);
      }
      const auto& base = r.baseline.per_participant_mean_rho;
      r.baseline.grand_mean = std::accumulate(base.begin(), base.end(), 0.0) / static_cast<double>(base.size());

      try {
        r.significance = paired_t_one_sided(r.per_participant_rho, base);
      } catch (const Error& e) {
        rethrow_with_context(e, "significance");
      }
      try {
        r.ceiling = noise_ceiling(prepared.rdms);
      } catch (const Error& e) {
        rethrow_with_context(e, "noise ceiling");
      }
      r.seed = options.seed;
      r.n_shuffles = options.n_shuffles;
      r.n_concepts = plan.size();
      reports.push_back(std::move(r));
    } catch (const Error& e) {
      rethrow_with_context(e, stage_prefix);
    }
  }
  return reports;
}

}  // namespace rsa
