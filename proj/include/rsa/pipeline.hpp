#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "rsa/core.hpp"
#include "rsa/rdm.hpp"
#include "rsa/stats.hpp"

namespace rsa {

/// Participant RDMs for one network, ranked once for reuse across layers.
struct PreparedBrain {
  Network network = Network::LanguageLH;
  std::vector<std::string> participant_ids;
  std::vector<Rdm> rdms;
  std::vector<RankedVector> ranked;
};

/// `rows` selects (and orders) the concept rows used; empty means all rows.
PreparedBrain prepare_brain(const BrainResponseSet& brain, std::span<const std::size_t> rows = {});

/// Spearman of the model RDM against each participant's RDM, in participant order.
std::vector<double> rsa_per_participant(const Rdm& model_rdm, const BrainResponseSet& brain);
std::vector<double> rsa_per_participant(const RankedVector& model, const PreparedBrain& brain);

/// How model concepts line up with one brain set's concepts.
struct ConceptPlan {
  std::vector<std::size_t> model_rows;
  std::vector<std::size_t> brain_rows;
  std::size_t size() const noexcept { return model_rows.size(); }
};

/// Identical lists give the identity plan. Otherwise throws ConceptMismatch
/// unless `allow_intersection`, in which case the shared concepts are used.
ConceptPlan plan_concepts(const std::vector<std::string>& model, const std::vector<std::string>& brain,
                          bool allow_intersection);

struct SweepResult {
  std::string model_name;
  Condition condition = Condition::Sentence;
  std::vector<int> layers;          // ascending
  std::vector<Network> networks;    // in brain-set order
  std::map<Network, std::vector<std::string>> participants;
  std::map<std::tuple<int, Network, std::string>, double> cells;
  std::map<std::pair<int, Network>, double> per_layer_network_mean;
  std::map<Network, std::size_t> concept_count;

  std::vector<double> participant_rhos(int layer, Network network) const;
};

SweepResult layer_sweep(const RepresentationSet& reps, std::span<const BrainResponseSet> brain_sets,
                        bool allow_intersection = false);

/// Layer maximizing the mean over `combine` of per-layer network means; ties
/// go to the lowest layer index. Throws UnknownNetwork.
int select_best_layer(const SweepResult& sweep, const std::set<Network>& combine);

struct ExperimentOptions {
  std::size_t n_shuffles = 100;
  std::uint64_t seed = 0;
  bool allow_intersection = false;
};

struct AlignmentReport {
  std::string model_name;
  Condition condition = Condition::Sentence;
  Network network = Network::LanguageLH;
  int best_layer = 0;
  std::string layer_selection;  // networks whose means chose best_layer, e.g. "language_lh+language_rh"
  std::vector<std::string> participant_ids;
  std::vector<double> per_participant_rho;
  double mean_rho = 0.0;
  BaselineResult baseline;
  SignificanceResult significance;
  NoiseCeiling ceiling;
  std::map<int, double> layer_means;
  std::uint64_t seed = 0;
  std::size_t n_shuffles = 0;
  std::size_t n_concepts = 0;
  std::string rng = std::string(kRngName);
};

/// Full per-network analysis: best layer (language networks jointly, visual on
/// its own), per-participant rho, shuffled baseline, paired one-sided t-test
/// against the baseline, and noise ceiling.
std::vector<AlignmentReport> run_brain_experiment(const RepresentationSet& reps,
                                                  std::span<const BrainResponseSet> brain_sets,
                                                  const ExperimentOptions& options);

// ---------------------------------------------------------------------------
// Behavioural judgments
// ---------------------------------------------------------------------------

struct WordPair {
  std::string word_a;
  std::string word_b;
  double score = 0.0;
};

struct JudgmentDataset {
  std::string name;
  std::vector<WordPair> pairs;
  std::map<std::string, double> concreteness;
};

/// DuplicatePair for repeated unordered pairs, NonFiniteValue for bad scores.
void validate(const JudgmentDataset& dataset);

struct FilteredJudgments {
  JudgmentDataset dataset;
  std::size_t n_original = 0;
  std::optional<double> mean_concreteness;
};

double pair_concreteness(const JudgmentDataset& dataset, const WordPair& pair);

/// Keeps pairs whose words both reach `min_samples` in `coverage` (absent words
/// count as 0). With `with_concreteness`, also averages pair concreteness over
/// the retained pairs; throws MissingConcretenessRating when a rating is absent.
FilteredJudgments pair_filter_and_concreteness(const JudgmentDataset& dataset,
                                               const std::map<std::string, long long>& coverage,
                                               long long min_samples, bool with_concreteness);

struct BehaviouralResult {
  std::string model_name;
  std::string dataset_name;
  std::map<int, double> per_layer_rho;
  int best_layer = 0;
  std::size_t n_pairs_used = 0;
  std::optional<double> mean_pair_concreteness;
};

/// Per layer: spearman(human scores, cosine similarity of the pair embeddings).
/// Throws MissingWordEmbedding listing every absent word.
BehaviouralResult behavioural_alignment(const RepresentationSet& reps, const JudgmentDataset& dataset);

}  // namespace rsa
