#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "rsa/pipeline.hpp"

namespace rsa {

namespace {

std::pair<std::string, std::string> unordered_key(const WordPair& p) {
  return p.word_a < p.word_b ? std::pair{p.word_a, p.word_b} : std::pair{p.word_b, p.word_a};
}

}  // namespace

void validate(const JudgmentDataset& dataset) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& p : dataset.pairs) {
    if (!std::isfinite(p.score)) {
      throw Error(ErrorCode::NonFiniteValue, "non-finite score for pair (" + p.word_a + "," + p.word_b + ")");
    }
    if (!seen.insert(unordered_key(p)).second) {
      throw Error(ErrorCode::DuplicatePair, "pair (" + p.word_a + "," + p.word_b + ") listed twice");
    }
  }
}

double pair_concreteness(const JudgmentDataset& dataset, const WordPair& pair) {
  auto rating = [&](const std::string& w) {
    const auto it = dataset.concreteness.find(w);
    if (it == dataset.concreteness.end()) {
      throw Error(ErrorCode::MissingConcretenessRating, "no concreteness rating for '" + w + "'");
    }
    return it->second;
  };
  return 0.5 * (rating(pair.word_a) + rating(pair.word_b));
}

FilteredJudgments pair_filter_and_concreteness(const JudgmentDataset& dataset,
                                               const std::map<std::string, long long>& coverage,
                                               long long min_samples, bool with_concreteness) {
  auto covered = [&](const std::string& w) {
    const auto it = coverage.find(w);
    return it != coverage.end() && it->second >= min_samples;
  };
  FilteredJudgments out;
  out.n_original = dataset.pairs.size();
  out.dataset.name = dataset.name;
  out.dataset.concreteness = dataset.concreteness;
  for (const auto& p : dataset.pairs) {
    if (covered(p.word_a) && covered(p.word_b)) out.dataset.pairs.push_back(p);
  }
  if (with_concreteness && !out.dataset.pairs.empty()) {
    double sum = 0.0;
    for (const auto& p : out.dataset.pairs) sum += pair_concreteness(dataset, p);
    out.mean_concreteness = sum / static_cast<double>(out.dataset.pairs.size());
  }
  return out;
}

BehaviouralResult behavioural_alignment(const RepresentationSet& reps, const JudgmentDataset& dataset) {
  if (reps.condition != Condition::Word) {
    throw Error(ErrorCode::InvalidArgument, "behavioural alignment needs a word-level representation set");
  }
  validate(dataset);
  if (dataset.pairs.empty()) throw Error(ErrorCode::EmptyDataset, "judgment dataset has no pairs");

  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < reps.concepts.size(); ++i) row_of.emplace(reps.concepts[i], i);
  std::set<std::string> missing;
  for (const auto& p : dataset.pairs) {
    if (!row_of.contains(p.word_a)) missing.insert(p.word_a);
    if (!row_of.contains(p.word_b)) missing.insert(p.word_b);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& w : missing) list += (list.empty() ? "" : ",") + w;
    throw Error(ErrorCode::MissingWordEmbedding, "no embedding for: " + list);
  }

  std::vector<double> scores;
  scores.reserve(dataset.pairs.size());
  for (const auto& p : dataset.pairs) scores.push_back(p.score);
  const RankedVector human = rank_vector(scores);

  BehaviouralResult result;
  result.model_name = reps.model_name;
  result.dataset_name = dataset.name;
  result.n_pairs_used = dataset.pairs.size();

  auto layers = reps.layers;
  std::sort(layers.begin(), layers.end(),
            [](const LayerMatrix& a, const LayerMatrix& b) { return a.layer_index < b.layer_index; });
  double best = -2.0;
  for (const auto& layer : layers) {
    std::vector<double> similarity;
    similarity.reserve(dataset.pairs.size());
    for (const auto& p : dataset.pairs) {
      similarity.push_back(1.0 - cosine_distance(layer.data.row(row_of[p.word_a]), layer.data.row(row_of[p.word_b])));
    }
    double rho = 0.0;
    try {
      rho = correlate(human, rank_vector(similarity));
    } catch (const Error& e) {
      rethrow_with_context(e, "layer " + std::to_string(layer.layer_index));
    }
    result.per_layer_rho[layer.layer_index] = rho;
    if (rho > best) {
      best = rho;
      result.best_layer = layer.layer_index;
    }
  }
  return result;
}

}  // namespace rsa
