#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsa/pipeline.hpp"

namespace rsa {

// Report JSON / CSV ---------------------------------------------------------

nlohmann::ordered_json report_to_json(const AlignmentReport& r);
AlignmentReport alignment_report_from_json(const nlohmann::ordered_json& j);

/// `{"reports": [...]}`; serialized with a fixed key order and no timestamps so
/// identical inputs give identical bytes.
std::string reports_to_json_text(const std::vector<AlignmentReport>& reports);
std::vector<AlignmentReport> reports_from_json_text(const std::string& text);

/// One row per participant x network x model.
std::string reports_to_csv(const std::vector<AlignmentReport>& reports);

struct CsvRhoRow {
  std::string model;
  std::string condition;
  std::string network;
  int best_layer = 0;
  std::string participant;
  double rho = 0.0;
  double baseline_mean_rho = 0.0;
};
std::vector<CsvRhoRow> parse_report_csv(const std::string& text);

nlohmann::ordered_json behaviour_to_json(const BehaviouralResult& r);

// CSV inputs ----------------------------------------------------------------

/// Minimal RFC 4180 reader: comma separated, optional double quotes.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

/// Header `word_a,word_b,score`. Words are lowercased.
JudgmentDataset load_judgments_csv(const std::filesystem::path& path, std::string name = {});
/// Header `word,rating`.
std::map<std::string, double> load_concreteness_csv(const std::filesystem::path& path);
/// Header `word,count`.
std::map<std::string, long long> load_coverage_csv(const std::filesystem::path& path);

// Experiment config ---------------------------------------------------------

struct BrainInput {
  Network network = Network::LanguageLH;
  std::filesystem::path manifest;
};

struct ExperimentConfig {
  std::vector<std::filesystem::path> representations;
  std::vector<BrainInput> brain;
  std::size_t n_shuffles = 100;
  std::uint64_t seed = 0;
  long long min_samples = 20;
  bool intersect_concepts = false;
  std::filesystem::path output_dir;
};

/// Relative paths are resolved against the config file's directory.
/// Throws UnknownNetwork, InvalidConfig, MissingFile.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace rsa
