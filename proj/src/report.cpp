#include "rsa/report.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rsa/io.hpp"

namespace rsa {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

// JSON has no infinities; t statistics of zero-variance differences need one.
ojson number(double v) {
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  return v;
}

double number_from(const ojson& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-Infinity") return -std::numeric_limits<double>::infinity();
    throw Error(ErrorCode::ParseError, "unexpected number string '" + s + "'");
  }
  return j.get<double>();
}

template <typename Fn>
auto parse_guard(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string(what) + ": " + e.what());
  }
}

}  // namespace

ojson report_to_json(const AlignmentReport& r) {
  ojson j;
  j["model_name"] = r.model_name;
  j["condition"] = to_string(r.condition);
  j["network"] = to_string(r.network);
  j["best_layer"] = r.best_layer;
  j["layer_selection"] = r.layer_selection;
  j["participant_ids"] = r.participant_ids;
  j["per_participant_rho"] = r.per_participant_rho;
  j["mean_rho"] = r.mean_rho;
  j["baseline"] = {{"per_participant_mean_rho", r.baseline.per_participant_mean_rho},
                   {"grand_mean", r.baseline.grand_mean},
                   {"n_shuffles", r.baseline.n_shuffles},
                   {"seed", r.baseline.seed}};
  j["significance"] = {{"t_statistic", number(r.significance.t_statistic)},
                       {"degrees_of_freedom", r.significance.degrees_of_freedom},
                       {"p_value", r.significance.p_value},
                       {"significant", r.significance.significant}};
  j["ceiling"] = {{"lower", r.ceiling.lower}, {"upper", r.ceiling.upper}};
  ojson means = ojson::array();
  for (const auto& [layer, mean] : r.layer_means) means.push_back({{"layer", layer}, {"mean_rho", mean}});
  j["layer_means"] = std::move(means);
  j["metadata"] = {{"seed", r.seed}, {"n_shuffles", r.n_shuffles}, {"n_concepts", r.n_concepts}, {"rng", r.rng}};
  return j;
}

AlignmentReport alignment_report_from_json(const ojson& j) {
  return parse_guard("alignment report", [&] {
    AlignmentReport r;
    r.model_name = j.at("model_name").get<std::string>();
    r.condition = parse_condition(j.at("condition").get<std::string>());
    r.network = parse_network(j.at("network").get<std::string>());
    r.best_layer = j.at("best_layer").get<int>();
    r.layer_selection = j.value("layer_selection", std::string{});
    r.participant_ids = j.at("participant_ids").get<std::vector<std::string>>();
    r.per_participant_rho = j.at("per_participant_rho").get<std::vector<double>>();
    r.mean_rho = j.at("mean_rho").get<double>();
    const auto& b = j.at("baseline");
    r.baseline.per_participant_mean_rho = b.at("per_participant_mean_rho").get<std::vector<double>>();
    r.baseline.grand_mean = b.at("grand_mean").get<double>();
    r.baseline.n_shuffles = b.at("n_shuffles").get<std::size_t>();
    r.baseline.seed = b.at("seed").get<std::uint64_t>();
    const auto& s = j.at("significance");
    r.significance.t_statistic = number_from(s.at("t_statistic"));
    r.significance.degrees_of_freedom = s.at("degrees_of_freedom").get<int>();
    r.significance.p_value = s.at("p_value").get<double>();
    r.significance.significant = s.at("significant").get<bool>();
    r.ceiling.lower = j.at("ceiling").at("lower").get<double>();
    r.ceiling.upper = j.at("ceiling").at("upper").get<double>();
    if (j.contains("layer_means")) {
      for (const auto& m : j.at("layer_means")) r.layer_means[m.at("layer").get<int>()] = m.at("mean_rho").get<double>();
    }
    const auto& meta = j.at("metadata");
    r.seed = meta.at("seed").get<std::uint64_t>();
    r.n_shuffles = meta.at("n_shuffles").get<std::size_t>();
    r.n_concepts = meta.at("n_concepts").get<std::size_t>();
    r.rng = meta.value("rng", std::string(kRngName));
    if (r.per_participant_rho.size() != r.participant_ids.size()) {
      throw Error(ErrorCode::ParseError, "participant ids and rho values differ in length");
    }
    return r;
  });
}

std::string reports_to_json_text(const std::vector<AlignmentReport>& reports) {
  ojson doc;
  doc["reports"] = ojson::array();
  for (const auto& r : reports) doc["reports"].push_back(report_to_json(r));
  return doc.dump(2) + "\n";
}

std::vector<AlignmentReport> reports_from_json_text(const std::string& text) {
  const auto doc = parse_guard("report", [&] { return ojson::parse(text); });
  std::vector<AlignmentReport> out;
  parse_guard("report", [&] {
    for (const auto& j : doc.at("reports")) out.push_back(alignment_report_from_json(j));
    return 0;
  });
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

}  // namespace

std::string reports_to_csv(const std::vector<AlignmentReport>& reports) {
  std::ostringstream out;
  out << "model,condition,network,best_layer,participant,rho,baseline_mean_rho\n";
  for (const auto& r : reports) {
    for (std::size_t p = 0; p < r.participant_ids.size(); ++p) {
      out << csv_field(r.model_name) << ',' << to_string(r.condition) << ',' << to_string(r.network) << ',' << r.best_layer << ','
          << csv_field(r.participant_ids[p]) << ',' << io::format_double(r.per_participant_rho[p]) << ','
          << io::format_double(r.baseline.per_participant_mean_rho[p]) << '\n';
    }
  }
  return out.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  auto end_row = [&] {
    row.push_back(std::move(field));
    field.clear();
    if (!(row.size() == 1 && row.front().empty())) rows.push_back(std::move(row));
    row.clear();
    any = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    any = true;
    switch (c) {
      case '"': quoted = true; break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        break;
      case '\r': break;
      case '\n': end_row(); break;
      default: field += c;
    }
  }
  if (quoted) throw Error(ErrorCode::ParseError, "unterminated quoted CSV field");
  if (any || !field.empty() || !row.empty()) end_row();
  return rows;
}

namespace {

std::vector<std::vector<std::string>> read_table(const fs::path& path, const std::vector<std::string>& header) {
  auto rows = parse_csv(io::read_text_file(path));
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
    return s;
  };
  if (rows.empty() || rows.front() != header) {
    throw Error(ErrorCode::ParseError, path.string() + ": expected header '" + join(header) + "'");
  }
  rows.erase(rows.begin());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != header.size()) {
      throw Error(ErrorCode::ParseError, path.string() + ": row " + std::to_string(i + 2) + " has " +
                                             std::to_string(rows[i].size()) + " fields");
    }
  }
  return rows;
}

double parse_double(const std::string& s, const fs::path& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, path.string() + ": not a number '" + s + "'");
  }
}

long long parse_int(const std::string& s, const fs::path& path) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, path.string() + ": not an integer '" + s + "'");
  }
}

}  // namespace

std::vector<CsvRhoRow> parse_report_csv(const std::string& text) {
  auto rows = parse_csv(text);
  const std::vector<std::string> header{"model", "condition", "network", "best_layer",
                                        "participant", "rho", "baseline_mean_rho"};
  if (rows.empty() || rows.front() != header) throw Error(ErrorCode::ParseError, "unexpected report CSV header");
  std::vector<CsvRhoRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != header.size()) throw Error(ErrorCode::ParseError, "malformed report CSV row");
    out.push_back({r[0], r[1], r[2], static_cast<int>(parse_int(r[3], "report.csv")), r[4],
                   parse_double(r[5], "report.csv"), parse_double(r[6], "report.csv")});
  }
  return out;
}

ojson behaviour_to_json(const BehaviouralResult& r) {
  ojson j;
  j["model_name"] = r.model_name;
  j["dataset_name"] = r.dataset_name;
  ojson layers = ojson::array();
  for (const auto& [layer, rho] : r.per_layer_rho) layers.push_back({{"layer", layer}, {"rho", rho}});
  j["per_layer_rho"] = std::move(layers);
  j["best_layer"] = r.best_layer;
  j["best_rho"] = r.per_layer_rho.at(r.best_layer);
  j["n_pairs_used"] = r.n_pairs_used;
  j["mean_pair_concreteness"] = r.mean_pair_concreteness ? ojson(*r.mean_pair_concreteness) : ojson(nullptr);
  return j;
}

JudgmentDataset load_judgments_csv(const fs::path& path, std::string name) {
  JudgmentDataset ds;
  ds.name = name.empty() ? path.stem().string() : std::move(name);
  for (const auto& r : read_table(path, {"word_a", "word_b", "score"})) {
    ds.pairs.push_back({normalize_concept(r[0]), normalize_concept(r[1]), parse_double(r[2], path)});
  }
  validate(ds);
  return ds;
}

std::map<std::string, double> load_concreteness_csv(const fs::path& path) {
  std::map<std::string, double> out;
  for (const auto& r : read_table(path, {"word", "rating"})) {
    const double v = parse_double(r[1], path);
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, path.string() + ": non-finite rating");
    out[normalize_concept(r[0])] = v;
  }
  return out;
}

std::map<std::string, long long> load_coverage_csv(const fs::path& path) {
  std::map<std::string, long long> out;
  for (const auto& r : read_table(path, {"word", "count"})) out[normalize_concept(r[0])] = parse_int(r[1], path);
  return out;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  const auto text = io::read_text_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  ExperimentConfig cfg;
  try {
    const auto& reps = doc.at("representations");
    if (reps.is_string()) {
      cfg.representations.push_back(resolve(reps.get<std::string>()));
    } else {
      for (const auto& r : reps) cfg.representations.push_back(resolve(r.get<std::string>()));
    }
    for (const auto& b : doc.at("brain")) {
      cfg.brain.push_back({parse_network(b.at("network").get<std::string>()), resolve(b.at("manifest").get<std::string>())});
    }
    if (doc.contains("networks")) {
      // Optional subset filter; every name must be a known network.
      std::vector<Network> keep;
      for (const auto& n : doc.at("networks")) keep.push_back(parse_network(n.get<std::string>()));
      std::erase_if(cfg.brain, [&](const BrainInput& b) {
        return std::find(keep.begin(), keep.end(), b.network) == keep.end();
      });
      for (Network n : keep) {
        if (std::none_of(cfg.brain.begin(), cfg.brain.end(), [&](const BrainInput& b) { return b.network == n; })) {
          throw Error(ErrorCode::UnknownNetwork,
                      "network " + std::string(to_string(n)) + " has no brain manifest in the config");
        }
      }
    }
    cfg.n_shuffles = doc.value("shuffles", std::size_t{100});
    cfg.seed = doc.value("seed", std::uint64_t{0});
    cfg.min_samples = doc.value("min_samples", 20LL);
    cfg.intersect_concepts = doc.value("intersect_concepts", false);
    cfg.output_dir = resolve(doc.value("output_dir", std::string("out")));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  if (cfg.representations.empty()) throw Error(ErrorCode::InvalidConfig, "config names no representation set");
  if (cfg.brain.empty()) throw Error(ErrorCode::InvalidConfig, "config names no brain set");
  if (cfg.n_shuffles == 0) throw Error(ErrorCode::InvalidConfig, "shuffles must be >= 1");
  return cfg;
}

}  // namespace rsa
