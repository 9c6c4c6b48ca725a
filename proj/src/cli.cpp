#include "rsa/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include "rsa/core.hpp"
#include "rsa/io.hpp"
#include "rsa/pipeline.hpp"
#include "rsa/plot.hpp"
#include "rsa/rdm.hpp"
#include "rsa/report.hpp"

namespace rsa::cli {

namespace fs = std::filesystem;

namespace {

std::string manifest_kind(const fs::path& path) {
  const auto text = io::read_text_file(path);
  try {
    const auto doc = nlohmann::json::parse(text);
    return doc.at("kind").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidManifest, path.string() + ": " + e.what());
  }
}

}  // namespace

int cmd_rdm(const RdmArgs& args, std::ostream& out) {
  const auto kind = manifest_kind(args.input);
  struct Job {
    std::string stem;
    Rdm rdm;
  };
  std::vector<Job> jobs;
  std::vector<std::string> concepts;
  if (kind == "representations") {
    const auto reps = load_representation_set(args.input);
    concepts = reps.concepts;
    for (const auto& layer : reps.layers) {
      if (args.layer && *args.layer != layer.layer_index) continue;
      jobs.push_back({"rdm_layer" + std::to_string(layer.layer_index),
                      compute_rdm(layer.data, reps.model_name + "/layer" + std::to_string(layer.layer_index))});
    }
    if (jobs.empty()) throw Error(ErrorCode::InvalidArgument, "layer " + std::to_string(*args.layer) + " not found");
  } else if (kind == "brain") {
    if (args.layer) throw Error(ErrorCode::InvalidArgument, "--layer applies to representation sets only");
    const auto brain = load_brain_set(args.input);
    concepts = brain.concepts;
    for (const auto& p : brain.participants) {
      jobs.push_back({"rdm_" + p.participant_id, compute_rdm(p.data, brain.dataset_name + "/" + p.participant_id)});
    }
  } else {
    throw Error(ErrorCode::InvalidManifest, "cannot build RDMs from kind '" + kind + "'");
  }
  for (const auto& job : jobs) {
    const auto path = write_rdm(job.rdm, concepts, args.out, job.stem);
    out << job.stem << ": n=" << job.rdm.n() << " condensed_length=" << job.rdm.values().size() << " -> "
        << path.string() << '\n';
  }
  return 0;
}

int cmd_run(const RunArgs& args, std::ostream& out) {
  auto cfg = load_experiment_config(args.config);
  if (args.seed) cfg.seed = *args.seed;
  if (args.shuffles) cfg.n_shuffles = *args.shuffles;
  if (cfg.n_shuffles == 0) throw Error(ErrorCode::InvalidArgument, "--shuffles must be >= 1");

  std::vector<BrainResponseSet> brain;
  for (const auto& b : cfg.brain) brain.push_back(load_brain_set(b.manifest, b.network));
  for (std::size_t i = 0; i < brain.size(); ++i) brain[i].network = cfg.brain[i].network;

  ExperimentOptions options;
  options.n_shuffles = cfg.n_shuffles;
  options.seed = cfg.seed;
  options.allow_intersection = cfg.intersect_concepts;

  std::vector<AlignmentReport> reports;
  for (const auto& manifest : cfg.representations) {
    const auto reps = load_representation_set(manifest);
    auto part = run_brain_experiment(reps, brain, options);
    reports.insert(reports.end(), part.begin(), part.end());
  }

  // Everything is rendered before the first write.
  const auto json_text = reports_to_json_text(reports);
  const auto csv_text = reports_to_csv(reports);
  const auto specs = build_plot_specs(reports);
  std::vector<std::pair<fs::path, std::string>> svgs;
  for (const auto& spec : specs) {
    svgs.emplace_back(cfg.output_dir / ("plot_" + std::string(to_string(spec.network)) + ".svg"), render_svg(spec));
  }
  io::write_file_atomic(cfg.output_dir / "report.json", json_text);
  io::write_file_atomic(cfg.output_dir / "report.csv", csv_text);
  for (const auto& [path, svg] : svgs) io::write_file_atomic(path, svg);

  for (const auto& r : reports) {
    out << r.model_name << ' ' << to_string(r.network) << ": best_layer=" << r.best_layer
        << " mean_rho=" << io::format_double(r.mean_rho) << " baseline=" << io::format_double(r.baseline.grand_mean)
        << " p=" << io::format_double(r.significance.p_value) << (r.significance.significant ? " (significant)" : "")
        << " ceiling=[" << io::format_double(r.ceiling.lower) << ',' << io::format_double(r.ceiling.upper) << "]\n";
  }
  out << "wrote " << (cfg.output_dir / "report.json").string() << '\n';
  return 0;
}

int cmd_behave(const BehaveArgs& args, std::ostream& out) {
  const auto reps = load_representation_set(args.reps);
  auto dataset = load_judgments_csv(args.judgments);
  if (args.concreteness) dataset.concreteness = load_concreteness_csv(*args.concreteness);

  std::optional<double> mean_concreteness;
  std::size_t n_original = dataset.pairs.size();
  if (args.coverage) {
    auto filtered = pair_filter_and_concreteness(dataset, load_coverage_csv(*args.coverage), args.min_samples,
                                                 args.concreteness.has_value());
    dataset = std::move(filtered.dataset);
    mean_concreteness = filtered.mean_concreteness;
  } else if (args.concreteness && !dataset.pairs.empty()) {
    double sum = 0.0;
    for (const auto& p : dataset.pairs) sum += pair_concreteness(dataset, p);
    mean_concreteness = sum / static_cast<double>(dataset.pairs.size());
  }
  if (dataset.pairs.empty()) {
    throw Error(ErrorCode::EmptyDataset, "no judgment pairs left after filtering (min samples " +
                                             std::to_string(args.min_samples) + ")");
  }

  auto result = behavioural_alignment(reps, dataset);
  result.mean_pair_concreteness = mean_concreteness;
  io::write_file_atomic(args.out, behaviour_to_json(result).dump(2) + "\n");
  out << "pairs used: " << result.n_pairs_used << " of " << n_original << '\n'
      << "best_layer=" << result.best_layer << " rho=" << io::format_double(result.per_layer_rho.at(result.best_layer))
      << '\n';
  return 0;
}

int cmd_plot(const PlotArgs& args, std::ostream& out) {
  const auto reports = reports_from_json_text(io::read_text_file(args.report));
  for (const auto& p : render_plot(reports, args.out)) out << "wrote " << p.string() << '\n';
  return 0;
}

int cmd_validate(const ValidateArgs& args, std::ostream& out) {
  const auto kind = manifest_kind(args.input);
  if (kind == "representations") {
    const auto reps = load_representation_set(args.input);
    out << "ok: representations '" << reps.model_name << "' condition=" << to_string(reps.condition)
        << " concepts=" << reps.concepts.size() << " layers=" << reps.layers.size() << '\n';
  } else if (kind == "brain") {
    const auto brain = load_brain_set(args.input);
    out << "ok: brain '" << brain.dataset_name << "' condition=" << to_string(brain.condition)
        << " concepts=" << brain.concepts.size() << " participants=" << brain.participants.size() << '\n';
  } else if (kind == "rdm") {
    const auto rdm = load_rdm(args.input);
    out << "ok: rdm '" << rdm.rdm.source_label() << "' n=" << rdm.rdm.n()
        << " condensed_length=" << rdm.rdm.values().size() << '\n';
  } else {
    throw Error(ErrorCode::InvalidManifest, "unknown manifest kind '" + kind + "'");
  }
  return 0;
}

std::string error_line(ErrorCode code, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = to_string(code);
  j["message"] = message;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Representational similarity analysis of model embeddings against brain and behavioural data",
               "rsatool"};
  app.require_subcommand(1);

  RdmArgs rdm_args;
  auto* rdm = app.add_subcommand("rdm", "Write condensed cosine RDMs per layer or participant");
  rdm->add_option("--input", rdm_args.input, "Representation or brain manifest")->required();
  rdm->add_option("--out", rdm_args.out, "Output directory")->required();
  std::optional<int> layer;
  rdm->add_option("--layer", layer, "Only this layer index");

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run the brain alignment experiment described by a config");
  run_cmd->add_option("--config", run_args.config, "Experiment config JSON")->required();
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> shuffles;
  run_cmd->add_option("--seed", seed, "Override the config seed");
  run_cmd->add_option("--shuffles", shuffles, "Override the shuffle count");

  BehaveArgs behave_args;
  auto* behave = app.add_subcommand("behave", "Correlate layer-wise word similarities with human judgments");
  behave->add_option("--reps", behave_args.reps, "Word-level representation manifest")->required();
  behave->add_option("--judgments", behave_args.judgments, "CSV with header word_a,word_b,score")->required();
  std::optional<std::string> concreteness;
  std::optional<std::string> coverage;
  behave->add_option("--concreteness", concreteness, "CSV with header word,rating");
  behave->add_option("--coverage", coverage, "CSV with header word,count");
  behave->add_option("--min-samples", behave_args.min_samples, "Minimum corpus occurrences per word");
  behave->add_option("--out", behave_args.out, "Result JSON path");

  PlotArgs plot_args;
  auto* plot = app.add_subcommand("plot", "Render SVG plots from a report JSON");
  plot->add_option("--report", plot_args.report, "report.json written by run")->required();
  plot->add_option("--out", plot_args.out, "Output directory")->required();

  ValidateArgs validate_args;
  auto* validate_cmd = app.add_subcommand("validate", "Load and validate a manifest");
  validate_cmd->add_option("--input", validate_args.input, "Manifest path")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << error_line(ErrorCode::UsageError, e.what()) << '\n';
    return kExitFailure;
  }

  try {
    if (*rdm) {
      rdm_args.layer = layer;
      return cmd_rdm(rdm_args, out);
    }
    if (*run_cmd) {
      run_args.seed = seed;
      run_args.shuffles = shuffles;
      return cmd_run(run_args, out);
    }
    if (*behave) {
      if (concreteness) behave_args.concreteness = *concreteness;
      if (coverage) behave_args.coverage = *coverage;
      return cmd_behave(behave_args, out);
    }
    if (*plot) return cmd_plot(plot_args, out);
    if (*validate_cmd) return cmd_validate(validate_args, out);
  } catch (const Error& e) {
    err << error_line(e.code(), e.what()) << '\n';
    return kExitFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << error_line(ErrorCode::IoError, e.what()) << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace rsa::cli
