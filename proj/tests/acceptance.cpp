// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include <sys/wait.h>

#include "oracles.hpp"
#include "rsa/pipeline.hpp"
#include "rsa/rdm.hpp"
#include "rsa/report.hpp"
#include "rsa/stats.hpp"
#include "rsa/synthetic.hpp"
#include "test_support.hpp"

using namespace rsa;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  enum Kind { Pass, Fail, Skipped } kind;
  std::string detail;
};

Verdict pass_if(bool ok, std::string detail) { return {ok ? Verdict::Pass : Verdict::Fail, std::move(detail)}; }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Verdict spearman_oracle() {
  std::mt19937_64 rng(20240101);
  std::uniform_int_distribution<std::size_t> len(3, 500);
  std::vector<std::pair<std::vector<double>, std::vector<double>>> cases;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = len(rng);
    const bool ties = i % 2 == 1;
    std::vector<double> x, y;
    auto constant = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [&](double a) { return a == v[0]; });
    };
    do x = oracle::random_vector(rng, n, ties); while (constant(x));
    do y = oracle::random_vector(rng, n, ties); while (constant(y));
    cases.emplace_back(std::move(x), std::move(y));
  }
  const auto t0 = Clock::now();
  std::vector<double> got;
  for (const auto& [x, y] : cases) got.push_back(spearman(x, y));
  const double elapsed = seconds_since(t0);
  double worst = 0.0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    worst = std::max(worst, std::fabs(got[i] - oracle::spearman(cases[i].first, cases[i].second)));
  }
  return pass_if(worst <= 1e-12 && elapsed < 10.0,
                 fmt("1000 vectors, max |diff| = %.3g (tol 1e-12), runtime %.3f s (limit 10 s)", worst, elapsed));
}

Verdict rdm_brute_force() {
  std::mt19937_64 rng(20240102);
  double worst = 0.0, worst_scale = 0.0;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> log_scale(-6.0, 6.0);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 2 + rng() % 11;
    const std::size_t d = 1 + rng() % 20;
    const auto m = testing::random_matrix(rng, n, d);
    const auto rdm = compute_rdm(m);
    const auto got = rdm.values();
    const auto want = oracle::condense(oracle::full_rdm(testing::to_rows(m)));
    for (std::size_t k = 0; k < want.size(); ++k) worst = std::max(worst, std::fabs(got[k] - want[k]));

    std::vector<double> rows(n * d), scaled(n * d);
    for (std::size_t r = 0; r < n; ++r) {
      const double s = std::exp(log_scale(rng));
      for (std::size_t c = 0; c < d; ++c) {
        rows[r * d + c] = normal(rng);
        scaled[r * d + c] = s * rows[r * d + c];
      }
    }
    const auto base = compute_rdm(rows, n, d);
    const auto sc = compute_rdm(scaled, n, d);
    for (std::size_t k = 0; k < base.values().size(); ++k) {
      worst_scale = std::max(worst_scale, std::fabs(base.values()[k] - sc.values()[k]));
    }
  }
  return pass_if(worst <= 1e-12 && worst_scale <= 1e-12,
                 fmt("200 matrices n<=12: max |diff| vs double loop = %.3g; row-scaling max |diff| = %.3g (tol 1e-12)",
                     worst, worst_scale));
}

Verdict shuffle_equivalence() {
  std::mt19937_64 rng(20240103);
  std::size_t checked = 0, mismatches = 0;
  // n = 2 has a single distance, too short for a rank correlation.
  for (std::size_t n = 3; n <= 8; ++n) {
    const auto model_rows = testing::random_matrix(rng, n, 5);
    const auto brain_rows = testing::random_matrix(rng, n, 7);
    const auto model = compute_rdm(model_rows);
    const auto brain = compute_rdm(brain_rows);
    const auto model_ranked = rank_vector(model.values());
    const auto brain_ranked = rank_vector(brain.values());
    for (const auto& perm : oracle::all_derangements(n)) {
      const auto recomputed = compute_rdm(brain_rows.select_rows(perm));
      const auto remapped = permute_condensed(brain, perm);
      const double via_ranks = correlate(model_ranked, reorder(brain_ranked, condensed_permutation(n, perm)));
      const bool same_values = std::equal(remapped.begin(), remapped.end(), recomputed.values().begin());
      if (!same_values || via_ranks != rdm_correlation(model, recomputed)) ++mismatches;
      ++checked;
    }
  }
  return pass_if(mismatches == 0,
                 fmt("%zu derangements for n=3..8, %zu inexact (tol: exact)", checked, mismatches));
}

Verdict baseline_null() {
  std::mt19937_64 rng(20240104);
  double worst = 0.0;
  const int pairs = 10;
  for (int i = 0; i < pairs; ++i) {
    const auto a = compute_rdm(testing::random_matrix(rng, 20, 10));
    const auto b = compute_rdm(testing::random_matrix(rng, 20, 10));
    const auto est = shuffled_baseline(a, b, 10000, 1000 + i);
    worst = std::max(worst, std::fabs(est.mean_rho));
  }
  return pass_if(worst < 0.02,
                 fmt("%d independent RDM pairs x 10000 shuffles, max |mean rho| = %.4f (limit 0.02)", pairs, worst));
}

Verdict t_test_oracle() {
  std::mt19937_64 rng(20240105);
  std::normal_distribution<double> normal(0.3, 1.0);
  double worst = 0.0;
  for (int df = 1; df <= 30; ++df) {
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> a(df + 1), b(df + 1);
      for (auto& x : a) x = normal(rng);
      for (auto& x : b) x = normal(rng) - 0.3;
      const auto r = paired_t_one_sided(a, b);
      worst = std::max(worst, std::fabs(r.p_value - oracle::student_t_upper_tail(r.t_statistic, df)));
    }
    for (double t = -8.0; t <= 8.0; t += 0.25) {
      worst = std::max(worst, std::fabs((1.0 - student_t_cdf(t, df)) - oracle::student_t_upper_tail(t, df)));
    }
  }
  const std::vector<double> a{1, 2, 3}, b{0, 0, 0};
  const auto ex = paired_t_one_sided(a, b);
  const double p_ref = oracle::student_t_upper_tail(std::sqrt(12.0), 2);
  const bool example_ok = std::fabs(ex.t_statistic - std::sqrt(12.0)) <= 1e-12 && std::fabs(ex.p_value - p_ref) <= 1e-9 &&
                          std::fabs(ex.t_statistic - 3.4641) < 5e-5 && std::fabs(ex.p_value - 0.0371) < 5e-5;
  return pass_if(worst <= 1e-9 && example_ok,
                 fmt("df 1..30 max |p diff| = %.3g (tol 1e-9); [1,2,3] vs [0,0,0]: t = %.6f, p = %.6f", worst,
                     ex.t_statistic, ex.p_value));
}

struct SimPoint {
  double rho = 0, lower = 0, upper = 0;
};

SimPoint simulate(double sigma, std::uint64_t seed) {
  synthetic::Spec spec;
  spec.n_concepts = 30;
  spec.latent_dim = 10;
  spec.n_participants = 8;
  spec.n_layers = 1;
  spec.true_layer = 0;
  spec.noise_sigma = sigma;
  spec.networks = {Network::Visual};
  spec.seed = seed;
  const auto data = synthetic::generate(spec);
  const auto model = compute_rdm(data.latents);
  std::vector<Rdm> subjects;
  for (const auto& p : data.brain[0].participants) subjects.push_back(compute_rdm(p.data));
  SimPoint out;
  for (const auto& s : subjects) out.rho += rdm_correlation(model, s);
  out.rho /= subjects.size();
  const auto c = noise_ceiling(subjects);
  out.lower = c.lower;
  out.upper = c.upper;
  return out;
}

Verdict noise_ceiling_properties() {
  std::mt19937_64 rng(20240106);
  std::size_t order_violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t k = 2 + rng() % 7;
    const std::size_t n = 4 + rng() % 12;
    std::vector<Rdm> subjects;
    for (std::size_t s = 0; s < k; ++s) subjects.push_back(compute_rdm(testing::random_matrix(rng, n, 6)));
    const auto c = noise_ceiling(subjects);
    if (!(c.lower <= c.upper)) ++order_violations;
  }

  const auto one = compute_rdm(testing::random_matrix(rng, 10, 6));
  const std::vector<Rdm> same(5, one);
  const auto identical = noise_ceiling(same);
  const bool identical_ok = identical.lower == 1.0 && identical.upper == 1.0;

  const std::vector<double> sigmas{0.0, 0.5, 1.0, 2.0, 4.0};
  const int seeds = 50;
  std::vector<SimPoint> mean(sigmas.size());
  std::vector<std::vector<SimPoint>> per_seed(sigmas.size(), std::vector<SimPoint>(seeds));
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    for (int s = 0; s < seeds; ++s) {
      const auto p = simulate(sigmas[i], 500 + s);
      per_seed[i][s] = p;
      mean[i].rho += p.rho / seeds;
      mean[i].lower += p.lower / seeds;
      mean[i].upper += p.upper / seeds;
    }
  }
  bool sandwich = true;
  std::string sandwich_detail;
  for (std::size_t i = 1; i <= 3; ++i) {
    sandwich = sandwich && mean[i].rho >= mean[i].lower - 0.05 && mean[i].rho <= mean[i].upper + 0.05;
    sandwich_detail += fmt(" sigma=%.1f: rho %.3f in [%.3f, %.3f];", sigmas[i], mean[i].rho, mean[i].lower, mean[i].upper);
  }
  // Monotonicity over consecutive sigma steps, per seed and per quantity.
  std::size_t steps = 0, violations = 0;
  bool means_monotone = true;
  for (std::size_t i = 1; i < sigmas.size(); ++i) {
    for (int s = 0; s < seeds; ++s) {
      const auto& a = per_seed[i - 1][s];
      const auto& b = per_seed[i][s];
      violations += (b.rho > a.rho) + (b.lower > a.lower) + (b.upper > a.upper);
      steps += 3;
    }
    means_monotone = means_monotone && mean[i].rho <= mean[i - 1].rho && mean[i].lower <= mean[i - 1].lower &&
                     mean[i].upper <= mean[i - 1].upper;
  }
  const double violation_rate = static_cast<double>(violations) / steps;
  return pass_if(order_violations == 0 && identical_ok && sandwich && means_monotone && violation_rate <= 0.05,
                 fmt("lower<=upper violations %zu/1000; identical subjects (%.1f, %.1f);", order_violations,
                     identical.lower, identical.upper) +
                     sandwich_detail +
                     fmt(" monotone in sigma: %zu/%zu per-seed violations (%.1f%%, limit 5%%), seed means %s", violations,
                         steps, 100.0 * violation_rate, means_monotone ? "monotone" : "NOT monotone"));
}

int run_tool(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(RSATOOL_PATH) + " " + args + " >" + log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Verdict end_to_end_determinism() {
  testing::TempDir dir;
  std::vector<std::string> outputs;
  std::vector<std::vector<std::string>> contents;
  const auto t0 = Clock::now();
  for (const char* run : {"a", "b"}) {
    const fs::path fx = dir.path() / run;
    fs::copy(fs::path(RSA_SOURCE_DIR) / "fixtures" / "synthetic", fx, fs::copy_options::recursive);
    if (run_tool("run --config " + (fx / "config.json").string(), dir.path() / (std::string(run) + ".log")) != 0) {
      return {Verdict::Fail, "rsatool run exited with an error"};
    }
    std::vector<std::string> names, texts;
    for (const auto& e : fs::directory_iterator(fx / "out")) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    for (const auto& n : names) texts.push_back(testing::read_text(fx / "out" / n));
    if (outputs.empty()) outputs = names;
    if (names != outputs) return {Verdict::Fail, "runs wrote different file sets"};
    contents.push_back(texts);
  }
  const double elapsed = seconds_since(t0);
  const bool has_all = std::count_if(outputs.begin(), outputs.end(), [](const std::string& n) {
                         return n == "report.json" || n == "report.csv" || n.ends_with(".svg");
                       }) == static_cast<long>(outputs.size()) &&
                       outputs.size() >= 3;
  return pass_if(has_all && contents[0] == contents[1] && elapsed < 60.0,
                 fmt("%zu output files byte-identical across two runs: %s; total runtime %.2f s (limit 60 s)",
                     outputs.size(), contents[0] == contents[1] ? "yes" : "no", elapsed));
}

Verdict scale_180() {
  synthetic::Spec spec;
  spec.concepts = synthetic::read_concept_list(fs::path(RSA_SOURCE_DIR) / "fixtures" / "pereira_concepts.txt");
  spec.n_concepts = spec.concepts.size();
  spec.latent_dim = 64;
  spec.n_participants = 16;
  spec.n_layers = 24;
  spec.true_layer = 12;
  spec.layer_dim = 768;
  spec.noise_sigma = 1.0;
  spec.embed_voxels = true;
  spec.voxels_min = 1000;
  spec.voxels_max = 3000;
  spec.seed = 180;
  const auto data = synthetic::generate(spec);
  ExperimentOptions options;
  options.n_shuffles = 100;
  options.seed = 1;
  const auto t0 = Clock::now();
  const auto reports = run_brain_experiment(data.reps, data.brain, options);
  const double elapsed = seconds_since(t0);
  bool shape_ok = reports.size() == 3;
  for (const auto& r : reports) shape_ok = shape_ok && r.per_participant_rho.size() == 16 && r.layer_means.size() == 24;
  return pass_if(shape_ok && elapsed < 300.0,
                 fmt("180 concepts x 16 participants x 24 layers x 3 networks, %zu shuffles: %.2f s on %u hardware "
                     "threads (limit 300 s); best layer %d",
                     options.n_shuffles, elapsed, std::thread::hardware_concurrency(),
                     reports.empty() ? -1 : reports[0].best_layer));
}

Verdict public_data_directional() {
  const fs::path config = fs::path(RSA_SOURCE_DIR) / "data" / "pereira" / "config_glove.json";
  if (!fs::exists(config)) return {Verdict::Skipped, "converted fMRI data not present at " + config.string()};
  const auto cfg = load_experiment_config(config);
  ExperimentOptions options;
  options.n_shuffles = cfg.n_shuffles;
  options.seed = cfg.seed;
  options.allow_intersection = cfg.intersect_concepts;
  std::vector<BrainResponseSet> brains;
  for (const auto& b : cfg.brain) brains.push_back(load_brain_set(b.manifest, b.network));
  for (const auto& path : cfg.representations) {
    const auto reps = load_representation_set(path);
    if (reps.condition != Condition::Sentence) continue;
    for (const auto& r : run_brain_experiment(reps, brains, options)) {
      if (r.network == Network::LanguageLH) {
        return pass_if(r.significance.p_value < 0.05,
                       fmt("sentence condition, language_lh: p = %.4g (limit 0.05)", r.significance.p_value));
      }
    }
  }
  return {Verdict::Fail, "config has no sentence-condition language_lh result"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"spearman-oracle", spearman_oracle},
      {"rdm-brute-force", rdm_brute_force},
      {"shuffle-equivalence", shuffle_equivalence},
      {"baseline-null", baseline_null},
      {"t-test-oracle", t_test_oracle},
      {"noise-ceiling-properties", noise_ceiling_properties},
      {"end-to-end-determinism", end_to_end_determinism},
      {"scale-180-concepts", scale_180},
      {"public-data-directional (optional)", public_data_directional},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {Verdict::Fail, std::string("threw: ") + e.what()};
    }
    const char* tag = v.kind == Verdict::Pass ? "PASS" : v.kind == Verdict::Fail ? "FAIL" : "SKIPPED";
    std::printf("%-8s %s: %s\n", tag, name.c_str(), v.detail.c_str());
    std::fflush(stdout);
    failures += v.kind == Verdict::Fail;
  }
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
