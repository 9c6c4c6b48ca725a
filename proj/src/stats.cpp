#include "rsa/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include "rsa/rdm.hpp"

namespace rsa {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

std::vector<double> rank_with_average_ties(std::span<const double> x) {
  const std::size_t n = x.size();
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "cannot rank a non-finite value");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  std::vector<double> ranks(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && x[order[end]] == x[order[start]]) ++end;
    // positions start..end-1 hold ranks start+1..end
    const double rank = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = rank;
    start = end;
  }
  return ranks;
}

namespace {

double sum_of_squares(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

RankedVector rank_vector(std::span<const double> x) {
  RankedVector out;
  out.centered = rank_with_average_ties(x);
  if (out.centered.empty()) return out;
  // Average-tie ranks are half-integers summing to n(n+1)/2, so the mean is exact.
  const double mean = 0.5 * (static_cast<double>(out.centered.size()) + 1.0);
  for (auto& r : out.centered) r -= mean;
  out.sum_squares = sum_of_squares(out.centered);
  return out;
}

RankedVector reorder(const RankedVector& r, std::span<const std::size_t> source) {
  if (source.size() != r.size()) throw Error(ErrorCode::LengthMismatch, "reorder map has the wrong length");
  RankedVector out;
  out.centered.resize(source.size());
  for (std::size_t k = 0; k < source.size(); ++k) out.centered[k] = r.centered[source[k]];
  out.sum_squares = sum_of_squares(out.centered);
  return out;
}

double correlate(const RankedVector& a, const RankedVector& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "vectors of length " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  if (a.size() < 3) throw Error(ErrorCode::TooShort, "spearman needs at least 3 observations");
  if (a.sum_squares == 0.0 || b.sum_squares == 0.0) {
    throw Error(ErrorCode::ConstantVector, "correlation undefined for a constant vector");
  }
  double cross = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) cross += a.centered[k] * b.centered[k];
  const double rho = cross / std::sqrt(a.sum_squares * b.sum_squares);
  return std::clamp(rho, -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "vectors of length " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
  }
  if (x.size() < 3) throw Error(ErrorCode::TooShort, "spearman needs at least 3 observations");
  return correlate(rank_vector(x), rank_vector(y));
}

// ---------------------------------------------------------------------------

namespace {

// Continued fraction for I_x(a,b), modified Lentz evaluation.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "incomplete_beta needs a, b > 0");
  if (std::isnan(x) || x < 0.0 || x > 1.0) throw Error(ErrorCode::InvalidArgument, "incomplete_beta needs x in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw Error(ErrorCode::InvalidArgument, "degrees of freedom must be positive");
  if (std::isnan(t)) throw Error(ErrorCode::NonFiniteValue, "t statistic is NaN");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  // Tail mass P(|T| > |t|) / 2 expressed through I_x(df/2, 1/2).
  const double x = df / (df + t * t);
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

SignificanceResult paired_t_one_sided(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "paired samples differ in length");
  const std::size_t n = a.size();
  if (n < 2) throw Error(ErrorCode::TooShort, "paired t-test needs at least 2 pairs");

  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  SignificanceResult r;
  r.degrees_of_freedom = static_cast<int>(n - 1);
  if (sd == 0.0) {
    if (mean > 0.0) {
      r.t_statistic = std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    } else if (mean < 0.0) {
      r.t_statistic = -std::numeric_limits<double>::infinity();
      r.p_value = 1.0;
    } else {
      // a == b: the t = 0 limit of the regular formula.
      r.t_statistic = 0.0;
      r.p_value = 0.5;
    }
  } else {
    r.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
    r.p_value = std::clamp(1.0 - student_t_cdf(r.t_statistic, r.degrees_of_freedom), 0.0, 1.0);
  }
  r.significant = r.p_value < kSignificanceLevel;
  return r;
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> sample_derangement(std::size_t n, Rng& rng) {
  if (n < 2) throw Error(ErrorCode::NoDerangementExists, "no derangement of " + std::to_string(n) + " elements");
  std::vector<std::size_t> perm(n);
  for (;;) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i);
      std::swap(perm[i], perm[pick(rng)]);
    }
    bool fixed_point = false;
    for (std::size_t i = 0; i < n && !fixed_point; ++i) fixed_point = perm[i] == i;
    if (!fixed_point) return perm;
  }
}

std::vector<std::size_t> condensed_permutation(std::size_t n, std::span<const std::size_t> perm) {
  if (perm.size() != n) throw Error(ErrorCode::LengthMismatch, "permutation length differs from n");
  std::vector<std::size_t> map(condensed_length(n));
  std::size_t k = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++k) map[k] = condensed_index(n, perm[i], perm[j]);
  }
  return map;
}

ShuffleEstimate shuffled_baseline(const RankedVector& model, const Rdm& brain, std::size_t n_shuffles,
                                  std::uint64_t seed) {
  if (n_shuffles == 0) throw Error(ErrorCode::InvalidArgument, "n_shuffles must be >= 1");
  if (model.size() != brain.values().size()) {
    throw Error(ErrorCode::SizeMismatch, "model and brain RDMs differ in concept count");
  }
  // Permuting the values of a vector permutes its ranks, so the brain side is
  // ranked once and then remapped per shuffle.
  const RankedVector brain_ranked = rank_vector(brain.values());
  std::vector<double> rhos(n_shuffles);
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n_shuffles), [&](const tbb::blocked_range<std::size_t>& r) {
    for (std::size_t s = r.begin(); s != r.end(); ++s) {
      Rng rng(derive_seed(seed, s));
      const auto perm = sample_derangement(brain.n(), rng);
      rhos[s] = correlate(model, reorder(brain_ranked, condensed_permutation(brain.n(), perm)));
    }
  });
  ShuffleEstimate out;
  out.mean_rho = std::accumulate(rhos.begin(), rhos.end(), 0.0) / static_cast<double>(n_shuffles);
  out.n_shuffles = n_shuffles;
  out.seed = seed;
  return out;
}

ShuffleEstimate shuffled_baseline(const Rdm& model, const Rdm& brain, std::size_t n_shuffles, std::uint64_t seed) {
  if (model.n() != brain.n()) throw Error(ErrorCode::SizeMismatch, "model and brain RDMs differ in concept count");
  return shuffled_baseline(rank_vector(model.values()), brain, n_shuffles, seed);
}

// ---------------------------------------------------------------------------

double noise_ceiling_upper(std::span<const Rdm> subject_rdms) {
  if (subject_rdms.empty()) throw Error(ErrorCode::EmptyDataset, "noise ceiling needs at least one subject");
  const Rdm group = mean_rdm(subject_rdms);
  const RankedVector group_ranked = rank_vector(group.values());
  double sum = 0.0;
  for (const auto& r : subject_rdms) sum += correlate(rank_vector(r.values()), group_ranked);
  return sum / static_cast<double>(subject_rdms.size());
}

double noise_ceiling_lower(std::span<const Rdm> subject_rdms) {
  const std::size_t k = subject_rdms.size();
  if (k == 0) throw Error(ErrorCode::EmptyDataset, "noise ceiling needs at least one subject");
  if (k == 1) throw Error(ErrorCode::SingleSubjectLowerBound, "lower noise ceiling needs at least 2 subjects");
  double sum = 0.0;
  std::vector<Rdm> others;
  others.reserve(k - 1);
  for (std::size_t s = 0; s < k; ++s) {
    others.clear();
    for (std::size_t o = 0; o < k; ++o) {
      if (o != s) others.push_back(subject_rdms[o]);
    }
    const Rdm group = mean_rdm(others);
    sum += correlate(rank_vector(subject_rdms[s].values()), rank_vector(group.values()));
  }
  return sum / static_cast<double>(k);
}

NoiseCeiling noise_ceiling(std::span<const Rdm> subject_rdms) {
  NoiseCeiling c;
  c.lower = noise_ceiling_lower(subject_rdms);
  c.upper = noise_ceiling_upper(subject_rdms);
  return c;
}

}  // namespace rsa
