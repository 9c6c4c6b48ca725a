#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "rsa/error.hpp"

namespace rsa {

class Rdm;

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

/// Generator used for every random draw. Independent streams are obtained by
/// deriving sub-seeds with `derive_seed`, so parallel shuffles do not depend on
/// execution order.
using Rng = std::mt19937_64;

inline constexpr std::string_view kRngName = "mt19937_64 (splitmix64-derived sub-seeds)";

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

// ---------------------------------------------------------------------------
// Rank statistics
// ---------------------------------------------------------------------------

/// 1-based ranks; ties share the mean of the ranks they span.
/// Throws NonFiniteValue.
std::vector<double> rank_with_average_ties(std::span<const double> x);

/// Rank-transformed vector, centred, with its sum of squares cached so one
/// ranking can be correlated against many others.
struct RankedVector {
  std::vector<double> centered;
  double sum_squares = 0.0;

  std::size_t size() const noexcept { return centered.size(); }
};

RankedVector rank_vector(std::span<const double> x);

/// Reorders a ranked vector: element k of the result is element `source[k]` of
/// the input. The sum of squares is recomputed over the new order.
RankedVector reorder(const RankedVector& r, std::span<const std::size_t> source);

/// Pearson correlation of two ranked vectors. Throws LengthMismatch, TooShort,
/// ConstantVector.
double correlate(const RankedVector& a, const RankedVector& b);

/// Pearson correlation of the average-tie rank transforms.
/// Throws LengthMismatch, TooShort (< 3), ConstantVector, NonFiniteValue.
double spearman(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Significance
// ---------------------------------------------------------------------------

inline constexpr double kSignificanceLevel = 0.05;

struct SignificanceResult {
  double t_statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
  bool significant = false;
};

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// P(T <= t) for Student's t with `df` degrees of freedom.
double student_t_cdf(double t, double df);

/// One-sided paired t-test of H1: mean(a) > mean(b).
/// Zero-variance differences give p = 0 when mean(d) > 0, p = 1 when
/// mean(d) < 0, and t = 0, p = 0.5 when all differences are exactly 0.
/// Throws LengthMismatch, TooShort (n < 2).
SignificanceResult paired_t_one_sided(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Shuffled baseline
// ---------------------------------------------------------------------------

/// Uniform permutation of 0..n-1 without fixed points (rejection sampling).
/// Throws NoDerangementExists for n < 2.
std::vector<std::size_t> sample_derangement(std::size_t n, Rng& rng);

/// Maps each condensed position of the row-permuted RDM to its source position
/// in the original condensed vector.
std::vector<std::size_t> condensed_permutation(std::size_t n, std::span<const std::size_t> perm);

struct ShuffleEstimate {
  double mean_rho = 0.0;
  std::size_t n_shuffles = 0;
  std::uint64_t seed = 0;
};

/// Mean Spearman correlation between `model` and copies of `brain` whose
/// concepts were remapped by a derangement. Shuffle s uses
/// Rng(derive_seed(seed, s)). Throws InvalidArgument for n_shuffles == 0 and
/// SizeMismatch for differing n.
ShuffleEstimate shuffled_baseline(const Rdm& model, const Rdm& brain, std::size_t n_shuffles,
                                  std::uint64_t seed);

/// Same as above with the model ranking precomputed.
ShuffleEstimate shuffled_baseline(const RankedVector& model, const Rdm& brain, std::size_t n_shuffles,
                                  std::uint64_t seed);

struct BaselineResult {
  std::vector<double> per_participant_mean_rho;
  double grand_mean = 0.0;
  std::size_t n_shuffles = 0;
  std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Noise ceiling
// ---------------------------------------------------------------------------

struct NoiseCeiling {
  double lower = 0.0;
  double upper = 0.0;
};

/// Mean over subjects of spearman(rdm_s, mean of all RDMs). k >= 1.
double noise_ceiling_upper(std::span<const Rdm> subject_rdms);

/// Mean over subjects of spearman(rdm_s, mean of the other RDMs).
/// Throws SingleSubjectLowerBound for k == 1.
double noise_ceiling_lower(std::span<const Rdm> subject_rdms);

NoiseCeiling noise_ceiling(std::span<const Rdm> subject_rdms);

}  // namespace rsa
