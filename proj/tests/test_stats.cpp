#include <doctest.h>

#include <cmath>
#include <map>

#include <tbb/global_control.h>

#include "oracles.hpp"
#include "rsa/rdm.hpp"
#include "rsa/stats.hpp"
#include "test_support.hpp"

using namespace rsa;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

std::vector<double> non_constant(std::mt19937_64& rng, std::size_t n, bool ties) {
  for (;;) {
    auto v = oracle::random_vector(rng, n, ties);
    if (std::any_of(v.begin(), v.end(), [&](double x) { return x != v.front(); })) return v;
  }
}

Rdm random_rdm(std::mt19937_64& rng, std::size_t n) {
  return compute_rdm(testing::random_matrix(rng, n, 6));
}

}  // namespace

TEST_CASE("rank_with_average_ties examples") {
  CHECK(rank_with_average_ties(std::vector<double>{10, 20, 30}) == std::vector<double>{1, 2, 3});
  CHECK(rank_with_average_ties(std::vector<double>{1, 2, 2, 3}) == std::vector<double>{1, 2.5, 2.5, 4});
  CHECK(rank_with_average_ties(std::vector<double>{5, 5, 5}) == std::vector<double>{2, 2, 2});
  // same answers from the counting oracle
  const std::vector<double> ties{1, 2, 2, 3};
  const auto o = oracle::ranks(ties);
  CHECK(o[1] == 2.5L);
  CHECK(code_of([] { rank_with_average_ties(std::vector<double>{1, NAN}); }) == ErrorCode::NonFiniteValue);
}

TEST_CASE("spearman examples") {
  const std::vector<double> x{1, 2, 3, 4}, y{2, 1, 4, 3};
  CHECK(oracle::spearman(x, y) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(spearman(x, y) == doctest::Approx(0.6).epsilon(1e-15));

  std::vector<double> lin(x);
  for (auto& v : lin) v = 2 * v + 7;
  CHECK(spearman(x, lin) == 1.0);

  CHECK(spearman(std::vector<double>{1, 2, 2, 3}, std::vector<double>{1, 3, 3, 5}) == 1.0);

  CHECK(code_of([] { spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}); }) ==
        ErrorCode::ConstantVector);
  CHECK(code_of([] { spearman(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}); }) ==
        ErrorCode::LengthMismatch);
  CHECK(code_of([] { spearman(std::vector<double>{1, 2}, std::vector<double>{2, 1}); }) == ErrorCode::TooShort);
}

TEST_CASE("property: spearman agrees with the rank-enumeration oracle") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 3 + rng() % 298;
    const bool ties = trial % 2 == 1;
    const auto x = non_constant(rng, n, ties);
    const auto y = non_constant(rng, n, ties);
    REQUIRE(std::fabs(spearman(x, y) - oracle::spearman(x, y)) <= 1e-12);
  }
}

TEST_CASE("property: spearman symmetry and negation") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng() % 100;
    const auto x = non_constant(rng, n, trial % 3 == 0);
    const auto y = non_constant(rng, n, trial % 2 == 0);
    REQUIRE(spearman(x, y) == spearman(y, x));
    std::vector<double> neg(x);
    for (auto& v : neg) v = -v;
    REQUIRE(spearman(x, neg) == doctest::Approx(-1.0).epsilon(1e-15));
  }
}

TEST_CASE("paired_t_one_sided examples") {
  const std::vector<double> a{1, 2, 3}, b{0, 0, 0};
  const auto null = paired_t_one_sided(a, a);
  CHECK(null.t_statistic == 0.0);
  CHECK(null.p_value == 0.5);
  CHECK_FALSE(null.significant);

  // non-degenerate null: differences with mean exactly 0
  const auto centred = paired_t_one_sided(std::vector<double>{1, -1, 2, -2}, std::vector<double>{0, 0, 0, 0});
  CHECK(centred.t_statistic == 0.0);
  CHECK(centred.p_value == doctest::Approx(0.5).epsilon(1e-14));

  const auto pos = paired_t_one_sided(a, b);
  CHECK(pos.t_statistic == doctest::Approx(3.46410161513775458705).epsilon(1e-14));
  CHECK(pos.degrees_of_freedom == 2);
  CHECK(std::fabs(pos.p_value - 0.037089950113724269217) < 1e-12);
  CHECK(pos.significant);

  const auto neg = paired_t_one_sided(b, a);
  CHECK(neg.t_statistic == doctest::Approx(-3.46410161513775458705).epsilon(1e-14));
  CHECK(std::fabs(neg.p_value - (1.0 - 0.037089950113724269217)) < 1e-12);
  CHECK_FALSE(neg.significant);

  const auto shift = paired_t_one_sided(std::vector<double>{2, 3, 4}, std::vector<double>{1, 2, 3});
  CHECK(shift.p_value == 0.0);
  CHECK(shift.significant);
  const auto shift_down = paired_t_one_sided(std::vector<double>{1, 2, 3}, std::vector<double>{2, 3, 4});
  CHECK(shift_down.p_value == 1.0);

  CHECK(code_of([] { paired_t_one_sided(std::vector<double>{1}, std::vector<double>{0}); }) == ErrorCode::TooShort);
  CHECK(code_of([] { paired_t_one_sided(std::vector<double>{1, 2}, std::vector<double>{0}); }) ==
        ErrorCode::LengthMismatch);
}

TEST_CASE("property: one-sided p matches a 50-digit Student t reference for df 1..30") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> normal(0.3, 1.0);
  for (int df = 1; df <= 30; ++df) {
    for (double t : {-8.0, -2.5, -0.3, 0.0, 0.7, 1.5, 2.0, 3.4641016151377544, 6.0, 12.0}) {
      REQUIRE(std::fabs((1.0 - student_t_cdf(t, df)) - oracle::student_t_upper_tail(t, df)) <= 1e-9);
    }
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> a(df + 1), b(df + 1);
      for (auto& v : a) v = normal(rng);
      for (auto& v : b) v = normal(rng) - 0.3;
      const auto r = paired_t_one_sided(a, b);
      REQUIRE(r.degrees_of_freedom == df);
      REQUIRE(std::fabs(r.p_value - oracle::student_t_upper_tail(r.t_statistic, df)) <= 1e-9);
      REQUIRE(r.significant == (r.p_value < 0.05));
    }
  }
}

TEST_CASE("incomplete_beta edge values") {
  CHECK(incomplete_beta(2, 3, 0.0) == 0.0);
  CHECK(incomplete_beta(2, 3, 1.0) == 1.0);
  // I_x(1,1) = x
  CHECK(incomplete_beta(1, 1, 0.37) == doctest::Approx(0.37).epsilon(1e-14));
  // I_x(a,1) = x^a
  CHECK(incomplete_beta(3.5, 1, 0.6) == doctest::Approx(std::pow(0.6, 3.5)).epsilon(1e-13));
  CHECK(code_of([] { incomplete_beta(0, 1, 0.5); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("sample_derangement") {
  Rng rng(1);
  for (int i = 0; i < 50; ++i) CHECK(sample_derangement(2, rng) == std::vector<std::size_t>{1, 0});

  // The only derangements of 3 elements, by enumeration.
  const auto all3 = oracle::all_derangements(3);
  REQUIRE(all3.size() == 2);
  std::map<std::vector<std::size_t>, int> counts;
  for (int i = 0; i < 10000; ++i) ++counts[sample_derangement(3, rng)];
  REQUIRE(counts.size() == 2);
  for (const auto& d : all3) CHECK(std::fabs(counts[d] / 10000.0 - 0.5) <= 0.02);

  CHECK(code_of([&] { sample_derangement(1, rng); }) == ErrorCode::NoDerangementExists);
  CHECK(code_of([&] { sample_derangement(0, rng); }) == ErrorCode::NoDerangementExists);
}

TEST_CASE("property: sample_derangement is uniform over the 44 derangements of 5") {
  Rng rng(99);
  const auto all = oracle::all_derangements(5);
  REQUIRE(all.size() == 44);
  std::map<std::vector<std::size_t>, int> counts;
  const int draws = 44000;
  for (int i = 0; i < draws; ++i) ++counts[sample_derangement(5, rng)];
  CHECK(counts.size() == 44);
  // chi-square with 43 dof; 99.9th percentile is about 77.4
  double chi2 = 0.0;
  for (const auto& d : all) {
    const double diff = counts[d] - 1000.0;
    chi2 += diff * diff / 1000.0;
  }
  CHECK(chi2 < 77.4);
}

TEST_CASE("shuffled_baseline examples") {
  const Matrix rows(3, 2, {1.0F, 0.0F, 0.2F, 1.0F, 1.0F, 3.0F});
  const auto rdm = compute_rdm(rows);
  REQUIRE(rdm.values()[0] != rdm.values()[1]);
  REQUIRE(rdm.values()[1] != rdm.values()[2]);

  const std::uint64_t seed = 77;
  const auto est = shuffled_baseline(rdm, rdm, 1, seed);
  Rng rng(derive_seed(seed, 0));
  const auto perm = sample_derangement(3, rng);
  const auto brute = compute_rdm(rows.select_rows(perm));
  CHECK(est.mean_rho == rdm_correlation(rdm, brute));
  CHECK(est.mean_rho == doctest::Approx(oracle::spearman({rdm.values().begin(), rdm.values().end()},
                                                         {brute.values().begin(), brute.values().end()}))
                            .epsilon(1e-12));
  CHECK(est.n_shuffles == 1);
  CHECK(est.seed == seed);

  CHECK(code_of([&] { shuffled_baseline(rdm, rdm, 0, seed); }) == ErrorCode::InvalidArgument);

  std::mt19937_64 g(5);
  const auto a = random_rdm(g, 15);
  const auto b = random_rdm(g, 15);
  const auto r1 = shuffled_baseline(a, b, 200, 1234);
  const auto r2 = shuffled_baseline(a, b, 200, 1234);
  CHECK(r1.mean_rho == r2.mean_rho);
  CHECK(shuffled_baseline(a, b, 200, 1235).mean_rho != r1.mean_rho);
  CHECK(code_of([&] { shuffled_baseline(a, random_rdm(g, 14), 5, 1); }) == ErrorCode::SizeMismatch);
}

TEST_CASE("property: index-remapped shuffling equals row-permute-then-recompute, all derangements n <= 8") {
  std::mt19937_64 rng(31);
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
      REQUIRE(std::equal(remapped.begin(), remapped.end(), recomputed.values().begin()));
      const double via_ranks = correlate(model_ranked, reorder(brain_ranked, condensed_permutation(n, perm)));
      REQUIRE(via_ranks == rdm_correlation(model, recomputed));
    }
  }
}

TEST_CASE("shuffled_baseline is independent of thread count") {
  std::mt19937_64 g(6);
  const auto a = random_rdm(g, 20);
  const auto b = random_rdm(g, 20);
  double serial = 0.0;
  {
    tbb::global_control one(tbb::global_control::max_allowed_parallelism, 1);
    serial = shuffled_baseline(a, b, 500, 9).mean_rho;
  }
  tbb::global_control many(tbb::global_control::max_allowed_parallelism, 8);
  CHECK(shuffled_baseline(a, b, 500, 9).mean_rho == serial);
}

TEST_CASE("noise_ceiling examples") {
  std::mt19937_64 rng(41);
  const auto r = random_rdm(rng, 10);
  std::vector<Rdm> same(5, r);
  const auto c = noise_ceiling(same);
  CHECK(c.lower == 1.0);
  CHECK(c.upper == 1.0);

  std::vector<Rdm> one{r};
  CHECK(noise_ceiling_upper(one) == 1.0);
  CHECK(code_of([&] { noise_ceiling_lower(one); }) == ErrorCode::SingleSubjectLowerBound);
  CHECK(code_of([&] { noise_ceiling(one); }) == ErrorCode::SingleSubjectLowerBound);

  std::vector<Rdm> two{Rdm(3, {0.1, 0.5, 0.9}), Rdm(3, {0.2, 0.4, 0.8})};
  const auto c2 = noise_ceiling(two);
  CHECK(c2.lower == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c2.upper == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("noise_ceiling with a non-monotone second subject and a tied mean") {
  // r2 reverses the order of the last two pairs; the group mean then ties them.
  const std::vector<double> r1{0.1, 0.5, 0.9}, r2{0.1, 0.9, 0.5};
  std::vector<Rdm> two{Rdm(3, r1), Rdm(3, r2)};

  const std::vector<double> mean{0.1, 0.7, 0.7};
  const double upper_oracle = 0.5 * (oracle::spearman(r1, mean) + oracle::spearman(r2, mean));
  const double lower_oracle = 0.5 * (oracle::spearman(r1, r2) + oracle::spearman(r2, r1));
  // hand evaluation: spearman(r1, r2) = 0.5, each vs the tied mean = sqrt(3)/2
  CHECK(lower_oracle == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(upper_oracle == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-15));

  const auto c = noise_ceiling(two);
  CHECK(std::fabs(c.lower - lower_oracle) <= 1e-12);
  CHECK(std::fabs(c.upper - upper_oracle) <= 1e-12);
}

TEST_CASE("property: noise_ceiling matches brute force and lower <= upper") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + rng() % 15;
    const std::size_t n = 4 + rng() % 8;
    std::vector<Rdm> subjects;
    for (std::size_t s = 0; s < k; ++s) subjects.push_back(random_rdm(rng, n));
    const auto c = noise_ceiling(subjects);
    REQUIRE(c.lower <= c.upper + 1e-12);
    REQUIRE(c.lower >= -1.0);
    REQUIRE(c.upper <= 1.0);

    const std::size_t len = condensed_length(n);
    double upper = 0.0, lower = 0.0;
    for (std::size_t s = 0; s < k; ++s) {
      std::vector<double> all(len, 0.0), others(len, 0.0);
      for (std::size_t o = 0; o < k; ++o) {
        for (std::size_t p = 0; p < len; ++p) {
          all[p] += subjects[o].values()[p];
          if (o != s) others[p] += subjects[o].values()[p];
        }
      }
      std::vector<double> mine(subjects[s].values().begin(), subjects[s].values().end());
      upper += oracle::spearman(mine, all);
      lower += oracle::spearman(mine, others);
    }
    REQUIRE(std::fabs(c.upper - upper / k) <= 1e-12);
    REQUIRE(std::fabs(c.lower - lower / k) <= 1e-12);
  }
}

TEST_CASE("derive_seed gives distinct streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(derive_seed(42, s));
  CHECK(seen.size() == 1000);
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
}
