#include "../support.hpp"

#include <twosample/calibration.hpp>
#include <twosample/parallel.hpp>

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

using namespace twosample;

namespace {

Sample iota_sample(std::size_t count) {
  std::vector<double> v(count);
  std::iota(v.begin(), v.end(), 0.0);
  return sample1(v);
}

// Mean of X minus mean of Y.
double mean_gap(const Sample& x, const Sample& y) {
  return x.points().mean() - y.points().mean();
}

// Exact permutation p-value P(T >= T_obs) over all C(n+m, n) splits.
double exhaustive_pvalue(const std::vector<double>& pooled, std::size_t n,
                         const StatisticFn& fn) {
  const std::size_t total = pooled.size();
  std::vector<char> mask(total, 0);
  std::fill(mask.begin(), mask.begin() + static_cast<long>(n), 1);
  const auto split = [&](const std::vector<char>& mk) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < total; ++i) (mk[i] ? x : y).push_back(pooled[i]);
    return fn(sample1(x), sample1(y));
  };
  const double observed = split(mask);
  std::size_t hits = 0;
  std::size_t count = 0;
  std::sort(mask.begin(), mask.end());
  do {
    ++count;
    hits += split(mask) >= observed - 1e-12 * std::abs(observed) ? 1 : 0;
  } while (std::next_permutation(mask.begin(), mask.end()));
  return static_cast<double>(hits) / static_cast<double>(count);
}

}  // namespace

TEST_CASE("null model validation") {
  CHECK_THROWS_WITH(NullModel({NullKind::kPermutation, 99, 0, 2048}).validate(),
                    "insufficient resamples");
  CHECK_THROWS_AS(NullModel({NullKind::kBridgeSup, 1000, 0, 999}).validate(),
                  std::invalid_argument);
  CHECK_NOTHROW(NullModel({NullKind::kPermutation, 100, 0, 10}).validate());
  for (auto k : {NullKind::kPermutation, NullKind::kBridgeSup, NullKind::kBridgeL2,
                 NullKind::kOdcBridgeL2, NullKind::kOdcBridgeSup}) {
    CHECK(parse_null_kind(to_string(k)) == k);
  }
}

TEST_CASE("permutation p-value conventions") {
  const auto pooled = iota_sample(20);
  CHECK_THROWS_WITH(permutation_pvalue(pooled, 10, 10, mean_gap, 99, 1),
                    "insufficient resamples");
  // only the identity split attains the maximum of -mean_gap
  const StatisticFn neg = [](const Sample& x, const Sample& y) { return -mean_gap(x, y); };
  CHECK(permutation_pvalue(pooled, 10, 10, neg, 199, 5) == doctest::Approx(1.0 / 200.0));
  // a constant statistic ties everywhere
  const StatisticFn flat = [](const Sample&, const Sample&) { return 3.0; };
  CHECK(permutation_pvalue(pooled, 10, 10, flat, 150, 5) == 1.0);
  CHECK_THROWS_AS(permutation_pvalue(pooled, 10, 9, flat, 150, 5), std::invalid_argument);
}

TEST_CASE("single observations give two relabelings") {
  const Sample pooled = sample1({0.0, 1.0});
  const auto res = permutation_test(pooled, 1, 1, mean_gap, 1000, 9);
  // T_obs = -1; the swap gives +1 and the identity ties
  CHECK(res.exceedances == 1000);
  CHECK(res.p_value == 1.0);
  const StatisticFn flip = [](const Sample& x, const Sample& y) { return -mean_gap(x, y); };
  const auto half = permutation_test(pooled, 1, 1, flip, 1000, 9);
  const double c = static_cast<double>(half.exceedances);
  CHECK(half.p_value == doctest::Approx((1.0 + c) / 1001.0));
  CHECK(c > 400);
  CHECK(c < 600);
  const StatisticFn ks = [](const Sample& x, const Sample& y) {
    return ks_statistic(x, y).scaled();
  };
  CHECK(permutation_pvalue(pooled, 1, 1, ks, 100, 3) == 1.0);
}

TEST_CASE("monte carlo p-values approach the exhaustive permutation p-value") {
  const std::vector<double> data{0.3, 1.9, -0.4, 2.2, 0.8, 1.1, 3.0};
  const StatisticFn ks = [](const Sample& x, const Sample& y) {
    return ks_statistic(x, y).scaled();
  };
  const StatisticFn w = [](const Sample& x, const Sample& y) {
    return wasserstein_1d(x, y, 1.0).raw;
  };
  for (const auto* fn : {&ks, &w}) {
    const double exact = exhaustive_pvalue(data, 3, *fn);
    const std::size_t b = 20000;
    const double p = permutation_pvalue(sample1(data), 3, 4, *fn, b, 77);
    const double sigma = std::sqrt(exact * (1 - exact) / static_cast<double>(b));
    CHECK(std::abs(p - exact) <= 4.0 * sigma + 1.0 / b);
  }
}

TEST_CASE("permutation results do not depend on threads") {
  oracle::Gen gen(51);
  const auto pooled = sample1(gen.values(30));
  const StatisticFn fn = [](const Sample& x, const Sample& y) {
    return odc_w2_statistic(x, y).scaled();
  };
  const auto one = permutation_test(pooled, 12, 18, fn, 300, 4, 1);
  const auto four = permutation_test(pooled, 12, 18, fn, 300, 4, 4);
  CHECK(one.p_value == four.p_value);
  CHECK(one.exceedances == four.exceedances);
  CHECK(permutation_test(pooled, 12, 18, fn, 300, 5, 1).p_value != -1.0);
}

TEST_CASE("pairwise permutation path matches the generic path") {
  oracle::Gen gen(52);
  for (int rep = 0; rep < 5; ++rep) {
    const auto pooled = sample_of(gen.points(25, 2));
    const StatisticFn ed = [](const Sample& x, const Sample& y) {
      return energy_distance(x, y).value;
    };
    const auto generic = permutation_test(pooled, 10, 15, ed, 200, rep);
    const auto fast = permutation_test(energy_pairwise_form(pooled), 10, 15, 200, rep);
    CHECK(generic.exceedances == fast.exceedances);
    CHECK(generic.observed == doctest::Approx(fast.observed).epsilon(1e-12));
    const auto k = gaussian_kernel(1.1);
    const StatisticFn mmd = [k](const Sample& x, const Sample& y) { return mmd2(x, y, k).value; };
    CHECK(permutation_test(pooled, 10, 15, mmd, 200, rep).exceedances ==
          permutation_test(mmd_pairwise_form(pooled, k), 10, 15, 200, rep).exceedances);
  }
}

TEST_CASE("permutation p-values are super-uniform under the null") {
  const std::size_t trials = 300;
  const std::size_t b = 100;
  std::size_t small = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::mt19937_64 rng(substream_seed(2024, t));
    std::vector<double> v(30);
    for (auto& e : v) e = draw(Generator::kGaussian, rng);
    const double p = permutation_pvalue(
        sample1(v), 15, 15,
        [](const Sample& x, const Sample& y) { return wasserstein_1d(x, y, 2.0).raw; }, b, t);
    small += p <= 0.1 ? 1 : 0;
  }
  const double rate = static_cast<double>(small) / trials;
  const double bound = 0.1 + 1.0 / (b + 1);
  CHECK(rate <= bound + 3.0 * std::sqrt(bound * (1 - bound) / trials));
}

TEST_CASE("quantile tables") {
  const QuantileTable table(NullKind::kBridgeL2, {0.3, 0.1, 0.2, 0.4});
  CHECK(table.values()[0] == 0.1);
  CHECK(table.quantile(0.5) == 0.2);
  CHECK(table.quantile(1.0) == 0.4);
  CHECK(table.quantile(0.01) == 0.1);
  CHECK(table.upper_tail_pvalue(0.0) == 1.0);
  CHECK(table.upper_tail_pvalue(10.0) == doctest::Approx(0.2));
  CHECK(table.upper_tail_pvalue(0.3) == doctest::Approx(3.0 / 5.0));
  CHECK(table.mean() == doctest::Approx(0.25));
  CHECK_THROWS_AS(QuantileTable(NullKind::kBridgeL2, {}), std::invalid_argument);
  CHECK_THROWS_AS(table.quantile(0.0), std::invalid_argument);

  const auto sim = simulate_bridge_functional(NullKind::kBridgeSup, 500, 1000, 3);
  std::stringstream ss;
  sim.write_csv(ss);
  const auto back = QuantileTable::read_csv(ss, NullKind::kBridgeSup);
  CHECK(back.size() == sim.size());
  CHECK(std::equal(back.values().begin(), back.values().end(), sim.values().begin()));
  std::stringstream bad("alpha,quantile\n0.5,abc\n");
  CHECK_THROWS_AS(QuantileTable::read_csv(bad, NullKind::kBridgeSup), std::invalid_argument);
}

TEST_CASE("bridge functionals against analytic oracles") {
  const auto sup = simulate_bridge_functional(NullKind::kBridgeSup, 20000, 1000, 17);
  CHECK(std::abs(sup.quantile(0.95) - oracle::kolmogorov_quantile(0.95)) <= 0.035);
  CHECK(std::abs(oracle::kolmogorov_quantile(0.95) - 1.3581) <= 1e-3);
  const auto l2 = simulate_bridge_functional(NullKind::kBridgeL2, 20000, 1000, 18);
  CHECK(std::abs(l2.mean() - 1.0 / 6.0) <= 0.006);
  CHECK(std::abs(l2.quantile(0.95) - 0.461) <= 0.02);
  CHECK(simulate_bridge_functional(NullKind::kOdcBridgeL2, 20000, 1000, 18).values()[7] ==
        l2.values()[7]);
  CHECK_THROWS_AS(simulate_bridge_functional(NullKind::kPermutation, 200, 1000, 1),
                  std::invalid_argument);
}

TEST_CASE("bridge tables are deterministic and thread independent") {
  const auto a = simulate_bridge_functional(NullKind::kBridgeL2, 300, 1000, 4, 1);
  const auto b = simulate_bridge_functional(NullKind::kBridgeL2, 300, 1000, 4, 3);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
}

TEST_CASE("asymptotic p-values") {
  const auto sup = simulate_bridge_functional(NullKind::kBridgeSup, 2000, 1000, 1);
  const auto l2 = simulate_bridge_functional(NullKind::kOdcBridgeL2, 4000, 1000, 2);
  CHECK(asymptotic_pvalue({UnivariateKind::kKs, 0.0, 1.0}, sup) == 1.0);
  CHECK(asymptotic_pvalue({UnivariateKind::kKs, 100.0, 1.0}, sup) == doctest::Approx(1.0 / 2001));
  const double q = l2.quantile(0.95);
  CHECK(std::abs(asymptotic_pvalue({UnivariateKind::kOdcW2, q, 1.0}, l2) - 0.05) <= 0.01);
  for (auto k : {UnivariateKind::kPpL2, UnivariateKind::kQqL2, UnivariateKind::kQqLinf,
                 UnivariateKind::kWassersteinP, UnivariateKind::kWassersteinInf}) {
    CHECK_THROWS_WITH(asymptotic_pvalue({k, 1.0, 1.0}, l2),
                      "asymptotic calibration unavailable; use permutation");
  }
  CHECK_THROWS_AS(asymptotic_pvalue({UnivariateKind::kKs, 1.0, 1.0}, l2), std::invalid_argument);
  CHECK(asymptotic_null_for(UnivariateKind::kOdcLinf) == NullKind::kOdcBridgeSup);
}

TEST_CASE("generators") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 10000; ++k) {
    const double u = open_unit(rng);
    CHECK((u > 0.0 && u < 1.0));
  }
  for (auto g : {Generator::kUniform, Generator::kExponential, Generator::kLogit,
                 Generator::kGaussian}) {
    CHECK(parse_generator(to_string(g)) == g);
    for (int k = 0; k < 1000; ++k) CHECK(std::isfinite(draw(g, rng)));
  }
  CHECK_FALSE(parse_generator("cauchy").has_value());
}

TEST_CASE("distribution-free check") {
  const std::vector<Generator> gens{Generator::kUniform, Generator::kExponential};
  CHECK(distribution_free_check(UnivariateKind::kKs, gens, 20, 20, 3000, 8) < 0.05);
  CHECK(distribution_free_check(UnivariateKind::kQqLinf, gens, 20, 20, 3000, 8) > 0.1);
  CHECK_THROWS_AS(distribution_free_check(UnivariateKind::kKs,
                                          std::vector<Generator>{Generator::kUniform}, 5, 5, 10, 1),
                  std::invalid_argument);
  const auto a = simulate_univariate_null(UnivariateKind::kOdcW2, Generator::kLogit, 7, 9, 50, 3, 1);
  const auto b = simulate_univariate_null(UnivariateKind::kOdcW2, Generator::kLogit, 7, 9, 50, 3, 2);
  CHECK(a == b);
}

TEST_CASE("parallel_for propagates exceptions") {
  CHECK_THROWS_AS(parallel_for(
                      10,
                      [](std::size_t i) {
                        if (i == 7) throw std::runtime_error("boom");
                      },
                      3),
                  std::runtime_error);
  CHECK(substream_seed(1, 2) != substream_seed(2, 1));
}
