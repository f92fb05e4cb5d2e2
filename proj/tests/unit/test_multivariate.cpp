#include "../support.hpp"

#include <twosample/multivariate.hpp>

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace twosample;

namespace {

double unbiased_oracle(const oracle::Points& x, const oracle::Points& y,
                       double (*d)(const std::vector<double>&, const std::vector<double>&)) {
  double xy = 0.0, xx = 0.0, yy = 0.0;
  for (const auto& a : x) {
    for (const auto& b : y) xy += d(a, b);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) xx += i == j ? 0.0 : d(x[i], x[j]);
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) yy += i == j ? 0.0 : d(y[i], y[j]);
  }
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  return 2.0 * xy / (n * m) - xx / (n * (n - 1)) - yy / (m * (m - 1));
}

// Random orthogonal matrix from a QR factorization.
Eigen::MatrixXd rotation(oracle::Gen& gen, Eigen::Index d) {
  Eigen::MatrixXd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = gen.real();
  }
  return Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
}

}  // namespace

TEST_CASE("energy distance examples") {
  CHECK(energy_distance(sample1({0}), sample1({1})).value == 2.0);
  CHECK(energy_distance(sample1({0, 2}), sample1({1, 3})).value == doctest::Approx(1.0));
  const auto s = sample_of({{0, 1}, {2, 2}, {5, -1}});
  CHECK(energy_distance(s, s).value == 0.0);
}

TEST_CASE("mmd examples") {
  CHECK(mmd2(sample1({0}), sample1({1}), gaussian_kernel(1.0)).value ==
        doctest::Approx(2.0 - 2.0 * std::exp(-1.0)).epsilon(1e-15));
  const auto s = sample_of({{0, 1}, {2, 2}});
  CHECK(mmd2(s, s, gaussian_kernel(0.7)).value == 0.0);
  CHECK(std::abs(mmd2(sample1({0, 1}), sample1({2, 5}), gaussian_kernel(1e6)).value) < 1e-10);
  CHECK_THROWS_AS(gaussian_kernel(0.0), std::invalid_argument);
}

TEST_CASE("kernel-induced distance") {
  const auto d = kernel_to_distance(gaussian_kernel(1.0));
  const std::vector<double> a{0.3, -1.0};
  CHECK(d(a, a) == 0.0);
  const std::vector<double> far{1e3, 0.0};
  CHECK(d(a, far) == doctest::Approx(1.0));
  const std::vector<double> o{0.0}, one{1.0};
  CHECK(d(o, one) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("statistics match direct pair sums") {
  oracle::Gen gen(41);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t d = gen.size(1, 3);
    const auto x = gen.points(gen.size(2, 12), d);
    const auto y = gen.points(gen.size(2, 12), d);
    const auto sx = sample_of(x);
    const auto sy = sample_of(y);
    CHECK(energy_distance(sx, sy).value ==
          doctest::Approx(oracle::energy(x, y)).epsilon(1e-12));
    CHECK(energy_distance(sx, sy).value >= 0.0);
    CHECK(energy_distance(sx, sy, Estimator::kUnbiased).value ==
          doctest::Approx(unbiased_oracle(x, y, oracle::norm_diff)).epsilon(1e-12));
    const double gamma = gen.real(0.3, 3.0);
    CHECK(mmd2(sx, sy, gaussian_kernel(gamma)).value ==
          doctest::Approx(oracle::mmd2(x, y, gamma)).epsilon(1e-12).scale(1.0));
    CHECK(generalized_energy_distance(sx, sy, euclidean_distance()).value ==
          energy_distance(sx, sy).value);
  }
}

TEST_CASE("symmetry is exact") {
  oracle::Gen gen(42);
  for (int rep = 0; rep < 50; ++rep) {
    const auto sx = sample_of(gen.points(gen.size(1, 9), 2));
    const auto sy = sample_of(gen.points(gen.size(1, 9), 2));
    CHECK(energy_distance(sx, sy).value == energy_distance(sy, sx).value);
    CHECK(mmd2(sx, sy).value == mmd2(sy, sx).value);
    CHECK(smoothed_wasserstein_statistic(sx, sy, 1.0, 2.0).value ==
          smoothed_wasserstein_statistic(sy, sx, 1.0, 2.0).value);
  }
}

TEST_CASE("kernel distance energy equals mmd") {
  oracle::Gen gen(43);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t d = gen.size(1, 4);
    const auto sx = sample_of(gen.points(gen.size(1, 15), d));
    const auto sy = sample_of(gen.points(gen.size(1, 15), d));
    const auto k = gaussian_kernel(gen.real(0.2, 4.0));
    CHECK(std::abs(generalized_energy_distance(sx, sy, kernel_to_distance(k)).value -
                   mmd2(sx, sy, k).value) <= 1e-12);
  }
}

TEST_CASE("smoothed wasserstein at lambda 0 is energy distance") {
  CHECK(smoothed_wasserstein_statistic(sample1({0, 2}), sample1({1, 3}), 1.0, 0.0).value ==
        doctest::Approx(1.0));
  oracle::Gen gen(44);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t d = gen.size(1, 3);
    const auto sx = sample_of(gen.points(gen.size(1, 20), d));
    const auto sy = sample_of(gen.points(gen.size(1, 20), d));
    CHECK(std::abs(smoothed_wasserstein_statistic(sx, sy, 1.0, 0.0).value -
                   energy_distance(sx, sy).value) <= 1e-12);
    for (double lambda : {0.0, 0.5, 40.0}) {
      CHECK(std::abs(smoothed_wasserstein_statistic(sx, sx, 1.0, lambda).value) <= 1e-12);
    }
  }
}

TEST_CASE("rotation and translation invariance") {
  oracle::Gen gen(45);
  for (int rep = 0; rep < 50; ++rep) {
    const auto d = static_cast<Eigen::Index>(gen.size(2, 4));
    const auto sx = sample_of(gen.points(gen.size(2, 10), d));
    const auto sy = sample_of(gen.points(gen.size(2, 10), d));
    const Eigen::MatrixXd q = rotation(gen, d);
    Eigen::RowVectorXd shift(d);
    for (Eigen::Index k = 0; k < d; ++k) shift(k) = gen.real(-10, 10);
    const auto move = [&](const Sample& s) {
      PointMatrix p = (s.points() * q.transpose()).rowwise() + shift;
      return Sample(std::move(p));
    };
    CHECK(std::abs(energy_distance(sx, sy).value -
                   energy_distance(move(sx), move(sy)).value) <= 1e-10);
    const auto k = gaussian_kernel(1.3);
    CHECK(std::abs(mmd2(sx, sy, k).value - mmd2(move(sx), move(sy), k).value) <= 1e-10);
  }
}

TEST_CASE("median heuristic") {
  oracle::Gen gen(46);
  for (int rep = 0; rep < 20; ++rep) {
    const auto x = gen.points(gen.size(1, 8), 2);
    const auto y = gen.points(gen.size(1, 8), 2);
    auto all = x;
    all.insert(all.end(), y.begin(), y.end());
    std::vector<double> dist;
    for (std::size_t i = 0; i < all.size(); ++i) {
      for (std::size_t j = i + 1; j < all.size(); ++j) dist.push_back(oracle::norm_diff(all[i], all[j]));
    }
    std::sort(dist.begin(), dist.end());
    const std::size_t h = dist.size();
    const double median = h % 2 == 1 ? dist[h / 2] : 0.5 * (dist[h / 2 - 1] + dist[h / 2]);
    CHECK(median_heuristic_bandwidth(sample_of(x), sample_of(y)) ==
          doctest::Approx(median).epsilon(1e-14));
  }
  CHECK(median_heuristic_bandwidth(sample1({1, 1}), sample1({1})) == 1.0);
}

TEST_CASE("pairwise forms reproduce the statistics under relabeling") {
  oracle::Gen gen(47);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = gen.size(1, 10);
    const std::size_t m = gen.size(1, 10);
    const auto all = gen.points(n + m, 2);
    const auto pooled = sample_of(all);
    std::vector<std::size_t> idx(n + m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), gen.rng);
    oracle::Points x, y;
    for (std::size_t i = 0; i < n + m; ++i) (i < n ? x : y).push_back(all[idx[i]]);
    const std::span<const std::size_t> s(idx);
    CHECK(energy_pairwise_form(pooled).statistic(s.first(n), s.subspan(n)) ==
          doctest::Approx(oracle::energy(x, y)).epsilon(1e-11).scale(1.0));
    const auto k = gaussian_kernel(0.9);
    CHECK(mmd_pairwise_form(pooled, k).statistic(s.first(n), s.subspan(n)) ==
          doctest::Approx(oracle::mmd2(x, y, 0.9)).epsilon(1e-11).scale(1.0));
  }
}

TEST_CASE("unbiased estimator needs two points") {
  CHECK_THROWS_AS(energy_distance(sample1({0}), sample1({1, 2}), Estimator::kUnbiased),
                  std::invalid_argument);
  CHECK_THROWS_AS(energy_distance(sample1({0}), sample_of({{1, 2}})), std::invalid_argument);
}
