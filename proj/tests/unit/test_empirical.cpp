#include "../support.hpp"

#include <twosample/empirical.hpp>

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace twosample;

TEST_CASE("sorted values keep ties") {
  CHECK(build_empirical(std::vector{3.0, 1.0, 2.0}).sorted_values()[0] == 1.0);
  const EmpiricalDistribution single({5.0});
  CHECK(single.size() == 1);
  CHECK(single.order_statistic(1) == 5.0);
  const EmpiricalDistribution ties({2.0, 2.0, 1.0});
  const auto v = ties.sorted_values();
  CHECK(std::vector<double>(v.begin(), v.end()) == std::vector{1.0, 2.0, 2.0});
}

TEST_CASE("construction errors") {
  CHECK_THROWS_WITH_AS(EmpiricalDistribution({}), "empty sample",
                       std::invalid_argument);
  CHECK_THROWS_AS(EmpiricalDistribution({1.0, NAN}), std::invalid_argument);
  CHECK_THROWS_AS(EmpiricalDistribution({INFINITY}), std::invalid_argument);
}

TEST_CASE("cdf by counting") {
  const EmpiricalDistribution e({1.0, 2.0, 3.0});
  CHECK(e.cdf(2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(e.cdf(0.5) == 0.0);
  CHECK(e.cdf(3.0) == 1.0);
  CHECK(e.count_lt(2.0) == 1);
  CHECK(e.count_le(2.0) == 2);
}

TEST_CASE("left-continuous quantile") {
  const EmpiricalDistribution e({1.0, 2.0, 3.0});
  CHECK(e.quantile(0.5) == 2.0);
  CHECK(e.quantile(1.0) == 3.0);
  CHECK(e.quantile(1.0 / 3.0) == 1.0);
  CHECK(e.quantile(2.0 / 3.0) == 2.0);
  CHECK_THROWS_WITH(e.quantile(0.0), "quantile level out of range");
  CHECK_THROWS_WITH(e.quantile(1.5), "quantile level out of range");
}

TEST_CASE("cdf and quantile agree with oracles on random samples") {
  oracle::Gen gen(11);
  for (int rep = 0; rep < 300; ++rep) {
    const auto v = gen.values(gen.size(1, 9), rep % 2 == 0);
    const EmpiricalDistribution e(v);
    for (int k = 0; k < 10; ++k) {
      const double z = gen.real();
      CHECK(e.cdf(z) == doctest::Approx(oracle::ecdf(v, z)).epsilon(1e-15));
      const double t = gen.real(1e-9, 1.0);
      CHECK(e.quantile(t) == oracle::quantile(v, t));
    }
    // exact levels k/n
    for (std::size_t k = 1; k <= v.size(); ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(v.size());
      CHECK(e.quantile(t) == oracle::quantile(v, t));
    }
  }
}

TEST_CASE("step function validation and evaluation") {
  using C = StepFunction::Continuity;
  CHECK_THROWS_AS(StepFunction({0.0, 1.0}, {}, C::kLeft), std::invalid_argument);
  CHECK_THROWS_AS(StepFunction({0.0, 0.5}, {1.0}, C::kLeft), std::invalid_argument);
  CHECK_THROWS_AS(StepFunction({0.0, 0.5, 0.5, 1.0}, {1.0, 2.0, 3.0}, C::kLeft),
                  std::invalid_argument);
  const StepFunction left({0.0, 0.5, 1.0}, {1.0, 2.0}, C::kLeft);
  CHECK(left(0.5) == 1.0);
  CHECK(left(0.50001) == 2.0);
  CHECK(left(0.0) == 1.0);
  const StepFunction right({0.0, 0.5, 1.0}, {1.0, 2.0}, C::kRight);
  CHECK(right(0.5) == 2.0);
  CHECK(right(0.49999) == 1.0);
  CHECK(right(1.0) == 2.0);
  CHECK(right.integral() == doctest::Approx(1.5));
}

TEST_CASE("odc curve examples") {
  const auto f = odc_curve(EmpiricalDistribution({1.0, 3.0}),
                           EmpiricalDistribution({2.0, 4.0}));
  REQUIRE(f.piece_count() == 2);
  CHECK(f.values()[0] == 0.0);
  CHECK(f.values()[1] == 0.5);
  CHECK(f(0.25) == 0.0);
  CHECK(f(0.5) == 0.0);
  CHECK(f(0.75) == 0.5);

  const auto same = odc_curve(EmpiricalDistribution({1.0, 2.0}),
                              EmpiricalDistribution({1.0, 2.0}));
  CHECK(same.values()[0] == 0.5);
  CHECK(same.values()[1] == 1.0);

  const auto below = odc_curve(EmpiricalDistribution({1.0, 2.0}),
                               EmpiricalDistribution({10.0, 20.0}));
  CHECK(below.values()[0] == 0.0);
  CHECK(below.values()[1] == 0.0);
  CHECK(below(0.0) == 0.0);
}

TEST_CASE("odc and roc match their defining compositions") {
  oracle::Gen gen(12);
  for (int rep = 0; rep < 300; ++rep) {
    const bool lattice = rep % 3 == 0;
    const auto x = gen.values(gen.size(1, 8), lattice);
    const auto y = gen.values(gen.size(1, 8), lattice);
    const EmpiricalDistribution ex(x);
    const EmpiricalDistribution ey(y);
    const auto odc = odc_curve(ex, ey);
    const auto roc = roc_curve(ex, ey);
    for (int k = 0; k < 20; ++k) {
      const double t = gen.real(1e-9, 1.0 - 1e-9);
      CHECK(odc(t) == oracle::ecdf(y, oracle::quantile(x, t)));
      CHECK(roc(t) == doctest::Approx(1.0 - oracle::ecdf(x, oracle::quantile(y, 1.0 - t)))
                          .epsilon(1e-14));
    }
    CHECK(auc(roc) == doctest::Approx(oracle::auc_pairs(x, y)).epsilon(1e-14));
    CHECK(odc.integral() ==
          doctest::Approx(oracle::midpoint(
                              [&](double t) {
                                return oracle::ecdf(y, oracle::quantile(x, t));
                              },
                              0.0, 1.0, 20000))
              .epsilon(1e-3));
  }
}

TEST_CASE("roc examples") {
  const auto sep = roc_curve(EmpiricalDistribution({0.0}), EmpiricalDistribution({1.0}));
  CHECK(sep(0.0) == 0.0);
  CHECK(sep(0.999) == 0.0);
  CHECK(sep(1.0) == 1.0);
  CHECK(auc(sep) == 0.0);

  CHECK(auc(roc_curve(EmpiricalDistribution({1.0}), EmpiricalDistribution({0.0}))) == 1.0);
  CHECK(auc(roc_curve(EmpiricalDistribution({0.0, 2.0}),
                      EmpiricalDistribution({1.0, 3.0}))) == 0.25);

  // identical continuous samples: stairs just under the diagonal
  std::vector<double> v;
  for (int k = 0; k < 50; ++k) v.push_back(k * 0.37);
  const auto diag = roc_curve(EmpiricalDistribution(v), EmpiricalDistribution(v));
  for (double t = 0.0; t < 1.0; t += 0.013) CHECK(std::abs(diag(t) - t) <= 1.0 / 50 + 1e-12);
}

TEST_CASE("step csv export") {
  std::ostringstream os;
  write_step_csv(os, odc_curve(EmpiricalDistribution({1.0, 3.0}),
                               EmpiricalDistribution({2.0, 4.0})));
  CHECK(os.str() == "t_lo,t_hi,value\n0,0.5,0\n0.5,1,0.5\n");
}
