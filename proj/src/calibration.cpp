#include "twosample/calibration.hpp"

#include "twosample/parallel.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace twosample {

std::size_t default_thread_count() {
  if (const char* env = std::getenv(kThreadsEnvVar)) {
    std::size_t value = 0;
    const char* end = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec == std::errc() && ptr == end && value > 0) return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

constexpr std::array<std::pair<NullKind, std::string_view>, 5> kNullNames{{
    {NullKind::kPermutation, "permutation"},
    {NullKind::kBridgeSup, "bridge_sup"},
    {NullKind::kBridgeL2, "bridge_l2"},
    {NullKind::kOdcBridgeL2, "odc_bridge_l2"},
    {NullKind::kOdcBridgeSup, "odc_bridge_sup"},
}};

constexpr std::array<std::pair<Generator, std::string_view>, 4> kGeneratorNames{{
    {Generator::kUniform, "uniform"},
    {Generator::kExponential, "exponential"},
    {Generator::kLogit, "logit"},
    {Generator::kGaussian, "gaussian"},
}};

bool is_sup_functional(NullKind kind) {
  return kind == NullKind::kBridgeSup || kind == NullKind::kOdcBridgeSup;
}

bool is_bridge(NullKind kind) { return kind != NullKind::kPermutation; }

void check_resamples(std::size_t resamples) {
  if (resamples < kMinResamples) {
    throw std::invalid_argument("insufficient resamples");
  }
}

// Ties within a relative 1e-12 count as exceedances, so recomputing the
// observed labeling in a different summation order still counts.
bool exceeds(double value, double observed) {
  return value >= observed - 1e-12 * std::abs(observed);
}

std::vector<std::size_t> relabel(std::size_t total, std::uint64_t seed,
                                 std::uint64_t b) {
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(substream_seed(seed, b));
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

PermutationResult finish(double observed, const std::vector<char>& hits) {
  PermutationResult out;
  out.observed = observed;
  out.resamples = hits.size();
  out.exceedances = static_cast<std::size_t>(
      std::count(hits.begin(), hits.end(), char{1}));
  out.p_value = static_cast<double>(1 + out.exceedances) /
                static_cast<double>(1 + out.resamples);
  return out;
}

}  // namespace

std::string_view to_string(NullKind kind) {
  for (const auto& [k, name] : kNullNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<NullKind> parse_null_kind(std::string_view name) {
  for (const auto& [k, n] : kNullNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

void NullModel::validate() const {
  check_resamples(resamples_or_paths);
  if (is_bridge(kind) && grid_size < 1000) {
    throw std::invalid_argument("bridge grid_size must be >= 1000");
  }
}

PermutationResult permutation_test(const Sample& pooled, std::size_t n,
                                   std::size_t m, const StatisticFn& statistic,
                                   std::size_t resamples, std::uint64_t seed,
                                   std::size_t threads) {
  check_resamples(resamples);
  if (n == 0 || m == 0 || pooled.size() != n + m) {
    throw std::invalid_argument("pooled sample size must equal n + m");
  }
  std::vector<std::size_t> identity(n + m);
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  const auto split = [&](std::span<const std::size_t> idx) {
    return std::pair{select(pooled, idx.first(n)), select(pooled, idx.subspan(n))};
  };
  const auto [x, y] = split(identity);
  const double observed = statistic(x, y);

  std::vector<char> hits(resamples, 0);
  parallel_for(
      resamples,
      [&](std::size_t b) {
        const auto idx = relabel(n + m, seed, b);
        const auto [xb, yb] = split(idx);
        hits[b] = exceeds(statistic(xb, yb), observed) ? 1 : 0;
      },
      threads);
  return finish(observed, hits);
}

double permutation_pvalue(const Sample& pooled, std::size_t n, std::size_t m,
                          const StatisticFn& statistic, std::size_t resamples,
                          std::uint64_t seed, std::size_t threads) {
  return permutation_test(pooled, n, m, statistic, resamples, seed, threads)
      .p_value;
}

PermutationResult permutation_test(const PairwiseForm& form, std::size_t n,
                                   std::size_t m, std::size_t resamples,
                                   std::uint64_t seed, std::size_t threads) {
  check_resamples(resamples);
  if (n == 0 || m == 0 || static_cast<std::size_t>(form.matrix.rows()) != n + m) {
    throw std::invalid_argument("pairwise matrix size must equal n + m");
  }
  std::vector<std::size_t> identity(n + m);
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  const std::span<const std::size_t> all(identity);
  const double observed = form.statistic(all.first(n), all.subspan(n));

  std::vector<char> hits(resamples, 0);
  parallel_for(
      resamples,
      [&](std::size_t b) {
        const auto idx = relabel(n + m, seed, b);
        const std::span<const std::size_t> s(idx);
        hits[b] = exceeds(form.statistic(s.first(n), s.subspan(n)), observed);
      },
      threads);
  return finish(observed, hits);
}

QuantileTable::QuantileTable(NullKind kind, std::vector<double> values)
    : kind_(kind), sorted_(std::move(values)) {
  if (sorted_.empty()) throw std::invalid_argument("empty quantile table");
  std::sort(sorted_.begin(), sorted_.end());
}

double QuantileTable::quantile(double alpha) const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("quantile level out of range");
  }
  const double scaled = alpha * static_cast<double>(sorted_.size()) *
                        (1.0 - 4.0 * std::numeric_limits<double>::epsilon());
  auto k = static_cast<std::size_t>(std::ceil(scaled));
  k = std::clamp<std::size_t>(k, 1, sorted_.size());
  return sorted_[k - 1];
}

double QuantileTable::upper_tail_pvalue(double x) const {
  const auto at_least = static_cast<std::size_t>(
      sorted_.end() - std::lower_bound(sorted_.begin(), sorted_.end(), x));
  return static_cast<double>(1 + at_least) /
         static_cast<double>(1 + sorted_.size());
}

double QuantileTable::mean() const {
  return std::accumulate(sorted_.begin(), sorted_.end(), 0.0) /
         static_cast<double>(sorted_.size());
}

void QuantileTable::write_csv(std::ostream& os) const {
  const auto old_precision = os.precision(17);
  os << "alpha,quantile\n";
  const double n = static_cast<double>(sorted_.size());
  for (std::size_t k = 0; k < sorted_.size(); ++k) {
    os << static_cast<double>(k + 1) / n << ',' << sorted_[k] << '\n';
  }
  os.precision(old_precision);
}

QuantileTable QuantileTable::read_csv(std::istream& is, NullKind kind) {
  std::string line;
  std::vector<double> values;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("alpha", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("quantile table line " +
                                  std::to_string(line_no) + ": expected alpha,quantile");
    }
    const std::string cell = line.substr(comma + 1);
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0' || !std::isfinite(v)) {
      throw std::invalid_argument("quantile table line " +
                                  std::to_string(line_no) + ": bad quantile '" + cell + "'");
    }
    values.push_back(v);
  }
  return QuantileTable(kind, std::move(values));
}

QuantileTable simulate_bridge_functional(NullKind kind, std::size_t num_paths,
                                         std::size_t grid_size,
                                         std::uint64_t seed,
                                         std::size_t threads) {
  if (!is_bridge(kind)) {
    throw std::invalid_argument("bridge simulation needs a bridge functional kind");
  }
  NullModel{kind, num_paths, seed, grid_size}.validate();
  const bool sup = is_sup_functional(kind);
  const double dt = 1.0 / static_cast<double>(grid_size);
  const double step_sd = std::sqrt(dt);
  std::vector<double> values(num_paths);
  parallel_for(
      num_paths,
      [&](std::size_t path) {
        std::mt19937_64 rng(substream_seed(seed, path));
        std::normal_distribution<double> normal;
        std::vector<double> walk(grid_size + 1);
        walk[0] = 0.0;
        for (std::size_t k = 1; k <= grid_size; ++k) {
          walk[k] = walk[k - 1] + step_sd * normal(rng);
        }
        const double end = walk[grid_size];
        double sup_abs = 0.0;
        double sum_sq = 0.0;
        // endpoints of the bridge are zero
        for (std::size_t k = 1; k < grid_size; ++k) {
          const double bridge = walk[k] - static_cast<double>(k) * dt * end;
          sup_abs = std::max(sup_abs, std::abs(bridge));
          sum_sq += bridge * bridge;
        }
        values[path] = sup ? sup_abs : sum_sq * dt;
      },
      threads);
  return QuantileTable(kind, std::move(values));
}

std::optional<NullKind> asymptotic_null_for(UnivariateKind kind) {
  switch (kind) {
    case UnivariateKind::kKs:
      return NullKind::kBridgeSup;
    case UnivariateKind::kOdcLinf:
      return NullKind::kOdcBridgeSup;
    case UnivariateKind::kOdcW2:
      return NullKind::kOdcBridgeL2;
    default:
      return std::nullopt;
  }
}

double asymptotic_pvalue(const UnivariateStatistic& statistic,
                         const QuantileTable& table) {
  const auto wanted = asymptotic_null_for(statistic.kind);
  if (!wanted) {
    throw std::invalid_argument(
        "asymptotic calibration unavailable; use permutation");
  }
  if (is_sup_functional(*wanted) != is_sup_functional(table.kind()) ||
      !is_bridge(table.kind())) {
    throw std::invalid_argument(
        std::string("statistic ") + std::string(to_string(statistic.kind)) +
        " needs a " + (is_sup_functional(*wanted) ? "sup" : "L2") +
        " bridge table");
  }
  return table.upper_tail_pvalue(statistic.scaled());
}

std::string_view to_string(Generator g) {
  for (const auto& [k, name] : kGeneratorNames) {
    if (k == g) return name;
  }
  return "unknown";
}

std::optional<Generator> parse_generator(std::string_view name) {
  for (const auto& [k, n] : kGeneratorNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

double open_unit(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double draw(Generator g, std::mt19937_64& rng) {
  switch (g) {
    case Generator::kUniform:
      return open_unit(rng);
    case Generator::kExponential:
      return -std::log1p(-open_unit(rng));
    case Generator::kLogit: {
      const double u = open_unit(rng);
      return std::log(u / (1.0 - u));
    }
    case Generator::kGaussian:
      return std::normal_distribution<double>()(rng);
  }
  throw std::invalid_argument("unknown generator");
}

std::vector<double> simulate_univariate_null(UnivariateKind kind,
                                             Generator generator,
                                             std::size_t n, std::size_t m,
                                             std::size_t trials,
                                             std::uint64_t seed,
                                             std::size_t threads) {
  if (n == 0 || m == 0) throw std::invalid_argument("empty sample");
  std::vector<double> values(trials);
  parallel_for(
      trials,
      [&](std::size_t t) {
        std::mt19937_64 rng(substream_seed(seed, t));
        std::vector<double> x(n);
        std::vector<double> y(m);
        for (auto& v : x) v = draw(generator, rng);
        for (auto& v : y) v = draw(generator, rng);
        values[t] = univariate_statistic(kind, EmpiricalDistribution(std::move(x)),
                                         EmpiricalDistribution(std::move(y)))
                        .scaled();
      },
      threads);
  return values;
}

double distribution_free_check(UnivariateKind kind,
                               std::span<const Generator> generators,
                               std::size_t n, std::size_t m,
                               std::size_t trials, std::uint64_t seed,
                               std::size_t threads) {
  if (generators.size() < 2) {
    throw std::invalid_argument("distribution-free check needs >= 2 generators");
  }
  std::vector<EmpiricalDistribution> nulls;
  nulls.reserve(generators.size());
  for (Generator g : generators) {
    const std::uint64_t stream =
        substream_seed(seed, 0x100 + static_cast<std::uint64_t>(g));
    nulls.emplace_back(
        simulate_univariate_null(kind, g, n, m, trials, stream, threads));
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < nulls.size(); ++a) {
    for (std::size_t b = a + 1; b < nulls.size(); ++b) {
      worst = std::max(worst, ks_statistic(nulls[a], nulls[b]).raw);
    }
  }
  return worst;
}

}  // namespace twosample
