#include <twosample/calibration.hpp>
#include <twosample/runner.hpp>
#include <twosample/transport.hpp>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace twosample;

namespace {

// 1-D arrays are univariate samples; 2-D arrays hold one point per row.
Sample to_sample(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() == 1) {
    return Sample::from_values({a.data(), static_cast<std::size_t>(a.shape(0))});
  }
  if (a.ndim() != 2) throw std::invalid_argument("sample must be a 1-D or 2-D array");
  PointMatrix p(a.shape(0), a.shape(1));
  std::copy(a.data(), a.data() + a.size(), p.data());
  return Sample(std::move(p));
}

StatisticSpec make_spec(const std::string& name, double p, double lambda,
                        std::optional<double> gamma) {
  StatisticSpec spec;
  spec.name = name;
  spec.p = p;
  spec.lambda = lambda;
  spec.gamma = gamma;
  validate(spec);
  return spec;
}

CostMatrix to_cost(const Eigen::MatrixXd& m) {
  if (m.size() == 0) throw std::invalid_argument("cost matrix is empty");
  CostMatrix c;
  c.entries = m;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "two-sample statistics and calibration";

  m.def(
      "statistic",
      [](const std::string& name, py::array_t<double> x, py::array_t<double> y, double p,
         double lam, std::optional<double> gamma) {
        const auto e = evaluate(make_spec(name, p, lam, gamma), to_sample(x), to_sample(y));
        return py::make_tuple(e.raw, e.scale);
      },
      py::arg("name"), py::arg("x"), py::arg("y"), py::arg("p") = 1.0, py::arg("lam") = 0.0,
      py::arg("gamma") = py::none());

  m.def(
      "run_test",
      [](py::array_t<double> x, py::array_t<double> y, const std::string& name, double p,
         double lam, std::optional<double> gamma, double alpha, std::size_t permutations,
         std::uint64_t seed, const std::string& calibration, std::size_t paths, std::size_t grid,
         std::size_t threads) {
        RunConfig config;
        config.statistic = make_spec(name, p, lam, gamma);
        config.alpha = alpha;
        config.permutations = permutations;
        config.seed = seed;
        if (calibration == "perm") {
          config.calibration = Calibration::kPermutation;
        } else if (calibration == "asymp") {
          config.calibration = Calibration::kAsymptotic;
        } else {
          throw std::invalid_argument("calibration must be 'perm' or 'asymp'");
        }
        config.paths = paths;
        config.grid = grid;
        config.threads = threads;
        const auto sx = to_sample(x);
        const auto sy = to_sample(y);
        py::gil_scoped_release release;
        return report_to_json(run_test(config, sx, sy)).dump();
      },
      py::arg("x"), py::arg("y"), py::arg("name") = "ks", py::arg("p") = 1.0,
      py::arg("lam") = 0.0, py::arg("gamma") = py::none(), py::arg("alpha") = 0.05,
      py::arg("permutations") = 999, py::arg("seed") = 0, py::arg("calibration") = "perm",
      py::arg("paths") = 100000, py::arg("grid") = 2048, py::arg("threads") = 0);

  m.def(
      "curves",
      [](py::array_t<double> x, py::array_t<double> y) {
        return curves_to_json(compute_curves(to_sample(x), to_sample(y))).dump();
      },
      py::arg("x"), py::arg("y"));

  m.def(
      "cost_matrix",
      [](py::array_t<double> x, py::array_t<double> y, double p) {
        return cost_matrix(to_sample(x), to_sample(y), p).entries;
      },
      py::arg("x"), py::arg("y"), py::arg("p") = 1.0);

  m.def(
      "exact_transport",
      [](const Eigen::MatrixXd& cost) {
        auto sol = exact_wasserstein_lp(to_cost(cost));
        return py::make_tuple(sol.optimum, std::move(sol.plan.coupling));
      },
      py::arg("cost"));

  m.def(
      "sinkhorn",
      [](const Eigen::MatrixXd& cost, double lam, double tol, std::size_t max_iter) {
        const auto c = to_cost(cost);
        SinkhornOptions options;
        options.tol = tol;
        options.max_iter = max_iter;
        auto sol = sinkhorn(c, lam, options);
        py::dict out;
        out["cost"] = transport_cost(sol.plan, c);
        out["converged"] = sol.converged;
        out["iterations"] = sol.iterations;
        out["residual"] = sol.residual;
        out["plan"] = std::move(sol.plan.coupling);
        return out;
      },
      py::arg("cost"), py::arg("lam"), py::arg("tol") = 1e-9, py::arg("max_iter") = 10000);

  m.def(
      "bridge_table",
      [](const std::string& kind, std::size_t paths, std::size_t grid, std::uint64_t seed,
         std::size_t threads) {
        const auto k = parse_null_kind(kind);
        if (!k || *k == NullKind::kPermutation) {
          throw std::invalid_argument("unknown bridge functional '" + kind + "'");
        }
        std::vector<double> values;
        {
          py::gil_scoped_release release;
          const auto table = simulate_bridge_functional(*k, paths, grid, seed, threads);
          values.assign(table.values().begin(), table.values().end());
        }
        return py::array_t<double>(static_cast<py::ssize_t>(values.size()), values.data());
      },
      py::arg("kind"), py::arg("paths") = 100000, py::arg("grid") = 2048, py::arg("seed") = 0,
      py::arg("threads") = 0);
}
