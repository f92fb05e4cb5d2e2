#include "twosample/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace twosample {
namespace {

double distance_pow(std::span<const double> a, std::span<const double> b,
                    double p) {
  double sq = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sq += d * d;
  }
  if (p == 2.0) return sq;
  const double dist = std::sqrt(sq);
  if (p == 1.0) return dist;
  return std::pow(dist, p);
}

double log_sum_exp_row(const Eigen::MatrixXd& log_kernel, Eigen::Index i,
                       const Eigen::VectorXd& shift) {
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < log_kernel.cols(); ++j) {
    hi = std::max(hi, log_kernel(i, j) + shift(j));
  }
  double acc = 0.0;
  for (Eigen::Index j = 0; j < log_kernel.cols(); ++j) {
    acc += std::exp(log_kernel(i, j) + shift(j) - hi);
  }
  return hi + std::log(acc);
}

double log_sum_exp_col(const Eigen::MatrixXd& log_kernel, Eigen::Index j,
                       const Eigen::VectorXd& shift) {
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < log_kernel.rows(); ++i) {
    hi = std::max(hi, log_kernel(i, j) + shift(i));
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < log_kernel.rows(); ++i) {
    acc += std::exp(log_kernel(i, j) + shift(i) - hi);
  }
  return hi + std::log(acc);
}

double marginal_residual(const Eigen::MatrixXd& plan) {
  const double a = 1.0 / static_cast<double>(plan.rows());
  const double b = 1.0 / static_cast<double>(plan.cols());
  return (plan.rowwise().sum().array() - a).abs().sum() +
         (plan.colwise().sum().array() - b).abs().sum();
}

// Dual objective sum a f + sum b g - sum exp(f_i + g_j + L_ij); its maximizer
// is the Sinkhorn fixed point.
double dual_objective(const Eigen::MatrixXd& log_kernel, const Eigen::VectorXd& f,
                      const Eigen::VectorXd& g, double a, double b) {
  const double mass =
      ((log_kernel.colwise() + f).rowwise() + g.transpose()).array().exp().sum();
  return a * f.sum() + b * g.sum() - mass;
}

// Damped Newton ascent on the dual, for instances where the scaling sweeps
// contract too slowly. g's last entry is pinned to remove the shift
// invariance f + c, g - c.
bool newton_polish(const Eigen::MatrixXd& log_kernel, double a, double b,
                   Eigen::VectorXd& f, Eigen::VectorXd& g, double tol,
                   std::size_t max_steps) {
  const Eigen::Index n = log_kernel.rows();
  const Eigen::Index m = log_kernel.cols();
  const Eigen::Index dim = n + m - 1;
  for (std::size_t step = 0; step <= max_steps; ++step) {
    const Eigen::MatrixXd plan =
        ((log_kernel.colwise() + f).rowwise() + g.transpose()).array().exp();
    const Eigen::VectorXd rows = plan.rowwise().sum();
    const Eigen::VectorXd cols = plan.colwise().sum().transpose();
    const double residual =
        (rows.array() - a).abs().sum() + (cols.array() - b).abs().sum();
    if (residual <= tol) return true;
    if (step == max_steps) break;

    Eigen::VectorXd grad(dim);
    grad.head(n) = a - rows.array();
    grad.tail(m - 1) = b - cols.head(m - 1).array();
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(dim, dim);
    hess.topLeftCorner(n, n).diagonal() = rows;
    hess.bottomRightCorner(m - 1, m - 1).diagonal() = cols.head(m - 1);
    hess.topRightCorner(n, m - 1) = plan.leftCols(m - 1);
    hess.bottomLeftCorner(m - 1, n) = plan.leftCols(m - 1).transpose();
    hess.diagonal().array() += 1e-14 * hess.diagonal().maxCoeff();
    const Eigen::VectorXd dir = hess.ldlt().solve(grad);
    if (!dir.allFinite()) return false;

    const double base = dual_objective(log_kernel, f, g, a, b);
    const double slope = grad.dot(dir);
    double t = 1.0;
    bool moved = false;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      Eigen::VectorXd nf = f + t * dir.head(n);
      Eigen::VectorXd ng = g;
      ng.head(m - 1) += t * dir.tail(m - 1);
      const double value = dual_objective(log_kernel, nf, ng, a, b);
      if (std::isfinite(value) && value >= base + 1e-4 * t * slope) {
        f = std::move(nf);
        g = std::move(ng);
        moved = true;
        break;
      }
    }
    if (!moved) return false;
  }
  return false;
}

void solve_standard(const CostMatrix& cost, double lambda,
                    const SinkhornOptions& options, SinkhornSolution& out) {
  const Eigen::Index n = cost.entries.rows();
  const Eigen::Index m = cost.entries.cols();
  const double a = 1.0 / static_cast<double>(n);
  const double b = 1.0 / static_cast<double>(m);
  const Eigen::MatrixXd kernel = (-lambda * cost.entries.array()).exp();
  Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(m);
  Eigen::VectorXd kv(n);
  std::size_t it = 0;
  for (;; ++it) {
    kv.noalias() = kernel * v;
    if (it > 0) {
      // columns are exact after the v update; only rows can be off
      const double residual = (u.array() * kv.array() - a).abs().sum();
      if (residual <= options.tol) {
        out.converged = true;
        break;
      }
    }
    if (it == options.max_iter) break;
    u = a / kv.array();
    v = b / (kernel.transpose() * u).array();
  }
  out.iterations = it;
  if (!out.converged && options.newton_steps > 0 && u.allFinite() &&
      v.allFinite() && (u.array() > 0).all() && (v.array() > 0).all()) {
    Eigen::VectorXd f = u.array().log();
    Eigen::VectorXd g = v.array().log();
    const Eigen::MatrixXd log_kernel = -lambda * cost.entries;
    if (newton_polish(log_kernel, a, b, f, g, options.tol, options.newton_steps)) {
      out.converged = true;
      u = f.array().exp();
      v = g.array().exp();
    }
  }
  out.plan.coupling = u.asDiagonal() * kernel * v.asDiagonal();
  out.log_u = u.array().log();
  out.log_v = v.array().log();
  out.u = std::move(u);
  out.v = std::move(v);
}

void solve_log_domain(const CostMatrix& cost, double lambda,
                      const SinkhornOptions& options, SinkhornSolution& out) {
  const Eigen::Index n = cost.entries.rows();
  const Eigen::Index m = cost.entries.cols();
  const double a = 1.0 / static_cast<double>(n);
  const double b = 1.0 / static_cast<double>(m);
  const double log_a = std::log(a);
  const double log_b = std::log(b);
  const Eigen::MatrixXd log_kernel = -lambda * cost.entries;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd row_lse(n);
  std::size_t it = 0;
  for (;; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) {
      row_lse(i) = log_sum_exp_row(log_kernel, i, g);
    }
    if (it > 0) {
      const double residual = ((f + row_lse).array().exp() - a).abs().sum();
      if (residual <= options.tol) {
        out.converged = true;
        break;
      }
    }
    if (it == options.max_iter) break;
    f = log_a - row_lse.array();
    for (Eigen::Index j = 0; j < m; ++j) {
      g(j) = log_b - log_sum_exp_col(log_kernel, j, f);
    }
  }
  out.iterations = it;
  if (!out.converged && options.newton_steps > 0) {
    out.converged =
        newton_polish(log_kernel, a, b, f, g, options.tol, options.newton_steps);
  }
  out.plan.coupling =
      ((log_kernel.colwise() + f).rowwise() + g.transpose()).array().exp();
  out.u = f.array().exp();
  out.v = g.array().exp();
  out.log_u = std::move(f);
  out.log_v = std::move(g);
}

}  // namespace

double TransportPlan::max_marginal_violation() const {
  const double a = 1.0 / static_cast<double>(coupling.rows());
  const double b = 1.0 / static_cast<double>(coupling.cols());
  const double rows = (coupling.rowwise().sum().array() - a).abs().maxCoeff();
  const double cols = (coupling.colwise().sum().array() - b).abs().maxCoeff();
  return std::max(rows, cols);
}

bool TransportPlan::is_feasible(double tol) const {
  return coupling.minCoeff() >= 0.0 && max_marginal_violation() <= tol;
}

double transport_cost(const TransportPlan& plan, const CostMatrix& cost) {
  if (plan.coupling.rows() != cost.entries.rows() ||
      plan.coupling.cols() != cost.entries.cols()) {
    throw std::invalid_argument("plan and cost matrix shapes differ");
  }
  double total = 0.0;
  for (Eigen::Index j = 0; j < cost.entries.cols(); ++j) {
    for (Eigen::Index i = 0; i < cost.entries.rows(); ++i) {
      total += plan.coupling(i, j) * cost.entries(i, j);
    }
  }
  return total;
}

CostMatrix cost_matrix(const Sample& x, const Sample& y, double p) {
  require_same_dim(x, y);
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw std::invalid_argument("cost exponent p must be >= 1");
  }
  CostMatrix out;
  out.p = p;
  out.entries.resize(static_cast<Eigen::Index>(x.size()),
                     static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      out.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          distance_pow(x.point(i), y.point(j), p);
    }
  }
  return out;
}

SinkhornSolution sinkhorn(const CostMatrix& cost, double lambda,
                          const SinkhornOptions& options) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("sinkhorn lambda must be >= 0");
  }
  if (!(options.tol > 0.0)) {
    throw std::invalid_argument("sinkhorn tolerance must be > 0");
  }
  if (cost.entries.size() == 0) {
    throw std::invalid_argument("cost matrix must be non-empty");
  }
  const Eigen::Index n = cost.entries.rows();
  const Eigen::Index m = cost.entries.cols();
  SinkhornSolution out;
  out.lambda = lambda;
  if (lambda == 0.0) {
    // maximal-entropy table: outer product of the marginals
    out.plan.coupling = Eigen::MatrixXd::Constant(
        n, m, 1.0 / (static_cast<double>(n) * static_cast<double>(m)));
    out.u = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    out.v = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
    out.log_u = out.u.array().log();
    out.log_v = out.v.array().log();
    out.converged = true;
    out.residual = marginal_residual(out.plan.coupling);
    return out;
  }
  out.log_domain =
      lambda * cost.entries.maxCoeff() > options.log_domain_threshold;
  if (out.log_domain) {
    solve_log_domain(cost, lambda, options, out);
  } else {
    solve_standard(cost, lambda, options, out);
  }
  out.residual = marginal_residual(out.plan.coupling);
  return out;
}

double sinkhorn_divergence(const Sample& x, const Sample& y, double p,
                           double lambda, const SinkhornOptions& options) {
  const CostMatrix cost = cost_matrix(x, y, p);
  return transport_cost(sinkhorn(cost, lambda, options).plan, cost);
}

}  // namespace twosample
