#pragma once

#include "twosample/sample.hpp"

#include <Eigen/Dense>

#include <cstddef>

namespace twosample {

/// entries(i, j) = ||X_i - Y_j||^p.
struct CostMatrix {
  Eigen::MatrixXd entries;
  double p = 1.0;

  std::size_t rows() const { return static_cast<std::size_t>(entries.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(entries.cols()); }
};

/// Nonnegative n x m coupling, nominally with row sums 1/n and column sums
/// 1/m.
struct TransportPlan {
  Eigen::MatrixXd coupling;

  /// Largest absolute deviation of any row or column sum from its target.
  double max_marginal_violation() const;
  bool is_feasible(double tol = 1e-8) const;
};

/// <T, M>
double transport_cost(const TransportPlan& plan, const CostMatrix& cost);

CostMatrix cost_matrix(const Sample& x, const Sample& y, double p);

struct LpSolution {
  double optimum = 0.0;
  TransportPlan plan;
  std::size_t pivots = 0;
};

/// min over the transport polytope of <T, M>, by a transportation simplex
/// on an integer-scaled, perturbed copy of the uniform marginals. The
/// returned plan is an optimal vertex.
LpSolution exact_wasserstein_lp(const CostMatrix& cost);

struct SinkhornOptions {
  double tol = 1e-9;
  std::size_t max_iter = 10000;
  /// Scalings switch to log-domain when lambda * max(M) exceeds this.
  double log_domain_threshold = 30.0;
  /// Damped Newton steps on the dual potentials when max_iter sweeps stop
  /// short of tol (slow linear contraction at large lambda). 0 disables.
  std::size_t newton_steps = 100;
};

struct SinkhornSolution {
  TransportPlan plan;
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  // log u and log v; finite even when u or v under/overflow.
  Eigen::VectorXd log_u;
  Eigen::VectorXd log_v;
  double lambda = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool log_domain = false;
  /// Final L1 marginal residual (row plus column).
  double residual = 0.0;
};

/// Entropic transport plan T = diag(u) exp(-lambda M) diag(v) fitted to the
/// uniform marginals by alternating row/column scaling, finished by Newton
/// steps on the same fixed point if needed. lambda = 0 returns
/// the outer product of the marginals without iterating.
SinkhornSolution sinkhorn(const CostMatrix& cost, double lambda,
                          const SinkhornOptions& options = {});

/// <T_lambda, M_XY>: transport cost at the entropic optimizer.
double sinkhorn_divergence(const Sample& x, const Sample& y, double p,
                           double lambda, const SinkhornOptions& options = {});

}  // namespace twosample
