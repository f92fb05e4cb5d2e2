#include "twosample/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace twosample {
namespace {

// Transportation simplex on the uniform-marginal problem.
//
// Supplies are scaled to integers (each row ships m, each column receives n)
// and perturbed as row += 1 / last column += n after multiplying by
// K = n + 1. With that perturbation no proper subset of rows balances a
// subset of columns, so every basic solution is nondegenerate, every pivot
// strictly lowers the objective, and the method terminates. The optimal basis
// of the perturbed problem is also optimal for the unperturbed one; its
// unperturbed basic flows are recovered by peeling leaves of the basis tree.
class TransportationSimplex {
 public:
  explicit TransportationSimplex(const Eigen::MatrixXd& cost)
      : cost_(cost),
        n_(static_cast<int>(cost.rows())),
        m_(static_cast<int>(cost.cols())),
        adjacency_(static_cast<std::size_t>(n_ + m_)),
        parent_(static_cast<std::size_t>(n_ + m_)),
        parent_cell_(static_cast<std::size_t>(n_ + m_)),
        depth_(static_cast<std::size_t>(n_ + m_)),
        potential_(static_cast<std::size_t>(n_ + m_)) {
    const double max_cost = cost_.size() > 0 ? cost_.cwiseAbs().maxCoeff() : 0;
    pricing_tol_ = 1e-12 * max_cost;
  }

  LpSolution solve() {
    initial_basis();
    const std::int64_t total = static_cast<std::int64_t>(n_) * m_;
    const std::int64_t block = std::clamp<std::int64_t>(
        static_cast<std::int64_t>(std::sqrt(static_cast<double>(total))), 16,
        total);
    const std::size_t pivot_limit = 64 * static_cast<std::size_t>(total) + 1024;
    std::size_t pivots = 0;
    for (;;) {
      build_tree();
      const std::int64_t entering = find_entering(total, block);
      if (entering < 0) break;
      pivot(static_cast<int>(entering / m_), static_cast<int>(entering % m_));
      if (++pivots > pivot_limit) {
        throw std::runtime_error("transportation simplex did not terminate");
      }
    }
    return extract(pivots);
  }

 private:
  struct Cell {
    int row;
    int col;
    std::int64_t flow;
  };

  int col_node(int j) const { return n_ + j; }
  std::size_t idx(int node) const { return static_cast<std::size_t>(node); }

  void add_cell(int cell_id) {
    const Cell& c = basis_[static_cast<std::size_t>(cell_id)];
    adjacency_[idx(c.row)].push_back(cell_id);
    adjacency_[idx(col_node(c.col))].push_back(cell_id);
  }

  void remove_cell(int cell_id) {
    const Cell& c = basis_[static_cast<std::size_t>(cell_id)];
    for (int node : {c.row, col_node(c.col)}) {
      auto& adj = adjacency_[idx(node)];
      auto it = std::find(adj.begin(), adj.end(), cell_id);
      *it = adj.back();
      adj.pop_back();
    }
  }

  // Matrix-minimum rule on the perturbed supplies.
  void initial_basis() {
    const std::int64_t n = n_;
    const std::int64_t m = m_;
    const std::int64_t k = n + 1;
    std::vector<std::int64_t> supply(idx(n_), k * m + 1);
    std::vector<std::int64_t> demand(idx(m_), k * n);
    demand.back() += n;

    std::vector<std::int64_t> order(static_cast<std::size_t>(n * m));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::int64_t a, std::int64_t b) {
                       return cost_(a / m, a % m) < cost_(b / m, b % m);
                     });
    const std::size_t basis_size = idx(n_ + m_ - 1);
    basis_.reserve(basis_size);
    for (std::int64_t id : order) {
      const int i = static_cast<int>(id / m);
      const int j = static_cast<int>(id % m);
      if (supply[idx(i)] == 0 || demand[idx(j)] == 0) continue;
      const std::int64_t f = std::min(supply[idx(i)], demand[idx(j)]);
      supply[idx(i)] -= f;
      demand[idx(j)] -= f;
      basis_.push_back({i, j, f});
      add_cell(static_cast<int>(basis_.size() - 1));
      if (basis_.size() == basis_size) break;
    }
    if (basis_.size() != basis_size) {
      throw std::logic_error("initial transport basis is not a spanning tree");
    }
  }

  // Root the basis tree at row 0 and solve u_i + v_j = c_ij on basic cells.
  void build_tree() {
    std::fill(depth_.begin(), depth_.end(), -1);
    queue_.clear();
    queue_.push_back(0);
    parent_[0] = -1;
    parent_cell_[0] = -1;
    depth_[0] = 0;
    potential_[0] = 0.0;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const int node = queue_[head];
      for (int cell_id : adjacency_[idx(node)]) {
        const Cell& c = basis_[static_cast<std::size_t>(cell_id)];
        const int other = node < n_ ? col_node(c.col) : c.row;
        if (depth_[idx(other)] >= 0) continue;
        depth_[idx(other)] = depth_[idx(node)] + 1;
        parent_[idx(other)] = node;
        parent_cell_[idx(other)] = cell_id;
        potential_[idx(other)] = cost_(c.row, c.col) - potential_[idx(node)];
        queue_.push_back(other);
      }
    }
  }

  // Block search: scan cells cyclically and take the most negative reduced
  // cost within the first block that has one.
  std::int64_t find_entering(std::int64_t total, std::int64_t block) {
    double best = -pricing_tol_;
    std::int64_t entering = -1;
    std::int64_t id = next_cell_;
    std::int64_t in_block = 0;
    for (std::int64_t count = 0; count < total; ++count) {
      const int i = static_cast<int>(id / m_);
      const int j = static_cast<int>(id % m_);
      const double reduced =
          cost_(i, j) - potential_[idx(i)] - potential_[idx(col_node(j))];
      if (reduced < best) {
        best = reduced;
        entering = id;
      }
      if (++id == total) id = 0;
      if (++in_block == block) {
        if (entering >= 0) break;
        in_block = 0;
      }
    }
    next_cell_ = id;
    return entering;
  }

  void pivot(int row, int col) {
    // Cycle: entering cell, then the tree path from the column node back to
    // the row node. Cells at even positions of that path lose flow.
    path_b_.clear();
    path_a_.clear();
    int b = col_node(col);
    int a = row;
    while (depth_[idx(b)] > depth_[idx(a)]) {
      path_b_.push_back(parent_cell_[idx(b)]);
      b = parent_[idx(b)];
    }
    while (depth_[idx(a)] > depth_[idx(b)]) {
      path_a_.push_back(parent_cell_[idx(a)]);
      a = parent_[idx(a)];
    }
    while (a != b) {
      path_b_.push_back(parent_cell_[idx(b)]);
      b = parent_[idx(b)];
      path_a_.push_back(parent_cell_[idx(a)]);
      a = parent_[idx(a)];
    }
    path_b_.insert(path_b_.end(), path_a_.rbegin(), path_a_.rend());

    std::int64_t theta = -1;
    int leaving = -1;
    for (std::size_t k = 0; k < path_b_.size(); k += 2) {
      const std::int64_t f = basis_[static_cast<std::size_t>(path_b_[k])].flow;
      if (theta < 0 || f < theta) {
        theta = f;
        leaving = path_b_[k];
      }
    }
    for (std::size_t k = 0; k < path_b_.size(); ++k) {
      auto& f = basis_[static_cast<std::size_t>(path_b_[k])].flow;
      f += (k % 2 == 0) ? -theta : theta;
    }
    remove_cell(leaving);
    basis_[static_cast<std::size_t>(leaving)] = {row, col, theta};
    add_cell(leaving);
  }

  LpSolution extract(std::size_t pivots) {
    // Unperturbed basic flows by leaf peeling: every row ships m, every
    // column receives n.
    const std::size_t nodes = idx(n_ + m_);
    std::vector<std::int64_t> remaining(nodes);
    std::vector<std::size_t> degree(nodes);
    std::vector<std::int64_t> flow(basis_.size(), -1);
    std::vector<int> leaves;
    for (std::size_t v = 0; v < nodes; ++v) {
      remaining[v] = static_cast<int>(v) < n_ ? m_ : n_;
      degree[v] = adjacency_[v].size();
      if (degree[v] == 1) leaves.push_back(static_cast<int>(v));
    }
    while (!leaves.empty()) {
      const int node = leaves.back();
      leaves.pop_back();
      if (degree[idx(node)] != 1) continue;
      int cell_id = -1;
      for (int c : adjacency_[idx(node)]) {
        if (flow[static_cast<std::size_t>(c)] < 0) {
          cell_id = c;
          break;
        }
      }
      const Cell& c = basis_[static_cast<std::size_t>(cell_id)];
      const int other = node < n_ ? col_node(c.col) : c.row;
      flow[static_cast<std::size_t>(cell_id)] = remaining[idx(node)];
      remaining[idx(other)] -= remaining[idx(node)];
      remaining[idx(node)] = 0;
      degree[idx(node)] = 0;
      if (--degree[idx(other)] == 1) leaves.push_back(other);
    }

    LpSolution out;
    out.pivots = pivots;
    out.plan.coupling = Eigen::MatrixXd::Zero(n_, m_);
    const double total = static_cast<double>(n_) * static_cast<double>(m_);
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      if (flow[k] < 0) {
        throw std::logic_error("transport basis flow recovery failed");
      }
      out.plan.coupling(basis_[k].row, basis_[k].col) =
          static_cast<double>(flow[k]) / total;
    }
    out.optimum = (out.plan.coupling.array() * cost_.array()).sum();
    return out;
  }

  const Eigen::MatrixXd& cost_;
  int n_;
  int m_;
  double pricing_tol_ = 0.0;
  std::int64_t next_cell_ = 0;

  std::vector<Cell> basis_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> parent_;
  std::vector<int> parent_cell_;
  std::vector<int> depth_;
  std::vector<double> potential_;
  std::vector<int> queue_;
  std::vector<int> path_a_;
  std::vector<int> path_b_;
};

}  // namespace

LpSolution exact_wasserstein_lp(const CostMatrix& cost) {
  if (cost.entries.rows() == 0 || cost.entries.cols() == 0) {
    throw std::invalid_argument("cost matrix must be non-empty");
  }
  if (!cost.entries.allFinite()) {
    throw std::invalid_argument("cost matrix has non-finite entries");
  }
  return TransportationSimplex(cost.entries).solve();
}

}  // namespace twosample
