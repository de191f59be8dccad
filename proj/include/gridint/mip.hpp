#pragma once

// Branch-and-bound over the bounded simplex. Best-bound node order, most
// fractional branching, warm starts from the parent basis. Every incumbent is
// re-solved with its integer variables fixed, so reported objectives are exact
// LP optima for the chosen integer assignment.

#include <cmath>
#include <queue>
#include <vector>

#include "gridint/lp.hpp"
#include "gridint/simplex.hpp"

namespace gridint {

struct MipOptions {
  double tol_int = 1e-6;   // integrality tolerance on LP relaxation values
  double gap_rel = 1e-6;   // relative optimality gap at which nodes prune
  long max_nodes = 1000000;
  SimplexOptions lp;
  const SimplexBasis* root_basis = nullptr;
};

enum class MipStatus : std::uint8_t { optimal, infeasible, limit, breakdown };

inline const char* to_string(MipStatus s) {
  switch (s) {
    case MipStatus::optimal: return "optimal";
    case MipStatus::infeasible: return "infeasible";
    case MipStatus::limit: return "limit";
    case MipStatus::breakdown: return "breakdown";
  }
  return "?";
}

struct MipResult {
  MipStatus status = MipStatus::breakdown;
  bool has_incumbent = false;
  double objective = 0.0;   // exact LP value of the incumbent assignment
  double best_bound = -kInf;
  std::vector<double> x;
  long nodes = 0;
  SimplexBasis root_basis;  // root relaxation basis, for cut-loop reuse

  double rel_gap() const {
    if (!has_incumbent) return kInf;
    return (objective - best_bound) / std::max(1.0, std::abs(objective));
  }
};

inline MipResult solve_mip(const LinearProgram& lp0,
                           const std::vector<int>& int_cols,
                           const MipOptions& opt = {}) {
  struct Node {
    double bound;
    long id;
    std::vector<double> lo, hi;  // bounds of int_cols at this node
    SimplexBasis basis;
  };
  struct Worse {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;
      return a.id > b.id;
    }
  };

  MipResult res;
  LinearProgram work = lp0;
  const int k = static_cast<int>(int_cols.size());

  std::priority_queue<Node, std::vector<Node>, Worse> open;
  Node root;
  root.bound = -kInf;
  root.id = 0;
  root.lo.resize(static_cast<std::size_t>(k));
  root.hi.resize(static_cast<std::size_t>(k));
  for (int t = 0; t < k; ++t) {
    root.lo[t] = lp0.lower[int_cols[t]];
    root.hi[t] = lp0.upper[int_cols[t]];
  }
  if (opt.root_basis) root.basis = *opt.root_basis;
  open.push(std::move(root));
  long next_id = 1;

  double inc_obj = kInf;
  std::vector<double> inc_x;

  auto prune_eps = [&]() {
    return opt.gap_rel * std::max(1.0, std::abs(inc_obj));
  };
  auto finish = [&](MipStatus st, double bound) {
    res.status = st;
    res.has_incumbent = inc_obj < kInf;
    res.objective = res.has_incumbent ? inc_obj : 0.0;
    res.best_bound = bound;
    res.x = inc_x;
    return res;
  };

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (inc_obj < kInf && node.bound >= inc_obj - prune_eps()) continue;
    if (res.nodes >= opt.max_nodes) {
      // Honest bound: everything still open, plus the node in hand.
      double bound = node.bound;
      while (!open.empty()) {
        bound = std::min(bound, open.top().bound);
        open.pop();
      }
      if (inc_obj < kInf) bound = std::min(bound, inc_obj);
      return finish(MipStatus::limit, bound);
    }
    ++res.nodes;

    for (int t = 0; t < k; ++t) {
      work.lower[int_cols[t]] = node.lo[t];
      work.upper[int_cols[t]] = node.hi[t];
    }
    LpSolution rel = solve_lp(
        work, node.basis.state.empty() ? nullptr : &node.basis, opt.lp);
    if (rel.status == LpStatus::breakdown && !node.basis.state.empty())
      rel = solve_lp(work, nullptr, opt.lp);
    if (rel.status == LpStatus::infeasible) continue;
    if (rel.status != LpStatus::optimal)
      return finish(MipStatus::breakdown, -kInf);
    if (node.id == 0) res.root_basis = rel.basis;
    if (inc_obj < kInf && rel.objective >= inc_obj - prune_eps()) continue;

    // Most fractional integer column; ties at the lowest index.
    int branch_t = -1;
    double worst = opt.tol_int;
    for (int t = 0; t < k; ++t) {
      const double v = rel.primal[int_cols[t]];
      const double dist = std::abs(v - std::round(v));
      if (dist > worst) {
        worst = dist;
        branch_t = t;
      }
    }

    if (branch_t < 0) {
      // Integral relaxation: fix and re-solve for an exact incumbent value.
      for (int t = 0; t < k; ++t) {
        const double v = std::round(rel.primal[int_cols[t]]);
        work.lower[int_cols[t]] = v;
        work.upper[int_cols[t]] = v;
      }
      LpSolution fixed = solve_lp(work, &rel.basis, opt.lp);
      if (fixed.status == LpStatus::breakdown)
        fixed = solve_lp(work, nullptr, opt.lp);
      if (fixed.status == LpStatus::optimal) {
        if (fixed.objective < inc_obj) {
          inc_obj = fixed.objective;
          inc_x = fixed.primal;
        }
        continue;
      }
      if (fixed.status != LpStatus::infeasible)
        return finish(MipStatus::breakdown, -kInf);
      // Knife-edge rounding: bisect the first still-free column so both
      // children shrink strictly; repeating this fixes every column.
      branch_t = -1;
      for (int t = 0; t < k; ++t) {
        if (node.lo[t] < node.hi[t]) { branch_t = t; break; }
      }
      if (branch_t < 0) continue;  // fully fixed and infeasible
      const double mid = std::floor(0.5 * (node.lo[branch_t] + node.hi[branch_t]));
      Node down = node, up = node;
      down.bound = up.bound = rel.objective;
      down.id = next_id++;
      up.id = next_id++;
      down.hi[branch_t] = mid;
      up.lo[branch_t] = mid + 1.0;
      down.basis = rel.basis;
      up.basis = rel.basis;
      open.push(std::move(down));
      open.push(std::move(up));
      continue;
    }

    const double v = rel.primal[int_cols[branch_t]];
    Node down = node, up = node;
    down.bound = rel.objective;
    up.bound = rel.objective;
    down.id = next_id++;
    up.id = next_id++;
    down.hi[branch_t] = std::floor(v + opt.tol_int);
    up.lo[branch_t] = std::ceil(v - opt.tol_int);
    if (down.hi[branch_t] >= node.lo[branch_t]) {
      down.basis = rel.basis;
      open.push(std::move(down));
    }
    if (up.lo[branch_t] <= node.hi[branch_t]) {
      up.basis = rel.basis;
      open.push(std::move(up));
    }
  }

  if (inc_obj < kInf) return finish(MipStatus::optimal, inc_obj);
  return finish(MipStatus::infeasible, kInf);
}

}  // namespace gridint
