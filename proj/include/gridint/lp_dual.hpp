#pragma once

// Dualization of a bounded-variable minimization LP. The dual is returned in
// minimization form as well, so `dual.objective == -primal.objective` at
// optimality. Used for differential testing and by the interdiction builder
// checks; the single-level reformulation assembles its dual block directly.

#include "gridint/lp.hpp"

namespace gridint {

/// Column layout of the returned program: one y per primal row, then one
/// lambda per finite primal lower bound, then one mu per finite upper bound.
/// Row i of the result enforces dual feasibility of primal variable i:
///   sum_k A_ki y_k + lambda_i - mu_i = c_i.
inline LinearProgram dual_of(const LinearProgram& p) {
  const int m = static_cast<int>(p.rows.size());
  const int n = p.num_vars;
  LinearProgram d;
  d.objective_offset = -p.objective_offset;
  for (int i = 0; i < m; ++i) {
    double lo = -kInf, hi = kInf;
    if (p.rows[i].cmp == Cmp::le) hi = 0.0;
    else if (p.rows[i].cmp == Cmp::ge) lo = 0.0;
    d.add_var("y_" + p.rows[i].label, lo, hi, -p.rows[i].rhs);
  }
  std::vector<int> lam(static_cast<std::size_t>(n), -1);
  std::vector<int> mu(static_cast<std::size_t>(n), -1);
  for (int j = 0; j < n; ++j)
    if (std::isfinite(p.lower[j]))
      lam[j] = d.add_var("lam_" + p.var_labels[j], 0.0, kInf, -p.lower[j]);
  for (int j = 0; j < n; ++j)
    if (std::isfinite(p.upper[j]))
      mu[j] = d.add_var("mu_" + p.var_labels[j], 0.0, kInf, p.upper[j]);
  for (int j = 0; j < n; ++j) {
    std::vector<std::pair<int, double>> terms;
    for (int i = 0; i < m; ++i) {
      const double a = p.rows[i].coeffs[j];
      if (a != 0.0) terms.push_back({i, a});
    }
    if (lam[j] >= 0) terms.push_back({lam[j], 1.0});
    if (mu[j] >= 0) terms.push_back({mu[j], -1.0});
    d.add_row(Cmp::eq, p.objective[j], terms, "d_" + p.var_labels[j]);
  }
  return d;
}

}  // namespace gridint
