#pragma once

// Single-level reduction of the attacker-operator game. The operator LP is
// embedded twice: its primal rows (with attack switches big-M'd) and its
// dual feasibility rows, tied together by one weak-duality inequality
//   c.x <= b(z).y + l.lam - u.mu
// which can only hold with equality, so any feasible (x, y) pair certifies
// that x is an optimal dispatch for the chosen attack. Destroying more can
// only hurt the operator, so the attacker's objective is the negated shed.
//
// The dual objective's b(z).y terms are bilinear; each one is replaced by a
// product column w = z*y with the one McCormick side the inequality's
// pressure direction actually needs. That needs finite dual boxes: rows that
// carry a z term are all <=, so their duals live in [-dual_box, 0], with
// dual_box = 10 (objective coefficients are at most 1 p.u., times a safety
// factor; audit_interdiction checks the box never binds).

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gridint/mip.hpp"
#include "gridint/opf.hpp"

namespace gridint {

struct InterdictionModel {
  Model model = Model::dc;
  LinearProgram milp;  // minimize -(shed); optimal value is -zeta
  OpfVariables vars;
  double total_demand = 0.0;
  int budget = 0;

  std::vector<int> attackable;  // branch positions carrying a z column
  std::vector<int> z_cols;      // aligned with attackable
  int num_primal_cols = 0;
  int num_primal_rows = 0;

  // a.x + M z <= M rows; audited so M never does the constraining.
  struct SwitchRow {
    int row;
    double big_m;
    int z_col;
  };
  std::vector<SwitchRow> switch_rows;

  std::vector<int> y_col;        // dual column per primal row
  std::vector<int> boxed_duals;  // y columns clamped to [-dual_box, 0]
  double dual_box = 10.0;
};

namespace detail {

inline double switch_big_m(const Network& net, Model model, const Arc& arc,
                           const LacConfig& cfg, bool reactive) {
  const Branch& br = net.branches[arc.branch];
  const double span = 2.0 * cfg.angle_bound;
  if (model == Model::dc) return std::abs(br.b) * span;
  const Bus& bi = net.buses[arc.from];
  const Bus& bj = net.buses[arc.to];
  const double dv = std::max(bi.v_max - bj.v_min, bj.v_max - bi.v_min);
  const double lo = bi.v_min - 1.0, hi = bi.v_max - 1.0;
  const double sqv_cap = std::max(lo * lo, hi * hi);
  const double sqt_cap = span * span;
  const double volt = reactive ? std::abs(br.b) : br.g;
  const double ang = reactive ? br.g : std::abs(br.b);
  return volt * (dv + sqv_cap + 0.5 * sqt_cap) + ang * span;
}

}  // namespace detail

inline InterdictionModel build_interdiction_mip(const Network& net,
                                                Model model, int budget,
                                                const LacConfig& cfg = {}) {
  if (budget < 0)
    throw InputError(InputError::Kind::validation, "budget must be >= 0");

  OpfModel base = build_opf(net, model, nullptr, cfg);

  InterdictionModel im;
  im.model = model;
  im.budget = budget;
  im.total_demand = base.total_demand;
  im.vars = std::move(base.vars);
  im.milp = std::move(base.lp);
  LinearProgram& lp = im.milp;
  OpfVariables& vars = im.vars;
  im.num_primal_cols = lp.num_vars;

  const std::vector<double> c_lower = lp.objective;  // operator's objective

  for (std::size_t k = 0; k < net.branches.size(); ++k) {
    if (!net.branches[k].attackable) continue;
    im.attackable.push_back(static_cast<int>(k));
    im.z_cols.push_back(vars.add(
        lp, "z_" + std::to_string(net.branches[k].id), 0.0, 1.0, 0.0,
        SymbolKind::attack_z, static_cast<int>(k)));
  }

  // Flow definitions on attackable branches become switch pairs
  //   a.x + M z <= M   and   -a.x + M z <= M
  // and the flow itself is forced to zero by |flow| <= s_max * z rows.
  auto to_switch_pair = [&](int row, double big_m, int zc) {
    LpRow mirror = lp.rows[row];
    for (double& a : mirror.coeffs) a = -a;
    lp.rows[row].cmp = Cmp::le;
    lp.rows[row].rhs = big_m;
    lp.rows[row].coeffs[zc] = big_m;
    im.switch_rows.push_back({row, big_m, zc});
    mirror.cmp = Cmp::le;
    mirror.rhs = big_m;
    mirror.coeffs[zc] = big_m;
    mirror.label += "_m";
    im.switch_rows.push_back({static_cast<int>(lp.rows.size()), big_m, zc});
    lp.rows.push_back(std::move(mirror));
  };
  for (std::size_t ai = 0; ai < im.attackable.size(); ++ai) {
    const int k = im.attackable[ai];
    const int zc = im.z_cols[ai];
    for (int arc_id : {2 * k, 2 * k + 1}) {
      const Arc& arc = net.arcs[arc_id];
      const double smax = net.branches[k].s_max;
      to_switch_pair(base.def_p_row[arc_id],
                     detail::switch_big_m(net, model, arc, cfg, false), zc);
      lp.add_row(Cmp::le, 0.0, {{vars.flow_p[arc_id], 1.0}, {zc, -smax}},
                 detail::arc_label(net, arc, "thz_p"));
      lp.add_row(Cmp::le, 0.0, {{vars.flow_p[arc_id], -1.0}, {zc, -smax}},
                 detail::arc_label(net, arc, "thz_p") + "_m");
      if (model == Model::lac) {
        to_switch_pair(base.def_q_row[arc_id],
                       detail::switch_big_m(net, model, arc, cfg, true), zc);
        lp.add_row(Cmp::le, 0.0, {{vars.flow_q[arc_id], 1.0}, {zc, -smax}},
                   detail::arc_label(net, arc, "thz_q"));
        lp.add_row(Cmp::le, 0.0, {{vars.flow_q[arc_id], -1.0}, {zc, -smax}},
                   detail::arc_label(net, arc, "thz_q") + "_m");
      }
    }
  }
  im.num_primal_rows = static_cast<int>(lp.rows.size());

  // z coefficient per primal row (each row touches at most one z column).
  std::vector<std::pair<int, double>> row_z(im.num_primal_rows, {-1, 0.0});
  for (int r = 0; r < im.num_primal_rows; ++r)
    for (int zc : im.z_cols)
      if (lp.rows[r].coeffs[zc] != 0.0) row_z[r] = {zc, lp.rows[r].coeffs[zc]};

  // Dual columns. Rows carrying z need the finite box for their products.
  im.y_col.resize(im.num_primal_rows);
  for (int r = 0; r < im.num_primal_rows; ++r) {
    double lo = -kInf, hi = kInf;
    if (lp.rows[r].cmp == Cmp::le) hi = 0.0;
    if (lp.rows[r].cmp == Cmp::ge) lo = 0.0;
    if (row_z[r].first >= 0) lo = -im.dual_box;
    im.y_col[r] = vars.add(lp, "y_" + lp.rows[r].label, lo, hi, 0.0,
                           SymbolKind::dual_row, r);
    if (row_z[r].first >= 0) im.boxed_duals.push_back(im.y_col[r]);
  }
  std::vector<int> lam_col(im.num_primal_cols, -1), mu_col(im.num_primal_cols, -1);
  for (int j = 0; j < im.num_primal_cols; ++j) {
    if (lp.lower[j] > -kInf)
      lam_col[j] = vars.add(lp, "lam_" + lp.var_labels[j], 0.0, kInf, 0.0,
                            SymbolKind::dual_lower, j);
    if (lp.upper[j] < kInf)
      mu_col[j] = vars.add(lp, "mu_" + lp.var_labels[j], 0.0, kInf, 0.0,
                           SymbolKind::dual_upper, j);
  }

  // Product columns w = z * y. The weak-duality row pushes switch products
  // down (their z coefficient is +M) and thermal products up (-s_max), so
  // each needs only that side of the McCormick envelope; with y_hi = 0 one
  // of the two rows per side collapses into the w box.
  std::vector<std::pair<int, int>> w_of_row(im.num_primal_rows, {-1, 0});
  for (int r = 0; r < im.num_primal_rows; ++r) {
    const auto [zc, zcoef] = row_z[r];
    if (zc < 0) continue;
    const int w = vars.add(lp, "w_" + lp.rows[r].label, -im.dual_box, 0.0, 0.0,
                           SymbolKind::product_w, r, zc);
    w_of_row[r] = {w, 1};
    if (zcoef > 0.0) {
      lp.add_row(Cmp::le, 0.0, {{w, -1.0}, {zc, -im.dual_box}},
                 "env_zlo_" + lp.rows[r].label);
      lp.add_row(Cmp::le, 0.0, {{im.y_col[r], 1.0}, {w, -1.0}},
                 "env_ylo_" + lp.rows[r].label);
    } else {
      lp.add_row(Cmp::le, im.dual_box,
                 {{w, 1.0}, {im.y_col[r], -1.0}, {zc, im.dual_box}},
                 "env_yhi_" + lp.rows[r].label);
    }
  }

  // Dual feasibility: A^T y + lam - mu = c over the operator's columns.
  for (int j = 0; j < im.num_primal_cols; ++j) {
    std::vector<std::pair<int, double>> terms;
    for (int r = 0; r < im.num_primal_rows; ++r)
      if (lp.rows[r].coeffs[j] != 0.0)
        terms.emplace_back(im.y_col[r], lp.rows[r].coeffs[j]);
    if (lam_col[j] >= 0) terms.emplace_back(lam_col[j], 1.0);
    if (mu_col[j] >= 0) terms.emplace_back(mu_col[j], -1.0);
    lp.add_row(Cmp::eq, c_lower[j], terms, "dfeas_" + lp.var_labels[j]);
  }

  // Weak duality with b(z) split as rhs - zcoef*z:
  //   c.x - sum_r rhs_r y_r + sum_r zcoef_r w_r - l.lam + u.mu <= 0.
  {
    std::vector<std::pair<int, double>> terms;
    for (int j = 0; j < im.num_primal_cols; ++j) {
      if (c_lower[j] != 0.0) terms.emplace_back(j, c_lower[j]);
      if (lam_col[j] >= 0 && lp.lower[j] != 0.0)
        terms.emplace_back(lam_col[j], -lp.lower[j]);
      if (mu_col[j] >= 0 && lp.upper[j] != 0.0)
        terms.emplace_back(mu_col[j], lp.upper[j]);
    }
    for (int r = 0; r < im.num_primal_rows; ++r) {
      if (lp.rows[r].rhs != 0.0) terms.emplace_back(im.y_col[r], -lp.rows[r].rhs);
      if (w_of_row[r].second) terms.emplace_back(w_of_row[r].first, row_z[r].second);
    }
    lp.add_row(Cmp::le, 0.0, terms, "strong_duality");
  }

  // Budget: at most `budget` branches destroyed (Eq. style: sum z >= |A|-Z).
  {
    std::vector<std::pair<int, double>> terms;
    for (int zc : im.z_cols) terms.emplace_back(zc, 1.0);
    lp.add_row(Cmp::ge,
               static_cast<double>(im.z_cols.size()) - budget, terms,
               "budget");
  }

  // Attacker minimizes the negated shed over the certified-optimal dispatch.
  for (int j = 0; j < im.num_primal_cols; ++j) lp.objective[j] = -c_lower[j];
  lp.objective_offset = -im.total_demand;

  lp.validate();
  if (!vars.audit(lp))
    throw std::logic_error("interdiction model failed its symbol audit");
  return im;
}

inline AttackVector attack_from_solution(const InterdictionModel& im,
                                         const Network& net,
                                         const std::vector<double>& x) {
  std::vector<int> ids;
  for (std::size_t ai = 0; ai < im.attackable.size(); ++ai)
    if (x[im.z_cols[ai]] < 0.5)
      ids.push_back(net.branches[im.attackable[ai]].id);
  return AttackVector::of(ids);
}

struct InterdictionAudit {
  // Slack of destroyed-branch switch rows whose dual is active: near zero
  // means the artificial relaxation constant clipped a real flow.
  double switch_margin = std::numeric_limits<double>::infinity();
  // Distance of boxed duals from the far wall. A vertex often rests idle
  // duals exactly on the wall (the box is one of its active constraints),
  // so contact is normal; only crossing it flags a corrupt solution.
  double dual_margin = std::numeric_limits<double>::infinity();
  bool ok(double tol = 1e-6) const {
    return switch_margin > tol && dual_margin > -tol;
  }
};

/// Checks that no big-M actually constrained the solution: a disabled
/// switch row may only sit on its M when its dual is idle, and no boxed
/// dual may rest on the artificial box.
inline InterdictionAudit audit_interdiction(const InterdictionModel& im,
                                            const std::vector<double>& x) {
  InterdictionAudit a;
  for (const auto& sw : im.switch_rows) {
    if (x[sw.z_col] >= 0.5) continue;  // branch intact; row is a real one
    const LpRow& row = im.milp.rows[sw.row];
    double lhs = 0.0;
    for (int j = 0; j < im.milp.num_vars; ++j) lhs += row.coeffs[j] * x[j];
    const double slack = row.rhs - lhs;
    if (std::abs(x[im.y_col[sw.row]]) <= 1e-7) continue;  // idle dual
    a.switch_margin = std::min(a.switch_margin, slack);
  }
  for (int yc : im.boxed_duals)
    a.dual_margin = std::min(a.dual_margin, x[yc] + im.dual_box);
  return a;
}

}  // namespace gridint
