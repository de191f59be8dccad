#pragma once

// Operator dispatch models built as LPs over a network snapshot with a fixed
// attack. Both models price shed load only: minimize sum(P_d - p_d).
//
// DC: lossless active-power flow, p_a = -B (th_i - th_j) on intact arcs.
//
// LAC: linearized AC around v = 1, th = 0. Exact branch flow
//   p_ij = G v_i^2 - v_i v_j (G cos dth + B sin dth)
// becomes, after cos dth -> 1 - dth^2/2, sin dth -> dth,
// v_i v_j -> v_i + v_j - 1, v_i^2 -> 2 v_i - 1 + (v_i - 1)^2 and dropping
// third-order and bilinear-small terms,
//   p_ij = G (v_i - v_j) + G sqv_i + (G/2) sqth + B (th_j - th_i)
//   q_ij = -B (v_i - v_j) - B sqv_i - (B/2) sqth + G (th_j - th_i)
// where sqth tracks dth^2 per branch and sqv_i tracks (v_i - 1)^2 per bus.
// Each square gets tangent cuts (valid global underestimators) at segment
// centers plus a cap; chords would need binaries, so caps stay loose. The
// relaxation only under-counts losses, which the operator wants small anyway.
// Apparent power uses an inner polygon:
//   cos(2 pi k/n) p + sin(2 pi k/n) q <= S cos(pi/n),  k = 0..n-1.

#include <cassert>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gridint/cav.hpp"
#include "gridint/lp.hpp"
#include "gridint/network.hpp"

namespace gridint {

enum class Model { dc, lac };

inline const char* to_string(Model m) { return m == Model::dc ? "dc" : "lac"; }

inline Model model_from_string(const std::string& s) {
  if (s == "dc") return Model::dc;
  if (s == "lac") return Model::lac;
  throw InputError(InputError::Kind::validation, "unknown model '" + s + "'");
}

struct LacConfig {
  int polygon_sides = 8;   // even, >= 4
  int pwl_segments = 6;    // tangent cuts per squared term, >= 2
  double taylor_v = 1.0;   // expansion point; only (1, 0) is supported
  double taylor_theta = 0.0;
  double pwl_angle_range = 0.35;  // half-width of the sqth cut domain [rad]
  double angle_bound = 0.6;       // |th_i| box; angle span = 2 * this

  void validate() const {
    if (polygon_sides < 4 || polygon_sides % 2 != 0)
      throw InputError(InputError::Kind::validation,
                       "polygon sides must be even and at least 4");
    if (pwl_segments < 2)
      throw InputError(InputError::Kind::validation,
                       "need at least 2 PWL segments");
    if (!(angle_bound > 0) || !(pwl_angle_range > 0))
      throw InputError(InputError::Kind::validation,
                       "angle ranges must be positive");
    if (taylor_v != 1.0 || taylor_theta != 0.0)
      throw InputError(InputError::Kind::validation,
                       "unsupported Taylor expansion point; use v=1, theta=0");
  }
};

enum class SymbolKind {
  demand_p,
  demand_q,
  gen_p,
  gen_q,
  bus_v,
  bus_theta,
  flow_p,
  flow_q,
  sq_theta,
  sq_v,
  attack_z,
  dual_row,
  dual_lower,
  dual_upper,
  product_w,
};

/// Column bookkeeping: every LP column is claimed by exactly one symbol
/// instance the moment it is created. audit() re-derives the claim set from
/// the typed index lists and cross-checks it against the owner records.
struct OpfVariables {
  struct Owner {
    SymbolKind kind;
    int a = -1;  // element position (bus/branch/arc/gen/demand/row)
    int b = -1;  // secondary index (e.g. z column for products)
  };

  std::vector<Owner> owner;  // one entry per LP column, in column order

  std::vector<int> p_d, q_d;        // per demand
  std::vector<int> p_g, q_g;        // per generator
  std::vector<int> v, theta;        // per bus
  std::vector<int> flow_p, flow_q;  // per directed arc
  std::vector<int> sq_theta;        // per branch
  std::vector<int> sq_v;            // per bus
  int ref_bus = -1;                 // bus position with theta pinned to 0

  int add(LinearProgram& lp, std::string label, double lo, double hi,
          double cost, SymbolKind k, int a, int b = -1) {
    const int c = lp.add_var(std::move(label), lo, hi, cost);
    assert(c == static_cast<int>(owner.size()));
    owner.push_back(Owner{k, a, b});
    return c;
  }

  bool audit(const LinearProgram& lp) const {
    if (static_cast<int>(owner.size()) != lp.num_vars) return false;
    std::vector<int> claims(owner.size(), 0);
    auto mark = [&](const std::vector<int>& cols, SymbolKind k) {
      for (std::size_t i = 0; i < cols.size(); ++i) {
        const int c = cols[i];
        if (c < 0 || c >= static_cast<int>(owner.size())) return false;
        if (owner[c].kind != k) return false;
        if (owner[c].a != static_cast<int>(i)) return false;
        ++claims[c];
      }
      return true;
    };
    if (!mark(p_d, SymbolKind::demand_p)) return false;
    if (!mark(q_d, SymbolKind::demand_q)) return false;
    if (!mark(p_g, SymbolKind::gen_p)) return false;
    if (!mark(q_g, SymbolKind::gen_q)) return false;
    if (!mark(v, SymbolKind::bus_v)) return false;
    if (!mark(theta, SymbolKind::bus_theta)) return false;
    if (!mark(flow_p, SymbolKind::flow_p)) return false;
    if (!mark(flow_q, SymbolKind::flow_q)) return false;
    if (!mark(sq_theta, SymbolKind::sq_theta)) return false;
    if (!mark(sq_v, SymbolKind::sq_v)) return false;
    for (std::size_t c = 0; c < owner.size(); ++c) {
      switch (owner[c].kind) {
        case SymbolKind::attack_z:
        case SymbolKind::dual_row:
        case SymbolKind::dual_lower:
        case SymbolKind::dual_upper:
        case SymbolKind::product_w:
          if (claims[c] != 0) return false;  // not tracked by these lists
          break;
        default:
          if (claims[c] != 1) return false;
      }
    }
    return true;
  }
};

struct OpfModel {
  Model model = Model::dc;
  LinearProgram lp;
  OpfVariables vars;
  double total_demand = 0.0;  // objective offset; shed = lp objective value
  // Row indices of the flow-definition equalities, one per arc, -1 when the
  // arc is destroyed (no row). The interdiction builder rewrites these rows.
  std::vector<int> def_p_row, def_q_row;
};

/// Bus position whose angle is pinned to zero: lowest external id. The
/// schema carries no external-grid marker, so the fallback rule is the rule.
inline int reference_bus(const Network& net) {
  int pos = 0;
  for (std::size_t i = 1; i < net.buses.size(); ++i)
    if (net.buses[i].id < net.buses[pos].id) pos = static_cast<int>(i);
  return pos;
}

namespace detail {

inline std::vector<char> destroyed_mask(const Network& net,
                                        const AttackVector* attack) {
  std::vector<char> gone(net.branches.size(), 0);
  if (!attack) return gone;
  for (int id : attack->ids) {
    auto it = net.branch_index.find(id);
    if (it == net.branch_index.end())
      throw InputError(
          InputError::Kind::validation,
          "attack references unknown branch id " + std::to_string(id));
    if (!net.branches[it->second].attackable)
      throw InputError(
          InputError::Kind::validation,
          "attack targets non-attackable branch " + std::to_string(id));
    gone[it->second] = 1;
  }
  return gone;
}

inline std::vector<double> pwl_centers(double lo, double hi, int segments) {
  std::vector<double> c;
  c.reserve(segments);
  const double w = (hi - lo) / segments;
  for (int i = 0; i < segments; ++i) c.push_back(lo + (i + 0.5) * w);
  return c;
}

inline void add_demand_p(const Network& net, LinearProgram& lp,
                         OpfVariables& vars) {
  for (std::size_t d = 0; d < net.demands.size(); ++d)
    vars.p_d.push_back(vars.add(lp, "pd_" + std::to_string(net.demands[d].id),
                                0.0, net.demands[d].p_base, -1.0,
                                SymbolKind::demand_p, static_cast<int>(d)));
}

inline void add_gen_p(const Network& net, LinearProgram& lp,
                      OpfVariables& vars) {
  for (std::size_t g = 0; g < net.generators.size(); ++g)
    vars.p_g.push_back(vars.add(lp, "pg_" + std::to_string(net.generators[g].id),
                                0.0, net.generators[g].p_max, 0.0,
                                SymbolKind::gen_p, static_cast<int>(g)));
}

inline void add_theta(const Network& net, LinearProgram& lp,
                      OpfVariables& vars, double bound) {
  vars.ref_bus = reference_bus(net);
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    const bool ref = static_cast<int>(i) == vars.ref_bus;
    vars.theta.push_back(vars.add(lp, "th_" + std::to_string(net.buses[i].id),
                                  ref ? 0.0 : -bound, ref ? 0.0 : bound, 0.0,
                                  SymbolKind::bus_theta, static_cast<int>(i)));
  }
}

inline std::string arc_label(const Network& net, const Arc& a,
                             const char* prefix) {
  return std::string(prefix) + "_" + std::to_string(net.branches[a.branch].id) +
         (a.forward ? "f" : "r");
}

inline void add_balance_rows(const Network& net, LinearProgram& lp,
                             const OpfVariables& vars, bool reactive) {
  const auto& gcols = reactive ? vars.q_g : vars.p_g;
  const auto& dcols = reactive ? vars.q_d : vars.p_d;
  const auto& fcols = reactive ? vars.flow_q : vars.flow_p;
  const char tag = reactive ? 'q' : 'p';
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    std::vector<std::pair<int, double>> terms;
    for (std::size_t g = 0; g < net.generators.size(); ++g)
      if (net.bus_pos(net.generators[g].bus) == static_cast<int>(i))
        terms.emplace_back(gcols[g], 1.0);
    for (std::size_t d = 0; d < net.demands.size(); ++d)
      if (net.bus_pos(net.demands[d].bus) == static_cast<int>(i))
        terms.emplace_back(dcols[d], -1.0);
    for (std::size_t a = 0; a < net.arcs.size(); ++a)
      if (net.arcs[a].from == static_cast<int>(i))
        terms.emplace_back(fcols[a], -1.0);
    lp.add_row(Cmp::eq, 0.0, terms,
               std::string("bal_") + tag + "_" + std::to_string(net.buses[i].id));
  }
}

}  // namespace detail

/// DC dispatch LP for a fixed attack (nullptr = intact grid). The optimal
/// objective value is the shed in per-unit.
inline OpfModel build_dc(const Network& net, const AttackVector* attack,
                         const LacConfig& cfg = {}) {
  cfg.validate();
  const auto gone = detail::destroyed_mask(net, attack);

  OpfModel m;
  m.model = Model::dc;
  m.total_demand = net.total_demand();
  LinearProgram& lp = m.lp;
  OpfVariables& vars = m.vars;
  lp.objective_offset = m.total_demand;

  detail::add_demand_p(net, lp, vars);
  detail::add_gen_p(net, lp, vars);
  detail::add_theta(net, lp, vars, cfg.angle_bound);
  for (const Arc& a : net.arcs) {
    const double cap = gone[a.branch] ? 0.0 : net.branches[a.branch].s_max;
    vars.flow_p.push_back(vars.add(lp, detail::arc_label(net, a, "fp"), -cap,
                                   cap, 0.0, SymbolKind::flow_p,
                                   static_cast<int>(vars.flow_p.size())));
  }

  // p_a + B th_i - B th_j = 0 on intact arcs; destroyed arcs are pinned to 0
  // by their bounds and carry no coupling row.
  m.def_p_row.assign(net.arcs.size(), -1);
  for (std::size_t a = 0; a < net.arcs.size(); ++a) {
    const Arc& arc = net.arcs[a];
    if (gone[arc.branch]) continue;
    const double B = net.branches[arc.branch].b;
    m.def_p_row[a] = static_cast<int>(lp.rows.size());
    lp.add_row(Cmp::eq, 0.0,
               {{vars.flow_p[a], 1.0},
                {vars.theta[arc.from], B},
                {vars.theta[arc.to], -B}},
               detail::arc_label(net, arc, "def_p"));
  }
  detail::add_balance_rows(net, lp, vars, false);

  lp.validate();
  assert(vars.audit(lp));
  return m;
}

/// Linearized-AC dispatch LP for a fixed attack. Requires g >= 0 on every
/// branch (losses must never help), q_min <= 0 <= q_max on every generator
/// and v_min <= 1 <= v_max on every bus (the flat point must be feasible so
/// full shed is always an option).
inline OpfModel build_lac(const Network& net, const AttackVector* attack,
                          const LacConfig& cfg = {}) {
  cfg.validate();
  for (const Branch& br : net.branches)
    if (br.g < 0.0)
      throw InputError(InputError::Kind::validation,
                       "branch " + std::to_string(br.id) +
                           " has negative conductance; LAC needs g >= 0");
  for (const Generator& g : net.generators)
    if (g.q_min > 0.0 || g.q_max < 0.0)
      throw InputError(InputError::Kind::validation,
                       "generator " + std::to_string(g.id) +
                           " reactive range must contain 0 for LAC");
  for (const Bus& bus : net.buses)
    if (bus.v_min > 1.0 || bus.v_max < 1.0)
      throw InputError(InputError::Kind::validation,
                       "bus " + std::to_string(bus.id) +
                           " voltage box must contain 1.0 for LAC");

  const auto gone = detail::destroyed_mask(net, attack);

  OpfModel m;
  m.model = Model::lac;
  m.total_demand = net.total_demand();
  LinearProgram& lp = m.lp;
  OpfVariables& vars = m.vars;
  lp.objective_offset = m.total_demand;

  detail::add_demand_p(net, lp, vars);
  for (std::size_t d = 0; d < net.demands.size(); ++d) {
    const double qcap = net.demands[d].p_base * std::abs(net.demands[d].alpha);
    vars.q_d.push_back(lp.num_vars);
    vars.add(lp, "qd_" + std::to_string(net.demands[d].id), -qcap, qcap, 0.0,
             SymbolKind::demand_q, static_cast<int>(d));
  }
  detail::add_gen_p(net, lp, vars);
  for (std::size_t g = 0; g < net.generators.size(); ++g) {
    vars.q_g.push_back(lp.num_vars);
    vars.add(lp, "qg_" + std::to_string(net.generators[g].id),
             net.generators[g].q_min, net.generators[g].q_max, 0.0,
             SymbolKind::gen_q, static_cast<int>(g));
  }
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    vars.v.push_back(lp.num_vars);
    vars.add(lp, "v_" + std::to_string(net.buses[i].id), net.buses[i].v_min,
             net.buses[i].v_max, 0.0, SymbolKind::bus_v, static_cast<int>(i));
  }
  detail::add_theta(net, lp, vars, cfg.angle_bound);
  for (const Arc& a : net.arcs) {
    const double cap = gone[a.branch] ? 0.0 : net.branches[a.branch].s_max;
    vars.flow_p.push_back(lp.num_vars);
    vars.add(lp, detail::arc_label(net, a, "fp"), -cap, cap, 0.0,
             SymbolKind::flow_p, static_cast<int>(vars.flow_p.size()) - 1);
    vars.flow_q.push_back(lp.num_vars);
    vars.add(lp, detail::arc_label(net, a, "fq"), -cap, cap, 0.0,
             SymbolKind::flow_q, static_cast<int>(vars.flow_q.size()) - 1);
  }
  const double span = 2.0 * cfg.angle_bound;
  for (std::size_t k = 0; k < net.branches.size(); ++k) {
    vars.sq_theta.push_back(lp.num_vars);
    vars.add(lp, "sqth_" + std::to_string(net.branches[k].id), 0.0, span * span,
             0.0, SymbolKind::sq_theta, static_cast<int>(k));
  }
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    const double lo = net.buses[i].v_min - 1.0, hi = net.buses[i].v_max - 1.0;
    const double cap = std::max(lo * lo, hi * hi);
    vars.sq_v.push_back(lp.num_vars);
    vars.add(lp, "sqv_" + std::to_string(net.buses[i].id), 0.0, cap, 0.0,
             SymbolKind::sq_v, static_cast<int>(i));
  }

  // Flow definitions on intact arcs. Destroyed arcs keep zero bounds; their
  // sq columns float, which is harmless because every cut stays valid.
  m.def_p_row.assign(net.arcs.size(), -1);
  m.def_q_row.assign(net.arcs.size(), -1);
  for (std::size_t a = 0; a < net.arcs.size(); ++a) {
    const Arc& arc = net.arcs[a];
    if (gone[arc.branch]) continue;
    const Branch& br = net.branches[arc.branch];
    const double G = br.g, B = br.b;
    const int vi = vars.v[arc.from], vj = vars.v[arc.to];
    const int ti = vars.theta[arc.from], tj = vars.theta[arc.to];
    const int sv = vars.sq_v[arc.from], st = vars.sq_theta[arc.branch];
    m.def_p_row[a] = static_cast<int>(lp.rows.size());
    lp.add_row(Cmp::eq, 0.0,
               {{vars.flow_p[a], 1.0},
                {vi, -G},
                {vj, G},
                {sv, -G},
                {st, -0.5 * G},
                {ti, B},
                {tj, -B}},
               detail::arc_label(net, arc, "def_p"));
    m.def_q_row[a] = static_cast<int>(lp.rows.size());
    lp.add_row(Cmp::eq, 0.0,
               {{vars.flow_q[a], 1.0},
                {vi, B},
                {vj, -B},
                {sv, B},
                {st, 0.5 * B},
                {ti, G},
                {tj, -G}},
               detail::arc_label(net, arc, "def_q"));
  }

  // Inner polygon per intact arc: cos(2 pi k/n) p + sin(2 pi k/n) q <=
  // S cos(pi/n). Zero flow satisfies every side, so destroyed arcs skip it.
  const int n = cfg.polygon_sides;
  const double rhs_scale = std::cos(std::numbers::pi / n);
  for (std::size_t a = 0; a < net.arcs.size(); ++a) {
    const Arc& arc = net.arcs[a];
    if (gone[arc.branch]) continue;
    const double smax = net.branches[arc.branch].s_max;
    for (int k = 0; k < n; ++k) {
      const double ang = 2.0 * std::numbers::pi * k / n;
      lp.add_row(Cmp::le, smax * rhs_scale,
                 {{vars.flow_p[a], std::cos(ang)}, {vars.flow_q[a], std::sin(ang)}},
                 detail::arc_label(net, arc, "poly") + "_" + std::to_string(k));
    }
  }

  // Tangent cuts: sq >= 2 c x - c^2 under-estimates x^2 everywhere, so the
  // cuts stay valid for destroyed branches and any attack state.
  for (std::size_t k = 0; k < net.branches.size(); ++k) {
    const Arc& fwd = net.arcs[2 * k];
    const int ti = vars.theta[fwd.from], tj = vars.theta[fwd.to];
    for (double c : detail::pwl_centers(-cfg.pwl_angle_range,
                                        cfg.pwl_angle_range, cfg.pwl_segments))
      lp.add_row(Cmp::ge, -c * c,
                 {{vars.sq_theta[k], 1.0}, {ti, -2.0 * c}, {tj, 2.0 * c}},
                 "cut_sqth_" + std::to_string(net.branches[k].id));
  }
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    const double lo = net.buses[i].v_min - 1.0, hi = net.buses[i].v_max - 1.0;
    if (hi - lo < 1e-12) continue;  // voltage pinned; sq_v capped at 0
    for (double c : detail::pwl_centers(lo, hi, cfg.pwl_segments))
      lp.add_row(Cmp::ge, -2.0 * c - c * c,
                 {{vars.sq_v[i], 1.0}, {vars.v[i], -2.0 * c}},
                 "cut_sqv_" + std::to_string(net.buses[i].id));
  }

  for (std::size_t d = 0; d < net.demands.size(); ++d)
    lp.add_row(Cmp::eq, 0.0,
               {{vars.q_d[d], 1.0}, {vars.p_d[d], -net.demands[d].alpha}},
               "qtie_d_" + std::to_string(net.demands[d].id));
  for (std::size_t g = 0; g < net.generators.size(); ++g)
    lp.add_row(Cmp::le, 0.0,
               {{vars.q_g[g], 1.0}, {vars.p_g[g], -net.generators[g].alpha}},
               "qtie_g_" + std::to_string(net.generators[g].id));

  detail::add_balance_rows(net, lp, vars, false);
  detail::add_balance_rows(net, lp, vars, true);

  lp.validate();
  assert(vars.audit(lp));
  return m;
}

inline OpfModel build_opf(const Network& net, Model model,
                          const AttackVector* attack,
                          const LacConfig& cfg = {}) {
  return model == Model::dc ? build_dc(net, attack, cfg)
                            : build_lac(net, attack, cfg);
}

}  // namespace gridint
