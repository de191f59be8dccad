#pragma once

// Exact-AC residual audit for a dispatch produced by one of the linear
// models. Flows are recomputed from the full trigonometric branch equations
// at the dispatch's voltages and angles; balance is re-summed from the
// dispatch's own flows. Shunt susceptance is held at zero to match the
// solve-time models.

#include <algorithm>
#include <cmath>
#include <vector>

#include "gridint/cav.hpp"
#include "gridint/network.hpp"
#include "gridint/opf.hpp"

namespace gridint {

struct AcResidualReport {
  double max_flow_p = 0.0;     // |p_a - exact p(v, th)| over intact arcs
  double max_flow_q = 0.0;
  double max_balance_p = 0.0;  // |sum inflows - sum outflows| per bus
  double max_balance_q = 0.0;
  double max_destroyed = 0.0;  // flow magnitude left on destroyed arcs

  double max_abs() const {
    return std::max({max_flow_p, max_flow_q, max_balance_p, max_balance_q,
                     max_destroyed});
  }
};

inline AcResidualReport evaluate_ac_feasible(const Network& net,
                                             const AttackVector* attack,
                                             const OpfModel& m,
                                             const std::vector<double>& x) {
  const auto gone = detail::destroyed_mask(net, attack);
  const OpfVariables& vars = m.vars;
  const bool lac = m.model == Model::lac;

  auto val = [&](const std::vector<int>& cols, std::size_t i,
                 double fallback) {
    return cols.empty() ? fallback : x.at(cols[i]);
  };
  auto v_of = [&](int bus) { return lac ? x.at(vars.v[bus]) : 1.0; };

  AcResidualReport r;
  std::vector<double> bal_p(net.buses.size(), 0.0);
  std::vector<double> bal_q(net.buses.size(), 0.0);

  for (std::size_t a = 0; a < net.arcs.size(); ++a) {
    const Arc& arc = net.arcs[a];
    const double pa = x.at(vars.flow_p[a]);
    const double qa = val(vars.flow_q, a, 0.0);
    bal_p[arc.from] -= pa;
    bal_q[arc.from] -= qa;
    if (gone[arc.branch]) {
      r.max_destroyed = std::max({r.max_destroyed, std::abs(pa), std::abs(qa)});
      continue;
    }
    const Branch& br = net.branches[arc.branch];
    const double vi = v_of(arc.from), vj = v_of(arc.to);
    const double dth = x.at(vars.theta[arc.from]) - x.at(vars.theta[arc.to]);
    const double pex =
        br.g * vi * vi - vi * vj * (br.g * std::cos(dth) + br.b * std::sin(dth));
    const double qex =
        -br.b * vi * vi - vi * vj * (br.g * std::sin(dth) - br.b * std::cos(dth));
    r.max_flow_p = std::max(r.max_flow_p, std::abs(pa - pex));
    r.max_flow_q = std::max(r.max_flow_q, std::abs(qa - qex));
  }

  for (std::size_t g = 0; g < net.generators.size(); ++g) {
    const int i = net.bus_pos(net.generators[g].bus);
    bal_p[i] += x.at(vars.p_g[g]);
    bal_q[i] += val(vars.q_g, g, 0.0);
  }
  for (std::size_t d = 0; d < net.demands.size(); ++d) {
    const int i = net.bus_pos(net.demands[d].bus);
    bal_p[i] -= x.at(vars.p_d[d]);
    bal_q[i] -= val(vars.q_d, d, 0.0);
  }
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    r.max_balance_p = std::max(r.max_balance_p, std::abs(bal_p[i]));
    r.max_balance_q = std::max(r.max_balance_q, std::abs(bal_q[i]));
  }
  return r;
}

}  // namespace gridint
