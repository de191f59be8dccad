#pragma once

// Grid data model. Branch records are undirected as ingested; finalize()
// expands each into the ordered arc pair sharing one attack variable and
// checks every structural invariant.

#include <cmath>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridint {

struct InputError : std::runtime_error {
  enum class Kind { io, parse, validation, connectivity };
  Kind kind;
  InputError(Kind k, const std::string& msg)
      : std::runtime_error(msg), kind(k) {}
};

struct Bus {
  int id = 0;
  double v_min = 0.0, v_max = 0.0;
};

struct Branch {
  int id = 0;
  int from_bus = 0, to_bus = 0;
  double g = 0.0, b = 0.0, b_shunt = 0.0, s_max = 0.0;
  bool attackable = true;
};

struct Generator {
  int id = 0;
  int bus = 0;
  double p_max = 0.0, q_min = 0.0, q_max = 0.0, alpha = 0.0;
};

struct Demand {
  int id = 0;
  int bus = 0;
  double p_base = 0.0, alpha = 0.0;
};

/// Directed expansion of one undirected branch; `branch` indexes the shared
/// record (and its attack variable), bus fields are internal positions.
struct Arc {
  int branch = 0;
  int from = 0, to = 0;
  bool forward = true;
};

struct LoadCase {
  int timestep = 0;
  std::map<int, double> demand_scale;  // by external id; absent means 1.0
  std::map<int, double> gen_scale;

  double demand(int id) const {
    auto it = demand_scale.find(id);
    return it == demand_scale.end() ? 1.0 : it->second;
  }
  double gen(int id) const {
    auto it = gen_scale.find(id);
    return it == gen_scale.end() ? 1.0 : it->second;
  }
};

struct Network {
  std::string name;
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;
  std::vector<Demand> demands;

  // Built by finalize(); positions follow file order.
  std::vector<Arc> arcs;  // 2k = forward of branch k, 2k+1 = reverse
  std::map<int, int> bus_index;
  std::map<int, int> branch_index;

  int bus_pos(int id) const {
    auto it = bus_index.find(id);
    if (it == bus_index.end())
      throw InputError(InputError::Kind::validation,
                       "unknown bus id " + std::to_string(id));
    return it->second;
  }

  double total_demand() const {
    double s = 0.0;
    for (const auto& d : demands) s += d.p_base;
    return s;
  }

  void finalize() {
    auto fail = [](const std::string& msg) {
      throw InputError(InputError::Kind::validation, msg);
    };
    if (!(base_mva > 0.0)) fail("base_mva must be positive");
    if (buses.empty()) fail("no buses");
    if (generators.empty()) fail("at least one generator required");
    bus_index.clear();
    branch_index.clear();
    for (std::size_t k = 0; k < buses.size(); ++k) {
      const Bus& bus = buses[k];
      if (!bus_index.emplace(bus.id, static_cast<int>(k)).second)
        fail("duplicate bus id " + std::to_string(bus.id));
      if (!(bus.v_min > 0.0) || !(bus.v_min <= bus.v_max))
        fail("bus " + std::to_string(bus.id) + ": need 0 < v_min <= v_max");
    }
    std::map<int, int> gen_ids, dem_ids;
    arcs.clear();
    for (std::size_t k = 0; k < branches.size(); ++k) {
      const Branch& br = branches[k];
      if (!branch_index.emplace(br.id, static_cast<int>(k)).second)
        fail("duplicate branch id " + std::to_string(br.id));
      if (br.from_bus == br.to_bus)
        fail("branch " + std::to_string(br.id) + ": from_bus equals to_bus");
      const int i = bus_pos(br.from_bus);
      const int j = bus_pos(br.to_bus);
      if (!(br.s_max > 0.0))
        fail("branch " + std::to_string(br.id) + ": s_max must be positive");
      if (br.b == 0.0)
        fail("branch " + std::to_string(br.id) + ": b must be nonzero");
      if (!std::isfinite(br.g) || !std::isfinite(br.b) ||
          !std::isfinite(br.b_shunt) || !std::isfinite(br.s_max))
        fail("branch " + std::to_string(br.id) + ": non-finite value");
      arcs.push_back({static_cast<int>(k), i, j, true});
      arcs.push_back({static_cast<int>(k), j, i, false});
    }
    for (std::size_t k = 0; k < generators.size(); ++k) {
      const Generator& gen = generators[k];
      if (!gen_ids.emplace(gen.id, static_cast<int>(k)).second)
        fail("duplicate generator id " + std::to_string(gen.id));
      bus_pos(gen.bus);
      if (gen.p_max < 0.0)
        fail("generator " + std::to_string(gen.id) + ": p_max negative");
      if (gen.q_min > gen.q_max)
        fail("generator " + std::to_string(gen.id) + ": q_min > q_max");
    }
    for (std::size_t k = 0; k < demands.size(); ++k) {
      const Demand& dem = demands[k];
      if (!dem_ids.emplace(dem.id, static_cast<int>(k)).second)
        fail("duplicate demand id " + std::to_string(dem.id));
      bus_pos(dem.bus);
      if (dem.p_base < 0.0)
        fail("demand " + std::to_string(dem.id) + ": p_base negative");
    }
    // Connectivity with every branch in service.
    std::vector<char> seen(buses.size(), 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    std::size_t reached = 1;
    while (!frontier.empty()) {
      const int at = frontier.front();
      frontier.pop();
      for (const Arc& a : arcs) {
        if (a.from == at && !seen[a.to]) {
          seen[a.to] = 1;
          ++reached;
          frontier.push(a.to);
        }
      }
    }
    if (reached != buses.size())
      throw InputError(InputError::Kind::connectivity,
                       "grid is disconnected with all branches in service");
  }
};

/// Snapshot with effective limits: P_d scaled per demand, P̄_g per generator.
inline Network apply_case(const Network& net, const LoadCase& lc) {
  Network out = net;
  for (auto& d : out.demands) {
    const double s = lc.demand(d.id);
    if (s < 0.0)
      throw InputError(InputError::Kind::validation,
                       "negative demand multiplier for id " + std::to_string(d.id));
    d.p_base *= s;
  }
  for (auto& g : out.generators) {
    const double s = lc.gen(g.id);
    if (s < 0.0)
      throw InputError(InputError::Kind::validation,
                       "negative generator multiplier for id " + std::to_string(g.id));
    g.p_max *= s;
  }
  return out;
}

}  // namespace gridint
