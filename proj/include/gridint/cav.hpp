#pragma once

// Attack vectors and ranked CAV entries. An AttackVector is the canonical
// sorted set of attacked undirected branch ids; ordering and equality go
// through the sorted id list so ranking ties break deterministically.

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridint/network.hpp"

namespace gridint {

struct AttackVector {
  std::vector<int> ids;  // sorted, unique, external branch ids

  static AttackVector of(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return AttackVector{std::move(v)};
  }

  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }

  bool contains(int id) const {
    return std::binary_search(ids.begin(), ids.end(), id);
  }

  /// True also when equal; pair with size() for proper subset tests.
  bool subset_of(const AttackVector& o) const {
    return std::includes(o.ids.begin(), o.ids.end(), ids.begin(), ids.end());
  }

  std::string key() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) os << "+";
      os << ids[i];
    }
    return os.str();
  }

  bool operator==(const AttackVector&) const = default;
  auto operator<=>(const AttackVector&) const = default;
};

struct CavEntry {
  int timestep = 0;
  std::string approach;  // "dc" or "lac"
  int budget = 0;
  int rank = 0;  // 1-based position in the ranked list
  AttackVector attack;
  double zeta_pu = 0.0;
  double zeta_mw = 0.0;
  double gap = 0.0;  // proven relative optimality gap of the MIP solve
};

using CavList = std::vector<CavEntry>;

inline std::string to_jsonl(const CavEntry& e) {
  nlohmann::ordered_json j;
  j["t"] = e.timestep;
  j["a"] = e.approach;
  j["budget"] = e.budget;
  j["n"] = e.rank;
  j["attack"] = e.attack.ids;
  j["zeta_pu"] = e.zeta_pu;
  j["zeta_mw"] = e.zeta_mw;
  j["gap"] = e.gap;
  return j.dump();
}

inline CavEntry cav_from_json(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(InputError::Kind::parse,
                     std::string("bad CAV line: ") + e.what());
  }
  CavEntry e;
  e.timestep = j.at("t").get<int>();
  e.approach = j.at("a").get<std::string>();
  e.budget = j.at("budget").get<int>();
  e.rank = j.at("n").get<int>();
  e.attack = AttackVector::of(j.at("attack").get<std::vector<int>>());
  e.zeta_pu = j.at("zeta_pu").get<double>();
  e.zeta_mw = j.at("zeta_mw").get<double>();
  e.gap = j.at("gap").get<double>();
  return e;
}

}  // namespace gridint
