#pragma once

// Grid JSON and time-series CSV ingestion. Power quantities may arrive in
// physical units (MW/MVar/MVA) when the file says `"units": "physical"`;
// everything is stored per-unit on base_mva.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridint/network.hpp"

namespace gridint {

namespace detail {

inline double num_field(const nlohmann::json& j, const char* key,
                        const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_number())
    throw InputError(InputError::Kind::parse,
                     ctx + ": missing or non-numeric field '" + key + "'");
  return j[key].get<double>();
}

inline int int_field(const nlohmann::json& j, const char* key,
                     const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw InputError(InputError::Kind::parse,
                     ctx + ": missing or non-integer field '" + key + "'");
  return j[key].get<int>();
}

}  // namespace detail

inline Network parse_network(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(InputError::Kind::parse,
                     std::string("grid file is not valid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw InputError(InputError::Kind::parse, "grid file root must be an object");
  Network net;
  net.name = j.value("name", std::string());
  if (!j.contains("base_mva") || !j["base_mva"].is_number())
    throw InputError(InputError::Kind::parse, "missing numeric base_mva");
  net.base_mva = j["base_mva"].get<double>();
  const std::string units = j.value("units", std::string("per_unit"));
  if (units != "per_unit" && units != "physical")
    throw InputError(InputError::Kind::parse,
                     "units must be 'per_unit' or 'physical'");
  const double pscale =
      units == "physical" && net.base_mva > 0.0 ? 1.0 / net.base_mva : 1.0;
  for (const char* key : {"buses", "branches", "generators", "demands"})
    if (!j.contains(key) || !j[key].is_array())
      throw InputError(InputError::Kind::parse,
                       std::string("missing array '") + key + "'");
  for (const auto& e : j["buses"]) {
    Bus bus;
    bus.id = detail::int_field(e, "id", "bus");
    const std::string ctx = "bus " + std::to_string(bus.id);
    bus.v_min = detail::num_field(e, "v_min", ctx);
    bus.v_max = detail::num_field(e, "v_max", ctx);
    net.buses.push_back(bus);
  }
  for (const auto& e : j["branches"]) {
    Branch br;
    br.id = detail::int_field(e, "id", "branch");
    const std::string ctx = "branch " + std::to_string(br.id);
    br.from_bus = detail::int_field(e, "from_bus", ctx);
    br.to_bus = detail::int_field(e, "to_bus", ctx);
    br.g = detail::num_field(e, "g", ctx);
    br.b = detail::num_field(e, "b", ctx);
    br.b_shunt = e.contains("b_shunt") ? detail::num_field(e, "b_shunt", ctx) : 0.0;
    br.s_max = detail::num_field(e, "s_max", ctx) * pscale;
    br.attackable = e.value("attackable", true);
    net.branches.push_back(br);
  }
  for (const auto& e : j["generators"]) {
    Generator gen;
    gen.id = detail::int_field(e, "id", "generator");
    const std::string ctx = "generator " + std::to_string(gen.id);
    gen.bus = detail::int_field(e, "bus", ctx);
    gen.p_max = detail::num_field(e, "p_max", ctx) * pscale;
    gen.q_min = detail::num_field(e, "q_min", ctx) * pscale;
    gen.q_max = detail::num_field(e, "q_max", ctx) * pscale;
    gen.alpha = detail::num_field(e, "alpha", ctx);
    net.generators.push_back(gen);
  }
  for (const auto& e : j["demands"]) {
    Demand dem;
    dem.id = detail::int_field(e, "id", "demand");
    const std::string ctx = "demand " + std::to_string(dem.id);
    dem.bus = detail::int_field(e, "bus", ctx);
    dem.p_base = detail::num_field(e, "p_base", ctx) * pscale;
    dem.alpha = detail::num_field(e, "alpha", ctx);
    net.demands.push_back(dem);
  }
  net.finalize();
  return net;
}

inline Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw InputError(InputError::Kind::io, "cannot open grid file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_network(buf.str());
}

/// Serializes in the per-unit schema; parse_network(save_network(n)) == n.
inline std::string save_network(const Network& net) {
  nlohmann::ordered_json j;
  j["name"] = net.name;
  j["base_mva"] = net.base_mva;
  j["units"] = "per_unit";
  j["buses"] = nlohmann::ordered_json::array();
  for (const auto& bus : net.buses)
    j["buses"].push_back({{"id", bus.id}, {"v_min", bus.v_min}, {"v_max", bus.v_max}});
  j["branches"] = nlohmann::ordered_json::array();
  for (const auto& br : net.branches)
    j["branches"].push_back({{"id", br.id},
                             {"from_bus", br.from_bus},
                             {"to_bus", br.to_bus},
                             {"g", br.g},
                             {"b", br.b},
                             {"b_shunt", br.b_shunt},
                             {"s_max", br.s_max},
                             {"attackable", br.attackable}});
  j["generators"] = nlohmann::ordered_json::array();
  for (const auto& gen : net.generators)
    j["generators"].push_back({{"id", gen.id},
                               {"bus", gen.bus},
                               {"p_max", gen.p_max},
                               {"q_min", gen.q_min},
                               {"q_max", gen.q_max},
                               {"alpha", gen.alpha}});
  j["demands"] = nlohmann::ordered_json::array();
  for (const auto& dem : net.demands)
    j["demands"].push_back({{"id", dem.id},
                            {"bus", dem.bus},
                            {"p_base", dem.p_base},
                            {"alpha", dem.alpha}});
  return j.dump(2) + "\n";
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    const auto a = s.find_first_not_of(" \t");
    const auto b = s.find_last_not_of(" \t");
    s = a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  }
  return out;
}

}  // namespace detail

/// One LoadCase per data row; t assigned in file order starting at 1.
/// Columns: `t`, then `d_<id>` / `g_<id>` multipliers. Ids must exist in the
/// network; demands or generators without a column keep multiplier 1.
inline std::vector<LoadCase> parse_timeseries(const std::string& text,
                                              const Network& net) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw InputError(InputError::Kind::parse, "time series file is empty");
  const auto header = detail::split_csv_line(line);
  if (header.empty() || header[0] != "t")
    throw InputError(InputError::Kind::parse,
                     "time series header must start with column 't'");
  struct Col {
    bool is_demand;
    int id;
  };
  std::vector<Col> cols;
  std::map<int, int> dem_ids, gen_ids;
  for (const auto& d : net.demands) dem_ids[d.id] = 1;
  for (const auto& g : net.generators) gen_ids[g.id] = 1;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string& h = header[c];
    if (h.size() < 3 || (h[0] != 'd' && h[0] != 'g') || h[1] != '_')
      throw InputError(InputError::Kind::parse,
                       "unrecognized time series column '" + h + "'");
    int id = 0;
    try {
      id = std::stoi(h.substr(2));
    } catch (...) {
      throw InputError(InputError::Kind::parse,
                       "unrecognized time series column '" + h + "'");
    }
    const bool is_demand = h[0] == 'd';
    if (is_demand && !dem_ids.count(id))
      throw InputError(InputError::Kind::validation,
                       "column '" + h + "' names an unknown demand id");
    if (!is_demand && !gen_ids.count(id))
      throw InputError(InputError::Kind::validation,
                       "column '" + h + "' names an unknown generator id");
    cols.push_back({is_demand, id});
  }
  std::vector<LoadCase> cases;
  int t = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw InputError(InputError::Kind::parse,
                       "row " + std::to_string(t + 1) + ": expected " +
                           std::to_string(header.size()) + " cells, got " +
                           std::to_string(cells.size()));
    LoadCase lc;
    lc.timestep = ++t;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(cells[c], &used);
        if (used != cells[c].size()) throw std::invalid_argument("trailing");
      } catch (...) {
        throw InputError(InputError::Kind::parse,
                         "row " + std::to_string(t) + ": bad number '" +
                             cells[c] + "'");
      }
      if (v < 0.0)
        throw InputError(InputError::Kind::validation,
                         "row " + std::to_string(t) +
                             ": negative multiplier in column '" +
                             header[c] + "'");
      auto& dst = cols[c - 1].is_demand ? lc.demand_scale : lc.gen_scale;
      dst[cols[c - 1].id] = v;
    }
    cases.push_back(std::move(lc));
  }
  if (cases.empty())
    throw InputError(InputError::Kind::parse, "time series has no data rows");
  return cases;
}

inline std::vector<LoadCase> load_timeseries(const std::string& path,
                                             const Network& net) {
  std::ifstream in(path);
  if (!in)
    throw InputError(InputError::Kind::io,
                     "cannot open time series file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_timeseries(buf.str(), net);
}

}  // namespace gridint
