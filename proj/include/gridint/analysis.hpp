#pragma once

// Cross-formulation comparison of ranked CAV lists, and scoring of attack
// vectors across time steps. Pure aggregation over lists that were produced
// elsewhere; nothing in this header runs a solver.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridint/cav.hpp"

namespace gridint {

// ---------------------------------------------------------------------------
// Comparison of two ranked lists for the same grid, time step, and budget.

struct ComparisonEntry {
  int rank = 0;  // position in the reference list
  AttackVector attack;
  double zeta_pu = 0.0;  // reference objective for this entry
  double zeta_mw = 0.0;
  bool detected = false;  // the same attack appears in the baseline list
  int matched_rank = 0;   // its rank there; 0 when undetected
  double matched_zeta_pu = 0.0;
  double matched_zeta_mw = 0.0;
  // reference minus baseline objective; present iff detected
  std::optional<double> delta_abs_pu;
  std::optional<double> delta_abs_mw;
  // delta_abs / reference objective; absent when the reference value is zero
  std::optional<double> delta_rel;
};

struct ComparisonReport {
  int timestep = 0;
  int budget = 0;
  std::string reference;  // approach whose entries are walked ("lac")
  std::string baseline;   // approach searched for matches ("dc")
  std::vector<ComparisonEntry> entries;

  int undetected = 0;             // entries with no baseline match
  double undetected_share = 0.0;  // undetected / list size; 0 for empty list

  // The two bar heights of a per-time-step detection chart: objective mass
  // the baseline misses entirely, and the signed gap on shared entries.
  double undetected_mw = 0.0;
  double underestimated_mw = 0.0;

  // Averages whose divisor is the full reference list size; entries without
  // a value contribute zero to the numerator.
  double psi_abs_pu = 0.0;
  double psi_abs_mw = 0.0;
  double psi_rel = 0.0;
  // Same sums divided by the number of contributing entries instead; absent
  // when nothing contributed.
  std::optional<double> psi_abs_detected_pu;
  std::optional<double> psi_abs_detected_mw;
  std::optional<double> psi_rel_detected;

  std::vector<std::string> warnings;
};

namespace detail {

// Below this the objective counts as zero and relative gaps are undefined.
constexpr double kZetaEps = 1e-12;

/// Structural checks every consumed list must pass: ranks count 1..N in
/// order, metadata is uniform, and no attack appears twice.
inline void check_ranked_list(const CavList& list, const std::string& what) {
  std::map<AttackVector, int> seen;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const CavEntry& e = list[i];
    if (e.rank != static_cast<int>(i) + 1)
      throw InputError(InputError::Kind::validation,
                       what + ": ranks must run 1.." +
                           std::to_string(list.size()) + " in order (entry " +
                           std::to_string(i + 1) + " has rank " +
                           std::to_string(e.rank) + ")");
    if (e.timestep != list[0].timestep || e.approach != list[0].approach ||
        e.budget != list[0].budget)
      throw InputError(InputError::Kind::validation,
                       what + ": entries mix time steps, approaches, or "
                              "budgets within one list");
    auto [it, fresh] = seen.emplace(e.attack, e.rank);
    if (!fresh)
      throw InputError(InputError::Kind::validation,
                       what + ": attack " + e.attack.key() +
                           " appears at ranks " + std::to_string(it->second) +
                           " and " + std::to_string(e.rank));
  }
}

}  // namespace detail

/// Walks the reference list and looks each attack up in the baseline list.
/// Detected entries get objective gaps; the rest are counted as undetected.
/// Both lists must describe the same time step and budget.
inline ComparisonReport compare_formulations(const CavList& reference,
                                             const CavList& baseline) {
  detail::check_ranked_list(reference, "reference list");
  detail::check_ranked_list(baseline, "baseline list");
  if (!reference.empty() && !baseline.empty()) {
    if (reference[0].timestep != baseline[0].timestep)
      throw InputError(InputError::Kind::validation,
                       "comparison inputs are from different time steps (" +
                           std::to_string(reference[0].timestep) + " vs " +
                           std::to_string(baseline[0].timestep) + ")");
    if (reference[0].budget != baseline[0].budget)
      throw InputError(InputError::Kind::validation,
                       "comparison inputs use different budgets (" +
                           std::to_string(reference[0].budget) + " vs " +
                           std::to_string(baseline[0].budget) + ")");
  }

  ComparisonReport rep;
  if (!reference.empty()) {
    rep.timestep = reference[0].timestep;
    rep.budget = reference[0].budget;
    rep.reference = reference[0].approach;
  }
  if (!baseline.empty()) {
    rep.baseline = baseline[0].approach;
    if (reference.empty()) {
      rep.timestep = baseline[0].timestep;
      rep.budget = baseline[0].budget;
    }
  }

  std::map<AttackVector, const CavEntry*> by_attack;
  for (const CavEntry& e : baseline) by_attack.emplace(e.attack, &e);

  double sum_abs_pu = 0.0, sum_abs_mw = 0.0, sum_rel = 0.0;
  int n_detected = 0, n_rel = 0;
  for (const CavEntry& e : reference) {
    ComparisonEntry c;
    c.rank = e.rank;
    c.attack = e.attack;
    c.zeta_pu = e.zeta_pu;
    c.zeta_mw = e.zeta_mw;
    const auto it = by_attack.find(e.attack);
    if (it == by_attack.end()) {
      ++rep.undetected;
      rep.undetected_mw += e.zeta_mw;
    } else {
      const CavEntry& m = *it->second;
      c.detected = true;
      c.matched_rank = m.rank;
      c.matched_zeta_pu = m.zeta_pu;
      c.matched_zeta_mw = m.zeta_mw;
      c.delta_abs_pu = e.zeta_pu - m.zeta_pu;
      c.delta_abs_mw = e.zeta_mw - m.zeta_mw;
      sum_abs_pu += *c.delta_abs_pu;
      sum_abs_mw += *c.delta_abs_mw;
      rep.underestimated_mw += *c.delta_abs_mw;
      ++n_detected;
      if (std::abs(e.zeta_pu) < detail::kZetaEps) {
        rep.warnings.push_back(
            "entry " + std::to_string(e.rank) + " (attack " + e.attack.key() +
            "): zero objective, relative gap undefined and left out of the "
            "relative average");
      } else {
        c.delta_rel = *c.delta_abs_pu / e.zeta_pu;
        sum_rel += *c.delta_rel;
        ++n_rel;
      }
    }
    rep.entries.push_back(std::move(c));
  }

  const double n = static_cast<double>(reference.size());
  if (!reference.empty()) {
    rep.undetected_share = rep.undetected / n;
    rep.psi_abs_pu = sum_abs_pu / n;
    rep.psi_abs_mw = sum_abs_mw / n;
    rep.psi_rel = sum_rel / n;
  }
  if (n_detected > 0) {
    rep.psi_abs_detected_pu = sum_abs_pu / n_detected;
    rep.psi_abs_detected_mw = sum_abs_mw / n_detected;
  }
  if (n_rel > 0) rep.psi_rel_detected = sum_rel / n_rel;
  return rep;
}

// ---------------------------------------------------------------------------
// Scoring of attacks across many time steps at one budget and approach.

struct ScoreRow {
  AttackVector attack;
  int count = 0;           // time steps where the attack appears
  long long rank_sum = 0;  // sum of its ranks there
  double zeta_sum_pu = 0.0;
  double zeta_sum_mw = 0.0;
  // rank_sum * T / count^2: average rank scaled by inverse frequency,
  // lower is better
  double phi_rank = 0.0;
  // (zeta_sum / count) * (count / T): mean objective over all T steps,
  // higher is better
  double phi_obj_pu = 0.0;
  double phi_obj_mw = 0.0;
};

struct ScoreTable {
  int timesteps = 0;  // T
  std::string approach;
  int budget = 0;
  std::vector<ScoreRow> rows;      // attack ids ascending
  std::vector<int> by_rank_score;  // row indices, phi_rank ascending
  std::vector<int> by_objective;   // row indices, phi_obj descending
};

/// Aggregates one ranked list per time step into per-attack scores. Lists
/// may be empty (a step with no positive-shed attacks) but must agree on
/// approach and budget, and no time step may appear twice.
inline ScoreTable score_across_timesteps(const std::vector<CavList>& lists) {
  if (lists.empty())
    throw InputError(InputError::Kind::validation,
                     "scoring needs at least one time step");
  const CavList* first = nullptr;
  std::map<int, std::size_t> steps_seen;
  for (std::size_t t = 0; t < lists.size(); ++t) {
    detail::check_ranked_list(lists[t], "list " + std::to_string(t + 1));
    if (lists[t].empty()) continue;
    const auto [it, fresh] = steps_seen.emplace(lists[t][0].timestep, t);
    if (!fresh)
      throw InputError(InputError::Kind::validation,
                       "time step " + std::to_string(lists[t][0].timestep) +
                           " appears in lists " + std::to_string(it->second + 1) +
                           " and " + std::to_string(t + 1));
    if (!first) {
      first = &lists[t];
    } else if (lists[t][0].approach != (*first)[0].approach ||
               lists[t][0].budget != (*first)[0].budget) {
      throw InputError(InputError::Kind::validation,
                       "scoring inputs mix approaches or budgets");
    }
  }

  ScoreTable table;
  table.timesteps = static_cast<int>(lists.size());
  if (first) {
    table.approach = (*first)[0].approach;
    table.budget = (*first)[0].budget;
  }

  // Contributions are keyed by time step and summed in time-step order, so
  // the result is identical no matter how the input lists were arranged.
  struct Hit {
    int timestep;
    int rank;
    double zeta_pu, zeta_mw;
  };
  std::map<AttackVector, std::vector<Hit>> hits;
  for (const CavList& list : lists)
    for (const CavEntry& e : list)
      hits[e.attack].push_back({e.timestep, e.rank, e.zeta_pu, e.zeta_mw});

  const double t_count = static_cast<double>(table.timesteps);
  for (auto& [attack, contributions] : hits) {
    std::sort(contributions.begin(), contributions.end(),
              [](const Hit& a, const Hit& b) { return a.timestep < b.timestep; });
    ScoreRow row;
    row.attack = attack;
    for (const Hit& h : contributions) {
      row.count += 1;
      row.rank_sum += h.rank;
      row.zeta_sum_pu += h.zeta_pu;
      row.zeta_sum_mw += h.zeta_mw;
    }
    const double c = static_cast<double>(row.count);
    row.phi_rank = static_cast<double>(row.rank_sum) * t_count / (c * c);
    row.phi_obj_pu = (row.zeta_sum_pu / c) * (c / t_count);
    row.phi_obj_mw = (row.zeta_sum_mw / c) * (c / t_count);
    table.rows.push_back(std::move(row));
  }

  table.by_rank_score.resize(table.rows.size());
  table.by_objective.resize(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    table.by_rank_score[i] = table.by_objective[i] = static_cast<int>(i);
  const auto& rows = table.rows;
  std::sort(table.by_rank_score.begin(), table.by_rank_score.end(),
            [&rows](int a, int b) {
              if (rows[a].phi_rank != rows[b].phi_rank)
                return rows[a].phi_rank < rows[b].phi_rank;
              return rows[a].attack < rows[b].attack;
            });
  std::sort(table.by_objective.begin(), table.by_objective.end(),
            [&rows](int a, int b) {
              if (rows[a].phi_obj_pu != rows[b].phi_obj_pu)
                return rows[a].phi_obj_pu > rows[b].phi_obj_pu;
              return rows[a].attack < rows[b].attack;
            });
  return table;
}

// ---------------------------------------------------------------------------
// Serialization: JSON for the full reports, CSV shaped for charts.

namespace detail {

inline nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline std::string csv_num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const ComparisonReport& rep) {
  nlohmann::ordered_json j;
  j["t"] = rep.timestep;
  j["budget"] = rep.budget;
  j["reference"] = rep.reference;
  j["baseline"] = rep.baseline;
  j["entries"] = nlohmann::ordered_json::array();
  for (const ComparisonEntry& e : rep.entries) {
    nlohmann::ordered_json je;
    je["n"] = e.rank;
    je["attack"] = e.attack.ids;
    je["zeta_pu"] = e.zeta_pu;
    je["zeta_mw"] = e.zeta_mw;
    je["detected"] = e.detected;
    if (e.detected) {
      je["m"] = e.matched_rank;
      je["matched_zeta_pu"] = e.matched_zeta_pu;
      je["matched_zeta_mw"] = e.matched_zeta_mw;
    } else {
      je["m"] = nullptr;
      je["matched_zeta_pu"] = nullptr;
      je["matched_zeta_mw"] = nullptr;
    }
    je["delta_abs_pu"] = detail::opt_json(e.delta_abs_pu);
    je["delta_abs_mw"] = detail::opt_json(e.delta_abs_mw);
    je["delta_rel"] = detail::opt_json(e.delta_rel);
    j["entries"].push_back(std::move(je));
  }
  j["undetected"] = rep.undetected;
  j["undetected_share"] = rep.undetected_share;
  j["undetected_mw"] = rep.undetected_mw;
  j["underestimated_mw"] = rep.underestimated_mw;
  // Contract for the averages below: missing values count as zero and the
  // divisor is the full reference list size.
  j["psi_convention"] = "zero-filled over the full reference list";
  j["psi_abs_pu"] = rep.psi_abs_pu;
  j["psi_abs_mw"] = rep.psi_abs_mw;
  j["psi_rel"] = rep.psi_rel;
  j["psi_abs_detected_pu"] = detail::opt_json(rep.psi_abs_detected_pu);
  j["psi_abs_detected_mw"] = detail::opt_json(rep.psi_abs_detected_mw);
  j["psi_rel_detected"] = detail::opt_json(rep.psi_rel_detected);
  j["warnings"] = rep.warnings;
  return j;
}

inline nlohmann::ordered_json to_json(const ScoreTable& table) {
  nlohmann::ordered_json j;
  j["timesteps"] = table.timesteps;
  j["a"] = table.approach;
  j["budget"] = table.budget;
  j["rows"] = nlohmann::ordered_json::array();
  for (const ScoreRow& r : table.rows) {
    nlohmann::ordered_json jr;
    jr["attack"] = r.attack.ids;
    jr["count"] = r.count;
    jr["rank_sum"] = r.rank_sum;
    jr["zeta_sum_pu"] = r.zeta_sum_pu;
    jr["zeta_sum_mw"] = r.zeta_sum_mw;
    jr["phi_rank"] = r.phi_rank;
    jr["phi_obj_pu"] = r.phi_obj_pu;
    jr["phi_obj_mw"] = r.phi_obj_mw;
    j["rows"].push_back(std::move(jr));
  }
  auto keys = [&table](const std::vector<int>& order) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (int i : order) arr.push_back(table.rows[i].attack.key());
    return arr;
  };
  j["by_rank_score"] = keys(table.by_rank_score);
  j["by_objective"] = keys(table.by_objective);
  return j;
}

/// One row per compared time step: objective mass the baseline never found,
/// the signed gap on shared entries, and how many entries it missed.
inline std::string detection_csv(const std::vector<ComparisonReport>& reports) {
  std::ostringstream os;
  os << "t,undetected_mw,underestimated_mw,undetected_count\n";
  for (const ComparisonReport& r : reports)
    os << r.timestep << "," << detail::csv_num(r.undetected_mw) << ","
       << detail::csv_num(r.underestimated_mw) << "," << r.undetected << "\n";
  return os.str();
}

/// Top rows by objective score, with the rank score alongside so a chart
/// can color by it.
inline std::string score_csv(const ScoreTable& table, int top_k = 10) {
  std::ostringstream os;
  os << "position,attack,phi_obj_mw,phi_obj_pu,phi_rank,count,rank_sum,"
        "zeta_sum_mw\n";
  const int k = std::min<int>(top_k, static_cast<int>(table.by_objective.size()));
  for (int i = 0; i < k; ++i) {
    const ScoreRow& r = table.rows[table.by_objective[i]];
    os << i + 1 << "," << r.attack.key() << ","
       << detail::csv_num(r.phi_obj_mw) << "," << detail::csv_num(r.phi_obj_pu)
       << "," << detail::csv_num(r.phi_rank) << "," << r.count << ","
       << r.rank_sum << "," << detail::csv_num(r.zeta_sum_mw) << "\n";
  }
  return os.str();
}

}  // namespace gridint
