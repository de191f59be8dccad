#pragma once

// Worst-case attack solving and ranked CAV enumeration. Each MIP incumbent
// is cross-checked against a fresh fixed-attack dispatch LP, so a bad big-M
// or duality row cannot silently corrupt a reported objective.
//
// Enumeration collects equal-value solutions into a plateau before
// committing them: within a plateau only exact-pattern cuts are added, so
// every tied attack (including supersets of tied attacks) is still
// discoverable. When the value strictly drops the plateau is closed: entries
// are ordered by canonical key, filtered by subset domination, and each kept
// sub-budget attack gets a superset cut for the remaining search.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridint/interdiction_mip.hpp"
#include "gridint/simplex.hpp"

namespace gridint {

struct EnumLimits {
  int max_solutions = 50;  // N: keep enumerating at least this many
  double threshold = 0.5;  // phi: ... and further while zeta >= phi * zeta_1
};

enum class StopReason { exhausted, count_limit, threshold };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::exhausted: return "exhausted";
    case StopReason::count_limit: return "count_limit";
    default: return "threshold";
  }
}

struct CavListResult {
  CavList entries;
  StopReason reason = StopReason::exhausted;
};

namespace detail {

constexpr double kZeroShed = 1e-9;  // below this an attack does nothing
constexpr double kTieTol = 1e-7;    // plateau width for equal-value attacks

/// Fixed-attack re-solve; the independent number a MIP answer must match.
inline double fixed_attack_shed(const Network& net, Model model,
                                const AttackVector& atk, const LacConfig& cfg) {
  OpfModel m = build_opf(net, model, atk.empty() ? nullptr : &atk, cfg);
  const LpSolution s = solve_lp(m.lp);
  if (s.status != LpStatus::optimal)
    throw std::runtime_error("fixed-attack dispatch LP did not solve");
  return s.objective;
}

/// Returns the dispatch LP's shed, which downstream ranking uses verbatim:
/// brute force ranks from the same function, so near-ties order identically.
inline double check_incumbent(const Network& net, Model model,
                              const InterdictionModel& im, const MipResult& res,
                              const AttackVector& atk, double zeta,
                              const LacConfig& cfg) {
  const InterdictionAudit audit = audit_interdiction(im, res.x);
  if (!audit.ok())
    throw std::runtime_error(
        "interdiction big-M audit failed on attack {" + atk.key() + "}");
  const double ref = fixed_attack_shed(net, model, atk, cfg);
  if (std::abs(ref - zeta) > 5e-6 * std::max(1.0, std::abs(ref)))
    throw std::runtime_error("MIP shed " + std::to_string(zeta) +
                             " disagrees with dispatch LP " +
                             std::to_string(ref) + " on attack {" +
                             atk.key() + "}");
  return ref;
}

inline void add_exact_cut(LinearProgram& lp, const InterdictionModel& im,
                          const Network& net, const AttackVector& atk) {
  std::vector<std::pair<int, double>> terms;
  int outside = 0;
  for (std::size_t ai = 0; ai < im.attackable.size(); ++ai) {
    const int id = net.branches[im.attackable[ai]].id;
    if (atk.contains(id)) {
      terms.emplace_back(im.z_cols[ai], 1.0);
    } else {
      terms.emplace_back(im.z_cols[ai], -1.0);
      ++outside;
    }
  }
  lp.add_row(Cmp::ge, 1.0 - outside, terms, "cut_exact_" + atk.key());
}

inline void add_superset_cut(LinearProgram& lp, const InterdictionModel& im,
                             const Network& net, const AttackVector& atk) {
  std::vector<std::pair<int, double>> terms;  // one attacked branch survives
  for (std::size_t ai = 0; ai < im.attackable.size(); ++ai)
    if (atk.contains(net.branches[im.attackable[ai]].id))
      terms.emplace_back(im.z_cols[ai], 1.0);
  lp.add_row(Cmp::ge, 1.0, terms, "cut_super_" + atk.key());
}

struct RankedHit {
  AttackVector attack;
  double zeta = 0.0;
  double gap = 0.0;
};

/// Shared tail of enumeration and brute force: sort by (value desc, key
/// asc), drop anything with a kept proper subset, number the survivors.
inline CavList rank_and_filter(std::vector<RankedHit> hits, const Network& net,
                               Model model, int budget) {
  std::sort(hits.begin(), hits.end(), [](const RankedHit& a, const RankedHit& b) {
    if (a.zeta != b.zeta) return a.zeta > b.zeta;
    return a.attack < b.attack;
  });
  CavList out;
  std::vector<const AttackVector*> kept;
  for (const RankedHit& h : hits) {
    bool dominated = false;
    for (const AttackVector* s : kept)
      if (s->size() < h.attack.size() && s->subset_of(h.attack)) {
        dominated = true;
        break;
      }
    if (dominated) continue;
    kept.push_back(&h.attack);
    CavEntry e;
    e.approach = to_string(model);
    e.budget = budget;
    e.rank = static_cast<int>(out.size()) + 1;
    e.attack = h.attack;
    e.zeta_pu = h.zeta;
    e.zeta_mw = h.zeta * net.base_mva;
    e.gap = h.gap;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace detail

/// Rank-1 worst case at the given budget. Throws on solver breakdown or a
/// failed audit; a node-limited solve is reported through a nonzero gap.
inline CavEntry solve_worst_case(const Network& net, Model model, int budget,
                                 const LacConfig& cfg = {},
                                 const MipOptions& mip_opt = {}) {
  const InterdictionModel im = build_interdiction_mip(net, model, budget, cfg);
  const MipResult res = solve_mip(im.milp, im.z_cols, mip_opt);
  if (!res.has_incumbent)
    throw std::runtime_error("worst-case MIP found no incumbent: " +
                             std::string(to_string(res.status)));
  const AttackVector atk = attack_from_solution(im, net, res.x);
  const double zeta =
      detail::check_incumbent(net, model, im, res, atk, -res.objective, cfg);

  CavEntry e;
  e.approach = to_string(model);
  e.budget = budget;
  e.rank = 1;
  e.attack = atk;
  e.zeta_pu = zeta;
  e.zeta_mw = zeta * net.base_mva;
  e.gap = res.rel_gap();
  return e;
}

/// Ranked CAV list. Stops once `max_solutions` entries exist and the next
/// value falls under threshold * zeta_1 (count_limit when the Nth entry
/// itself is already under, threshold when a later candidate drops under),
/// or when the MIP runs out of positive-shed attacks.
inline CavListResult enumerate_cavs(const Network& net, Model model,
                                    int budget, const EnumLimits& limits = {},
                                    const LacConfig& cfg = {},
                                    const MipOptions& mip_opt = {}) {
  if (limits.max_solutions < 1)
    throw InputError(InputError::Kind::validation, "max_solutions must be >= 1");
  if (limits.threshold < 0.0 || limits.threshold > 1.0)
    throw InputError(InputError::Kind::validation, "threshold must be in [0,1]");

  const InterdictionModel im = build_interdiction_mip(net, model, budget, cfg);
  LinearProgram work = im.milp;

  CavListResult out;
  std::vector<detail::RankedHit> plateau;
  double plateau_value = 0.0;
  double first_value = -1.0;

  // Each cut invalidates one optimum, not the whole basis: reusing the last
  // root basis turns every re-solve after the first into a short repair.
  SimplexBasis root_seed;
  MipOptions iter_opt = mip_opt;

  auto close_plateau = [&]() {
    if (plateau.empty()) return;
    CavList ranked =
        detail::rank_and_filter(std::move(plateau), net, model, budget);
    plateau.clear();
    for (CavEntry& e : ranked) {
      // Cross-plateau domination is already impossible: every earlier kept
      // sub-budget attack has a superset cut in `work`.
      if (e.attack.size() < static_cast<std::size_t>(budget))
        detail::add_superset_cut(work, im, net, e.attack);
      e.rank = static_cast<int>(out.entries.size()) + 1;
      out.entries.push_back(std::move(e));
    }
  };

  while (true) {
    iter_opt.root_basis = root_seed.state.empty() ? nullptr : &root_seed;
    const MipResult res = solve_mip(work, im.z_cols, iter_opt);
    if (!res.root_basis.state.empty()) root_seed = res.root_basis;
    if (res.status == MipStatus::infeasible) {
      close_plateau();
      out.reason = StopReason::exhausted;
      break;
    }
    if (!res.has_incumbent)
      throw std::runtime_error("enumeration MIP found no incumbent: " +
                               std::string(to_string(res.status)));
    const AttackVector atk = attack_from_solution(im, net, res.x);
    const double zeta =
        detail::check_incumbent(net, model, im, res, atk, -res.objective, cfg);

    // An empty attack (possible once every damaging pattern is cut, on a
    // grid that sheds at baseline) is not a CAV either. Finding nothing
    // damaging at all reads as a threshold stop; running dry after real
    // entries reads as exhaustion.
    if (zeta <= detail::kZeroShed || atk.empty()) {
      close_plateau();
      out.reason = out.entries.empty() ? StopReason::threshold
                                       : StopReason::exhausted;
      break;
    }

    if (!plateau.empty() && zeta < plateau_value - detail::kTieTol) {
      close_plateau();
      const int n = limits.max_solutions;
      const int have = static_cast<int>(out.entries.size());
      if (have >= n &&
          out.entries[n - 1].zeta_pu < limits.threshold * first_value) {
        out.reason = StopReason::count_limit;
        break;
      }
      if (have >= n && zeta < limits.threshold * first_value) {
        out.reason = StopReason::threshold;
        break;
      }
    }
    if (first_value < 0.0) first_value = zeta;
    if (plateau.empty()) plateau_value = zeta;
    plateau.push_back({atk, zeta, res.rel_gap()});
    detail::add_exact_cut(work, im, net, atk);
  }
  return out;
}

/// Oracle twin of enumerate_cavs: fixed-attack LP solves over every attack
/// set up to the budget, then the same ranking and exclusion filter.
inline CavListResult brute_force_cavs(const Network& net, Model model,
                                      int budget, const LacConfig& cfg = {}) {
  std::vector<int> ids;
  for (const Branch& br : net.branches)
    if (br.attackable) ids.push_back(br.id);
  std::sort(ids.begin(), ids.end());

  const int n = static_cast<int>(ids.size());
  const int depth = std::min(budget, n);
  std::uint64_t count = 0, binom = 1;
  for (int k = 1; k <= depth; ++k) {
    binom = binom * static_cast<std::uint64_t>(n - k + 1) / k;
    count += binom;
    if (count > 20000)
      throw InputError(InputError::Kind::validation,
                       "brute force guard exceeded (over 20000 attack sets)");
  }

  std::vector<detail::RankedHit> hits;
  std::vector<int> pick;
  auto recurse = [&](auto&& self, int start) -> void {
    if (!pick.empty()) {
      AttackVector atk = AttackVector::of(pick);
      const double zeta = detail::fixed_attack_shed(net, model, atk, cfg);
      if (zeta > detail::kZeroShed) hits.push_back({std::move(atk), zeta, 0.0});
    }
    if (static_cast<int>(pick.size()) == depth) return;
    for (int i = start; i < n; ++i) {
      pick.push_back(ids[i]);
      self(self, i + 1);
      pick.pop_back();
    }
  };
  recurse(recurse, 0);

  CavListResult out;
  const bool any = !hits.empty();
  out.entries = detail::rank_and_filter(std::move(hits), net, model, budget);
  out.reason = any ? StopReason::exhausted : StopReason::threshold;
  return out;
}

}  // namespace gridint
