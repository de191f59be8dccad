// Comparison and scoring tests. Most fixtures are hand-built lists with
// arithmetic small enough to verify on paper; the reactive toy at the end
// exercises the full pipeline and freezes its exact KPI values.

#include <algorithm>
#include <climits>
#include <cmath>
#include <random>

#include "catch2/catch_amalgamated.hpp"
#include "gridint/analysis.hpp"
#include "gridint/interdiction.hpp"
#include "gridint/network_io.hpp"

using namespace gridint;

namespace {

Network load_grid(const std::string& name) {
  return load_network(std::string(GRIDINT_DATA_DIR) + "/grids/" + name);
}

CavEntry mk(int t, const std::string& a, int budget, int rank,
            std::vector<int> ids, double zeta_pu) {
  CavEntry e;
  e.timestep = t;
  e.approach = a;
  e.budget = budget;
  e.rank = rank;
  e.attack = AttackVector::of(std::move(ids));
  e.zeta_pu = zeta_pu;
  e.zeta_mw = zeta_pu * 100.0;
  return e;
}

const ScoreRow& row_for(const ScoreTable& table, std::vector<int> ids) {
  const AttackVector atk = AttackVector::of(std::move(ids));
  for (const ScoreRow& r : table.rows)
    if (r.attack == atk) return r;
  FAIL("no score row for attack " + atk.key());
  static ScoreRow dummy;
  return dummy;
}

}  // namespace

TEST_CASE("identical lists compare clean", "[analysis]") {
  CavList list;
  list.push_back(mk(3, "lac", 2, 1, {1, 4}, 0.9));
  list.push_back(mk(3, "lac", 2, 2, {2}, 0.6));
  list.push_back(mk(3, "lac", 2, 3, {5}, 0.2));

  const ComparisonReport rep = compare_formulations(list, list);
  CHECK(rep.timestep == 3);
  CHECK(rep.budget == 2);
  CHECK(rep.undetected == 0);
  CHECK(rep.undetected_share == 0.0);
  CHECK(rep.psi_abs_pu == 0.0);
  CHECK(rep.psi_abs_mw == 0.0);
  CHECK(rep.psi_rel == 0.0);
  CHECK(rep.undetected_mw == 0.0);
  CHECK(rep.underestimated_mw == 0.0);
  REQUIRE(rep.entries.size() == 3);
  for (const ComparisonEntry& e : rep.entries) {
    CHECK(e.detected);
    CHECK(e.matched_rank == e.rank);
    CHECK(*e.delta_abs_pu == 0.0);
    CHECK(*e.delta_rel == 0.0);
  }
  CHECK(rep.warnings.empty());
}

TEST_CASE("undetected entries are counted, detected ones get gaps",
          "[analysis]") {
  CavList lac;
  lac.push_back(mk(1, "lac", 2, 1, {1}, 5.0));
  lac.push_back(mk(1, "lac", 2, 2, {2}, 4.0));
  lac.push_back(mk(1, "lac", 2, 3, {3}, 3.0));
  lac.push_back(mk(1, "lac", 2, 4, {4}, 2.0));
  lac.push_back(mk(1, "lac", 2, 5, {5}, 1.0));
  CavList dc;
  dc.push_back(mk(1, "dc", 2, 1, {3}, 2.5));
  dc.push_back(mk(1, "dc", 2, 2, {1}, 2.0));
  dc.push_back(mk(1, "dc", 2, 3, {5}, 1.0));

  const ComparisonReport rep = compare_formulations(lac, dc);
  CHECK(rep.reference == "lac");
  CHECK(rep.baseline == "dc");
  CHECK(rep.undetected == 2);
  CHECK(rep.undetected_share == Catch::Approx(0.4).margin(1e-15));

  REQUIRE(rep.entries.size() == 5);
  CHECK(rep.entries[0].detected);
  CHECK(rep.entries[0].matched_rank == 2);
  CHECK(*rep.entries[0].delta_abs_pu == Catch::Approx(3.0));
  CHECK(*rep.entries[0].delta_rel == Catch::Approx(0.6));
  CHECK_FALSE(rep.entries[1].detected);
  CHECK_FALSE(rep.entries[1].delta_abs_pu.has_value());
  CHECK(rep.entries[2].matched_rank == 1);
  CHECK(*rep.entries[2].delta_abs_pu == Catch::Approx(0.5));
  CHECK(*rep.entries[2].delta_rel == Catch::Approx(0.5 / 3.0));
  CHECK_FALSE(rep.entries[3].detected);
  CHECK(rep.entries[4].matched_rank == 3);
  CHECK(*rep.entries[4].delta_abs_pu == Catch::Approx(0.0).margin(1e-15));

  // Sums over five entries with the two undetected contributing zero.
  CHECK(rep.psi_abs_pu == Catch::Approx(3.5 / 5.0));
  CHECK(rep.psi_abs_mw == Catch::Approx(350.0 / 5.0));
  CHECK(rep.psi_rel == Catch::Approx((0.6 + 0.5 / 3.0) / 5.0));
  CHECK(*rep.psi_abs_detected_pu == Catch::Approx(3.5 / 3.0));
  CHECK(*rep.psi_rel_detected == Catch::Approx((0.6 + 0.5 / 3.0) / 3.0));
  CHECK(rep.undetected_mw == Catch::Approx(600.0));
  CHECK(rep.underestimated_mw == Catch::Approx(350.0));
}

TEST_CASE("detection chart decomposition", "[analysis]") {
  // Five reference entries, two of them invisible to the baseline carrying
  // 15 MW, the other three underestimated by 4 MW in total.
  CavList lac;
  lac.push_back(mk(1, "lac", 2, 1, {1}, 0.30));
  lac.push_back(mk(1, "lac", 2, 2, {2}, 0.08));
  lac.push_back(mk(1, "lac", 2, 3, {3}, 0.20));
  lac.push_back(mk(1, "lac", 2, 4, {4}, 0.07));
  lac.push_back(mk(1, "lac", 2, 5, {5}, 0.10));
  CavList dc;
  dc.push_back(mk(1, "dc", 2, 1, {1}, 0.285));
  dc.push_back(mk(1, "dc", 2, 2, {3}, 0.185));
  dc.push_back(mk(1, "dc", 2, 3, {5}, 0.09));

  const ComparisonReport rep = compare_formulations(lac, dc);
  CHECK(rep.undetected == 2);
  CHECK(rep.undetected_mw == Catch::Approx(15.0).margin(1e-9));
  CHECK(rep.underestimated_mw == Catch::Approx(4.0).margin(1e-9));
  CHECK(rep.psi_abs_mw == Catch::Approx(0.8).margin(1e-9));

  ComparisonReport second = rep;
  second.timestep = 2;
  second.undetected_mw = 7.5;
  second.underestimated_mw = 2.25;
  second.undetected = 1;
  const std::string csv = detection_csv({rep, second});
  CHECK(csv ==
        "t,undetected_mw,underestimated_mw,undetected_count\n"
        "1,15,4,2\n"
        "2,7.5,2.25,1\n");
}

TEST_CASE("zero objective on a detected match", "[analysis]") {
  CavList lac;
  lac.push_back(mk(1, "lac", 1, 1, {1}, 2.0));
  lac.push_back(mk(1, "lac", 1, 2, {2}, 0.0));
  CavList dc;
  dc.push_back(mk(1, "dc", 1, 1, {1}, 1.5));
  dc.push_back(mk(1, "dc", 1, 2, {2}, 0.0));

  const ComparisonReport rep = compare_formulations(lac, dc);
  REQUIRE(rep.entries.size() == 2);
  CHECK(rep.entries[1].detected);
  CHECK(rep.entries[1].delta_abs_pu.has_value());
  CHECK_FALSE(rep.entries[1].delta_rel.has_value());
  REQUIRE(rep.warnings.size() == 1);
  CHECK(rep.warnings[0].find("attack 2") != std::string::npos);

  // The dead entry still divides the as-printed averages but only the live
  // one feeds the relative sums.
  CHECK(rep.psi_abs_pu == Catch::Approx(0.25));
  CHECK(rep.psi_rel == Catch::Approx(0.125));
  CHECK(*rep.psi_rel_detected == Catch::Approx(0.25));
  CHECK(*rep.psi_abs_detected_pu == Catch::Approx(0.25));
}

TEST_CASE("comparison input validation", "[analysis]") {
  CavList ok;
  ok.push_back(mk(1, "lac", 1, 1, {1}, 1.0));

  CavList wrong_step;
  wrong_step.push_back(mk(2, "dc", 1, 1, {1}, 1.0));
  CHECK_THROWS_AS(compare_formulations(ok, wrong_step), InputError);

  CavList wrong_budget;
  wrong_budget.push_back(mk(1, "dc", 3, 1, {1}, 1.0));
  CHECK_THROWS_AS(compare_formulations(ok, wrong_budget), InputError);

  CavList rank_gap;
  rank_gap.push_back(mk(1, "dc", 1, 1, {1}, 1.0));
  rank_gap.push_back(mk(1, "dc", 1, 3, {2}, 0.5));
  CHECK_THROWS_AS(compare_formulations(ok, rank_gap), InputError);

  CavList duplicate;
  duplicate.push_back(mk(1, "dc", 1, 1, {1, 2}, 1.0));
  duplicate.push_back(mk(1, "dc", 1, 2, {2, 1}, 0.5));
  CHECK_THROWS_AS(compare_formulations(ok, duplicate), InputError);

  CavList mixed;
  mixed.push_back(mk(1, "dc", 1, 1, {1}, 1.0));
  mixed.push_back(mk(2, "dc", 1, 2, {2}, 0.5));
  CHECK_THROWS_AS(compare_formulations(ok, mixed), InputError);

  // Empty lists are fine: nothing to compare yields a zeroed report.
  const ComparisonReport rep = compare_formulations({}, {});
  CHECK(rep.entries.empty());
  CHECK(rep.undetected_share == 0.0);
}

TEST_CASE("steady rank three equals sparse rank one", "[analysis]") {
  // One attack sits at rank 3 every step; another takes rank 1 every third
  // step. Their rank scores must agree exactly.
  std::vector<CavList> lists;
  for (int t = 1; t <= 9; ++t) {
    CavList list;
    if (t % 3 == 0) {
      list.push_back(mk(t, "dc", 1, 1, {9}, 3.0));
    } else {
      list.push_back(mk(t, "dc", 1, 1, {4}, 3.0));
    }
    list.push_back(mk(t, "dc", 1, 2, {5}, 2.0));
    list.push_back(mk(t, "dc", 1, 3, {7}, 1.0));
    lists.push_back(std::move(list));
  }

  const ScoreTable table = score_across_timesteps(lists);
  CHECK(table.timesteps == 9);
  const ScoreRow& steady = row_for(table, {7});
  const ScoreRow& sparse = row_for(table, {9});
  CHECK(steady.count == 9);
  CHECK(steady.rank_sum == 27);
  CHECK(steady.phi_rank == 3.0);
  CHECK(sparse.count == 3);
  CHECK(sparse.rank_sum == 3);
  CHECK(sparse.phi_rank == 3.0);
}

TEST_CASE("single occurrence arithmetic", "[analysis]") {
  std::vector<CavList> lists(10);
  lists[0].push_back(mk(1, "dc", 1, 1, {2, 5}, 5.0));

  const ScoreTable table = score_across_timesteps(lists);
  CHECK(table.timesteps == 10);
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0].phi_obj_pu == 0.5);
  CHECK(table.rows[0].phi_rank == 10.0);

  CHECK(score_csv(table) ==
        "position,attack,phi_obj_mw,phi_obj_pu,phi_rank,count,rank_sum,"
        "zeta_sum_mw\n"
        "1,2+5,50,0.5,10,1,1,500\n");
}

TEST_CASE("objective score times T recovers the objective sum", "[analysis]") {
  std::mt19937 rng(20250816);
  for (int trial = 0; trial < 1000; ++trial) {
    const int t_count = 1 + static_cast<int>(rng() % 12);
    std::vector<CavList> lists;
    for (int t = 1; t <= t_count; ++t) {
      std::vector<int> pool{1, 2, 3, 4, 5, 6};
      std::shuffle(pool.begin(), pool.end(), rng);
      const int n = static_cast<int>(rng() % 7);
      std::vector<double> zetas;
      for (int i = 0; i < n; ++i)
        zetas.push_back(std::uniform_real_distribution<>(0.01, 4.0)(rng));
      std::sort(zetas.rbegin(), zetas.rend());
      CavList list;
      for (int i = 0; i < n; ++i)
        list.push_back(mk(t, "dc", 2, i + 1, {pool[i]}, zetas[i]));
      lists.push_back(std::move(list));
    }

    const ScoreTable table = score_across_timesteps(lists);
    for (const ScoreRow& r : table.rows) {
      CHECK(std::abs(r.phi_obj_pu * t_count - r.zeta_sum_pu) <=
            1e-12 * std::max(1.0, std::abs(r.zeta_sum_pu)));
      CHECK(std::abs(r.phi_rank * r.count * r.count -
                     static_cast<double>(r.rank_sum) * t_count) <= 1e-9);
    }

    // Reordering the time steps must not change a byte of the result.
    std::vector<CavList> shuffled = lists;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(to_json(score_across_timesteps(shuffled)).dump() ==
          to_json(table).dump());
  }
}

TEST_CASE("scoring input validation", "[analysis]") {
  CHECK_THROWS_AS(score_across_timesteps({}), InputError);

  CavList a{mk(1, "dc", 1, 1, {1}, 1.0)};
  CavList same_step{mk(1, "dc", 1, 1, {2}, 1.0)};
  CHECK_THROWS_AS(score_across_timesteps({a, same_step}), InputError);

  CavList other_model{mk(2, "lac", 1, 1, {2}, 1.0)};
  CHECK_THROWS_AS(score_across_timesteps({a, other_model}), InputError);

  CavList other_budget{mk(2, "dc", 2, 1, {2}, 1.0)};
  CHECK_THROWS_AS(score_across_timesteps({a, other_budget}), InputError);

  CavList dup;
  dup.push_back(mk(2, "dc", 1, 1, {3}, 1.0));
  dup.push_back(mk(2, "dc", 1, 2, {3}, 0.5));
  CHECK_THROWS_AS(score_across_timesteps({a, dup}), InputError);
}

TEST_CASE("score orderings are deterministic", "[analysis]") {
  std::vector<CavList> lists;
  CavList l1;
  l1.push_back(mk(1, "dc", 1, 1, {3}, 2.0));
  l1.push_back(mk(1, "dc", 1, 2, {1}, 2.0));
  CavList l2;
  l2.push_back(mk(2, "dc", 1, 1, {1}, 2.0));
  l2.push_back(mk(2, "dc", 1, 2, {3}, 2.0));
  lists.push_back(l1);
  lists.push_back(l2);

  const ScoreTable table = score_across_timesteps(lists);
  // Both attacks: count 2, rank sum 3, objective sum 4; every score ties,
  // so the id order decides.
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[table.by_rank_score[0]].attack == AttackVector::of({1}));
  CHECK(table.rows[table.by_rank_score[1]].attack == AttackVector::of({3}));
  CHECK(table.rows[table.by_objective[0]].attack == AttackVector::of({1}));
  CHECK(table.rows[table.by_objective[1]].attack == AttackVector::of({3}));
  CHECK(table.rows[table.by_rank_score[0]].phi_rank ==
        table.rows[table.by_rank_score[1]].phi_rank);
}

TEST_CASE("reactive toy exposes a dc blind spot", "[analysis][blindspot]") {
  const Network net = load_grid("toy6_reactive.json");
  const EnumLimits all{INT_MAX, 0.0};
  const CavListResult dc = enumerate_cavs(net, Model::dc, 1, all);
  const CavListResult lac = enumerate_cavs(net, Model::lac, 1, all);
  CHECK(dc.reason == StopReason::exhausted);
  CHECK(lac.reason == StopReason::exhausted);

  // Every branch cut isolates demand that can be served actively but not
  // reactively, so the dc dispatch only sees the one true power deficit.
  REQUIRE(dc.entries.size() == 1);
  CHECK(dc.entries[0].attack == AttackVector::of({1}));
  CHECK(dc.entries[0].zeta_pu == Catch::Approx(0.4).margin(1e-7));

  REQUIRE(lac.entries.size() == 3);
  CHECK(lac.entries[0].attack == AttackVector::of({1}));
  CHECK(lac.entries[0].zeta_pu == Catch::Approx(0.9).margin(1e-7));
  CHECK(lac.entries[1].attack == AttackVector::of({2}));
  CHECK(lac.entries[1].zeta_pu == Catch::Approx(0.5).margin(1e-7));
  CHECK(lac.entries[2].attack == AttackVector::of({3}));
  CHECK(lac.entries[2].zeta_pu == Catch::Approx(0.5).margin(1e-7));

  const ComparisonReport rep = compare_formulations(lac.entries, dc.entries);
  CHECK(rep.undetected == 2);
  CHECK(rep.undetected_share == Catch::Approx(2.0 / 3.0).margin(1e-12));
  CHECK(rep.psi_abs_pu == Catch::Approx(1.0 / 6.0).margin(1e-7));
  CHECK(rep.psi_rel == Catch::Approx(5.0 / 27.0).margin(1e-7));
  CHECK(rep.undetected_mw == Catch::Approx(100.0).margin(1e-5));
  CHECK(rep.underestimated_mw == Catch::Approx(50.0).margin(1e-5));
  CHECK(rep.warnings.empty());
}
