// LP solver checks. The two oracles here are deliberately independent of the
// simplex code path: one enumerates basic feasible solutions of the
// standard-form system, the other enumerates active sets of boxed problems.

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <optional>
#include <random>
#include <vector>

#include "gridint/lp.hpp"
#include "gridint/simplex.hpp"

using namespace gridint;

namespace {

struct OracleResult {
  bool feasible = false;
  double objective = 0.0;
};

// Vertex enumeration for LPs whose variables are all x >= 0 with no upper
// bounds. Rows are turned into equalities with one slack/surplus column each
// (none for '='), giving A'x' = b, x' >= 0. Every vertex of a nonempty set of
// this form is a basic solution, so scanning all column bases is exhaustive.
// Requires full row rank; returns nullopt otherwise so the caller can skip.
std::optional<OracleResult> vertex_oracle(const LinearProgram& lp) {
  const int m = static_cast<int>(lp.rows.size());
  const int n = lp.num_vars;
  for (int j = 0; j < n; ++j) {
    REQUIRE(lp.lower[j] == 0.0);
    REQUIRE(lp.upper[j] == kInf);
  }
  int slacks = 0;
  for (const auto& row : lp.rows)
    if (row.cmp != Cmp::eq) ++slacks;
  const int ncols = n + slacks;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, ncols);
  Eigen::VectorXd b(m);
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(ncols);
  for (int j = 0; j < n; ++j) cost(j) = lp.objective[j];
  int next_slack = n;
  for (int i = 0; i < m; ++i) {
    const auto& row = lp.rows[i];
    for (int j = 0; j < n; ++j) A(i, j) = row.coeffs[j];
    b(i) = row.rhs;
    if (row.cmp == Cmp::le) A(i, next_slack++) = 1.0;
    else if (row.cmp == Cmp::ge) A(i, next_slack++) = -1.0;
  }
  if (Eigen::FullPivLU<Eigen::MatrixXd>(A).rank() < m) return std::nullopt;

  bool any = false;
  double best = kInf;
  std::vector<int> pick(m);
  // Iterative enumeration of all m-subsets of columns.
  for (int i = 0; i < m; ++i) pick[i] = i;
  Eigen::MatrixXd B(m, m);
  Eigen::VectorXd xb(m);
  while (true) {
    for (int i = 0; i < m; ++i) B.col(i) = A.col(pick[i]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (lu.rank() == m) {
      xb = lu.solve(b);
      bool ok = true;
      for (int i = 0; i < m; ++i)
        if (xb(i) < -1e-9) { ok = false; break; }
      if (ok) {
        any = true;
        double obj = lp.objective_offset;
        for (int i = 0; i < m; ++i) obj += cost(pick[i]) * xb(i);
        best = std::min(best, obj);
      }
    }
    int k = m - 1;
    while (k >= 0 && pick[k] == ncols - m + k) --k;
    if (k < 0) break;
    ++pick[k];
    for (int i = k + 1; i < m; ++i) pick[i] = pick[i - 1] + 1;
  }
  return OracleResult{any, best};
}

// Active-set enumeration for fully boxed LPs in few dimensions. A vertex is a
// point where n linearly independent constraints (rows taken at equality, or
// variable bounds) hold with equality and everything else is satisfied.
// Boxes make the feasible set bounded, so nonempty implies a vertex exists.
std::optional<OracleResult> active_set_oracle(const LinearProgram& lp) {
  const int n = lp.num_vars;
  REQUIRE(n <= 4);
  for (int j = 0; j < n; ++j) {
    REQUIRE(std::isfinite(lp.lower[j]));
    REQUIRE(std::isfinite(lp.upper[j]));
  }
  struct Con {
    Eigen::RowVectorXd a;
    double rhs;
  };
  std::vector<Con> cons;
  for (const auto& row : lp.rows) {
    Con c;
    c.a = Eigen::RowVectorXd::Zero(n);
    for (int j = 0; j < n; ++j) c.a(j) = row.coeffs[j];
    c.rhs = row.rhs;
    cons.push_back(c);
  }
  for (int j = 0; j < n; ++j) {
    Con lo, hi;
    lo.a = Eigen::RowVectorXd::Zero(n);
    lo.a(j) = 1.0;
    lo.rhs = lp.lower[j];
    hi.a = Eigen::RowVectorXd::Zero(n);
    hi.a(j) = 1.0;
    hi.rhs = lp.upper[j];
    cons.push_back(lo);
    cons.push_back(hi);
  }
  const int total = static_cast<int>(cons.size());
  bool any = false;
  double best = kInf;
  std::vector<int> pick(n);
  for (int i = 0; i < n; ++i) pick[i] = i;
  while (true) {
    Eigen::MatrixXd M(n, n);
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) {
      M.row(i) = cons[pick[i]].a;
      r(i) = cons[pick[i]].rhs;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (lu.rank() == n) {
      Eigen::VectorXd x = lu.solve(r);
      bool ok = true;
      for (std::size_t ri = 0; ri < lp.rows.size() && ok; ++ri) {
        double act = 0.0;
        for (int j = 0; j < n; ++j) act += lp.rows[ri].coeffs[j] * x(j);
        const double d = act - lp.rows[ri].rhs;
        switch (lp.rows[ri].cmp) {
          case Cmp::le: ok = d <= 1e-9; break;
          case Cmp::ge: ok = d >= -1e-9; break;
          case Cmp::eq: ok = std::abs(d) <= 1e-9; break;
        }
      }
      for (int j = 0; j < n && ok; ++j)
        ok = x(j) >= lp.lower[j] - 1e-9 && x(j) <= lp.upper[j] + 1e-9;
      if (ok) {
        any = true;
        double obj = lp.objective_offset;
        for (int j = 0; j < n; ++j) obj += lp.objective[j] * x(j);
        best = std::min(best, obj);
      }
    }
    int k = n - 1;
    while (k >= 0 && pick[k] == total - n + k) --k;
    if (k < 0) break;
    ++pick[k];
    for (int i = k + 1; i < n; ++i) pick[i] = pick[i - 1] + 1;
  }
  return OracleResult{any, best};
}

LinearProgram random_nonneg_lp(std::mt19937& rng) {
  LinearProgram lp;
  std::uniform_int_distribution<int> coef(-4, 4);
  std::uniform_real_distribution<double> cost(-5.0, 5.0);
  std::uniform_real_distribution<double> rhs(-2.0, 10.0);
  std::uniform_int_distribution<int> cmp_pick(0, 3);
  for (int j = 0; j < 6; ++j)
    lp.add_var("x" + std::to_string(j), 0.0, kInf, cost(rng));
  for (int i = 0; i < 7; ++i) {
    std::vector<std::pair<int, double>> terms;
    for (int j = 0; j < 6; ++j) {
      const int a = coef(rng);
      if (a != 0) terms.push_back({j, static_cast<double>(a)});
    }
    if (terms.empty()) terms.push_back({0, 1.0});
    const int c = cmp_pick(rng);
    const Cmp cmp = c <= 1 ? Cmp::le : (c == 2 ? Cmp::ge : Cmp::eq);
    lp.add_row(cmp, rhs(rng), terms, "r" + std::to_string(i));
  }
  // Keeps every instance bounded so the vertex minimum equals the optimum.
  std::vector<std::pair<int, double>> all;
  for (int j = 0; j < 6; ++j) all.push_back({j, 1.0});
  lp.add_row(Cmp::le, 30.0, all, "cap");
  return lp;
}

LinearProgram random_boxed_lp(std::mt19937& rng) {
  LinearProgram lp;
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_real_distribution<double> cost(-4.0, 4.0);
  std::uniform_real_distribution<double> rhs(-4.0, 6.0);
  std::uniform_real_distribution<double> width(0.5, 5.0);
  std::uniform_real_distribution<double> lo(-3.0, 1.0);
  std::uniform_int_distribution<int> cmp_pick(0, 3);
  for (int j = 0; j < 3; ++j) {
    const double l = lo(rng);
    lp.add_var("x" + std::to_string(j), l, l + width(rng), cost(rng));
  }
  for (int i = 0; i < 3; ++i) {
    std::vector<std::pair<int, double>> terms;
    for (int j = 0; j < 3; ++j) {
      const int a = coef(rng);
      if (a != 0) terms.push_back({j, static_cast<double>(a)});
    }
    if (terms.empty()) terms.push_back({i, 1.0});
    const int c = cmp_pick(rng);
    const Cmp cmp = c <= 1 ? Cmp::le : (c == 2 ? Cmp::ge : Cmp::eq);
    lp.add_row(cmp, rhs(rng), terms, "r" + std::to_string(i));
  }
  return lp;
}

void check_reported_duals(const LinearProgram& lp, const LpSolution& sol) {
  // Reconstructs the dual objective from reported duals and reduced costs
  // and compares with the primal value. Independent of the solver's own
  // recorded gap field.
  double dual_obj = lp.objective_offset;
  for (std::size_t i = 0; i < lp.rows.size(); ++i)
    dual_obj += sol.row_duals[i] * lp.rows[i].rhs;
  for (int j = 0; j < lp.num_vars; ++j) {
    const double d = sol.reduced_costs[j];
    if (d > 0.0 && std::isfinite(lp.lower[j]))
      dual_obj += d * lp.lower[j];
    else if (d < 0.0 && std::isfinite(lp.upper[j]))
      dual_obj += d * lp.upper[j];
  }
  REQUIRE(std::abs(dual_obj - sol.objective) <=
          1e-6 * (1.0 + std::abs(sol.objective)));
  // Dual feasibility: reduced cost must match c - A^T y exactly, and row
  // duals must be sign-correct for their row type.
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    if (lp.rows[i].cmp == Cmp::le) REQUIRE(sol.row_duals[i] <= 1e-7);
    if (lp.rows[i].cmp == Cmp::ge) REQUIRE(sol.row_duals[i] >= -1e-7);
  }
  for (int j = 0; j < lp.num_vars; ++j) {
    double d = lp.objective[j];
    for (std::size_t i = 0; i < lp.rows.size(); ++i)
      d -= sol.row_duals[i] * lp.rows[i].coeffs[j];
    REQUIRE(std::abs(d - sol.reduced_costs[j]) <= 1e-6 * (1.0 + std::abs(d)));
  }
}

}  // namespace

TEST_CASE("random nonnegative LPs match the vertex-enumeration oracle") {
  std::mt19937 rng(20240517);
  int feasible_seen = 0, infeasible_seen = 0, skipped = 0;
  for (int t = 0; t < 200; ++t) {
    LinearProgram lp = random_nonneg_lp(rng);
    lp.validate();
    auto oracle = vertex_oracle(lp);
    if (!oracle) {
      ++skipped;
      continue;
    }
    INFO("instance " << t);
    LpSolution sol = solve_lp(lp);
    if (oracle->feasible) {
      ++feasible_seen;
      REQUIRE(sol.status == LpStatus::optimal);
      REQUIRE(std::abs(sol.objective - oracle->objective) <=
              1e-6 * (1.0 + std::abs(oracle->objective)));
      check_reported_duals(lp, sol);
    } else {
      ++infeasible_seen;
      REQUIRE(sol.status == LpStatus::infeasible);
    }
  }
  // The generator must exercise both outcomes or the test proves little.
  REQUIRE(feasible_seen >= 20);
  REQUIRE(infeasible_seen >= 20);
  REQUIRE(skipped <= 20);
}

TEST_CASE("random boxed LPs match the active-set oracle") {
  std::mt19937 rng(77812);
  int feasible_seen = 0, infeasible_seen = 0;
  for (int t = 0; t < 300; ++t) {
    LinearProgram lp = random_boxed_lp(rng);
    lp.validate();
    auto oracle = active_set_oracle(lp);
    REQUIRE(oracle.has_value());
    INFO("instance " << t);
    LpSolution sol = solve_lp(lp);
    if (oracle->feasible) {
      ++feasible_seen;
      REQUIRE(sol.status == LpStatus::optimal);
      REQUIRE(std::abs(sol.objective - oracle->objective) <=
              1e-6 * (1.0 + std::abs(oracle->objective)));
      check_reported_duals(lp, sol);
    } else {
      ++infeasible_seen;
      REQUIRE(sol.status == LpStatus::infeasible);
    }
  }
  REQUIRE(feasible_seen >= 40);
  REQUIRE(infeasible_seen >= 40);
}

TEST_CASE("hand-checked small LPs") {
  SECTION("two variables, one cap") {
    LinearProgram lp;
    lp.add_var("x", 0.0, kInf, -1.0);
    lp.add_var("y", 0.0, kInf, -1.0);
    lp.add_row(Cmp::le, 1.0, {{0, 1.0}, {1, 1.0}}, "cap");
    LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    REQUIRE_THAT(sol.objective, Catch::Matchers::WithinAbs(-1.0, 1e-9));
    check_reported_duals(lp, sol);
  }
  SECTION("free variable pushed by a >= row") {
    LinearProgram lp;
    lp.add_var("x", -kInf, kInf, 1.0);
    lp.add_row(Cmp::ge, -3.0, {{0, 1.0}}, "floor");
    LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    REQUIRE_THAT(sol.objective, Catch::Matchers::WithinAbs(-3.0, 1e-9));
    REQUIRE_THAT(sol.row_duals[0], Catch::Matchers::WithinAbs(1.0, 1e-7));
  }
  SECTION("equality-only square system") {
    LinearProgram lp;
    lp.add_var("x", -kInf, kInf, 2.0);
    lp.add_var("y", -kInf, kInf, -1.0);
    lp.add_row(Cmp::eq, 5.0, {{0, 1.0}, {1, 1.0}}, "sum");
    lp.add_row(Cmp::eq, 1.0, {{0, 1.0}, {1, -1.0}}, "diff");
    LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    REQUIRE_THAT(sol.primal[0], Catch::Matchers::WithinAbs(3.0, 1e-8));
    REQUIRE_THAT(sol.primal[1], Catch::Matchers::WithinAbs(2.0, 1e-8));
    REQUIRE_THAT(sol.objective, Catch::Matchers::WithinAbs(4.0, 1e-8));
  }
  SECTION("fixed variable inside a row") {
    LinearProgram lp;
    lp.add_var("x", 2.0, 2.0, 0.0);
    lp.add_var("y", 0.0, kInf, 1.0);
    lp.add_row(Cmp::ge, 5.0, {{0, 1.0}, {1, 1.0}}, "need");
    LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    REQUIRE_THAT(sol.objective, Catch::Matchers::WithinAbs(3.0, 1e-9));
  }
  SECTION("objective offset is carried through") {
    LinearProgram lp;
    lp.add_var("x", 0.0, 1.0, 1.0);
    lp.objective_offset = 7.5;
    LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    REQUIRE_THAT(sol.objective, Catch::Matchers::WithinAbs(7.5, 1e-9));
  }
}

TEST_CASE("status classification") {
  SECTION("unbounded, no rows") {
    LinearProgram lp;
    lp.add_var("x", 0.0, kInf, -1.0);
    REQUIRE(solve_lp(lp).status == LpStatus::unbounded);
  }
  SECTION("unbounded free variable, zero rows do not bound it") {
    LinearProgram lp;
    lp.add_var("x", -kInf, kInf, 1.0);
    lp.add_var("y", 0.0, 1.0, 0.0);
    lp.add_row(Cmp::le, 1.0, {{1, 1.0}}, "ycap");
    REQUIRE(solve_lp(lp).status == LpStatus::unbounded);
  }
  SECTION("unbounded along a row null direction") {
    LinearProgram lp;
    lp.add_var("x", 0.0, kInf, -1.0);
    lp.add_var("y", 0.0, kInf, 0.0);
    lp.add_row(Cmp::le, 2.0, {{0, 1.0}, {1, -1.0}}, "gap");
    REQUIRE(solve_lp(lp).status == LpStatus::unbounded);
  }
  SECTION("infeasible by bounds against a row") {
    LinearProgram lp;
    lp.add_var("x", 0.0, 1.0, 0.0);
    lp.add_row(Cmp::ge, 2.0, {{0, 1.0}}, "need2");
    REQUIRE(solve_lp(lp).status == LpStatus::infeasible);
  }
  SECTION("infeasible pair of rows") {
    LinearProgram lp;
    lp.add_var("x", 0.0, kInf, 1.0);
    lp.add_var("y", 0.0, kInf, 1.0);
    lp.add_row(Cmp::ge, 4.0, {{0, 1.0}, {1, 1.0}}, "hi");
    lp.add_row(Cmp::le, 2.0, {{0, 1.0}, {1, 1.0}}, "lo");
    REQUIRE(solve_lp(lp).status == LpStatus::infeasible);
  }
  SECTION("no rows, boxed") {
    LinearProgram lp;
    lp.add_var("x", -2.0, 5.0, 1.0);
    lp.add_var("y", -2.0, 5.0, -1.0);
    lp.add_var("z", -kInf, kInf, 0.0);
    LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    REQUIRE_THAT(sol.objective, Catch::Matchers::WithinAbs(-7.0, 1e-9));
  }
}

TEST_CASE("degenerate problems still terminate") {
  // Classic cycling-prone instance (Beale). Dantzig pricing alone can cycle;
  // the fallback rule must ensure finite termination at the optimum -0.05.
  LinearProgram lp;
  lp.add_var("x1", 0.0, kInf, -0.75);
  lp.add_var("x2", 0.0, kInf, 150.0);
  lp.add_var("x3", 0.0, kInf, -0.02);
  lp.add_var("x4", 0.0, kInf, 6.0);
  lp.add_row(Cmp::le, 0.0, {{0, 0.25}, {1, -60.0}, {2, -0.04}, {3, 9.0}}, "r1");
  lp.add_row(Cmp::le, 0.0, {{0, 0.5}, {1, -90.0}, {2, -0.02}, {3, 3.0}}, "r2");
  lp.add_row(Cmp::le, 1.0, {{2, 1.0}}, "r3");
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::optimal);
  REQUIRE_THAT(sol.objective, Catch::Matchers::WithinAbs(-0.05, 1e-9));
}

TEST_CASE("self-check fields are populated on optimal solves") {
  std::mt19937 rng(99);
  for (int t = 0; t < 50; ++t) {
    LinearProgram lp = random_boxed_lp(rng);
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal) continue;
    REQUIRE(sol.max_primal_infeasibility <= 1e-8);
    REQUIRE(sol.duality_gap <= 1e-7 * (1.0 + std::abs(sol.objective)));
    REQUIRE(sol.max_cs_violation <= 1e-7 * (1.0 + std::abs(sol.objective)));
  }
}

TEST_CASE("repeat solves are bit-identical") {
  std::mt19937 rng(4242);
  LinearProgram lp = random_nonneg_lp(rng);
  LpSolution a = solve_lp(lp);
  LpSolution b = solve_lp(lp);
  REQUIRE(a.status == b.status);
  REQUIRE(a.iterations == b.iterations);
  REQUIRE(std::memcmp(&a.objective, &b.objective, sizeof(double)) == 0);
  REQUIRE(a.primal == b.primal);
  REQUIRE(a.row_duals == b.row_duals);
}

TEST_CASE("warm start from a previous basis reaches the same optimum") {
  std::mt19937 rng(5150);
  for (int t = 0; t < 40; ++t) {
    LinearProgram lp = random_boxed_lp(rng);
    LpSolution cold = solve_lp(lp);
    if (cold.status != LpStatus::optimal) continue;
    // Perturb one variable's bounds, solve cold and warm; results must agree.
    LinearProgram mod = lp;
    const int j = t % mod.num_vars;
    mod.upper[j] = mod.lower[j] + 0.5 * (mod.upper[j] - mod.lower[j]);
    LpSolution cold2 = solve_lp(mod);
    LpSolution warm = solve_lp(mod, &cold.basis);
    REQUIRE(cold2.status == warm.status);
    if (cold2.status == LpStatus::optimal) {
      REQUIRE(std::abs(cold2.objective - warm.objective) <=
              1e-6 * (1.0 + std::abs(cold2.objective)));
      check_reported_duals(mod, warm);
    }
  }
}
