#pragma once

// Dense linear-program container shared by the OPF builders, the simplex
// solver and the branch-and-bound. Minimization sense throughout.

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gridint {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Cmp : std::uint8_t { le, eq, ge };

inline const char* to_string(Cmp c) {
  switch (c) {
    case Cmp::le: return "<=";
    case Cmp::eq: return "=";
    case Cmp::ge: return ">=";
  }
  return "?";
}

struct LpRow {
  std::vector<double> coeffs;  // dense, length == variable count
  Cmp cmp = Cmp::eq;
  double rhs = 0.0;
  std::string label;
};

/// Minimize objective . x + objective_offset subject to rows and bounds.
struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;
  double objective_offset = 0.0;
  std::vector<LpRow> rows;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::string> var_labels;

  int add_var(std::string label, double lo, double hi, double cost = 0.0) {
    var_labels.push_back(std::move(label));
    lower.push_back(lo);
    upper.push_back(hi);
    objective.push_back(cost);
    // Columns may arrive after rows (the interdiction builder appends its
    // attack and dual machinery to a finished dispatch model).
    for (LpRow& row : rows) row.coeffs.push_back(0.0);
    return num_vars++;
  }

  LpRow& add_row(Cmp cmp, double rhs,
                 const std::vector<std::pair<int, double>>& terms,
                 std::string label) {
    LpRow row;
    row.coeffs.assign(static_cast<std::size_t>(num_vars), 0.0);
    for (const auto& [col, coeff] : terms) {
      if (col < 0 || col >= num_vars)
        throw std::invalid_argument("row '" + label + "': column out of range");
      row.coeffs[static_cast<std::size_t>(col)] += coeff;
    }
    row.cmp = cmp;
    row.rhs = rhs;
    row.label = std::move(label);
    rows.push_back(std::move(row));
    return rows.back();
  }

  void validate() const {
    const auto n = static_cast<std::size_t>(num_vars);
    if (objective.size() != n || lower.size() != n || upper.size() != n ||
        var_labels.size() != n)
      throw std::invalid_argument("LinearProgram: inconsistent column arrays");
    for (std::size_t j = 0; j < n; ++j) {
      if (std::isnan(lower[j]) || std::isnan(upper[j]) ||
          !(lower[j] <= upper[j]))
        throw std::invalid_argument("LinearProgram: bad bounds on variable '" +
                                    var_labels[j] + "'");
      if (!std::isfinite(objective[j]))
        throw std::invalid_argument("LinearProgram: non-finite objective");
    }
    for (const auto& row : rows) {
      if (row.coeffs.size() != n)
        throw std::invalid_argument("LinearProgram: row '" + row.label +
                                    "' length mismatch");
      if (!std::isfinite(row.rhs))
        throw std::invalid_argument("LinearProgram: row '" + row.label +
                                    "' has non-finite rhs");
      for (double a : row.coeffs)
        if (!std::isfinite(a))
          throw std::invalid_argument("LinearProgram: row '" + row.label +
                                      "' has non-finite coefficient");
    }
  }

  /// Human-readable text form, one constraint per line. Used by the CLI
  /// model-dump flag for differential testing against external solvers.
  std::string dump() const {
    std::ostringstream os;
    os.precision(17);
    os << "min";
    bool first = true;
    for (int j = 0; j < num_vars; ++j) {
      if (objective[static_cast<std::size_t>(j)] == 0.0) continue;
      os << (first ? " " : " + ") << objective[static_cast<std::size_t>(j)]
         << " " << var_labels[static_cast<std::size_t>(j)];
      first = false;
    }
    if (objective_offset != 0.0) os << (first ? " " : " + ") << objective_offset;
    if (first && objective_offset == 0.0) os << " 0";
    os << "\n";
    for (const auto& row : rows) {
      os << row.label << ":";
      bool any = false;
      for (int j = 0; j < num_vars; ++j) {
        const double a = row.coeffs[static_cast<std::size_t>(j)];
        if (a == 0.0) continue;
        os << (any ? " + " : " ") << a << " "
           << var_labels[static_cast<std::size_t>(j)];
        any = true;
      }
      if (!any) os << " 0";
      os << " " << to_string(row.cmp) << " " << row.rhs << "\n";
    }
    for (int j = 0; j < num_vars; ++j) {
      os << var_labels[static_cast<std::size_t>(j)] << " in ["
         << lower[static_cast<std::size_t>(j)] << ", "
         << upper[static_cast<std::size_t>(j)] << "]\n";
    }
    return os.str();
  }
};

enum class LpStatus : std::uint8_t { optimal, infeasible, unbounded, breakdown };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::breakdown: return "breakdown";
  }
  return "?";
}

/// Snapshot of a simplex basis: one state per structural column followed by
/// one per row slack. Reusable as a warm start for any problem of identical
/// shape (same variable and row counts), e.g. after bound changes.
struct SimplexBasis {
  enum class State : std::uint8_t { basic, at_lower, at_upper, free_zero };
  std::vector<State> state;
};

/// Row duals follow the convention of a minimization primal: y >= 0 on >=
/// rows, y <= 0 on <= rows, free on = rows, so that for every optimal solve
/// c.x == b.y + sum over bound-tight variables of their reduced-cost terms.
struct LpSolution {
  LpStatus status = LpStatus::breakdown;
  double objective = 0.0;  // includes objective_offset
  std::vector<double> primal;
  std::vector<double> row_duals;
  std::vector<double> reduced_costs;
  SimplexBasis basis;
  long iterations = 0;
  // Self-check magnitudes recorded at termination (optimal status only).
  double max_primal_infeasibility = 0.0;
  double duality_gap = 0.0;
  double max_cs_violation = 0.0;

  std::string dump() const {
    std::ostringstream os;
    os.precision(17);
    os << to_string(status) << " obj=" << objective << " iters=" << iterations
       << "\n";
    for (double v : primal) os << v << " ";
    os << "\n";
    for (double v : row_duals) os << v << " ";
    os << "\n";
    for (double v : reduced_costs) os << v << " ";
    os << "\n";
    return os.str();
  }
};

}  // namespace gridint
