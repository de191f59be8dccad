#pragma once

// Bounded-variable primal simplex with a composite (artificial-free) phase 1.
// Dense linear algebra throughout; the basis inverse is kept explicitly and
// refreshed periodically. Statuses are conservative: any numerical doubt ends
// in `breakdown`, never in a wrong `optimal`.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gridint/lp.hpp"

namespace gridint {

struct SimplexOptions {
  double tol_dj = 1e-9;          // pricing threshold on reduced costs
  double tol_pivot = 1e-9;       // smallest acceptable pivot magnitude
  double tol_ratio_zero = 1e-11; // |w_i| below this cannot block the step
  double p1_exit = 1e-10;        // phase-1 sum of violations counted as zero
  long max_iters = 0;            // 0: derived from problem size
  int refactor_every = 64;
  int degeneracy_limit = 100;    // consecutive zero steps before anti-stall
  double perturb_eps = 1e-7;     // relative outward bound shift on a plateau
  int perturb_episodes = 3;      // plateaus tolerated before plain Bland
  double check_feas = 1e-8;      // self-check demotion thresholds
  double check_rel = 1e-7;
};

namespace detail {

class SimplexSolver {
  using State = SimplexBasis::State;

 public:
  SimplexSolver(const LinearProgram& lp, const SimplexOptions& opt)
      : lp_(lp), opt_(opt) {
    m_ = static_cast<int>(lp.rows.size());
    n_ = lp.num_vars;
    N_ = n_ + m_;
    b_.resize(m_);
    cost_.setZero(N_);
    lb_.resize(N_);
    ub_.resize(N_);
    for (int j = 0; j < n_; ++j) {
      cost_(j) = lp.objective[j];
      lb_(j) = lp.lower[j];
      ub_(j) = lp.upper[j];
    }
    // Structural columns as nonzero lists; slack columns stay implicit unit
    // vectors. The constraint matrices here are a few nonzeros per row, so
    // every product with A runs over nonzeros instead of a dense m-by-N pass.
    cols_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < m_; ++i) {
      const auto& row = lp_.rows[i];
      for (int j = 0; j < n_; ++j)
        if (row.coeffs[j] != 0.0) cols_[j].emplace_back(i, row.coeffs[j]);
      const int s = n_ + i;
      b_(i) = row.rhs;
      switch (row.cmp) {
        case Cmp::le: lb_(s) = 0.0;   ub_(s) = kInf; break;
        case Cmp::ge: lb_(s) = -kInf; ub_(s) = 0.0;  break;
        case Cmp::eq: lb_(s) = 0.0;   ub_(s) = 0.0;  break;
      }
    }
    max_iters_ = opt.max_iters > 0 ? opt.max_iters
                                   : 20000 + 20L * (m_ + N_);
    b_scale_ = 1.0;
    for (int i = 0; i < m_; ++i) b_scale_ = std::max(b_scale_, std::abs(b_(i)));
    lb0_ = lb_;
    ub0_ = ub_;
  }

  LpSolution run(const SimplexBasis* warm) {
    if (m_ == 0) return solve_unconstrained();
    if (!(warm && adopt_warm(*warm))) cold_start();
    compute_basics();
    for (int round = 0; round < 4; ++round) {
      const Outcome p1 = run_phase(true);
      if (p1 == Outcome::infeasible) return extract(LpStatus::infeasible);
      if (p1 != Outcome::done) return extract(LpStatus::breakdown);
      const Outcome p2 = run_phase(false);
      if (p2 == Outcome::done) return extract_optimal();
      if (p2 == Outcome::unbounded) return extract(LpStatus::unbounded);
      if (p2 != Outcome::lost_feasibility) return extract(LpStatus::breakdown);
    }
    return extract(LpStatus::breakdown);
  }

 private:
  enum class Outcome { done, infeasible, unbounded, breakdown, lost_feasibility };

  // Blocking kinds found by the ratio test.
  static constexpr int kOwnBound = -1;
  static constexpr int kNoBlock = -2;

  void cold_start() {
    state_.assign(static_cast<std::size_t>(N_), State::at_lower);
    for (int j = 0; j < N_; ++j) {
      const bool flb = std::isfinite(lb_(j)), fub = std::isfinite(ub_(j));
      if (flb && fub)
        // The bound nearer zero: artificial big boxes then rest idle at 0
        // instead of starting pinned to the far wall.
        state_[j] = std::abs(lb_(j)) <= std::abs(ub_(j)) ? State::at_lower
                                                         : State::at_upper;
      else if (flb) state_[j] = State::at_lower;
      else if (fub) state_[j] = State::at_upper;
      else state_[j] = State::free_zero;
    }
    basic_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      state_[n_ + i] = State::basic;
    }
    Binv_ = Eigen::MatrixXd::Identity(m_, m_);
    since_refactor_ = 0;
  }

  bool adopt_warm(const SimplexBasis& warm) {
    const int w = static_cast<int>(warm.state.size());
    // A basis may predate rows appended to the same program (cut loops);
    // the new rows' slacks then re-enter the basis. Anything else is from a
    // different program and gets rejected by size.
    if (w < n_ || w > N_) return false;
    state_.assign(static_cast<std::size_t>(N_), State::basic);
    std::copy(warm.state.begin(), warm.state.end(), state_.begin());
    std::vector<int> basics;
    for (int j = 0; j < N_; ++j)
      if (state_[j] == State::basic) basics.push_back(j);
    if (static_cast<int>(basics.size()) != m_) return false;
    // Repair states that do not match current bounds.
    for (int j = 0; j < N_; ++j) {
      if (state_[j] == State::basic) continue;
      if (state_[j] == State::at_lower && !std::isfinite(lb_(j)))
        state_[j] = std::isfinite(ub_(j)) ? State::at_upper : State::free_zero;
      else if (state_[j] == State::at_upper && !std::isfinite(ub_(j)))
        state_[j] = std::isfinite(lb_(j)) ? State::at_lower : State::free_zero;
      else if (state_[j] == State::free_zero &&
               (std::isfinite(lb_(j)) || std::isfinite(ub_(j))))
        state_[j] = std::isfinite(lb_(j)) ? State::at_lower : State::at_upper;
    }
    basic_ = std::move(basics);
    if (!factorize()) {
      return false;
    }
    return true;
  }

  // aᵀ_j · y without forming the column.
  double col_dot(int j, const Eigen::VectorXd& y) const {
    if (j >= n_) return y(j - n_);
    double s = 0.0;
    for (const auto& [i, v] : cols_[j]) s += v * y(i);
    return s;
  }

  // out += t · a_j.
  void add_col(int j, double t, Eigen::VectorXd& out) const {
    if (j >= n_) { out(j - n_) += t; return; }
    for (const auto& [i, v] : cols_[j]) out(i) += t * v;
  }

  // Binv_ · a_j.
  Eigen::VectorXd ftran_col(int j) const {
    if (j >= n_) return Binv_.col(j - n_);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m_);
    for (const auto& [i, v] : cols_[j]) w.noalias() += v * Binv_.col(i);
    return w;
  }

  bool factorize() {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m_, m_);
    for (int k = 0; k < m_; ++k) {
      const int j = basic_[k];
      if (j >= n_) B(j - n_, k) = 1.0;
      else for (const auto& [i, v] : cols_[j]) B(i, k) = v;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    // Partial pivoting has no rank query; the U diagonal spread is the
    // cheap singularity telltale that keeps bad bases out.
    double dmax = 0.0, dmin = kInf;
    for (int i = 0; i < m_; ++i) {
      const double d = std::abs(lu.matrixLU()(i, i));
      dmax = std::max(dmax, d);
      dmin = std::min(dmin, d);
    }
    if (!std::isfinite(dmax) || dmin <= dmax * 1e-12) return false;
    Binv_ = lu.inverse();
    since_refactor_ = 0;
    return true;
  }

  void set_nonbasic_values() {
    x_.resize(N_);
    for (int j = 0; j < N_; ++j) {
      switch (state_[j]) {
        case State::basic: break;
        case State::at_lower: x_(j) = lb_(j); break;
        case State::at_upper: x_(j) = ub_(j); break;
        case State::free_zero: x_(j) = 0.0; break;
      }
    }
  }

  void compute_basics() {
    set_nonbasic_values();
    Eigen::VectorXd xn = x_;
    for (int k = 0; k < m_; ++k) xn(basic_[k]) = 0.0;
    Eigen::VectorXd r = b_;
    for (int j = 0; j < N_; ++j)
      if (xn(j) != 0.0) add_col(j, -xn(j), r);
    Eigen::VectorXd xb = Binv_ * r;
    for (int k = 0; k < m_; ++k) x_(basic_[k]) = xb(k);
  }

  bool refresh() {
    if (!factorize()) return false;
    compute_basics();
    return true;
  }

  double infeasibility() const {
    double f = 0.0;
    for (int k = 0; k < m_; ++k) {
      const int j = basic_[k];
      if (x_(j) < lb_(j)) f += lb_(j) - x_(j);
      else if (x_(j) > ub_(j)) f += x_(j) - ub_(j);
    }
    return f;
  }

  // Anti-stall: a degeneracy plateau means many basics pinned exactly on a
  // bound, so every ratio test ties at zero. Shifting every finite bound
  // outward by a distinct pseudo-random offset makes the minimizers unique
  // again and the walk leaves the vertex. Offsets are deterministic (salted
  // by episode) to keep solves reproducible, and strictly outward, so a
  // perturbed infeasibility or unboundedness verdict holds for the exact
  // bounds too. Exactness is recovered by restore_bounds at phase exits.
  void apply_perturbation() {
    std::uint64_t s = 0x9E3779B97F4A7C15ULL * (perturb_used_ + 1);
    auto unit = [&s]() {
      s ^= s >> 30; s *= 0xBF58476D1CE4E5B9ULL;
      s ^= s >> 27; s *= 0x94D049BB133111EBULL;
      s ^= s >> 31;
      return 0.5 + 0.5 * static_cast<double>(s >> 11) * 0x1.0p-53;
    };
    const double eps = opt_.perturb_eps * std::pow(4.0, perturb_used_);
    for (int j = 0; j < N_; ++j) {
      if (std::isfinite(lb_(j)))
        lb_(j) -= eps * (1.0 + std::abs(lb0_(j))) * unit();
      if (std::isfinite(ub_(j)))
        ub_(j) += eps * (1.0 + std::abs(ub0_(j))) * unit();
    }
    ++perturb_used_;
    perturbed_ = true;
    compute_basics();
  }

  void restore_bounds() {
    lb_ = lb0_;
    ub_ = ub0_;
    perturbed_ = false;
    compute_basics();
  }

  Eigen::VectorXd duals_for(const Eigen::VectorXd& full_cost) const {
    Eigen::VectorXd cb(m_);
    for (int k = 0; k < m_; ++k) cb(k) = full_cost(basic_[k]);
    return Binv_.transpose() * cb;
  }

  // Entering choice. Returns column or -1; sets dir to the movement sign.
  int price(const Eigen::VectorXd& d, int& dir) const {
    int best = -1;
    double best_score = opt_.tol_dj;
    for (int j = 0; j < N_; ++j) {
      if (state_[j] == State::basic) continue;
      if (lb_(j) == ub_(j)) continue;  // fixed, never enters
      double score = 0.0;
      int cand_dir = 0;
      if (state_[j] == State::at_lower) {
        if (d(j) < -opt_.tol_dj) { score = -d(j); cand_dir = +1; }
      } else if (state_[j] == State::at_upper) {
        if (d(j) > opt_.tol_dj) { score = d(j); cand_dir = -1; }
      } else {  // free at zero
        if (std::abs(d(j)) > opt_.tol_dj) {
          score = std::abs(d(j));
          cand_dir = d(j) < 0.0 ? +1 : -1;
        }
      }
      if (cand_dir == 0) continue;
      if (bland_) { dir = cand_dir; return j; }  // lowest eligible index
      if (score > best_score) {
        best_score = score;
        best = j;
        dir = cand_dir;
      }
    }
    return best;
  }

  struct Ratio {
    double t = kInf;
    int block = kNoBlock;     // basis position, kOwnBound, or kNoBlock
    bool leave_at_upper = false;
  };

  Ratio ratio_test(int q, int dir, const Eigen::VectorXd& w, bool phase1) const {
    Ratio r;
    if (std::isfinite(lb_(q)) && std::isfinite(ub_(q))) {
      r.t = ub_(q) - lb_(q);
      r.block = kOwnBound;
    }
    // Positions tied with the minimum step; resolved after the scan.
    double best_t = r.t;
    std::vector<int> ties;
    std::vector<bool> tie_upper;
    for (int k = 0; k < m_; ++k) {
      const double wk = w(k);
      // Also below the pivot tolerance: a blocker that could never pivot
      // would only stall the basis exchange.
      if (std::abs(wk) <= std::max(opt_.tol_ratio_zero, opt_.tol_pivot))
        continue;
      const int j = basic_[k];
      const double rate = -dir * wk;  // d x_j / d t
      const double v = x_(j);
      double t = kInf;
      bool at_upper = false;
      // Strictly the same classification the phase-1 pricing cost uses.
      // Any mismatch lets a step run through a kink the gradient already
      // counted, and pricing then chases phantom descent in a loop.
      const bool below = phase1 && v < lb_(j);
      const bool above = phase1 && v > ub_(j);
      if (below) {
        if (rate > 0.0) { t = (lb_(j) - v) / rate; at_upper = false; }
      } else if (above) {
        if (rate < 0.0) { t = (ub_(j) - v) / rate; at_upper = true; }
      } else if (rate > 0.0) {
        if (std::isfinite(ub_(j))) { t = (ub_(j) - v) / rate; at_upper = true; }
      } else {
        if (std::isfinite(lb_(j))) { t = (lb_(j) - v) / rate; at_upper = false; }
      }
      if (!std::isfinite(t)) continue;
      t = std::max(t, 0.0);
      if (t < best_t - 1e-9 * (1.0 + t)) {
        best_t = t;
        ties.assign(1, k);
        tie_upper.assign(1, at_upper);
      } else if (t <= best_t + 1e-9 * (1.0 + best_t)) {
        ties.push_back(k);
        tie_upper.push_back(at_upper);
      }
    }
    if (ties.empty()) {
      if (r.block == kOwnBound) r.t = std::max(best_t, 0.0);
      return r;  // own bound only, or unbounded
    }
    // Own-bound flip wins ties: no basis change, never degenerate.
    if (r.block == kOwnBound && r.t <= best_t + 1e-12) {
      r.t = std::max(r.t, 0.0);
      return r;
    }
    int pick = 0;
    if (bland_) {
      for (std::size_t i = 1; i < ties.size(); ++i)
        if (basic_[ties[i]] < basic_[ties[pick]]) pick = static_cast<int>(i);
    } else {
      for (std::size_t i = 1; i < ties.size(); ++i) {
        const double a = std::abs(w(ties[i]));
        const double bst = std::abs(w(ties[pick]));
        if (a > bst ||
            (a == bst && basic_[ties[i]] < basic_[ties[pick]]))
          pick = static_cast<int>(i);
      }
    }
    // Bound-snap residue leaves ratios of float dust. Flattening them to an
    // exact zero step makes plateau pivots pure basis exchanges: x is frozen,
    // the tie data stays fixed, and Bland's rule can actually terminate.
    r.t = best_t <= 2e-9 ? 0.0 : best_t;
    r.block = ties[pick];
    r.leave_at_upper = tie_upper[pick];
    return r;
  }

  void apply_flip(int q, int dir, double t, const Eigen::VectorXd& w) {
    // Entering variable travels to its other bound; basis unchanged, but the
    // basic values still move along the edge.
    for (int k = 0; k < m_; ++k) x_(basic_[k]) -= dir * t * w(k);
    if (dir > 0) {
      x_(q) = ub_(q);
      state_[q] = State::at_upper;
    } else {
      x_(q) = lb_(q);
      state_[q] = State::at_lower;
    }
  }

  bool apply_pivot(int q, int dir, const Ratio& r, const Eigen::VectorXd& w) {
    const int kpos = r.block;
    const double piv = w(kpos);
    if (std::abs(piv) < opt_.tol_pivot) return false;
    const int leave = basic_[kpos];
    // Update primal values along the edge.
    x_(q) += dir * r.t;
    for (int k = 0; k < m_; ++k)
      if (k != kpos) x_(basic_[k]) -= dir * r.t * w(k);
    x_(leave) = r.leave_at_upper ? ub_(leave) : lb_(leave);
    state_[leave] = r.leave_at_upper ? State::at_upper : State::at_lower;
    if (!std::isfinite(x_(leave))) return false;  // guards logic errors
    state_[q] = State::basic;
    basic_[kpos] = q;
    // Product-form update of the explicit inverse.
    const Eigen::RowVectorXd prow = Binv_.row(kpos) / piv;
    Eigen::VectorXd factor = w;
    factor(kpos) = 0.0;
    Binv_.noalias() -= factor * prow;
    Binv_.row(kpos) = prow;
    ++since_refactor_;
    return true;
  }

  Outcome run_phase(bool phase1) {
    int tiny_pivot_retries = 0;
    while (true) {
      if (iters_ >= max_iters_) return Outcome::breakdown;
      if (since_refactor_ >= opt_.refactor_every) {
        if (!refresh()) return Outcome::breakdown;
        if (!phase1 && infeasibility() > 1e-7 * (1.0 + b_scale_))
          return Outcome::lost_feasibility;
      }
      Eigen::VectorXd cur_cost;
      if (phase1) {
        const double f = infeasibility();
        if (f <= opt_.p1_exit * (1.0 + b_scale_)) {
          // Perturbed feasibility is provisional: snap the bounds back and
          // re-measure; any residue is worked off against the exact bounds.
          if (perturbed_) { restore_bounds(); continue; }
          return Outcome::done;
        }
        cur_cost.setZero(N_);
        for (int k = 0; k < m_; ++k) {
          const int j = basic_[k];
          if (x_(j) < lb_(j)) cur_cost(j) = -1.0;
          else if (x_(j) > ub_(j)) cur_cost(j) = 1.0;
        }
      } else {
        cur_cost = cost_;
      }
      const Eigen::VectorXd y = duals_for(cur_cost);
      Eigen::VectorXd d(N_);
      for (int j = 0; j < N_; ++j)
        d(j) = state_[j] == State::basic ? 0.0 : cur_cost(j) - col_dot(j, y);
      int dir = 0;
      const int q = price(d, dir);
      if (q < 0) {
        // Outward-shifted bounds only enlarge the box, so a phase-1 dead end
        // certifies infeasibility for the exact bounds as well.
        if (phase1) return Outcome::infeasible;
        if (perturbed_) {
          restore_bounds();
          if (infeasibility() > 1e-7 * (1.0 + b_scale_))
            return Outcome::lost_feasibility;
          continue;
        }
        return Outcome::done;
      }
      const Eigen::VectorXd w = ftran_col(q);
      const Ratio r = ratio_test(q, dir, w, phase1);
      if (r.block == kNoBlock)
        return phase1 ? Outcome::breakdown : Outcome::unbounded;
      ++iters_;
      if (r.block == kOwnBound) {
        apply_flip(q, dir, r.t, w);
        tiny_pivot_retries = 0;
        // Flips leave the inverse alone but still move x incrementally, so
        // they count toward the periodic recompute all the same.
        ++since_refactor_;
      } else {
        if (!apply_pivot(q, dir, r, w)) {
          // Pivot too small: refresh once and re-price; give up if it repeats.
          if (++tiny_pivot_retries > 2) return Outcome::breakdown;
          if (!refresh()) return Outcome::breakdown;
          continue;
        }
        tiny_pivot_retries = 0;
      }
      // Near-zero steps count as degenerate so the anti-stall still engages
      // when the basis chatters by float dust; only substantial movement
      // hands control back to largest-violation pricing.
      if (r.t <= 1e-8) {
        if (++degen_count_ > opt_.degeneracy_limit) {
          if (!perturbed_ && perturb_used_ < opt_.perturb_episodes) {
            apply_perturbation();
            degen_count_ = 0;
            bland_ = false;
          } else {
            // Plateau survived the bound shift: Bland's rule is the finite
            // fallback of last resort.
            bland_ = true;
          }
        }
      } else if (r.t > 1e-5) {
        degen_count_ = 0;
        bland_ = false;
      }
    }
  }

  LpSolution solve_unconstrained() {
    LpSolution s;
    s.iterations = 0;
    s.primal.assign(static_cast<std::size_t>(n_), 0.0);
    s.reduced_costs.assign(static_cast<std::size_t>(n_), 0.0);
    s.basis.state.assign(static_cast<std::size_t>(n_), State::free_zero);
    double obj = lp_.objective_offset;
    for (int j = 0; j < n_; ++j) {
      const double c = cost_(j);
      double v = 0.0;
      if (c > 0.0) {
        if (!std::isfinite(lb_(j))) { s.status = LpStatus::unbounded; return s; }
        v = lb_(j);
        s.basis.state[j] = State::at_lower;
      } else if (c < 0.0) {
        if (!std::isfinite(ub_(j))) { s.status = LpStatus::unbounded; return s; }
        v = ub_(j);
        s.basis.state[j] = State::at_upper;
      } else if (std::isfinite(lb_(j))) {
        v = lb_(j);
        s.basis.state[j] = State::at_lower;
      } else if (std::isfinite(ub_(j))) {
        v = ub_(j);
        s.basis.state[j] = State::at_upper;
      }
      s.primal[j] = v;
      s.reduced_costs[j] = c;
      obj += c * v;
    }
    s.status = LpStatus::optimal;
    s.objective = obj;
    return s;
  }

  LpSolution extract(LpStatus st) {
    LpSolution s;
    s.status = st;
    s.iterations = iters_;
    s.basis.state = state_;
    return s;
  }

  LpSolution extract_optimal() {
    // One clean factorization before reporting tightens every number.
    if (!refresh()) return extract(LpStatus::breakdown);
    LpSolution s;
    s.iterations = iters_;
    s.basis.state = state_;
    s.primal.assign(x_.data(), x_.data() + n_);
    const Eigen::VectorXd y = duals_for(cost_);
    s.row_duals.assign(y.data(), y.data() + m_);
    Eigen::VectorXd d(N_);
    for (int j = 0; j < N_; ++j) d(j) = cost_(j) - col_dot(j, y);
    s.reduced_costs.resize(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j)
      s.reduced_costs[j] = state_[j] == State::basic ? 0.0 : d(j);
    double obj = lp_.objective_offset;
    for (int j = 0; j < n_; ++j) obj += cost_(j) * x_(j);
    s.objective = obj;

    // Self-check: primal feasibility, complementary slackness, duality gap.
    double feas = 0.0;
    Eigen::VectorXd act = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < n_; ++j)
      if (x_(j) != 0.0) add_col(j, x_(j), act);
    double cs = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double diff = act(i) - b_(i);
      switch (lp_.rows[i].cmp) {
        case Cmp::le: feas = std::max(feas, diff); break;
        case Cmp::ge: feas = std::max(feas, -diff); break;
        case Cmp::eq: feas = std::max(feas, std::abs(diff)); break;
      }
      if (lp_.rows[i].cmp != Cmp::eq)
        cs = std::max(cs, std::abs(y(i) * diff));
    }
    double dual_obj = lp_.objective_offset;
    for (int i = 0; i < m_; ++i) dual_obj += y(i) * b_(i);
    for (int j = 0; j < n_; ++j) {
      feas = std::max(feas, lb_(j) - x_(j));
      feas = std::max(feas, x_(j) - ub_(j));
      const double dj = s.reduced_costs[j];
      if (dj > 0.0) {
        if (std::isfinite(lb_(j))) {
          dual_obj += dj * lb_(j);
          cs = std::max(cs, std::abs(dj * (x_(j) - lb_(j))));
        } else {
          cs = std::max(cs, dj);
        }
      } else if (dj < 0.0) {
        if (std::isfinite(ub_(j))) {
          dual_obj += dj * ub_(j);
          cs = std::max(cs, std::abs(dj * (ub_(j) - x_(j))));
        } else {
          cs = std::max(cs, -dj);
        }
      }
    }
    s.max_primal_infeasibility = feas;
    s.duality_gap = std::abs(obj - dual_obj);
    s.max_cs_violation = cs;
    const double scale = 1.0 + std::abs(obj);
    s.status = (feas <= opt_.check_feas && s.duality_gap <= opt_.check_rel * scale &&
                cs <= opt_.check_rel * scale)
                   ? LpStatus::optimal
                   : LpStatus::breakdown;
    return s;
  }

  const LinearProgram& lp_;
  SimplexOptions opt_;
  int m_ = 0, n_ = 0, N_ = 0;
  // Structural columns, (row, value) nonzeros; slacks are implicit units.
  std::vector<std::vector<std::pair<int, double>>> cols_;
  Eigen::VectorXd b_, cost_, lb_, ub_, x_;
  Eigen::VectorXd lb0_, ub0_;  // exact bounds; lb_/ub_ may carry a shift
  Eigen::MatrixXd Binv_;
  std::vector<State> state_;
  std::vector<int> basic_;
  double b_scale_ = 1.0;
  long iters_ = 0, max_iters_ = 0;
  int since_refactor_ = 0;
  int degen_count_ = 0;
  int perturb_used_ = 0;
  bool bland_ = false;
  bool perturbed_ = false;
};

}  // namespace detail

inline LpSolution solve_lp(const LinearProgram& lp,
                           const SimplexBasis* warm = nullptr,
                           const SimplexOptions& opt = {}) {
  detail::SimplexSolver solver(lp, opt);
  return solver.run(warm);
}

}  // namespace gridint
