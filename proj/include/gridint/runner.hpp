#pragma once

// Batch orchestration behind the command-line front end: time-step fanout
// over a bounded worker pool, the on-disk output tree, and report emission.
// Everything here is callable headlessly so tests can drive full runs.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <regex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gridint/analysis.hpp"
#include "gridint/interdiction.hpp"
#include "gridint/network_io.hpp"

namespace gridint {

struct RunConfig {
  std::string command;  // solve | enumerate | compare | score | report
  std::string grid_path;
  std::string timeseries_path;  // empty: one run on the base case (t = 0)
  std::vector<int> timesteps;   // 1-based row selection; empty means all
  Model model = Model::dc;
  int budget = 1;
  EnumLimits limits{};
  LacConfig lac{};
  int jobs = 1;
  std::string out_dir = "out";
  bool dump_models = false;
  int top_k = 10;                            // rows in score tables
  std::vector<std::string> reference_files;  // compare inputs
  std::vector<std::string> baseline_files;
  std::vector<std::string> score_files;  // score inputs, one per time step

  void validate() const {
    if (budget < 0)
      throw InputError(InputError::Kind::validation, "budget must be >= 0");
    if (jobs < 1)
      throw InputError(InputError::Kind::validation, "jobs must be >= 1");
    if (top_k < 1)
      throw InputError(InputError::Kind::validation, "top-k must be >= 1");
    lac.validate();
    for (int t : timesteps)
      if (t < 1)
        throw InputError(InputError::Kind::validation,
                         "time step selection must be 1-based");
  }
};

inline nlohmann::ordered_json to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["command"] = cfg.command;
  j["grid"] = cfg.grid_path;
  j["timeseries"] = cfg.timeseries_path;
  j["timesteps"] = cfg.timesteps;
  j["model"] = to_string(cfg.model);
  j["budget"] = cfg.budget;
  j["max_solutions"] = cfg.limits.max_solutions;
  j["threshold"] = cfg.limits.threshold;
  j["polygon_sides"] = cfg.lac.polygon_sides;
  j["pwl_segments"] = cfg.lac.pwl_segments;
  j["pwl_angle_range"] = cfg.lac.pwl_angle_range;
  j["angle_bound"] = cfg.lac.angle_bound;
  j["jobs"] = cfg.jobs;
  j["out"] = cfg.out_dir;
  j["dump_models"] = cfg.dump_models;
  j["top_k"] = cfg.top_k;
  j["reference_files"] = cfg.reference_files;
  j["baseline_files"] = cfg.baseline_files;
  j["score_files"] = cfg.score_files;
  return j;
}

struct RunResult {
  bool solver_limit = false;          // some entry's proven gap is above tol
  std::vector<std::string> files;     // everything written, in write order
  std::vector<std::string> stdout_lines;  // human summary for the front end
};

// ---------------------------------------------------------------------------
// Small utilities shared by the commands.

namespace detail {

inline int log_level() {
  const char* e = std::getenv("GRID_INTERDICT_LOG");
  return e ? std::atoi(e) : 0;
}

inline void log_line(int level, const std::string& msg) {
  static std::mutex mu;
  if (log_level() < level) return;
  std::lock_guard<std::mutex> lock(mu);
  std::fputs((msg + "\n").c_str(), stderr);
}

inline void write_file(const std::string& path, const std::string& content,
                       RunResult& result) {
  std::filesystem::create_directories(
      std::filesystem::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw InputError(InputError::Kind::io, "cannot write file: " + path);
  out << content;
  result.files.push_back(path);
}

inline void write_run_json(const RunConfig& cfg, RunResult& result) {
  write_file(cfg.out_dir + "/run.json", to_json(cfg).dump(2) + "\n", result);
}

inline std::string step_dir(const RunConfig& cfg) {
  return cfg.out_dir + "/" + to_string(cfg.model) + "/Z" +
         std::to_string(cfg.budget);
}

/// Base case when no series is given, otherwise the selected rows (all by
/// default). Selection indices are 1-based row numbers.
inline std::vector<LoadCase> selected_cases(const RunConfig& cfg,
                                            const Network& net) {
  if (cfg.timeseries_path.empty()) {
    if (!cfg.timesteps.empty())
      throw InputError(InputError::Kind::validation,
                       "--timesteps needs a time series file");
    return {LoadCase{}};
  }
  const std::vector<LoadCase> all = load_timeseries(cfg.timeseries_path, net);
  if (cfg.timesteps.empty()) return all;
  std::vector<LoadCase> picked;
  for (int t : cfg.timesteps) {
    if (t < 1 || t > static_cast<int>(all.size()))
      throw InputError(InputError::Kind::validation,
                       "time step " + std::to_string(t) +
                           " outside the series (1.." +
                           std::to_string(all.size()) + ")");
    picked.push_back(all[static_cast<std::size_t>(t) - 1]);
  }
  return picked;
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
/// wins and is rethrown on the caller after all workers stopped.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
          return;
        }
      }
    });
  for (std::thread& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline std::string dump_lp(const LinearProgram& lp) {
  std::ostringstream os;
  os.precision(12);
  os << "min";
  for (int c = 0; c < lp.num_vars; ++c)
    if (lp.objective[static_cast<std::size_t>(c)] != 0.0)
      os << " + " << lp.objective[static_cast<std::size_t>(c)] << " "
         << lp.var_labels[static_cast<std::size_t>(c)];
  if (lp.objective_offset != 0.0) os << " + " << lp.objective_offset;
  os << "\n";
  for (const LpRow& row : lp.rows) {
    os << row.label << ":";
    for (int c = 0; c < lp.num_vars; ++c)
      if (row.coeffs[static_cast<std::size_t>(c)] != 0.0)
        os << " + " << row.coeffs[static_cast<std::size_t>(c)] << " "
           << lp.var_labels[static_cast<std::size_t>(c)];
    os << " " << to_string(row.cmp) << " " << row.rhs << "\n";
  }
  for (int c = 0; c < lp.num_vars; ++c)
    os << lp.lower[static_cast<std::size_t>(c)] << " <= "
       << lp.var_labels[static_cast<std::size_t>(c)] << " <= "
       << lp.upper[static_cast<std::size_t>(c)] << "\n";
  return os.str();
}

inline CavList load_cav_list(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw InputError(InputError::Kind::io, "cannot open CAV file: " + path);
  CavList list;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    list.push_back(cav_from_json(line));
  }
  return list;
}

inline nlohmann::ordered_json entry_json(const CavEntry& e) {
  return nlohmann::ordered_json::parse(to_jsonl(e));
}

constexpr double kGapTol = 1e-6;  // beyond this a solve counts as truncated

inline std::string summary_line(const CavEntry& e) {
  std::ostringstream os;
  os.precision(6);
  os << "t=" << e.timestep << " " << e.approach << " Z=" << e.budget << " n="
     << e.rank << " attack=[" << e.attack.key() << "] zeta=" << e.zeta_mw
     << " MW";
  if (e.gap > kGapTol) os << " (gap " << e.gap << ")";
  return os.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// solve / enumerate: the commands that run the optimizer.

inline RunResult run_solve(const RunConfig& cfg) {
  cfg.validate();
  const Network net = load_network(cfg.grid_path);
  const std::vector<LoadCase> cases = detail::selected_cases(cfg, net);
  RunResult result;

  std::vector<CavEntry> worst(cases.size());
  detail::parallel_for(cases.size(), cfg.jobs, [&](std::size_t i) {
    detail::log_line(1, "solve t=" + std::to_string(cases[i].timestep));
    const Network net_t = apply_case(net, cases[i]);
    CavEntry e = solve_worst_case(net_t, cfg.model, cfg.budget, cfg.lac);
    e.timestep = cases[i].timestep;
    worst[i] = std::move(e);
  });

  for (std::size_t i = 0; i < cases.size(); ++i) {
    const CavEntry& e = worst[i];
    if (e.gap > detail::kGapTol) result.solver_limit = true;
    detail::write_file(detail::step_dir(cfg) + "/t" +
                           std::to_string(e.timestep) + ".worst.json",
                       detail::entry_json(e).dump(2) + "\n", result);
    result.stdout_lines.push_back(detail::summary_line(e));
    if (cfg.dump_models) {
      const Network net_t = apply_case(net, cases[i]);
      const InterdictionModel im =
          build_interdiction_mip(net_t, cfg.model, cfg.budget, cfg.lac);
      detail::write_file(detail::step_dir(cfg) + "/t" +
                             std::to_string(e.timestep) + ".milp.txt",
                         detail::dump_lp(im.milp), result);
    }
  }
  detail::write_run_json(cfg, result);
  return result;
}

inline RunResult run_enumerate(const RunConfig& cfg) {
  cfg.validate();
  const Network net = load_network(cfg.grid_path);
  const std::vector<LoadCase> cases = detail::selected_cases(cfg, net);
  RunResult result;

  std::vector<CavListResult> lists(cases.size());
  detail::parallel_for(cases.size(), cfg.jobs, [&](std::size_t i) {
    detail::log_line(1, "enumerate t=" + std::to_string(cases[i].timestep));
    const Network net_t = apply_case(net, cases[i]);
    CavListResult r =
        enumerate_cavs(net_t, cfg.model, cfg.budget, cfg.limits, cfg.lac);
    for (CavEntry& e : r.entries) e.timestep = cases[i].timestep;
    lists[i] = std::move(r);
  });

  for (std::size_t i = 0; i < cases.size(); ++i) {
    const int t = cases[i].timestep;
    const std::string base =
        detail::step_dir(cfg) + "/t" + std::to_string(t);
    std::ostringstream body;
    for (const CavEntry& e : lists[i].entries) {
      body << to_jsonl(e) << "\n";
      if (e.gap > detail::kGapTol) result.solver_limit = true;
      result.stdout_lines.push_back(detail::summary_line(e));
    }
    detail::write_file(base + ".cavs.jsonl", body.str(), result);
    nlohmann::ordered_json meta;
    meta["t"] = t;
    meta["entries"] = lists[i].entries.size();
    meta["stop_reason"] = to_string(lists[i].reason);
    detail::write_file(base + ".meta.json", meta.dump(2) + "\n", result);
    if (cfg.dump_models) {
      const Network net_t = apply_case(net, cases[i]);
      const InterdictionModel im =
          build_interdiction_mip(net_t, cfg.model, cfg.budget, cfg.lac);
      detail::write_file(base + ".milp.txt", detail::dump_lp(im.milp), result);
    }
  }
  detail::write_run_json(cfg, result);
  return result;
}

// ---------------------------------------------------------------------------
// compare / score / report: pure aggregation over files already on disk.

namespace detail {

/// Comparison over matching time steps plus the chart CSV and a summary.
/// Both maps must cover the same steps with one list per side.
inline void emit_comparison(const std::map<int, CavList>& reference,
                            const std::map<int, CavList>& baseline,
                            const RunConfig& cfg, RunResult& result) {
  for (const auto& [t, list] : reference)
    if (!baseline.count(t))
      throw InputError(InputError::Kind::validation,
                       "no baseline list for time step " + std::to_string(t));
  for (const auto& [t, list] : baseline)
    if (!reference.count(t))
      throw InputError(InputError::Kind::validation,
                       "no reference list for time step " + std::to_string(t));

  std::vector<ComparisonReport> reports;
  for (const auto& [t, list] : reference) {
    ComparisonReport rep = compare_formulations(list, baseline.at(t));
    rep.timestep = t;  // survives even when both lists are empty
    reports.push_back(std::move(rep));
  }

  const std::string dir = cfg.out_dir + "/reports";
  double mean_share = 0.0, mean_abs_mw = 0.0, mean_rel = 0.0;
  int total_undetected = 0;
  for (const ComparisonReport& rep : reports) {
    write_file(dir + "/compare_t" + std::to_string(rep.timestep) + ".json",
               to_json(rep).dump(2) + "\n", result);
    mean_share += rep.undetected_share;
    mean_abs_mw += rep.psi_abs_mw;
    mean_rel += rep.psi_rel;
    total_undetected += rep.undetected;
    result.stdout_lines.push_back(
        "t=" + std::to_string(rep.timestep) + " undetected " +
        std::to_string(rep.undetected) + "/" +
        std::to_string(rep.entries.size()));
  }
  write_file(dir + "/detection.csv", detection_csv(reports), result);

  nlohmann::ordered_json agg;
  agg["timesteps"] = reports.size();
  agg["total_undetected"] = total_undetected;
  const double n = reports.empty() ? 1.0 : static_cast<double>(reports.size());
  agg["mean_undetected_share"] = mean_share / n;
  agg["mean_psi_abs_mw"] = mean_abs_mw / n;
  agg["mean_psi_rel"] = mean_rel / n;
  write_file(dir + "/compare_summary.json", agg.dump(2) + "\n", result);
  result.stdout_lines.push_back(
      "mean undetected share " + std::to_string(mean_share / n) +
      ", mean objective gap " + std::to_string(mean_abs_mw / n) + " MW");
}

inline std::map<int, CavList> lists_by_step(
    const std::vector<std::string>& paths, const char* what) {
  std::map<int, CavList> by_step;
  for (const std::string& path : paths) {
    CavList list = load_cav_list(path);
    check_ranked_list(list, what + (": " + path));
    const int t = list.empty() ? 0 : list[0].timestep;
    if (!by_step.emplace(t, std::move(list)).second)
      throw InputError(InputError::Kind::validation,
                       std::string(what) + ": two lists for time step " +
                           std::to_string(t));
  }
  return by_step;
}

inline void emit_score(const std::vector<CavList>& lists, const RunConfig& cfg,
                       const std::string& tag, RunResult& result) {
  const ScoreTable table = score_across_timesteps(lists);
  const std::string dir = cfg.out_dir + "/reports";
  write_file(dir + "/score" + tag + ".json", to_json(table).dump(2) + "\n",
             result);
  write_file(dir + "/score" + tag + ".csv", score_csv(table, cfg.top_k),
             result);
  const int k =
      std::min<int>(cfg.top_k, static_cast<int>(table.by_objective.size()));
  for (int i = 0; i < k; ++i) {
    const ScoreRow& r = table.rows[table.by_objective[i]];
    std::ostringstream os;
    os.precision(6);
    if (!tag.empty()) os << tag.substr(1) << " ";
    os << "#" << i + 1 << " attack=[" << r.attack.key()
       << "] phi_obj=" << r.phi_obj_mw << " MW phi_rank=" << r.phi_rank
       << " seen " << r.count << "/" << table.timesteps;
    result.stdout_lines.push_back(os.str());
  }
}

}  // namespace detail

inline RunResult run_compare(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.reference_files.empty() || cfg.baseline_files.empty())
    throw InputError(InputError::Kind::validation,
                     "compare needs --lac and --dc list files");
  RunResult result;
  detail::emit_comparison(
      detail::lists_by_step(cfg.reference_files, "reference"),
      detail::lists_by_step(cfg.baseline_files, "baseline"), cfg, result);
  detail::write_run_json(cfg, result);
  return result;
}

inline RunResult run_score(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.score_files.empty())
    throw InputError(InputError::Kind::validation,
                     "score needs at least one CAV list file");
  std::vector<CavList> lists;
  for (const std::string& path : cfg.score_files)
    lists.push_back(detail::load_cav_list(path));
  RunResult result;
  detail::emit_score(lists, cfg, "", result);
  detail::write_run_json(cfg, result);
  return result;
}

/// Builds every report the output tree supports: cross-model comparisons
/// for time steps both models cover, and one score table per model. Never
/// re-solves; it only reads files that enumerate runs left behind.
inline RunResult run_report(const RunConfig& cfg) {
  cfg.validate();
  RunResult result;
  const std::regex name_re("^t(\\d+)\\.cavs\\.jsonl$");

  std::map<std::string, std::map<int, CavList>> trees;
  for (const char* model : {"dc", "lac"}) {
    const std::string dir =
        cfg.out_dir + "/" + model + "/Z" + std::to_string(cfg.budget);
    if (!std::filesystem::is_directory(dir)) continue;
    std::map<int, CavList>& tree = trees[model];
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      std::smatch match;
      const std::string name = entry.path().filename().string();
      if (!std::regex_match(name, match, name_re)) continue;
      tree[std::stoi(match[1])] = detail::load_cav_list(entry.path().string());
    }
  }
  if (trees.empty())
    throw InputError(InputError::Kind::io,
                     "no t*.cavs.jsonl under " + cfg.out_dir + "/{dc,lac}/Z" +
                         std::to_string(cfg.budget));

  if (trees.count("lac") && trees.count("dc")) {
    std::map<int, CavList> ref, base;
    for (const auto& [t, list] : trees["lac"])
      if (trees["dc"].count(t)) {
        ref[t] = list;
        base[t] = trees["dc"][t];
      }
    if (!ref.empty()) detail::emit_comparison(ref, base, cfg, result);
  }
  for (auto& [model, tree] : trees) {
    std::vector<CavList> lists;
    for (auto& [t, list] : tree) lists.push_back(std::move(list));
    detail::emit_score(lists, cfg, "_" + model, result);
  }
  detail::write_run_json(cfg, result);
  return result;
}

}  // namespace gridint
