// Command-line front end: parses flags into a RunConfig, hands off to the
// runner, and maps failures onto exit codes (1 solver limit, 2 bad input).

#include <climits>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridint/runner.hpp"

using namespace gridint;

namespace {

// Accepts "4", "2-9", or "1,3,8" (1-based rows of the time series).
std::vector<int> parse_timesteps(const std::string& spec) {
  std::vector<int> out;
  if (spec.empty()) return out;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t comma = std::min(spec.find(',', pos), spec.size());
    const std::string item = spec.substr(pos, comma - pos);
    const std::size_t dash = item.find('-');
    try {
      if (dash == std::string::npos) {
        out.push_back(std::stoi(item));
      } else {
        const int a = std::stoi(item.substr(0, dash));
        const int b = std::stoi(item.substr(dash + 1));
        if (b < a)
          throw InputError(InputError::Kind::validation,
                           "empty time step range '" + item + "'");
        for (int t = a; t <= b; ++t) out.push_back(t);
      }
    } catch (const InputError&) {
      throw;
    } catch (...) {
      throw InputError(InputError::Kind::parse,
                       "bad --timesteps item '" + item + "'");
    }
    pos = comma + 1;
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Critical attack vector search and scoring for power grids"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string model = "dc";
  std::string timesteps;

  const auto add_solver_flags = [&](CLI::App* cmd) {
    cmd->add_option("--grid", cfg.grid_path, "grid JSON file")->required();
    cmd->add_option("--timeseries", cfg.timeseries_path,
                    "CSV of demand/generation multipliers, one row per step");
    cmd->add_option("--timesteps", timesteps,
                    "rows of the series to run: '4', '2-9', or '1,3,8'");
    cmd->add_option("--model", model, "dispatch model")
        ->check(CLI::IsMember({"dc", "lac"}));
    cmd->add_option("--budget", cfg.budget,
                    "how many branches an attack may destroy");
    cmd->add_option("--pwl-segments", cfg.lac.pwl_segments,
                    "tangent cuts per squared term (lac)");
    cmd->add_option("--polygon-sides", cfg.lac.polygon_sides,
                    "sides of the apparent-power polygon (lac)");
    cmd->add_option("--out", cfg.out_dir, "output directory (default: out)");
    cmd->add_option("--jobs", cfg.jobs, "worker threads over time steps");
    cmd->add_flag("--dump-models", cfg.dump_models,
                  "also write each interdiction model as text");
  };

  CLI::App* solve =
      app.add_subcommand("solve", "worst-case attack per time step");
  add_solver_flags(solve);

  CLI::App* enumerate =
      app.add_subcommand("enumerate", "ranked CAV list per time step");
  add_solver_flags(enumerate);
  CLI::Option* max_opt = enumerate->add_option(
      "--max-solutions", cfg.limits.max_solutions,
      "list depth to reach before the threshold applies "
      "(default: 50 dc, 5 lac)");
  CLI::Option* thr_opt = enumerate->add_option(
      "--threshold", cfg.limits.threshold,
      "keep going past the depth while zeta >= threshold * best "
      "(default: 0.5 dc, 1.0 lac)");
  bool exhaustive = false;
  enumerate->add_flag("--exhaustive", exhaustive,
                      "enumerate every positive-shed attack in the budget");

  CLI::App* compare = app.add_subcommand(
      "compare", "match one model's CAV lists against another's");
  compare
      ->add_option("--lac", cfg.reference_files,
                   "reference lists, one file per time step")
      ->required();
  compare
      ->add_option("--dc", cfg.baseline_files,
                   "baseline lists searched for the reference attacks")
      ->required();
  compare->add_option("--out", cfg.out_dir, "output directory (default: out)");

  CLI::App* score =
      app.add_subcommand("score", "score attacks across time steps");
  score->add_option("files", cfg.score_files,
                    "CAV list files, one per time step")
      ->required();
  score->add_option("--top-k", cfg.top_k, "rows in the emitted tables");
  score->add_option("--out", cfg.out_dir, "output directory (default: out)");

  CLI::App* report = app.add_subcommand(
      "report", "comparisons and scores over an enumerate output tree");
  report->add_option("--out", cfg.out_dir,
                     "tree that enumerate runs populated (default: out)");
  report->add_option("--budget", cfg.budget, "budget subtree to read");
  report->add_option("--top-k", cfg.top_k, "rows in the emitted tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cfg.model = model_from_string(model);
    cfg.timesteps = parse_timesteps(timesteps);
    RunResult result;
    if (solve->parsed()) {
      cfg.command = "solve";
      result = run_solve(cfg);
    } else if (enumerate->parsed()) {
      cfg.command = "enumerate";
      if (max_opt->count() == 0)
        cfg.limits.max_solutions = cfg.model == Model::lac ? 5 : 50;
      if (thr_opt->count() == 0)
        cfg.limits.threshold = cfg.model == Model::lac ? 1.0 : 0.5;
      if (exhaustive) cfg.limits = EnumLimits{INT_MAX, 0.0};
      result = run_enumerate(cfg);
    } else if (compare->parsed()) {
      cfg.command = "compare";
      result = run_compare(cfg);
    } else if (score->parsed()) {
      cfg.command = "score";
      result = run_score(cfg);
    } else {
      cfg.command = "report";
      result = run_report(cfg);
    }
    for (const std::string& line : result.stdout_lines)
      std::printf("%s\n", line.c_str());
    for (const std::string& file : result.files)
      detail::log_line(1, "wrote " + file);
    if (result.solver_limit) {
      std::fprintf(stderr,
                   "solver limit: some results carry an optimality gap\n");
      return 1;
    }
    return 0;
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
