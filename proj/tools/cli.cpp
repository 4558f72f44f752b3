#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "evcap/approx.hpp"
#include "evcap/bp.hpp"
#include "evcap/errors.hpp"
#include "evcap/formulation.hpp"
#include "evcap/generator.hpp"
#include "evcap/heuristic.hpp"
#include "evcap/instance_io.hpp"
#include "evcap/report.hpp"
#include "evcap/solution_io.hpp"

namespace evcap::cli {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::atomic<bool> g_interrupted{false};

extern "C" void on_interrupt(int) { g_interrupted = true; }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
  if (!f) throw Error("failed writing " + path.string());
}

int exit_code_for(milp::MipStatus s) {
  switch (s) {
    case milp::MipStatus::Optimal:
    case milp::MipStatus::Feasible: return kOk;
    case milp::MipStatus::Infeasible: return kInfeasible;
    case milp::MipStatus::Unbounded: return kUsage;
    case milp::MipStatus::TimeLimit: return kTimeout;
  }
  return kUsage;
}

report::Row make_row(const Instance& inst, const std::string& id, const Outcome& o) {
  report::Row r;
  r.instance_id = id;
  r.algo = o.algo;
  r.m = inst.max_posts();
  r.b = inst.queue.b;
  r.alpha = inst.queue.alpha;
  r.t_s = o.seconds;
  r.z = o.z;
  r.lb = o.lb;
  r.gap = o.gap;
  r.ts_pct = std::nan("");
  if (o.deployment) {
    const auto q = report::queue_report(inst, *o.deployment);
    r.avg_wait_min = q.avg_wait_min;
    r.avg_queue_len = q.avg_queue_len;
    r.service_ok = q.service_ok;
  } else {
    r.avg_wait_min = r.avg_queue_len = std::nan("");
    r.service_ok = false;
  }
  return r;
}

// ---- generate ---------------------------------------------------------------

struct GenerateArgs {
  std::string preset;
  int zones = 0, locations = 0, depth = 0, branching = 0;
  int mj = 10;
  int initial = 0;
  std::uint64_t seed = 1;
  double mu = 1.0, alpha = 0.9;
  int b = 0;
  std::string out;
};

int cmd_generate(const GenerateArgs& a, CLI::App& sub, std::ostream& out) {
  GeneratorParams p = a.preset.empty() ? preset_params(Preset::Tiny, a.mj) : preset_params(parse_preset(a.preset), a.mj);
  if (sub.count("--zones")) p.n_zones = a.zones;
  if (sub.count("--locations")) p.n_locations = a.locations;
  if (sub.count("--depth")) p.depth = a.depth;
  if (sub.count("--branching")) p.branching = a.branching;
  p.initial_stations = a.initial;
  p.queue = {a.mu, a.alpha, a.b};
  const auto inst = generate(p, a.seed);
  save_instance(inst, a.out);
  out << "wrote " << a.out << ": " << inst.num_zones() << " zones, " << inst.num_locations() << " locations, "
      << inst.num_nodes() << " nodes, hash " << instance_hash(inst) << "\n";
  return kOk;
}

// ---- solve ------------------------------------------------------------------

struct SolveArgs {
  std::string algo;
  std::string instance;
  std::optional<int> b;
  std::optional<double> alpha, mu;
  SolveOptions opts;
  std::string out, csv;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  Instance inst = load_instance(a.instance);
  if (a.b) inst.queue.b = *a.b;
  if (a.alpha) inst.queue.alpha = *a.alpha;
  if (a.mu) inst.queue.mu = *a.mu;
  validate(inst);

  const auto o = run_algorithm(inst, a.algo, a.opts);
  out << "algo=" << o.algo << " status=" << milp::to_string(o.status) << " z=" << o.z << " lb=" << o.lb
      << " gap=" << o.gap << " time=" << o.seconds << "s\n";
  if (!o.deployment) return exit_code_for(o.status);

  const auto feas = check_feasible(inst, *o.deployment);
  for (const auto& v : feas.violations) err << "warning: " << v.describe() << "\n";

  const auto id = std::filesystem::path(a.instance).stem().string();
  const auto row = make_row(inst, id, o);
  const auto csv = report::render_csv({row});
  out << csv;
  if (!a.csv.empty()) write_file(a.csv, csv);
  if (!a.out.empty()) {
    SolutionFile sol{o.algo, inst.seed, instance_hash(inst), o.z, milp::to_string(o.status), *o.deployment};
    save_solution(sol, a.out);
  }
  return feas.feasible ? exit_code_for(o.status) : kUsage;
}

// ---- benchmark --------------------------------------------------------------

struct BenchArgs {
  std::string preset = "tiny";
  int seeds = 3;
  std::uint64_t first_seed = 1;
  std::vector<int> mj;
  std::vector<int> bs{0, 1, 2, 3};
  std::vector<std::string> algos{"mip", "approx", "heuristic", "bp"};
  SolveOptions opts{600.0, 1e-6, false, {}};
  std::string csv, text;
};

struct Cell {
  std::uint64_t seed;
  int mj;
};

// Appendix lines comparing the approximation with the reference optimum.
std::string approx_notes(const std::vector<report::Row>& rows) {
  std::map<std::tuple<std::string, int, int>, double> zstar;
  for (const auto& r : rows) {
    if (r.algo == "mip" && r.gap <= 1e-6) zstar[{r.instance_id, r.m, r.b}] = r.z;
  }
  std::ostringstream os;
  for (const auto& r : report::sorted(rows)) {
    if (r.algo != "approx") continue;
    const auto it = zstar.find({r.instance_id, r.m, r.b});
    os << r.instance_id << " M=" << r.m << " b=" << r.b << ": gap_lb=(z-lb)/z=" << (r.z - r.lb) / r.z;
    if (it != zstar.end()) os << " (z-lb)/z*=" << (r.z - r.lb) / it->second;
    os << "\n";
  }
  return os.str();
}

int cmd_benchmark(BenchArgs a, std::ostream& out) {
  const Preset preset = parse_preset(a.preset);
  if (a.mj.empty()) a.mj = preset == Preset::Tiny ? std::vector<int>{4} : std::vector<int>{8, 10};
  std::sort(a.bs.begin(), a.bs.end());
  for (const auto& algo : a.algos) {
    if (algo != "mip" && algo != "approx" && algo != "heuristic" && algo != "bp") {
      throw ParameterError("unknown algorithm '" + algo + "'");
    }
  }
  std::vector<Cell> cells;
  for (int s = 0; s < a.seeds; ++s) {
    for (int m : a.mj) cells.push_back({a.first_seed + static_cast<std::uint64_t>(s), m});
  }

  std::vector<std::vector<report::Row>> results(cells.size());
  std::vector<std::uint8_t> done(cells.size(), 0);
  std::mutex mu;
  std::atomic<std::size_t> next{0};

  auto flush = [&] {
    std::vector<report::Row> rows;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (done[c]) rows.insert(rows.end(), results[c].begin(), results[c].end());
    }
    if (!a.csv.empty()) write_file(a.csv, report::render_csv(rows));
    return rows;
  };

  auto worker = [&] {
    for (;;) {
      if (g_interrupted) return;
      const std::size_t c = next++;
      if (c >= cells.size()) return;
      const auto& cell = cells[c];
      auto params = preset_params(preset, cell.mj);
      // One instance per cell; only the queue threshold varies across b.
      params.queue.b = a.bs.front();
      const Instance base = generate(params, cell.seed);
      const std::string id = a.preset + "-s" + std::to_string(cell.seed);
      std::vector<report::Row> rows;
      for (int b : a.bs) {
        Instance inst = base;
        inst.queue.b = b;
        std::optional<Outcome> ref;
        for (const auto& algo : a.algos) {
          if (g_interrupted) break;
          const auto o = run_algorithm(inst, algo, a.opts);
          auto row = make_row(inst, id, o);
          if (algo == "mip" && o.status == milp::MipStatus::Optimal) {
            ref = o;
            row.ts_pct = 0.0;  // the reference against itself
          }
          if (ref && algo != "mip" && o.deployment && ref->seconds > 0.0) {
            const auto m = report::compare_metrics(ref->seconds, ref->z, o.seconds, o.z, o.lb);
            row.ts_pct = m.ts_pct;
            if (algo == "heuristic") row.gap = m.gap;
          }
          rows.push_back(std::move(row));
        }
      }
      std::lock_guard lock(mu);
      results[c] = std::move(rows);
      done[c] = 1;
      flush();
    }
  };

  const auto old_handler = std::signal(SIGINT, on_interrupt);
  const int workers = std::min<int>(worker_count(), static_cast<int>(std::max<std::size_t>(cells.size(), 1)));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::signal(SIGINT, old_handler);

  const auto rows = flush();
  const auto text = report::render_text(rows) + approx_notes(rows);
  out << text;
  if (!a.text.empty()) write_file(a.text, text);
  if (g_interrupted) out << "interrupted: partial results written\n";
  return kOk;
}

}  // namespace

Outcome run_algorithm(const Instance& inst, const std::string& algo, const SolveOptions& opts) {
  Outcome o;
  o.algo = algo;
  const auto start = Clock::now();
  if (algo == "mip") {
    const auto built = build_evcec(inst);
    milp::MipLimits lim;
    lim.time_limit_s = opts.time_limit_s;
    lim.gap_tol = opts.gap_tol;
    const auto sol = milp::solve_mip(built.model, lim);
    o.status = sol.status;
    o.lb = sol.bound;
    if (sol.has_incumbent()) {
      o.deployment = decode(inst, built.index, sol.values);
      o.z = objective_value(inst, *o.deployment);
      o.gap = sol.gap;
    }
  } else if (algo == "approx") {
    milp::MipLimits lim;
    lim.time_limit_s = opts.time_limit_s;
    lim.gap_tol = opts.gap_tol;
    try {
      auto r = approx::approximate(inst, lim);
      o.status = milp::MipStatus::Feasible;
      o.z = r.z_appr;
      o.lb = r.lb;
      o.gap = r.gap_lb;
      o.deployment = std::move(r.deployment);
    } catch (const InfeasibleError&) {
      o.status = milp::MipStatus::Infeasible;
    } catch (const TimeLimitError&) {
      o.status = milp::MipStatus::TimeLimit;
    }
  } else if (algo == "heuristic") {
    try {
      o.deployment = opts.criterion ? heuristic::greedy(inst, heuristic::parse_criterion(*opts.criterion))
                                    : heuristic::best_greedy(inst);
      o.status = milp::MipStatus::Feasible;
      o.z = objective_value(inst, *o.deployment);
      o.lb = o.gap = std::nan("");
    } catch (const InfeasibleError&) {
      o.status = milp::MipStatus::Infeasible;
    }
  } else if (algo == "bp") {
    bp::Limits lim;
    lim.time_limit_s = opts.time_limit_s;
    lim.gap_tol = opts.gap_tol;
    lim.root_only = opts.root_only;
    auto r = bp::branch_and_price(inst, lim);
    o.status = r.status;
    o.lb = r.bound;
    if (r.incumbent) {
      o.deployment = std::move(r.incumbent);
      o.z = r.z;
      o.gap = r.gap;
    }
  } else {
    throw ParameterError("unknown algorithm '" + algo + "'");
  }
  o.seconds = since(start);
  return o;
}

int worker_count() {
  const char* env = std::getenv("EVCEC_THREADS");
  if (!env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) return 1;
  return static_cast<int>(std::min<long>(v, 256));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Charging-network capacity expansion planner with congestion constraints", "evcap"};
  app.require_subcommand(1);

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Write a random instance");
  auto* preset = gen->add_option("--preset", ga.preset, "Size preset")->check(CLI::IsMember({"tiny", "small", "medium"}));
  auto* zones = gen->add_option("--zones", ga.zones, "Number of zones")->check(CLI::PositiveNumber);
  auto* locs = gen->add_option("--locations", ga.locations, "Number of candidate locations")->check(CLI::PositiveNumber);
  auto* depth = gen->add_option("--depth", ga.depth, "Scenario tree levels")->check(CLI::PositiveNumber);
  auto* branching = gen->add_option("--branching", ga.branching, "Children per inner node")->check(CLI::PositiveNumber);
  for (auto* o : {zones, locs, depth, branching}) o->excludes(preset);
  gen->add_option("--mj", ga.mj, "Maximum posts per location")->capture_default_str()->check(CLI::Range(1, queueing::kMaxServers));
  gen->add_option("--initial-stations", ga.initial, "Stations present before planning")->capture_default_str()->check(CLI::NonNegativeNumber);
  gen->add_option("--seed", ga.seed, "Random seed")->capture_default_str();
  gen->add_option("--mu", ga.mu, "Service rate per post")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--alpha", ga.alpha, "Service level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  gen->add_option("--b", ga.b, "Tolerated queue length")->capture_default_str()->check(CLI::NonNegativeNumber);
  gen->add_option("--out", ga.out, "Instance file to write")->required();

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Solve an instance");
  solve->add_option("--algo", sa.algo, "Algorithm")->required()->check(CLI::IsMember({"mip", "approx", "heuristic", "bp"}));
  solve->add_option("--instance", sa.instance, "Instance file")->required()->check(CLI::ExistingFile);
  solve->add_option("--b", sa.b, "Override the queue threshold")->check(CLI::NonNegativeNumber);
  solve->add_option("--alpha", sa.alpha, "Override the service level")->check(CLI::Range(0.0, 1.0));
  solve->add_option("--mu", sa.mu, "Override the service rate")->check(CLI::PositiveNumber);
  solve->add_option("--time-limit", sa.opts.time_limit_s, "Seconds")->capture_default_str()->check(CLI::PositiveNumber);
  solve->add_option("--gap-tol", sa.opts.gap_tol, "Relative optimality gap")->capture_default_str()->check(CLI::NonNegativeNumber);
  solve->add_flag("--root-only", sa.opts.root_only, "Branch-and-price: stop after the root node");
  solve->add_option("--criterion", sa.opts.criterion, "Heuristic: single opening criterion")
      ->check(CLI::IsMember({"most_zones", "lowest_cost", "lowest_cost_per_zone"}));
  solve->add_option("--out", sa.out, "Solution file to write");
  solve->add_option("--csv", sa.csv, "Metrics CSV to write");

  BenchArgs ba;
  auto* bench = app.add_subcommand("benchmark", "Run the algorithm matrix over seeded presets");
  bench->add_option("--preset", ba.preset, "Size preset")->capture_default_str()->check(CLI::IsMember({"tiny", "small", "medium"}));
  bench->add_option("--seeds", ba.seeds, "Seeds per preset")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--first-seed", ba.first_seed, "First seed")->capture_default_str();
  bench->add_option("--mj", ba.mj, "Maximum posts values")->check(CLI::Range(1, queueing::kMaxServers));
  bench->add_option("--b", ba.bs, "Queue thresholds")->capture_default_str()->check(CLI::NonNegativeNumber);
  bench->add_option("--algos", ba.algos, "Algorithms")->capture_default_str()
      ->check(CLI::IsMember({"mip", "approx", "heuristic", "bp"}));
  bench->add_option("--time-limit", ba.opts.time_limit_s, "Seconds per run")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--gap-tol", ba.opts.gap_tol, "Relative optimality gap")->capture_default_str()->check(CLI::NonNegativeNumber);
  bench->add_option("--csv", ba.csv, "CSV report to write");
  bench->add_option("--text", ba.text, "Text report to write");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_generate(ga, *gen, out);
    if (*solve) return cmd_solve(sa, out, err);
    if (*bench) return cmd_benchmark(ba, out);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    for (const auto& p : e.problems()) err << "  " << p << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace evcap::cli
