#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "ampsched/blis.hpp"
#include "ampsched/dense.hpp"
#include "ampsched/runtime.hpp"
#include "ampsched/task_graph.hpp"
#include "ampsched/trace.hpp"

namespace ampsched::cli {
namespace {

/// Opens `path` for writing, or hands back `fallback` when the path is empty.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
      return;
    }
    file_.open(path);
    if (!file_) throw std::runtime_error("cannot open '" + path + "' for writing");
    stream_ = &file_;
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
}

/// "a/b.json" + "cats" -> "a/b.cats.json"
std::string with_tag(const std::string& path, std::string_view tag) {
  std::filesystem::path p(path);
  const std::string ext = p.extension().string();
  p.replace_extension();
  return p.string() + "." + std::string(tag) + ext;
}

std::string with_suffix(const std::string& path, std::string_view suffix) {
  std::filesystem::path p(path);
  const std::string ext = p.extension().string();
  p.replace_extension();
  return p.string() + std::string(suffix) + ext;
}

// Verification tolerance for ||A - U^T U||_F / ||A||_F.
double residual_tolerance(std::size_t n) {
  return 100.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(n);
}

}  // namespace

int cmd_bench(const BenchConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.b.empty()) {
    err << "bench: at least one block size is required\n";
    return kExitUsage;
  }
  for (std::size_t b : cfg.b)
    if (b < 1 || b > cfg.n) {
      err << "bench: need n >= b >= 1 (n=" << cfg.n << ", b=" << b << ")\n";
      return kExitUsage;
    }
  if (cfg.reps < 1 || cfg.workers < 1) {
    err << "bench: reps and workers must be >= 1\n";
    return kExitUsage;
  }
  const auto workers = make_workers(cfg.policy, cfg.workers);
  validate_workers(cfg.policy, workers);

  Output csv(cfg.csv, out);
  auto& os = *csv;
  os.precision(10);
  os << "n,b,policy,workers,seconds_min,gflops,residual,row\n";

  const Matrix a = make_spd(cfg.n, cfg.seed);
  const double tol = residual_tolerance(cfg.n);
  struct Row {
    std::size_t b;
    double seconds;
    double residual;
  };
  std::optional<Row> best;
  bool failed = false;
  auto emit = [&](const Row& r, std::string_view kind) {
    os << cfg.n << ',' << r.b << ',' << to_string(cfg.policy.kind) << ',' << cfg.workers << ','
       << r.seconds << ',' << gflops(static_cast<double>(cfg.n), r.seconds) << ',' << r.residual << ','
       << kind << '\n';
  };

  for (std::size_t b : cfg.b) {
    const TaskGraph g = build_cholesky_dag((cfg.n + b - 1) / b);
    Row row{b, std::numeric_limits<double>::infinity(), 0.0};
    for (int rep = 0; rep < cfg.reps; ++rep) {
      BlockedMatrix m(a, b);
      const auto t0 = std::chrono::steady_clock::now();
      run(g, m, cfg.policy, workers);
      const auto t1 = std::chrono::steady_clock::now();
      // Guard against a zero reading from a coarse clock on tiny problems.
      const double secs = std::max(std::chrono::duration<double>(t1 - t0).count(), 1e-9);
      row.seconds = std::min(row.seconds, secs);
      const double res = residual(a, m.assemble());
      row.residual = std::max(row.residual, res);
      if (!(res <= tol)) {
        err << "bench: residual " << res << " exceeds " << tol << " (n=" << cfg.n << ", b=" << b
            << ", rep " << rep << ")\n";
        failed = true;
      }
    }
    emit(row, "run");
    if (!best || row.seconds < best->seconds) best = row;
  }
  if (cfg.b.size() > 1) emit(*best, "best");
  return failed ? kExitVerify : kExitOk;
}

int cmd_simulate(const SimulateConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.machine != "exynos5422") {
    err << "simulate: unknown machine '" << cfg.machine << "'\n";
    return kExitUsage;
  }
  if (cfg.policies.empty()) {
    err << "simulate: at least one policy is required\n";
    return kExitUsage;
  }

  TaskGraph g;
  std::optional<TileGeometry> geom;
  if (!cfg.dag.empty()) {
    LoadedGraph loaded = graph_from_json(read_file(cfg.dag));
    g = std::move(loaded.graph);
    geom = loaded.geometry;
  } else {
    if (cfg.b < 1 || cfg.b > cfg.n) {
      err << "simulate: need n >= b >= 1\n";
      return kExitUsage;
    }
    geom = TileGeometry{cfg.n, cfg.b};
    g = build_cholesky_dag(geom->block_count());
  }
  if (cfg.cost == CostMode::Flops && !geom) {
    err << "simulate: the flops cost model needs a DAG with tile geometry\n";
    return kExitUsage;
  }
  const CostModel cost = cfg.cost == CostMode::Flops    ? CostModel::flops(*geom)
                         : cfg.cost == CostMode::Table3 ? CostModel::table3(geom)
                                                        : CostModel::uniform(1e6);

  Output csv(cfg.csv, out);
  auto& os = *csv;
  os.precision(10);
  os << "machine,view,policy,fast_cores,slow_cores,n,b,s,tasks,makespan_s,gflops,mean_idle\n";
  for (const Policy& policy : cfg.policies) {
    const MachineView view = cfg.view.value_or(policy.kind == PolicyKind::Vc ? MachineView::Vc : MachineView::Gts);
    const MachineModel machine = exynos5422(view, cfg.fast, cfg.slow);
    const SimResult r = simulate(g, machine, cost, policy);
    const double n = geom ? static_cast<double>(geom->n) : 0.0;
    os << machine.name << ',' << to_string(view) << ',' << to_string(policy.kind) << ',' << cfg.fast << ','
       << cfg.slow << ',' << (geom ? geom->n : 0) << ',' << (geom ? geom->b : 0) << ','
       << (geom ? geom->block_count() : g.block_count()) << ',' << g.size() << ',' << r.makespan_seconds()
       << ',' << (geom && r.makespan_ns > 0 ? gflops(n, r.makespan_seconds()) : 0.0) << ','
       << r.mean_idle_fraction() << '\n';
    if (!cfg.trace.empty()) {
      const std::string path = cfg.policies.size() == 1 ? cfg.trace : with_tag(cfg.trace, to_string(policy.kind));
      write_file(path, trace_to_json(r.trace));
    }
  }
  return kExitOk;
}

int cmd_dag(const DagConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.s < 1) {
    err << "dag: s must be >= 1\n";
    return kExitUsage;
  }
  std::optional<TileGeometry> geom;
  if (cfg.n.has_value() != cfg.b.has_value()) {
    err << "dag: --n and --b go together\n";
    return kExitUsage;
  }
  if (cfg.n) {
    geom = TileGeometry{*cfg.n, *cfg.b};
    if (*cfg.b < 1 || *cfg.b > *cfg.n || geom->block_count() != cfg.s) {
      err << "dag: n=" << *cfg.n << ", b=" << *cfg.b << " does not give s=" << cfg.s << " tiles\n";
      return kExitUsage;
    }
  }
  const TaskGraph g = build_cholesky_dag(cfg.s);
  if (cfg.dot.empty())
    out << export_dot(g);
  else
    write_file(cfg.dot, export_dot(g));
  if (!cfg.json.empty()) write_file(cfg.json, graph_to_json(g, geom));
  return kExitOk;
}

int cmd_trace(const TraceConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.in.empty()) {
    err << "trace: --in is required\n";
    return kExitUsage;
  }
  const Trace trace = trace_from_json(read_file(cfg.in));
  const auto stats = idle_stats(trace, trace.wall_end_ns);
  {
    Output summary(cfg.summary, out);
    write_idle_csv(*summary, stats);
  }
  const std::string kinds = !cfg.kinds.empty() ? cfg.kinds : cfg.summary.empty() ? "" : with_suffix(cfg.summary, "_kinds");
  Output kind_out(kinds, out);
  write_kind_csv(*kind_out, kind_durations(trace));
  return kExitOk;
}

int cmd_probe(const ProbeConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.sizes.empty() || cfg.reps < 1) {
    err << "probe: need at least one size and reps >= 1\n";
    return kExitUsage;
  }
  const LaneConfig lanes;
  const auto rows = cfg.simulated ? simulated_crossover(cfg.sizes, exynos_timing_model(lanes), lanes)
                                  : kernel_crossover_probe(cfg.sizes, lanes, cfg.reps, cfg.seed);
  Output csv(cfg.csv, out);
  write_crossover_csv(*csv, rows);
  err << "crossover size: " << crossover_size(rows) << '\n';
  return kExitOk;
}

std::vector<std::string> config_file_args(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> args;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

namespace {

std::string option_key(const std::string& arg) {
  if (arg.rfind("--", 0) != 0) return {};
  return arg.substr(2, arg.find('=') == std::string::npos ? std::string::npos : arg.find('=') - 2);
}

/// Splices `--config FILE` entries into the argument list; keys already given
/// on the command line keep their command-line value.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::vector<std::string> kept;
  std::vector<std::string> files;
  for (std::size_t a = 0; a < args.size(); ++a) {
    if (args[a] == "--config") {
      if (a + 1 >= args.size()) throw CLI::ValidationError("--config", "needs a file argument");
      files.push_back(args[++a]);
    } else if (args[a].rfind("--config=", 0) == 0) {
      files.push_back(args[a].substr(9));
    } else {
      kept.push_back(args[a]);
    }
  }
  std::set<std::string> given;
  for (const auto& a : kept)
    if (auto k = option_key(a); !k.empty()) given.insert(k);
  for (const auto& f : files)
    for (auto& extra : config_file_args(f))
      if (given.insert(option_key(extra)).second) kept.push_back(std::move(extra));
  return kept;
}

std::vector<Policy> parse_policies(const std::vector<std::string>& names, double threshold, Stealing stealing) {
  std::vector<Policy> out;
  for (const auto& name : names) {
    Policy p{parse_policy_kind(name), threshold, stealing};
    p.validate();
    out.push_back(p);
  }
  return out;
}

std::size_t parse_count(const char* text, const char* what) {
  std::size_t v = 0;
  const std::string_view sv(text);
  const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
  if (ec != std::errc() || ptr != sv.data() + sv.size() || v == 0)
    throw std::invalid_argument(std::string(what) + " must be a positive integer, got '" + text + "'");
  return v;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Task-parallel Cholesky runtime and asymmetric scheduling simulator", "ampsched"};
  app.require_subcommand(1);

  BenchConfig bench;
  std::vector<std::string> bench_policy{"oblivious"};
  double threshold = 0.9;
  std::string stealing = "bi";
  auto* sc_bench = app.add_subcommand("bench", "Factor a random SPD matrix on worker threads");
  sc_bench->add_option("--n", bench.n, "Matrix order")->check(CLI::PositiveNumber);
  sc_bench->add_option("--b", bench.b, "Block size(s), comma separated")->delimiter(',');
  sc_bench->add_option("--policy", bench_policy, "oblivious|cats|vc")->delimiter(',')->expected(1);
  sc_bench->add_option("--workers", bench.workers, "Worker threads");
  sc_bench->add_option("--seed", bench.seed, "Matrix seed");
  sc_bench->add_option("--reps", bench.reps, "Repetitions (minimum time is reported)");
  sc_bench->add_option("--csv", bench.csv, "Output CSV (default stdout)");
  sc_bench->add_option("--threshold", threshold, "CATS criticality threshold");
  sc_bench->add_option("--stealing", stealing, "CATS stealing: none|uni|bi");

  SimulateConfig sim;
  std::vector<std::string> sim_policy{"vc"};
  std::string view, cost = "table3";
  auto* sc_sim = app.add_subcommand("simulate", "Replay the Cholesky DAG on a modeled machine");
  sc_sim->add_option("--machine", sim.machine, "Machine preset");
  sc_sim->add_option("--view", view, "gts|vc (default: from the policy)");
  sc_sim->add_option("--n", sim.n, "Matrix order");
  sc_sim->add_option("--b", sim.b, "Block size");
  sc_sim->add_option("--policy", sim_policy, "Policies, comma separated")->delimiter(',');
  sc_sim->add_option("--cost", cost, "flops|table3|uniform");
  sc_sim->add_option("--fast", sim.fast, "Fast cores");
  sc_sim->add_option("--slow", sim.slow, "Slow cores");
  sc_sim->add_option("--dag", sim.dag, "DAG JSON to simulate instead of the generated one");
  sc_sim->add_option("--csv", sim.csv, "Output CSV (default stdout)");
  sc_sim->add_option("--trace", sim.trace, "Trace JSON path");
  sc_sim->add_option("--threshold", threshold, "CATS criticality threshold");
  sc_sim->add_option("--stealing", stealing, "CATS stealing: none|uni|bi");

  DagConfig dag;
  auto* sc_dag = app.add_subcommand("dag", "Export the Cholesky task graph");
  sc_dag->add_option("--s", dag.s, "Tiles per dimension")->required();
  sc_dag->add_option("--dot", dag.dot, "DOT output (default stdout)");
  sc_dag->add_option("--json", dag.json, "JSON output");
  sc_dag->add_option("--n", dag.n, "Matrix order recorded in the JSON");
  sc_dag->add_option("--b", dag.b, "Block size recorded in the JSON");

  TraceConfig tr;
  auto* sc_trace = app.add_subcommand("trace", "Summarize a trace JSON");
  sc_trace->add_option("--in", tr.in, "Trace JSON")->required();
  sc_trace->add_option("--summary", tr.summary, "Idle/running CSV (default stdout)");
  sc_trace->add_option("--kinds", tr.kinds, "Per-kind mean duration CSV");

  ProbeConfig probe;
  auto* sc_probe = app.add_subcommand("probe", "gemm sequential vs dual-lane crossover");
  sc_probe->add_option("--sizes", probe.sizes, "Square sizes, comma separated")->delimiter(',');
  sc_probe->add_flag("--sim", probe.simulated, "Use the Exynos timing model instead of the host");
  sc_probe->add_option("--reps", probe.reps, "Repetitions per size");
  sc_probe->add_option("--seed", probe.seed, "Operand seed");
  sc_probe->add_option("--csv", probe.csv, "Output CSV (default stdout)");

  try {
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (sc_bench->parsed()) {
      if (const char* env = std::getenv("AMPSCHED_THREADS"); env && *env)
        bench.workers = parse_count(env, "AMPSCHED_THREADS");
      if (bench_policy.size() != 1) throw std::invalid_argument("bench takes exactly one policy");
      bench.policy = parse_policies(bench_policy, threshold, parse_stealing(stealing)).front();
      return cmd_bench(bench, out, err);
    }
    if (sc_sim->parsed()) {
      if (!view.empty()) sim.view = parse_view(view);
      sim.cost = parse_cost_mode(cost);
      sim.policies = parse_policies(sim_policy, threshold, parse_stealing(stealing));
      return cmd_simulate(sim, out, err);
    }
    if (sc_dag->parsed()) return cmd_dag(dag, out, err);
    if (sc_trace->parsed()) return cmd_trace(tr, out, err);
    if (sc_probe->parsed()) return cmd_probe(probe, out, err);
  } catch (const NotPositiveDefinite& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerify;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace ampsched::cli
