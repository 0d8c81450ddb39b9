#pragma once

// Subcommands of the ampsched tool, callable from tests. Each returns the
// process exit code: 0 success, 1 verification failure, 2 usage or I/O error.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ampsched/scheduling.hpp"
#include "ampsched/sim.hpp"

namespace ampsched::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerify = 1;
inline constexpr int kExitUsage = 2;

struct BenchConfig {
  std::size_t n = 1024;
  std::vector<std::size_t> b{128};
  Policy policy;
  std::size_t workers = 4;
  std::uint64_t seed = 1;
  int reps = 3;
  std::string csv;  // empty: stdout
};

/// Header: n,b,policy,workers,seconds_min,gflops,residual,row
/// `row` is "run", or "best" for the per-n fastest block size of a sweep.
int cmd_bench(const BenchConfig& cfg, std::ostream& out, std::ostream& err);

struct SimulateConfig {
  std::string machine = "exynos5422";
  std::optional<MachineView> view;  // derived from the policy when unset
  std::size_t n = 6144;
  std::size_t b = 448;
  std::vector<Policy> policies{Policy::vc()};
  CostMode cost = CostMode::Table3;
  std::size_t fast = 4;
  std::size_t slow = 4;
  std::string dag;  // optional DAG JSON replacing the generated Cholesky DAG
  std::string csv;
  std::string trace;
};

/// Header: machine,view,policy,fast_cores,slow_cores,n,b,s,tasks,makespan_s,gflops,mean_idle
int cmd_simulate(const SimulateConfig& cfg, std::ostream& out, std::ostream& err);

struct DagConfig {
  std::size_t s = 4;
  std::string dot;
  std::string json;
  std::optional<std::size_t> n;  // with b, recorded as tile geometry in the JSON
  std::optional<std::size_t> b;
};

int cmd_dag(const DagConfig& cfg, std::ostream& out, std::ostream& err);

struct TraceConfig {
  std::string in;
  std::string summary;
  std::string kinds;  // default: summary path with "_kinds" before the extension
};

/// Writes worker,running_pct,idle_pct and worker,kind,count,mean_ms.
int cmd_trace(const TraceConfig& cfg, std::ostream& out, std::ostream& err);

struct ProbeConfig {
  std::vector<std::size_t> sizes{16, 32, 64, 96, 128, 160, 192, 256, 320, 448};
  bool simulated = false;
  int reps = 3;
  std::uint64_t seed = 1;
  std::string csv;
};

/// Header: size,flops,seq_seconds,asym_seconds,seq_gflops,asym_gflops
int cmd_probe(const ProbeConfig& cfg, std::ostream& out, std::ostream& err);

/// Reads `key=value` lines ('#' comments, blank lines ignored) into
/// "--key value" arguments.
std::vector<std::string> config_file_args(const std::string& path);

/// Full command line without the program name. Handles --config and the
/// AMPSCHED_THREADS override.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace ampsched::cli
