#pragma once

// Cache-blocked level-3 kernels in the GotoBLAS/BLIS layout (three loops
// around packing and a macro-kernel), plus dual-lane variants that split the
// Loop-3 iteration space between a fast and a slow lane.
//
// Update conventions match the right-looking upper Cholesky:
//   gemm:  C := C - A^T B      (A k x m, B k x n, C m x n)
//   syrk:  C := C - A^T A      (upper triangle only)
//   trsm:  B := U^-T B         (U upper triangular)
//
// Every element accumulates its kc-deep partial dot product in ascending
// depth order and then subtracts it from C, so results do not depend on mc or
// nc, nor on how rows/columns are divided between lanes. They do depend on kc.

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <iosfwd>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "ampsched/dense.hpp"

namespace ampsched {

struct CacheParams {
  std::size_t mc = 156;   // rows per Loop-3 block of A
  std::size_t nc = 4096;  // columns per Loop-1 panel of B/C
  std::size_t kc = 256;   // depth per Loop-2 panel

  void validate() const;
};

/// Cortex-A15 / Cortex-A7 strides. nc and kc are tunable, not measured values.
inline constexpr CacheParams kFastCacheParams{156, 4096, 256};
inline constexpr CacheParams kSlowCacheParams{32, 4096, 256};

/// Slow/fast throughput ratio implied by the Exynos 5422 gemm task times
/// (89.43 ms on a big core, 410.325 ms mean on a LITTLE core, b = 448).
inline constexpr double kExynosSlowSpeed = 89.43 / 410.325;

struct LaneConfig {
  CacheParams fast = kFastCacheParams;
  CacheParams slow = kSlowCacheParams;
  double speed_fast = 1.0;
  double speed_slow = kExynosSlowSpeed;  // 0 disables the slow lane

  void validate() const;
  static LaneConfig fast_only(CacheParams p = kFastCacheParams);
};

struct RowRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return end == begin; }
  friend bool operator==(const RowRange&, const RowRange&) = default;
};

struct Loop3Split {
  RowRange fast;
  RowRange slow;
};

/// Proportional split of [0, m): the fast lane gets the first
/// round(m * sf / (sf + ss)) rows. A slow share smaller than half the slow mc
/// is folded into the fast lane.
Loop3Split split_loop3(std::size_t m, const LaneConfig& cfg);

/// Persistent helper thread acting as the slow lane of a virtual core. The
/// caller's thread is the fast lane.
class LanePair {
 public:
  explicit LanePair(std::function<void()> on_start = {});
  ~LanePair();
  LanePair(const LanePair&) = delete;
  LanePair& operator=(const LanePair&) = delete;

  /// Runs `fast` here and `slow` on the helper, returning once both are done.
  /// An exception from either lane is rethrown after both have finished.
  void run(const std::function<void()>& fast, const std::function<void()>& slow);

 private:
  void loop(std::function<void()> on_start);

  std::mutex mu_;
  std::condition_variable cv_;
  const std::function<void()>* job_ = nullptr;
  bool done_ = false;
  bool stop_ = false;
  std::exception_ptr error_;
  std::thread helper_;
};

inline constexpr std::size_t kMicroRows = 8;
inline constexpr std::size_t kMicroCols = 4;

/// Packs B(p0 : p0+kb, j0 : j0+nb) into kMicroCols-wide slivers, each stored
/// depth-major and zero-padded to a full sliver.
std::vector<double> pack_b_panel(ConstMatrixView b, std::size_t p0, std::size_t kb,
                                 std::size_t j0, std::size_t nb);
/// Inverse of pack_b_panel for the valid (unpadded) entries.
Matrix unpack_b_panel(std::span<const double> packed, std::size_t kb, std::size_t nb);

void gemm_blocked(ConstMatrixView a, ConstMatrixView b, MatrixView c, const CacheParams& p);
void syrk_blocked(ConstMatrixView a, MatrixView c, const CacheParams& p);
void trsm_blocked(ConstMatrixView u, MatrixView b, const CacheParams& p);

/// Dual-lane kernels. Loop 1 and Loop 2 use the fast lane's nc and kc; each
/// lane packs its own A blocks with its own mc. The convenience overloads
/// spin up a temporary LanePair.
void gemm_asym(ConstMatrixView a, ConstMatrixView b, MatrixView c, const LaneConfig& cfg,
               LanePair& lanes);
void gemm_asym(ConstMatrixView a, ConstMatrixView b, MatrixView c, const LaneConfig& cfg);
void syrk_asym(ConstMatrixView a, MatrixView c, const LaneConfig& cfg, LanePair& lanes);
void syrk_asym(ConstMatrixView a, MatrixView c, const LaneConfig& cfg);
/// Splits the right-hand-side columns of B between the lanes.
void trsm_asym(ConstMatrixView u, MatrixView b, const LaneConfig& cfg, LanePair& lanes);
void trsm_asym(ConstMatrixView u, MatrixView b, const LaneConfig& cfg);

struct CrossoverRow {
  std::size_t size = 0;
  double flops = 0.0;
  double seq_seconds = 0.0;
  double asym_seconds = 0.0;

  double seq_gflops() const { return flops / seq_seconds / 1e9; }
  double asym_gflops() const { return flops / asym_seconds / 1e9; }
};

/// Times square gemm_blocked (fast lane only) against gemm_asym on this host,
/// best of `reps` runs per size.
std::vector<CrossoverRow> kernel_crossover_probe(std::span<const std::size_t> sizes,
                                                 const LaneConfig& cfg, int reps = 3,
                                                 std::uint64_t seed = 1);

/// Smallest size from which the asymmetric kernel stays strictly faster, or 0
/// if it never does.
std::size_t crossover_size(std::span<const CrossoverRow> rows);

/// Header: size,flops,seq_seconds,asym_seconds,seq_gflops,asym_gflops
void write_crossover_csv(std::ostream& out, std::span<const CrossoverRow> rows);

}  // namespace ampsched
