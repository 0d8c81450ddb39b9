#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ampsched/blis.hpp"
#include "blis_internal.hpp"

namespace ampsched {

void CacheParams::validate() const {
  if (mc < 1 || nc < 1 || kc < 1) throw std::invalid_argument("CacheParams: mc, nc, kc must be >= 1");
}

void LaneConfig::validate() const {
  fast.validate();
  slow.validate();
  if (!(speed_fast > 0.0)) throw std::invalid_argument("LaneConfig: speed_fast must be > 0");
  if (!(speed_slow >= 0.0)) throw std::invalid_argument("LaneConfig: speed_slow must be >= 0");
}

LaneConfig LaneConfig::fast_only(CacheParams p) {
  LaneConfig cfg;
  cfg.fast = p;
  cfg.speed_slow = 0.0;
  return cfg;
}

Loop3Split split_loop3(std::size_t m, const LaneConfig& cfg) {
  if (m == 0) return {};
  if (cfg.speed_slow <= 0.0) return {{0, m}, {m, m}};
  const double share = static_cast<double>(m) * cfg.speed_fast / (cfg.speed_fast + cfg.speed_slow);
  auto f = static_cast<std::size_t>(std::llround(share));
  f = std::min(f, m);
  if (static_cast<double>(m - f) < static_cast<double>(cfg.slow.mc) / 2.0) f = m;
  return {{0, f}, {f, m}};
}

namespace detail {

double* scratch_a(std::size_t count) {
  thread_local std::vector<double> buf;
  if (buf.size() < count) buf.resize(count);
  return buf.data();
}

void pack_a_block(ConstMatrixView a, std::size_t p0, std::size_t kb, std::size_t i0,
                  std::size_t mb, double* dst) {
  // A^T(i0 + i, p0 + p) = A(p0 + p, i0 + i); slivers of kMicroRows rows.
  for (std::size_t is = 0; is < mb; is += kMicroRows) {
    const std::size_t rows = std::min(kMicroRows, mb - is);
    for (std::size_t p = 0; p < kb; ++p) {
      for (std::size_t r = 0; r < rows; ++r) dst[r] = a(p0 + p, i0 + is + r);
      for (std::size_t r = rows; r < kMicroRows; ++r) dst[r] = 0.0;
      dst += kMicroRows;
    }
  }
}

void pack_b_into(ConstMatrixView b, std::size_t p0, std::size_t kb, std::size_t j0,
                 std::size_t nb, double* dst) {
  for (std::size_t js = 0; js < nb; js += kMicroCols) {
    const std::size_t cols = std::min(kMicroCols, nb - js);
    for (std::size_t p = 0; p < kb; ++p) {
      for (std::size_t c = 0; c < cols; ++c) dst[c] = b(p0 + p, j0 + js + c);
      for (std::size_t c = cols; c < kMicroCols; ++c) dst[c] = 0.0;
      dst += kMicroCols;
    }
  }
}

namespace {

inline void micro_kernel(std::size_t kb, const double* __restrict pa, const double* __restrict pb,
                         double (&acc)[kMicroCols][kMicroRows]) {
  for (auto& col : acc)
    for (double& v : col) v = 0.0;
  for (std::size_t p = 0; p < kb; ++p) {
    for (std::size_t c = 0; c < kMicroCols; ++c) {
      const double bv = pb[c];
      for (std::size_t r = 0; r < kMicroRows; ++r) acc[c][r] += pa[r] * bv;
    }
    pa += kMicroRows;
    pb += kMicroCols;
  }
}

// C(i0 + i, j0 + j) -= packed_a * packed_b over an mb x nb block.
void macro_kernel(const double* pa, const double* pb, std::size_t mb, std::size_t nb,
                  std::size_t kb, MatrixView c, std::size_t i0, std::size_t j0, bool upper) {
  double acc[kMicroCols][kMicroRows];
  for (std::size_t js = 0; js < nb; js += kMicroCols) {
    const std::size_t cols = std::min(kMicroCols, nb - js);
    const double* bsliver = pb + (js / kMicroCols) * kMicroCols * kb;
    const std::size_t last_col = j0 + js + cols - 1;
    for (std::size_t is = 0; is < mb; is += kMicroRows) {
      const std::size_t first_row = i0 + is;
      if (upper && first_row > last_col) break;
      const std::size_t rows = std::min(kMicroRows, mb - is);
      const double* asliver = pa + (is / kMicroRows) * kMicroRows * kb;
      micro_kernel(kb, asliver, bsliver, acc);
      for (std::size_t cc = 0; cc < cols; ++cc) {
        const std::size_t gj = j0 + js + cc;
        double* ccol = &c(first_row, gj);
        std::size_t rlim = rows;
        if (upper) {
          if (first_row > gj) continue;
          rlim = std::min(rows, gj - first_row + 1);
        }
        for (std::size_t r = 0; r < rlim; ++r) ccol[r] -= acc[cc][r];
      }
    }
  }
}

}  // namespace

void loop3(ConstMatrixView a, const double* packed_b, RowRange rows, std::size_t mc,
           std::size_t p0, std::size_t kb, std::size_t j0, std::size_t nb, MatrixView c,
           bool upper) {
  if (rows.empty() || nb == 0 || kb == 0) return;
  double* pa = scratch_a(round_up(std::min(mc, rows.size()), kMicroRows) * kb);
  for (std::size_t i0 = rows.begin; i0 < rows.end; i0 += mc) {
    if (upper && i0 > j0 + nb - 1) break;
    const std::size_t mb = std::min(mc, rows.end - i0);
    pack_a_block(a, p0, kb, i0, mb, pa);
    macro_kernel(pa, packed_b, mb, nb, kb, c, i0, j0, upper);
  }
}

}  // namespace detail

std::vector<double> pack_b_panel(ConstMatrixView b, std::size_t p0, std::size_t kb,
                                 std::size_t j0, std::size_t nb) {
  if (p0 + kb > b.rows || j0 + nb > b.cols) throw std::invalid_argument("pack_b_panel: out of range");
  std::vector<double> out(detail::round_up(nb, kMicroCols) * kb);
  detail::pack_b_into(b, p0, kb, j0, nb, out.data());
  return out;
}

Matrix unpack_b_panel(std::span<const double> packed, std::size_t kb, std::size_t nb) {
  if (packed.size() < detail::round_up(nb, kMicroCols) * kb)
    throw std::invalid_argument("unpack_b_panel: buffer too small");
  Matrix m(kb, nb);
  for (std::size_t j = 0; j < nb; ++j) {
    const std::size_t sliver = j / kMicroCols;
    const std::size_t lane = j % kMicroCols;
    for (std::size_t p = 0; p < kb; ++p)
      m(p, j) = packed[sliver * kMicroCols * kb + p * kMicroCols + lane];
  }
  return m;
}

namespace {

// Loops 1 and 2 shared by gemm and syrk. `run_loop3` receives the packed panel
// and the Loop-3 row limit for the current (j0, p0) iteration.
template <typename Loop3>
void outer_loops(ConstMatrixView b, std::size_t m, std::size_t n, std::size_t k, std::size_t nc,
                 std::size_t kc, bool upper, Loop3&& run_loop3) {
  if (m == 0 || n == 0 || k == 0) return;
  std::vector<double> packed_b(detail::round_up(std::min(nc, n), kMicroCols) * std::min(kc, k));
  for (std::size_t j0 = 0; j0 < n; j0 += nc) {
    const std::size_t nb = std::min(nc, n - j0);
    const std::size_t row_limit = upper ? std::min(m, j0 + nb) : m;
    for (std::size_t p0 = 0; p0 < k; p0 += kc) {
      const std::size_t kb = std::min(kc, k - p0);
      detail::pack_b_into(b, p0, kb, j0, nb, packed_b.data());
      run_loop3(packed_b.data(), row_limit, p0, kb, j0, nb);
    }
  }
}

template <typename Loop3>
void dual_lane(const LaneConfig& cfg, LanePair* lanes, std::size_t rows, Loop3&& lane_body) {
  const Loop3Split split = split_loop3(rows, cfg);
  if (split.slow.empty()) {
    lane_body(split.fast, cfg.fast.mc);
    return;
  }
  lanes->run([&] { lane_body(split.fast, cfg.fast.mc); },
             [&] { lane_body(split.slow, cfg.slow.mc); });
}

}  // namespace

void gemm_blocked(ConstMatrixView a, ConstMatrixView b, MatrixView c, const CacheParams& p) {
  detail::check_gemm_dims(a, b, c);
  p.validate();
  outer_loops(b, c.rows, c.cols, a.rows, p.nc, p.kc, false,
              [&](const double* pb, std::size_t rows, std::size_t p0, std::size_t kb,
                  std::size_t j0, std::size_t nb) {
                detail::loop3(a, pb, {0, rows}, p.mc, p0, kb, j0, nb, c, false);
              });
}

void gemm_asym(ConstMatrixView a, ConstMatrixView b, MatrixView c, const LaneConfig& cfg,
               LanePair& lanes) {
  detail::check_gemm_dims(a, b, c);
  cfg.validate();
  outer_loops(b, c.rows, c.cols, a.rows, cfg.fast.nc, cfg.fast.kc, false,
              [&](const double* pb, std::size_t rows, std::size_t p0, std::size_t kb,
                  std::size_t j0, std::size_t nb) {
                dual_lane(cfg, &lanes, rows, [&](RowRange r, std::size_t mc) {
                  detail::loop3(a, pb, r, mc, p0, kb, j0, nb, c, false);
                });
              });
}

void gemm_asym(ConstMatrixView a, ConstMatrixView b, MatrixView c, const LaneConfig& cfg) {
  LanePair lanes;
  gemm_asym(a, b, c, cfg, lanes);
}

void syrk_blocked(ConstMatrixView a, MatrixView c, const CacheParams& p) {
  detail::check_syrk_dims(a, c);
  p.validate();
  outer_loops(a, c.rows, c.cols, a.rows, p.nc, p.kc, true,
              [&](const double* pb, std::size_t rows, std::size_t p0, std::size_t kb,
                  std::size_t j0, std::size_t nb) {
                detail::loop3(a, pb, {0, rows}, p.mc, p0, kb, j0, nb, c, true);
              });
}

void syrk_asym(ConstMatrixView a, MatrixView c, const LaneConfig& cfg, LanePair& lanes) {
  detail::check_syrk_dims(a, c);
  cfg.validate();
  outer_loops(a, c.rows, c.cols, a.rows, cfg.fast.nc, cfg.fast.kc, true,
              [&](const double* pb, std::size_t rows, std::size_t p0, std::size_t kb,
                  std::size_t j0, std::size_t nb) {
                dual_lane(cfg, &lanes, rows, [&](RowRange r, std::size_t mc) {
                  detail::loop3(a, pb, r, mc, p0, kb, j0, nb, c, true);
                });
              });
}

void syrk_asym(ConstMatrixView a, MatrixView c, const LaneConfig& cfg) {
  LanePair lanes;
  syrk_asym(a, c, cfg, lanes);
}

}  // namespace ampsched
