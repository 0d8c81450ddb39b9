#include <algorithm>

#include "ampsched/blis.hpp"
#include "blis_internal.hpp"

namespace ampsched {
namespace {

// Blocked forward substitution for U^T X = B: solve a kc x kc diagonal block,
// then push its contribution into the trailing rows with the gemm Loop 3.
void trsm_columns(ConstMatrixView u, MatrixView b, std::size_t mc, std::size_t nc,
                  std::size_t kc) {
  const std::size_t m = u.rows;
  const std::size_t n = b.cols;
  if (m == 0 || n == 0) return;
  std::vector<double> packed(detail::round_up(std::min(nc, n), kMicroCols) * std::min(kc, m));
  for (std::size_t j0 = 0; j0 < n; j0 += nc) {
    const std::size_t nb = std::min(nc, n - j0);
    MatrixView panel = b.sub(0, j0, m, nb);
    for (std::size_t p0 = 0; p0 < m; p0 += kc) {
      const std::size_t kb = std::min(kc, m - p0);
      for (std::size_t j = 0; j < nb; ++j) {
        double* x = &panel(0, j);
        for (std::size_t i = p0; i < p0 + kb; ++i) {
          const double* ucol = &u(0, i);
          double v = x[i];
          for (std::size_t q = p0; q < i; ++q) v -= ucol[q] * x[q];
          x[i] = v / ucol[i];
        }
      }
      if (p0 + kb < m) {
        detail::pack_b_into(panel, p0, kb, 0, nb, packed.data());
        detail::loop3(u, packed.data(), {p0 + kb, m}, mc, p0, kb, 0, nb, panel, false);
      }
    }
  }
}

}  // namespace

void trsm_blocked(ConstMatrixView u, MatrixView b, const CacheParams& p) {
  detail::check_trsm_dims(u, b);
  p.validate();
  trsm_columns(u, b, p.mc, p.nc, p.kc);
}

void trsm_asym(ConstMatrixView u, MatrixView b, const LaneConfig& cfg, LanePair& lanes) {
  detail::check_trsm_dims(u, b);
  cfg.validate();
  const Loop3Split split = split_loop3(b.cols, cfg);
  auto lane = [&](RowRange cols, std::size_t mc) {
    if (cols.empty()) return;
    trsm_columns(u, b.sub(0, cols.begin, b.rows, cols.size()), mc, cfg.fast.nc, cfg.fast.kc);
  };
  if (split.slow.empty()) {
    lane(split.fast, cfg.fast.mc);
    return;
  }
  lanes.run([&] { lane(split.fast, cfg.fast.mc); }, [&] { lane(split.slow, cfg.slow.mc); });
}

void trsm_asym(ConstMatrixView u, MatrixView b, const LaneConfig& cfg) {
  LanePair lanes;
  trsm_asym(u, b, cfg, lanes);
}

}  // namespace ampsched
