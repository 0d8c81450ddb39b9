#include <algorithm>
#include <chrono>
#include <limits>
#include <ostream>
#include <random>

#include "ampsched/blis.hpp"

namespace ampsched {
namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = dist(gen);
  return m;
}

template <typename F>
double best_of(int reps, F&& body) {
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  // Clock granularity floor so rates stay finite for tiny sizes.
  return std::max(best, 1e-9);
}

}  // namespace

std::vector<CrossoverRow> kernel_crossover_probe(std::span<const std::size_t> sizes,
                                                 const LaneConfig& cfg, int reps,
                                                 std::uint64_t seed) {
  if (sizes.empty()) throw std::invalid_argument("kernel_crossover_probe: no sizes");
  if (reps < 1) throw std::invalid_argument("kernel_crossover_probe: reps must be >= 1");
  cfg.validate();
  std::mt19937_64 gen(seed);
  LanePair lanes;
  std::vector<CrossoverRow> rows;
  for (std::size_t n : sizes) {
    const Matrix a = random_matrix(n, n, gen);
    const Matrix b = random_matrix(n, n, gen);
    Matrix c(n, n);
    CrossoverRow row;
    row.size = n;
    row.flops = 2.0 * static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(n);
    row.seq_seconds = best_of(reps, [&] { gemm_blocked(a.view(), b.view(), c.view(), cfg.fast); });
    row.asym_seconds = best_of(reps, [&] { gemm_asym(a.view(), b.view(), c.view(), cfg, lanes); });
    rows.push_back(row);
  }
  return rows;
}

std::size_t crossover_size(std::span<const CrossoverRow> rows) {
  std::size_t result = 0;
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (!(it->asym_seconds < it->seq_seconds)) break;
    result = it->size;
  }
  return result;
}

void write_crossover_csv(std::ostream& out, std::span<const CrossoverRow> rows) {
  const auto old_precision = out.precision(10);
  out << "size,flops,seq_seconds,asym_seconds,seq_gflops,asym_gflops\n";
  for (const auto& r : rows) {
    out << r.size << ',' << r.flops << ',' << r.seq_seconds << ',' << r.asym_seconds << ','
        << r.seq_gflops() << ',' << r.asym_gflops() << '\n';
  }
  out.precision(old_precision);
}

}  // namespace ampsched
