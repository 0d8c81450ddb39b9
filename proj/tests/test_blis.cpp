#include <algorithm>
#include <stdexcept>
#include <vector>

#include "ampsched/blis.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace ampsched;
using namespace ampsched::test;

namespace {

std::vector<std::size_t> sweep_values(std::size_t all) { return {1, 2, 3, 5, 8, all}; }

Matrix gemm_ref(const Matrix& a, const Matrix& b, Matrix c) {
  ref_gemm(a.view(), b.view(), c.view());
  return c;
}

LaneConfig lanes_with(CacheParams fast, CacheParams slow, double sf, double ss) {
  LaneConfig cfg;
  cfg.fast = fast;
  cfg.slow = slow;
  cfg.speed_fast = sf;
  cfg.speed_slow = ss;
  return cfg;
}

}  // namespace

TEST_SUITE("blis") {
  TEST_CASE("gemm_blocked with identity A subtracts B exactly") {
    const Matrix b = random_matrix(6, 11, 3);
    for (CacheParams p : {CacheParams{1, 1, 1}, CacheParams{2, 3, 2}, CacheParams{}}) {
      Matrix c = random_matrix(6, 11, 4);
      const Matrix c0 = c;
      gemm_blocked(Matrix::identity(6).view(), b.view(), c.view(), p);
      for (std::size_t j = 0; j < 11; ++j)
        for (std::size_t i = 0; i < 6; ++i) CHECK(c(i, j) == c0(i, j) - b(i, j));
    }
  }

  TEST_CASE("gemm_blocked 7x5x9 with (mc,nc,kc) = (2,3,2) matches the oracle") {
    const Matrix a = random_matrix(5, 7, 10), b = random_matrix(5, 9, 11), c = random_matrix(7, 9, 12);
    Matrix got = c;
    gemm_blocked(a.view(), b.view(), got.view(), {2, 3, 2});
    const Matrix want = gemm_ref(a, b, c);
    CHECK(max_abs_diff(got, want) <= kernel_tol(5, std::max({max_abs(a), max_abs(b), max_abs(c)})));
  }

  TEST_CASE("single-panel strides reproduce the oracle") {
    const Matrix a = random_matrix(13, 21, 1), b = random_matrix(13, 17, 2), c = random_matrix(21, 17, 3);
    Matrix got = c;
    gemm_blocked(a.view(), b.view(), got.view(), {21, 17, 13});
    CHECK(bitwise_equal(got, gemm_ref(a, b, c)));
  }

  TEST_CASE("gemm/syrk/trsm blocked and dual-lane match oracles over a stride sweep") {
    struct Shape {
      std::size_t m, n, k;
    };
    for (Shape sh : {Shape{7, 9, 5}, Shape{33, 17, 29}, Shape{64, 64, 64}}) {
      const Matrix a = random_matrix(sh.k, sh.m, sh.m * 7 + 1);
      const Matrix b = random_matrix(sh.k, sh.n, sh.n * 7 + 2);
      const Matrix c = random_matrix(sh.m, sh.n, sh.k * 7 + 3);
      const Matrix cs = random_matrix(sh.m, sh.m, sh.k * 7 + 4);
      const Matrix u = random_upper(sh.m, sh.m + 5);
      const Matrix rhs = random_matrix(sh.m, sh.n, sh.n + 6);
      const double tol = kernel_tol(sh.k, std::max({max_abs(a), max_abs(b), max_abs(c), max_abs(cs)}));

      const Matrix g_want = gemm_ref(a, b, c);
      Matrix s_want = cs;
      ref_syrk(a.view(), s_want.view());
      Matrix t_want = rhs;
      ref_trsm(u.view(), t_want.view());
      const double t_tol = kernel_tol(sh.m, std::max(max_abs(t_want), max_abs(rhs)));

      for (std::size_t mc : sweep_values(sh.m))
        for (std::size_t nc : sweep_values(sh.n))
          for (std::size_t kc : sweep_values(sh.k)) {
            const CacheParams p{mc, nc, kc};
            CAPTURE(mc);
            CAPTURE(nc);
            CAPTURE(kc);
            Matrix g = c;
            gemm_blocked(a.view(), b.view(), g.view(), p);
            CHECK(max_abs_diff(g, g_want) <= tol);
            Matrix s = cs;
            syrk_blocked(a.view(), s.view(), p);
            CHECK(max_abs_diff(s, s_want) <= tol);
            Matrix t = rhs;
            trsm_blocked(u.view(), t.view(), p);
            CHECK(max_abs_diff(t, t_want) <= t_tol);

            const LaneConfig cfg = lanes_with(p, {std::max<std::size_t>(1, mc / 2), nc, kc}, 1.0, 0.6);
            Matrix ga = c;
            gemm_asym(a.view(), b.view(), ga.view(), cfg);
            CHECK(bitwise_equal(ga, g));
            Matrix sa = cs;
            syrk_asym(a.view(), sa.view(), cfg);
            CHECK(bitwise_equal(sa, s));
            Matrix ta = rhs;
            trsm_asym(u.view(), ta.view(), cfg);
            CHECK(bitwise_equal(ta, t));
          }
    }
  }

  TEST_CASE("split_loop3 examples") {
    const LaneConfig cfg = lanes_with(kFastCacheParams, kSlowCacheParams, 4.56, 1.0);
    const Loop3Split s = split_loop3(312, cfg);
    CHECK(s.fast == RowRange{0, 256});
    CHECK(s.slow == RowRange{256, 312});

    const Loop3Split off = split_loop3(100, lanes_with(kFastCacheParams, kSlowCacheParams, 1.0, 0.0));
    CHECK(off.fast == RowRange{0, 100});
    CHECK(off.slow.empty());

    const Loop3Split none = split_loop3(0, cfg);
    CHECK(none.fast.empty());
    CHECK(none.slow.empty());
  }

  TEST_CASE("split_loop3 folds a sliver smaller than half the slow mc") {
    const LaneConfig cfg = lanes_with(kFastCacheParams, kSlowCacheParams, 4.56, 1.0);
    // 64 * 1/5.56 = 11.5 -> 12 slow rows < 16: folded.
    const Loop3Split s = split_loop3(64, cfg);
    CHECK(s.fast == RowRange{0, 64});
    CHECK(s.slow.empty());
    // 96 -> 17 slow rows >= 16: kept.
    CHECK(split_loop3(96, cfg).slow.size() == 17);
  }

  TEST_CASE("split_loop3 partitions [0, m) and the fast share is monotone in speed_fast") {
    for (std::size_t m : {0u, 1u, 15u, 100u, 448u, 1000u}) {
      std::size_t prev = 0;
      for (double sf = 0.1; sf < 20.0; sf *= 1.3) {
        const Loop3Split s = split_loop3(m, lanes_with(kFastCacheParams, kSlowCacheParams, sf, 1.0));
        CHECK(s.fast.begin == 0);
        CHECK(s.fast.end == s.slow.begin);
        CHECK(s.slow.end == m);
        CHECK(s.fast.size() >= prev);
        prev = s.fast.size();
      }
    }
  }

  TEST_CASE("gemm_asym with the slow lane disabled is bitwise gemm_blocked") {
    const Matrix a = random_matrix(40, 50, 1), b = random_matrix(40, 30, 2), c = random_matrix(50, 30, 3);
    const LaneConfig cfg = lanes_with({7, 9, 11}, {3, 9, 11}, 1.0, 0.0);
    Matrix x = c, y = c;
    gemm_asym(a.view(), b.view(), x.view(), cfg);
    gemm_blocked(a.view(), b.view(), y.view(), cfg.fast);
    CHECK(bitwise_equal(x, y));
  }

  TEST_CASE("single-lane syrk_asym and trsm_asym equal the blocked kernels") {
    const LaneConfig cfg = LaneConfig::fast_only({5, 7, 6});
    const Matrix a = random_matrix(20, 24, 1);
    Matrix s1 = random_matrix(24, 24, 2), s2 = s1;
    syrk_asym(a.view(), s1.view(), cfg);
    syrk_blocked(a.view(), s2.view(), cfg.fast);
    CHECK(bitwise_equal(s1, s2));
    const Matrix u = random_upper(24, 3);
    Matrix t1 = random_matrix(24, 10, 4), t2 = t1;
    trsm_asym(u.view(), t1.view(), cfg);
    trsm_blocked(u.view(), t2.view(), cfg.fast);
    CHECK(bitwise_equal(t1, t2));
  }

  TEST_CASE("gemm_asym 300^3 with default lanes matches the oracle") {
    const Matrix a = random_matrix(300, 300, 1), b = random_matrix(300, 300, 2), c = random_matrix(300, 300, 3);
    Matrix got = c;
    gemm_asym(a.view(), b.view(), got.view(), LaneConfig{});
    CHECK(max_abs_diff(got, gemm_ref(a, b, c)) <= kernel_tol(300, 1.0));
  }

  TEST_CASE("syrk_asym with A = 0 leaves C unchanged") {
    const Matrix a(30, 200);
    Matrix c = random_matrix(200, 200, 9);
    const Matrix c0 = c;
    syrk_asym(a.view(), c.view(), LaneConfig{});
    CHECK(bitwise_equal(c, c0));
  }

  TEST_CASE("trsm_asym at b = 448 has a small triangular residual") {
    const std::size_t m = 448;
    const Matrix u = random_upper(m, 17);
    const Matrix b = random_matrix(m, m, 18);
    Matrix x = b;
    trsm_asym(u.view(), x.view(), LaneConfig{});
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < m; ++i) {
        double v = 0.0;
        for (std::size_t p = 0; p <= i; ++p) v += u(p, i) * x(p, j);
        num += (v - b(i, j)) * (v - b(i, j));
        den += b(i, j) * b(i, j);
      }
    CHECK(std::sqrt(num / den) <= 1e-12);
  }

  TEST_CASE("packed B panel unpacks bitwise") {
    const Matrix b = random_matrix(19, 23, 5);
    for (auto [p0, kb, j0, nb] : {std::array<std::size_t, 4>{0, 19, 0, 23}, {3, 7, 5, 9}, {18, 1, 22, 1}}) {
      const auto packed = pack_b_panel(b.view(), p0, kb, j0, nb);
      const Matrix back = unpack_b_panel(packed, kb, nb);
      for (std::size_t j = 0; j < nb; ++j)
        for (std::size_t p = 0; p < kb; ++p) CHECK(back(p, j) == b(p0 + p, j0 + j));
    }
  }

  TEST_CASE("kernels reject bad shapes and strides") {
    Matrix a(3, 4), b(3, 5), c(4, 6);
    CHECK_THROWS_AS(gemm_blocked(a.view(), b.view(), c.view(), {}), std::invalid_argument);
    Matrix c2(4, 5);
    CHECK_THROWS_AS(gemm_blocked(a.view(), b.view(), c2.view(), {0, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(lanes_with({}, {}, 0.0, 1.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(lanes_with({}, {}, 1.0, -1.0).validate(), std::invalid_argument);
  }

  TEST_CASE("LanePair runs both lanes and rethrows lane errors") {
    LanePair pair;
    int fast = 0, slow = 0;
    for (int r = 0; r < 50; ++r) pair.run([&] { ++fast; }, [&] { ++slow; });
    CHECK(fast == 50);
    CHECK(slow == 50);
    CHECK_THROWS_AS(pair.run([] {}, [] { throw std::runtime_error("slow lane"); }), std::runtime_error);
    CHECK_THROWS_AS(pair.run([] { throw std::logic_error("fast lane"); }, [] {}), std::logic_error);
    pair.run([&] { ++fast; }, [&] { ++slow; });
    CHECK(slow == 51);
  }

  TEST_CASE("host crossover probe table shape") {
    const std::vector<std::size_t> one{1};
    const auto rows = kernel_crossover_probe(one, LaneConfig{}, 1);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].seq_seconds > 0.0);
    CHECK(rows[0].asym_seconds > 0.0);

    const std::vector<std::size_t> sizes{4, 8, 16, 32};
    const auto many = kernel_crossover_probe(sizes, LaneConfig{}, 1);
    for (std::size_t r = 1; r < many.size(); ++r) CHECK(many[r].flops >= many[r - 1].flops);
    CHECK_THROWS_AS(kernel_crossover_probe(std::vector<std::size_t>{}, LaneConfig{}), std::invalid_argument);
  }

  TEST_CASE("crossover_size is the start of the trailing winning run") {
    std::vector<CrossoverRow> rows{{16, 0, 1.0, 2.0}, {32, 0, 1.0, 0.5}, {48, 0, 1.0, 2.0}, {64, 0, 1.0, 0.5}, {80, 0, 1.0, 0.5}};
    CHECK(crossover_size(rows) == 64);
    rows.back().asym_seconds = 3.0;
    CHECK(crossover_size(rows) == 0);
  }
}
