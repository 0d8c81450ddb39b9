#include <cmath>
#include <sstream>

#include "ampsched/dense.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace ampsched;
using namespace ampsched::test;

TEST_SUITE("dense") {
  TEST_CASE("make_spd of order 1 is [[2]]") {
    const Matrix a = make_spd(1, 7);
    REQUIRE(a.rows() == 1);
    CHECK(a(0, 0) == 2.0);
  }

  TEST_CASE("make_spd is symmetric, seeded and diagonally set") {
    const Matrix a = make_spd(37, 5);
    for (std::size_t j = 0; j < 37; ++j) {
      CHECK(a(j, j) == 38.0);
      for (std::size_t i = 0; i < 37; ++i) {
        CHECK(a(i, j) == a(j, i));
        if (i != j) {
          CHECK(a(i, j) >= 0.0);
          CHECK(a(i, j) < 1.0);
        }
      }
    }
    CHECK(bitwise_equal(a, make_spd(37, 5)));
    CHECK_FALSE(bitwise_equal(a, make_spd(37, 6)));
    CHECK_THROWS_AS(make_spd(0, 1), std::invalid_argument);
  }

  TEST_CASE("make_spd(8, 42) factors without a negative pivot") {
    const Matrix a = make_spd(8, 42);
    Matrix u;
    CHECK_NOTHROW(u = ref_potrf(a));
    for (std::size_t i = 0; i < 8; ++i) CHECK(u(i, i) > 0.0);
  }

  TEST_CASE("ref_potrf hand example [[4,2],[2,3]]") {
    const Matrix a = Matrix::from_rows({{4, 2}, {2, 3}});
    const Matrix u = ref_potrf(a);
    CHECK(u(0, 0) == 2.0);
    CHECK(u(0, 1) == 1.0);
    CHECK(u(1, 0) == 0.0);
    CHECK(u(1, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(residual(a, u) <= 1e-15);
  }

  TEST_CASE("ref_potrf of identity is identity") {
    const Matrix i5 = Matrix::identity(5);
    CHECK(bitwise_equal(ref_potrf(i5), i5));
    CHECK(residual(i5, i5) == 0.0);
  }

  TEST_CASE("ref_potrf reports the failing pivot") {
    try {
      ref_potrf(Matrix::from_rows({{1, 2}, {2, 1}}));
      FAIL("expected NotPositiveDefinite");
    } catch (const NotPositiveDefinite& e) {
      CHECK(e.index() == 1);
    }
  }

  TEST_CASE("ref_potrf residual within 100 eps n and 1e-13 for random SPD") {
    for (std::size_t n : {1u, 2u, 17u, 64u, 200u, 512u}) {
      const Matrix a = make_spd(n, n + 3);
      const Matrix u = ref_potrf(a);
      const double r = residual(a, u);
      CHECK(r <= 100.0 * kEps * static_cast<double>(n));
      CHECK(r <= 1e-13);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j + 1; i < n; ++i) CHECK(u(i, j) == 0.0);
    }
  }

  TEST_CASE("residual of a zero matrix") {
    const Matrix z(3, 3);
    CHECK(residual(z, z) == 0.0);
    CHECK(std::isinf(residual(z, Matrix::identity(3))));
  }

  TEST_CASE("ref_gemm with identity A subtracts B") {
    const Matrix b = random_matrix(4, 6, 1);
    Matrix c = random_matrix(4, 6, 2);
    const Matrix c0 = c;
    ref_gemm(Matrix::identity(4).view(), b.view(), c.view());
    for (std::size_t j = 0; j < 6; ++j)
      for (std::size_t i = 0; i < 4; ++i) CHECK(c(i, j) == c0(i, j) - b(i, j));
  }

  TEST_CASE("ref_gemm is bilinear in B") {
    const Matrix a = random_matrix(9, 5, 3);
    const Matrix b1 = random_matrix(9, 7, 4);
    const Matrix b2 = random_matrix(9, 7, 5);
    Matrix bsum(9, 7);
    for (std::size_t n = 0; n < bsum.data().size(); ++n) bsum.data()[n] = b1.data()[n] + b2.data()[n];
    Matrix c_sum(5, 7), c_sep(5, 7);
    ref_gemm(a.view(), bsum.view(), c_sum.view());
    ref_gemm(a.view(), b1.view(), c_sep.view());
    ref_gemm(a.view(), b2.view(), c_sep.view());
    const double scale = max_abs(a) * (max_abs(b1) + max_abs(b2)) * 9.0;
    CHECK(max_abs_diff(c_sum, c_sep) <= 4.0 * kEps * scale);
  }

  TEST_CASE("ref_gemm rejects mismatched shapes") {
    Matrix a(3, 2), b(4, 2), c(2, 2);
    CHECK_THROWS_AS(ref_gemm(a.view(), b.view(), c.view()), std::invalid_argument);
  }

  TEST_CASE("ref_syrk with A = 0 leaves C unchanged and touches only the upper part") {
    const Matrix a(5, 4);
    Matrix c = random_matrix(4, 4, 9);
    const Matrix c0 = c;
    ref_syrk(a.view(), c.view());
    CHECK(bitwise_equal(c, c0));

    const Matrix a2 = random_matrix(5, 4, 10);
    ref_syrk(a2.view(), c.view());
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t i = j + 1; i < 4; ++i) CHECK(c(i, j) == c0(i, j));
  }

  TEST_CASE("ref_trsm solves U^T X = B") {
    const Matrix u = random_upper(30, 11);
    const Matrix b = random_matrix(30, 8, 12);
    Matrix x = b;
    ref_trsm(u.view(), x.view());
    Matrix back(30, 8);
    // back = U^T x
    for (std::size_t j = 0; j < 8; ++j)
      for (std::size_t i = 0; i < 30; ++i) {
        double v = 0.0;
        for (std::size_t p = 0; p <= i; ++p) v += u(p, i) * x(p, j);
        back(i, j) = v;
      }
    CHECK(max_abs_diff(back, b) <= 1e-13 * max_abs(b));
  }

  TEST_CASE("ref_trsm rejects a zero diagonal and bad shapes") {
    Matrix u = Matrix::identity(3);
    u(1, 1) = 0.0;
    Matrix b(3, 2);
    CHECK_THROWS_AS(ref_trsm(u.view(), b.view()), SingularMatrix);
    Matrix b2(4, 2);
    CHECK_THROWS_AS(ref_trsm(Matrix::identity(3).view(), b2.view()), std::invalid_argument);
  }

  TEST_CASE("blocked partition round-trips bitwise, ragged included") {
    for (auto [n, b] : {std::pair<std::size_t, std::size_t>{1, 1}, {7, 3}, {64, 64}, {65, 8}, {100, 33}, {6144, 448}}) {
      const Matrix a = random_matrix(n, n, n * 31 + b);
      const BlockedMatrix bm(a, b);
      CHECK(bm.block_count() == (n + b - 1) / b);
      CHECK(bm.extent(bm.block_count() - 1) == n - (bm.block_count() - 1) * b);
      CHECK(bitwise_equal(bm.assemble(), a));
    }
    const BlockedMatrix big(Matrix(6144, 6144), 448);
    CHECK(big.block_count() == 14);
    CHECK(big.extent(13) == 320);
    CHECK_THROWS_AS(BlockedMatrix(Matrix(4, 4), 0), std::invalid_argument);
    CHECK_THROWS_AS(BlockedMatrix(Matrix(4, 4), 5), std::invalid_argument);
  }

  TEST_CASE("CSV round-trip and diagnostics") {
    const Matrix a = random_matrix(3, 4, 21);
    std::stringstream ss;
    write_csv(ss, a);
    CHECK(bitwise_equal(read_csv(ss), a));
    std::istringstream bad("1,2\n3\n");
    CHECK_THROWS_WITH_AS(read_csv(bad), doctest::Contains("line 2"), std::invalid_argument);
  }
}
