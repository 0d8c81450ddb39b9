#include "ampsched/dense.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>

namespace ampsched {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw std::invalid_argument("from_rows: ragged row");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return std::memcmp(a.data().data(), b.data().data(), a.data().size_bytes()) == 0;
}

NotPositiveDefinite::NotPositiveDefinite(std::size_t index)
    : std::runtime_error("matrix is not positive definite (pivot " + std::to_string(index) +
                         ")"),
      index_(index) {}

BlockedMatrix::BlockedMatrix(const Matrix& a, std::size_t block_size)
    : n_(a.rows()), b_(block_size) {
  if (a.rows() != a.cols()) throw std::invalid_argument("BlockedMatrix: matrix must be square");
  if (b_ < 1 || b_ > n_) throw std::invalid_argument("BlockedMatrix: need 1 <= b <= n");
  s_ = (n_ + b_ - 1) / b_;
  tiles_.reserve(s_ * s_);
  for (std::size_t bj = 0; bj < s_; ++bj) {
    for (std::size_t bi = 0; bi < s_; ++bi) {
      Matrix tile(extent(bi), extent(bj));
      for (std::size_t j = 0; j < tile.cols(); ++j)
        for (std::size_t i = 0; i < tile.rows(); ++i) tile(i, j) = a(bi * b_ + i, bj * b_ + j);
      tiles_.push_back(std::move(tile));
    }
  }
}

std::size_t BlockedMatrix::extent(std::size_t t) const {
  return t + 1 < s_ ? b_ : n_ - (s_ - 1) * b_;
}

MatrixView BlockedMatrix::block(std::size_t i, std::size_t j) {
  return tiles_.at(j * s_ + i).view();
}

ConstMatrixView BlockedMatrix::block(std::size_t i, std::size_t j) const {
  return tiles_.at(j * s_ + i).view();
}

Matrix BlockedMatrix::assemble() const {
  Matrix a(n_, n_);
  for (std::size_t bj = 0; bj < s_; ++bj)
    for (std::size_t bi = 0; bi < s_; ++bi) {
      const Matrix& tile = tiles_[bj * s_ + bi];
      for (std::size_t j = 0; j < tile.cols(); ++j)
        for (std::size_t i = 0; i < tile.rows(); ++i) a(bi * b_ + i, bj * b_ + j) = tile(i, j);
    }
  return a;
}

Matrix make_spd(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("make_spd: n must be >= 1");
  std::mt19937_64 gen(seed);
  Matrix m(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      // 53 random mantissa bits, exact in [0, 1) on every standard library.
      const double v = static_cast<double>(gen() >> 11) * 0x1.0p-53;
      m(i, j) = v;
      m(j, i) = v;
    }
    m(j, j) = static_cast<double>(n) + 1.0;
  }
  return m;
}

void potrf_in_place(MatrixView a) {
  if (a.rows != a.cols) throw std::invalid_argument("potrf: matrix must be square");
  const std::size_t n = a.rows;
  for (std::size_t j = 0; j < n; ++j) {
    const double* colj = &a(0, j);
    double d = a(j, j);
    for (std::size_t p = 0; p < j; ++p) d -= colj[p] * colj[p];
    if (!(d > 0.0)) throw NotPositiveDefinite(j);
    const double ujj = std::sqrt(d);
    a(j, j) = ujj;
    for (std::size_t i = j + 1; i < n; ++i) {
      const double* coli = &a(0, i);
      double v = a(j, i);
      for (std::size_t p = 0; p < j; ++p) v -= colj[p] * coli[p];
      a(j, i) = v / ujj;
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j + 1; i < n; ++i) a(i, j) = 0.0;
}

Matrix ref_potrf(const Matrix& a) {
  Matrix u = a;
  potrf_in_place(u.view());
  return u;
}

namespace detail {

void check_gemm_dims(ConstMatrixView a, ConstMatrixView b, MatrixView c) {
  if (a.rows != b.rows || a.cols != c.rows || b.cols != c.cols)
    throw std::invalid_argument("gemm: operands are not conformal");
}

void check_syrk_dims(ConstMatrixView a, MatrixView c) {
  if (c.rows != c.cols || a.cols != c.rows)
    throw std::invalid_argument("syrk: operands are not conformal");
}

void check_trsm_dims(ConstMatrixView u, MatrixView b) {
  if (u.rows != u.cols || u.rows != b.rows)
    throw std::invalid_argument("trsm: operands are not conformal");
  for (std::size_t i = 0; i < u.rows; ++i)
    if (u(i, i) == 0.0)
      throw SingularMatrix("trsm: zero on the diagonal at " + std::to_string(i));
}

}  // namespace detail

void ref_gemm(ConstMatrixView a, ConstMatrixView b, MatrixView c) {
  detail::check_gemm_dims(a, b, c);
  for (std::size_t j = 0; j < c.cols; ++j)
    for (std::size_t i = 0; i < c.rows; ++i) {
      double acc = 0.0;
      for (std::size_t p = 0; p < a.rows; ++p) acc += a(p, i) * b(p, j);
      c(i, j) -= acc;
    }
}

void ref_syrk(ConstMatrixView a, MatrixView c) {
  detail::check_syrk_dims(a, c);
  for (std::size_t j = 0; j < c.cols; ++j)
    for (std::size_t i = 0; i <= j; ++i) {
      double acc = 0.0;
      for (std::size_t p = 0; p < a.rows; ++p) acc += a(p, i) * a(p, j);
      c(i, j) -= acc;
    }
}

void ref_trsm(ConstMatrixView u, MatrixView b) {
  detail::check_trsm_dims(u, b);
  for (std::size_t j = 0; j < b.cols; ++j)
    for (std::size_t i = 0; i < b.rows; ++i) {
      double v = b(i, j);
      for (std::size_t q = 0; q < i; ++q) v -= u(q, i) * b(q, j);
      b(i, j) = v / u(i, i);
    }
}

double residual(const Matrix& a, const Matrix& u) {
  if (a.rows() != u.rows() || a.cols() != u.cols() || a.rows() != a.cols())
    throw std::invalid_argument("residual: shape mismatch");
  const std::size_t n = a.rows();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double* uj = u.data().data() + j * n;
    for (std::size_t i = 0; i < n; ++i) {
      const double* ui = u.data().data() + i * n;
      const std::size_t lim = std::min(i, j) + 1;
      double prod = 0.0;
      for (std::size_t p = 0; p < lim; ++p) prod += ui[p] * uj[p];
      const double diff = a(i, j) - prod;
      num += diff * diff;
      den += a(i, j) * a(i, j);
    }
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num) / std::sqrt(den);
}

}  // namespace ampsched
