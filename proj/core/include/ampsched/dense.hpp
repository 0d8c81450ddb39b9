#pragma once

// Dense column-major storage, blocked partitioning and the naive reference
// kernels used as oracles for the cache-blocked ones.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ampsched {

/// Strided column-major view. Element (i, j) lives at data[j * ld + i].
struct MatrixView {
  double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t ld = 0;

  double& operator()(std::size_t i, std::size_t j) const { return data[j * ld + i]; }

  MatrixView sub(std::size_t row0, std::size_t col0, std::size_t nrows,
                 std::size_t ncols) const {
    return {data + col0 * ld + row0, nrows, ncols, ld};
  }
};

struct ConstMatrixView {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t ld = 0;

  ConstMatrixView() = default;
  ConstMatrixView(const double* d, std::size_t r, std::size_t c, std::size_t l)
      : data(d), rows(r), cols(c), ld(l) {}
  ConstMatrixView(MatrixView v)  // NOLINT(google-explicit-constructor)
      : data(v.data), rows(v.rows), cols(v.cols), ld(v.ld) {}

  const double& operator()(std::size_t i, std::size_t j) const { return data[j * ld + i]; }

  ConstMatrixView sub(std::size_t row0, std::size_t col0, std::size_t nrows,
                      std::size_t ncols) const {
    return {data + col0 * ld + row0, nrows, ncols, ld};
  }
};

/// Owning dense matrix of doubles, column-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);

  static Matrix identity(std::size_t n);
  /// Row-major literal, handy in tests: {{4, 2}, {2, 3}}.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  MatrixView view() { return {data_.data(), rows_, cols_, rows_}; }
  ConstMatrixView view() const { return {data_.data(), rows_, cols_, rows_}; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// True when both matrices have the same shape and identical bit patterns.
bool bitwise_equal(const Matrix& a, const Matrix& b);

class NotPositiveDefinite : public std::runtime_error {
 public:
  explicit NotPositiveDefinite(std::size_t index);
  /// Zero-based index of the first non-positive pivot.
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class SingularMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// n x n matrix partitioned into ceil(n/b)^2 contiguous tiles. The last tile
/// row/column is ragged when b does not divide n.
class BlockedMatrix {
 public:
  BlockedMatrix(const Matrix& a, std::size_t block_size);

  std::size_t order() const { return n_; }
  std::size_t block_size() const { return b_; }
  std::size_t block_count() const { return s_; }
  /// Rows (or columns) of tile index `t`.
  std::size_t extent(std::size_t t) const;

  MatrixView block(std::size_t i, std::size_t j);
  ConstMatrixView block(std::size_t i, std::size_t j) const;

  Matrix assemble() const;

 private:
  std::size_t n_;
  std::size_t b_;
  std::size_t s_;
  std::vector<Matrix> tiles_;
};

/// Symmetric, diagonally dominant test matrix. Off-diagonal entries are
/// uniform in [0, 1) from a seeded generator, the diagonal is n + 1.
Matrix make_spd(std::size_t n, std::uint64_t seed);

/// Unblocked upper Cholesky, A = U^T U. Throws NotPositiveDefinite.
Matrix ref_potrf(const Matrix& a);

/// In-place variant used by the tile kernel: overwrites the upper triangle with
/// U and zeroes the strict lower triangle. Same arithmetic as ref_potrf.
void potrf_in_place(MatrixView a);

/// C := C - A^T B with A k x m, B k x n, C m x n.
void ref_gemm(ConstMatrixView a, ConstMatrixView b, MatrixView c);

/// Upper triangle of C := C - A^T A with A k x m, C m x m. Strict lower part untouched.
void ref_syrk(ConstMatrixView a, MatrixView c);

/// Solves U^T X = B in place (B := X) for upper-triangular U (m x m), B m x n.
void ref_trsm(ConstMatrixView u, MatrixView b);

/// ||A - U^T U||_F / ||A||_F.
double residual(const Matrix& a, const Matrix& u);

void write_csv(std::ostream& out, const Matrix& m);
Matrix read_csv(std::istream& in);

namespace detail {
void check_gemm_dims(ConstMatrixView a, ConstMatrixView b, MatrixView c);
void check_syrk_dims(ConstMatrixView a, MatrixView c);
void check_trsm_dims(ConstMatrixView u, MatrixView b);
}  // namespace detail

}  // namespace ampsched
