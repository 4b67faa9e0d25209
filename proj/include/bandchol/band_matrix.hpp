#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <type_traits>
#include <vector>

#include "bandchol/errors.hpp"

namespace bandchol {

/// Column-major dense view. Element (r, c) lives at ptr[r + c * ld].
template <typename T>
struct BasicMatrixView {
  T* ptr = nullptr;
  index_t rows = 0;
  index_t cols = 0;
  index_t ld = 0;

  T& operator()(index_t r, index_t c) const { return ptr[r + c * ld]; }
  T* column(index_t c) const { return ptr + c * ld; }
  bool empty() const { return rows == 0 || cols == 0; }

  operator BasicMatrixView<const T>() const
    requires(!std::is_const_v<T>)
  {
    return {ptr, rows, cols, ld};
  }
};

using MatrixView = BasicMatrixView<double>;
using ConstMatrixView = BasicMatrixView<const double>;

/// Offset of in-band element (i, j) inside a lower band panel with leading
/// dimension `ldab`. Throws OutOfBand for i < j or i - j >= ldab.
index_t index_map(index_t i, index_t j, index_t ldab);

/// Symmetric positive-definite matrix in LAPACK lower band storage.
///
/// Column j holds A(j..min(N-1, j+k), j) at data[j*ldab + (i-j)]. Rows of the
/// panel past the band (or past N in the trailing columns) are padding; they
/// are kept at zero and never read by any operation.
///
/// Because the panel stride is ldab, an in-band rectangular block starting at
/// (r0, c0) is an ordinary column-major matrix with leading dimension ldab-1.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(index_t dim, index_t bandwidth);
  BandedMatrix(index_t dim, index_t bandwidth, index_t lead_dim);

  static BandedMatrix identity(index_t dim, index_t bandwidth);

  /// Packs the lower band of a column-major N x N dense matrix.
  static BandedMatrix from_dense(std::span<const double> dense, index_t dim,
                                 index_t bandwidth);

  index_t dim() const noexcept { return dim_; }
  index_t bandwidth() const noexcept { return bandwidth_; }
  index_t lead_dim() const noexcept { return lead_dim_; }

  bool in_band(index_t i, index_t j) const noexcept {
    return j >= 0 && i >= j && i < dim_ && i - j <= bandwidth_;
  }

  /// Storage offset of (i, j); throws OutOfBand outside the stored band.
  index_t offset(index_t i, index_t j) const;

  double at(index_t i, index_t j) const { return data_[offset(i, j)]; }
  double& at(index_t i, index_t j) { return data_[offset(i, j)]; }

  /// Symmetric read: returns A(max, min), or 0 outside the band.
  double get_symmetric(index_t i, index_t j) const noexcept;

  // Unchecked accessors for hot loops.
  double operator()(index_t i, index_t j) const noexcept {
    return data_[j * lead_dim_ + (i - j)];
  }
  double& operator()(index_t i, index_t j) noexcept {
    return data_[j * lead_dim_ + (i - j)];
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  /// Dense view of rows [r0, r0+rows) x cols [c0, c0+cols). Every element of
  /// the block must lie inside the band.
  MatrixView block(index_t r0, index_t c0, index_t rows, index_t cols);
  ConstMatrixView block(index_t r0, index_t c0, index_t rows,
                        index_t cols) const;

  /// Full symmetric N x N matrix, column-major.
  std::vector<double> to_dense() const;

  /// Logical equality of the in-band entries (padding is ignored).
  bool same_band_content(const BandedMatrix& other) const noexcept;

 private:
  index_t dim_ = 0;
  index_t bandwidth_ = 0;
  index_t lead_dim_ = 1;
  std::vector<double> data_;
};

/// Random strictly diagonally dominant SPD band matrix.
///
/// Off-diagonal in-band entries are uniform on [-1, 1), drawn column by column
/// (top to bottom) from std::mt19937_64 seeded with `seed`; each draw maps the
/// top 53 bits to [0, 1) and then to 2u - 1. The diagonal entry of row i is
/// 1 + sum of |A(i, j)| over its off-diagonal band (both triangles).
BandedMatrix generate_spd(index_t dim, index_t bandwidth, std::uint64_t seed);

/// ||A - L L^T||_F / ||A||_F over the band (off-diagonals counted for both
/// triangles). Returns the absolute norm when ||A||_F is zero.
double residual_norm(const BandedMatrix& original, const BandedMatrix& factor);

/// Solves L L^T x = b by banded forward and backward substitution.
std::vector<double> solve_with_factor(const BandedMatrix& factor,
                                      std::span<const double> rhs);

/// Copy of `a` stored with a wider band; the extra diagonals are zero.
BandedMatrix pad_bandwidth(const BandedMatrix& a, index_t new_bandwidth);

/// Copy of the first `bandwidth + 1` diagonals of `a`.
BandedMatrix restrict_bandwidth(const BandedMatrix& a, index_t bandwidth);

/// Binary fixture ("BNDM" header, u32 N, k, ldab, then ldab*N f64), all
/// little-endian.
void write_fixture(const BandedMatrix& a, const std::filesystem::path& path);
BandedMatrix read_fixture(const std::filesystem::path& path);

}  // namespace bandchol
