#include "bandchol/band_matrix.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <random>

namespace bandchol {

index_t index_map(index_t i, index_t j, index_t ldab) {
  if (j < 0 || i < j || i - j >= ldab) {
    throw OutOfBand(i, j);
  }
  return j * ldab + (i - j);
}

BandedMatrix::BandedMatrix(index_t dim, index_t bandwidth)
    : BandedMatrix(dim, bandwidth, bandwidth + 1) {}

BandedMatrix::BandedMatrix(index_t dim, index_t bandwidth, index_t lead_dim)
    : dim_(dim), bandwidth_(bandwidth), lead_dim_(lead_dim) {
  if (dim <= 0) {
    throw InvalidBandwidth("matrix order must be positive");
  }
  if (bandwidth < 0 || bandwidth >= dim) {
    throw InvalidBandwidth("bandwidth " + std::to_string(bandwidth) +
                           " must satisfy 0 <= k < N = " + std::to_string(dim));
  }
  if (lead_dim < bandwidth + 1) {
    throw InvalidBandwidth("leading dimension must be at least k + 1");
  }
  data_.assign(static_cast<std::size_t>(lead_dim * dim), 0.0);
}

BandedMatrix BandedMatrix::identity(index_t dim, index_t bandwidth) {
  BandedMatrix m(dim, bandwidth);
  for (index_t j = 0; j < dim; ++j) {
    m(j, j) = 1.0;
  }
  return m;
}

BandedMatrix BandedMatrix::from_dense(std::span<const double> dense,
                                      index_t dim, index_t bandwidth) {
  if (static_cast<index_t>(dense.size()) != dim * dim) {
    throw ShapeMismatch("dense array must hold N*N entries");
  }
  BandedMatrix m(dim, bandwidth);
  for (index_t j = 0; j < dim; ++j) {
    const index_t last = std::min(dim - 1, j + bandwidth);
    for (index_t i = j; i <= last; ++i) {
      m(i, j) = dense[static_cast<std::size_t>(i + j * dim)];
    }
  }
  return m;
}

index_t BandedMatrix::offset(index_t i, index_t j) const {
  if (!in_band(i, j)) {
    throw OutOfBand(i, j);
  }
  return j * lead_dim_ + (i - j);
}

double BandedMatrix::get_symmetric(index_t i, index_t j) const noexcept {
  if (i < j) {
    std::swap(i, j);
  }
  return in_band(i, j) ? (*this)(i, j) : 0.0;
}

MatrixView BandedMatrix::block(index_t r0, index_t c0, index_t rows,
                               index_t cols) {
  return {data_.data() + c0 * lead_dim_ + (r0 - c0), rows, cols,
          lead_dim_ - 1};
}

ConstMatrixView BandedMatrix::block(index_t r0, index_t c0, index_t rows,
                                    index_t cols) const {
  return {data_.data() + c0 * lead_dim_ + (r0 - c0), rows, cols,
          lead_dim_ - 1};
}

std::vector<double> BandedMatrix::to_dense() const {
  std::vector<double> dense(static_cast<std::size_t>(dim_ * dim_), 0.0);
  for (index_t j = 0; j < dim_; ++j) {
    const index_t last = std::min(dim_ - 1, j + bandwidth_);
    for (index_t i = j; i <= last; ++i) {
      const double v = (*this)(i, j);
      dense[static_cast<std::size_t>(i + j * dim_)] = v;
      dense[static_cast<std::size_t>(j + i * dim_)] = v;
    }
  }
  return dense;
}

bool BandedMatrix::same_band_content(const BandedMatrix& other) const noexcept {
  if (dim_ != other.dim_ || bandwidth_ != other.bandwidth_) {
    return false;
  }
  for (index_t j = 0; j < dim_; ++j) {
    const index_t last = std::min(dim_ - 1, j + bandwidth_);
    for (index_t i = j; i <= last; ++i) {
      if (std::bit_cast<std::uint64_t>((*this)(i, j)) !=
          std::bit_cast<std::uint64_t>(other(i, j))) {
        return false;
      }
    }
  }
  return true;
}

BandedMatrix generate_spd(index_t dim, index_t bandwidth, std::uint64_t seed) {
  if (dim <= 0 || bandwidth < 0 || bandwidth >= dim) {
    throw InvalidBandwidth("generate_spd requires 0 <= k < N");
  }
  BandedMatrix a(dim, bandwidth);
  std::mt19937_64 rng(seed);
  std::vector<double> off_sum(static_cast<std::size_t>(dim), 0.0);
  for (index_t j = 0; j < dim; ++j) {
    const index_t last = std::min(dim - 1, j + bandwidth);
    for (index_t i = j + 1; i <= last; ++i) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      const double v = 2.0 * u - 1.0;
      a(i, j) = v;
      off_sum[static_cast<std::size_t>(i)] += std::abs(v);
      off_sum[static_cast<std::size_t>(j)] += std::abs(v);
    }
  }
  for (index_t i = 0; i < dim; ++i) {
    a(i, i) = 1.0 + off_sum[static_cast<std::size_t>(i)];
  }
  return a;
}

double residual_norm(const BandedMatrix& original, const BandedMatrix& factor) {
  if (original.dim() != factor.dim() ||
      original.bandwidth() != factor.bandwidth()) {
    throw ShapeMismatch("residual_norm: operands differ in order or bandwidth");
  }
  const index_t n = original.dim();
  const index_t k = original.bandwidth();
  double diff_sq = 0.0;
  double norm_sq = 0.0;
  for (index_t j = 0; j < n; ++j) {
    const index_t last = std::min(n - 1, j + k);
    for (index_t i = j; i <= last; ++i) {
      double llt = 0.0;
      for (index_t l = std::max<index_t>(0, i - k); l <= j; ++l) {
        llt += factor(i, l) * factor(j, l);
      }
      const double a = original(i, j);
      const double weight = (i == j) ? 1.0 : 2.0;
      diff_sq += weight * (a - llt) * (a - llt);
      norm_sq += weight * a * a;
    }
  }
  if (norm_sq == 0.0) {
    return std::sqrt(diff_sq);
  }
  return std::sqrt(diff_sq / norm_sq);
}

std::vector<double> solve_with_factor(const BandedMatrix& factor,
                                      std::span<const double> rhs) {
  const index_t n = factor.dim();
  const index_t k = factor.bandwidth();
  if (static_cast<index_t>(rhs.size()) != n) {
    throw ShapeMismatch("right-hand side length must equal N");
  }
  for (index_t j = 0; j < n; ++j) {
    if (!(factor(j, j) > 0.0)) {
      throw SingularFactor("factor has a non-positive diagonal at " +
                           std::to_string(j));
    }
  }
  std::vector<double> x(rhs.begin(), rhs.end());
  // L y = b
  for (index_t i = 0; i < n; ++i) {
    double t = x[static_cast<std::size_t>(i)];
    for (index_t l = std::max<index_t>(0, i - k); l < i; ++l) {
      t -= factor(i, l) * x[static_cast<std::size_t>(l)];
    }
    x[static_cast<std::size_t>(i)] = t / factor(i, i);
  }
  // L^T x = y
  for (index_t i = n - 1; i >= 0; --i) {
    double t = x[static_cast<std::size_t>(i)];
    const index_t last = std::min(n - 1, i + k);
    for (index_t l = i + 1; l <= last; ++l) {
      t -= factor(l, i) * x[static_cast<std::size_t>(l)];
    }
    x[static_cast<std::size_t>(i)] = t / factor(i, i);
  }
  return x;
}

BandedMatrix pad_bandwidth(const BandedMatrix& a, index_t new_bandwidth) {
  if (new_bandwidth < a.bandwidth()) {
    throw InvalidBandwidth("cannot pad to a narrower band");
  }
  if (new_bandwidth >= a.dim()) {
    throw InvalidBandwidth("padded bandwidth must stay below N");
  }
  BandedMatrix out(a.dim(), new_bandwidth);
  for (index_t j = 0; j < a.dim(); ++j) {
    const index_t last = std::min(a.dim() - 1, j + a.bandwidth());
    for (index_t i = j; i <= last; ++i) {
      out(i, j) = a(i, j);
    }
  }
  return out;
}

BandedMatrix restrict_bandwidth(const BandedMatrix& a, index_t bandwidth) {
  if (bandwidth > a.bandwidth() || bandwidth < 0) {
    throw InvalidBandwidth("restricted bandwidth must lie in [0, k]");
  }
  BandedMatrix out(a.dim(), bandwidth);
  for (index_t j = 0; j < a.dim(); ++j) {
    const index_t last = std::min(a.dim() - 1, j + bandwidth);
    for (index_t i = j; i <= last; ++i) {
      out(i, j) = a(i, j);
    }
  }
  return out;
}

namespace {

constexpr std::array<char, 4> kMagic = {'B', 'N', 'D', 'M'};

void put_u32(std::ostream& os, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int s = 0; s < 4; ++s) {
    b[static_cast<std::size_t>(s)] = static_cast<char>((v >> (8 * s)) & 0xffu);
  }
  os.write(b.data(), b.size());
}

void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int s = 0; s < 8; ++s) {
    b[static_cast<std::size_t>(s)] = static_cast<char>((v >> (8 * s)) & 0xffu);
  }
  os.write(b.data(), b.size());
}

template <typename U>
U get_le(std::istream& is) {
  std::array<unsigned char, sizeof(U)> b{};
  is.read(reinterpret_cast<char*>(b.data()), b.size());
  if (!is) {
    throw IoError("fixture truncated");
  }
  U v = 0;
  for (std::size_t s = 0; s < sizeof(U); ++s) {
    v |= static_cast<U>(b[s]) << (8 * s);
  }
  return v;
}

}  // namespace

void write_fixture(const BandedMatrix& a, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  os.write(kMagic.data(), kMagic.size());
  put_u32(os, static_cast<std::uint32_t>(a.dim()));
  put_u32(os, static_cast<std::uint32_t>(a.bandwidth()));
  put_u32(os, static_cast<std::uint32_t>(a.lead_dim()));
  for (index_t j = 0; j < a.dim(); ++j) {
    for (index_t r = 0; r < a.lead_dim(); ++r) {
      const bool stored = r <= a.bandwidth() && j + r < a.dim();
      const double v = stored ? a.data()[static_cast<std::size_t>(
                                    j * a.lead_dim() + r)]
                              : 0.0;
      put_u64(os, std::bit_cast<std::uint64_t>(v));
    }
  }
  if (!os) {
    throw IoError("write to " + path.string() + " failed");
  }
}

BandedMatrix read_fixture(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw IoError("cannot open " + path.string());
  }
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) {
    throw IoError(path.string() + " is not a BNDM fixture");
  }
  const auto n = static_cast<index_t>(get_le<std::uint32_t>(is));
  const auto k = static_cast<index_t>(get_le<std::uint32_t>(is));
  const auto ldab = static_cast<index_t>(get_le<std::uint32_t>(is));
  BandedMatrix a(n, k, ldab);
  for (auto& v : a.data()) {
    v = std::bit_cast<double>(get_le<std::uint64_t>(is));
  }
  return a;
}

}  // namespace bandchol
