#include <doctest.h>

#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "bandchol/blocked.hpp"
#include "bandchol/reference.hpp"
#include "support/helpers.hpp"

using namespace bandchol;
using testing_support::max_band_rel_diff;

TEST_CASE("plan_windows examples") {
  const WindowPlan p = plan_windows(9, 2, 3);
  CHECK(p.block_size() == 1);
  CHECK(p.window_count() == 9);
  CHECK(plan_windows(100, 2, 3).window_count() == 100);
  CHECK(plan_windows(100, 8, 5).block_size() == 2);
  CHECK(plan_windows(100, 8, 5).window_count() == 50);
  CHECK(plan_windows(101, 8, 5).window_count() == 51);
  CHECK_THROWS_AS(plan_windows(10, 3, 3), BandwidthNotDivisible);
  CHECK_THROWS_AS(plan_windows(10, 2, 2), GridTooSmall);
  CHECK_THROWS_AS(plan_windows(10, 1, 3), InvalidBandwidth);
  CHECK_THROWS_AS(plan_windows(10, 10, 3), InvalidBandwidth);
}

TEST_CASE("window geometry") {
  for (auto [dim, k, n] : std::vector<std::tuple<index_t, index_t, int>>{
           {9, 2, 3}, {50, 6, 4}, {53, 8, 5}, {30, 12, 7}}) {
    const WindowPlan p = plan_windows(dim, k, n);
    const index_t b = p.block_size();
    for (index_t t = 0; t < p.window_count(); ++t) {
      const WindowDesc w = p.window(t);
      CHECK(w.start == t * b);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
          const CellExtent e = w.cell(i, j);
          CHECK(e.row_end <= dim);
          CHECK(e.col_end <= dim);
          CHECK(e.trapezoid == (i == n - 1 && j == 0));
          if (e.present()) {
            CHECK(e.rows() <= b);
            CHECK(e.cols() <= b);
          }
          // Cell (i, j) of window t is cell (i - 1, j - 1) of window t + 1.
          if (i > 0 && j > 0 && t + 1 < p.window_count()) {
            const CellExtent alias = p.cell(t + 1, i - 1, j - 1);
            CHECK(alias.row_begin == e.row_begin);
            CHECK(alias.row_end == e.row_end);
            CHECK(alias.col_begin == e.col_begin);
            CHECK(alias.col_end == e.col_end);
          }
        }
      }
    }
    // The leading diagonal blocks tile [0, N).
    index_t covered = 0;
    for (index_t t = 0; t < p.window_count(); ++t) {
      const CellExtent d = p.cell(t, 0, 0);
      CHECK(d.row_begin == covered);
      covered = d.row_end;
    }
    CHECK(covered == dim);
  }
}

TEST_CASE("window program for n = 3") {
  const WindowPlan p = plan_windows(40, 4, 3);
  const std::vector<BlockStep> expect{
      {StepKind::FactorDiag, 0, 0, 0},      {StepKind::SolvePanel, 0, 1, 0},
      {StepKind::UpdateSymmetric, 0, 1, 1}, {StepKind::CopyIn, 0, 2, 0},
      {StepKind::SolvePanel, 0, 2, 0},      {StepKind::UpdateGeneral, 0, 2, 1},
      {StepKind::UpdateSymmetric, 0, 2, 2}, {StepKind::CopyBack, 0, 2, 0},
  };
  CHECK(window_program(p, 0) == expect);
  // The last windows lose the cells clamped past N.
  CHECK(window_program(p, p.window_count() - 1).size() == 1);
  CHECK(window_program(p, p.window_count() - 2).size() == 3);
}

TEST_CASE("identity is a fixed point") {
  for (int n : {3, 5}) {
    auto a = BandedMatrix::identity(20, 4);
    factor_blocked_serial(a, n);
    CHECK(a.same_band_content(BandedMatrix::identity(20, 4)));
  }
}

TEST_CASE("blocked serial agrees with the reference") {
  const BandedMatrix a = generate_spd(120, 8, 5);
  BandedMatrix ref = a;
  factor_reference(ref);
  for (int n : {3, 5, 9}) {
    CAPTURE(n);
    BandedMatrix blk = a;
    factor_blocked_serial(blk, n);
    CHECK(max_band_rel_diff(blk, ref) <= 1e-11);
    CHECK(residual_norm(a, blk) <= 1e-12);
  }
  for (auto [dim, k] : std::vector<std::pair<index_t, index_t>>{
           {3, 2}, {7, 2}, {37, 6}, {257, 12}, {301, 100}}) {
    CAPTURE(dim);
    CAPTURE(k);
    const BandedMatrix m = generate_spd(dim, k, 11);
    BandedMatrix r = m;
    factor_reference(r);
    BandedMatrix s = m;
    factor_blocked_serial(s, 3);
    CHECK(max_band_rel_diff(s, r) <= 1e-11);
  }
}

TEST_CASE("hand-built 2x2 inside a padded band") {
  BandedMatrix a = BandedMatrix::identity(6, 2);
  a(0, 0) = 4;
  a(1, 0) = 2;
  a(1, 1) = 5;
  factor_blocked_serial(a, 3);
  CHECK(a(0, 0) == 2.0);
  CHECK(a(1, 0) == 1.0);
  CHECK(a(1, 1) == 2.0);
  CHECK(a(2, 2) == 1.0);
}

TEST_CASE("grid dimensions give the same factor") {
  const BandedMatrix a = generate_spd(500, 24, 9);
  BandedMatrix base = a;
  factor_blocked_serial(base, 3);
  for (int n : {4, 5, 7, 9, 13, 25}) {
    CAPTURE(n);
    BandedMatrix x = a;
    factor_blocked_serial(x, n);
    CHECK(max_band_rel_diff(x, base) <= 1e-12);
  }
}

TEST_CASE("every in-band entry is finalized exactly once") {
  // Count the steps that leave each lower-band entry in final form: the
  // factor of the diagonal block and the panel solves.
  for (auto [dim, k, n] : std::vector<std::tuple<index_t, index_t, int>>{
           {30, 4, 3}, {41, 6, 4}, {29, 12, 5}}) {
    BandedMatrix a = generate_spd(dim, k, 2);
    const WindowPlan p = plan_windows(dim, k, n);
    std::vector<int> hits(static_cast<std::size_t>(dim * (k + 1)), 0);
    factor_blocked_serial(a, n, native_kernels(),
                          [&](const BlockStep& s, const WorkArray&) {
                            if (s.kind != StepKind::FactorDiag &&
                                s.kind != StepKind::SolvePanel) {
                              return;
                            }
                            const CellExtent e = p.cell(s.window, s.row, s.col);
                            for (index_t c = e.col_begin; c < e.col_end; ++c) {
                              for (index_t r = std::max(c, e.row_begin);
                                   r < e.row_end; ++r) {
                                if (r - c <= k) {
                                  ++hits[static_cast<std::size_t>(c * (k + 1) + r - c)];
                                }
                              }
                            }
                          });
    for (index_t c = 0; c < dim; ++c) {
      for (index_t r = c; r <= std::min(dim - 1, c + k); ++r) {
        CHECK(hits[static_cast<std::size_t>(c * (k + 1) + r - c)] == 1);
      }
    }
  }
}

TEST_CASE("work array keeps a zero strict lower triangle") {
  BandedMatrix a = generate_spd(60, 6, 4);
  int observed = 0;
  factor_blocked_serial(a, 4, native_kernels(),
                        [&](const BlockStep& s, const WorkArray& w) {
                          if (s.row == 3 && s.kind != StepKind::CopyIn) {
                            ++observed;
                            CHECK(w.strict_lower_is_zero());
                          }
                        });
  CHECK(observed > 0);
}

TEST_CASE("indefinite input reports the global column") {
  BandedMatrix a = generate_spd(50, 4, 1);
  a(23, 23) = -1.0;
  try {
    factor_blocked_serial(a, 3);
    FAIL("expected NotPositiveDefinite");
  } catch (const NotPositiveDefinite& e) {
    CHECK(e.column() == 23);
  }
}

TEST_CASE("kernel step trace") {
  BandedMatrix a = generate_spd(12, 4, 0);
  std::vector<BlockStep> trace;
  factor_blocked_serial(a, 3, native_kernels(),
                        [&](const BlockStep& s, const WorkArray&) {
                          trace.push_back(s);
                        });
  const WindowPlan p = plan_windows(12, 4, 3);
  std::vector<BlockStep> expect;
  for (index_t t = 0; t < p.window_count(); ++t) {
    const auto w = window_program(p, t);
    expect.insert(expect.end(), w.begin(), w.end());
  }
  CHECK(trace == expect);
  std::vector<StepKind> first;
  for (std::size_t i = 0; i < 8; ++i) {
    first.push_back(trace[i].kind);
  }
  CHECK(first == std::vector<StepKind>{
                     StepKind::FactorDiag, StepKind::SolvePanel,
                     StepKind::UpdateSymmetric, StepKind::CopyIn,
                     StepKind::SolvePanel, StepKind::UpdateGeneral,
                     StepKind::UpdateSymmetric, StepKind::CopyBack});
}
