#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bandchol/band_matrix.hpp"

namespace bandchol {

enum class Impl { Reference, BlockedSerial, BlockedParallel };

std::string_view impl_name(Impl impl);
/// Accepts "reference", "blocked-serial" and "blocked-parallel".
std::optional<Impl> parse_impl(std::string_view name);

struct BenchConfig {
  index_t dim = 0;
  std::vector<index_t> bandwidths;
  std::vector<Impl> impls{Impl::Reference};
  std::optional<int> grid_dim;
  std::optional<int> workers;
  int repetitions = 10;
  std::uint64_t seed = 0;
  bool check = false;
  std::string backend = "native";
  /// Task trace of the last timed blocked-parallel repetition per bandwidth.
  std::optional<std::filesystem::path> trace_path;
  /// Testing aid: corrupts one factor entry before the residual check.
  bool inject_fault = false;
};

/// Throws std::invalid_argument describing the first problem found.
void validate(const BenchConfig& config);

/// Bandwidth actually benchmarked for a requested k: odd values are padded to
/// k + 1 and values below 2 to 2, so every implementation runs on the same
/// matrix.
index_t effective_bandwidth(index_t requested);

struct BenchRecord {
  index_t dim = 0;
  index_t bandwidth = 0;  // after padding
  int grid_dim = 0;       // 0 for the reference implementation
  int workers = 1;
  std::string impl;
  std::string backend;
  int repetitions = 0;
  double median_seconds = 0.0;
  double gflops = 0.0;
  std::optional<double> residual;

  // Not serialized.
  bool ok = true;
  std::uint64_t factor_digest = 0;
  std::string error;

  friend bool operator==(const BenchRecord& a, const BenchRecord& b);
};

enum class BenchPhase { Generate, Copy, FactorBegin, FactorEnd, Check };

/// Hooks for tests: a replacement clock (seconds) and a phase callback.
struct BenchEnvironment {
  std::function<double()> now;
  std::function<void(BenchPhase)> on_phase;
  std::ostream* log = nullptr;
};

struct BenchResult {
  std::vector<BenchRecord> records;
  bool all_ok = true;
};

/// For every (bandwidth, implementation) pair in config order: generates the
/// matrix once per bandwidth, runs one discarded warmup, then times
/// `repetitions` factorizations of fresh copies. Only the factorization is
/// inside the timed interval. GFLOP/s uses flops_exact(N, k) for all
/// implementations.
BenchResult run_benchmark(const BenchConfig& config,
                          const BenchEnvironment& env = {});

double median(std::vector<double> values);

/// 64-bit FNV-1a over the in-band bytes of a matrix.
std::uint64_t band_digest(const BandedMatrix& a);

inline constexpr std::string_view kCsvHeader =
    "N,k,n,workers,impl,backend,reps,median_seconds,gflops,residual";

/// Writes the CSV (header plus one row per record, floats with 17 significant
/// digits). Throws std::invalid_argument for an empty record list (no file is
/// created) and IoError if the path cannot be written.
void emit_csv(const std::vector<BenchRecord>& records,
              const std::filesystem::path& path);
void emit_csv(const std::vector<BenchRecord>& records, std::ostream& os);

/// Parses a CSV produced by emit_csv. Throws std::runtime_error on schema
/// mismatch.
std::vector<BenchRecord> parse_csv(const std::filesystem::path& path);
std::vector<BenchRecord> parse_csv(std::istream& is);

}  // namespace bandchol
