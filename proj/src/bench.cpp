#include "bandchol/bench.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bandchol/blocked.hpp"
#include "bandchol/flop_model.hpp"
#include "bandchol/kernels.hpp"
#include "bandchol/parallel.hpp"
#include "bandchol/reference.hpp"

namespace bandchol {

std::string_view impl_name(Impl impl) {
  switch (impl) {
    case Impl::Reference:
      return "reference";
    case Impl::BlockedSerial:
      return "blocked-serial";
    case Impl::BlockedParallel:
      return "blocked-parallel";
  }
  return "unknown";
}

std::optional<Impl> parse_impl(std::string_view name) {
  for (Impl impl : {Impl::Reference, Impl::BlockedSerial, Impl::BlockedParallel}) {
    if (impl_name(impl) == name) {
      return impl;
    }
  }
  return std::nullopt;
}

index_t effective_bandwidth(index_t requested) {
  const index_t k = std::max<index_t>(requested, 2);
  return k % 2 == 0 ? k : k + 1;
}

void validate(const BenchConfig& config) {
  if (config.dim <= 0) {
    throw std::invalid_argument("--dim must be positive");
  }
  if (config.bandwidths.empty()) {
    throw std::invalid_argument("at least one bandwidth is required");
  }
  for (index_t k : config.bandwidths) {
    if (k < 0 || k >= config.dim) {
      throw std::invalid_argument("bandwidth " + std::to_string(k) +
                                  " must satisfy 0 <= k < N");
    }
    if (effective_bandwidth(k) >= config.dim) {
      throw std::invalid_argument("padded bandwidth " +
                                  std::to_string(effective_bandwidth(k)) +
                                  " does not fit below N");
    }
  }
  if (config.impls.empty()) {
    throw std::invalid_argument("at least one implementation is required");
  }
  if (config.repetitions < 1) {
    throw std::invalid_argument("--reps must be at least 1");
  }
  if (config.workers && *config.workers < 1) {
    throw std::invalid_argument("--workers must be at least 1");
  }
  if (config.grid_dim && *config.grid_dim < 3) {
    throw std::invalid_argument("--grid-dim must be at least 3");
  }
  const auto names = available_backends();
  if (std::find(names.begin(), names.end(), config.backend) == names.end()) {
    throw std::invalid_argument("backend '" + config.backend +
                                "' is not available in this build");
  }
}

bool operator==(const BenchRecord& a, const BenchRecord& b) {
  const auto same = [](double x, double y) {
    return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y) ||
           (std::isnan(x) && std::isnan(y));
  };
  const bool residual_same =
      a.residual.has_value() == b.residual.has_value() &&
      (!a.residual || same(*a.residual, *b.residual));
  return a.dim == b.dim && a.bandwidth == b.bandwidth &&
         a.grid_dim == b.grid_dim && a.workers == b.workers &&
         a.impl == b.impl && a.backend == b.backend &&
         a.repetitions == b.repetitions &&
         same(a.median_seconds, b.median_seconds) && same(a.gflops, b.gflops) &&
         residual_same;
}

double median(std::vector<double> values) {
  if (values.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) {
    return values[mid];
  }
  return 0.5 * (values[mid - 1] + values[mid]);
}

std::uint64_t band_digest(const BandedMatrix& a) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (index_t j = 0; j < a.dim(); ++j) {
    const index_t last = std::min(a.dim() - 1, j + a.bandwidth());
    for (index_t i = j; i <= last; ++i) {
      std::uint64_t bits = std::bit_cast<std::uint64_t>(a(i, j));
      for (int b = 0; b < 8; ++b) {
        h ^= bits & 0xffu;
        h *= 0x100000001b3ull;
        bits >>= 8;
      }
    }
  }
  return h;
}

namespace {

double steady_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

BenchResult run_benchmark(const BenchConfig& config,
                          const BenchEnvironment& env) {
  validate(config);
  const auto now = env.now ? env.now : steady_seconds;
  const auto phase = [&](BenchPhase p) {
    if (env.on_phase) {
      env.on_phase(p);
    }
  };
  std::ostream& log = env.log != nullptr ? *env.log : std::clog;
  const KernelBackend& backend = backend_by_name(config.backend);

  std::optional<std::ofstream> trace_out;
  if (config.trace_path) {
    trace_out.emplace(*config.trace_path, std::ios::trunc);
    if (!*trace_out) {
      throw IoError("cannot open trace file " + config.trace_path->string());
    }
  }

  BenchResult result;
  for (index_t requested : config.bandwidths) {
    const index_t k = effective_bandwidth(requested);
    if (k != requested) {
      log << "note: bandwidth " << requested << " padded to " << k
          << " (blocked factorization needs an even band of at least 2)\n";
    }
    phase(BenchPhase::Generate);
    BandedMatrix original = generate_spd(config.dim, requested, config.seed);
    if (k != requested) {
      original = pad_bandwidth(original, k);
    }
    const FlopCount flops = flops_exact(config.dim, k);

    for (Impl impl : config.impls) {
      BenchRecord rec;
      rec.dim = config.dim;
      rec.bandwidth = k;
      rec.impl = std::string(impl_name(impl));
      rec.backend = std::string(impl == Impl::Reference ? "native"
                                                        : backend.name());
      rec.repetitions = config.repetitions;

      ExecPolicy policy = ExecPolicy::from_environment();
      if (config.workers) {
        policy.worker_count = *config.workers;
      }
      if (impl == Impl::BlockedParallel) {
        rec.workers = policy.worker_count;
      }
      if (impl != Impl::Reference) {
        const int cores = config.workers ? *config.workers : physical_core_count();
        rec.grid_dim = config.grid_dim ? *config.grid_dim : select_grid_dim(k, cores);
        plan_windows(config.dim, k, rec.grid_dim);  // usage errors surface here
      }

      TaskTrace trace;
      const auto factor = [&](BandedMatrix& a, bool record) {
        switch (impl) {
          case Impl::Reference:
            factor_reference(a);
            break;
          case Impl::BlockedSerial:
            factor_blocked_serial(a, rec.grid_dim, backend);
            break;
          case Impl::BlockedParallel:
            factor_blocked_parallel(a, rec.grid_dim, policy, backend,
                                    record ? &trace : nullptr);
            break;
        }
      };

      std::vector<double> times;
      BandedMatrix work;
      try {
        phase(BenchPhase::Copy);
        work = original;
        factor(work, false);  // warmup
        for (int r = 0; r < config.repetitions; ++r) {
          phase(BenchPhase::Copy);
          work = original;
          const bool last = r + 1 == config.repetitions;
          phase(BenchPhase::FactorBegin);
          const double t0 = now();
          factor(work, last && trace_out.has_value());
          const double t1 = now();
          phase(BenchPhase::FactorEnd);
          times.push_back(t1 - t0);
        }
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
        rec.median_seconds = std::numeric_limits<double>::quiet_NaN();
        rec.gflops = std::numeric_limits<double>::quiet_NaN();
        if (config.check) {
          rec.residual = std::numeric_limits<double>::quiet_NaN();
        }
        log << "error: " << rec.impl << " at N=" << rec.dim << " k=" << k
            << " failed: " << e.what() << '\n';
        result.all_ok = false;
        result.records.push_back(std::move(rec));
        continue;
      }

      rec.median_seconds = median(times);
      rec.gflops = static_cast<double>(flops.value) / rec.median_seconds / 1e9;
      if (config.inject_fault) {
        work(0, 0) += 1.0;
      }
      rec.factor_digest = band_digest(work);
      if (config.check) {
        phase(BenchPhase::Check);
        rec.residual = residual_norm(original, work);
        if (!(*rec.residual <= 1e-10)) {
          rec.ok = false;
          rec.error = "residual above 1e-10";
          result.all_ok = false;
          log << "error: " << rec.impl << " at N=" << rec.dim << " k=" << k
              << " residual " << *rec.residual << " exceeds 1e-10\n";
        }
      }
      if (trace_out && impl == Impl::BlockedParallel) {
        trace.write_ndjson(*trace_out);
      }
      result.records.push_back(std::move(rec));
    }
  }
  return result;
}

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) {
    out.push_back(field);
  }
  if (!line.empty() && line.back() == sep) {
    out.emplace_back();
  }
  return out;
}

double parse_double(const std::string& s, const char* column) {
  if (s == "nan") {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw std::runtime_error(std::string("CSV column '") + column +
                             "': cannot parse '" + s + "'");
  }
  return v;
}

long long parse_int(const std::string& s, const char* column) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw std::runtime_error(std::string("CSV column '") + column +
                             "': cannot parse '" + s + "'");
  }
  return v;
}

}  // namespace

void emit_csv(const std::vector<BenchRecord>& records, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const BenchRecord& r : records) {
    os << r.dim << ',' << r.bandwidth << ',' << r.grid_dim << ',' << r.workers
       << ',' << r.impl << ',' << r.backend << ',' << r.repetitions << ','
       << format_double(r.median_seconds) << ',' << format_double(r.gflops)
       << ',' << (r.residual ? format_double(*r.residual) : std::string())
       << '\n';
  }
}

void emit_csv(const std::vector<BenchRecord>& records,
              const std::filesystem::path& path) {
  if (records.empty()) {
    throw std::invalid_argument("emit_csv: no records to write");
  }
  std::ofstream os(path, std::ios::trunc | std::ios::binary);
  if (!os) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  emit_csv(records, os);
  if (!os) {
    throw IoError("write to " + path.string() + " failed");
  }
}

std::vector<BenchRecord> parse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) {
    throw std::runtime_error("CSV header does not match the benchmark schema");
  }
  std::vector<BenchRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) {
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 10) {
      throw std::runtime_error("CSV row has " + std::to_string(f.size()) +
                               " fields, expected 10");
    }
    BenchRecord r;
    r.dim = parse_int(f[0], "N");
    r.bandwidth = parse_int(f[1], "k");
    r.grid_dim = static_cast<int>(parse_int(f[2], "n"));
    r.workers = static_cast<int>(parse_int(f[3], "workers"));
    r.impl = f[4];
    r.backend = f[5];
    r.repetitions = static_cast<int>(parse_int(f[6], "reps"));
    r.median_seconds = parse_double(f[7], "median_seconds");
    r.gflops = parse_double(f[8], "gflops");
    if (!f[9].empty()) {
      r.residual = parse_double(f[9], "residual");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<BenchRecord> parse_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw IoError("cannot open " + path.string());
  }
  return parse_csv(is);
}

}  // namespace bandchol
