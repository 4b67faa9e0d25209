#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "bandchol/bench.hpp"
#include "bandchol/flop_model.hpp"
#include "support/golden.hpp"

using namespace bandchol;

namespace {

BenchConfig small_config() {
  BenchConfig c;
  c.dim = 500;
  c.bandwidths = {8};
  c.repetitions = 3;
  c.check = true;
  return c;
}

std::ostringstream quiet;

BenchEnvironment quiet_env() {
  BenchEnvironment env;
  env.log = &quiet;
  return env;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() /
         ("bandchol_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST_CASE("reference record") {
  const BenchResult r = run_benchmark(small_config(), quiet_env());
  REQUIRE(r.records.size() == 1);
  const BenchRecord& rec = r.records[0];
  CHECK(r.all_ok);
  CHECK(rec.impl == "reference");
  CHECK(rec.grid_dim == 0);
  CHECK(rec.bandwidth == 8);
  REQUIRE(rec.residual.has_value());
  CHECK(*rec.residual <= 1e-10);
  CHECK(rec.gflops > 0.0);
  CHECK(rec.gflops == doctest::Approx(static_cast<double>(flops_exact(500, 8).value) /
                                      rec.median_seconds / 1e9));
}

TEST_CASE("odd bandwidth is padded") {
  BenchConfig c = small_config();
  c.bandwidths = {7};
  std::ostringstream log;
  BenchEnvironment env;
  env.log = &log;
  const BenchResult r = run_benchmark(c, env);
  CHECK(r.records.at(0).bandwidth == 8);
  CHECK(log.str().find("padded to 8") != std::string::npos);
  CHECK(effective_bandwidth(0) == 2);
  CHECK(effective_bandwidth(1) == 2);
  CHECK(effective_bandwidth(2) == 2);
  CHECK(effective_bandwidth(9) == 10);
}

TEST_CASE("serial and parallel rows agree") {
  BenchConfig c = small_config();
  c.impls = {Impl::BlockedSerial, Impl::BlockedParallel};
  c.workers = 1;
  const BenchResult r = run_benchmark(c, quiet_env());
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0].factor_digest == r.records[1].factor_digest);
  CHECK(*r.records[0].residual == *r.records[1].residual);
  CHECK(r.records[1].workers == 1);
}

TEST_CASE("records follow config order") {
  BenchConfig c = small_config();
  c.bandwidths = {4, 2};
  c.impls = {Impl::BlockedParallel, Impl::Reference};
  c.workers = 2;
  const BenchResult r = run_benchmark(c, quiet_env());
  REQUIRE(r.records.size() == 4);
  CHECK(r.records[0].bandwidth == 4);
  CHECK(r.records[0].impl == "blocked-parallel");
  CHECK(r.records[1].impl == "reference");
  CHECK(r.records[2].bandwidth == 2);
}

TEST_CASE("only the factorization is timed") {
  double clock = 0.0;
  std::vector<std::string> events;
  BenchEnvironment env = quiet_env();
  env.now = [&] {
    events.push_back("now");
    const double t = clock;
    clock += 1.0;
    return t;
  };
  env.on_phase = [&](BenchPhase p) {
    switch (p) {
      case BenchPhase::Generate:
        events.push_back("generate");
        clock += 1000.0;
        break;
      case BenchPhase::Copy:
        events.push_back("copy");
        clock += 1000.0;
        break;
      case BenchPhase::FactorBegin:
        events.push_back("begin");
        break;
      case BenchPhase::FactorEnd:
        events.push_back("end");
        break;
      case BenchPhase::Check:
        events.push_back("check");
        clock += 1000.0;
        break;
    }
  };
  BenchConfig c = small_config();
  c.repetitions = 5;
  c.impls = {Impl::Reference, Impl::BlockedSerial};
  const BenchResult r = run_benchmark(c, env);
  for (const BenchRecord& rec : r.records) {
    CHECK(rec.median_seconds == 1.0);
  }
  // Every clock pair is bracketed by begin/end with nothing in between.
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i] == "begin") {
      REQUIRE(i + 3 < events.size());
      CHECK(events[i + 1] == "now");
      CHECK(events[i + 2] == "now");
      CHECK(events[i + 3] == "end");
    }
  }
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(std::isnan(median({})));
}

TEST_CASE("config validation") {
  BenchConfig c = small_config();
  c.bandwidths = {500};
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = small_config();
  c.repetitions = 0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = small_config();
  c.backend = "no-such-backend";
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = small_config();
  c.impls.clear();
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  CHECK(parse_impl("blocked-serial") == Impl::BlockedSerial);
  CHECK_FALSE(parse_impl("blocked").has_value());
}

TEST_CASE("factorization failure becomes a failed row") {
  BenchConfig c = small_config();
  c.inject_fault = true;
  const BenchResult r = run_benchmark(c, quiet_env());
  CHECK_FALSE(r.all_ok);
  CHECK_FALSE(r.records.at(0).ok);
  CHECK(*r.records[0].residual > 1e-10);
}

TEST_CASE("CSV round trip") {
  std::vector<BenchRecord> recs(3);
  recs[0] = {100, 8, 0, 1, "reference", "native", 10, 0.1, 1.0 / 3.0, 1e-17};
  recs[1] = {100, 8, 3, 4, "blocked-parallel", "native", 10, 2.5e-5, 123.456789,
             std::nullopt};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  recs[2] = {100, 8, 3, 4, "blocked-serial", "openblas", 10, nan, nan, nan};
  std::stringstream ss;
  emit_csv(recs, ss);
  const auto back = parse_csv(ss);
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i] == recs[i]);
  }

  const auto path = temp_path("roundtrip.csv");
  emit_csv(std::vector<BenchRecord>{recs[0]}, path);
  std::ifstream in(path);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
  }
  CHECK(lines == 2);
  CHECK(parse_csv(path).at(0) == recs[0]);
  std::filesystem::remove(path);
}

TEST_CASE("CSV errors") {
  const auto path = temp_path("empty.csv");
  std::filesystem::remove(path);
  CHECK_THROWS_AS(emit_csv({}, path), std::invalid_argument);
  CHECK_FALSE(std::filesystem::exists(path));
  std::istringstream bad("N,k\n1,2\n");
  CHECK_THROWS(parse_csv(bad));
  std::istringstream short_row(std::string(kCsvHeader) + "\n1,2,3\n");
  CHECK_THROWS(parse_csv(short_row));
  CHECK_THROWS_AS(emit_csv(std::vector<BenchRecord>(1), "/nonexistent/dir/x.csv"),
                  IoError);
}

TEST_CASE("golden CSV with timing masked") {
  BenchConfig c;
  c.dim = 64;
  c.bandwidths = {0, 4, 7};
  c.impls = {Impl::Reference, Impl::BlockedSerial, Impl::BlockedParallel};
  c.grid_dim = 3;
  c.workers = 2;
  c.repetitions = 2;
  c.seed = 42;
  c.check = true;
  const BenchResult r = run_benchmark(c, quiet_env());
  std::ostringstream os;
  emit_csv(r.records, os);
  std::ifstream golden(std::string(BANDCHOL_TEST_DATA_DIR) + "/golden_bench.csv");
  REQUIRE(golden);
  std::stringstream expect;
  expect << golden.rdbuf();
  CHECK(testing_support::mask_timing(os.str()) == expect.str());
}
