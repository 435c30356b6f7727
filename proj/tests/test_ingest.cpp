#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "clockcast/ingest.hpp"

using namespace clockcast;

namespace {

void check_error(Errc code, long line, const Error& e) {
  CHECK(e.code() == code);
  CHECK(e.line() == line);
}

template <typename Fn>
void expect_error(Fn&& fn, Errc code, long line = -1) {
  try {
    fn();
    FAIL("expected an Error");
  } catch (const Error& e) {
    check_error(code, line, e);
  }
}

constexpr const char* kRinexFixture =
    "     3.00           C                                       RINEX VERSION / TYPE\n"
    "ccrinexn                                                    PGM / RUN BY / DATE\n"
    "                                                            END OF HEADER\n"
    "AR AREQ 2026 01 01 00 00  0.000000  2    1.000000000000e-07  1.0e-12\n"
    "AS E08  2026 01 01 00 00  0.000000  2    1.000000000000e-04  1.0e-12\n"
    "AS G01  2026 01 01 00 00  0.000000  2    9.000000000000e-04  1.0e-12\n"
    "AS E08  2026 01 01 00 05  0.000000  2    1.100000000000e-04  1.0e-12\n"
    "AS G01  2026 01 01 00 05  0.000000  2    9.100000000000e-04  1.0e-12\n"
    "AS E08  2026 01 01 00 10  0.000000  2    1.250000000000e-04  1.0e-12\n";

}  // namespace

TEST_CASE("clock CSV parses epochs and biases", "[ingest]") {
  const auto s = parse_clock_csv("epoch_s,bias_s\n0,1e-9\n600,2.5e-9\n1200,-3e-9\n");
  REQUIRE(s.records.size() == 3);
  CHECK(s.records[0] == ClockRecord{0, 1e-9});
  CHECK(s.records[1] == ClockRecord{600, 2.5e-9});
  CHECK(s.records[2] == ClockRecord{1200, -3e-9});
}

TEST_CASE("clock CSV write/parse round trip is exact", "[ingest]") {
  ClockBiasSeries s;
  s.satellite_id = "E08";
  s.records = {{0, 2.5e-4}, {600, 2.500000001e-4}, {1200, 0.1 + 0.2}};
  const ClockBiasSeries back = parse_clock_csv(write_clock_csv(s));
  CHECK(back.records == s.records);
}

TEST_CASE("clock CSV rejects bad input with 1-based line numbers", "[ingest]") {
  expect_error([] { parse_clock_csv(""); }, Errc::empty_input);
  expect_error([] { parse_clock_csv("epoch,bias\n0,1\n"); }, Errc::malformed_line, 1);
  expect_error([] { parse_clock_csv("epoch_s,bias_s\n0;1e-9\n"); }, Errc::malformed_line, 2);
  expect_error([] { parse_clock_csv("epoch_s,bias_s\n0,1e-9\nx,2e-9\n"); }, Errc::malformed_line,
               3);
  expect_error([] { parse_clock_csv("epoch_s,bias_s\n600,1e-9\n0,2e-9\n"); },
               Errc::non_monotonic_epoch, 3);
  expect_error([] { parse_clock_csv("epoch_s,bias_s\n0,1e-9\n0,2e-9\n"); },
               Errc::non_monotonic_epoch, 3);
  expect_error([] { parse_clock_csv("epoch_s,bias_s\n0,nan\n"); }, Errc::malformed_line, 2);
}

TEST_CASE("RINEX parser selects one satellite and rebases epochs", "[ingest]") {
  const auto s = parse_rinex_clk(kRinexFixture, "E08");
  REQUIRE(s.records.size() == 3);
  CHECK(s.satellite_id == "E08");
  CHECK(s.records[0] == ClockRecord{0, 1.0e-4});
  CHECK(s.records[1] == ClockRecord{300, 1.1e-4});
  CHECK(s.records[2] == ClockRecord{600, 1.25e-4});

  const auto g = parse_rinex_clk(kRinexFixture, "G01");
  REQUIRE(g.records.size() == 2);
  CHECK(g.records[1] == ClockRecord{300, 9.1e-4});
}

TEST_CASE("RINEX parser reports structural failures", "[ingest]") {
  expect_error([] { parse_rinex_clk("no header here\n", "E08"); },
               Errc::missing_header_terminator);
  expect_error([] { parse_rinex_clk(kRinexFixture, "R01"); }, Errc::satellite_not_found);
  const std::string truncated =
      "                                                            END OF HEADER\n"
      "AS E08  2026 01 01\n";
  expect_error([&] { parse_rinex_clk(truncated, "E08"); }, Errc::malformed_record, 2);
  const std::string bad_month =
      "                                                            END OF HEADER\n"
      "AS E08  2026 13 01 00 00  0.000000  2    1.000000000000e-04  1.0e-12\n";
  expect_error([&] { parse_rinex_clk(bad_month, "E08"); }, Errc::malformed_record, 2);
}

TEST_CASE("synthetic generator reproduces a pure jump", "[synth]") {
  SynthConfig cfg;
  cfg.jumps = {{600, 1e-8}};
  cfg.step_s = 600;
  cfg.duration_s = 1800;
  const auto s = generate_synthetic_clock(cfg);
  REQUIRE(s.records.size() == 3);
  CHECK(s.records[0].bias_s == 0.0);
  CHECK(s.records[1].bias_s == 1e-8);
  CHECK(s.records[2].bias_s == 1e-8);
}

TEST_CASE("synthetic generator reproduces the deterministic polynomial", "[synth]") {
  SynthConfig cfg;
  cfg.a0_s = 1e-4;
  cfg.a1_s_per_s = 2e-9;
  cfg.a2_s_per_s2 = 4e-14;
  cfg.step_s = 100;
  cfg.duration_s = 500;
  const auto s = generate_synthetic_clock(cfg);
  REQUIRE(s.records.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    const double t = 100.0 * static_cast<double>(k);
    CHECK_THAT(s.records[k].bias_s,
               Catch::Matchers::WithinULP(1e-4 + 2e-9 * t + 0.5 * 4e-14 * t * t, 4));
  }
}

TEST_CASE("synthetic white noise has the configured scale", "[synth]") {
  SynthConfig cfg;
  cfg.white_sigma_s = 1e-9;
  cfg.step_s = 1;
  cfg.duration_s = 20000;
  cfg.seed = 17;
  const auto s = generate_synthetic_clock(cfg);
  double sum2 = 0.0;
  for (const auto& r : s.records) sum2 += r.bias_s * r.bias_s;
  const double rms = std::sqrt(sum2 / static_cast<double>(s.records.size()));
  CHECK_THAT(rms, Catch::Matchers::WithinRel(1e-9, 0.05));
}

TEST_CASE("synthetic generation is seed-deterministic", "[synth]") {
  const SynthConfig cfg = default_synth_preset(9);
  const auto a = generate_synthetic_clock(cfg);
  const auto b = generate_synthetic_clock(cfg);
  CHECK(a == b);
  SynthConfig other = cfg;
  other.seed = 10;
  CHECK(generate_synthetic_clock(other).records != a.records);
}

TEST_CASE("synthetic config validation", "[synth]") {
  SynthConfig cfg;
  cfg.step_s = 0;
  cfg.duration_s = 1000;
  CHECK_THROWS_AS(generate_synthetic_clock(cfg), Error);
  cfg.step_s = 600;
  cfg.duration_s = 600;  // one sample only
  CHECK_THROWS_AS(generate_synthetic_clock(cfg), Error);
  cfg.duration_s = 1800;
  cfg.white_sigma_s = -1.0;
  CHECK_THROWS_AS(generate_synthetic_clock(cfg), Error);
  cfg.white_sigma_s = 0.0;
  cfg.periodic_amp_s = 1e-9;  // amp without period
  CHECK_THROWS_AS(generate_synthetic_clock(cfg), Error);
}

TEST_CASE("presets carry the documented structure", "[synth]") {
  const SynthConfig cfg = synth_preset("galileo", 3);
  CHECK(cfg.step_s == 600);
  CHECK(cfg.duration_s == 31 * 86400);
  CHECK(cfg.periodic_period_s == 21600.0);
  REQUIRE(cfg.jumps.size() == 1);
  CHECK(cfg.seed == 3);
  CHECK_THROWS_AS(synth_preset("nope", 0), Error);
}
