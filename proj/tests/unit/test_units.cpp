#include <doctest.h>

#include "systemflow/units.hpp"

using namespace systemflow;

TEST_SUITE("units") {
  TEST_CASE("quantities parse into canonical units") {
    CHECK(parse_as("22 pJ/bit", Dimension::energy_per_bit) == doctest::Approx(22e-12).epsilon(1e-15));
    CHECK(parse_as("2.0 MB", Dimension::bits) == 16e6);
    CHECK(parse_as("8.0 MB", Dimension::bits) == 64e6);
    CHECK(parse_as("40 MHz", Dimension::frequency) == 40e6);
    CHECK(parse_as("10.24 Gb/s", Dimension::bit_rate) == doctest::Approx(10.24e9).epsilon(1e-15));
    CHECK(parse_as("1.6 MW", Dimension::power) == 1.6e6);
    CHECK(parse_as("300 uW", Dimension::power) == doctest::Approx(300e-6).epsilon(1e-15));
    CHECK(parse_as("300 µW", Dimension::power) == doctest::Approx(300e-6).epsilon(1e-15));
    CHECK(parse_as("30 GeV", Dimension::momentum) == 30.0);
    CHECK(parse_as("500 MeV", Dimension::momentum) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(parse_as("0.1 1/GeV", Dimension::inverse_momentum) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(parse_as("2 mm/channel", Dimension::length_per_channel) == doctest::Approx(2e-3).epsilon(1e-15));
    CHECK(parse_as("3 Gop", Dimension::operations) == 3e9);
    CHECK(parse_as("0.5", Dimension::dimensionless) == 0.5);
  }

  TEST_CASE("a missing or wrong unit is a unit mismatch") {
    CHECK_THROWS_AS(parse_as("22", Dimension::energy_per_bit), UnitError);
    CHECK_THROWS_AS(parse_as("22 pJ", Dimension::energy_per_bit), UnitError);
    CHECK_THROWS_AS(parse_as("40 MHz", Dimension::bits), UnitError);
    CHECK_THROWS_AS(parse_as("forty MHz", Dimension::frequency), UnitError);
    CHECK_THROWS_AS(parse_as("4 furlongs", Dimension::length), UnitError);
    try {
      parse_as("22", Dimension::energy_per_bit);
    } catch (const UnitError& e) {
      CHECK(std::string(e.what()).find("unit mismatch") != std::string::npos);
    }
  }

  TEST_CASE("formatting round-trips exactly") {
    for (double v : {22e-12, 16e6, 0.1, 1.0 / 3.0, 2.56e15, 6.02214076e23, 5e-324}) {
      CHECK(parse_as(format_quantity(v, Dimension::energy_per_bit), Dimension::energy_per_bit) == v);
      CHECK(parse_as(format_number(v), Dimension::dimensionless) == v);
    }
    CHECK(format_number(1.4) == "1.4");
    CHECK(format_quantity(16e6, Dimension::bits) == "16000000 b");
  }

  TEST_CASE("reduction ratios") {
    CHECK(parse_ratio("400:1") == 400.0);
    CHECK(parse_ratio("160:3") == 160.0 / 3.0);
    CHECK(parse_ratio("40 MHz / 750 kHz") == 40e6 / 750e3);
    CHECK(parse_ratio("100") == 100.0);
    CHECK(format_ratio(160.0 / 3.0) == "53:1");
    CHECK(format_ratio(400.0) == "400:1");
    CHECK(parse_ratio(format_ratio_exact(160.0 / 3.0)) == 160.0 / 3.0);
    CHECK_THROWS_AS(parse_ratio("1:0"), UnitError);
    CHECK_THROWS_AS(parse_ratio("40 MHz / 2 MB"), UnitError);
  }
}
