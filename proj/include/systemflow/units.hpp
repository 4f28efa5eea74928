#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace systemflow {

enum class Dimension {
  dimensionless,
  bits,
  operations,
  frequency,          // Hz
  bit_rate,           // bit/s
  energy,             // J
  energy_per_bit,     // J/bit
  energy_per_op,      // J/op
  power,              // W
  time,               // s
  length,             // m
  length_per_channel, // m/channel
  momentum,           // GeV
  inverse_momentum,   // 1/GeV
};

std::string_view dimension_name(Dimension d);

/// Canonical unit used when writing a value of dimension `d` back out.
std::string_view canonical_unit(Dimension d);

struct Quantity {
  double value = 0.0;  // canonical units: bits, ops, Hz, J, W, s, m, GeV
  Dimension dimension = Dimension::dimensionless;
};

class UnitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parses "<number> <unit>", e.g. "22 pJ/bit", "2.0 MB", "40 MHz", "0.1 /GeV".
/// A bare number is dimensionless. Bytes are `B`, bits are `b` or `bit`.
Quantity parse_quantity(std::string_view text);

/// Parses and checks the dimension. A bare number for a dimensioned quantity
/// is a unit mismatch.
double parse_as(std::string_view text, Dimension expected);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

/// Inverse of parse_as: "<format_number(value)> <canonical unit>".
std::string format_quantity(double value, Dimension d);

/// Reduction ratio in:out, e.g. "400:1", "160:3", "40 MHz / 750 kHz" or a bare number.
double parse_ratio(std::string_view text);

/// Displays a ratio as "N:1" with N rounded to an integer when within 1e-9,
/// or otherwise truncated, so 160/3 shows as "53:1".
std::string format_ratio(double ratio);

/// Exact textual form for config round trips ("160:3" rather than "53:1").
std::string format_ratio_exact(double ratio);

}  // namespace systemflow
