#include "systemflow/units.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <utility>

namespace systemflow {

namespace {

// Base atoms before dimension combination.
enum class Atom { one, joule, bit, op, watt, hertz, second, meter, ev, channel };

struct AtomValue {
  Atom atom;
  double scale;
};

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::optional<AtomValue> base_atom(std::string_view s) {
  if (s == "J") return AtomValue{Atom::joule, 1};
  if (s == "b" || s == "bit" || s == "bits") return AtomValue{Atom::bit, 1};
  if (s == "B" || s == "byte" || s == "bytes") return AtomValue{Atom::bit, 8};
  if (s == "op" || s == "ops") return AtomValue{Atom::op, 1};
  if (s == "W") return AtomValue{Atom::watt, 1};
  if (s == "Hz") return AtomValue{Atom::hertz, 1};
  if (s == "s") return AtomValue{Atom::second, 1};
  if (s == "m") return AtomValue{Atom::meter, 1};
  if (s == "eV") return AtomValue{Atom::ev, 1e-9};  // canonical momentum unit is GeV
  if (s == "channel") return AtomValue{Atom::channel, 1};
  return std::nullopt;
}

std::optional<double> prefix_scale(std::string_view p) {
  if (p == "p") return 1e-12;
  if (p == "n") return 1e-9;
  if (p == "u" || p == "\xC2\xB5" || p == "\xCE\xBC") return 1e-6;
  if (p == "m") return 1e-3;
  if (p == "k") return 1e3;
  if (p == "M") return 1e6;
  if (p == "G") return 1e9;
  if (p == "T") return 1e12;
  if (p == "P") return 1e15;
  return std::nullopt;
}

std::optional<AtomValue> parse_atom(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s == "1") return AtomValue{Atom::one, 1};
  if (auto a = base_atom(s)) return a;
  // Prefixes are one byte, except the two-byte UTF-8 micro signs.
  for (size_t plen : {size_t{1}, size_t{2}}) {
    if (s.size() <= plen) continue;
    auto scale = prefix_scale(s.substr(0, plen));
    if (!scale) continue;
    auto base = base_atom(s.substr(plen));
    if (base && base->atom != Atom::channel) return AtomValue{base->atom, base->scale * *scale};
  }
  return std::nullopt;
}

std::optional<Dimension> combine(Atom num, std::optional<Atom> den) {
  if (!den) {
    switch (num) {
      case Atom::one: return Dimension::dimensionless;
      case Atom::joule: return Dimension::energy;
      case Atom::bit: return Dimension::bits;
      case Atom::op: return Dimension::operations;
      case Atom::watt: return Dimension::power;
      case Atom::hertz: return Dimension::frequency;
      case Atom::second: return Dimension::time;
      case Atom::meter: return Dimension::length;
      case Atom::ev: return Dimension::momentum;
      case Atom::channel: return std::nullopt;
    }
  }
  if (num == Atom::joule && *den == Atom::bit) return Dimension::energy_per_bit;
  if (num == Atom::joule && *den == Atom::op) return Dimension::energy_per_op;
  if (num == Atom::bit && *den == Atom::second) return Dimension::bit_rate;
  if (num == Atom::meter && *den == Atom::channel) return Dimension::length_per_channel;
  if (num == Atom::one && *den == Atom::ev) return Dimension::inverse_momentum;
  if (num == Atom::one && *den == Atom::second) return Dimension::frequency;
  return std::nullopt;
}

}  // namespace

std::string_view dimension_name(Dimension d) {
  switch (d) {
    case Dimension::dimensionless: return "dimensionless";
    case Dimension::bits: return "bits";
    case Dimension::operations: return "operations";
    case Dimension::frequency: return "frequency";
    case Dimension::bit_rate: return "bit rate";
    case Dimension::energy: return "energy";
    case Dimension::energy_per_bit: return "energy per bit";
    case Dimension::energy_per_op: return "energy per operation";
    case Dimension::power: return "power";
    case Dimension::time: return "time";
    case Dimension::length: return "length";
    case Dimension::length_per_channel: return "length per channel";
    case Dimension::momentum: return "momentum";
    case Dimension::inverse_momentum: return "inverse momentum";
  }
  return "?";
}

std::string_view canonical_unit(Dimension d) {
  switch (d) {
    case Dimension::dimensionless: return "";
    case Dimension::bits: return "b";
    case Dimension::operations: return "op";
    case Dimension::frequency: return "Hz";
    case Dimension::bit_rate: return "b/s";
    case Dimension::energy: return "J";
    case Dimension::energy_per_bit: return "J/bit";
    case Dimension::energy_per_op: return "J/op";
    case Dimension::power: return "W";
    case Dimension::time: return "s";
    case Dimension::length: return "m";
    case Dimension::length_per_channel: return "m/channel";
    case Dimension::momentum: return "GeV";
    case Dimension::inverse_momentum: return "1/GeV";
  }
  return "";
}

Quantity parse_quantity(std::string_view text) {
  std::string s = trim(text);
  if (s.empty()) throw UnitError("empty quantity");
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  double number = std::strtod(begin, &end);
  if (end == begin) throw UnitError("'" + s + "' does not start with a number");
  // Subnormal results also set ERANGE; reject only overflow and underflow to zero.
  if (!std::isfinite(number) || (errno == ERANGE && (number == 0 || std::fabs(number) >= 1.0)))
    throw UnitError("'" + s + "' is out of range");
  std::string unit = trim(std::string_view(end));
  if (unit.empty()) return {number, Dimension::dimensionless};

  std::string num_part = unit, den_part;
  if (auto slash = unit.find('/'); slash != std::string::npos) {
    num_part = trim(std::string_view(unit).substr(0, slash));
    den_part = trim(std::string_view(unit).substr(slash + 1));
    if (num_part.empty()) num_part = "1";
    if (den_part.empty()) throw UnitError("'" + s + "': missing unit after '/'");
  }
  auto num = parse_atom(num_part);
  if (!num) throw UnitError("'" + s + "': unknown unit '" + num_part + "'");
  std::optional<AtomValue> den;
  if (!den_part.empty()) {
    den = parse_atom(den_part);
    if (!den) throw UnitError("'" + s + "': unknown unit '" + den_part + "'");
  }
  auto dim = combine(num->atom, den ? std::optional<Atom>(den->atom) : std::nullopt);
  if (!dim) throw UnitError("'" + s + "': unsupported unit '" + unit + "'");
  double value = number * num->scale;
  if (den) value /= den->scale;
  return {value, *dim};
}

double parse_as(std::string_view text, Dimension expected) {
  Quantity q = parse_quantity(text);
  if (q.dimension != expected) {
    std::string msg = "unit mismatch: '" + trim(text) + "' is " +
                      std::string(dimension_name(q.dimension)) + ", expected " +
                      std::string(dimension_name(expected));
    if (expected != Dimension::dimensionless)
      msg += " (e.g. '" + std::string(canonical_unit(expected)) + "')";
    throw UnitError(msg);
  }
  return q.value;
}

std::string format_number(double v) {
  char buf[64];
  // Plain decimals for magnitudes people write that way, shortest form otherwise.
  const double a = std::fabs(v);
  auto res = (a >= 1e-4 && a < 1e16) ? std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed)
                                     : std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_quantity(double value, Dimension d) {
  std::string out = format_number(value);
  auto unit = canonical_unit(d);
  if (!unit.empty()) {
    out += ' ';
    out += unit;
  }
  return out;
}

double parse_ratio(std::string_view text) {
  std::string s = trim(text);
  double ratio = 0;
  if (auto colon = s.find(':'); colon != std::string::npos) {
    double a = parse_as(std::string_view(s).substr(0, colon), Dimension::dimensionless);
    double b = parse_as(std::string_view(s).substr(colon + 1), Dimension::dimensionless);
    if (b <= 0) throw UnitError("ratio '" + s + "' has a nonpositive denominator");
    ratio = a / b;
  } else if (auto slash = s.find(" / "); slash != std::string::npos) {
    Quantity a = parse_quantity(std::string_view(s).substr(0, slash));
    Quantity b = parse_quantity(std::string_view(s).substr(slash + 3));
    if (a.dimension != b.dimension)
      throw UnitError("ratio '" + s + "' divides quantities of different dimension");
    if (b.value <= 0) throw UnitError("ratio '" + s + "' has a nonpositive denominator");
    ratio = a.value / b.value;
  } else {
    ratio = parse_as(s, Dimension::dimensionless);
  }
  if (!std::isfinite(ratio) || ratio <= 0) throw UnitError("ratio '" + s + "' must be positive");
  return ratio;
}

std::string format_ratio(double ratio) {
  double r = std::round(ratio);
  long long n = std::abs(ratio - r) <= 1e-9 * std::max(1.0, r) ? static_cast<long long>(r)
                                                               : static_cast<long long>(ratio);
  return std::to_string(n) + ":1";
}

std::string format_ratio_exact(double ratio) {
  return format_number(ratio) + ":1";
}

}  // namespace systemflow
