#include "empath_eval/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace empath_eval {
namespace {

std::int64_t pow10(int places) {
  std::int64_t scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  return scale;
}

// floor(a / b) for b > 0.
std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && (a < 0)) --q;
  return q;
}

// Rounded value in units of 10^-places.
std::int64_t scaled_half_up(const Rational& value, int places) {
  const std::int64_t scale = pow10(places);
  return floor_div(2 * value.num() * scale + value.den(), 2 * value.den());
}

}  // namespace

double Rational::round_half_up(int places) const {
  return static_cast<double>(scaled_half_up(*this, places)) / static_cast<double>(pow10(places));
}

std::string Rational::to_fixed(int places) const {
  const std::int64_t units = scaled_half_up(*this, places);
  const std::int64_t scale = pow10(places);
  const std::int64_t magnitude = units < 0 ? -units : units;
  std::string out = units < 0 ? "-" : "";
  out += std::to_string(magnitude / scale);
  if (places > 0) {
    std::string frac = std::to_string(magnitude % scale);
    out += '.';
    out += std::string(static_cast<std::size_t>(places) - frac.size(), '0');
    out += frac;
  }
  return out;
}

double round_half_up(double value, int places) {
  const double scale = std::pow(10.0, places);
  // Nudge by a few ulps so decimal ties stored slightly below (0.76695 ->
  // 0.766949999...) still round up.
  const double scaled = value * scale;
  return std::floor(scaled + 0.5 + 1e-9 * std::max(1.0, std::fabs(scaled))) / scale;
}

}  // namespace empath_eval
