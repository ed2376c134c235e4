#include "arcube/number_format.hpp"

#include "arcube/core.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <system_error>

namespace arcube {

std::string format_double(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buffer, end);
}

double canonical_degrees(double radians) {
  const double degrees = rad_to_deg(radians);
  char buffer[64];
  for (int precision = 1; precision <= 17; ++precision) {
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), degrees, std::chars_format::general, precision);
    if (ec != std::errc()) continue;
    double candidate = 0.0;
    std::from_chars(buffer, end, candidate);
    if (deg_to_rad(candidate) == radians) return candidate;
  }
  // The decimal forms of nearby doubles; each parses back exactly.
  double below = degrees, above = degrees;
  for (int step = 0; step < 4; ++step) {
    below = std::nextafter(below, -HUGE_VAL);
    above = std::nextafter(above, HUGE_VAL);
    if (deg_to_rad(below) == radians) return below;
    if (deg_to_rad(above) == radians) return above;
  }
  return degrees;
}

std::string format_degrees(double radians) { return format_double(canonical_degrees(radians)); }

double snap_to_degree_grid(double radians) { return deg_to_rad(rad_to_deg(radians)); }

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty())
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  return value;
}

long long parse_integer(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  long long value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty())
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  return value;
}

}  // namespace arcube
