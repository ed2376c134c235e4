// Canonical decimal rendering shared by every file format.
#ifndef ARCUBE_NUMBER_FORMAT_HPP
#define ARCUBE_NUMBER_FORMAT_HPP

#include <string>
#include <string_view>

namespace arcube {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Degrees for an angle held in radians: the shortest decimal whose
/// degree-to-radian conversion reproduces `radians` bit-exactly, so files
/// written in degrees reload losslessly. Values outside the image of
/// deg_to_rad have no such decimal; rad_to_deg(radians) is returned for them.
double canonical_degrees(double radians);
std::string format_degrees(double radians);

/// deg_to_rad(rad_to_deg(x)): always in the image of deg_to_rad, so
/// canonical_degrees reproduces it exactly.
double snap_to_degree_grid(double radians);

/// Strict full-string parse; throws std::invalid_argument.
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

}  // namespace arcube

#endif  // ARCUBE_NUMBER_FORMAT_HPP
