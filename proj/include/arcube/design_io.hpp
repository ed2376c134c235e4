// DesignVector JSON files. Lengths in mm; spherical link angles stored in
// degrees under "alpha_deg"/"beta_deg" and converted to radians on load.
//
//   {"m": [3], "f": [3], "p": [3], "d": [3], "c": [2], "t": [2],
//    "o": [2], "alpha_deg": [2], "beta_deg": [2], "r": scalar}
#ifndef ARCUBE_DESIGN_IO_HPP
#define ARCUBE_DESIGN_IO_HPP

#include "arcube/core.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace arcube {

nlohmann::json design_to_json(const Design& design);

/// Throws DesignError for missing keys, wrong array lengths, or an invalid design.
Design design_from_json(const nlohmann::json& json);

/// Parses text; JSON syntax errors surface as DesignError carrying the
/// parser's line and column.
Design parse_design(const std::string& text);
Design load_design(const std::string& path);

std::string dump_design(const Design& design);
void save_design(const std::string& path, const Design& design);

}  // namespace arcube

#endif  // ARCUBE_DESIGN_IO_HPP
