#include "arcube/design_io.hpp"

#include "arcube/number_format.hpp"

#include <fstream>
#include <sstream>

namespace arcube {

const std::array<std::string_view, Design::kSize>& parameter_names() {
  static const std::array<std::string_view, Design::kSize> names{
      "m_x", "m_y", "m_z", "f_x", "f_y", "f_z", "p_x", "p_y", "p_z", "d_x", "d_y", "d_z",
      "c_x", "c_y", "t_x", "t_y", "r", "o_x", "o_y", "alpha_x", "alpha_y", "beta_x", "beta_y"};
  return names;
}

namespace {

template <int N>
nlohmann::json to_array(const Eigen::Matrix<double, N, 1>& values) {
  auto array = nlohmann::json::array();
  for (int i = 0; i < N; ++i) array.push_back(values(i));
  return array;
}

template <int N>
nlohmann::json to_degree_array(const Eigen::Matrix<double, N, 1>& radians) {
  auto array = nlohmann::json::array();
  for (int i = 0; i < N; ++i) array.push_back(canonical_degrees(radians(i)));
  return array;
}

template <int N>
Eigen::Matrix<double, N, 1> read_array(const nlohmann::json& json, const char* key) {
  if (!json.contains(key)) throw DesignError(std::string("design is missing \"") + key + "\"");
  const auto& array = json.at(key);
  if (!array.is_array() || array.size() != static_cast<std::size_t>(N))
    throw DesignError(std::string("\"") + key + "\" must be an array of " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> values;
  for (int i = 0; i < N; ++i) {
    if (!array[static_cast<std::size_t>(i)].is_number())
      throw DesignError(std::string("\"") + key + "\" must contain numbers only");
    values(i) = array[static_cast<std::size_t>(i)].get<double>();
  }
  return values;
}

}  // namespace

nlohmann::json design_to_json(const Design& design) {
  nlohmann::json json;
  json["m"] = to_array<3>(design.m);
  json["f"] = to_array<3>(design.f);
  json["p"] = to_array<3>(design.p);
  json["d"] = to_array<3>(design.d);
  json["c"] = to_array<2>(design.c);
  json["t"] = to_array<2>(design.t);
  json["r"] = design.r;
  json["o"] = to_array<2>(design.o);
  json["alpha_deg"] = to_degree_array<2>(design.alpha);
  json["beta_deg"] = to_degree_array<2>(design.beta);
  return json;
}

Design design_from_json(const nlohmann::json& json) {
  if (!json.is_object()) throw DesignError("design file must hold a JSON object");
  Design design;
  design.m = read_array<3>(json, "m");
  design.f = read_array<3>(json, "f");
  design.p = read_array<3>(json, "p");
  design.d = read_array<3>(json, "d");
  design.c = read_array<2>(json, "c");
  design.t = read_array<2>(json, "t");
  design.o = read_array<2>(json, "o");
  const auto alpha_deg = read_array<2>(json, "alpha_deg");
  const auto beta_deg = read_array<2>(json, "beta_deg");
  for (int k = 0; k < 2; ++k) {
    design.alpha(k) = deg_to_rad(alpha_deg(k));
    design.beta(k) = deg_to_rad(beta_deg(k));
  }
  if (!json.contains("r") || !json.at("r").is_number()) throw DesignError("design needs a numeric \"r\"");
  design.r = json.at("r").get<double>();
  require_valid(design);
  return design;
}

Design parse_design(const std::string& text) {
  nlohmann::json json;
  try {
    json = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& error) {
    throw DesignError(std::string("malformed design JSON: ") + error.what());
  }
  return design_from_json(json);
}

Design load_design(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DesignError("cannot open design file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_design(text.str());
}

std::string dump_design(const Design& design) { return design_to_json(design).dump(2) + "\n"; }

void save_design(const std::string& path, const Design& design) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DesignError("cannot write design file '" + path + "'");
  out << dump_design(design);
}

}  // namespace arcube
