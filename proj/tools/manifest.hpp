// Run manifests: what a CLI invocation read, wrote, and how long it took.
#ifndef ARCUBE_TOOLS_MANIFEST_HPP
#define ARCUBE_TOOLS_MANIFEST_HPP

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace arcube::cli {

inline constexpr const char* kToolVersion = "0.1.0";

std::string sha256_hex(const std::string& bytes);

/// Whole file as bytes; throws std::runtime_error when unreadable.
std::string read_file(const std::string& path);

class RunManifest {
 public:
  explicit RunManifest(std::string command);

  void add_input(const std::string& path, const std::string& bytes);
  void add_preset(const std::string& name);
  void add_output(const std::string& path);
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  nlohmann::json to_json() const;
  /// Writes to `path`, or to stderr as one line when `path` is empty.
  void emit(const std::string& path) const;

 private:
  std::string command_;
  nlohmann::json inputs_ = nlohmann::json::array();
  std::vector<std::string> outputs_;
  std::optional<std::uint64_t> seed_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace arcube::cli

#endif  // ARCUBE_TOOLS_MANIFEST_HPP
