#include "manifest.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace arcube::cli {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream bytes;
  bytes << in.rdbuf();
  return bytes.str();
}

RunManifest::RunManifest(std::string command)
    : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

void RunManifest::add_input(const std::string& path, const std::string& bytes) {
  inputs_.push_back({{"path", path}, {"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}});
}

void RunManifest::add_preset(const std::string& name) { inputs_.push_back({{"preset", name}}); }

void RunManifest::add_output(const std::string& path) { outputs_.push_back(path); }

nlohmann::json RunManifest::to_json() const {
  nlohmann::json json;
  json["command"] = command_;
  json["tool_version"] = kToolVersion;
  json["inputs"] = inputs_;
  json["seed"] = seed_ ? nlohmann::json(*seed_) : nlohmann::json(nullptr);
  json["outputs"] = outputs_;
  json["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  return json;
}

void RunManifest::emit(const std::string& path) const {
  if (path.empty()) {
    std::cerr << "manifest: " << to_json().dump() << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest '" + path + "'");
  out << to_json().dump(2) << '\n';
}

}  // namespace arcube::cli
