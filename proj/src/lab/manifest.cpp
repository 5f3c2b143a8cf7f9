#include "phi4/lab/manifest.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <memory>
#include <stdexcept>

namespace phi4::lab {

std::string sha256_hex(const std::string& bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
    throw std::runtime_error("sha256: digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["version"] = m.version;
  j["command"] = m.command;
  j["options"] = m.options;
  j["config"] = m.config;
  j["seed_rule"] = m.seed_rule;
  j["threads"] = m.threads;
  j["wall_clock_seconds"] = m.wall_clock_seconds;
  j["aborts"] = m.aborts;
  j["digests"] = m.digests;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  RunManifest m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.version = j.at("version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.options = j.value("options", std::map<std::string, std::string>{});
    m.config = j.at("config").get<std::string>();
    m.seed_rule = j.value("seed_rule", std::string());
    m.threads = j.value("threads", 1);
    m.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
    m.aborts = j.value("aborts", std::map<std::string, long>{});
    m.digests = j.value("digests", std::map<std::string, std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("manifest: ") + e.what());
  }
  return m;
}

std::vector<std::string> digest_mismatches(const RunManifest& reference, const RunManifest& actual) {
  std::vector<std::string> out;
  for (const auto& [file, digest] : reference.digests) {
    auto it = actual.digests.find(file);
    if (it == actual.digests.end() || it->second != digest) out.push_back(file);
  }
  return out;
}

}  // namespace phi4::lab
