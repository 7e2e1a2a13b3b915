#include "rg/cache.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include "rg/rational.hpp"

namespace rg {

namespace fs = std::filesystem;

namespace {
const char* kMagic = "rgcache 1";
}

ResultCache::ResultCache(std::string dir) : dir_(std::move(dir)) {}

std::string ResultCache::key(const std::string& digest, const std::string& op,
                             const std::string& params) {
  return sha256_hex(digest + "\n" + op + "\n" + params);
}

std::string ResultCache::path(const std::string& key) const {
  return (fs::path(dir_) / (key + ".entry")).string();
}

std::optional<std::string> ResultCache::lookup(const std::string& key) {
  std::ifstream in(path(key), std::ios::binary);
  if (!in) return std::nullopt;
  std::string magic, checksum;
  if (!std::getline(in, magic) || !std::getline(in, checksum) || magic != kMagic) {
    warnings_.push_back("cache entry " + key + " is malformed; recomputing");
    return std::nullopt;
  }
  std::string payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (sha256_hex(payload) != checksum) {
    warnings_.push_back("cache entry " + key + " failed its checksum; recomputing");
    return std::nullopt;
  }
  return payload;
}

void ResultCache::store(const std::string& key, const std::string& payload) {
  fs::create_directories(dir_);
  std::random_device rd;
  std::ostringstream tmp_name;
  tmp_name << key << ".tmp." << std::hex << rd() << rd();
  fs::path tmp = fs::path(dir_) / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary);
    out << kMagic << "\n" << sha256_hex(payload) << "\n" << payload;
    if (!out) {
      warnings_.push_back("cannot write cache entry " + key);
      return;
    }
  }
  fs::rename(tmp, path(key));
}

}  // namespace rg
