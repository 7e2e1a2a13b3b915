#pragma once

#include <optional>
#include <string>
#include <vector>

namespace rg {

// Content-addressed result store. Entries are keyed by (spec digest, operation, canonical
// parameters) and carry a checksum of their payload; writes go through a temp file and rename.
class ResultCache {
 public:
  explicit ResultCache(std::string dir);

  const std::string& dir() const { return dir_; }
  static std::string key(const std::string& digest, const std::string& op,
                         const std::string& params);
  std::string path(const std::string& key) const;

  // A corrupt or unreadable entry is a miss and appends a warning.
  std::optional<std::string> lookup(const std::string& key);
  void store(const std::string& key, const std::string& payload);

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::string dir_;
  std::vector<std::string> warnings_;
};

}  // namespace rg
