#pragma once

#include <json.hpp>

#include <cstdint>
#include <list>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace freelight::cli {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Typed view over one JSON object. Every key read is marked; finish() rejects
// anything left over, including inside nested objects.
class Fields {
 public:
  Fields(const json& j, std::string where);

  bool has(const std::string& key) const { return obj_.contains(key); }
  double number(const std::string& key, double def);
  std::optional<double> optionalNumber(const std::string& key);
  int integer(const std::string& key, int def);
  std::uint64_t u64(const std::string& key, std::uint64_t def);
  bool boolean(const std::string& key, bool def);
  std::string text(const std::string& key, const std::string& def);
  std::string choice(const std::string& key, const std::string& def, const std::set<std::string>& allowed);
  // A scalar, an explicit list, or {"min", "max", "count"} (inclusive linspace).
  std::vector<double> values(const std::string& key, const std::vector<double>& def);
  // A scalar, a list, or {"min", "max"} (inclusive integer range).
  std::vector<int> integers(const std::string& key, const std::vector<int>& def);
  // Nested object; an absent key yields an empty object.
  Fields& object(const std::string& key);
  // Raw access for keys that need custom parsing.
  const json& raw(const std::string& key);

  void finish() const;

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;

  json obj_;
  std::string where_;
  std::set<std::string> used_;
  std::list<Fields> children_;
};

}  // namespace freelight::cli
