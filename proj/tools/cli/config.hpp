#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace edpm::cli {

enum class ValueType { integer, real, boolean, string, real_list, string_list, int_list, matrix };

struct KeySpec {
  std::string key;
  ValueType type;
  nlohmann::json default_value;  // null: unset unless given
  std::string help;
};

// Every recognised configuration key, in dotted form.
const std::vector<KeySpec>& schema();
const KeySpec* find_key(const std::string& key);

// Flat key -> value map with schema defaults applied. Precedence: defaults,
// then the config file, then command-line overrides.
class Config {
 public:
  Config();

  // Nested objects are flattened to dotted keys. Throws ConfigError naming
  // the offending key path on unknown keys or type mismatches.
  void merge(const nlohmann::json& j);

  // Parses `text` according to the key's type (lists are comma separated,
  // matrices use ';' between rows).
  void set(const std::string& key, const std::string& text);

  bool has(const std::string& key) const;  // set and not null
  std::int64_t integer(const std::string& key) const;
  std::uint64_t unsigned_integer(const std::string& key) const;
  std::size_t size(const std::string& key) const;  // non-negative integer
  double real(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::string string(const std::string& key) const;
  std::vector<double> real_list(const std::string& key) const;
  std::vector<std::string> string_list(const std::string& key) const;
  std::vector<std::int64_t> int_list(const std::string& key) const;
  std::vector<std::vector<double>> matrix(const std::string& key) const;

  // Sorted flat object of every key, including nulls; re-parsing it gives
  // back an identical Config.
  const nlohmann::json& resolved() const { return values_; }

 private:
  const nlohmann::json& get(const std::string& key) const;
  nlohmann::json values_;
};

Config parse_config(const std::string& path);
Config parse_config_text(const std::string& text);

}  // namespace edpm::cli
