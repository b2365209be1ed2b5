#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace tbo {

// Value in a TOML-compatible document: booleans, 64-bit integers, doubles,
// basic strings and single-line arrays of those.
struct ConfigValue {
  enum class Kind { Bool, Int, Float, String, Array };
  Kind kind = Kind::Int;
  bool b = false;
  std::int64_t i = 0;
  double f = 0.0;
  std::string s;
  std::vector<ConfigValue> items;

  static ConfigValue boolean(bool v);
  static ConfigValue integer(std::int64_t v);
  static ConfigValue real(double v);
  static ConfigValue string(std::string v);
  static ConfigValue array(std::vector<ConfigValue> v);

  friend bool operator==(const ConfigValue& a, const ConfigValue& b);
};

struct ConfigSection {
  std::string name;  // empty for keys before the first header
  std::vector<std::pair<std::string, ConfigValue>> entries;
};

// Ordered document. Section and key order are preserved by parse and used
// verbatim by serialize, so parse(serialize(doc)) == doc.
struct ConfigDoc {
  std::vector<ConfigSection> sections;

  [[nodiscard]] const ConfigValue* find(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, ConfigValue value);

  friend bool operator==(const ConfigDoc& a, const ConfigDoc& b);
};

// Subset accepted: comments, [section] and [dotted.section] headers,
// key = value lines with bare keys, quoted basic strings with the usual
// escapes, integers, floats (including inf and nan), true/false and
// single-line arrays. Errors are InputError with source:line.
ConfigDoc parse_config(const std::string& text, const std::string& source = "<config>");
ConfigDoc parse_config_file(const std::string& path);

// Floats use 17 significant digits and always carry a '.', exponent, inf or
// nan so they read back as floats.
std::string serialize_config(const ConfigDoc& doc);

// Parses a single value written in the same syntax.
ConfigValue parse_config_value(const std::string& text);

// Applies "section.key=value"; the section is everything before the last dot.
// A value that does not parse is taken as a bare string (so key=data.csv works).
void apply_override(ConfigDoc& doc, const std::string& assignment);

// Typed access with unknown-key detection. Every getter marks the key as
// known; reject_unknown throws UsageError naming the first unread key.
class ConfigReader {
 public:
  explicit ConfigReader(const ConfigDoc& doc) : doc_(doc) {}

  [[nodiscard]] bool has(const std::string& section, const std::string& key);
  double get_double(const std::string& section, const std::string& key, double fallback);
  std::int64_t get_int(const std::string& section, const std::string& key, std::int64_t fallback);
  bool get_bool(const std::string& section, const std::string& key, bool fallback);
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback);
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  const std::vector<double>& fallback);
  std::vector<std::string> get_strings(const std::string& section, const std::string& key,
                                       const std::vector<std::string>& fallback);
  void reject_unknown() const;

 private:
  const ConfigValue* lookup(const std::string& section, const std::string& key);
  const ConfigDoc& doc_;
  std::set<std::string> known_;
};

std::string config_key_name(const std::string& section, const std::string& key);

}  // namespace tbo
