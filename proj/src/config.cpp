#include "tbo/config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tbo/common.hpp"

namespace tbo {

ConfigValue ConfigValue::boolean(bool v) {
  ConfigValue c;
  c.kind = Kind::Bool;
  c.b = v;
  return c;
}

ConfigValue ConfigValue::integer(std::int64_t v) {
  ConfigValue c;
  c.kind = Kind::Int;
  c.i = v;
  return c;
}

ConfigValue ConfigValue::real(double v) {
  ConfigValue c;
  c.kind = Kind::Float;
  c.f = v;
  return c;
}

ConfigValue ConfigValue::string(std::string v) {
  ConfigValue c;
  c.kind = Kind::String;
  c.s = std::move(v);
  return c;
}

ConfigValue ConfigValue::array(std::vector<ConfigValue> v) {
  ConfigValue c;
  c.kind = Kind::Array;
  c.items = std::move(v);
  return c;
}

bool operator==(const ConfigValue& a, const ConfigValue& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ConfigValue::Kind::Bool:
      return a.b == b.b;
    case ConfigValue::Kind::Int:
      return a.i == b.i;
    case ConfigValue::Kind::Float:
      // nan compares equal to nan so documents stay comparable.
      return a.f == b.f || (std::isnan(a.f) && std::isnan(b.f));
    case ConfigValue::Kind::String:
      return a.s == b.s;
    case ConfigValue::Kind::Array:
      return a.items == b.items;
  }
  return false;
}

bool operator==(const ConfigDoc& a, const ConfigDoc& b) {
  if (a.sections.size() != b.sections.size()) return false;
  for (std::size_t i = 0; i < a.sections.size(); ++i) {
    if (a.sections[i].name != b.sections[i].name) return false;
    if (a.sections[i].entries != b.sections[i].entries) return false;
  }
  return true;
}

const ConfigValue* ConfigDoc::find(const std::string& section, const std::string& key) const {
  for (const auto& sec : sections) {
    if (sec.name != section) continue;
    for (const auto& [k, v] : sec.entries) {
      if (k == key) return &v;
    }
  }
  return nullptr;
}

void ConfigDoc::set(const std::string& section, const std::string& key, ConfigValue value) {
  for (auto& sec : sections) {
    if (sec.name != section) continue;
    for (auto& [k, v] : sec.entries) {
      if (k == key) {
        v = std::move(value);
        return;
      }
    }
    sec.entries.emplace_back(key, std::move(value));
    return;
  }
  sections.push_back({section, {{key, std::move(value)}}});
}

namespace {

class Cursor {
 public:
  Cursor(const std::string& text, std::string where) : t_(text), where_(std::move(where)) {}

  [[noreturn]] void fail(const std::string& msg) const { throw InputError(where_ + ": " + msg); }
  void skip_ws() {
    while (p_ < t_.size() && (t_[p_] == ' ' || t_[p_] == '\t')) ++p_;
  }
  [[nodiscard]] bool done() const { return p_ >= t_.size(); }
  [[nodiscard]] char peek() const { return done() ? '\0' : t_[p_]; }
  char take() { return t_[p_++]; }

  // Rest of the line must be blank or a comment.
  void expect_end() {
    skip_ws();
    if (!done() && peek() != '#') fail("unexpected trailing text '" + t_.substr(p_) + "'");
  }

 private:
  const std::string& t_;
  std::string where_;
  std::size_t p_ = 0;
};

bool is_bare_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_bare_key(Cursor& c) {
  std::string key;
  while (!c.done() && is_bare_char(c.peek())) key.push_back(c.take());
  if (key.empty()) c.fail("expected a key");
  return key;
}

std::string parse_string(Cursor& c) {
  c.take();  // opening quote
  std::string out;
  while (true) {
    if (c.done()) c.fail("unterminated string");
    const char ch = c.take();
    if (ch == '"') break;
    if (ch != '\\') {
      out.push_back(ch);
      continue;
    }
    if (c.done()) c.fail("unterminated escape");
    const char e = c.take();
    switch (e) {
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case 'r': out.push_back('\r'); break;
      case '"': out.push_back('"'); break;
      case '\\': out.push_back('\\'); break;
      default: c.fail(std::string("unsupported escape \\") + e);
    }
  }
  return out;
}

ConfigValue parse_value(Cursor& c);

ConfigValue parse_array(Cursor& c) {
  c.take();  // '['
  std::vector<ConfigValue> items;
  c.skip_ws();
  if (c.peek() == ']') {
    c.take();
    return ConfigValue::array({});
  }
  while (true) {
    c.skip_ws();
    items.push_back(parse_value(c));
    c.skip_ws();
    if (c.done()) c.fail("unterminated array");
    const char ch = c.take();
    if (ch == ']') break;
    if (ch != ',') c.fail("expected ',' or ']' in array");
    c.skip_ws();
    if (c.peek() == ']') {
      c.take();
      break;
    }
  }
  return ConfigValue::array(std::move(items));
}

ConfigValue parse_scalar_token(Cursor& c) {
  std::string tok;
  while (!c.done()) {
    const char ch = c.peek();
    if (ch == ',' || ch == ']' || ch == '#' || ch == ' ' || ch == '\t') break;
    tok.push_back(c.take());
  }
  if (tok.empty()) c.fail("expected a value");
  if (tok == "true") return ConfigValue::boolean(true);
  if (tok == "false") return ConfigValue::boolean(false);
  std::string clean;
  for (char ch : tok) {
    if (ch != '_') clean.push_back(ch);
  }
  if (clean == "inf" || clean == "+inf") return ConfigValue::real(HUGE_VAL);
  if (clean == "-inf") return ConfigValue::real(-HUGE_VAL);
  if (clean == "nan" || clean == "+nan" || clean == "-nan") {
    return ConfigValue::real(std::nan(""));
  }
  const bool floaty = clean.find_first_of(".eE") != std::string::npos;
  char* end = nullptr;
  if (!floaty) {
    errno = 0;
    const long long v = std::strtoll(clean.c_str(), &end, 10);
    if (end != clean.c_str() + clean.size() || errno == ERANGE) c.fail("invalid value '" + tok + "'");
    return ConfigValue::integer(v);
  }
  const double v = std::strtod(clean.c_str(), &end);
  if (end != clean.c_str() + clean.size()) c.fail("invalid value '" + tok + "'");
  return ConfigValue::real(v);
}

ConfigValue parse_value(Cursor& c) {
  c.skip_ws();
  if (c.done()) c.fail("missing value");
  if (c.peek() == '"') return ConfigValue::string(parse_string(c));
  if (c.peek() == '[') return parse_array(c);
  return parse_scalar_token(c);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (const char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(ch);
    }
  }
  return out + "\"";
}

void write_value(std::ostream& os, const ConfigValue& v) {
  switch (v.kind) {
    case ConfigValue::Kind::Bool: os << (v.b ? "true" : "false"); break;
    case ConfigValue::Kind::Int: os << v.i; break;
    case ConfigValue::Kind::Float: os << format_double(v.f); break;
    case ConfigValue::Kind::String: os << quote(v.s); break;
    case ConfigValue::Kind::Array:
      os << '[';
      for (std::size_t i = 0; i < v.items.size(); ++i) {
        if (i) os << ", ";
        write_value(os, v.items[i]);
      }
      os << ']';
      break;
  }
}

}  // namespace

ConfigDoc parse_config(const std::string& text, const std::string& source) {
  ConfigDoc doc;
  std::string current;
  bool have_root = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::set<std::string> seen_sections;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    Cursor c(line, source + ":" + std::to_string(lineno));
    c.skip_ws();
    if (c.done() || c.peek() == '#') continue;
    if (c.peek() == '[') {
      c.take();
      c.skip_ws();
      std::string name = parse_bare_key(c);
      while (c.peek() == '.') {
        c.take();
        name += "." + parse_bare_key(c);
      }
      c.skip_ws();
      if (c.peek() != ']') c.fail("expected ']' after section name");
      c.take();
      c.expect_end();
      if (!seen_sections.insert(name).second) c.fail("duplicate section [" + name + "]");
      current = name;
      doc.sections.push_back({name, {}});
      continue;
    }
    const std::string key = parse_bare_key(c);
    c.skip_ws();
    if (c.peek() != '=') c.fail("expected '=' after key '" + key + "'");
    c.take();
    ConfigValue value = parse_value(c);
    c.expect_end();
    if (current.empty() && !have_root) {
      doc.sections.insert(doc.sections.begin(), ConfigSection{"", {}});
      have_root = true;
    }
    ConfigSection* sec = nullptr;
    for (auto& s : doc.sections) {
      if (s.name == current) sec = &s;
    }
    for (const auto& [k, v] : sec->entries) {
      if (k == key) c.fail("duplicate key '" + key + "'");
    }
    sec->entries.emplace_back(key, std::move(value));
  }
  return doc;
}

ConfigDoc parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string serialize_config(const ConfigDoc& doc) {
  std::ostringstream os;
  bool first = true;
  for (const auto& sec : doc.sections) {
    if (!sec.name.empty()) {
      if (!first) os << '\n';
      os << '[' << sec.name << "]\n";
    }
    for (const auto& [k, v] : sec.entries) {
      os << k << " = ";
      write_value(os, v);
      os << '\n';
    }
    first = false;
  }
  return os.str();
}

ConfigValue parse_config_value(const std::string& text) {
  Cursor c(text, "<value>");
  ConfigValue v = parse_value(c);
  c.expect_end();
  return v;
}

void apply_override(ConfigDoc& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw UsageError("override '" + assignment + "': expected key=value");
  std::string path = assignment.substr(0, eq);
  while (!path.empty() && std::isspace(static_cast<unsigned char>(path.back()))) path.pop_back();
  const auto dot = path.rfind('.');
  const std::string section = dot == std::string::npos ? "" : path.substr(0, dot);
  const std::string key = dot == std::string::npos ? path : path.substr(dot + 1);
  if (key.empty()) throw UsageError("override '" + assignment + "': empty key");
  std::string text = assignment.substr(eq + 1);
  const auto first = text.find_first_not_of(" \t");
  const auto last = text.find_last_not_of(" \t");
  text = first == std::string::npos ? "" : text.substr(first, last - first + 1);
  ConfigValue value;
  try {
    value = parse_config_value(text);
  } catch (const InputError&) {
    // Unquoted words are taken as strings so shells need no extra quoting.
    if (text.empty() || text.find_first_of("\"[],#") != std::string::npos) {
      throw UsageError("override '" + assignment + "': invalid value");
    }
    value = ConfigValue::string(text);
  }
  doc.set(section, key, value);
}

std::string config_key_name(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

const ConfigValue* ConfigReader::lookup(const std::string& section, const std::string& key) {
  known_.insert(config_key_name(section, key));
  return doc_.find(section, key);
}

bool ConfigReader::has(const std::string& section, const std::string& key) {
  return lookup(section, key) != nullptr;
}

double ConfigReader::get_double(const std::string& section, const std::string& key,
                                double fallback) {
  const ConfigValue* v = lookup(section, key);
  if (!v) return fallback;
  if (v->kind == ConfigValue::Kind::Float) return v->f;
  if (v->kind == ConfigValue::Kind::Int) return static_cast<double>(v->i);
  throw UsageError(config_key_name(section, key) + ": expected a number");
}

std::int64_t ConfigReader::get_int(const std::string& section, const std::string& key,
                                   std::int64_t fallback) {
  const ConfigValue* v = lookup(section, key);
  if (!v) return fallback;
  if (v->kind == ConfigValue::Kind::Int) return v->i;
  throw UsageError(config_key_name(section, key) + ": expected an integer");
}

bool ConfigReader::get_bool(const std::string& section, const std::string& key, bool fallback) {
  const ConfigValue* v = lookup(section, key);
  if (!v) return fallback;
  if (v->kind == ConfigValue::Kind::Bool) return v->b;
  throw UsageError(config_key_name(section, key) + ": expected true or false");
}

std::string ConfigReader::get_string(const std::string& section, const std::string& key,
                                     const std::string& fallback) {
  const ConfigValue* v = lookup(section, key);
  if (!v) return fallback;
  if (v->kind == ConfigValue::Kind::String) return v->s;
  throw UsageError(config_key_name(section, key) + ": expected a string");
}

std::vector<double> ConfigReader::get_doubles(const std::string& section, const std::string& key,
                                              const std::vector<double>& fallback) {
  const ConfigValue* v = lookup(section, key);
  if (!v) return fallback;
  const std::string name = config_key_name(section, key);
  std::vector<double> out;
  auto push = [&](const ConfigValue& item) {
    if (item.kind == ConfigValue::Kind::Float) {
      out.push_back(item.f);
    } else if (item.kind == ConfigValue::Kind::Int) {
      out.push_back(static_cast<double>(item.i));
    } else {
      throw UsageError(name + ": expected numbers");
    }
  };
  if (v->kind == ConfigValue::Kind::Array) {
    for (const auto& item : v->items) push(item);
  } else {
    push(*v);
  }
  return out;
}

std::vector<std::string> ConfigReader::get_strings(const std::string& section,
                                                   const std::string& key,
                                                   const std::vector<std::string>& fallback) {
  const ConfigValue* v = lookup(section, key);
  if (!v) return fallback;
  const std::string name = config_key_name(section, key);
  std::vector<std::string> out;
  if (v->kind == ConfigValue::Kind::String) return {v->s};
  if (v->kind != ConfigValue::Kind::Array) throw UsageError(name + ": expected strings");
  for (const auto& item : v->items) {
    if (item.kind != ConfigValue::Kind::String) throw UsageError(name + ": expected strings");
    out.push_back(item.s);
  }
  return out;
}

void ConfigReader::reject_unknown() const {
  for (const auto& sec : doc_.sections) {
    for (const auto& [k, v] : sec.entries) {
      const std::string name = config_key_name(sec.name, k);
      if (!known_.count(name)) throw UsageError(name + ": unknown key");
    }
  }
}

}  // namespace tbo
