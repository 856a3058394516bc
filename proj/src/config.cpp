#include "iadb/config.hpp"

#include <fstream>
#include <sstream>

#include "iadb/csv.hpp"

namespace iadb {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::string current;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("config: malformed section header at line " + std::to_string(lineno));
      current = trim(t.substr(1, t.size() - 2));
      cfg.section_ref(current);
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key = value at line " + std::to_string(lineno));
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: empty key at line " + std::to_string(lineno));
    cfg.add(current, key, value);
  }
  return cfg;
}

Config::Section* Config::find_section(const std::string& name) {
  for (auto& s : sections_)
    if (s.name == name) return &s;
  return nullptr;
}

const Config::Section* Config::find_section(const std::string& name) const {
  for (const auto& s : sections_)
    if (s.name == name) return &s;
  return nullptr;
}

Config::Section& Config::section_ref(const std::string& name) {
  if (Section* s = find_section(name)) return *s;
  sections_.push_back(Section{name, {}});
  return sections_.back();
}

bool Config::has_section(const std::string& section) const {
  return find_section(section) != nullptr;
}

bool Config::has(const std::string& section, const std::string& key) const {
  const Section* s = find_section(section);
  if (!s) return false;
  for (const auto& e : s->entries)
    if (e.key == key) return true;
  return false;
}

std::vector<std::string> Config::get_all(const std::string& section,
                                         const std::string& key) const {
  std::vector<std::string> out;
  if (const Section* s = find_section(section))
    for (const auto& e : s->entries)
      if (e.key == key) out.push_back(e.value);
  return out;
}

std::string Config::get(const std::string& section, const std::string& key) const {
  const auto all = get_all(section, key);
  if (all.empty())
    throw ConfigError("config: missing key '" + key + "' in section [" + section + "]");
  if (all.size() > 1)
    throw ConfigError("config: key '" + key + "' in section [" + section +
                      "] given more than once");
  return all.front();
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  const auto all = get_all(section, key);
  if (all.empty()) return fallback;
  if (all.size() > 1)
    throw ConfigError("config: key '" + key + "' in section [" + section +
                      "] given more than once");
  return all.front();
}

double Config::get_double(const std::string& section, const std::string& key) const {
  const std::string v = get(section, key);
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' in section [" + section +
                      "] is not a number: '" + v + "'");
  }
}

double Config::get_double_or(const std::string& section, const std::string& key,
                             double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

long Config::get_long(const std::string& section, const std::string& key) const {
  const std::string v = get(section, key);
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' in section [" + section +
                      "] is not an integer: '" + v + "'");
  }
}

long Config::get_long_or(const std::string& section, const std::string& key, long fallback) const {
  return has(section, key) ? get_long(section, key) : fallback;
}

std::uint64_t Config::get_u64_or(const std::string& section, const std::string& key,
                                 std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  try {
    std::size_t used = 0;
    const std::uint64_t x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' in section [" + section +
                      "] is not an unsigned integer: '" + v + "'");
  }
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  Section& s = section_ref(section);
  for (auto& e : s.entries)
    if (e.key == key) {
      e.value = value;
      return;
    }
  s.entries.push_back(Entry{key, value});
}

void Config::set_double(const std::string& section, const std::string& key, double value) {
  set(section, key, format_double(value));
}

void Config::add(const std::string& section, const std::string& key, const std::string& value) {
  section_ref(section).entries.push_back(Entry{key, value});
}

std::string Config::to_string() const {
  std::ostringstream out;
  for (const auto& s : sections_) {
    if (!s.name.empty()) out << "[" << s.name << "]\n";
    for (const auto& e : s.entries) out << e.key << " = " << e.value << "\n";
    out << "\n";
  }
  return out.str();
}

void Config::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("config: cannot write " + path.string());
  out << to_string();
}

std::vector<std::string> Config::section_names() const {
  std::vector<std::string> names;
  for (const auto& s : sections_) names.push_back(s.name);
  return names;
}

std::vector<std::string> Config::keys(const std::string& section) const {
  std::vector<std::string> out;
  if (const Section* s = find_section(section))
    for (const auto& e : s->entries) {
      bool seen = false;
      for (const auto& k : out) seen = seen || k == e.key;
      if (!seen) out.push_back(e.key);
    }
  return out;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string tok;
  while (ss >> tok) {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size())
      throw ConfigError("config: bad number in list: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace iadb
