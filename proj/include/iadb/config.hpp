#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace iadb {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Plain-text key=value configuration, grouped into [sections]. Lines
/// starting with '#' are comments. Keys may repeat within a section (the
/// values accumulate in order). Keys outside any section belong to the ""
/// section.
class Config {
 public:
  static Config parse_file(const std::filesystem::path& path);
  static Config parse_string(const std::string& text);

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;

  /// Single-valued accessors; throw ConfigError when missing (the _or
  /// variants substitute a default), or when a key was given repeatedly.
  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key, double fallback) const;
  long get_long(const std::string& section, const std::string& key) const;
  long get_long_or(const std::string& section, const std::string& key, long fallback) const;
  std::uint64_t get_u64_or(const std::string& section, const std::string& key,
                           std::uint64_t fallback) const;

  /// All values recorded for a repeatable key, in file order.
  std::vector<std::string> get_all(const std::string& section, const std::string& key) const;

  /// Setters used when materializing resolved configs and manifests.
  void set(const std::string& section, const std::string& key, const std::string& value);
  void set_double(const std::string& section, const std::string& key, double value);
  void add(const std::string& section, const std::string& key, const std::string& value);

  /// Serializes back to the same grammar, sections in insertion order.
  std::string to_string() const;
  void save(const std::filesystem::path& path) const;

  std::vector<std::string> section_names() const;
  /// Keys of one section in insertion order (without duplicates).
  std::vector<std::string> keys(const std::string& section) const;

 private:
  struct Entry {
    std::string key;
    std::string value;
  };
  struct Section {
    std::string name;
    std::vector<Entry> entries;
  };
  Section* find_section(const std::string& name);
  const Section* find_section(const std::string& name) const;
  Section& section_ref(const std::string& name);

  std::vector<Section> sections_;
};

/// Parses a whitespace-separated list of numbers.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace iadb
