// Line-oriented key=value configuration with [section] headers, plus small
// CSV helpers. Keys are flattened to "section.key"; every key must be
// consumed by the experiment that runs, unknown keys are rejected.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace isslab {

class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_text(const std::string& text);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  // Typed getters; record the access so leftover keys can be reported.
  std::string get_string(const std::string& key, const std::string& dflt) const;
  double get_double(const std::string& key, double dflt) const;
  int get_int(const std::string& key, int dflt) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t dflt) const;

  std::vector<std::string> unconsumed() const;
  // Deterministic echo of the full resolved configuration.
  std::string echo() const;

 private:
  std::map<std::string, std::string> kv_;
  mutable std::set<std::string> consumed_;
};

void write_text_file(const std::string& path, const std::string& text);

// CSV with a header row; all cells formatted with max precision.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Two-column CSV reader (argument, value); skips a non-numeric header row.
std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(
    const std::string& path);

// General numeric CSV: every full-numeric row, split on commas.
std::vector<std::vector<double>> read_numeric_csv(const std::string& path);

// Catalog spec strings "name" or "name(p1,p2,...)", e.g. "power(2)",
// "saturating", "exp_decay(1,0.5)".
std::pair<std::string, std::vector<double>> parse_catalog_spec(
    const std::string& text);

}  // namespace isslab
