#include "isslab/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "isslab/linalg.hpp"

namespace isslab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("Config: cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_text(os.str());
}

Config Config::parse_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("Config: line " + std::to_string(line_no) +
                                  " is not key=value: '" + t + "'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("Config: empty key at line " + std::to_string(line_no));
    if (!section.empty()) key = section + "." + key;
    cfg.kv_[key] = value;
  }
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
  kv_[key] = value;
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get_string(const std::string& key, const std::string& dflt) const {
  consumed_.insert(key);
  auto it = kv_.find(key);
  return it == kv_.end() ? dflt : it->second;
}

double Config::get_double(const std::string& key, double dflt) const {
  consumed_.insert(key);
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  try {
    return std::stod(it->second);
  } catch (...) {
    throw std::invalid_argument("Config: key '" + key + "' is not a number: '" +
                                it->second + "'");
  }
}

int Config::get_int(const std::string& key, int dflt) const {
  consumed_.insert(key);
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  try {
    return std::stoi(it->second);
  } catch (...) {
    throw std::invalid_argument("Config: key '" + key + "' is not an integer: '" +
                                it->second + "'");
  }
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t dflt) const {
  consumed_.insert(key);
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  try {
    return std::stoull(it->second);
  } catch (...) {
    throw std::invalid_argument("Config: key '" + key + "' is not an integer: '" +
                                it->second + "'");
  }
}

std::vector<std::string> Config::unconsumed() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : kv_)
    if (!consumed_.count(k)) out.push_back(k);
  return out;
}

std::string Config::echo() const {
  std::ostringstream os;
  for (const auto& [k, v] : kv_) os << k << "=" << v << "\n";
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  require(bool(out), "write_text_file: cannot open " + path);
  out << text;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  require(bool(out), "write_csv: cannot open " + path);
  out.precision(17);
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("read_two_column_csv: cannot open " + path);
  std::vector<double> xs, ys;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos) continue;
    try {
      const double x = std::stod(t.substr(0, comma));
      const double y = std::stod(t.substr(comma + 1));
      xs.push_back(x);
      ys.push_back(y);
    } catch (...) {
      continue;  // header row
    }
  }
  require(!xs.empty(), "read_two_column_csv: no numeric rows in " + path);
  return {std::move(xs), std::move(ys)};
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("read_numeric_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (...) {
        numeric = false;
        break;
      }
    }
    if (numeric && !row.empty()) rows.push_back(std::move(row));
  }
  require(!rows.empty(), "read_numeric_csv: no numeric rows in " + path);
  return rows;
}

std::pair<std::string, std::vector<double>> parse_catalog_spec(
    const std::string& text) {
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos) return {t, {}};
  if (t.back() != ')')
    throw std::invalid_argument("parse_catalog_spec: missing ')' in '" + t + "'");
  std::string name = trim(t.substr(0, open));
  std::vector<double> params;
  std::stringstream ss(t.substr(open + 1, t.size() - open - 2));
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const std::string c = trim(cell);
    if (c.empty()) continue;
    try {
      params.push_back(std::stod(c));
    } catch (...) {
      throw std::invalid_argument("parse_catalog_spec: bad parameter '" + c + "'");
    }
  }
  return {name, params};
}

}  // namespace isslab
