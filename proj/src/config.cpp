#include "sfn/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sfn::config {

namespace {
std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + what + "': not a number: '" + text + "'");
}
}  // namespace

KeyValues KeyValues::parse(std::istream& in, const std::string& source) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty()) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    kv.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return kv;
}

KeyValues KeyValues::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

void KeyValues::set(const std::string& key, const std::string& value) { entries_[key] = value; }

void KeyValues::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

bool KeyValues::has(const std::string& key) const { return entries_.count(key) != 0; }

const std::string& KeyValues::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

std::string KeyValues::get_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

double KeyValues::number(const std::string& key, double fallback) const {
  return has(key) ? to_number(get(key), key) : fallback;
}

long KeyValues::integer(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const double v = to_number(get(key), key);
  if (v != std::floor(v)) throw ConfigError("'" + key + "': expected an integer, got '" + get(key) + "'");
  return long(v);
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (item.find(':') != std::string::npos && item.find_first_of("0123456789") != std::string::npos &&
        item.find(':') > 0) {
      std::stringstream rs(item);
      std::string a, s, b;
      std::getline(rs, a, ':');
      std::getline(rs, s, ':');
      std::getline(rs, b, ':');
      const double start = to_number(trim(a), text), step = to_number(trim(s), text), stop = to_number(trim(b), text);
      if (step == 0.0 || (stop - start) / step < 0.0) throw ConfigError("bad range '" + item + "'");
      const long n = long(std::floor((stop - start) / step + 1e-9));
      for (long i = 0; i <= n; ++i) out.push_back(start + double(i) * step);
    } else {
      out.push_back(to_number(item, text));
    }
  }
  return out;
}

std::vector<double> KeyValues::numbers(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  auto v = parse_number_list(get(key));
  if (v.empty()) throw ConfigError("'" + key + "': empty list");
  return v;
}

}  // namespace sfn::config
