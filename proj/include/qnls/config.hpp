#pragma once

// Run configuration: flat `key = value` lines grouped under [section]
// headers. Every key is declared in the schema below with a type and a
// default; anything else is rejected.

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnls {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ValueType { Real, Int, Bool, Text, RealList, TextList };

struct ConfigKey {
  std::string section;
  std::string key;
  ValueType type;
  std::string fallback;
  std::string doc;

  std::string name() const { return section + "." + key; }
};

inline const std::vector<ConfigKey>& config_schema() {
  using V = ValueType;
  static const std::vector<ConfigKey> schema = {
      {"run", "seed", V::Int, "1", "base seed; every random draw derives from it"},
      {"run", "threads", V::Int, "1", "worker threads for ensemble cells"},

      {"grid", "n", V::Int, "1024", "grid points (power of two)"},
      {"grid", "length", V::Real, "6.2831853071795862", "torus length"},

      {"evolution", "alpha", V::Real, "0.6", ""},
      {"evolution", "beta", V::Real, "0.2", ""},
      {"evolution", "nonlinearity", V::Text, "u2", "u2 | uubar | ubar2"},
      {"evolution", "form", V::Text, "v", "u | v | z"},
      {"evolution", "dt", V::Real, "1.25e-4", ""},
      {"evolution", "t_final", V::Real, "0.1", ""},
      {"evolution", "save_every", V::Int, "100", "steps between snapshots"},
      {"evolution", "coupling", V::Real, "1", "0 switches the nonlinearity off"},
      {"evolution", "blowup_factor", V::Real, "1e6", ""},

      {"data", "sigma", V::Real, "0", "regularity of the borderline datum"},
      {"data", "fit_lo", V::Int, "2", ""},
      {"data", "fit_hi", V::Int, "7", ""},
      {"data", "top_band", V::Int, "8", "modes below 2^top_band are populated"},
      {"data", "l2", V::Real, "1", "L^2 normalization (<= 0 keeps the raw law)"},
      {"data", "zero_mean", V::Bool, "true", "leave the xi = 0 mode empty"},
      {"data", "ensemble", V::Int, "16", "seeds for the normal-form smoothing check"},

      {"identity", "pairs", V::Int, "8", "random pairs per normal form"},
      {"identity", "n", V::Int, "64", ""},
      {"identity", "length", V::Real, "25.132741228718345", "8 pi: spacing 1/4"},
      {"identity", "max_mode", V::Int, "4", ""},
      {"identity", "t", V::Real, "0.3", ""},
      {"identity", "dt", V::Real, "1e-3", "difference step; halved for the order check"},

      {"decompose", "u_sigma", V::Real, "-0.78", "u-form datum regularity"},

      {"rates", "kinds", V::TextList, "gain1,gain2,gain3,kkk1,kkk2,kkk3,kkkk1,plusminus", ""},
      {"rates", "k_lo", V::Int, "3", ""},
      {"rates", "k_hi", V::Int, "8", ""},
      {"rates", "delta", V::Real, "0.05", ""},
      {"rates", "seeds", V::Int, "16", ""},
      {"rates", "domain_length", V::Real, "201.06192982974676", "64 pi"},
      {"rates", "envelope", V::Real, "6", ""},
      {"rates", "half_width", V::Int, "1", ""},
      {"rates", "mode_spacing", V::Real, "0.25", ""},
      {"rates", "window_T", V::Real, "1", ""},
      {"rates", "modulation", V::Real, "1.5", ""},
      {"rates", "time_samples", V::Int, "129", ""},
      {"rates", "amplitude", V::Real, "1", ""},
      {"rates", "max_points", V::Int, "262144", ""},

      {"mnorm", "boxes", V::RealList,
       "4,4,8,1,1,32, 8,8,16,1,1,128, 16,16,32,1,1,512, 8,8,16,1,4,128, 8,8,16,4,4,128, "
       "8,8,16,2,8,128, 4,8,8,1,1,64, 8,4,8,1,2,64, 4,16,16,1,1,128",
       "(N1,N2,N3,L1,L2,L3) sextuples, signs (+,+,-)"},
      {"mnorm", "n_tau", V::Int, "4", ""},
      {"mnorm", "n_xi", V::Int, "8", ""},
      {"mnorm", "iters", V::Int, "20", ""},
      {"mnorm", "h_window", V::Real, "0", "0 disables the |h| ~ H window"},

      {"lipschitz", "eps", V::RealList, "1e-4,1e-3,1e-2,1e-1", ""},

      {"subst", "beta", V::Real, "0.3", ""},
      {"subst", "max_mode", V::Int, "12", "Gaussian-weighted smooth datum"},
      {"subst", "l2", V::Real, "1", ""},
  };
  return schema;
}

namespace config_detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double to_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

inline long long to_int(const std::string& s) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError("not an integer: '" + s + "'");
  return v;
}

inline bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("not a boolean: '" + s + "'");
}

inline void check_type(const ConfigKey& k, const std::string& v) {
  switch (k.type) {
    case ValueType::Real: to_real(v); break;
    case ValueType::Int: to_int(v); break;
    case ValueType::Bool: to_bool(v); break;
    case ValueType::Text:
      if (v.empty()) throw ConfigError("empty value");
      break;
    case ValueType::RealList:
      for (const auto& x : split(v)) to_real(x);
      break;
    case ValueType::TextList:
      if (split(v).empty()) throw ConfigError("empty list");
      break;
  }
}

inline const ConfigKey* find_key(const std::string& section, const std::string& key) {
  for (const auto& k : config_schema())
    if (k.section == section && k.key == key) return &k;
  return nullptr;
}

inline bool known_section(const std::string& section) {
  for (const auto& k : config_schema())
    if (k.section == section) return true;
  return false;
}

}  // namespace config_detail

class Config {
 public:
  Config() {
    for (const auto& k : config_schema()) values_[k.name()] = k.fallback;
  }

  static Config parse(std::istream& in, const std::string& source = "<config>") {
    using namespace config_detail;
    Config c;
    std::map<std::string, int> seen;
    std::string section, line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string where = source + ":" + std::to_string(lineno) + ": ";
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw ConfigError(where + "malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        if (!known_section(section)) throw ConfigError(where + "unknown section [" + section + "]");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
      if (section.empty()) throw ConfigError(where + "key outside any section");
      const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
      const ConfigKey* k = find_key(section, key);
      if (!k) throw ConfigError(where + "unknown key '" + key + "' in [" + section + "]");
      if (seen.count(k->name())) throw ConfigError(where + "duplicate key " + k->name());
      seen[k->name()] = lineno;
      try {
        check_type(*k, value);
      } catch (const ConfigError& e) {
        throw ConfigError(where + k->name() + ": " + e.what());
      }
      c.values_[k->name()] = value;
    }
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse(in, path);
  }

  /// Overrides one value, e.g. set("run.seed", "7").
  void set(const std::string& name, const std::string& value) {
    const auto dot = name.find('.');
    const ConfigKey* k = dot == std::string::npos ? nullptr
                                                  : config_detail::find_key(name.substr(0, dot), name.substr(dot + 1));
    if (!k) throw ConfigError("unknown key " + name);
    config_detail::check_type(*k, value);
    values_[name] = value;
  }

  const std::string& text(const std::string& name) const {
    const auto it = values_.find(name);
    if (it == values_.end()) throw std::logic_error("config: undeclared key " + name);
    return it->second;
  }
  double real(const std::string& name) const { return config_detail::to_real(text(name)); }
  long long integer(const std::string& name) const { return config_detail::to_int(text(name)); }
  bool flag(const std::string& name) const { return config_detail::to_bool(text(name)); }
  std::vector<double> reals(const std::string& name) const {
    std::vector<double> out;
    for (const auto& s : config_detail::split(text(name))) out.push_back(config_detail::to_real(s));
    return out;
  }
  std::vector<std::string> words(const std::string& name) const { return config_detail::split(text(name)); }

  /// Canonical text with every key, in schema order.
  std::string resolved_text() const {
    std::string out, section;
    for (const auto& k : config_schema()) {
      if (k.section != section) {
        if (!section.empty()) out += "\n";
        section = k.section;
        out += "[" + section + "]\n";
      }
      out += k.key + " = " + values_.at(k.name()) + "\n";
    }
    return out;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& k : config_schema()) j[k.section][k.key] = values_.at(k.name());
    return j;
  }

  /// FNV-1a of the resolved text.
  std::uint64_t hash() const {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : resolved_text()) {
      h ^= ch;
      h *= 1099511628211ull;
    }
    return h;
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace qnls
