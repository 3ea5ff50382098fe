#pragma once

// Experiment reports and their on-disk forms: <id>.json, <id>_<table>.csv,
// <id>_<plot>.dat (two columns, gnuplot-ready) and any raw extra files.

#include "qnls/config.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace qnls {

using Cell = std::variant<double, long long, std::string>;

inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_real(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("table " + name + ": row width mismatch");
    rows.push_back(std::move(row));
  }

  std::string csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
    out += "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + format_cell(r[i]);
      out += "\n";
    }
    return out;
  }
};

struct Plot {
  std::string name;
  std::string x_label, y_label;
  std::vector<double> x, y;

  std::string dat() const {
    std::string out = "# " + x_label + " " + y_label + "\n";
    for (std::size_t i = 0; i < x.size(); ++i) out += format_real(x[i]) + " " + format_real(y[i]) + "\n";
    return out;
  }
};

struct Check {
  std::string name;
  double value = 0.0;
  /// Human-readable acceptance condition, e.g. "<= 1e-05".
  std::string condition;
  bool pass = false;
  std::string detail;
};

struct ExperimentReport {
  std::string id;
  Config config;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  nlohmann::ordered_json outputs = nlohmann::ordered_json::object();
  std::vector<Check> checks;
  std::vector<Table> tables;
  std::vector<Plot> plots;
  /// (file name, contents) written verbatim.
  std::vector<std::pair<std::string, std::string>> files;
  std::string started, finished;

  bool ok() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  Check& check(std::string name, double value, std::string condition, bool pass, std::string detail = "") {
    checks.push_back({std::move(name), value, std::move(condition), pass, std::move(detail)});
    return checks.back();
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["experiment"] = id;
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config.hash()));
    j["config_hash"] = hash;
    j["config"] = config.to_json();
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    auto cs = nlohmann::ordered_json::array();
    for (const auto& c : checks)
      cs.push_back({{"name", c.name}, {"value", c.value}, {"condition", c.condition}, {"pass", c.pass},
                    {"detail", c.detail}});
    j["checks"] = cs;
    j["pass"] = ok();
    auto files_j = nlohmann::ordered_json::array();
    for (const auto& t : tables) files_j.push_back(id + "_" + t.name + ".csv");
    for (const auto& p : plots) files_j.push_back(id + "_" + p.name + ".dat");
    for (const auto& f : files) files_j.push_back(f.first);
    j["artifacts"] = files_j;
    j["timestamps"] = {{"started", started}, {"finished", finished}};
    return j;
  }
};

inline std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << s;
}

inline void write_report(const ExperimentReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& t : r.tables) write_text(dir / (r.id + "_" + t.name + ".csv"), t.csv());
  for (const auto& p : r.plots) write_text(dir / (r.id + "_" + p.name + ".dat"), p.dat());
  for (const auto& f : r.files) write_text(dir / f.first, f.second);
  write_text(dir / (r.id + ".json"), r.to_json().dump(2) + "\n");
}

}  // namespace qnls
