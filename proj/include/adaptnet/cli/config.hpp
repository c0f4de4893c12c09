#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "adaptnet/errors.hpp"

namespace adaptnet::cli {

// Minimal INI dialect: [section] headers, key = value pairs, full-line or
// trailing '#' comments. Keys are stored as "section.key"; every entry
// remembers its source line so validation errors can point at it.
class Config {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static Config parse_text(const std::string& text, std::string origin) {
    Config cfg;
    cfg.origin_ = std::move(origin);
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string line = raw;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw validation_error(cfg.origin_ + ":" + std::to_string(line_no) +
                                 ": unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty())
          throw validation_error(cfg.origin_ + ":" + std::to_string(line_no) +
                                 ": empty section name");
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw validation_error(cfg.origin_ + ":" + std::to_string(line_no) +
                               ": expected key = value");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        throw validation_error(cfg.origin_ + ":" + std::to_string(line_no) +
                               ": empty key");
      if (section.empty())
        throw validation_error(cfg.origin_ + ":" + std::to_string(line_no) +
                               ": key outside any [section]");
      cfg.entries_[section + "." + key] = Entry{value, line_no};
    }
    return cfg;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
      throw validation_error("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
  }

  // Every dotted key the pipeline understands; the per-agent families take a
  // numeric suffix ("model.r.3").
  static bool known_key(const std::string& dotted) {
    static const char* exact[] = {
        "topology.kind",          "topology.n_agents",
        "topology.radius",        "topology.adjacency",
        "topology.seed",          "policy.rule",
        "policy.weights",         "strategy.kind",
        "strategy.mu_max",        "strategy.beta",
        "strategy.a0",            "strategy.a1",
        "strategy.a2",            "model.kind",
        "model.dim",              "model.r",
        "model.r_diag",           "model.minimizer",
        "model.noise_var",        "model.sample_budget",
        "model.probe_radius",     "model.noise_fit_seed",
        "experiment.horizon",     "experiment.trials",
        "experiment.init",        "experiment.init_spread",
        "experiment.init_seed",   "experiment.seed",
        "experiment.threads",     "experiment.scaling_check",
    };
    for (const char* k : exact)
      if (dotted == k) return true;
    for (const char* fam :
         {"model.r.", "model.r_diag.", "model.minimizer.", "model.noise_var."}) {
      const std::string f(fam);
      if (dotted.size() > f.size() && dotted.compare(0, f.size(), f) == 0 &&
          dotted.find_first_not_of("0123456789", f.size()) == std::string::npos)
        return true;
    }
    return false;
  }

  // Overrides accept dotted keys ("strategy.mu_max=0.01") or bare keys when
  // the name is unambiguous across sections.
  void apply_override(const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos)
      throw validation_error("override '" + assignment + "': expected key=value");
    std::string key = trim(assignment.substr(0, eq));
    std::string value = trim(assignment.substr(eq + 1));
    if (key.find('.') == std::string::npos) {
      std::vector<std::string> matches;
      for (const auto& [k, v] : entries_) {
        auto dot = k.rfind('.');
        if (k.substr(dot + 1) == key) matches.push_back(k);
      }
      if (matches.empty())
        throw validation_error("override '" + key +
                               "': no such key in any section");
      if (matches.size() > 1)
        throw validation_error("override '" + key + "': ambiguous (" +
                               matches[0] + ", " + matches[1] + ", ...)");
      key = matches[0];
    } else if (!known_key(key)) {
      throw validation_error("override '" + key + "': not a recognized key");
    }
    entries_[key] = Entry{value, 0};
  }

  bool has(const std::string& dotted) const {
    return entries_.count(dotted) > 0;
  }

  const std::string& origin() const { return origin_; }

  std::string get_string(const std::string& dotted,
                         const std::string& fallback) const {
    auto it = entries_.find(dotted);
    return it == entries_.end() ? fallback : it->second.value;
  }

  std::string require_string(const std::string& dotted) const {
    auto it = entries_.find(dotted);
    if (it == entries_.end())
      throw validation_error(origin_ + ": missing required key '" + dotted + "'");
    return it->second.value;
  }

  double get_double(const std::string& dotted, double fallback) const {
    auto it = entries_.find(dotted);
    if (it == entries_.end()) return fallback;
    return parse_double(it->first, it->second);
  }

  double require_double(const std::string& dotted) const {
    auto it = entries_.find(dotted);
    if (it == entries_.end())
      throw validation_error(origin_ + ": missing required key '" + dotted + "'");
    return parse_double(it->first, it->second);
  }

  long get_long(const std::string& dotted, long fallback) const {
    auto it = entries_.find(dotted);
    if (it == entries_.end()) return fallback;
    return static_cast<long>(parse_ll(it->first, it->second));
  }

  std::uint64_t get_u64(const std::string& dotted, std::uint64_t fallback) const {
    auto it = entries_.find(dotted);
    if (it == entries_.end()) return fallback;
    try {
      return std::stoull(it->second.value);
    } catch (...) {
      throw validation_error(where(it->first, it->second) +
                             ": expected an unsigned integer, got '" +
                             it->second.value + "'");
    }
  }

  bool get_bool(const std::string& dotted, bool fallback) const {
    auto it = entries_.find(dotted);
    if (it == entries_.end()) return fallback;
    const std::string& v = it->second.value;
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw validation_error(where(it->first, it->second) +
                           ": expected on/off, got '" + v + "'");
  }

  Eigen::VectorXd get_vector(const std::string& dotted) const {
    auto it = entries_.find(dotted);
    if (it == entries_.end())
      throw validation_error(origin_ + ": missing required key '" + dotted + "'");
    return parse_vector_value(it->first, it->second);
  }

  Eigen::MatrixXd get_matrix(const std::string& dotted) const {
    auto it = entries_.find(dotted);
    if (it == entries_.end())
      throw validation_error(origin_ + ": missing required key '" + dotted + "'");
    const Entry& e = it->second;
    std::vector<Eigen::VectorXd> rows;
    std::istringstream in(e.value);
    std::string row;
    while (std::getline(in, row, ';')) {
      Entry tmp{trim(row), e.line};
      rows.push_back(parse_vector_value(it->first, tmp));
    }
    if (rows.empty())
      throw validation_error(where(it->first, e) + ": empty matrix");
    Eigen::MatrixXd m(static_cast<int>(rows.size()), rows[0].size());
    for (int r = 0; r < m.rows(); ++r) {
      if (rows[r].size() != m.cols())
        throw validation_error(where(it->first, e) + ": ragged matrix rows");
      m.row(r) = rows[r].transpose();
    }
    return m;
  }

  // Sorted "section.key=value" lines; the digest of this text identifies the
  // effective configuration regardless of formatting or override order.
  std::string canonical() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
      out += k;
      out += '=';
      out += v.value;
      out += '\n';
    }
    return out;
  }

  std::uint64_t digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : canonical()) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  static std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  std::string where(const std::string& key, const Entry& e) const {
    if (e.line > 0) return origin_ + ":" + std::to_string(e.line);
    return origin_ + " (override '" + key + "')";
  }

  double parse_double(const std::string& key, const Entry& e) const {
    try {
      std::size_t used = 0;
      double v = std::stod(e.value, &used);
      if (used != e.value.size()) throw std::invalid_argument("trailing junk");
      return v;
    } catch (...) {
      throw validation_error(where(key, e) + ": expected a number, got '" +
                             e.value + "'");
    }
  }

  long long parse_ll(const std::string& key, const Entry& e) const {
    try {
      std::size_t used = 0;
      long long v = std::stoll(e.value, &used);
      if (used != e.value.size()) throw std::invalid_argument("trailing junk");
      return v;
    } catch (...) {
      throw validation_error(where(key, e) + ": expected an integer, got '" +
                             e.value + "'");
    }
  }

  Eigen::VectorXd parse_vector_value(const std::string& key, const Entry& e) const {
    std::vector<double> vals;
    std::istringstream in(e.value);
    std::string item;
    while (std::getline(in, item, ',')) {
      Entry tmp{trim(item), e.line};
      vals.push_back(parse_double(key, tmp));
    }
    if (vals.empty())
      throw validation_error(where(key, e) + ": empty vector");
    Eigen::VectorXd v(static_cast<int>(vals.size()));
    for (int j = 0; j < v.size(); ++j) v(j) = vals[j];
    return v;
  }

  std::string origin_;
  std::map<std::string, Entry> entries_;
};

}  // namespace adaptnet::cli
