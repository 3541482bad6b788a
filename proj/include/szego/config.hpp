#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "transform.hpp"

namespace szego {

/// Named budgets that gate PASS/FAIL in the verification suite.
inline std::map<std::string, double> default_tolerances() {
  return {
      {"gamma_moment", 1e-9},        {"fio_agreement", 1e-6},      {"phase_identity", 1e-12},
      {"gaussian_reproducing", 1e-6}, {"slice_reproduction", 1e-4}, {"slice_annihilation", 1e-4},
      {"slice_contraction", 1e-6},   {"slice_idempotency", 2e-4},  {"parseval", 1e-8},
      {"hardy_reproduction", 1e-3},  {"negative_frequency", 1e-3}, {"idempotency", 2e-3},
      {"self_adjointness", 1e-3},    {"frequency_pairing", 1e-4},  {"direct_kernel", 5e-3},
      {"form_reproduction", 1e-3},   {"witness_ratio", 1e3},       {"finite_quadrature", 1e-6},
      {"cr_order", 3.5},             {"cr_residual", 1e-3},        {"noise_factor", 1e3},
      {"gaussian_truncation", 1e-10},
  };
}

/// Flat "key = value" text. Keys are dotted; a "[section]" line prefixes the keys
/// that follow it. '#' starts a comment.
class KeyValueText {
 public:
  static KeyValueText parse(std::istream& in) {
    KeyValueText kv;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw UsageError("config line " + std::to_string(lineno) + ": unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected 'key = value'");
      std::string key = trim(line.substr(0, eq));
      if (key.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty key");
      if (!section.empty()) key = section + "." + key;
      if (kv.values_.count(key)) throw UsageError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
      kv.values_[key] = trim(line.substr(eq + 1));
    }
    return kv;
  }

  static KeyValueText parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot open config '" + path + "'");
    return parse(f);
  }

  bool has(const std::string& k) const { return values_.count(k) != 0; }

  std::string str(const std::string& k, const std::string& def) const {
    used_[k] = true;
    auto it = values_.find(k);
    return it == values_.end() ? def : it->second;
  }

  double real(const std::string& k, double def) const {
    if (!has(k)) return def;
    return to_real(k, str(k, ""));
  }

  long long integer(const std::string& k, long long def) const {
    if (!has(k)) return def;
    const std::string s = str(k, "");
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (...) {
      pos = 0;
    }
    if (pos != s.size() || s.empty()) throw UsageError("config key '" + k + "': expected an integer, got '" + s + "'");
    return v;
  }

  std::vector<double> reals(const std::string& k, const std::vector<double>& def) const {
    if (!has(k)) return def;
    std::vector<double> out;
    for (const auto& item : split(str(k, ""), ',')) out.push_back(to_real(k, item));
    return out;
  }

  std::vector<int> ints(const std::string& k, const std::vector<int>& def) const {
    if (!has(k)) return def;
    std::vector<int> out;
    for (const auto& item : split(str(k, ""), ',')) {
      const double v = to_real(k, item);
      if (v != static_cast<int>(v)) throw UsageError("config key '" + k + "': expected integers");
      out.push_back(static_cast<int>(v));
    }
    return out;
  }

  /// Keys with the given prefix (e.g. "packet.").
  std::vector<std::string> keys_with_prefix(const std::string& p) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
      if (k.rfind(p, 0) == 0) out.push_back(k);
    return out;
  }

  /// Keys never read; reported so typos do not pass silently.
  std::vector<std::string> unused() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) out.push_back(k);
    return out;
  }

  void mark_used(const std::string& k) const { used_[k] = true; }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  static std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
  }

 private:
  static double to_real(const std::string& k, const std::string& s) {
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(s, &pos);
    } catch (...) {
      pos = 0;
    }
    if (pos != s.size() || s.empty()) throw UsageError("config key '" + k + "': expected a number, got '" + s + "'");
    return v;
  }

  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> used_;
};

struct PacketEntry {
  MultiIndex component;  // form component the packet is added to
  WavePacketSpec spec;
};

struct RunConfig {
  LambdaSignature sig{std::vector<double>{1.0}};
  GridSpec grid;                       // main grid (n follows the signature)
  GridSpec grid2 = default_grid2();    // n = 2 grid of the verification suite
  double epsilon = 0.5;
  int degree = 0;                      // form degree for make-packet
  std::vector<PacketEntry> packets;
  std::uint64_t seed = 20170605;
  int jobs = 0;                        // 0: available cores
  std::map<std::string, double> tolerances = default_tolerances();
  std::optional<std::vector<HeisenbergPoint>> table_points;  // unset: built-in sample set
  std::vector<double> table_epsilons{0.25, 0.5, 1.0, 2.0};

  static GridSpec default_grid2() {
    GridSpec g;
    g.n = 2;
    g.spatial_radius = 5.0;
    g.spatial_points = 21;
    g.vertical_radius = 2.0 * pi;
    g.vertical_points = 8;
    g.freq_max = 1.0;
    return g;
  }

  double tol(const std::string& name) const {
    auto it = tolerances.find(name);
    if (it == tolerances.end()) throw std::logic_error("unknown tolerance '" + name + "'");
    return it->second;
  }
};

namespace detail {

inline GridSpec read_grid(const KeyValueText& kv, const std::string& pre, GridSpec g) {
  g.spatial_radius = kv.real(pre + "spatial_radius", g.spatial_radius);
  g.spatial_points = static_cast<int>(kv.integer(pre + "spatial_points", g.spatial_points));
  g.vertical_radius = kv.real(pre + "vertical_radius", g.vertical_radius);
  g.vertical_points = static_cast<int>(kv.integer(pre + "vertical_points", g.vertical_points));
  g.freq_max = kv.real(pre + "freq_max", g.freq_max);
  g.freq_points = static_cast<int>(kv.integer(pre + "freq_points", g.freq_points));
  g.rule = quadrature_rule_from_string(kv.str(pre + "quadrature_rule", to_string(g.rule)));
  g.validate();
  return g;
}

inline HeisenbergPoint parse_point(const std::string& text, int n) {
  const auto parts = KeyValueText::split(text, ' ');
  std::vector<double> v;
  for (const auto& p : parts)
    if (!p.empty()) v.push_back(std::stod(p));
  if (static_cast<int>(v.size()) != 2 * n + 1)
    throw UsageError("table point '" + text + "': expected " + std::to_string(2 * n + 1) + " numbers");
  HeisenbergPoint x;
  for (int j = 0; j < n; ++j) x.z.emplace_back(v[2 * j], v[2 * j + 1]);
  x.x_last = v[2 * n];
  return x;
}

inline MultiIndex parse_multiindex(const std::string& text) {
  std::string s = KeyValueText::trim(text);
  if (!s.empty() && s.front() == '(') s = s.substr(1);
  if (!s.empty() && s.back() == ')') s.pop_back();
  std::vector<int> e;
  for (const auto& item : KeyValueText::split(s, ',')) {
    try {
      e.push_back(std::stoi(item));
    } catch (...) {
      throw UsageError("bad multi-index '" + text + "'");
    }
  }
  return MultiIndex(std::move(e));
}

}  // namespace detail

/// Builds a RunConfig; unknown keys are a usage error.
inline RunConfig load_config(const KeyValueText& kv) {
  RunConfig c;
  c.sig = LambdaSignature(kv.reals("signature.lambdas", c.sig.lambdas()));
  GridSpec g = c.sig.n() == 1 ? c.grid : RunConfig::default_grid2();
  g.n = c.sig.n();
  c.grid = detail::read_grid(kv, "grid.", g);
  c.grid2 = detail::read_grid(kv, "grid2.", c.grid2);
  c.epsilon = kv.real("kernel.epsilon", c.epsilon);
  if (!(c.epsilon > 0)) throw UsageError("kernel.epsilon must be > 0");
  c.degree = static_cast<int>(kv.integer("form.degree", c.degree));
  if (c.degree < 0 || c.degree > c.sig.n()) throw UsageError("form.degree must lie in 0..n");
  c.seed = static_cast<std::uint64_t>(kv.integer("run.seed", static_cast<long long>(c.seed)));
  c.jobs = static_cast<int>(kv.integer("run.jobs", c.jobs));
  for (auto& [name, v] : c.tolerances) {
    v = kv.real("tolerance." + name, v);
    if (!(v > 0)) throw UsageError("tolerance." + name + " must be > 0");
  }
  for (const auto& k : kv.keys_with_prefix("tolerance."))
    if (!c.tolerances.count(k.substr(10))) throw UsageError("unknown tolerance '" + k + "'");

  if (kv.has("table.points")) {
    c.table_points.emplace();
    for (const auto& p : KeyValueText::split(kv.str("table.points", ""), ';'))
      c.table_points->push_back(detail::parse_point(p, c.sig.n()));
  }
  c.table_epsilons = kv.reals("table.epsilons", c.table_epsilons);
  for (double e : c.table_epsilons)
    if (!(e > 0)) throw UsageError("table.epsilons must be > 0");

  // packets: "packet.<field>" for a single packet or "packet.<k>.<field>" for several
  std::map<std::string, bool> labels;
  for (const auto& k : kv.keys_with_prefix("packet.")) {
    const std::string rest = k.substr(7);
    const auto dot = rest.find('.');
    labels[dot == std::string::npos ? std::string() : rest.substr(0, dot)] = true;
  }
  for (const auto& [label, _] : labels) {
    const std::string pre = label.empty() ? "packet." : "packet." + label + ".";
    PacketEntry e;
    e.component = detail::parse_multiindex(kv.str(pre + "component", "()"));
    e.spec.alpha = kv.ints(pre + "alpha", std::vector<int>(c.sig.n(), 0));
    e.spec.conjugated_axes = kv.ints(pre + "conjugated_axes", e.component.entries());
    e.spec.t_low = kv.real(pre + "t_low", e.spec.t_low);
    e.spec.t_high = kv.real(pre + "t_high", e.spec.t_high);
    e.spec.smoothness = static_cast<int>(kv.integer(pre + "smoothness", e.spec.smoothness));
    e.spec.sign = static_cast<int>(kv.integer(pre + "sign", e.spec.sign));
    e.spec.control = kv.integer(pre + "control", 0) != 0;
    e.spec.amplitude = cplx(kv.real(pre + "amplitude_re", 1.0), kv.real(pre + "amplitude_im", 0.0));
    c.packets.push_back(std::move(e));
  }

  const auto unused = kv.unused();
  if (!unused.empty()) throw UsageError("unknown config key '" + unused.front() + "'");
  return c;
}

inline RunConfig load_config_file(const std::string& path) { return load_config(KeyValueText::parse_file(path)); }

}  // namespace szego
