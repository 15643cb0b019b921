#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "geospin/constants.hpp"
#include "geospin/errors.hpp"

// Plain-text nested key-value config format.
//
//   # comment to end of line
//   experiment = verify-aa          top-level key
//   [grid.ratio]                    section: keys below get this prefix
//   min = 0.02
//   count = 50
//   values = 0.1 0.25 0.5           space-separated numbers make a list
//
// Keys are dotted paths. A value is a number, a bare or "quoted" string, a
// boolean (true/false), or a list of numbers. Duplicate keys and unknown
// keys are errors; every error carries a 1-based line number.

namespace geospin {

struct ConfigValue {
  enum class Kind { number, string, boolean, list } kind = Kind::string;
  double num = 0.0;
  std::string str;
  bool b = false;
  std::vector<double> list;
  int line = 0;
};

struct ConfigDoc {
  // insertion ordered, unique keys
  std::vector<std::pair<std::string, ConfigValue>> entries;

  const ConfigValue* find(const std::string& key) const {
    for (const auto& [k, v] : entries)
      if (k == key) return &v;
    return nullptr;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool valid_key_part(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
      return false;
  return true;
}

inline bool parse_number(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size();
}

inline ConfigValue parse_value(const std::string& text, int line) {
  ConfigValue v;
  v.line = line;
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    v.kind = ConfigValue::Kind::string;
    v.str = text.substr(1, text.size() - 2);
    return v;
  }
  if (text == "true" || text == "false") {
    v.kind = ConfigValue::Kind::boolean;
    v.b = (text == "true");
    return v;
  }
  double d;
  if (parse_number(text, d)) {
    v.kind = ConfigValue::Kind::number;
    v.num = d;
    return v;
  }
  // number list: either bracketed "[a, b, c]" or bare "a b c"
  const bool bracketed =
      text.size() >= 2 && text.front() == '[' && text.back() == ']';
  std::string body = bracketed ? text.substr(1, text.size() - 2) : text;
  if (bracketed) std::replace(body.begin(), body.end(), ',', ' ');
  std::istringstream iss(body);
  std::vector<double> nums;
  std::string tok;
  bool all_numbers = true;
  while (iss >> tok) {
    if (parse_number(tok, d))
      nums.push_back(d);
    else
      all_numbers = false;
  }
  if (all_numbers && (bracketed ? !nums.empty() : nums.size() >= 2)) {
    v.kind = ConfigValue::Kind::list;
    v.list = std::move(nums);
    return v;
  }
  if (bracketed)
    throw config_error("list '" + text + "' must contain only numbers", line);
  if (text.find(' ') != std::string::npos || text.find('\t') != std::string::npos)
    throw config_error("value '" + text + "' mixes words and numbers", line);
  v.kind = ConfigValue::Kind::string;
  v.str = text;
  return v;
}

}  // namespace detail

inline ConfigDoc parse_config(const std::string& text) {
  ConfigDoc doc;
  std::string prefix;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    // strip comment, respecting a possible quoted value
    std::string s;
    bool in_quote = false;
    for (char c : raw) {
      if (c == '"') in_quote = !in_quote;
      if (c == '#' && !in_quote) break;
      s += c;
    }
    s = detail::trim(s);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']')
        throw config_error("unterminated section header", line);
      prefix = detail::trim(s.substr(1, s.size() - 2));
      if (prefix.empty()) throw config_error("empty section name", line);
      std::istringstream parts(prefix);
      std::string part;
      while (std::getline(parts, part, '.'))
        if (!detail::valid_key_part(part))
          throw config_error("bad section name '" + prefix + "'", line);
      continue;
    }

    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw config_error("expected 'key = value'", line);
    std::string key = detail::trim(s.substr(0, eq));
    const std::string val = detail::trim(s.substr(eq + 1));
    if (!detail::valid_key_part(key) &&
        key.find('.') == std::string::npos)
      throw config_error("bad key '" + key + "'", line);
    if (val.empty()) throw config_error("missing value for '" + key + "'", line);
    if (!prefix.empty()) key = prefix + "." + key;
    if (doc.find(key))
      throw config_error("duplicate key '" + key + "'", line);
    doc.entries.emplace_back(key, detail::parse_value(val, line));
  }
  return doc;
}

inline ConfigDoc parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw io_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Canonical text form: sorted dotted keys, full-precision numbers. Reparses
// to an equivalent document.
inline std::string canonical_echo(const ConfigDoc& doc) {
  std::vector<std::pair<std::string, const ConfigValue*>> sorted;
  for (const auto& [k, v] : doc.entries) sorted.emplace_back(k, &v);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out;
  for (const auto& [k, v] : sorted) {
    out += k;
    out += " = ";
    switch (v->kind) {
      case ConfigValue::Kind::number: out += format_full(v->num); break;
      case ConfigValue::Kind::boolean: out += v->b ? "true" : "false"; break;
      case ConfigValue::Kind::string: out += "\"" + v->str + "\""; break;
      case ConfigValue::Kind::list: {
        for (std::size_t i = 0; i < v->list.size(); ++i) {
          if (i) out += " ";
          out += format_full(v->list[i]);
        }
        break;
      }
    }
    out += "\n";
  }
  return out;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---------------------------------------------------------------------------
// Typed experiment description.

enum class ExperimentKind {
  aa_protocol,
  verify_aa,
  sweep,
  stark_pipeline,
  berry_loop,
  spin_echo,
};

inline const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::aa_protocol: return "aa-protocol";
    case ExperimentKind::verify_aa: return "verify-aa";
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::stark_pipeline: return "stark-pipeline";
    case ExperimentKind::berry_loop: return "berry-loop";
    case ExperimentKind::spin_echo: return "spin-echo";
  }
  return "?";
}

inline std::optional<ExperimentKind> kind_from_name(const std::string& s) {
  for (ExperimentKind k :
       {ExperimentKind::aa_protocol, ExperimentKind::verify_aa,
        ExperimentKind::sweep, ExperimentKind::stark_pipeline,
        ExperimentKind::berry_loop, ExperimentKind::spin_echo})
    if (s == kind_name(k)) return k;
  return std::nullopt;
}

struct GridSpec {
  double min = 0.0;
  double max = 1.0;
  int count = 2;
  std::vector<double> explicit_values;  // overrides min/max/count when set

  std::vector<double> realize() const {
    if (!explicit_values.empty()) return explicit_values;
    if (count < 1) throw domain_error("grid count must be >= 1");
    std::vector<double> v(count);
    if (count == 1) {
      v[0] = min;
      return v;
    }
    for (int i = 0; i < count; ++i)
      v[i] = min + (max - min) * i / (count - 1);
    return v;
  }
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::aa_protocol;

  double g_factor = 0.864;
  double w0 = 0.0;
  double w1 = 1.0;
  double kappa = 1.0;
  double t_relax_ps = default_t_relax_ps;
  int steps_per_pulse = default_steps_per_pulse;
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;

  // aa-protocol / sweep(field-ratio)
  double bx_T = 1.0;
  double bz_T = 1.0;
  double alpha = 0.0;
  GridSpec alpha_grid{0.0, pi, 64, {}};

  // verify-aa / sweep
  GridSpec ratio_grid{0.04, 2.0, 50, {}};
  GridSpec gamma_grid{0.0, 2.0 * pi, 64, {}};
  std::string sweep_axis = "gamma";  // gamma | alpha | field-ratio
  double gamma_fixed = 0.0;

  // berry-loop / spin-echo
  double loop_theta_c = pi / 3.0;
  double loop_magnitude_T = 1.0;
  double loop_total_time_ps = 1.0e5;
  int loop_steps = default_loop_steps;
  std::string branch = "plus";
  int doublings = 3;
  double dwell_jitter = 0.0;

  // stark-pipeline
  double v1_meV = 1.0;
  double v2_meV = 0.0;
  double delta1_meV = 1.0;
  double delta2_meV = 1.0;
  std::string polarization = "sigma+";
  double tip_duration_ps = 0.0;  // 0: use the pi-tip duration
  std::vector<double> tip_direction{1.0, 0.0, 0.0};

  std::string config_echo;       // canonical text of the source document
  std::string config_hash;       // fnv1a64 hex of config_echo
  std::vector<std::string> warnings;
};

namespace detail {

struct KeyReader {
  const ConfigDoc& doc;
  std::vector<std::string> consumed;

  bool has(const std::string& k) {
    return doc.find(k) != nullptr;
  }
  const ConfigValue& get(const std::string& k) {
    const ConfigValue* v = doc.find(k);
    if (!v) throw config_error("missing required key '" + k + "'");
    consumed.push_back(k);
    return *v;
  }
  double number(const std::string& k, double fallback) {
    if (!has(k)) return fallback;
    const ConfigValue& v = get(k);
    if (v.kind != ConfigValue::Kind::number)
      throw config_error("key '" + k + "' must be a number", v.line);
    return v.num;
  }
  int integer(const std::string& k, int fallback) {
    if (!has(k)) return fallback;
    const ConfigValue& v = get(k);
    if (v.kind != ConfigValue::Kind::number || v.num != static_cast<int>(v.num))
      throw config_error("key '" + k + "' must be an integer", v.line);
    return static_cast<int>(v.num);
  }
  std::string str(const std::string& k, const std::string& fallback) {
    if (!has(k)) return fallback;
    const ConfigValue& v = get(k);
    if (v.kind != ConfigValue::Kind::string)
      throw config_error("key '" + k + "' must be a string", v.line);
    return v.str;
  }
  std::vector<double> list(const std::string& k) {
    const ConfigValue& v = get(k);
    if (v.kind == ConfigValue::Kind::list) return v.list;
    if (v.kind == ConfigValue::Kind::number) return {v.num};
    throw config_error("key '" + k + "' must be a list of numbers", v.line);
  }
  GridSpec grid(const std::string& prefix, const GridSpec& fallback) {
    GridSpec g = fallback;
    bool any = false;
    if (has(prefix + ".values")) {
      g.explicit_values = list(prefix + ".values");
      any = true;
    }
    if (has(prefix + ".min")) { g.min = number(prefix + ".min", g.min); any = true; }
    if (has(prefix + ".max")) { g.max = number(prefix + ".max", g.max); any = true; }
    if (has(prefix + ".count")) { g.count = integer(prefix + ".count", g.count); any = true; }
    if (any && g.explicit_values.empty() && g.count >= 2 && !(g.max > g.min))
      throw config_error("grid '" + prefix + "' needs max > min");
    return g;
  }
  void reject_unknown() const {
    for (const auto& [k, v] : doc.entries) {
      if (std::find(consumed.begin(), consumed.end(), k) == consumed.end())
        throw config_error("unknown key '" + k + "'", v.line);
    }
  }
};

}  // namespace detail

// Validate a parsed document against the schema of its experiment kind and
// produce the typed config. Weights are accepted when they sum to 1 within
// 1e-9 and renormalized exactly; probe angles outside [0, pi] are folded
// with a warning.
inline ExperimentConfig make_experiment_config(const ConfigDoc& doc) {
  detail::KeyReader r{doc, {}};
  ExperimentConfig c;

  const std::string kind_str = r.str("experiment", "");
  if (kind_str.empty()) throw config_error("missing required key 'experiment'");
  const auto k = kind_from_name(kind_str);
  if (!k)
    throw config_error("unknown experiment '" + kind_str + "'");
  c.kind = *k;

  c.g_factor = r.number("g_factor", c.g_factor);
  if (c.g_factor == 0.0) throw config_error("g_factor must be nonzero");
  c.w0 = r.number("w0", c.w0);
  c.w1 = r.number("w1", c.w1);
  if (c.w0 < 0.0 || c.w1 < 0.0)
    throw config_error("weights w0, w1 must be nonnegative");
  const double wsum = c.w0 + c.w1;
  if (std::abs(wsum - 1.0) > 1e-9)
    throw config_error("weights w0 + w1 = " + format_full(wsum) +
                       " must sum to 1 within 1e-9");
  c.w0 /= wsum;
  c.w1 /= wsum;
  c.kappa = r.number("probe.kappa", c.kappa);
  c.t_relax_ps = r.number("t_relax_ps", c.t_relax_ps);
  if (c.t_relax_ps <= 0.0) throw config_error("t_relax_ps must be positive");
  c.steps_per_pulse = r.integer("steps_per_pulse", c.steps_per_pulse);
  if (c.steps_per_pulse < 1) throw config_error("steps_per_pulse must be >= 1");
  c.seed = static_cast<std::uint64_t>(r.number("seed", static_cast<double>(c.seed)));

  c.alpha = r.number("probe.alpha", c.alpha);
  if (c.alpha < 0.0 || c.alpha > pi) {
    double folded = std::abs(std::remainder(c.alpha, 2.0 * pi));
    c.warnings.push_back("probe.alpha = " + format_full(c.alpha) +
                         " folded into [0, pi] as " + format_full(folded));
    c.alpha = folded;
  }

  switch (c.kind) {
    case ExperimentKind::aa_protocol:
      c.bx_T = r.number("field.bx", c.bx_T);
      c.bz_T = r.number("field.bz", c.bz_T);
      c.alpha_grid = r.grid("grid.alpha", c.alpha_grid);
      break;
    case ExperimentKind::verify_aa:
      c.ratio_grid = r.grid("grid.ratio", c.ratio_grid);
      break;
    case ExperimentKind::sweep:
      c.sweep_axis = r.str("axis", c.sweep_axis);
      if (c.sweep_axis != "gamma" && c.sweep_axis != "alpha" &&
          c.sweep_axis != "field-ratio")
        throw config_error("axis must be gamma, alpha, or field-ratio");
      c.gamma_grid = r.grid("grid.gamma", c.gamma_grid);
      c.alpha_grid = r.grid("grid.alpha", c.alpha_grid);
      c.ratio_grid = r.grid("grid.ratio", c.ratio_grid);
      c.gamma_fixed = r.number("gamma", c.gamma_fixed);
      break;
    case ExperimentKind::stark_pipeline:
      c.v1_meV = r.number("stark.v1", c.v1_meV);
      c.v2_meV = r.number("stark.v2", c.v2_meV);
      c.delta1_meV = r.number("stark.delta1", c.delta1_meV);
      c.delta2_meV = r.number("stark.delta2", c.delta2_meV);
      c.polarization = r.str("stark.polarization", c.polarization);
      if (c.polarization != "sigma+" && c.polarization != "sigma-")
        throw config_error("stark.polarization must be sigma+ or sigma-");
      c.tip_duration_ps = r.number("pulse.duration_ps", c.tip_duration_ps);
      if (r.has("pulse.direction")) {
        c.tip_direction = r.list("pulse.direction");
        if (c.tip_direction.size() != 3)
          throw config_error("pulse.direction needs exactly 3 components");
      }
      break;
    case ExperimentKind::berry_loop:
    case ExperimentKind::spin_echo:
      c.loop_theta_c = r.number("loop.theta_c", c.loop_theta_c);
      if (c.loop_theta_c < 0.0 || c.loop_theta_c > pi)
        throw config_error("loop.theta_c must lie in [0, pi]");
      c.loop_magnitude_T = r.number("loop.magnitude_T", c.loop_magnitude_T);
      c.loop_total_time_ps = r.number("loop.total_time_ps", c.loop_total_time_ps);
      c.loop_steps = r.integer("loop.steps", c.loop_steps);
      if (c.kind == ExperimentKind::berry_loop) {
        c.branch = r.str("branch", c.branch);
        if (c.branch != "plus" && c.branch != "minus")
          throw config_error("branch must be plus or minus");
        c.doublings = r.integer("doublings", c.doublings);
        if (c.doublings < 0 || c.doublings > 12)
          throw config_error("doublings must lie in [0, 12]");
      } else {
        c.dwell_jitter = r.number("echo.dwell_jitter", c.dwell_jitter);
        if (c.dwell_jitter < 0.0 || c.dwell_jitter >= 0.5)
          throw config_error("echo.dwell_jitter must lie in [0, 0.5)");
      }
      break;
  }

  r.reject_unknown();
  c.config_echo = canonical_echo(doc);
  c.config_hash = hex64(fnv1a64(c.config_echo));
  return c;
}

inline ExperimentConfig default_config(ExperimentKind kind) {
  ConfigDoc doc;
  ConfigValue v;
  v.kind = ConfigValue::Kind::string;
  v.str = kind_name(kind);
  doc.entries.emplace_back("experiment", v);
  return make_experiment_config(doc);
}

}  // namespace geospin
