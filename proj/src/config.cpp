#include "chhs/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace chhs {

ConfigError::ConfigError(const std::string& message, int line, std::string key)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                  : message),
      line_(line),
      key_(std::move(key)) {}

IoError::IoError(const std::string& message, std::string path)
    : std::runtime_error(message + ": " + path), path_(std::move(path)) {}

std::string ic_kind_name(IcKind k) {
  switch (k) {
    case IcKind::kConstantPlusModes: return "constant_plus_modes";
    case IcKind::kRandomPerturbation: return "random_perturbation";
    case IcKind::kTanhInterface: return "tanh_interface";
    case IcKind::kFromSnapshot: return "from_snapshot";
  }
  return "?";
}

IcKind parse_ic_kind(const std::string& name) {
  for (IcKind k : {IcKind::kConstantPlusModes, IcKind::kRandomPerturbation,
                   IcKind::kTanhInterface, IcKind::kFromSnapshot}) {
    if (ic_kind_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown ic.kind '" + name + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& s) {
  const std::string t = trim(s);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    throw std::invalid_argument("expected a number, got '" + s + "'");
  }
  return v;
}

long to_long(const std::string& s) {
  const std::string t = trim(s);
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    throw std::invalid_argument("expected an integer, got '" + s + "'");
  }
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  const std::string t = trim(s);
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || t[0] == '-' || end != t.c_str() + t.size() || errno == ERANGE) {
    throw std::invalid_argument("expected a nonnegative integer, got '" + s + "'");
  }
  return v;
}

bool to_bool(const std::string& s) {
  const std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw std::invalid_argument("expected true/false, got '" + s + "'");
}

std::vector<double> to_list(const std::string& s) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    if (!trim(item).empty()) out.push_back(to_double(item));
  }
  return out;
}

std::string from_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t n = 0; n < v.size(); ++n) out += (n ? "," : "") + fmt(v[n]);
  return out;
}

// "i,j[,k]:amplitude" entries separated by ';'
std::vector<ModeAmplitude> to_modes(const std::string& s) {
  std::vector<ModeAmplitude> out;
  std::string entry;
  std::istringstream is(s);
  while (std::getline(is, entry, ';')) {
    if (trim(entry).empty()) continue;
    const auto colon = entry.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("mode entry '" + trim(entry) + "' lacks ':amplitude'");
    }
    ModeAmplitude m;
    m.amplitude = to_double(entry.substr(colon + 1));
    std::istringstream idx(entry.substr(0, colon));
    std::string part;
    int a = 0;
    while (std::getline(idx, part, ',')) {
      if (a >= 3) throw std::invalid_argument("mode index has more than 3 entries");
      const long v = to_long(part);
      if (v < 0) throw std::invalid_argument("negative mode index");
      m.index[a++] = static_cast<int>(v);
    }
    if (a == 0) throw std::invalid_argument("empty mode index");
    out.push_back(m);
  }
  return out;
}

std::string from_modes(const std::vector<ModeAmplitude>& modes, int dim) {
  std::string out;
  for (std::size_t n = 0; n < modes.size(); ++n) {
    if (n) out += ";";
    for (int a = 0; a < dim; ++a) out += (a ? "," : "") + std::to_string(modes[n].index[a]);
    out += ":" + fmt(modes[n].amplitude);
  }
  return out;
}

struct Key {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::optional<std::string>(const RunConfig&)> get;
};

using KeyTable = std::vector<std::pair<std::string, Key>>;

const KeyTable& keys() {
  static const KeyTable table = [] {
    KeyTable t;
    auto add = [&](std::string name, Key k) { t.emplace_back(std::move(name), std::move(k)); };
    auto opt = [](std::string s) { return std::optional<std::string>(std::move(s)); };

    add("experiment", {[](RunConfig& c, const std::string& v) { c.experiment = trim(v); },
                       [=](const RunConfig& c) { return opt(c.experiment); }});
    add("domain.dim", {[](RunConfig& c, const std::string& v) {
                         const long d = to_long(v);
                         if (d != 2 && d != 3) throw std::invalid_argument("dim must be 2 or 3");
                         c.domain.dim = static_cast<int>(d);
                       },
                       [=](const RunConfig& c) { return opt(std::to_string(c.domain.dim)); }});
    const char* axes = "xyz";
    for (int a = 0; a < 3; ++a) {
      add(std::string("domain.L") + axes[a],
          {[a](RunConfig& c, const std::string& v) { c.domain.extents[a] = to_double(v); },
           [=](const RunConfig& c) {
             return a < c.domain.dim ? opt(fmt(c.domain.extents[a])) : std::nullopt;
           }});
    }
    for (int a = 0; a < 3; ++a) {
      add(std::string("domain.N") + axes[a],
          {[a](RunConfig& c, const std::string& v) {
             c.domain.modes[a] = static_cast<int>(to_long(v));
           },
           [=](const RunConfig& c) {
             return a < c.domain.dim ? opt(std::to_string(c.domain.modes[a])) : std::nullopt;
           }});
    }
    // Shorthands: every active axis at once. Never serialized.
    add("domain.L", {[](RunConfig& c, const std::string& v) {
                       const double x = to_double(v);
                       c.domain.extents = {x, x, x};
                     },
                     [](const RunConfig&) { return std::optional<std::string>(); }});
    add("domain.N", {[](RunConfig& c, const std::string& v) {
                       const int n = static_cast<int>(to_long(v));
                       c.domain.modes = {n, n, n};
                     },
                     [](const RunConfig&) { return std::optional<std::string>(); }});
    add("domain.epsilon",
        {[](RunConfig& c, const std::string& v) { c.domain.epsilon = to_double(v); },
         [=](const RunConfig& c) { return opt(fmt(c.domain.epsilon)); }});
    add("domain.gamma",
        {[](RunConfig& c, const std::string& v) { c.domain.gamma = to_double(v); },
         [=](const RunConfig& c) { return opt(fmt(c.domain.gamma)); }});

    add("model.advection",
        {[](RunConfig& c, const std::string& v) { c.model.advection_enabled = to_bool(v); },
         [=](const RunConfig& c) { return opt(c.model.advection_enabled ? "true" : "false"); }});
    add("model.dealias_padding",
        {[](RunConfig& c, const std::string& v) {
           c.model.dealias_padding = static_cast<int>(to_long(v));
         },
         [=](const RunConfig& c) { return opt(std::to_string(c.model.dealias_padding)); }});

    add("ic.kind", {[](RunConfig& c, const std::string& v) { c.ic.kind = parse_ic_kind(trim(v)); },
                    [=](const RunConfig& c) { return opt(ic_kind_name(c.ic.kind)); }});
    add("ic.mean", {[](RunConfig& c, const std::string& v) { c.ic.mean = to_double(v); },
                    [=](const RunConfig& c) { return opt(fmt(c.ic.mean)); }});
    add("ic.amplitude",
        {[](RunConfig& c, const std::string& v) { c.ic.amplitude = to_double(v); },
         [=](const RunConfig& c) { return opt(fmt(c.ic.amplitude)); }});
    add("ic.seed", {[](RunConfig& c, const std::string& v) { c.ic.seed = to_u64(v); },
                    [=](const RunConfig& c) { return opt(std::to_string(c.ic.seed)); }});
    add("ic.q", {[](RunConfig& c, const std::string& v) { c.ic.q = to_double(v); },
                 [=](const RunConfig& c) { return opt(fmt(c.ic.q)); }});
    add("ic.target_h2",
        {[](RunConfig& c, const std::string& v) {
           if (trim(v).empty() || trim(v) == "none") {
             c.ic.target_h2.reset();
           } else {
             c.ic.target_h2 = to_double(v);
           }
         },
         [=](const RunConfig& c) {
           return c.ic.target_h2 ? opt(fmt(*c.ic.target_h2)) : std::nullopt;
         }});
    add("ic.modes", {[](RunConfig& c, const std::string& v) { c.ic.modes = to_modes(v); },
                     [=](const RunConfig& c) {
                       return c.ic.modes.empty() ? std::nullopt
                                                 : opt(from_modes(c.ic.modes, c.domain.dim));
                     }});
    add("ic.axis", {[](RunConfig& c, const std::string& v) {
                      c.ic.axis = static_cast<int>(to_long(v));
                    },
                    [=](const RunConfig& c) { return opt(std::to_string(c.ic.axis)); }});
    add("ic.x0", {[](RunConfig& c, const std::string& v) { c.ic.x0 = to_double(v); },
                  [=](const RunConfig& c) { return opt(fmt(c.ic.x0)); }});
    add("ic.snapshot", {[](RunConfig& c, const std::string& v) { c.ic.snapshot = trim(v); },
                        [=](const RunConfig& c) {
                          return c.ic.snapshot.empty() ? std::nullopt : opt(c.ic.snapshot);
                        }});

    add("integrator.scheme",
        {[](RunConfig& c, const std::string& v) { c.integrator.scheme = parse_scheme(trim(v)); },
         [=](const RunConfig& c) { return opt(scheme_name(c.integrator.scheme)); }});
    auto real = [&](const char* name, double IntegratorConfig::*field) {
      add(std::string("integrator.") + name,
          {[field](RunConfig& c, const std::string& v) { c.integrator.*field = to_double(v); },
           [=](const RunConfig& c) { return opt(fmt(c.integrator.*field)); }});
    };
    real("dt", &IntegratorConfig::dt);
    real("dt_min", &IntegratorConfig::dt_min);
    real("dt_max", &IntegratorConfig::dt_max);
    real("stabilization", &IntegratorConfig::stabilization);
    add("integrator.energy_tol",
        {[](RunConfig& c, const std::string& v) {
           if (trim(v).empty() || trim(v) == "auto") {
             c.integrator.energy_tol.reset();
           } else {
             c.integrator.energy_tol = to_double(v);
           }
         },
         [=](const RunConfig& c) {
           return c.integrator.energy_tol ? opt(fmt(*c.integrator.energy_tol)) : opt("auto");
         }});
    add("integrator.adapt",
        {[](RunConfig& c, const std::string& v) { c.integrator.adapt = to_bool(v); },
         [=](const RunConfig& c) { return opt(c.integrator.adapt ? "true" : "false"); }});
    real("t_end", &IntegratorConfig::t_end);
    add("integrator.checkpoint_every",
        {[](RunConfig& c, const std::string& v) {
           c.integrator.checkpoint_every = static_cast<int>(to_long(v));
         },
         [=](const RunConfig& c) { return opt(std::to_string(c.integrator.checkpoint_every)); }});
    real("growth", &IntegratorConfig::growth);
    real("shrink", &IntegratorConfig::shrink);
    add("integrator.patience",
        {[](RunConfig& c, const std::string& v) {
           c.integrator.patience = static_cast<int>(to_long(v));
         },
         [=](const RunConfig& c) { return opt(std::to_string(c.integrator.patience)); }});
    real("blowup_threshold", &IntegratorConfig::blowup_threshold);

    add("output.directory",
        {[](RunConfig& c, const std::string& v) { c.output.directory = trim(v); },
         [=](const RunConfig& c) { return opt(c.output.directory); }});
    add("output.snapshot_times",
        {[](RunConfig& c, const std::string& v) { c.output.snapshot_times = to_list(v); },
         [=](const RunConfig& c) {
           return c.output.snapshot_times.empty() ? std::nullopt
                                                  : opt(from_list(c.output.snapshot_times));
         }});
    add("output.csv_every",
        {[](RunConfig& c, const std::string& v) {
           c.output.csv_every = static_cast<int>(to_long(v));
         },
         [=](const RunConfig& c) { return opt(std::to_string(c.output.csv_every)); }});
    add("output.emit_plots",
        {[](RunConfig& c, const std::string& v) { c.output.emit_plots = to_bool(v); },
         [=](const RunConfig& c) { return opt(c.output.emit_plots ? "true" : "false"); }});
    return t;
  }();
  return table;
}

const Key* find_key(const std::string& name) {
  for (const auto& [k, v] : keys()) {
    if (k == name) return &v;
  }
  return nullptr;
}

}  // namespace

void RunConfig::validate() const {
  try {
    domain.validate();
    ModelParams p = model;
    p.epsilon = domain.epsilon;
    p.gamma = domain.gamma;
    p.validate();
    integrator.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (ic.kind == IcKind::kFromSnapshot && ic.snapshot.empty()) {
    throw ConfigError("ic.kind = from_snapshot requires ic.snapshot", 0, "ic.snapshot");
  }
  if (ic.kind == IcKind::kTanhInterface && (ic.axis < 0 || ic.axis >= domain.dim)) {
    throw ConfigError("ic.axis out of range", 0, "ic.axis");
  }
  if (ic.kind == IcKind::kRandomPerturbation && !(ic.q >= 0.0)) {
    throw ConfigError("ic.q must be >= 0", 0, "ic.q");
  }
  if (ic.target_h2 && !(*ic.target_h2 >= 0.0)) {
    throw ConfigError("ic.target_h2 must be >= 0", 0, "ic.target_h2");
  }
  if (output.csv_every < 1) {
    throw ConfigError("output.csv_every must be >= 1", 0, "output.csv_every");
  }
  for (double t : output.snapshot_times) {
    if (!std::isfinite(t) || t < 0.0) {
      throw ConfigError("output.snapshot_times must be finite and >= 0", 0,
                        "output.snapshot_times");
    }
  }
}

IntegratorConfig RunConfig::integrator_with_stops() const {
  IntegratorConfig c = integrator;
  c.stop_times.insert(c.stop_times.end(), output.snapshot_times.begin(),
                      output.snapshot_times.end());
  return c;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  // Inactive axes default to the unit extent and a single mode.
  cfg.domain.extents[2] = 1.0;
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  std::set<std::string> seen;
  while (std::getline(is, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const Key* k = find_key(key);
    if (!k) throw ConfigError("unknown key '" + key + "'", line_no, key);
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'", line_no, key);
    try {
      k->set(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key + ": " + e.what(), line_no, key);
    }
  }
  if (cfg.domain.dim == 2) {
    cfg.domain.extents[2] = 1.0;
    cfg.domain.modes[2] = 1;
  }
  cfg.model.epsilon = cfg.domain.epsilon;
  cfg.model.gamma = cfg.domain.gamma;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [name, key] : keys()) {
    const auto value = key.get(cfg);
    if (value) out += name + " = " + *value + "\n";
  }
  return out;
}

}  // namespace chhs
