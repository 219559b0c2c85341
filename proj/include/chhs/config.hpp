// Run configuration: flat key = value lines with dotted section prefixes.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chhs/integrator.hpp"
#include "chhs/model.hpp"
#include "chhs/spectral.hpp"

namespace chhs {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0, std::string key = {});
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& message, std::string path);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class IcKind { kConstantPlusModes, kRandomPerturbation, kTanhInterface, kFromSnapshot };

std::string ic_kind_name(IcKind k);
IcKind parse_ic_kind(const std::string& name);

struct ModeAmplitude {
  std::array<int, 3> index{0, 0, 0};
  double amplitude = 0.0;
};

struct IcConfig {
  IcKind kind = IcKind::kConstantPlusModes;
  double mean = 0.0;
  double amplitude = 0.0;
  std::uint64_t seed = 0;
  /// Spectrum exponent of random_perturbation: amplitude (1 + lambda)^-q.
  double q = 2.0;
  /// Rescale the random perturbation to this |phi - mean|_H2 if set.
  std::optional<double> target_h2;
  std::vector<ModeAmplitude> modes;
  /// tanh_interface: axis and position of the interface.
  int axis = 0;
  double x0 = 0.0;
  std::string snapshot;
};

struct OutputConfig {
  std::string directory = "chhs_out";
  std::vector<double> snapshot_times;
  /// Write every n-th diagnostics record (the last one is always written).
  int csv_every = 1;
  bool emit_plots = true;
};

struct RunConfig {
  Domain domain = Domain::square(1.0, 16);
  ModelParams model;
  IcConfig ic;
  IntegratorConfig integrator;
  OutputConfig output;
  std::string experiment;

  /// Throws ConfigError on inconsistent values.
  void validate() const;
  /// Integrator settings with the snapshot times folded into stop_times.
  IntegratorConfig integrator_with_stops() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

}  // namespace chhs
