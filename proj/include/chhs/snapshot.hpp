// Binary snapshot files: an ASCII header terminated by a blank line followed by
// little-endian doubles, x index fastest.
#pragma once

#include <string>

#include "chhs/integrator.hpp"

namespace chhs {

inline constexpr int kSnapshotVersion = 1;

struct Snapshot {
  State state;
  StepperState stepper;
};

std::string encode_snapshot(const State& state, const StepperState& stepper);
/// Throws IoError (with `origin` as path) on a malformed payload.
Snapshot decode_snapshot(const std::string& bytes, const std::string& origin = "<memory>");

void save_snapshot(const std::string& path, const State& state, const StepperState& stepper);
Snapshot load_snapshot(const std::string& path);

}  // namespace chhs
