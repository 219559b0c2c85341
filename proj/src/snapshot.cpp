#include "chhs/snapshot.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "chhs/config.hpp"

namespace chhs {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xffu) << (8 * (7 - b));
    return r;
  }
  return v;
}

// Reads "name v1 v2 ..." and returns the values.
std::istringstream expect_line(std::istream& in, const std::string& name,
                               const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("snapshot truncated before '" + name + "'", origin);
  std::istringstream ls(line);
  std::string tag;
  ls >> tag;
  if (tag != name) {
    throw IoError("snapshot header: expected '" + name + "', found '" + tag + "'", origin);
  }
  return ls;
}

template <typename T>
T read_value(std::istringstream& ls, const std::string& name, const std::string& origin) {
  T v{};
  if (!(ls >> v)) throw IoError("snapshot header: bad value for '" + name + "'", origin);
  return v;
}

double read_double(std::istringstream& ls, const std::string& name, const std::string& origin) {
  std::string tok;
  if (!(ls >> tok)) throw IoError("snapshot header: missing value for '" + name + "'", origin);
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size()) {
    throw IoError("snapshot header: bad value for '" + name + "'", origin);
  }
  return v;
}

}  // namespace

std::string encode_snapshot(const State& state, const StepperState& stepper) {
  const SpectralField& phi = state.phi();
  const Domain& d = phi.domain();
  std::string out;
  out += "chhs-snapshot\n";
  out += "version " + std::to_string(kSnapshotVersion) + "\n";
  out += "dim " + std::to_string(d.dim) + "\n";
  out += "modes " + std::to_string(d.modes[0]) + " " + std::to_string(d.modes[1]) + " " +
         std::to_string(d.modes[2]) + "\n";
  out += "extents " + fmt(d.extents[0]) + " " + fmt(d.extents[1]) + " " + fmt(d.extents[2]) +
         "\n";
  out += "epsilon " + fmt(d.epsilon) + "\n";
  out += "gamma " + fmt(d.gamma) + "\n";
  out += "time " + fmt(state.time()) + "\n";
  out += "mean " + fmt(phi.mean()) + "\n";
  out += "dt " + fmt(stepper.dt) + "\n";
  out += "streak " + std::to_string(stepper.streak) + "\n";
  out += "step " + std::to_string(stepper.step) + "\n";
  out += "parity " + parity_string(phi.parity(), d.dim) + "\n\n";
  const std::size_t header = out.size();
  out.resize(header + 8 * phi.size());
  for (std::size_t n = 0; n < phi.size(); ++n) {
    const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(phi[n]));
    std::memcpy(out.data() + header + 8 * n, &bits, 8);
  }
  return out;
}

Snapshot decode_snapshot(const std::string& bytes, const std::string& origin) {
  const auto split = bytes.find("\n\n");
  if (split == std::string::npos) throw IoError("snapshot header not terminated", origin);
  std::istringstream in(bytes.substr(0, split + 1));
  std::string magic;
  std::getline(in, magic);
  if (magic != "chhs-snapshot") throw IoError("not a chhs snapshot", origin);
  {
    auto ls = expect_line(in, "version", origin);
    const int v = read_value<int>(ls, "version", origin);
    if (v != kSnapshotVersion) {
      throw IoError("unsupported snapshot version " + std::to_string(v), origin);
    }
  }
  Domain d;
  {
    auto ls = expect_line(in, "dim", origin);
    d.dim = read_value<int>(ls, "dim", origin);
  }
  {
    auto ls = expect_line(in, "modes", origin);
    for (int a = 0; a < 3; ++a) d.modes[a] = read_value<int>(ls, "modes", origin);
  }
  {
    auto ls = expect_line(in, "extents", origin);
    for (int a = 0; a < 3; ++a) d.extents[a] = read_double(ls, "extents", origin);
  }
  auto scalar = [&](const char* name) {
    auto ls = expect_line(in, name, origin);
    return read_double(ls, name, origin);
  };
  d.epsilon = scalar("epsilon");
  d.gamma = scalar("gamma");
  const double time = scalar("time");
  const double mean = scalar("mean");
  StepperState st;
  st.dt = scalar("dt");
  {
    auto ls = expect_line(in, "streak", origin);
    st.streak = read_value<int>(ls, "streak", origin);
  }
  {
    auto ls = expect_line(in, "step", origin);
    st.step = read_value<long>(ls, "step", origin);
  }
  Parities parity = kCosineParity;
  {
    auto ls = expect_line(in, "parity", origin);
    try {
      parity = parse_parity(read_value<std::string>(ls, "parity", origin));
    } catch (const std::invalid_argument& e) {
      throw IoError(std::string("snapshot header: ") + e.what(), origin);
    }
  }
  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("snapshot header: ") + e.what(), origin);
  }
  const std::size_t payload = bytes.size() - (split + 2);
  if (payload != 8 * d.size()) {
    throw IoError("snapshot payload has " + std::to_string(payload) + " bytes, header implies " +
                      std::to_string(8 * d.size()),
                  origin);
  }
  std::vector<double> coeffs(d.size());
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, bytes.data() + split + 2 + 8 * n, 8);
    coeffs[n] = std::bit_cast<double>(to_little(bits));
  }
  try {
    SpectralField phi(d, std::move(coeffs), parity);
    if (!(std::abs(phi.mean() - mean) <= 1e-12 * std::max(1.0, std::abs(mean)))) {
      throw IoError("snapshot mean does not match its 0-mode", origin);
    }
    return Snapshot{State(std::move(phi), time), st};
  } catch (const StructuralError& e) {
    throw IoError(std::string("snapshot payload: ") + e.what(), origin);
  }
}

void save_snapshot(const std::string& path, const State& state, const StepperState& stepper) {
  const std::string bytes = encode_snapshot(state, stepper);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write snapshot", path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("error writing snapshot", path);
}

Snapshot load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_snapshot(ss.str(), path);
}

}  // namespace chhs
