#include "chhs/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "chhs/config.hpp"

namespace chhs {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string csv_row(const DiagnosticsRecord& r) {
  std::string out;
  for (double v : {r.time, r.mass, r.energy, r.grad_mu_sq, r.v_sq, r.h1_dist, r.h2_dist,
                   r.h4_weighted, r.gevrey_slope, r.dt}) {
    if (!out.empty()) out += ',';
    out += fmt(v);
  }
  return out;
}

DiagnosticsRecord parse_csv_row(const std::string& line) {
  std::vector<double> v;
  std::istringstream is(line);
  std::string cell;
  while (std::getline(is, cell, ',')) {
    char* end = nullptr;
    const double x = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size()) {
      throw std::invalid_argument("bad csv cell '" + cell + "'");
    }
    v.push_back(x);
  }
  if (v.size() != 10) {
    throw std::invalid_argument("expected 10 columns, found " + std::to_string(v.size()));
  }
  DiagnosticsRecord r;
  r.time = v[0];
  r.mass = v[1];
  r.energy = v[2];
  r.grad_mu_sq = v[3];
  r.v_sq = v[4];
  r.h1_dist = v[5];
  r.h2_dist = v[6];
  r.h4_weighted = v[7];
  r.gevrey_slope = v[8];
  r.dt = v[9];
  return r;
}

DiagnosticsWriter::DiagnosticsWriter(const std::string& path, bool truncate) : path_(path) {
  const bool fresh = truncate || !std::filesystem::exists(path) ||
                     std::filesystem::file_size(path) == 0;
  out_.open(path, truncate ? std::ios::trunc : std::ios::app);
  if (!out_) throw IoError("cannot open diagnostics file", path);
  if (fresh) out_ << kDiagnosticsHeader << '\n';
}

void DiagnosticsWriter::write(const DiagnosticsRecord& r) {
  out_ << csv_row(r) << '\n';
  if (!out_) throw IoError("error writing diagnostics", path_);
}

void DiagnosticsWriter::flush() {
  out_.flush();
  if (!out_) throw IoError("error flushing diagnostics", path_);
}

std::vector<DiagnosticsRecord> read_diagnostics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open diagnostics file", path);
  std::string line;
  if (!std::getline(in, line) || line != kDiagnosticsHeader) {
    throw IoError("unexpected diagnostics header", path);
  }
  std::vector<DiagnosticsRecord> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(parse_csv_row(line));
    } catch (const std::invalid_argument& e) {
      throw IoError("line " + std::to_string(line_no) + ": " + e.what(), path);
    }
  }
  return out;
}

void append_fits(const std::string& path, const std::vector<FitRow>& rows) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot open fits file", path);
  if (fresh) out << kFitsHeader << '\n';
  for (const FitRow& r : rows) {
    out << r.source << ',' << r.quantity << ',' << fmt(r.fit.rate) << ',' << fmt(r.fit.intercept)
        << ',' << fmt(r.fit.r_squared) << ',' << fmt(r.fit.window.first) << ','
        << fmt(r.fit.window.second) << ',' << r.fit.samples << '\n';
  }
  if (!out) throw IoError("error writing fits", path);
}

void write_pgm(const std::string& path, const SpectralField& phi, int padding) {
  if (phi.domain().dim != 2) return;
  const ScalarField g = inverse_transform(phi, padding);
  const auto grid = g.grid();
  const auto [lo_it, hi_it] = std::minmax_element(g.values().begin(), g.values().end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write image", path);
  out << "P5\n" << grid[0] << ' ' << grid[1] << "\n255\n";
  // Image rows run top to bottom; put y = L at the top.
  for (int q = grid[1] - 1; q >= 0; --q) {
    for (int p = 0; p < grid[0]; ++p) {
      const double v = g[static_cast<std::size_t>(p) + static_cast<std::size_t>(q) * grid[0]];
      const double s = span > 0.0 ? (v - lo) / span : 0.5;
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * s))));
    }
  }
  if (!out) throw IoError("error writing image", path);
}

void write_plot_script(const std::string& dir, const std::vector<std::string>& images) {
  const std::string path = (std::filesystem::path(dir) / "plots.gp").string();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write plot script", path);
  out << "# gnuplot plots.gp\n"
         "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set terminal pngcairo size 900,600\n"
         "\n"
         "set output 'energy.png'\n"
         "set xlabel 't'\n"
         "plot 'diagnostics.csv' using 1:3 with lines title 'energy'\n"
         "\n"
         "set output 'distances.png'\n"
         "set logscale y\n"
         "plot 'diagnostics.csv' using 1:($6**2) with lines title '|phi-mean|_H1^2', \\\n"
         "     'diagnostics.csv' using 1:($7**2) with lines title '|phi-mean|_H2^2'\n"
         "unset logscale y\n"
         "\n"
         "set output 'dissipation.png'\n"
         "set logscale y\n"
         "plot 'diagnostics.csv' using 1:4 with lines title '|grad mu|^2', \\\n"
         "     'diagnostics.csv' using 1:5 with lines title '|v|^2'\n"
         "unset logscale y\n"
         "\n"
         "set output 'smoothing.png'\n"
         "plot 'diagnostics.csv' using 1:8 with lines title 't |phi|_H4^2'\n"
         "\n"
         "set output 'gevrey.png'\n"
         "plot 'diagnostics.csv' using 1:9 with lines title 'gevrey slope'\n";
  for (const std::string& img : images) {
    out << "\n# snapshot image: " << img << '\n';
  }
  if (!out) throw IoError("error writing plot script", path);
}

}  // namespace chhs
