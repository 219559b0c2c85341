// Files written next to a run: diagnostics.csv, fits.csv, a gnuplot script and
// grayscale images of 2D snapshots.
#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "chhs/diagnostics.hpp"

namespace chhs {

inline constexpr const char* kDiagnosticsHeader =
    "time,mass,energy,grad_mu_sq,v_sq,h1_dist,h2_dist,h4_weighted,gevrey_slope,dt";
inline constexpr const char* kFitsHeader =
    "source,quantity,rate,intercept,r_squared,t_start,t_end,samples";

std::string csv_row(const DiagnosticsRecord& r);
DiagnosticsRecord parse_csv_row(const std::string& line);

/// Appends rows to diagnostics.csv; writes the header if the file is new or
/// empty. `truncate` starts a fresh file.
class DiagnosticsWriter {
 public:
  DiagnosticsWriter(const std::string& path, bool truncate);
  void write(const DiagnosticsRecord& r);
  void flush();
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

/// Reads diagnostics.csv; throws IoError on a malformed header or row.
std::vector<DiagnosticsRecord> read_diagnostics(const std::string& path);

struct FitRow {
  std::string source;
  std::string quantity;
  DecayFit fit;
};

void append_fits(const std::string& path, const std::vector<FitRow>& rows);

/// Writes a PGM (P5) image of a 2D field sampled on its collocation grid, values
/// mapped affinely from [min, max] to [0, 255]. No-op for 3D fields.
void write_pgm(const std::string& path, const SpectralField& phi, int padding = 1);

/// gnuplot script plotting energy, distances and the Gevrey slope.
void write_plot_script(const std::string& dir, const std::vector<std::string>& images);

}  // namespace chhs
