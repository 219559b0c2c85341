// Subcommands of the chhs executable. Each returns a process exit status.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>

namespace chhs {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBlowUp = 3;
inline constexpr int kExitIo = 4;

int cmd_run(const std::string& config_path, const std::optional<std::string>& output_dir,
            std::ostream& out, std::ostream& err);
int cmd_resume(const std::string& snapshot_path, const std::string& config_path,
               const std::optional<std::string>& output_dir, std::ostream& out,
               std::ostream& err);
int cmd_analyze(const std::string& dir,
                const std::optional<std::pair<double, double>>& window, std::ostream& out,
                std::ostream& err);
int cmd_conditions(const std::string& config_path, std::ostream& out, std::ostream& err);

/// "t0:t1" -> (t0, t1); throws std::invalid_argument.
std::pair<double, double> parse_fit_window(const std::string& text);

/// File name used for a snapshot taken at time t.
std::string snapshot_name(double t);

}  // namespace chhs
