#include "chhs/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include "chhs/config.hpp"
#include "chhs/diagnostics.hpp"
#include "chhs/initial_conditions.hpp"
#include "chhs/integrator.hpp"
#include "chhs/output.hpp"
#include "chhs/snapshot.hpp"

namespace fs = std::filesystem;

namespace chhs {

namespace {

ModelParams model_params(const RunConfig& cfg) {
  ModelParams p = cfg.model;
  p.epsilon = cfg.domain.epsilon;
  p.gamma = cfg.domain.gamma;
  return p;
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory", dir);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write file", path);
  out << text;
  if (!out) throw IoError("error writing file", path);
}

// Shared by run and resume: integrates and streams every output file.
class RunSession {
 public:
  RunSession(const RunConfig& cfg, std::string dir, bool fresh_csv)
      : cfg_(cfg), dir_(std::move(dir)), csv_(join(dir_, "diagnostics.csv"), fresh_csv) {}

  int execute(const State& initial, std::optional<StepperState> resume, bool write_first,
              std::ostream& out, std::ostream& err) {
    const ModelParams p = model_params(cfg_);
    const IntegratorConfig icfg = cfg_.integrator_with_stops();
    const StepperState start = resume.value_or(StepperState{icfg.dt, 0, 0});

    if (write_first) {
      csv_.write(record(initial, p, 0.0));
      if (std::find(cfg_.output.snapshot_times.begin(), cfg_.output.snapshot_times.end(),
                    initial.time()) != cfg_.output.snapshot_times.end()) {
        save(initial, start, snapshot_name(initial.time()));
      }
    }
    csv_.flush();

    RunHooks hooks;
    hooks.on_step = [&](const RunCheckpoint& cp) {
      ++rows_;
      last_written_ = rows_ % cfg_.output.csv_every == 0;
      if (last_written_) csv_.write(cp.record);
    };
    hooks.on_checkpoint = [&](const RunCheckpoint& cp) {
      const double t = cp.state.time();
      if (!last_written_) {
        csv_.write(cp.record);
        last_written_ = true;
      }
      csv_.flush();
      save(cp.state, cp.stepper, "checkpoint.chhs");
      if (std::find(cfg_.output.snapshot_times.begin(), cfg_.output.snapshot_times.end(), t) !=
          cfg_.output.snapshot_times.end()) {
        save(cp.state, cp.stepper, snapshot_name(t));
      }
    };

    try {
      const Trajectory tr = run(initial, icfg, p, hooks, resume);
      if (!last_written_) csv_.write(tr.records.back());
      csv_.flush();
      save(*tr.final_state, tr.stepper, "final.chhs");
      if (cfg_.output.emit_plots) write_plot_script(dir_, images_);
      out << "t = " << tr.final_state->time() << " after " << tr.stepper.step << " steps ("
          << tr.rejected_steps << " rejected); energy " << tr.records.back().energy << "\n"
          << "output in " << dir_ << "\n";
      return kExitOk;
    } catch (const BlowUpError& e) {
      csv_.flush();
      if (e.last_state()) {
        save(*e.last_state(), StepperState{start.dt, 0, e.step() - 1}, "blowup.chhs");
      }
      err << "error: " << e.what() << "\n"
          << "last finite state written to " << join(dir_, "blowup.chhs") << "\n";
      return kExitBlowUp;
    }
  }

 private:
  void save(const State& s, const StepperState& st, const std::string& name) {
    save_snapshot(join(dir_, name), s, st);
    if (cfg_.output.emit_plots && s.domain().dim == 2 && name != "checkpoint.chhs") {
      const std::string img = fs::path(name).replace_extension(".pgm").string();
      write_pgm(join(dir_, img), s.phi(), 2);
      images_.push_back(img);
    }
  }

  const RunConfig& cfg_;
  std::string dir_;
  DiagnosticsWriter csv_;
  long rows_ = 0;
  bool last_written_ = true;
  std::vector<std::string> images_;
};

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what();
    if (!e.key().empty()) err << " [key " << e.key() << "]";
    err << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const BlowUpError& e) {
    err << "error: " << e.what() << "\n";
    return kExitBlowUp;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

// Keeps diagnostics rows up to and including time t.
void truncate_diagnostics(const std::string& path, double t) {
  if (!fs::exists(path)) return;
  const std::vector<DiagnosticsRecord> rows = read_diagnostics(path);
  DiagnosticsWriter w(path, true);
  for (const auto& r : rows) {
    if (r.time <= t) w.write(r);
  }
  w.flush();
}

}  // namespace

std::string snapshot_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_t%.9g.chhs", t);
  return buf;
}

std::pair<double, double> parse_fit_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("fit window must be t0:t1");
  std::size_t used = 0;
  const std::string a = text.substr(0, colon);
  const std::string b = text.substr(colon + 1);
  double t0 = 0.0;
  double t1 = 0.0;
  try {
    t0 = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    t1 = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
  } catch (const std::exception&) {
    throw std::invalid_argument("fit window must be t0:t1, got '" + text + "'");
  }
  if (!(t0 < t1)) throw std::invalid_argument("fit window needs t0 < t1");
  return {t0, t1};
}

int cmd_run(const std::string& config_path, const std::optional<std::string>& output_dir,
            std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = load_config(config_path);
    if (output_dir) cfg.output.directory = *output_dir;
    const State initial = generate_ic(cfg);
    ensure_dir(cfg.output.directory);
    write_text(join(cfg.output.directory, "config.txt"), serialize_config(cfg));
    RunSession session(cfg, cfg.output.directory, true);
    return session.execute(initial, std::nullopt, true, out, err);
  });
}

int cmd_resume(const std::string& snapshot_path, const std::string& config_path,
               const std::optional<std::string>& output_dir, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = load_config(config_path);
    if (output_dir) cfg.output.directory = *output_dir;
    const Snapshot snap = load_snapshot(snapshot_path);
    const Domain& d = snap.state.domain();
    if (!d.same_space(cfg.domain) || d.epsilon != cfg.domain.epsilon ||
        d.gamma != cfg.domain.gamma) {
      throw ConfigError("snapshot domain does not match the configuration");
    }
    if (!(snap.state.time() < cfg.integrator.t_end)) {
      throw ConfigError("snapshot time is not before integrator.t_end", 0, "integrator.t_end");
    }
    StepperState st = snap.stepper;
    if (!(st.dt > 0.0)) st = StepperState{cfg.integrator.dt, 0, st.step};
    ensure_dir(cfg.output.directory);
    const std::string csv = join(cfg.output.directory, "diagnostics.csv");
    const bool existing = fs::exists(csv);
    truncate_diagnostics(csv, snap.state.time());
    RunSession session(cfg, cfg.output.directory, false);
    return session.execute(snap.state, st, !existing, out, err);
  });
}

int cmd_analyze(const std::string& dir,
                const std::optional<std::pair<double, double>>& window, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    const std::vector<DiagnosticsRecord> recs = read_diagnostics(join(dir, "diagnostics.csv"));
    ModelParams base;
    const std::string cfg_path = join(dir, "config.txt");
    if (fs::exists(cfg_path)) base = model_params(load_config(cfg_path));

    std::vector<double> t, h1, h2;
    for (const auto& r : recs) {
      t.push_back(r.time);
      h1.push_back(r.h1_dist * r.h1_dist);
      h2.push_back(r.h2_dist * r.h2_dist);
    }
    std::vector<FitRow> rows;
    auto fit = [&](const std::string& name, const std::vector<double>& v) {
      try {
        rows.push_back({"diagnostics.csv", name, fit_exponential_decay(t, v, window)});
        const DecayFit& f = rows.back().fit;
        out << name << ": rate " << f.rate << ", r^2 " << f.r_squared << ", window ["
            << f.window.first << ", " << f.window.second << "], " << f.samples << " samples\n";
      } catch (const std::exception& e) {
        err << "warning: no decay fit for " << name << ": " << e.what() << "\n";
      }
    };
    fit("h1_dist_sq", h1);
    fit("h2_dist_sq", h2);
    const SmoothingSeries smooth = smoothing_monitor(recs);
    out << "max t*|phi|_H4^2 = " << smooth.max << " at t = " << smooth.time_of_max << "\n";

    // Diagnostics recomputed from the stored snapshots.
    std::vector<std::pair<double, std::string>> snaps;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("snapshot_t", 0) == 0 && entry.path().extension() == ".chhs") {
        const Snapshot s = load_snapshot(entry.path().string());
        snaps.emplace_back(s.state.time(), entry.path().string());
      }
    }
    std::sort(snaps.begin(), snaps.end());
    if (!snaps.empty()) {
      DiagnosticsWriter w(join(dir, "snapshot_diagnostics.csv"), true);
      for (const auto& [time, path] : snaps) {
        const Snapshot s = load_snapshot(path);
        ModelParams p = base;
        p.epsilon = s.state.domain().epsilon;
        p.gamma = s.state.domain().gamma;
        const DiagnosticsRecord r = record(s.state, p, s.stepper.dt);
        w.write(r);
        out << fs::path(path).filename().string() << ": energy " << r.energy << ", gevrey slope "
            << r.gevrey_slope << "\n";
      }
      w.flush();
    }
    if (!rows.empty()) append_fits(join(dir, "fits.csv"), rows);
    return kExitOk;
  });
}

int cmd_conditions(const std::string& config_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_config(config_path);
    const State phi0 = generate_ic(cfg);
    out << check_theorem_conditions(cfg.domain, phi0.phi()).to_text();
    return kExitOk;
  });
}

}  // namespace chhs
