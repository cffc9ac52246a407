/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "cli.hpp"

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "serve.hpp"
#include "trilimb/hysteresis.hpp"
#include "trilimb/scripted_operator.hpp"
#include "trilimb/stats.hpp"

namespace trilimb::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

SceneConfig resolve_scene(const std::string& name) {
  if (fs::exists(name)) return read_scene_file(name);
  if (const char* dir = std::getenv(kSceneDirEnv)) {
    for (const fs::path& cand : {fs::path(dir) / name, fs::path(dir) / (name + ".scene")})
      if (fs::exists(cand)) return read_scene_file(cand);
  }
  throw SceneError("scene not found: " + name);
}

struct CommonFlags {
  std::uint64_t seed = 0;
  std::string scene;
  std::string mode;
  std::uint32_t latency = 0;
  std::uint32_t jitter = 0;
  double drop = 0.0;
  std::string config_file;
  double max_bend_rate = 0.0;
  double max_trans_rate = 0.0;
  double deadband = 0.0;
  bool show_config = false;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* mode_opt = nullptr;
  CLI::Option* scene_opt = nullptr;
  CLI::Option* latency_opt = nullptr;
  CLI::Option* jitter_opt = nullptr;
  CLI::Option* drop_opt = nullptr;
  CLI::Option* bend_opt = nullptr;
  CLI::Option* trans_opt = nullptr;
  CLI::Option* deadband_opt = nullptr;

  bool link_overridden() const {
    return latency_opt->count() || jitter_opt->count() || drop_opt->count();
  }

  /// Defaults, then the config file, then individual flags.
  SessionConfig apply(SessionConfig cfg) const {
    if (!config_file.empty()) {
      std::ifstream is(config_file);
      if (!is) throw UsageError("cannot open config " + config_file);
      try {
        cfg = config_from_json(nlohmann::json::parse(is));
      } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("config " + config_file + ": " + e.what());
      }
    }
    if (mode_opt->count()) cfg.mode = control_mode_from(mode);
    if (scene_opt->count()) cfg.scene = resolve_scene(scene);
    if (seed_opt->count()) cfg.seed = seed;
    if (latency_opt->count()) cfg.latency_ticks = latency;
    if (jitter_opt->count()) cfg.jitter_ticks = jitter;
    if (drop_opt->count()) cfg.drop_rate = drop;
    if (bend_opt->count()) cfg.rates.max_bend_rate = max_bend_rate;
    if (trans_opt->count()) cfg.rates.max_trans_rate = max_trans_rate;
    if (deadband_opt->count()) cfg.rates.deadband = deadband;
    cfg.validate();
    return cfg;
  }
};

void print_result(std::ostream& out, const TrialResult& r, std::uint64_t ticks,
                  std::uint64_t final_hash) {
  out << "ticks=" << ticks << '\n';
  out << "final_hash=" << hex_digest(final_hash) << '\n';
  out << "completed=" << (r.completed ? "true" : "false") << '\n';
  out << "failures=" << r.failures << '\n';
  if (r.completion_time_s) out << "completion_time_s=" << *r.completion_time_s << '\n';
  for (std::size_t i = 0; i < r.targets.size(); ++i) {
    const auto& t = r.targets[i];
    out << "target" << i << '=' << to_string(t.kind) << ' ' << to_string(t.status) << '\n';
  }
}

int cmd_simulate(const SessionConfig& cfg, const std::string& input, const std::string& out_path,
                 const std::string& result_path, const ScriptOptions& opt, std::ostream& out) {
  TrialLog log;
  if (input.empty()) {
    log = run_scripted(cfg, opt);
  } else {
    const TrialLog src = read_trace_file(input);
    Recorder rec(cfg);
    for (const auto& r : src.ticks) rec.step(r.axes);
    log = rec.log();
  }
  if (!out_path.empty()) write_trace_file(out_path, log);

  Session s(cfg);
  for (const auto& r : log.ticks) s.tick(r.axes);
  const TrialResult result = s.result(true);
  if (!result_path.empty()) {
    std::ofstream os(result_path);
    if (!os) throw UsageError("cannot write " + result_path);
    os << trial_result_to_json(result).dump(2) << '\n';
  }
  print_result(out, result, s.current_tick(), s.state_hash());
  return result.completed ? kExitOk : kExitTask;
}

int cmd_replay(const CommonFlags& flags, const std::string& path, bool open_loop,
               std::ostream& out, std::ostream& err) {
  const TrialLog log = read_trace_file(path);
  SessionConfig cfg = log.header.config;
  if (flags.seed_opt->count()) cfg.seed = flags.seed;

  if (open_loop) {
    if (flags.latency_opt->count()) cfg.latency_ticks = flags.latency;
    if (flags.jitter_opt->count()) cfg.jitter_ticks = flags.jitter;
    if (flags.drop_opt->count()) cfg.drop_rate = flags.drop;
    cfg.validate();
    Session s(cfg);
    for (const auto& r : log.ticks) s.tick(r.axes);
    const TrialResult result = s.result(true);
    print_result(out, result, s.current_tick(), s.state_hash());
    return result.completed ? kExitOk : kExitTask;
  }
  if (flags.link_overridden()) throw UsageError("link overrides on replay need --open-loop");

  try {
    const ReplayResult rr = replay(log, cfg);
    print_result(out, rr.result, rr.ticks, rr.final_hash);
    out << "divergence=none\n";
    return rr.result.completed ? kExitOk : kExitTask;
  } catch (const ReplayDivergence& d) {
    out << "divergence_tick=" << d.tick() << '\n';
    err << d.what() << '\n';
    return kExitTask;
  }
}

int cmd_hysteresis(double w, double amplitude, int cycles, double step,
                   const std::string& profile_path, std::ostream& out) {
  const HysteresisProfile prof = hysteresis_sweep(w, amplitude, cycles, step);
  const double dz = dead_zone_width(prof);
  if (!profile_path.empty()) {
    std::ofstream os(profile_path);
    if (!os) throw UsageError("cannot write " + profile_path);
    write_profile_tsv(os, prof);
  }
  const bool in_band = w >= 20.0 && w <= 25.0;
  out << "half_width_deg\tamplitude_deg\tcycles\tstep_deg\tdead_zone_deg\tin_band_20_25\n";
  out << w << '\t' << amplitude << '\t' << cycles << '\t' << step << '\t' << dz << '\t'
      << (in_band ? "yes" : "no") << '\n';
  return kExitOk;
}

int cmd_stats(const std::string& a_path, const std::string& b_path, std::ostream& out) {
  const auto a = read_times_file(a_path);
  const auto b = read_times_file(b_path);
  std::vector<double> ta, tb;
  for (const auto& e : a) ta.push_back(e.time_s);
  for (const auto& e : b) tb.push_back(e.time_s);
  const StatsResult u = mann_whitney_u(ta, tb);
  write_summary_tsv(out, summarize(a, b), u);
  return kExitOk;
}

Server* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const SessionConfig& cfg, const ServeOptions& opt, std::ostream& err) {
  Server server(cfg, opt);
  g_server = &server;
  auto prev_int = std::signal(SIGINT, on_signal);
  auto prev_term = std::signal(SIGTERM, on_signal);
  const std::uint64_t ticks = server.run(err);
  std::signal(SIGINT, prev_int);
  std::signal(SIGTERM, prev_term);
  g_server = nullptr;
  err << "served " << ticks << " ticks\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Three-limb teleoperation simulator", "trilimb"};
  app.fallthrough();
  CommonFlags f;
  f.seed_opt = app.add_option("--seed", f.seed, "Channel RNG seed");
  f.scene_opt = app.add_option("--scene", f.scene,
                               "Scene file, or a name looked up in $TRILIMB_SCENE_DIR");
  f.mode_opt = app.add_option("--mode", f.mode, "Control mode")
                   ->check(CLI::IsMember({"three-limb", "clutch"}));
  f.latency_opt = app.add_option("--latency", f.latency, "Link latency (ticks)");
  f.jitter_opt = app.add_option("--jitter", f.jitter, "Link jitter (ticks)");
  f.drop_opt = app.add_option("--drop", f.drop, "Link drop rate [0, 1)");
  app.add_option("--config", f.config_file, "Session config JSON (partial allowed)");
  f.bend_opt = app.add_option("--max-bend-rate", f.max_bend_rate, "deg/s");
  f.trans_opt = app.add_option("--max-trans-rate", f.max_trans_rate, "mm/s");
  f.deadband_opt = app.add_option("--deadband", f.deadband, "Normalized dead band");
  app.add_flag("--show-config", f.show_config, "Print the effective configuration and exit");

  auto* sim = app.add_subcommand("simulate", "Run the scripted operator or a recorded input");
  std::string sim_input, sim_out, sim_result;
  ScriptOptions script;
  sim->add_option("--input", sim_input, "Drive the session with the axes of this trace");
  sim->add_option("--out", sim_out, "Write the recorded trace here");
  sim->add_option("--result", sim_result, "Write the TrialResult JSON here");
  sim->add_option("--miss-touches", script.miss_touches, "Cautery touches outside all zones");
  sim->add_option("--max-ticks", script.max_ticks, "Hard stop for the scripted run");

  auto* rep = app.add_subcommand("replay", "Verify a trace tick by tick");
  std::string rep_path;
  bool open_loop = false;
  rep->add_option("trace", rep_path, "Trace file")->required();
  rep->add_flag("--open-loop", open_loop,
                "Re-run the recorded axes without digest checks (allows link overrides)");

  auto* hys = app.add_subcommand("hysteresis", "Sweep the backlash model");
  double half_width = 22.5, amplitude = 60.0, step = 1.0;
  int cycles = 2;
  std::string profile_path;
  hys->add_option("--half-width", half_width, "Play half-width (deg)");
  hys->add_option("--amplitude", amplitude, "Sweep amplitude (deg)");
  hys->add_option("--cycles", cycles, "Sweep cycles");
  hys->add_option("--step", step, "Proximal step (deg)");
  hys->add_option("--out", profile_path, "Write the profile TSV here");

  auto* st = app.add_subcommand("stats", "Mann-Whitney U and completion-time summary");
  std::string a_path, b_path;
  st->add_option("three_limb", a_path, "Times file, three-limb mode")->required();
  st->add_option("clutch", b_path, "Times file, clutch mode")->required();

  auto* srv = app.add_subcommand("serve", "Socket bridge for the operator console");
  ServeOptions serve_opt;
  std::string serve_trace;
  srv->add_option("--port", serve_opt.port, "TCP port (0 = any free port)");
  srv->add_option("--host", serve_opt.host, "Listen address");
  srv->add_option("--max-ticks", serve_opt.max_ticks, "Stop after N ticks");
  srv->add_flag("--lockstep", serve_opt.lockstep, "One tick per received input frame");
  srv->add_option("--trace", serve_trace, "Record the live session to this trace");

  app.require_subcommand(0, 1);

  std::vector<const char*> argv{"trilimb"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (f.show_config) {
      out << config_to_json(f.apply(SessionConfig{})).dump(2) << '\n';
      return kExitOk;
    }
    if (sim->parsed())
      return cmd_simulate(f.apply(SessionConfig{}), sim_input, sim_out, sim_result, script, out);
    if (rep->parsed()) return cmd_replay(f, rep_path, open_loop, out, err);
    if (hys->parsed())
      return cmd_hysteresis(half_width, amplitude, cycles, step, profile_path, out);
    if (st->parsed()) return cmd_stats(a_path, b_path, out);
    if (srv->parsed()) {
      if (!serve_trace.empty()) serve_opt.trace_out = serve_trace;
      return cmd_serve(f.apply(SessionConfig{}), serve_opt, err);
    }
    err << app.help();
    return kExitUsage;
  } catch (const ReplayDivergence& e) {
    err << "error: " << e.what() << '\n';
    return kExitTask;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace trilimb::cli
