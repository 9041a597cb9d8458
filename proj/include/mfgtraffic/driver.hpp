#pragma once

// Command-line front end. Exit codes: 0 success, 1 invalid configuration or
// usage, 2 runtime abort (non-finite state or I/O failure).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfgtraffic/adp_stepper.hpp"
#include "mfgtraffic/config.hpp"
#include "mfgtraffic/gradient_check.hpp"
#include "mfgtraffic/mc_oracle.hpp"
#include "mfgtraffic/output.hpp"

namespace mfgtraffic {

enum class RunMode { adp, fk_only, mc_compare, grad_check, validate_only };

inline std::optional<RunMode> parse_mode(const std::string& s) {
  if (s == "adp") return RunMode::adp;
  if (s == "fk-only") return RunMode::fk_only;
  if (s == "mc-compare") return RunMode::mc_compare;
  if (s == "grad-check") return RunMode::grad_check;
  if (s == "validate-only") return RunMode::validate_only;
  return std::nullopt;
}

namespace detail {

inline void print_report(const ValidationReport& rep, std::ostream& out, std::ostream& err) {
  for (const auto& m : rep.cfl)
    out << "cfl_" << m.name << "_bound=" << fmt_num(m.bound) << "\ncfl_" << m.name << "_margin=" << fmt_num(m.margin)
        << '\n';
  for (const auto& v : rep.violations) err << "invalid: " << v << '\n';
  out << "valid=" << (rep.ok() ? "true" : "false") << '\n';
}

inline void print_summary(const RunSummary& s, std::ostream& out) {
  out << "steps=" << s.steps << '\n'
      << "final_t=" << fmt_num(s.final_state.t) << '\n'
      << "initial_E=" << fmt_num(s.initial_E) << '\n'
      << "final_E=" << fmt_num(s.final_E) << '\n'
      << "min_mass_drift=" << fmt_num(s.min_mass_drift) << '\n'
      << "max_mass_drift=" << fmt_num(s.max_mass_drift) << '\n'
      << "min_rho=" << fmt_num(s.min_rho) << '\n'
      << "wall_seconds=" << fmt_num(s.wall_seconds) << '\n'
      << "aborted=" << (s.aborted ? "true" : "false") << '\n';
}

inline int run_grad_check(const ModelParams& p, std::uint64_t seed, std::ostream& out) {
  const GridSpec grid(33, 33, p.road_length, p.s_max);
  std::mt19937_64 rng(seed);
  bool all = true;
  for (int k = 0; k < 20; ++k) {
    auto [W, rho] = random_state(rng, grid, p);
    const auto res = check_gradients(W, rho, grid, p);
    out << "state=" << k << " worst_rel_error=" << fmt_num(res.worst_rel_error())
        << " pass=" << (res.pass() ? "true" : "false") << '\n';
    all = all && res.pass();
  }
  out << "grad_check=" << (all ? "pass" : "fail") << '\n';
  return all ? 0 : 1;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Online ADP controller for a robust mean-field traffic game"};
  std::string mode_text = "adp";
  std::string config_path = "defaults";
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  long long progress = 0;
  app.add_option("--mode", mode_text, "adp | fk-only | mc-compare | grad-check | validate-only");
  app.add_option("--config", config_path, "key=value config file, or 'defaults'");
  app.add_option("--out-dir", out_dir, "output directory (overrides config)");
  app.add_option("--seed", seed, "RNG seed (overrides config)");
  app.add_option("--progress", progress, "print a progress line every N steps (0 = off)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : 1;
  }

  const auto mode = parse_mode(mode_text);
  if (!mode) {
    err << "unknown mode '" << mode_text << "'\n";
    return 1;
  }

  ModelParams p;
  RunConfig cfg;
  try {
    if (config_path != "defaults") std::tie(p, cfg) = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  }
  if (out_dir) cfg.out_dir = *out_dir;
  if (seed) cfg.rng_seed = *seed;

  auto rep = validate(p, cfg);
  if (*mode == RunMode::mc_compare && cfg.mc_agents <= 0)
    rep.violations.push_back("mc-compare requires mc_agents > 0");
  detail::print_report(rep, out, err);
  if (!rep.ok()) return 1;
  if (*mode == RunMode::validate_only) return 0;
  if (*mode == RunMode::grad_check) return detail::run_grad_check(p, cfg.rng_seed, out);

  const std::string config_text = save_config(p, cfg);
  const std::filesystem::path dir(cfg.out_dir);
  try {
    const GridSpec grid(cfg, p);
    const auto s0 = initial_state(grid, p);

    if (*mode == RunMode::mc_compare) {
      std::filesystem::create_directories(dir);
      const long long steps = std::llround(cfg.T / cfg.dt);
      // Histogram bins of about 27 per axis when the grid allows it.
      const int bx = grid.nx() % 27 == 0 ? grid.nx() / 27 : 1;
      const int bv = grid.nv() % 27 == 0 ? grid.nv() / 27 : 1;
      const auto cmp = mc_compare(s0.W, s0.rho, grid, p, cfg.mc_agents, steps, cfg.dt, cfg.rng_seed, bx, bv);
      std::ostringstream rep_text;
      rep_text << "n=" << cmp.agents << "\nsteps=" << cmp.steps << "\nl1_distance=" << fmt_num(cmp.l1)
               << "\nmax_cell_deviation=" << fmt_num(cmp.max_deviation)
               << "\nhistogram_bins=" << grid.nx() / bx << "x" << grid.nv() / bv
               << "\nl1_distance_binned=" << fmt_num(cmp.l1_binned) << '\n';
      std::ofstream(dir / "mc_report.txt") << rep_text.str();
      write_density_csv(dir / "mc_density.csv", cmp.mc);
      write_density_csv(dir / "fv_density.csv", cmp.fv);
      std::ofstream(dir / "config.cfg") << config_text;
      emit_manifest(dir, config_text);
      out << rep_text.str();
      return 0;
    }

    CsvRunWriter writer(dir, grid, p);
    auto sinks = writer.sinks();
    if (progress > 0)
      sinks.progress = [&err](long long n, long long total, double t, double E) {
        err << "step " << n << "/" << total << " t=" << fmt_num(t) << " E=" << fmt_num(E) << '\n';
      };
    RunOptions opt;
    opt.progress_stride = progress;
    opt.learn = *mode == RunMode::adp;
    const auto summary = run(s0, cfg, grid, p, sinks, opt);
    writer.flush();
    {
      std::ofstream cfg_out(dir / "config.cfg");
      cfg_out << config_text;
    }
    emit_manifest(dir, config_text);
    detail::print_summary(summary, out);
    if (summary.aborted) {
      err << "aborted: " << summary.error << '\n';
      return 2;
    }
  } catch (const NumericalError& e) {
    err << "aborted: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace mfgtraffic
