// Command-line front end for the geospin library.
//
// Exit codes: 0 success, 1 physics failure under --strict (per-point errors
// or a FAIL feasibility verdict), 2 configuration error, 3 I/O error.

#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <geospin/geospin.hpp>

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  bool strict = false;
  bool no_files = false;
  std::optional<int> steps;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, CommonArgs& a, bool config_required) {
  auto* pos = sub->add_option("config", a.config_path,
                              "configuration file (key = value format)");
  if (config_required) pos->required();
  sub->add_option("--out", a.out_dir, "output directory")
      ->capture_default_str();
  sub->add_flag("--strict", a.strict,
                "exit 1 on per-point physics errors or a FAIL verdict");
  sub->add_flag("--no-files", a.no_files, "compute and print, write nothing");
  sub->add_option("--steps", a.steps,
                  "override steps per pulse / per loop for this run");
  sub->add_option("--seed", a.seed, "override the random seed for this run");
}

int run_one(const CommonArgs& a,
            std::optional<geospin::ExperimentKind> forced_kind) {
  using namespace geospin;

  ExperimentConfig cfg;
  if (!a.config_path.empty()) {
    cfg = make_experiment_config(parse_config_file(a.config_path));
    if (forced_kind && cfg.kind != *forced_kind)
      throw config_error("config declares experiment '" +
                         std::string(kind_name(cfg.kind)) +
                         "' but the subcommand expects '" +
                         std::string(kind_name(*forced_kind)) + "'");
  } else {
    cfg = default_config(*forced_kind);
  }

  RunOptions opt;
  opt.out_dir = a.out_dir;
  opt.strict = a.strict;
  opt.write_files = !a.no_files;
  opt.steps_override = a.steps;
  opt.seed_override = a.seed;

  const RunReport rep = run(cfg, opt);

  std::printf("experiment: %s\n", rep.kind.c_str());
  std::printf("config hash: %s\n", rep.config_hash.c_str());
  for (const auto& w : rep.warnings) std::printf("warning: %s\n", w.c_str());
  for (const auto& s : rep.summary) std::printf("%s\n", s.c_str());
  for (const auto& f : rep.files_written)
    std::printf("wrote %s\n", f.c_str());
  // wall time goes to stdout only, never into output files
  std::printf("wall time: %.3f s\n", rep.wall_seconds);

  return exit_code(rep, a.strict);
}

}  // namespace

int main(int argc, char** argv) {
  using geospin::ExperimentKind;

  CLI::App app{"geospin: geometric-phase spin dynamics experiments"};
  app.require_subcommand(1);

  CommonArgs run_args, verify_args, sweep_args, stark_args, berry_args,
      echo_args;

  auto* sc_run = app.add_subcommand("run", "run any experiment from a config");
  add_common(sc_run, run_args, true);

  auto* sc_verify = app.add_subcommand(
      "verify-aa", "compare the closed-form phase claim against propagation");
  add_common(sc_verify, verify_args, false);

  auto* sc_sweep =
      app.add_subcommand("sweep", "interference pattern over a chosen axis");
  add_common(sc_sweep, sweep_args, false);

  auto* sc_stark = app.add_subcommand(
      "stark", "optical-shift splitting, effective field, tipping pulse");
  add_common(sc_stark, stark_args, false);

  auto* sc_berry = app.add_subcommand(
      "berry", "adiabatic cone-loop phases with total-time doubling");
  add_common(sc_berry, berry_args, false);

  auto* sc_echo = app.add_subcommand(
      "echo", "two-pass loop echo that cancels the dynamic phase");
  add_common(sc_echo, echo_args, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sc_run->parsed()) return run_one(run_args, std::nullopt);
    if (sc_verify->parsed())
      return run_one(verify_args, ExperimentKind::verify_aa);
    if (sc_sweep->parsed()) return run_one(sweep_args, ExperimentKind::sweep);
    if (sc_stark->parsed())
      return run_one(stark_args, ExperimentKind::stark_pipeline);
    if (sc_berry->parsed())
      return run_one(berry_args, ExperimentKind::berry_loop);
    if (sc_echo->parsed())
      return run_one(echo_args, ExperimentKind::spin_echo);
  } catch (const geospin::config_error& e) {
    if (e.line > 0)
      std::fprintf(stderr, "config error (line %d): %s\n", e.line, e.what());
    else
      std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const geospin::io_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 3;
  } catch (const geospin::error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
