#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "geospin/config.hpp"
#include "geospin/constants.hpp"
#include "geospin/errors.hpp"
#include "geospin/faraday.hpp"
#include "geospin/geophase.hpp"
#include "geospin/pulse.hpp"
#include "geospin/report.hpp"
#include "geospin/stark.hpp"

// Experiment runners. Each runner computes its tables, then emission happens
// in one deterministic pass. Per-point physics failures are recorded in the
// report instead of aborting the run; --strict turns them (and a FAIL
// feasibility verdict) into a nonzero exit at the CLI boundary.

namespace geospin {

// PASS below a tenth of the relaxation time, MARGINAL below it, FAIL above.
inline FeasibilityReport check_feasibility(double total_ps, double t_relax_ps) {
  if (t_relax_ps <= 0.0) throw domain_error("relaxation time must be positive");
  if (total_ps < 0.0) throw domain_error("sequence duration must be nonnegative");
  FeasibilityReport r;
  r.total_ps = total_ps;
  r.t_relax_ps = t_relax_ps;
  r.ratio = total_ps / t_relax_ps;
  if (total_ps < t_relax_ps / 10.0)
    r.verdict = FeasibilityVerdict::PASS;
  else if (total_ps < t_relax_ps)
    r.verdict = FeasibilityVerdict::MARGINAL;
  else
    r.verdict = FeasibilityVerdict::FAIL;
  return r;
}

struct RunOptions {
  std::filesystem::path out_dir = "out";
  bool strict = false;
  bool write_files = true;
  std::optional<int> steps_override;
  std::optional<std::uint64_t> seed_override;
};

namespace run_detail {

inline std::string feasibility_line(const FeasibilityReport& f) {
  return std::string("feasibility: ") + verdict_name(f.verdict) +
         " (sequence " + format_full(f.total_ps) + " ps vs t_relax " +
         format_full(f.t_relax_ps) + " ps, ratio " + format_full(f.ratio) + ")";
}

inline void run_aa_protocol(const ExperimentConfig& c, int steps, RunReport& rep) {
  const PulseSequence seq = aa_protocol(c.bx_T, c.bz_T, c.g_factor);
  rep.feasibility = check_feasibility(seq.total_duration_ps(), c.t_relax_ps);

  const PhaseDecomposition d =
      aa_phase_measured(c.bx_T, c.bz_T, c.g_factor, steps);
  const AaFormulaPhase f = aa_phase_formula(c.bx_T, c.bz_T);

  const Unitary2 u = composite(seq, c.g_factor);
  const DensityMatrix rho_f = evolve(mixed_initial(c.w0, c.w1), u);

  Table t{"interference",
          {"alpha", "mk_closed_form", "mk_pulse_oracle", "theta_f"},
          {}};
  for (double a : c.alpha_grid.realize()) {
    const double mk = mk_closed_form(c.w0, c.w1, d.geometric, a);
    const double mk_pulse = magnetization(rho_f, a);
    t.add_row({format_full(a), format_full(mk), format_full(mk_pulse),
               format_full(theta_f(mk, c.kappa))});
  }
  rep.tables.push_back(std::move(t));

  rep.summary.push_back("protocol: two mirrored pi pulses, bx = " +
                        format_full(c.bx_T) + " T, bz = " + format_full(c.bz_T) +
                        " T, g = " + format_full(c.g_factor));
  rep.summary.push_back("pulse durations: " +
                        format_full(seq.pulses[0].duration_ps) + " + " +
                        format_full(seq.pulses[1].duration_ps) + " ps");
  rep.summary.push_back("total phase     = " + format_full(d.total) + " rad");
  rep.summary.push_back("dynamic phase   = " + format_full(d.dynamic) + " rad");
  rep.summary.push_back("geometric phase = " + format_full(d.geometric) + " rad");
  rep.summary.push_back("closed-form claim 4*arctan(bx/bz) = " +
                        format_full(f.reduced) + " rad (unreduced " +
                        format_full(f.unreduced) +
                        (f.limit_case ? ", bz=0 limit case)" : ")"));
  rep.summary.push_back(feasibility_line(*rep.feasibility));
}

inline void run_verify_aa(const ExperimentConfig& c, int steps, RunReport& rep) {
  const VerificationReport v =
      verify_aa_formula(c.ratio_grid.realize(), c.g_factor, steps);

  Table t{"verify_aa",
          {"ratio", "theta", "gamma_formula", "gamma_measured", "dynamic_phase",
           "verdict"},
          {}};
  double max_dyn = 0.0, max_obs = 0.0;
  for (const auto& p : v.points) {
    t.add_row({format_full(p.ratio), format_full(p.theta),
               format_full(p.gamma_formula), format_full(p.gamma_measured),
               format_full(p.dynamic), p.verdict});
    max_dyn = std::max(max_dyn, std::abs(p.dynamic));
    max_obs = std::max(max_obs, p.obs_max_dev);
  }
  rep.tables.push_back(std::move(t));

  rep.summary.push_back("points: " + std::to_string(v.points.size()) +
                        "  MATCH: " + std::to_string(v.n_match) +
                        "  MATCH-MOD-CONVENTION: " +
                        std::to_string(v.n_match_mod_convention) +
                        "  MISMATCH: " + std::to_string(v.n_mismatch));
  rep.summary.push_back("max |dynamic phase| = " + format_full(max_dyn) +
                        " rad (protocol keeps the state perpendicular to the field)");
  rep.summary.push_back(
      "max observable deviation max_a |cos(a-2g_formula) - cos(a-2g_measured)| = " +
      format_full(max_obs));
  rep.summary.push_back(
      "the closed-form claim is compared point by point and reported as found; "
      "agreement is not presumed");
}

inline void run_sweep(const ExperimentConfig& c, int steps, RunReport& rep) {
  const Weights w{c.w0, c.w1};
  InterferencePattern pat;
  if (c.sweep_axis == "gamma") {
    pat = sweep_gamma(w, c.gamma_grid.realize(), ProbeGeometry{c.alpha, c.kappa});
  } else if (c.sweep_axis == "alpha") {
    pat = sweep_alpha(w, c.gamma_fixed, c.alpha_grid.realize(), c.kappa);
  } else {
    pat = sweep_field_ratio(w, c.ratio_grid.realize(), c.g_factor,
                            ProbeGeometry{c.alpha, c.kappa}, steps);
  }

  const bool with_pulse = (c.sweep_axis == "field-ratio");
  Table t{"sweep", {"sweep_value", "mk_closed_form", "theta_f"}, {}};
  if (with_pulse)
    t.columns = {"sweep_value", "mk_closed_form", "mk_pulse_oracle", "theta_f"};
  for (const auto& s : pat.samples) {
    if (s.error) {
      ++rep.point_errors;
      rep.summary.push_back("point " + format_full(s.value) + " failed: " +
                            *s.error);
      std::vector<std::string> row{format_full(s.value), "nan", "nan"};
      if (with_pulse) row.push_back("nan");
      t.add_row(std::move(row));
      continue;
    }
    std::vector<std::string> row{format_full(s.value), format_full(s.mk)};
    if (with_pulse) row.push_back(format_full(s.mk_pulse.value()));
    row.push_back(format_full(s.theta_f));
    t.add_row(std::move(row));
  }
  rep.tables.push_back(std::move(t));

  rep.summary.push_back("axis: " + c.sweep_axis + ", " +
                        std::to_string(pat.samples.size()) + " points, w0 = " +
                        format_full(c.w0) + ", w1 = " + format_full(c.w1));
  if (c.sweep_axis == "gamma")
    rep.summary.push_back("fixed probe alpha = " + format_full(c.alpha));
  if (c.sweep_axis == "alpha")
    rep.summary.push_back("fixed gate gamma = " + format_full(c.gamma_fixed));
  if (rep.point_errors)
    rep.summary.push_back(std::to_string(rep.point_errors) +
                          " point(s) failed; rows kept with nan fields");
}

inline void run_stark(const ExperimentConfig& c, RunReport& rep) {
  LevelScheme scheme;
  scheme.v1 = c.v1_meV;
  scheme.v2 = c.v2_meV;
  scheme.delta1 = c.delta1_meV;
  scheme.delta2 = c.delta2_meV;
  scheme.polarization = c.polarization == "sigma+" ? Polarization::sigma_plus
                                                   : Polarization::sigma_minus;
  const StarkShifts sh = stark_shifts(scheme);
  const CbSplitting sp = cb_splitting(sh);

  Table ts{"stark_shifts", {"level", "shift_meV"}, {}};
  ts.add_row({"cb_-1/2", format_full(sh.cb_minus_half)});
  ts.add_row({"cb_+1/2", format_full(sh.cb_plus_half)});
  ts.add_row({"vb_-3/2", format_full(sh.vb_minus_three_half)});
  ts.add_row({"vb_-1/2", format_full(sh.vb_minus_half)});
  rep.tables.push_back(std::move(ts));

  rep.summary.push_back("delta_cb = " + format_full(sp.delta_cb_meV) +
                        " meV (sign " + std::to_string(sp.sign) + ")");

  if (sp.delta_cb_meV > 0.0) {
    const double b_eff = effective_field(sp.delta_cb_meV, c.g_factor);
    const double duration = c.tip_duration_ps > 0.0
                                ? c.tip_duration_ps
                                : pi_tip_duration(sp.delta_cb_meV);
    const double angle = tipping_angle(sp.delta_cb_meV, duration);
    rep.summary.push_back("B_eff = " + format_full(b_eff) + " T at g = " +
                          format_full(c.g_factor));
    rep.summary.push_back("tip duration = " + format_full(duration) +
                          " ps, rotation angle = " + format_full(angle) +
                          " rad (g independent)");

    TippingPulse tp;
    tp.delta_cb_meV = sp.delta_cb_meV;
    tp.direction = {c.tip_direction[0], c.tip_direction[1], c.tip_direction[2]};
    tp.duration_ps = duration;

    Table tc{"g_cancellation",
             {"g_factor", "b_eff_T", "rotation_angle_rad"},
             {}};
    for (double g : {0.5, 0.864, 2.0}) {
      const FieldPulse fp = to_field_pulse(tp, g);
      tc.add_row({format_full(g), format_full(norm(fp.field_T)),
                  format_full(std::abs(
                      rotation_angle(fp.field_T, g, fp.duration_ps)))});
    }
    rep.tables.push_back(std::move(tc));

    rep.feasibility = check_feasibility(2.0 * duration, c.t_relax_ps);
    rep.summary.push_back(
        "two-pulse protocol duration = " + format_full(2.0 * duration) + " ps");
    rep.summary.push_back(feasibility_line(*rep.feasibility));
  } else {
    rep.summary.push_back(
        "symmetric drive: no conduction-band splitting, no tipping pulse");
    rep.feasibility = check_feasibility(0.0, c.t_relax_ps);
  }
}

inline void run_berry(const ExperimentConfig& c, int loop_steps, RunReport& rep) {
  const Branch br = c.branch == "plus" ? Branch::plus : Branch::minus;
  const double omega = solid_angle_cone(c.loop_theta_c);
  const double target = (br == Branch::plus ? -0.5 : 0.5) * omega;

  Table t{"berry",
          {"total_time_ps", "steps", "geometric", "dynamic", "leakage",
           "target", "abs_error"},
          {}};
  std::vector<double> xs, ys;
  for (int k = 0; k <= c.doublings; ++k) {
    const double tau = c.loop_total_time_ps * (1 << k);
    const int steps = loop_steps * (1 << k);  // fixed dt across doublings
    try {
      const BerryResult r = berry_loop_detailed(
          cone_loop(c.loop_theta_c, c.loop_magnitude_T, tau, steps),
          c.g_factor, br);
      const double err = std::abs(reduce_phase(r.phases.geometric - target));
      t.add_row({format_full(tau), std::to_string(steps),
                 format_full(r.phases.geometric), format_full(r.phases.dynamic),
                 format_full(r.leakage), format_full(target), format_full(err)});
      xs.push_back(tau);
      ys.push_back(r.phases.geometric);
    } catch (const adiabaticity_error& e) {
      ++rep.point_errors;
      t.add_row({format_full(tau), std::to_string(steps), "nan", "nan",
                 format_full(e.leakage), format_full(target), "nan"});
      rep.summary.push_back("total_time " + format_full(tau) + " ps: " + e.what());
    }
  }
  rep.tables.push_back(std::move(t));

  rep.summary.push_back("cone loop theta_c = " + format_full(c.loop_theta_c) +
                        ", branch " + c.branch + ", |B| = " +
                        format_full(c.loop_magnitude_T) + " T, g = " +
                        format_full(c.g_factor));
  rep.summary.push_back("solid angle = " + format_full(omega) +
                        ", expected geometric phase -> " + format_full(target) +
                        " rad as total_time grows");
  rep.summary.push_back(
      "steps double with total_time so the per-step angle stays fixed");
}

inline void run_echo(const ExperimentConfig& c, int loop_steps,
                     std::uint64_t seed, RunReport& rep) {
  EchoOptions opts;
  opts.dwell_jitter = c.dwell_jitter;
  opts.seed = seed;
  const ParametricLoop loop = cone_loop(c.loop_theta_c, c.loop_magnitude_T,
                                        c.loop_total_time_ps, loop_steps);
  const EchoResult r = spin_echo_sequence(loop, c.g_factor, opts);

  Table t{"echo_lines",
          {"line", "total", "dynamic", "geometric", "dynamic_pass1",
           "dynamic_pass2", "leakage"},
          {}};
  auto add_line = [&](const char* name, const EchoLine& l) {
    t.add_row({name, format_full(l.phases.total), format_full(l.phases.dynamic),
               format_full(l.phases.geometric), format_full(l.dynamic_pass1),
               format_full(l.dynamic_pass2), format_full(l.leakage)});
  };
  add_line("plus", r.line_plus);
  add_line("minus", r.line_minus);
  rep.tables.push_back(std::move(t));

  const double cancel = r.unechoed_dynamic_diff > 0.0
                            ? std::abs(r.branch_difference.dynamic) /
                                  r.unechoed_dynamic_diff
                            : 0.0;
  rep.summary.push_back("loop solid angle = " + format_full(r.loop_omega));
  rep.summary.push_back("branch difference: total = " +
                        format_full(r.branch_difference.total) + ", dynamic = " +
                        format_full(r.branch_difference.dynamic) +
                        ", geometric = " +
                        format_full(r.branch_difference.geometric));
  rep.summary.push_back("unechoed dynamic difference = " +
                        format_full(r.unechoed_dynamic_diff) +
                        " rad; echo residual fraction = " + format_full(cancel));
  rep.summary.push_back("plus-line geometric phase = " +
                        format_full(r.line_plus.phases.geometric) + " rad = " +
                        format_full(r.multiple_of_half_omega) +
                        " x (-Omega/2)");
  rep.summary.push_back("dwell jitter = " + format_full(c.dwell_jitter) +
                        ", seed = " + std::to_string(seed));
  if (!r.dwell_guard_note.empty()) rep.summary.push_back(r.dwell_guard_note);
}

}  // namespace run_detail

inline RunReport run(const ExperimentConfig& c, const RunOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.kind = kind_name(c.kind);
  rep.config_echo = c.config_echo;
  rep.config_hash = c.config_hash;
  rep.convention = convention_string;
  rep.warnings = c.warnings;

  const int steps = opt.steps_override.value_or(c.steps_per_pulse);
  const int loop_steps = opt.steps_override.value_or(c.loop_steps);
  const std::uint64_t seed = opt.seed_override.value_or(c.seed);

  try {
    switch (c.kind) {
      case ExperimentKind::aa_protocol:
        run_detail::run_aa_protocol(c, steps, rep);
        break;
      case ExperimentKind::verify_aa:
        run_detail::run_verify_aa(c, steps, rep);
        break;
      case ExperimentKind::sweep:
        run_detail::run_sweep(c, steps, rep);
        break;
      case ExperimentKind::stark_pipeline:
        run_detail::run_stark(c, rep);
        break;
      case ExperimentKind::berry_loop:
        run_detail::run_berry(c, loop_steps, rep);
        break;
      case ExperimentKind::spin_echo:
        run_detail::run_echo(c, loop_steps, seed, rep);
        break;
    }
  } catch (const io_error&) {
    throw;
  } catch (const error& e) {
    ++rep.point_errors;
    rep.summary.push_back(std::string("run failed: ") + e.what());
  }

  if (opt.write_files) {
    const std::string stem = rep.kind;
    for (const auto& t : rep.tables) {
      const auto path = opt.out_dir / (stem + "_" + t.name + ".csv");
      write_csv(path, t, rep.config_hash);
      rep.files_written.push_back(path.string());
    }
    // two-column plot of the first table's leading numeric pair, when the
    // experiment has a natural curve to show
    if (!rep.tables.empty() &&
        (c.kind == ExperimentKind::sweep || c.kind == ExperimentKind::aa_protocol ||
         c.kind == ExperimentKind::verify_aa)) {
      const Table& t = rep.tables.front();
      std::vector<double> x, y;
      const std::size_t ycol = c.kind == ExperimentKind::verify_aa
                                   ? 3   // gamma_measured
                                   : t.columns.size() - 1;  // theta_f
      for (const auto& row : t.rows) {
        if (row[1] == "nan") continue;
        x.push_back(std::strtod(row[0].c_str(), nullptr));
        y.push_back(std::strtod(row[ycol].c_str(), nullptr));
      }
      const auto path = opt.out_dir / (stem + ".dat");
      write_plot(path, x, y, t.columns[0], t.columns[ycol], rep.config_hash);
      rep.files_written.push_back(path.string());
    }

    std::vector<std::string> lines;
    lines.push_back("experiment: " + rep.kind);
    lines.push_back("convention: " + rep.convention);
    for (const auto& w : rep.warnings) lines.push_back("warning: " + w);
    for (const auto& s : rep.summary) lines.push_back(s);
    lines.push_back("point errors: " + std::to_string(rep.point_errors));
    lines.push_back("");
    lines.push_back("config echo:");
    std::istringstream echo(rep.config_echo);
    for (std::string l; std::getline(echo, l);) lines.push_back("  " + l);
    const auto path = opt.out_dir / (stem + "_summary.txt");
    write_text(path, lines, rep.config_hash);
    rep.files_written.push_back(path.string());
  }

  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

// CLI exit policy: 0 ok; 1 physics-point errors or FAIL verdict under
// --strict; 2 config errors; 3 I/O errors (the latter two are mapped where
// the exceptions are caught).
inline int exit_code(const RunReport& rep, bool strict) {
  if (!strict) return 0;
  const bool fail = rep.feasibility &&
                    rep.feasibility->verdict == FeasibilityVerdict::FAIL;
  return (rep.point_errors > 0 || fail) ? 1 : 0;
}

}  // namespace geospin
