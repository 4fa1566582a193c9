"""Command-line surface: configuration, data ingestion/emission, and the
figure/table reproduction recipes.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 data
format error. Every command writes its resolved configuration next to its
outputs as config.resolved.json.
"""

import argparse
import sys as _sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import dist as dist_mod
from . import dynamics, infoflow, io, lattice, noise, spectrum
from .config import RunConfig
from .errors import (DataFormatError, DegenerateGroundStateError,
                     EmptyDistributionError, FitError, ParameterError,
                     RydladderError, SolverError)

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_DATA = 4


def _resolve_config(args):
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    overrides = {}
    for key in ("n_rungs", "a_um", "rb_over_a", "delta_over_omega", "c6",
                "aspect_ratio", "partition", "partition4", "p01", "p10",
                "n_shots", "seed", "out_dir", "dt_us", "schedule",
                "ramp_time_us", "eps_small", "eps_gain", "grid_points",
                "grid_lo", "n_bins", "log10_lo", "log10_hi", "tol",
                "checkpoint_every"):
        if hasattr(args, key):
            overrides[key] = getattr(args, key)
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "out", None) is not None:
        overrides["out_dir"] = args.out
    return cfg.override(**overrides)


def _prepare_out(cfg):
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg.dump(out / "config.resolved.json")
    return out


def _system(cfg):
    return lattice.build_system(cfg.n_rungs, a=cfg.a_um, rb_over_a=cfg.rb_over_a,
                                delta_over_omega=cfg.delta_over_omega, c6=cfg.c6,
                                aspect_ratio=cfg.aspect_ratio)


def _partition(cfg):
    if cfg.partition:
        return infoflow.Partition(cfg.partition)
    return infoflow.half_cut(cfg.n_rungs)


def _partition4(cfg):
    if cfg.partition4:
        return infoflow.Partition(cfg.partition4)
    return infoflow.four_block(cfg.n_rungs)


def _estimator_config(cfg):
    return infoflow.EstimatorConfig(eps_small=cfg.eps_small, eps_gain=cfg.eps_gain,
                                    grid_points=cfg.grid_points, grid_lo=cfg.grid_lo)


def _readout_model(cfg):
    return noise.ReadoutModel(p01=cfg.p01, p10=cfg.p10)


def _write_series_csv(path, header, rows, params):
    with open(path, "w", encoding="utf-8") as fh:
        io._write_header(fh, "series", params)
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")


def _sniff_kind(path):
    with open(path, encoding="utf-8") as fh:
        head = fh.read(2048)
    if head.startswith("# rydladder probdist"):
        return "probdist"
    if head.startswith("# rydladder counts"):
        return "counts"
    stripped = head.lstrip()
    if stripped.startswith("{") and '"measurements"' in head:
        return "hardware"
    if stripped.startswith("{"):
        return "shots"
    raise DataFormatError(f"{path}: unrecognized input format")


def _load_input(path, cfg):
    """Returns (kind, payload): probdist -> ProbDist, counts/shots -> CountTable."""
    kind = _sniff_kind(path)
    if kind == "probdist":
        return "probdist", io.read_probdist_csv(path)
    if kind == "counts":
        return "counts", io.read_counts_csv(path)
    shots = io.read_shot_records(path) if kind == "shots" \
        else io.read_hardware_task_json(path)
    table, _ = noise.postselect(shots, cfg.invert_post_sequence)
    return "counts", table


# ---------------------------------------------------------------- commands


def cmd_groundstate(cfg, args):
    out = _prepare_out(cfg)
    sys = _system(cfg)
    energy, psi = spectrum.ground_state(sys, tol=cfg.tol)
    d = dist_mod.ProbDist.from_state(psi)
    part = _partition(cfg)
    a, b = part.require_classes(2)
    io.write_probdist_csv(out / "probdist.csv", d, cfg.header_params())
    s_ab = infoflow.shannon_entropy(d)
    entropies = {
        "energy_rad_per_us": io.round6(energy),
        "s_vn": io.round6(spectrum.entanglement_entropy(psi, part, a)),
        "i_x": io.round6(infoflow.mutual_information(d, part)),
        "s_a_x": io.round6(infoflow.shannon_entropy(infoflow.marginal(d, part, a))),
        "s_b_x": io.round6(infoflow.shannon_entropy(infoflow.marginal(d, part, b))),
        "s_ab_x": io.round6(s_ab),
    }
    io.write_json(out / "entropies.json", entropies)
    print(f"groundstate: E = {energy:.6f} rad/us, S_vN = {entropies['s_vn']}")
    return 0


def cmd_sample(cfg, args):
    out = _prepare_out(cfg)
    d = io.read_probdist_csv(args.dist)
    table = dist_mod.sample(d, cfg.n_shots, cfg.seed)
    io.write_counts_csv(out / "counts.csv", table, cfg.header_params())
    print(f"sample: {table.n_shots} shots over {len(table.states)} bitstrings")
    return 0


def cmd_ingest(cfg, args):
    out = _prepare_out(cfg)
    if args.format == "hardware":
        shots = io.read_hardware_task_json(args.shots_file)
    else:
        shots = io.read_shot_records(args.shots_file)
    table, fidelity = noise.postselect(shots, cfg.invert_post_sequence)
    io.write_counts_csv(out / "counts.csv", table, cfg.header_params())
    io.write_json(out / "ingest.json", {
        "n_shots_total": len(shots),
        "n_shots_kept": table.n_shots,
        "sorting_fidelity": io.round6(fidelity),
    })
    print(f"ingest: kept {table.n_shots}/{len(shots)} shots "
          f"(sorting fidelity {fidelity:.3f})")
    return 0


def _estimate_row(label, d, part, est_cfg):
    est = infoflow.estimate_entanglement(d, part, est_cfg)
    return est, {
        "method": label,
        "p_min_star": io.round6(est.p_star),
        "i_at_p_min_star": io.round6(est.i_at_p_star),
        "i_unfiltered": io.round6(est.i_unfiltered),
        "estimate": io.round6(est.estimate),
        "estimator": est.method,
        "threshold_from": est.threshold_method,
    }


def cmd_estimate(cfg, args):
    out = _prepare_out(cfg)
    kind, payload = _load_input(args.input, cfg)
    part = _partition(cfg)
    est_cfg = _estimator_config(cfg)
    rows = []
    curves = {}
    if kind == "probdist":
        est, row = _estimate_row("raw", payload, part, est_cfg)
        rows.append(row)
        curves["raw"] = est.curve
    else:
        model = _readout_model(cfg)
        raw = dist_mod.counts_to_probdist(payload)
        est, row = _estimate_row("raw", raw, part, est_cfg)
        rows.append(row)
        curves["raw"] = est.curve
        quasi, m3_report = noise.m3_mitigate(payload, model)
        m3_dist, clipped = quasi.clipped()
        est, row = _estimate_row("mitigated(m3)", m3_dist, part, est_cfg)
        row["clipped_mass"] = io.round6(clipped)
        row["m3_support"] = m3_report["support"]
        row["m3_residual"] = io.round6(m3_report["residual"])
        rows.append(row)
        curves["m3"] = est.curve
        depl = noise.depletion_mitigate(payload, model)
        est, row = _estimate_row("mitigated(depletion)", depl, part, est_cfg)
        rows.append(row)
        curves["depletion"] = est.curve
    io.write_json(out / "report.json", {"rows": rows})
    for name, curve in curves.items():
        if curve is not None:
            io.write_filtration_csv(out / f"curve_{name}.csv", curve,
                                    cfg.header_params())
    for row in rows:
        print(f"estimate[{row['method']}]: p* = {row['p_min_star']}, "
              f"I(p*) = {row['i_at_p_min_star']}, estimate = {row['estimate']}")
    return 0


def cmd_cumulative(cfg, args):
    out = _prepare_out(cfg)
    kind, payload = _load_input(args.input, cfg)
    d = payload if kind == "probdist" else dist_mod.counts_to_probdist(payload)
    curve = dist_mod.cumulative(d)
    io.write_cumulative_csv(out / "cumulative.csv", curve, cfg.header_params())
    print(f"cumulative: {len(curve.p_values)} distinct probability levels")
    return 0


def cmd_density(cfg, args):
    out = _prepare_out(cfg)
    kind, payload = _load_input(args.input, cfg)
    d = payload if kind == "probdist" else dist_mod.counts_to_probdist(payload)
    est = dist_mod.density_of_probability(d, cfg.log10_lo, cfg.log10_hi, cfg.n_bins)
    io.write_density_csv(out / "density.csv", est, cfg.header_params())
    try:
        fit = dist_mod.power_law_fit(est, p_lo=args.fit_p_lo, p_hi=args.fit_p_hi)
        io.write_json(out / "powerlaw.json", {k: io.round6(v)
                                              for k, v in fit.items()})
        print(f"density: zeta = {fit['zeta']:.4f} (R^2 = {fit['r_squared']:.4f})")
    except FitError as exc:
        print(f"density: power-law fit skipped ({exc})")
    return 0


def cmd_maxprob(cfg, args):
    out = _prepare_out(cfg)
    sizes = range(args.min_rungs, args.max_rungs + 1)
    systems = [lattice.build_system(n, a=cfg.a_um, rb_over_a=cfg.rb_over_a,
                                    delta_over_omega=cfg.delta_over_omega,
                                    c6=cfg.c6, aspect_ratio=cfg.aspect_ratio)
               for n in sizes]
    series = dist_mod.max_prob_series(systems, tol=cfg.tol)
    _write_series_csv(out / "maxprob.csv", "n_rungs,p_max",
                      [(n, io.PROB_FMT % p) for n, p in series],
                      cfg.header_params())
    fits = {}
    try:
        fits["all"] = {k: io.round6(v)
                       for k, v in dist_mod.exp_decay_fit(series).items()}
    except FitError:
        pass
    for m in (0, 1, 2):
        try:
            fits[f"mod3_{m}"] = {k: io.round6(v)
                                 for k, v in dist_mod.exp_decay_fit(series, mod3=m).items()}
        except FitError:
            continue
    io.write_json(out / "maxprob_fits.json", fits)
    print("maxprob:", ", ".join(f"N={n} P={p:.4g}" for n, p in series))
    return 0


def _schedule_for(cfg, sys, name):
    if name.endswith(".json"):
        return io.load_schedule_json(name)
    return dynamics.schedule_standard(name, omega_max=sys.omega,
                                      delta_max=abs(sys.delta))


def cmd_evolve(cfg, args):
    out = _prepare_out(cfg)
    sys = _system(cfg)
    sched = _schedule_for(cfg, sys, cfg.schedule)
    result = dynamics.trotter_evolve(sys, sched, dt=cfg.dt_us,
                                     checkpoint_every=cfg.checkpoint_every)
    io.write_evolution_csv(out / "evolution.csv", result, cfg.header_params())
    final = dist_mod.ProbDist.from_state(result.psi_final)
    io.write_probdist_csv(out / "final_dist.csv", final, cfg.header_params())
    t_last, fid_last = result.checkpoints[-1]
    fid_target = dynamics.target_fidelity(sys, result.psi_final, tol=cfg.tol)
    io.write_json(out / "evolve.json", {
        "schedule": cfg.schedule, "dt_us": cfg.dt_us,
        "final_fidelity": io.round6(fid_last),
        "fidelity_to_target": io.round6(fid_target),
    })
    print(f"evolve[{cfg.schedule}]: fidelity to target state = {fid_target:.4f}")
    return 0


def cmd_rampdown(cfg, args):
    out = _prepare_out(cfg)
    sys = _system(cfg)
    _, psi = spectrum.ground_state(sys, tol=cfg.tol)
    ideal = dist_mod.ProbDist.from_state(psi)
    final = dynamics.rampdown_evolve(sys, psi, cfg.ramp_time_us,
                                     dt=args.rampdown_dt)
    final_dist = dist_mod.ProbDist.from_state(final)
    tv = dist_mod.total_variation(ideal, final_dist)
    io.write_probdist_csv(out / "rampdown_dist.csv", final_dist, cfg.header_params())
    io.write_json(out / "rampdown.json", {
        "ramp_time_us": cfg.ramp_time_us, "tv_to_ideal": io.round6(tv)})
    print(f"rampdown[{cfg.ramp_time_us} us]: TV to ideal = {tv:.5f}")
    return 0


def cmd_mitigate(cfg, args):
    out = _prepare_out(cfg)
    kind, payload = _load_input(args.counts, cfg)
    if kind != "counts":
        raise DataFormatError("mitigate needs a count table or shots file")
    model = _readout_model(cfg)
    quasi, report = noise.m3_mitigate(payload, model)
    m3_dist, clipped = quasi.clipped()
    io.write_quasi_csv(out / "mitigated_quasi.csv", quasi, cfg.header_params())
    io.write_probdist_csv(out / "mitigated_dist.csv", m3_dist, cfg.header_params())
    io.write_json(out / "mitigation.json", {
        "support": report["support"],
        "solver": report["solver"],
        "residual": io.round6(report["residual"]),
        "negative_weight": io.round6(report["negative_weight"]),
        "clipped_mass": io.round6(clipped),
    })
    print(f"mitigate: support {report['support']}, residual {report['residual']:.2e}, "
          f"clipped mass {clipped:.4g}")
    return 0


def cmd_weakmono(cfg, args):
    out = _prepare_out(cfg)
    sys = _system(cfg)
    _, psi = spectrum.ground_state(sys, tol=cfg.tol)
    part4 = _partition4(cfg)
    d = dist_mod.ProbDist.from_state(psi)
    if args.p_min:
        d = infoflow.filter_dist(d, args.p_min)
    result = {
        "partition": part4.labels,
        "p_min": args.p_min or 0.0,
        "weak_vn": io.round6(infoflow.weak_monotonicity_vn(psi, part4)),
        "weak_mi": io.round6(infoflow.weak_monotonicity_mi(d, part4)),
    }
    io.write_json(out / "weakmono.json", result)
    print(f"weakmono: vn = {result['weak_vn']}, mi = {result['weak_mi']}")
    return 0


def _parse_range(text):
    try:
        lo, hi, n = text.split(":")
        return np.linspace(float(lo), float(hi), int(n))
    except ValueError as exc:
        raise ParameterError(f"range must be lo:hi:n, got {text!r}") from exc


def cmd_scan(cfg, args):
    out = _prepare_out(cfg)
    dov = _parse_range(args.dov_range)
    rba = _parse_range(args.rba_range)
    observables = args.observables.split(",")
    part = infoflow.Partition(cfg.partition) if cfg.partition else None
    part4 = infoflow.Partition(cfg.partition4) if cfg.partition4 else None
    grids = spectrum.scan_heatmap(dov, rba, cfg.n_rungs, observables,
                                  a=cfg.a_um, c6=cfg.c6,
                                  aspect_ratio=cfg.aspect_ratio,
                                  partition=part, partition4=part4,
                                  filter_p_min=args.p_min or 0.0)
    for obs, grid in grids.items():
        io.write_heatmap_csv(out / f"heatmap_{obs}.csv", dov, rba, grid,
                             cfg.header_params())
    print(f"scan: wrote {len(grids)} heatmaps over "
          f"{len(dov)}x{len(rba)} grid points")
    return 0


# ------------------------------------------------------- reproduce recipes


def _repro_fig3(cfg, out):
    sys = _system(cfg)
    _, psi = spectrum.ground_state(sys, tol=cfg.tol)
    d = dist_mod.ProbDist.from_state(psi)
    part = _partition(cfg)
    grid = infoflow.default_threshold_grid(d, cfg.grid_points, cfg.grid_lo)
    curve = infoflow.filtration_curve(d, part, grid)
    io.write_filtration_csv(out / "filtration.csv", curve, cfg.header_params())
    sig = infoflow.sigmoid_inflection(curve)
    mid = infoflow.mid_height_threshold(curve)
    valid = curve.valid() & np.isfinite(curve.s_cond)
    decays = bool(curve.s_cond[valid][-1] < 0.2 * curve.s_cond[valid][0])
    summary = {
        "sigmoid_p_star": io.round6(sig["p_star"]),
        "mid_height_p_star": io.round6(mid["p_star"]),
        "s_cond_decays_to_near_zero": decays,
        "pass": decays,
    }
    return summary


def _repro_fig4(cfg, out):
    sys = _system(cfg)
    _, psi = spectrum.ground_state(sys, tol=cfg.tol)
    exact = dist_mod.ProbDist.from_state(psi)
    exact_curve = dist_mod.cumulative(exact)
    io.write_cumulative_csv(out / "cumulative_exact.csv", exact_curve,
                            cfg.header_params())
    for i in range(3):
        table = dist_mod.sample(exact, 10_000, cfg.seed + i)
        curve = dist_mod.cumulative(dist_mod.counts_to_probdist(table))
        io.write_cumulative_csv(out / f"cumulative_resample_{i}.csv", curve,
                                cfg.header_params())
    dists = {}
    for n_shots in (1_000, 100_000):
        table = dist_mod.sample(exact, n_shots, cfg.seed)
        curve = dist_mod.cumulative(dist_mod.counts_to_probdist(table))
        # Levy, not the plain sup: the exact curve has degenerate jumps at
        # which a vertical-only distance never converges (see README)
        dists[n_shots] = exact_curve.levy_distance(curve)
    ok = dists[100_000] < dists[1_000]
    return {"levy_distance_1e3": io.round6(dists[1_000]),
            "levy_distance_1e5": io.round6(dists[100_000]),
            "pass": bool(ok)}


def _repro_fig5(cfg, out):
    sys = _system(cfg)
    _, psi = spectrum.ground_state(sys, tol=cfg.tol)
    d = dist_mod.ProbDist.from_state(psi)
    est = dist_mod.density_of_probability(d, cfg.log10_lo, cfg.log10_hi, cfg.n_bins)
    io.write_density_csv(out / "density.csv", est, cfg.header_params())
    # the power law describes the low-probability region only
    fit = dist_mod.power_law_fit(est, p_lo=1e-20, p_hi=1e-4)
    io.write_json(out / "powerlaw.json", {k: io.round6(v) for k, v in fit.items()})
    ok = 0.0 <= fit["zeta"] <= 0.5
    return {"zeta": io.round6(fit["zeta"]), "r_squared": io.round6(fit["r_squared"]),
            "pass": bool(ok)}


def _repro_fig6(cfg, out):
    summary = {}
    for rba, label in ((2.0, "rba2.0"), (2.35, "rba2.35")):
        systems = [lattice.build_system(n, a=cfg.a_um, rb_over_a=rba,
                                        delta_over_omega=cfg.delta_over_omega,
                                        c6=cfg.c6, aspect_ratio=cfg.aspect_ratio)
                   for n in range(4, 11)]
        series = dist_mod.max_prob_series(systems, tol=cfg.tol)
        _write_series_csv(out / f"maxprob_{label}.csv", "n_rungs,p_max",
                          [(n, io.PROB_FMT % p) for n, p in series],
                          dict(cfg.header_params(), rb_over_a=rba))
        if rba == 2.0:
            fit = dist_mod.exp_decay_fit(series)
            monotone = all(b < a for (_, a), (_, b) in zip(series, series[1:]))
            summary[label] = {
                "fit": {k: io.round6(v) for k, v in fit.items()},
                "monotone_decreasing": bool(monotone),
                "k_within_30pct_of_0.364": bool(abs(fit["k"] - 0.364) <= 0.3 * 0.364),
            }
        else:
            fits = {f"mod3_{m}": dist_mod.exp_decay_fit(series, mod3=m)
                    for m in (0, 1, 2)}
            summary[label] = {name: {k: io.round6(v) for k, v in f.items()}
                              for name, f in fits.items()}
    ok = (summary["rba2.0"]["monotone_decreasing"]
          and summary["rba2.0"]["k_within_30pct_of_0.364"])
    summary["pass"] = bool(ok)
    io.write_json(out / "table1_fits.json", summary)
    return summary


def _repro_fig8(cfg, out):
    cfg5 = replace(cfg, n_rungs=5)
    sys = _system(cfg5)
    finals = {}
    for kind in ("ramp4us", "ramp12us"):
        sched = dynamics.schedule_standard(kind, omega_max=sys.omega,
                                           delta_max=abs(sys.delta))
        result = dynamics.trotter_evolve(sys, sched, dt=cfg.dt_us,
                                         checkpoint_every=cfg.checkpoint_every)
        io.write_evolution_csv(out / f"evolution_{kind}.csv", result,
                               cfg5.header_params())
        finals[kind] = dynamics.target_fidelity(sys, result.psi_final, tol=cfg.tol)
    ok = finals["ramp12us"] > finals["ramp4us"]
    return {"target_fidelity_ramp4us": io.round6(finals["ramp4us"]),
            "target_fidelity_ramp12us": io.round6(finals["ramp12us"]),
            "pass": bool(ok)}


def _repro_fig9(cfg, out):
    sys = _system(cfg)
    _, psi = spectrum.ground_state(sys, tol=cfg.tol)
    ideal = dist_mod.ProbDist.from_state(psi)
    tvs = {}
    for ramp_time in (0.05, 0.5):
        final = dynamics.rampdown_evolve(sys, psi, ramp_time, dt=0.0025)
        d = dist_mod.ProbDist.from_state(final)
        io.write_probdist_csv(out / f"rampdown_{ramp_time}us.csv", d,
                              cfg.header_params())
        tvs[ramp_time] = dist_mod.total_variation(ideal, d)
    ok = tvs[0.05] < tvs[0.5]
    return {"tv_fast_0.05us": io.round6(tvs[0.05]),
            "tv_slow_0.5us": io.round6(tvs[0.5]), "pass": bool(ok)}


def _repro_tables234(cfg, out):
    targets = {6: (1.09e-2, 6e-4, 0.85), 8: (1.01e-2, 8e-4, 0.749),
               10: (5.01e-3, 3.6e-4, 1.26)}
    summary = {}
    all_ok = True
    for n, (p_ref, p_unc, i_ref) in targets.items():
        cfg_n = replace(cfg, n_rungs=n)
        sys = _system(cfg_n)
        _, psi = spectrum.ground_state(sys, tol=cfg.tol)
        d = dist_mod.ProbDist.from_state(psi)
        part = infoflow.half_cut(n)
        est, row = _estimate_row("raw", d, part, _estimator_config(cfg_n))
        io.write_json(out / f"report_{n}rungs.json", {"rows": [row]})
        ok = (abs(est.p_star - p_ref) <= 2 * p_unc
              and abs(est.i_at_p_star - i_ref) <= 0.03)
        all_ok &= ok
        summary[f"{n}_rungs"] = {"p_star": io.round6(est.p_star),
                                 "i_at_p_star": io.round6(est.i_at_p_star),
                                 "pass": bool(ok)}
    summary["pass"] = bool(all_ok)
    return summary


def _repro_weakmono_sweep(cfg, out, vary):
    part4 = _partition4(cfg)
    rows = []
    values = np.linspace(0.5, 5.0, 10) if vary == "delta_over_omega" \
        else np.linspace(1.5, 3.2, 10)
    for v in values:
        cfg_v = replace(cfg, **{("delta_over_omega" if vary == "delta_over_omega"
                                 else "rb_over_a"): float(v)})
        sys = _system(cfg_v)
        try:
            _, psi = spectrum.ground_state(sys, tol=cfg.tol)
        except SolverError:
            rows.append((float(v), float("nan"), float("nan")))
            continue
        d = dist_mod.ProbDist.from_state(psi)
        rows.append((float(v), infoflow.weak_monotonicity_vn(psi, part4),
                     infoflow.weak_monotonicity_mi(d, part4)))
    _write_series_csv(out / f"weakmono_vs_{vary}.csv",
                      f"{vary},weak_vn,weak_mi",
                      [(io.PROB_FMT % v, io.PROB_FMT % wvn, io.PROB_FMT % wmi)
                       for v, wvn, wmi in rows],
                      dict(cfg.header_params(), partition4=part4.labels))
    finite = [wvn for _, wvn, _ in rows if np.isfinite(wvn)]
    ok = all(w >= -1e-9 for w in finite) and len(finite) > 0
    return {"n_points": len(rows), "min_weak_vn": io.round6(min(finite)),
            "pass": bool(ok)}


_REPRO = {
    "fig3": _repro_fig3,
    "fig4": _repro_fig4,
    "fig5": _repro_fig5,
    "fig6": _repro_fig6,
    "table1": _repro_fig6,
    "fig8": _repro_fig8,
    "fig9": _repro_fig9,
    "tables2-4": _repro_tables234,
    "fig11": lambda cfg, out: _repro_weakmono_sweep(cfg, out, "delta_over_omega"),
    "fig12": lambda cfg, out: _repro_weakmono_sweep(cfg, out, "rb_over_a"),
}


def cmd_reproduce(cfg, args):
    if args.figure not in _REPRO:
        raise ParameterError(
            f"unknown figure id {args.figure!r}; known: {sorted(_REPRO)}")
    out = _prepare_out(replace(cfg, out_dir=str(Path(cfg.out_dir) / args.figure)))
    summary = _REPRO[args.figure](cfg, out)
    io.write_json(out / "summary.json", summary)
    status = "pass" if summary.get("pass") else "CHECK"
    print(f"reproduce[{args.figure}]: {status} -> {out}/summary.json")
    return 0


# ----------------------------------------------------------------- parser


def _add_system_flags(p):
    p.add_argument("--n-rungs", dest="n_rungs", type=int)
    p.add_argument("--a-um", dest="a_um", type=float)
    p.add_argument("--rb-over-a", dest="rb_over_a", type=float)
    p.add_argument("--delta-over-omega", dest="delta_over_omega", type=float)
    p.add_argument("--c6", dest="c6", type=float)
    p.add_argument("--aspect-ratio", dest="aspect_ratio", type=float)
    p.add_argument("--partition", dest="partition")
    p.add_argument("--partition4", dest="partition4")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rydladder",
        description="Rydberg-ladder ground states, bitstring statistics, and "
                    "filtered mutual-information entanglement estimates.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int, help="random seed override")
    common.add_argument("--out", help="output directory override")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, **kwargs):
        return sub.add_parser(name, parents=[common], **kwargs)

    p = add_parser("groundstate", help="exact distribution and entropies")
    _add_system_flags(p)
    p.set_defaults(func=cmd_groundstate)

    p = add_parser("sample", help="resample a probability distribution")
    p.add_argument("--dist", required=True, help="probdist.csv input")
    p.add_argument("--n-shots", dest="n_shots", type=int)
    p.set_defaults(func=cmd_sample)

    p = add_parser("ingest", help="post-select a shot file into counts")
    p.add_argument("--shots-file", required=True)
    p.add_argument("--format", choices=("ndjson", "hardware"), default="ndjson")
    p.set_defaults(func=cmd_ingest)

    p = add_parser("estimate", help="filtered mutual-information estimate")
    p.add_argument("--input", required=True,
                   help="probdist.csv, counts.csv, or shots file")
    _add_system_flags(p)
    p.add_argument("--grid-points", dest="grid_points", type=int)
    p.add_argument("--grid-lo", dest="grid_lo", type=float)
    p.set_defaults(func=cmd_estimate)

    p = add_parser("cumulative", help="cumulative probability curve")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_cumulative)

    p = add_parser("density", help="log-binned density of probability")
    p.add_argument("--input", required=True)
    p.add_argument("--n-bins", dest="n_bins", type=int)
    p.add_argument("--log10-lo", dest="log10_lo", type=float)
    p.add_argument("--log10-hi", dest="log10_hi", type=float)
    p.add_argument("--fit-p-lo", dest="fit_p_lo", type=float)
    p.add_argument("--fit-p-hi", dest="fit_p_hi", type=float)
    p.set_defaults(func=cmd_density)

    p = add_parser("maxprob", help="largest probability vs system size")
    _add_system_flags(p)
    p.add_argument("--min-rungs", type=int, default=4)
    p.add_argument("--max-rungs", type=int, default=10)
    p.set_defaults(func=cmd_maxprob)

    p = add_parser("evolve", help="Trotter evolution of a ramp schedule")
    _add_system_flags(p)
    p.add_argument("--schedule", dest="schedule",
                   help="ramp4us | ramp4us_modified | ramp12us | schedule.json")
    p.add_argument("--dt-us", dest="dt_us", type=float)
    p.add_argument("--checkpoint-every", dest="checkpoint_every", type=int)
    p.set_defaults(func=cmd_evolve)

    p = add_parser("rampdown", help="drive rampdown before measurement")
    _add_system_flags(p)
    p.add_argument("--ramp-time-us", dest="ramp_time_us", type=float)
    p.add_argument("--rampdown-dt", dest="rampdown_dt", type=float, default=None)
    p.set_defaults(func=cmd_rampdown)

    p = add_parser("mitigate", help="M3 readout-error mitigation")
    p.add_argument("--counts", required=True, help="counts.csv or shots file")
    p.add_argument("--p01", dest="p01", type=float)
    p.add_argument("--p10", dest="p10", type=float)
    p.set_defaults(func=cmd_mitigate)

    p = add_parser("weakmono", help="weak-monotonicity combinations")
    _add_system_flags(p)
    p.add_argument("--p-min", dest="p_min", type=float, default=None)
    p.set_defaults(func=cmd_weakmono)

    p = add_parser("scan", help="parameter-grid heatmaps")
    _add_system_flags(p)
    p.add_argument("--observables", default="s_vn,i_ab,ratio")
    p.add_argument("--dov-range", default="0:5:11", help="delta/omega lo:hi:n")
    p.add_argument("--rba-range", default="1:3.5:11", help="rb/a lo:hi:n")
    p.add_argument("--p-min", dest="p_min", type=float, default=None)
    p.set_defaults(func=cmd_scan)

    p = add_parser("reproduce", help="desk-scale figure/table pipelines")
    _add_system_flags(p)
    p.add_argument("--figure", required=True,
                   help="fig3 fig4 fig5 fig6/table1 fig8 fig9 tables2-4 fig11 fig12")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        return args.func(cfg, args)
    except (ParameterError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_CONFIG
    except (DataFormatError, EmptyDistributionError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_DATA
    except (SolverError, FitError, DegenerateGroundStateError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_NUMERIC
    except RydladderError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    _sys.exit(main())
