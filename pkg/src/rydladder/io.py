"""File formats: CSV emitters/readers and shot-file adapters.

Every CSV starts with ``# key = value`` header comments carrying the
resolved parameters that produced it (enough to rerun), one ``# written_at``
timestamp line (excluded from reproducibility comparisons), then a column
header row. Probabilities and weights are written with 17 significant
digits; derived summary quantities in JSON reports carry 6.
"""

import json
from datetime import datetime, timezone

import numpy as np

from .dist import CountTable, ProbDist, format_bitstring, parse_bitstring
from .dynamics import RampSchedule
from .errors import DataFormatError
from .noise import ShotRecord

PROB_FMT = "%.17g"


def _write_header(fh, kind, params):
    fh.write(f"# rydladder {kind} v1\n")
    fh.write(f"# written_at = {datetime.now(timezone.utc).isoformat()}\n")
    for key in sorted(params):
        fh.write(f"# {key} = {params[key]}\n")


def _read_header(lines):
    params = {}
    body_start = 0
    for i, line in enumerate(lines):
        if not line.startswith("#"):
            body_start = i
            break
        text = line[1:].strip()
        if " = " in text:
            key, value = text.split(" = ", 1)
            params[key.strip()] = value.strip()
    else:
        body_start = len(lines)
    return params, body_start


def round6(x):
    """6-significant-digit float for summary reports; non-finite -> None."""
    if x is None or isinstance(x, (str, bool)):
        return x
    if isinstance(x, (list, tuple)):
        return type(x)(round6(v) for v in x)
    x = float(x)
    return None if not np.isfinite(x) else float(f"{x:.6g}")


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_probdist_csv(path, dist, params=None):
    params = dict(params or {})
    params.update(n_atoms=dist.n_atoms, origin=dist.origin)
    if dist.n_shots is not None:
        params["n_shots"] = dist.n_shots
    with open(path, "w", encoding="utf-8") as fh:
        _write_header(fh, "probdist", params)
        fh.write("bitstring,probability\n")
        for s, p in zip(dist.states, dist.probs):
            fh.write(f"{format_bitstring(s, dist.n_atoms)},{PROB_FMT % p}\n")


def read_probdist_csv(path):
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    params, start = _read_header(lines)
    rows = [ln for ln in lines[start:] if ln.strip()]
    if not rows or rows[0] != "bitstring,probability":
        raise DataFormatError(f"{path}: expected a 'bitstring,probability' table")
    states, probs = [], []
    for ln in rows[1:]:
        try:
            text, val = ln.split(",")
            states.append(parse_bitstring(text))
            probs.append(float(val))
        except ValueError as exc:
            raise DataFormatError(f"{path}: bad row {ln!r}") from exc
    n_atoms = int(params.get("n_atoms", len(rows[1].split(",")[0])))
    n_shots = int(params["n_shots"]) if "n_shots" in params else None
    order = np.argsort(states)
    return ProbDist(states=np.asarray(states, dtype=np.int64)[order],
                    probs=np.asarray(probs, dtype=np.float64)[order],
                    n_atoms=n_atoms, origin=params.get("origin", "exact"),
                    n_shots=n_shots)


def write_counts_csv(path, table, params=None):
    params = dict(params or {})
    params.update(n_atoms=table.n_atoms, n_shots=table.n_shots)
    with open(path, "w", encoding="utf-8") as fh:
        _write_header(fh, "counts", params)
        fh.write("bitstring,count\n")
        for s, c in zip(table.states, table.counts):
            fh.write(f"{format_bitstring(s, table.n_atoms)},{int(c)}\n")


def read_counts_csv(path):
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    params, start = _read_header(lines)
    rows = [ln for ln in lines[start:] if ln.strip()]
    if not rows or rows[0] != "bitstring,count":
        raise DataFormatError(f"{path}: expected a 'bitstring,count' table")
    if len(rows) < 2:
        raise DataFormatError(f"{path}: empty count table")
    mapping = {}
    for ln in rows[1:]:
        try:
            text, val = ln.split(",")
            state = parse_bitstring(text)
            mapping[state] = mapping.get(state, 0) + int(val)
        except ValueError as exc:
            raise DataFormatError(f"{path}: bad row {ln!r}") from exc
    n_atoms = int(params.get("n_atoms", len(rows[1].split(",")[0])))
    return CountTable.from_mapping(mapping, n_atoms)


def write_quasi_csv(path, quasi, params=None):
    params = dict(params or {})
    params.update(n_atoms=quasi.n_atoms)
    with open(path, "w", encoding="utf-8") as fh:
        _write_header(fh, "quasidist", params)
        fh.write("bitstring,weight\n")
        for s, w in zip(quasi.states, quasi.weights):
            fh.write(f"{format_bitstring(s, quasi.n_atoms)},{PROB_FMT % w}\n")


def write_cumulative_csv(path, curve, params=None):
    with open(path, "w", encoding="utf-8") as fh:
        _write_header(fh, "cumulative", params or {})
        fh.write("p_lambda,sigma\n")
        for p, s in zip(curve.p_values, curve.sigma):
            fh.write(f"{PROB_FMT % p},{PROB_FMT % s}\n")


def write_density_csv(path, d, params=None):
    params = dict(params or {})
    params.update(log10_lo=d.log10_lo, log10_hi=d.log10_hi, n_bins=d.n_bins)
    with open(path, "w", encoding="utf-8") as fh:
        _write_header(fh, "density", params)
        fh.write("p_center,delta_p,count,density\n")
        for pc, dp, c, dens in zip(d.p_center, d.delta_p, d.count, d.density):
            fh.write(f"{PROB_FMT % pc},{PROB_FMT % dp},{int(c)},{PROB_FMT % dens}\n")


def write_filtration_csv(path, curve, params=None):
    with open(path, "w", encoding="utf-8") as fh:
        _write_header(fh, "filtration", params or {})
        fh.write("p_min,i_ab,s_cond,survivors\n")
        for t, i, s, n in zip(curve.thresholds, curve.i_ab, curve.s_cond,
                              curve.survivors):
            fh.write(f"{PROB_FMT % t},{PROB_FMT % i},{PROB_FMT % s},{int(n)}\n")


def write_evolution_csv(path, result, params=None):
    params = dict(params or {})
    params["dt_us"] = result.dt
    with open(path, "w", encoding="utf-8") as fh:
        _write_header(fh, "evolution", params)
        fh.write("t_us,fidelity\n")
        for t, f in result.checkpoints:
            fh.write(f"{PROB_FMT % t},{PROB_FMT % f}\n")


def write_heatmap_csv(path, row_values, col_values, grid, params=None):
    """Header row of rb_over_a values, first column delta_over_omega."""
    with open(path, "w", encoding="utf-8") as fh:
        _write_header(fh, "heatmap", params or {})
        fh.write("delta_over_omega\\rb_over_a," +
                 ",".join(PROB_FMT % c for c in col_values) + "\n")
        for r, row in zip(row_values, grid):
            fh.write(PROB_FMT % r + "," +
                     ",".join(PROB_FMT % v for v in row) + "\n")


def read_shot_records(path):
    """Newline-delimited JSON shots: {"pre_sequence": [...], "post_sequence": [...]}."""
    shots = []
    with open(path, encoding="utf-8") as fh:
        for ln, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                shots.append(ShotRecord(pre_sequence=tuple(obj["pre_sequence"]),
                                        post_sequence=tuple(obj["post_sequence"])))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise DataFormatError(f"{path}:{ln}: bad shot record: {exc}") from exc
    if not shots:
        raise DataFormatError(f"{path}: no shot records")
    return shots


def write_shot_records(path, shots):
    with open(path, "w", encoding="utf-8") as fh:
        for shot in shots:
            fh.write(json.dumps({"pre_sequence": list(shot.pre_sequence),
                                 "post_sequence": list(shot.post_sequence)}) + "\n")


def read_hardware_task_json(path):
    """Adapter for the device task-result layout.

    Expects {"measurements": [{"shotResult": {"preSequence": [...],
    "postSequence": [...]}}, ...]} and fails loudly on anything else.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: not valid JSON: {exc}") from exc
    try:
        measurements = obj["measurements"]
        shots = [ShotRecord(pre_sequence=tuple(m["shotResult"]["preSequence"]),
                            post_sequence=tuple(m["shotResult"]["postSequence"]))
                 for m in measurements]
    except (KeyError, TypeError) as exc:
        raise DataFormatError(
            f"{path}: expected measurements[*].shotResult.preSequence/postSequence "
            f"({exc})") from exc
    if not shots:
        raise DataFormatError(f"{path}: task result holds no measurements")
    return shots


def load_schedule_json(path):
    """Schedule file: {"omega": [[t_us, MHz_cyclic], ...], "delta": [...]}.

    Values are cyclic MHz and converted to rad/us here.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: not valid JSON: {exc}") from exc
    try:
        omega = tuple((float(t), 2.0 * np.pi * float(v)) for t, v in obj["omega"])
        delta = tuple((float(t), 2.0 * np.pi * float(v)) for t, v in obj["delta"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"{path}: expected omega/delta breakpoint arrays "
                              f"({exc})") from exc
    t_final = max(omega[-1][0], delta[-1][0])
    return RampSchedule(omega_points=omega, delta_points=delta, t_final=t_final)
