"""Readout-error channel, mitigation, and pre-sequence post-selection.

The channel flips each measured bit independently: 0 -> 1 with probability
p01 (default 0.01) and 1 -> 0 with probability p10 (default 0.08). Mitigation
either inverts the assignment matrix restricted to the observed bitstrings
(M3-style, column-renormalized so quasi-probabilities sum to one) or divides
each count by its depletion factor
(1 - p10)^n_R * (1 - p01)^(N_q - n_R).
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .dist import CountTable, ProbDist
from .errors import (EmptyDistributionError, FitError, ParameterError,
                     SolverError)

DENSE_SUPPORT_LIMIT = 4096   # direct solve below this; chunked GMRES above
ITER_TOL = 1e-8
ITER_MAXITER = 1000


@dataclass(frozen=True)
class ReadoutModel:
    """Independent per-bit misread probabilities.

    Any probability in [0, 1] defines a valid channel; inverting it
    (m3_mitigate) additionally requires both rates below 0.5.
    """

    p01: float = 0.01   # |g> read as |r>
    p10: float = 0.08   # |r> read as |g>

    def __post_init__(self):
        for name, v in (("p01", self.p01), ("p10", self.p10)):
            if not 0.0 <= v <= 1.0:
                raise ParameterError(f"{name} must be in [0, 1], got {v}")

    def require_invertible(self):
        if self.p01 >= 0.5 or self.p10 >= 0.5:
            raise ParameterError(
                f"mitigation needs misread rates < 0.5, got "
                f"p01={self.p01}, p10={self.p10}")

    def confusion(self):
        """2x2 single-bit matrix: conf[read, true]."""
        return np.array([[1.0 - self.p01, self.p10],
                         [self.p01, 1.0 - self.p10]])


@dataclass(frozen=True)
class ShotRecord:
    """One raw shot: loading pre-sequence and measured post-sequence.

    pre_sequence[k] = 1 means atom k was successfully loaded. The meaning of
    post_sequence bits depends on the hardware convention, resolved at
    post-selection time.
    """

    pre_sequence: tuple
    post_sequence: tuple

    def __post_init__(self):
        if len(self.pre_sequence) != len(self.post_sequence):
            raise ParameterError("pre/post sequence lengths differ")


@dataclass(frozen=True)
class QuasiDist:
    """Mitigated weights on the observed support; entries may be negative."""

    states: np.ndarray
    weights: np.ndarray
    n_atoms: int

    def __post_init__(self):
        total = float(self.weights.sum())
        if abs(total - 1.0) > 1e-6:
            raise ParameterError(f"quasi-probabilities sum to {total!r}, not 1")

    def clipped(self):
        """(ProbDist, clipped_mass): negatives zeroed, renormalized.

        Entropy-style consumers need genuine probabilities; the discarded
        negative mass is reported rather than hidden.
        """
        keep = self.weights > 0.0
        if not keep.any():
            raise EmptyDistributionError("all quasi-probability weights <= 0")
        clipped_mass = float(-self.weights[~keep].sum())
        mass = self.weights[keep].sum()
        dist = ProbDist(states=self.states[keep], probs=self.weights[keep] / mass,
                        n_atoms=self.n_atoms, origin="mitigated")
        return dist, clipped_mass


def apply_readout_noise(c, m, seed):
    """Flip every bit of every shot independently; total shots preserved."""
    states = np.repeat(c.states, c.counts).astype(np.int64)
    rng = np.random.default_rng(seed)
    for k in range(c.n_atoms):
        bit = (states >> k) & 1
        u = rng.random(len(states))
        flip = np.where(bit == 1, u < m.p10, u < m.p01)
        states ^= flip.astype(np.int64) << k
    uniq, counts = np.unique(states, return_counts=True)
    return CountTable(states=uniq, counts=counts.astype(np.int64),
                      n_atoms=c.n_atoms, n_shots=c.n_shots)


def _assignment_columns(true_states, read_states, n_atoms, conf):
    """Block of the assignment matrix: rows read_states, columns true_states."""
    block = np.ones((len(read_states), len(true_states)))
    for k in range(n_atoms):
        rb = (read_states >> k) & 1
        tb = (true_states >> k) & 1
        block *= conf[rb[:, None], tb[None, :]]
    return block


def m3_mitigate(c, m, tol=ITER_TOL, maxiter=ITER_MAXITER):
    """Invert the readout channel on the observed support only.

    Builds the reduced assignment matrix A[i, j] = P(read s_i | true s_j)
    over observed bitstrings with columns renormalized (so the recovered
    weights sum to one), then solves A x = p_noisy: dense direct solve for
    small supports, diagonally preconditioned GMRES with a chunked
    matrix-free matvec above DENSE_SUPPORT_LIMIT. Returns (QuasiDist, report).
    The support is preserved exactly: no strings added or dropped.
    """
    if len(c.states) == 0:
        raise EmptyDistributionError("count table is empty")
    m.require_invertible()
    states = c.states.astype(np.int64)
    p_noisy = c.counts / float(c.n_shots)
    conf = m.confusion()
    n = len(states)

    if n <= DENSE_SUPPORT_LIMIT:
        a = _assignment_columns(states, states, c.n_atoms, conf)
        a /= a.sum(axis=0, keepdims=True)
        x = np.linalg.solve(a, p_noisy)
        resid = float(np.linalg.norm(a @ x - p_noisy))
        report = {"support": n, "solver": "dense", "residual": resid}
    else:
        colsum = np.empty(n)
        chunk = max(1, (1 << 22) // n)
        for lo in range(0, n, chunk):
            block = _assignment_columns(states, states[lo:lo + chunk],
                                        c.n_atoms, conf)
            colsum[lo:lo + chunk] = block.sum(axis=0)

        def matvec(x):
            y = np.zeros(n)
            for lo in range(0, n, chunk):
                block = _assignment_columns(states[lo:lo + chunk], states,
                                            c.n_atoms, conf)
                y[lo:lo + chunk] = block @ (x / colsum)
            return y

        op = spla.LinearOperator((n, n), matvec=matvec)
        diag = np.array([_assignment_columns(states[i:i + 1], states[i:i + 1],
                                             c.n_atoms, conf)[0, 0]
                         for i in range(n)]) / colsum
        precond = spla.LinearOperator((n, n), matvec=lambda x: x / diag)
        x, info = spla.gmres(op, p_noisy, rtol=tol, maxiter=maxiter, M=precond)
        resid = float(np.linalg.norm(matvec(x) - p_noisy))
        if info != 0:
            raise SolverError(
                f"M3 inversion did not converge (info={info})", residual=resid)
        report = {"support": n, "solver": "gmres", "residual": resid}

    if resid > max(tol * 10, 1e-6):
        raise SolverError(f"M3 residual {resid:.3e} too large", residual=resid)
    quasi = QuasiDist(states=states, weights=x, n_atoms=c.n_atoms)
    report["negative_weight"] = float(-x[x < 0].sum())
    return quasi, report


def depletion_factor(state, n_atoms, m):
    """Survival probability of a bitstring under the readout channel.

    (1 - p10)^n_R * (1 - p01)^(N_q - n_R) with n_R the Rydberg count; the
    high-probability strings of a given state share nearly the same n_R, so
    this single factor captures most of the channel's effect on them.
    """
    n_r = bin(int(state)).count("1")
    return (1.0 - m.p10) ** n_r * (1.0 - m.p01) ** (n_atoms - n_r)


def depletion_mitigate(c, m):
    """Divide each count by its depletion factor and renormalize.

    When every observed string shares one n_R the factor cancels against
    the normalization and this reduces to plain counts_to_probdist.
    """
    if len(c.states) == 0:
        raise EmptyDistributionError("count table is empty")
    m.require_invertible()
    pop = np.array([bin(int(s)).count("1") for s in c.states])
    factors = (1.0 - m.p10) ** pop * (1.0 - m.p01) ** (c.n_atoms - pop)
    w = c.counts / factors
    return ProbDist(states=c.states.astype(np.int64), probs=w / w.sum(),
                    n_atoms=c.n_atoms, origin="mitigated", n_shots=c.n_shots)


def postselect(shots, invert_post_sequence=True):
    """Keep shots whose pre-sequence shows every atom loaded.

    Returns (CountTable, sorting_fidelity) with sorting_fidelity the kept
    fraction. ``invert_post_sequence`` selects the hardware readout
    convention (post bit 0 => Rydberg occupation 1), the default for device
    files; internally generated files set it off.
    """
    if not shots:
        raise EmptyDistributionError("no shots to post-select")
    n_atoms = len(shots[0].pre_sequence)
    kept = {}
    n_kept = 0
    for shot in shots:
        if len(shot.pre_sequence) != n_atoms:
            raise ParameterError("inconsistent shot lengths")
        if not all(b == 1 for b in shot.pre_sequence):
            continue
        n_kept += 1
        state = 0
        for k, bit in enumerate(shot.post_sequence):
            occ = 1 - bit if invert_post_sequence else bit
            state |= (occ & 1) << k
        kept[state] = kept.get(state, 0) + 1
    fidelity = n_kept / len(shots)
    if n_kept == 0:
        raise EmptyDistributionError(
            "post-selection removed every shot (sorting fidelity 0)")
    return CountTable.from_mapping(kept, n_atoms), fidelity


def sorting_fidelity_fit(series):
    """Per-atom loading rate f from fidelity(N) = f^N.

    Least squares on ln(fidelity) = N ln(f), through the origin as the
    model dictates: f = exp(sum N ln fid / sum N^2).
    """
    pts = [(n, fid) for n, fid in series]
    if len(pts) < 2:
        raise FitError(f"sorting-fidelity fit needs >= 2 points, have {len(pts)}")
    ns = np.array([n for n, _ in pts], dtype=float)
    fids = np.array([f for _, f in pts], dtype=float)
    if np.any(fids <= 0) or np.any(fids > 1):
        raise FitError("fidelities must lie in (0, 1]")
    slope = float((ns * np.log(fids)).sum() / (ns ** 2).sum())
    return float(np.exp(slope))
