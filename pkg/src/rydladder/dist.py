"""Bitstring probability distributions, sampling, cumulative curves,
density-of-probability histograms, and the volume-scaling fits.

A ProbDist is the exchange object between every analysis: a sparse map from
basis states to strictly positive probabilities, kept as parallel sorted
arrays for fast masked aggregation.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EmptyDistributionError, FitError, ParameterError


def format_bitstring(state, n_atoms):
    """Text form of a basis state: character k is atom k's occupation."""
    return "".join("1" if (int(state) >> k) & 1 else "0" for k in range(n_atoms))


def parse_bitstring(text):
    state = 0
    for k, ch in enumerate(text.strip()):
        if ch == "1":
            state |= 1 << k
        elif ch != "0":
            raise ParameterError(f"invalid bitstring character {ch!r}")
    return state


@dataclass(frozen=True)
class ProbDist:
    """Normalized sparse distribution over n_atoms-bit basis states.

    ``origin`` records provenance: "exact" (from amplitudes), "sampled"
    (finite shots; n_shots set), or "mitigated".
    """

    states: np.ndarray      # int64, strictly increasing
    probs: np.ndarray       # float64, > 0, sums to 1
    n_atoms: int
    origin: str = "exact"
    n_shots: int | None = None

    def __post_init__(self):
        if len(self.states) == 0:
            raise EmptyDistributionError("distribution has no entries")
        total = float(self.probs.sum())
        if abs(total - 1.0) > 1e-9:
            raise ParameterError(f"probabilities sum to {total!r}, not 1")
        if np.any(self.probs <= 0.0):
            raise ParameterError("probabilities must be strictly positive")

    @classmethod
    def from_state(cls, psi):
        p = psi.probabilities()
        keep = p > 0.0
        states = np.nonzero(keep)[0].astype(np.int64)
        return cls(states=states, probs=p[keep] / p[keep].sum(),
                   n_atoms=psi.n_atoms, origin="exact")

    @classmethod
    def from_mapping(cls, mapping, n_atoms, origin="exact", n_shots=None):
        states = np.array(sorted(mapping), dtype=np.int64)
        probs = np.array([mapping[s] for s in states], dtype=np.float64)
        return cls(states=states, probs=probs, n_atoms=n_atoms,
                   origin=origin, n_shots=n_shots)

    def as_dict(self):
        return {int(s): float(p) for s, p in zip(self.states, self.probs)}

    @property
    def p_max(self):
        return float(self.probs.max())

    @property
    def p_min(self):
        return float(self.probs.min())

    def __len__(self):
        return len(self.states)


@dataclass(frozen=True)
class CountTable:
    """Aggregated shot counts; sum of counts equals n_shots."""

    states: np.ndarray      # int64, strictly increasing
    counts: np.ndarray      # int64, > 0
    n_atoms: int
    n_shots: int

    def __post_init__(self):
        if int(self.counts.sum()) != self.n_shots:
            raise ParameterError("counts do not sum to n_shots")

    @classmethod
    def from_mapping(cls, mapping, n_atoms):
        states = np.array(sorted(mapping), dtype=np.int64)
        counts = np.array([mapping[s] for s in states], dtype=np.int64)
        return cls(states=states, counts=counts, n_atoms=n_atoms,
                   n_shots=int(counts.sum()))

    def as_dict(self):
        return {int(s): int(c) for s, c in zip(self.states, self.counts)}


def counts_to_probdist(c):
    """Occupation probability estimate p = N_{n} / N_shots."""
    if c.n_shots <= 0 or len(c.states) == 0:
        raise EmptyDistributionError("count table is empty")
    keep = c.counts > 0
    return ProbDist(states=c.states[keep],
                    probs=c.counts[keep] / float(c.n_shots),
                    n_atoms=c.n_atoms, origin="sampled", n_shots=c.n_shots)


def sample(p, n_shots, seed):
    """Draw n_shots bitstrings by cumulative-interval inversion.

    Each bitstring owns a subinterval of [0, 1] of length equal to its
    probability; seeded uniforms select intervals. Deterministic per seed.
    """
    if n_shots < 0:
        raise ParameterError(f"n_shots must be >= 0, got {n_shots}")
    rng = np.random.default_rng(seed)
    cum = np.cumsum(p.probs)
    cum[-1] = max(cum[-1], 1.0)  # guard against rounding at the top end
    draws = np.searchsorted(cum, rng.random(n_shots), side="right")
    counts = np.bincount(draws, minlength=len(p.probs)).astype(np.int64)
    keep = counts > 0
    return CountTable(states=p.states[keep], counts=counts[keep],
                      n_atoms=p.n_atoms, n_shots=int(n_shots))


@dataclass(frozen=True)
class CumulativeCurve:
    """Step curve Sigma(p_lambda) = sum of p over states with p <= p_lambda."""

    p_values: np.ndarray    # distinct probabilities, ascending
    sigma: np.ndarray       # cumulative mass at each

    def evaluate(self, p_lambda):
        """Sigma at arbitrary thresholds (scalar or array)."""
        idx = np.searchsorted(self.p_values, np.asarray(p_lambda, dtype=float),
                              side="right")
        padded = np.concatenate(([0.0], self.sigma))
        return padded[idx]

    def sup_distance(self, other):
        """max |Sigma_self - Sigma_other| over both curves' breakpoints.

        Beware: when a distribution carries exactly degenerate probability
        levels (symmetry multiplets), this saturates at a fraction of the
        degenerate jump for any finite sample; levy_distance is the metric
        in which sampled curves actually approach the exact one.
        """
        grid = np.union1d(self.p_values, other.p_values)
        return float(np.max(np.abs(self.evaluate(grid) - other.evaluate(grid))))

    def levy_distance(self, other):
        """Levy metric: smallest eps with G(x-eps)-eps <= F(x) <= G(x+eps)+eps.

        Horizontal-and-vertical slack makes it insensitive to estimates
        scattering around an exactly degenerate jump, so it decreases with
        the shot count where the plain sup-distance stalls.
        """
        def feasible(eps):
            for f, g in ((self, other), (other, self)):
                if np.any(f.evaluate(f.p_values) >
                          g.evaluate(f.p_values + eps) + eps):
                    return False
            return True

        lo, hi = 0.0, 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if feasible(mid):
                hi = mid
            else:
                lo = mid
        return hi


def cumulative(p):
    """Cumulative probability distribution, ties accumulated together."""
    values, inverse = np.unique(p.probs, return_inverse=True)
    mass = np.bincount(inverse, weights=p.probs)
    return CumulativeCurve(p_values=values, sigma=np.cumsum(mass))


@dataclass(frozen=True)
class DensityEstimate:
    """Log-binned histogram of the probability values themselves.

    density[i] approximates N(p): the number of bitstrings per unit
    probability near p_center[i], with delta_p the linear bin width.
    """

    p_center: np.ndarray
    delta_p: np.ndarray
    count: np.ndarray
    density: np.ndarray
    log10_lo: float
    log10_hi: float
    n_bins: int


def density_of_probability(p, log10_lo=-26.0, log10_hi=-1.0, n_bins=50):
    """Histogram of probabilities over log10-equispaced bins.

    Bin edges are 10**linspace(lo, hi, n_bins+1); a probability lands in
    [p_lo, p_hi). The bin center is the geometric midpoint, so
    delta_p = 10**(log10 p_c + w/2) - 10**(log10 p_c - w/2) = p_hi - p_lo.
    """
    if not log10_lo < log10_hi:
        raise ParameterError("need log10_lo < log10_hi")
    if n_bins < 1:
        raise ParameterError("need n_bins >= 1")
    log_edges = np.linspace(log10_lo, log10_hi, n_bins + 1)
    edges = 10.0 ** log_edges
    count, _ = np.histogram(p.probs, bins=edges)
    centers = 10.0 ** (0.5 * (log_edges[:-1] + log_edges[1:]))
    delta_p = np.diff(edges)
    return DensityEstimate(p_center=centers, delta_p=delta_p,
                           count=count.astype(np.int64),
                           density=count / delta_p,
                           log10_lo=log10_lo, log10_hi=log10_hi, n_bins=n_bins)


def power_law_fit(d, p_lo=None, p_hi=None):
    """Fit density ~ C * p^(-1-zeta) by least squares in log-log space.

    Only nonempty bins inside [p_lo, p_hi] participate; fewer than 3 such
    bins raises FitError. Returns {"C", "zeta", "r_squared", "n_bins",
    "window"}.
    """
    mask = d.count > 0
    if p_lo is not None:
        mask &= d.p_center >= p_lo
    if p_hi is not None:
        mask &= d.p_center <= p_hi
    if int(mask.sum()) < 3:
        raise FitError(f"power-law fit needs >= 3 nonempty bins, have {int(mask.sum())}")
    x = np.log(d.p_center[mask])
    y = np.log(d.density[mask])
    slope, intercept, r2 = _ols(x, y)
    return {"C": float(np.exp(intercept)), "zeta": float(-slope - 1.0),
            "r_squared": r2, "n_bins": int(mask.sum()),
            "window": (float(np.exp(x.min())), float(np.exp(x.max())))}


def _ols(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xm, ym = x.mean(), y.mean()
    sxx = ((x - xm) ** 2).sum()
    if sxx == 0.0:
        raise FitError("degenerate fit: all abscissae equal")
    slope = ((x - xm) * (y - ym)).sum() / sxx
    intercept = ym - slope * xm
    resid = y - (slope * x + intercept)
    syy = ((y - ym) ** 2).sum()
    r2 = 1.0 if syy == 0.0 else 1.0 - float((resid ** 2).sum() / syy)
    return float(slope), float(intercept), r2


def total_variation(p, q):
    """TV distance 0.5 * sum |p - q| over the union support.

    Accepts ProbDist or QuasiDist-like objects (anything with .states and
    .probs or .weights); quasi-probability weights enter unclipped.
    """
    sp, wp = p.states, getattr(p, "probs", getattr(p, "weights", None))
    sq, wq = q.states, getattr(q, "probs", getattr(q, "weights", None))
    union = np.union1d(sp, sq)
    a = np.zeros(len(union))
    b = np.zeros(len(union))
    a[np.searchsorted(union, sp)] = wp
    b[np.searchsorted(union, sq)] = wq
    return float(0.5 * np.abs(a - b).sum())


def max_prob_series(systems, tol=1e-10):
    """Largest ground-state bitstring probability per system, as (N_s, P_max)."""
    from .spectrum import ground_state

    out = []
    for sys in systems:
        _, psi = ground_state(sys, tol=tol)
        out.append((sys.n_rungs, float(psi.probabilities().max())))
    return out


def exp_decay_fit(series, mod3=None):
    """Fit P_max(N_s) = A * exp(-k * N_s) on a size class.

    ``mod3`` of None uses every point; 0/1/2 restricts to N_s % 3 == mod3
    (the ladder shows a period-3 size effect at R_b/a = 2.35). With exactly
    two points the fit reduces to the analytic two-point solution.
    """
    pts = [(n, p) for n, p in series if mod3 is None or n % 3 == mod3]
    if len(pts) < 2:
        raise FitError(f"exponential fit needs >= 2 points, have {len(pts)}")
    ns = np.array([n for n, _ in pts], dtype=float)
    ps = np.array([p for _, p in pts], dtype=float)
    if np.any(ps <= 0):
        raise FitError("P_max values must be positive for a log fit")
    slope, intercept, r2 = _ols(ns, np.log(ps))
    return {"A": float(np.exp(intercept)), "k": float(-slope),
            "r_squared": r2, "n_points": len(pts)}
