"""Two-leg ladder geometry and the Rydberg Hamiltonian as an implicit operator.

Internal unit convention: lengths in um, times in us, energies and angular
frequencies in rad/us. Anything quoted in cyclic MHz must be multiplied by
2*pi before it enters this module (the CLI does that conversion).

Basis-state convention: atom k = 2*rung + leg (rung-major), bit k of a basis
index is the Rydberg occupation of atom k, bit 0 is the least significant
bit. With this ordering the left half of the ladder occupies a contiguous
low-bit range, which keeps marginalization cheap.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import DimensionMismatchError, ParameterError

# Interaction constant backed out of the Aquila operating point
# Omega = 2*pi*1.078224 rad/us at R_b = 2.35 * 4.1 um, i.e. c6 = Omega*R_b^6.
C6_DEFAULT = (2.0 * np.pi * 1.078224) * (2.35 * 4.1) ** 6  # rad um^6 / us


@dataclass(frozen=True)
class LadderSystem:
    """Geometry plus drive parameters of a two-leg Rydberg ladder.

    ``aspect_ratio`` is the rung length divided by the inter-rung spacing
    ``a``; the default 2.0 is the ladder studied throughout (rung length
    twice the lattice spacing).
    """

    n_rungs: int
    a: float            # inter-rung spacing, um
    omega: float        # Rabi frequency, rad/us
    delta: float        # detuning, rad/us (may be negative during ramps)
    c6: float = C6_DEFAULT
    aspect_ratio: float = 2.0

    def __post_init__(self):
        if self.n_rungs < 1:
            raise ParameterError(f"n_rungs must be >= 1, got {self.n_rungs}")
        if self.a <= 0:
            raise ParameterError(f"a must be positive, got {self.a}")
        if self.omega < 0:
            raise ParameterError(f"omega must be >= 0, got {self.omega}")
        if self.c6 <= 0:
            raise ParameterError(f"c6 must be positive, got {self.c6}")
        if self.aspect_ratio <= 0:
            raise ParameterError(f"aspect_ratio must be positive, got {self.aspect_ratio}")

    @property
    def n_atoms(self):
        return 2 * self.n_rungs

    @property
    def dim(self):
        return 1 << self.n_atoms

    @property
    def blockade_radius(self):
        """R_b = (c6/omega)^(1/6); defined only for omega > 0."""
        if self.omega == 0:
            raise ParameterError("blockade radius undefined at omega = 0")
        return (self.c6 / self.omega) ** (1.0 / 6.0)

    def positions(self):
        """(n_atoms, 2) array of atom coordinates in um, rung-major order."""
        pos = np.empty((self.n_atoms, 2))
        for rung in range(self.n_rungs):
            for leg in (0, 1):
                pos[2 * rung + leg] = (rung * self.a, leg * self.aspect_ratio * self.a)
        return pos


@dataclass(frozen=True)
class InteractionTable:
    """Symmetric pairwise van der Waals couplings v[i, j] = c6 / r_ij^6."""

    v: np.ndarray  # (n_atoms, n_atoms), rad/us, zero diagonal

    @property
    def n_atoms(self):
        return self.v.shape[0]


def build_system(n_rungs, a=4.1, rb_over_a=2.35, delta_over_omega=3.5,
                 c6=C6_DEFAULT, aspect_ratio=2.0):
    """Construct a ladder from the experiment-facing parametrization.

    omega is chosen so the blockade radius sits at ``rb_over_a * a``:
    omega = c6 / (rb_over_a * a)^6, and delta = delta_over_omega * omega.
    delta_over_omega may be zero or negative (heatmap scans sweep through 0).
    """
    if n_rungs < 1:
        raise ParameterError(f"n_rungs must be >= 1, got {n_rungs}")
    if a <= 0 or c6 <= 0 or aspect_ratio <= 0:
        raise ParameterError("a, c6 and aspect_ratio must be positive")
    if rb_over_a < 1:
        raise ParameterError(f"rb_over_a must be >= 1, got {rb_over_a}")
    omega = c6 / (rb_over_a * a) ** 6
    return LadderSystem(
        n_rungs=n_rungs,
        a=a,
        omega=omega,
        delta=delta_over_omega * omega,
        c6=c6,
        aspect_ratio=aspect_ratio,
    )


def interaction_table(sys, cutoff_radius=None):
    """All-pairs coupling table; no self-interaction.

    ``cutoff_radius`` (um) zeroes couplings beyond that distance. It defaults
    to off: every pair interacts, as in the reference calculations.
    """
    pos = sys.positions()
    n = sys.n_atoms
    diff = pos[:, None, :] - pos[None, :, :]
    r = np.sqrt((diff ** 2).sum(axis=2))
    with np.errstate(divide="ignore"):
        v = sys.c6 / r ** 6
    np.fill_diagonal(v, 0.0)
    if cutoff_radius is not None:
        v[r > cutoff_radius] = 0.0
    return InteractionTable(v=v)


@lru_cache(maxsize=8)
def _cached_diagonal_parts(n_rungs, a, aspect_ratio, c6, cutoff_radius):
    sys = LadderSystem(n_rungs=n_rungs, a=a, omega=0.0, delta=0.0,
                       c6=c6, aspect_ratio=aspect_ratio)
    table = interaction_table(sys, cutoff_radius)
    vdiag = _kernels.interaction_diagonal(np.ascontiguousarray(table.v), sys.n_atoms)
    pop = _kernels.popcounts(sys.n_atoms)
    return pop, vdiag


def diagonal_parts(sys, cutoff_radius=None):
    """(popcount, interaction) arrays so diag(delta) = -delta*pop + vdiag.

    Splitting out the detuning lets time-dependent ramps reuse the expensive
    interaction sum. Cached per geometry.
    """
    return _cached_diagonal_parts(sys.n_rungs, sys.a, sys.aspect_ratio,
                                  sys.c6, cutoff_radius)


def hamiltonian_diagonal(sys, cutoff_radius=None):
    """Diagonal of H in the occupation basis: -delta*n_R + sum_{i<j} V_ij n_i n_j."""
    pop, vdiag = diagonal_parts(sys, cutoff_radius)
    return vdiag - sys.delta * pop


def apply_hamiltonian(sys, psi, diag=None, out=None):
    """Matrix-free H @ psi.

    H = (omega/2) sum_i sigma_x^(i) - delta sum_i n_i + sum_{i<j} V_ij n_i n_j.
    ``psi`` is a float64 or complex128 vector of length 2^n_atoms (a PureState
    is also accepted). The precomputed ``diag`` may be passed by solvers that
    call this in a loop.
    """
    amps = getattr(psi, "amplitudes", psi)
    amps = np.ascontiguousarray(amps)
    if amps.shape != (sys.dim,):
        raise DimensionMismatchError(
            f"state has shape {amps.shape}, expected ({sys.dim},)")
    if diag is None:
        diag = hamiltonian_diagonal(sys)
    if out is None:
        out = np.empty_like(amps)
    return _kernels.hmatvec(amps, diag, 0.5 * sys.omega, out)
