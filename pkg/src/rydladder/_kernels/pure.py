"""NumPy implementations of the hot kernels.

These are the fallback used when the compiled extension is unavailable.
Every function here has a signature-identical twin in ``_core.pyx``; the
test suite checks the two backends agree, and ``benchmarks/bench_kernels.py``
times them against each other.

Convention everywhere: basis states are integers, bit k of the index is the
occupation of atom k (bit 0 = least significant bit = atom 0).
"""

import numpy as np

BACKEND = "pure"


def popcounts(n_atoms):
    """Bit-population count for every basis index, as an int64 array."""
    dim = 1 << n_atoms
    pop = np.zeros(dim, dtype=np.int64)
    idx = np.arange(dim, dtype=np.int64)
    for k in range(n_atoms):
        pop += (idx >> k) & 1
    return pop


def interaction_diagonal(v, n_atoms):
    """Pairwise-energy diagonal: out[s] = sum_{i<j} v[i,j] n_i(s) n_j(s)."""
    dim = 1 << n_atoms
    idx = np.arange(dim, dtype=np.int64)
    bits = [((idx >> k) & 1).astype(np.float64) for k in range(n_atoms)]
    out = np.zeros(dim, dtype=np.float64)
    for i in range(n_atoms):
        for j in range(i + 1, n_atoms):
            vij = v[i, j]
            if vij != 0.0:
                out += vij * (bits[i] * bits[j])
    return out


def hmatvec(psi, diag, omega_half, out):
    """out = diag*psi + omega_half * sum_k psi[index with bit k flipped].

    Works for float64 and complex128 ``psi``/``out`` (``diag`` is real).
    """
    n_atoms = (len(psi) - 1).bit_length()
    np.multiply(psi, diag, out=out)
    if omega_half != 0.0:
        for k in range(n_atoms):
            step = 1 << k
            p3 = psi.reshape(-1, 2, step)
            o3 = out.reshape(-1, 2, step)
            o3[:, 0, :] += omega_half * p3[:, 1, :]
            o3[:, 1, :] += omega_half * p3[:, 0, :]
    return out


def apply_phases(psi, phase):
    """In-place psi *= phase (both complex128, same length)."""
    psi *= phase
    return psi


def x_rotation_all(psi, cos_half, sin_half, n_atoms):
    """Apply exp(-i*theta/2*sigma_x) on every atom, in place.

    Per atom: (a, b) -> (c*a - i*s*b, c*b - i*s*a). The factors commute, so
    the atom order is irrelevant up to rounding.
    """
    for k in range(n_atoms):
        step = 1 << k
        p3 = psi.reshape(-1, 2, step)
        a = p3[:, 0, :].copy()
        b = p3[:, 1, :]
        p3[:, 0, :] = cos_half * a - 1j * sin_half * b
        p3[:, 1, :] = cos_half * b - 1j * sin_half * a
    return psi
