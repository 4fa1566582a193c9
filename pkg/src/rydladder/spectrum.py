"""Ground states, reduced density matrices, and von Neumann entropies.

The eigensolver is Lanczos with full reorthogonalization (ARPACK via
scipy.sparse.linalg.eigsh) on the matrix-free Hamiltonian action. The start
vector is seeded so repeated runs give bitwise-identical amplitudes.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from . import lattice
from .errors import (DegenerateGroundStateError, DimensionMismatchError,
                     ParameterError, SolverError)

MAX_ATOMS = 24          # 2^24 amplitudes; above this, refuse rather than swap
DEGENERACY_GAP = 1e-8   # rad/us; below this the ground state is ambiguous
EIG_FLOOR = 1e-14       # eigenvalues at or below this contribute no entropy
_START_SEED = 20210907  # fixed Lanczos start vector


@dataclass(frozen=True)
class PureState:
    """Normalized amplitude vector over the 2^n_atoms occupation basis."""

    amplitudes: np.ndarray
    n_atoms: int

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.n_atoms,):
            raise DimensionMismatchError(
                f"{self.amplitudes.shape} amplitudes for {self.n_atoms} atoms")
        norm2 = float(np.vdot(self.amplitudes, self.amplitudes).real)
        if abs(norm2 - 1.0) > 1e-8:
            raise ParameterError(f"state not normalized: |psi|^2 = {norm2!r}")

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class ReducedDensityMatrix:
    """Density matrix of a subregion, ordered by ascending atom index."""

    region_atoms: tuple
    rho: np.ndarray


def basis_state(n_atoms, index=0, dtype=np.complex128):
    amps = np.zeros(1 << n_atoms, dtype=dtype)
    amps[index] = 1.0
    return PureState(amplitudes=amps, n_atoms=n_atoms)


def _fix_phase(vec):
    """Make the largest-magnitude amplitude real positive, in place."""
    k = int(np.argmax(np.abs(vec)))
    pivot = vec[k]
    if pivot != 0:
        vec *= abs(pivot) / pivot
    return vec


def _diagonal_ground_state(sys, diag):
    order = np.argsort(diag, kind="stable")
    e0, e1 = float(diag[order[0]]), float(diag[order[1]])
    if abs(e1 - e0) < DEGENERACY_GAP:
        raise DegenerateGroundStateError(e0, e1)
    amps = np.zeros(sys.dim)
    amps[order[0]] = 1.0
    return e0, amps


def ground_state(sys, tol=1e-10):
    """Lowest eigenpair of the ladder Hamiltonian.

    Returns (energy in rad/us, PureState). The residual ||H psi - E psi|| is
    checked against tol times a cheap upper bound on ||H||; non-convergence
    raises SolverError with the residual. A gap below DEGENERACY_GAP between
    the two lowest eigenvalues raises DegenerateGroundStateError.
    """
    if sys.n_atoms > MAX_ATOMS:
        raise ParameterError(
            f"{sys.n_atoms} atoms exceeds the configured maximum {MAX_ATOMS}")
    diag = lattice.hamiltonian_diagonal(sys)
    if sys.omega == 0.0:
        energy, amps = _diagonal_ground_state(sys, diag)
    else:
        energy, amps = _iterative_ground_state(sys, diag, tol)
    scale = float(np.max(np.abs(diag))) + 0.5 * sys.omega * sys.n_atoms
    resid = float(np.linalg.norm(
        lattice.apply_hamiltonian(sys, amps, diag=diag) - energy * amps))
    if resid > max(tol * scale, 1e-9):
        raise SolverError(
            f"eigensolver residual {resid:.3e} exceeds tolerance "
            f"{max(tol * scale, 1e-9):.3e}", residual=resid)
    _fix_phase(amps)
    return energy, PureState(amplitudes=amps.astype(np.complex128), n_atoms=sys.n_atoms)


def _dense_ground_pair(sys, diag):
    dim = sys.dim
    h = np.diag(diag.astype(np.float64))
    idx = np.arange(dim)
    for k in range(sys.n_atoms):
        h[idx, idx ^ (1 << k)] += 0.5 * sys.omega
    vals, vecs = np.linalg.eigh(h)
    return float(vals[0]), float(vals[1]), np.ascontiguousarray(vecs[:, 0])


def _operator(sys, diag):
    dim = sys.dim
    omega_half = 0.5 * sys.omega
    buf = np.empty(dim)

    def matvec(x):
        from . import _kernels
        x = np.ascontiguousarray(np.asarray(x).reshape(-1))
        return np.array(_kernels.hmatvec(x, diag, omega_half, buf), copy=True)

    def matmat(xs):
        return np.column_stack([matvec(xs[:, i]) for i in range(xs.shape[1])])

    return spla.LinearOperator((dim, dim), matvec=matvec, matmat=matmat,
                               dtype=np.float64)


def _lobpcg_ground_pair(sys, diag, tol_abs):
    """Preconditioned block solve for the two lowest eigenpairs.

    Jacobi preconditioning 1/(diag - lower bound) tames the huge spread of
    the diagonal; the first start column carries Boltzmann weights on the
    diagonal (an excellent cheap approximation of the ground state), the
    second is seeded noise.
    """
    import warnings

    dim = sys.dim
    op = _operator(sys, diag)
    e_low = float(diag.min()) - sys.n_atoms * sys.omega
    pd = 1.0 / np.maximum(diag - e_low, 1.0)
    precond = spla.LinearOperator(
        (dim, dim), matvec=lambda v: pd * np.asarray(v).reshape(-1),
        matmat=lambda vs: pd[:, None] * vs, dtype=np.float64)
    rng = np.random.default_rng(_START_SEED)
    x0 = rng.standard_normal((dim, 2))
    x0[:, 0] = np.exp(-(2.0 / sys.omega) * (diag - diag.min()))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # stagnation is caught by the residual check
        vals, vecs = spla.lobpcg(op, x0, M=precond, tol=tol_abs,
                                 maxiter=1500, largest=False)
    if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(vecs))):
        raise SolverError("LOBPCG produced non-finite values")
    order = np.argsort(vals)
    vec = vecs[:, order[0]]
    return (float(vals[order[0]]), float(vals[order[1]]),
            np.ascontiguousarray(vec / np.linalg.norm(vec)))


def _arpack_ground_pair(sys, diag, tol):
    op = _operator(sys, diag)
    rng = np.random.default_rng(_START_SEED)
    try:
        vals, vecs = spla.eigsh(op, k=2, which="SA",
                                v0=rng.standard_normal(sys.dim), tol=tol,
                                ncv=min(sys.dim, 40))
    except spla.ArpackNoConvergence as exc:
        raise SolverError(f"Lanczos did not converge: {exc}") from exc
    order = np.argsort(vals)
    return (float(vals[order[0]]), float(vals[order[1]]),
            np.ascontiguousarray(vecs[:, order[0]]))


def _iterative_ground_state(sys, diag, tol):
    dim = sys.dim
    scale = float(np.max(np.abs(diag))) + 0.5 * sys.omega * sys.n_atoms
    allowed = max(tol * scale, 1e-9)
    if dim <= 64:
        # dense is faster and unconditionally robust at toy sizes
        e0, e1, vec = _dense_ground_pair(sys, diag)
    else:
        try:
            e0, e1, vec = _lobpcg_ground_pair(sys, diag, 0.25 * allowed)
            resid = float(np.linalg.norm(op_apply(sys, diag, vec) - e0 * vec))
            if resid > allowed:
                raise SolverError("LOBPCG residual too large", residual=resid)
        except SolverError:
            e0, e1, vec = _arpack_ground_pair(sys, diag, tol)
    if abs(e1 - e0) < DEGENERACY_GAP:
        raise DegenerateGroundStateError(e0, e1)
    return e0, vec


def op_apply(sys, diag, x):
    from . import _kernels
    buf = np.empty(sys.dim)
    return np.array(_kernels.hmatvec(np.ascontiguousarray(x), diag,
                                     0.5 * sys.omega, buf), copy=True)


def reduced_density_matrix(psi, part, region):
    """rho_region = Tr_complement |psi><psi|.

    ``region`` is a string of partition labels (e.g. "A" or "AB"); the traced
    matrix is indexed by the kept atoms in ascending atom order (bit j of the
    row index = j-th kept atom).
    """
    keep = part.atoms_of(region)
    return rdm_from_atoms(psi, keep)


def rdm_from_atoms(psi, keep_atoms):
    n = psi.n_atoms
    keep = sorted(keep_atoms)
    if not keep or len(keep) == n:
        raise ParameterError(
            f"region must be a nonempty proper subset, got {len(keep)}/{n} atoms")
    rest = [k for k in range(n) if k not in set(keep)]
    # axis j of the reshaped tensor corresponds to bit n-1-j
    perm = [n - 1 - k for k in reversed(keep)] + [n - 1 - k for k in reversed(rest)]
    m = psi.amplitudes.reshape([2] * n).transpose(perm).reshape(
        1 << len(keep), 1 << len(rest))
    rho = m @ m.conj().T
    return ReducedDensityMatrix(region_atoms=tuple(keep), rho=rho)


def von_neumann_entropy(rho):
    """-sum lambda ln lambda in nats; eigenvalues <= EIG_FLOOR contribute 0."""
    mat = rho.rho if isinstance(rho, ReducedDensityMatrix) else rho
    vals = np.linalg.eigvalsh(mat)
    vals = vals[vals > EIG_FLOOR]
    return float(-(vals * np.log(vals)).sum())


def entanglement_entropy(psi, part, region):
    """Convenience: S^vN of reduced_density_matrix(psi, part, region)."""
    return von_neumann_entropy(reduced_density_matrix(psi, part, region))


def scan_heatmap(delta_over_omega_values, rb_over_a_values, n_rungs,
                 observables, a=4.1, c6=lattice.C6_DEFAULT, aspect_ratio=2.0,
                 partition=None, partition4=None, filter_p_min=0.0):
    """Grid scan of entanglement observables over (delta/omega, rb/a).

    Returns {observable: 2-D array}, rows = delta_over_omega values, columns
    = rb_over_a values. Known observables: "s_vn", "i_ab", "ratio",
    "weak_vn", "weak_mi". Grid points where the solver fails are recorded as
    NaN rather than aborting the scan.
    """
    from . import infoflow
    from .dist import ProbDist

    dov = np.asarray(delta_over_omega_values, dtype=float)
    rba = np.asarray(rb_over_a_values, dtype=float)
    if partition is None:
        partition = infoflow.half_cut(n_rungs)
    needs4 = any(obs in ("weak_vn", "weak_mi") for obs in observables)
    if needs4 and partition4 is None:
        partition4 = infoflow.four_block(n_rungs)
    out = {obs: np.full((len(dov), len(rba)), np.nan) for obs in observables}
    for i, d in enumerate(dov):
        for j, r in enumerate(rba):
            sys = lattice.build_system(
                n_rungs, a=a, rb_over_a=float(r), delta_over_omega=float(d),
                c6=c6, aspect_ratio=aspect_ratio)
            try:
                _, psi = ground_state(sys)
            except SolverError:
                continue  # leave NaN, keep scanning
            dist = ProbDist.from_state(psi)
            if filter_p_min > 0.0:
                dist = infoflow.filter_dist(dist, filter_p_min)
            cell = {}
            if {"s_vn", "ratio"} & set(observables):
                cell["s_vn"] = entanglement_entropy(psi, partition, "A")
            if {"i_ab", "ratio"} & set(observables):
                cell["i_ab"] = infoflow.mutual_information(dist, partition)
            if "ratio" in observables:
                s = cell["s_vn"]
                cell["ratio"] = cell["i_ab"] / s if s > 1e-12 else np.nan
            if "weak_vn" in observables:
                cell["weak_vn"] = infoflow.weak_monotonicity_vn(psi, partition4)
            if "weak_mi" in observables:
                cell["weak_mi"] = infoflow.weak_monotonicity_mi(dist, partition4)
            for obs in observables:
                out[obs][i, j] = cell[obs]
    return out
