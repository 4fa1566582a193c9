"""Time-dependent ramp schedules and first-order Trotter evolution.

One Trotter step at time t_j applies the diagonal phase exp(-i H_n(t_j) dt)
followed by the Rabi term exp(-i H_Omega(t_j) dt), the latter as a product
of commuting single-atom x-rotations with half-angle Omega(t_j)*dt/2. The
schedule is sampled at the start of each step; the split is first-order
accurate either way, this ordering is fixed for determinism.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels, lattice
from .errors import ParameterError, SolverError
from .spectrum import PureState, basis_state, ground_state

DEFAULT_DT = 0.02            # us, the step used in the reference runs
DEFAULT_CHECKPOINT_EVERY = 25  # steps => every 0.5 us at the default dt


@dataclass(frozen=True)
class RampSchedule:
    """Piecewise-linear Omega(t) and Delta(t) breakpoint lists (t in us)."""

    omega_points: tuple   # ((t, rad/us), ...)
    delta_points: tuple
    t_final: float

    def __post_init__(self):
        for name, pts in (("omega", self.omega_points), ("delta", self.delta_points)):
            ts = [t for t, _ in pts]
            if ts != sorted(set(ts)):
                raise ParameterError(f"{name} breakpoints must strictly increase")
            if ts[0] != 0.0 or abs(ts[-1] - self.t_final) > 1e-12:
                raise ParameterError(f"{name} breakpoints must span [0, t_final]")

    def omega_at(self, t):
        ts, vs = zip(*self.omega_points)
        return float(np.interp(t, ts, vs))

    def delta_at(self, t):
        ts, vs = zip(*self.delta_points)
        return float(np.interp(t, ts, vs))


def schedule_standard(kind, omega_max, delta_max):
    """The three trapezoidal rampup profiles used in the reference study.

    "ramp4us":          Omega 0 -> max by 0.5 us, flat to 3.95, off at 4.0;
                        Delta held at -max until 0.5, linear to +max at 3.95.
    "ramp4us_modified": Omega rise stretched to 1 us; Delta starts at -max/2.
    "ramp12us":         the 4 us profile with the flat top extended to 11.95.
    """
    if omega_max <= 0 or delta_max <= 0:
        raise ParameterError("omega_max and delta_max must be positive")
    if kind == "ramp4us":
        return RampSchedule(
            omega_points=((0.0, 0.0), (0.5, omega_max), (3.95, omega_max), (4.0, 0.0)),
            delta_points=((0.0, -delta_max), (0.5, -delta_max),
                          (3.95, delta_max), (4.0, delta_max)),
            t_final=4.0)
    if kind == "ramp4us_modified":
        return RampSchedule(
            omega_points=((0.0, 0.0), (1.0, omega_max), (3.95, omega_max), (4.0, 0.0)),
            delta_points=((0.0, -0.5 * delta_max), (1.0, -0.5 * delta_max),
                          (3.95, delta_max), (4.0, delta_max)),
            t_final=4.0)
    if kind == "ramp12us":
        return RampSchedule(
            omega_points=((0.0, 0.0), (0.5, omega_max), (11.95, omega_max), (12.0, 0.0)),
            delta_points=((0.0, -delta_max), (0.5, -delta_max),
                          (11.95, delta_max), (12.0, delta_max)),
            t_final=12.0)
    raise ParameterError(f"unknown schedule kind {kind!r}")


@dataclass(frozen=True)
class EvolutionResult:
    psi_final: PureState
    checkpoints: tuple    # ((t, fidelity), ...); fidelity NaN if solver failed
    dt: float


def _n_steps(t_final, dt):
    n = int(round(t_final / dt))
    if n < 1 or abs(n * dt - t_final) > 1e-9 * max(1.0, t_final):
        raise ParameterError(f"dt = {dt} does not divide t_final = {t_final}")
    return n


def _checkpoint_fidelity(sys, omega, delta, psi):
    inst = replace(sys, omega=omega, delta=delta)
    try:
        _, gs = ground_state(inst)
    except SolverError:
        return float("nan")
    return float(abs(np.vdot(gs.amplitudes, psi)) ** 2)


def trotter_evolve(sys, sched, dt=DEFAULT_DT, psi0=None,
                   checkpoint_every=DEFAULT_CHECKPOINT_EVERY):
    """First-order Trotter evolution of psi0 under the schedule.

    The geometry and c6 of ``sys`` fix the interaction part; Omega and Delta
    come from the schedule. Checkpoints (including t = 0 and t_final) record
    the squared overlap with the instantaneous ground state;
    checkpoint_every=None disables them entirely.
    """
    n_steps = _n_steps(sched.t_final, dt)
    if psi0 is None:
        psi0 = basis_state(sys.n_atoms)
    psi = np.ascontiguousarray(psi0.amplitudes, dtype=np.complex128).copy()
    pop, vdiag = lattice.diagonal_parts(sys)
    pop = pop.astype(np.float64)

    checkpoints = []
    if checkpoint_every is not None:
        checkpoints.append((0.0, _checkpoint_fidelity(
            sys, sched.omega_at(0.0), sched.delta_at(0.0), psi)))
    for j in range(n_steps):
        t_j = j * dt
        diag = vdiag - sched.delta_at(t_j) * pop
        _kernels.apply_phases(psi, np.exp(-1j * dt * diag))
        theta_half = 0.5 * sched.omega_at(t_j) * dt
        if theta_half != 0.0:
            _kernels.x_rotation_all(psi, np.cos(theta_half), np.sin(theta_half),
                                    sys.n_atoms)
        done = j + 1
        if checkpoint_every is not None and (done % checkpoint_every == 0
                                             or done == n_steps):
            t = done * dt
            checkpoints.append((t, _checkpoint_fidelity(
                sys, sched.omega_at(t), sched.delta_at(t), psi)))

    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > 1e-8:
        raise SolverError(f"evolution lost normalization: |psi| = {norm!r}")
    final = PureState(amplitudes=psi, n_atoms=sys.n_atoms)
    return EvolutionResult(psi_final=final, checkpoints=tuple(checkpoints), dt=dt)


def target_fidelity(sys, psi, tol=1e-10):
    """Squared overlap with the working-point ground state of ``sys``.

    The end of a rampup schedule switches the drive off, where the classical
    ground state is often exactly degenerate (leg swap), so the instantaneous
    checkpoint there is flagged NaN. The quantity to compare schedules by is
    the overlap with the gapped target state the ramp was aiming for: the
    ground state at (omega, delta) of ``sys`` itself.
    """
    _, gs = ground_state(sys, tol=tol)
    return float(abs(np.vdot(gs.amplitudes, psi.amplitudes)) ** 2)


def rampdown_evolve(sys, psi_gs, ramp_time, dt=None):
    """Switch the drive off linearly over ramp_time, holding Delta and V.

    Models the measurement-preceding Omega rampdown; at ramp_time = 0 the
    state is returned unchanged. dt defaults to ramp_time/20.
    """
    if ramp_time < 0:
        raise ParameterError(f"ramp_time must be >= 0, got {ramp_time}")
    if ramp_time == 0.0 or sys.omega == 0.0:
        # with the drive already off, the remaining evolution is a pure
        # diagonal phase and cannot change any probability
        return psi_gs
    if dt is None:
        dt = ramp_time / 20.0
    sched = RampSchedule(
        omega_points=((0.0, sys.omega), (ramp_time, 0.0)),
        delta_points=((0.0, sys.delta), (ramp_time, sys.delta)),
        t_final=ramp_time)
    result = trotter_evolve(sys, sched, dt=dt, psi0=psi_gs,
                            checkpoint_every=None)
    return result.psi_final
