import numpy as np
import pytest

import rydladder as ryd

# reference operating point: R_b/a = 2.35, delta/omega = 3.5, a = 4.1 um
REFERENCE_SIZES = (6, 8, 10)

_acceptance_log = []


def record_acceptance(criterion, ok, detail):
    _acceptance_log.append((criterion, ok, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_log:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in sorted(_acceptance_log):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {criterion}: {detail}")


@pytest.fixture(scope="session")
def ground_states():
    """Ground states of the reference systems, solved once per session."""
    states = {}
    for n in REFERENCE_SIZES:
        sys = ryd.build_system(n)
        energy, psi = ryd.ground_state(sys)
        states[n] = (sys, energy, psi)
    return states


@pytest.fixture(scope="session")
def exact_dists(ground_states):
    return {n: ryd.ProbDist.from_state(psi)
            for n, (_, _, psi) in ground_states.items()}


@pytest.fixture(scope="session")
def psi6(ground_states):
    return ground_states[6][2]


@pytest.fixture(scope="session")
def dist6(exact_dists):
    return exact_dists[6]


def random_state(n_atoms, seed):
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(1 << n_atoms) + 1j * rng.standard_normal(1 << n_atoms)
    amps /= np.linalg.norm(amps)
    return ryd.PureState(amplitudes=amps, n_atoms=n_atoms)
