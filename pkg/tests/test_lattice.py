import numpy as np
import pytest

from rydladder import lattice
from rydladder.errors import DimensionMismatchError, ParameterError

TWO_PI = 2.0 * np.pi


def test_build_system_reference_omega():
    # operating point quoted for R_b/a = 2.35 at a = 4.1 um
    sys = lattice.build_system(6, a=4.1, rb_over_a=2.35, delta_over_omega=3.5)
    assert sys.omega == pytest.approx(TWO_PI * 1.078224, rel=1e-9)
    assert sys.delta == pytest.approx(3.5 * sys.omega, rel=1e-12)
    assert sys.n_atoms == 12


def test_build_system_unit_blockade():
    sys = lattice.build_system(2, a=1.0, rb_over_a=1.0, delta_over_omega=1.0, c6=7.7)
    assert sys.omega == pytest.approx(7.7, rel=1e-12)


def test_default_c6_round_trip():
    # c6 back-derived from the quoted omega: c6 = omega * (2.35*4.1)^6
    sys = lattice.build_system(2, a=4.1, rb_over_a=2.35)
    assert sys.c6 == pytest.approx(sys.omega * sys.blockade_radius ** 6, rel=1e-12)
    assert sys.blockade_radius == pytest.approx(2.35 * 4.1, rel=1e-6)
    assert lattice.C6_DEFAULT == pytest.approx(
        TWO_PI * 1.078224 * (2.35 * 4.1) ** 6, rel=1e-12)


def test_build_system_rejects_bad_parameters():
    with pytest.raises(ParameterError):
        lattice.build_system(0)
    with pytest.raises(ParameterError):
        lattice.build_system(4, a=-1.0)
    with pytest.raises(ParameterError):
        lattice.build_system(4, rb_over_a=0.5)
    with pytest.raises(ParameterError):
        lattice.build_system(4, c6=0.0)


def test_positions_rung_major():
    sys = lattice.build_system(3, a=2.0)
    pos = sys.positions()
    # atom k = 2*rung + leg; legs separated by aspect_ratio * a = 4.0
    np.testing.assert_allclose(pos[0], [0.0, 0.0])
    np.testing.assert_allclose(pos[1], [0.0, 4.0])
    np.testing.assert_allclose(pos[4], [4.0, 0.0])
    np.testing.assert_allclose(pos[5], [4.0, 4.0])


def test_interaction_values():
    sys = lattice.build_system(3, a=4.1, rb_over_a=2.35)
    v = lattice.interaction_table(sys).v
    # same rung: r = 2a
    assert v[0, 1] == pytest.approx(sys.omega * (2.35 / 2.0) ** 6, rel=1e-12)
    # adjacent same leg: r = a
    assert v[0, 2] == pytest.approx(sys.omega * 2.35 ** 6, rel=1e-12)
    # diagonal: r = a * sqrt(5)
    assert v[0, 3] == pytest.approx(sys.omega * (2.35 / np.sqrt(5.0)) ** 6, rel=1e-12)
    assert np.all(np.diag(v) == 0.0)
    np.testing.assert_allclose(v, v.T, rtol=0, atol=0)


def test_interaction_symmetries():
    # left-right reflection (rung i <-> n-1-i) and leg swap leave v invariant
    sys = lattice.build_system(4)
    v = lattice.interaction_table(sys).v
    n = sys.n_rungs

    def reflect(k):
        rung, leg = divmod(k, 2)
        return 2 * (n - 1 - rung) + leg

    def legswap(k):
        rung, leg = divmod(k, 2)
        return 2 * rung + (1 - leg)

    for mapping in (reflect, legswap):
        perm = [mapping(k) for k in range(sys.n_atoms)]
        np.testing.assert_allclose(v, v[np.ix_(perm, perm)], rtol=0, atol=1e-12)


def test_interaction_cutoff_option():
    sys = lattice.build_system(4, a=4.1)
    v = lattice.interaction_table(sys, cutoff_radius=4.5).v
    assert v[0, 2] > 0.0          # r = a kept
    assert v[0, 1] == 0.0         # r = 2a removed
    full = lattice.interaction_table(sys).v
    assert np.all(full > 0.0) or np.all(full[np.triu_indices(8, 1)] > 0.0)


def test_apply_hamiltonian_zero_omega_vacuum():
    sys = lattice.LadderSystem(n_rungs=2, a=4.1, omega=0.0, delta=3.0)
    psi = np.zeros(16)
    psi[0] = 1.0
    np.testing.assert_allclose(lattice.apply_hamiltonian(sys, psi), 0.0, atol=0)


def test_apply_hamiltonian_zero_omega_diagonal():
    sys = lattice.LadderSystem(n_rungs=2, a=4.1, omega=0.0, delta=3.0)
    v = lattice.interaction_table(sys).v
    for state in (0b0011, 0b0101, 0b1111):
        psi = np.zeros(16)
        psi[state] = 1.0
        bits = [k for k in range(4) if state >> k & 1]
        energy = -3.0 * len(bits) + sum(v[i, j] for i in bits for j in bits if i < j)
        out = lattice.apply_hamiltonian(sys, psi)
        assert out[state] == pytest.approx(energy, rel=1e-12)


def test_hermiticity_random_vectors():
    sys = lattice.build_system(3, rb_over_a=1.7, delta_over_omega=2.0)
    rng = np.random.default_rng(8)
    for _ in range(5):
        phi = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        psi = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        lhs = np.vdot(phi, lattice.apply_hamiltonian(sys, psi))
        rhs = np.conj(np.vdot(psi, lattice.apply_hamiltonian(sys, phi)))
        assert abs(lhs - rhs) / max(abs(lhs), 1.0) < 1e-10


@pytest.mark.parametrize("n_rungs,seed", [(2, 0), (4, 1), (6, 2)])
def test_apply_matches_dense_bruteforce(n_rungs, seed):
    # O(4^N) dense construction by looping matrix entries, fully independent
    rng = np.random.default_rng(seed)
    sys = lattice.build_system(n_rungs, rb_over_a=1.0 + 2.0 * rng.random(),
                               delta_over_omega=4.0 * rng.random() - 1.0)
    n = sys.n_atoms
    dim = 1 << n
    v = lattice.interaction_table(sys).v
    h = np.zeros((dim, dim))
    for s in range(dim):
        bits = [(s >> k) & 1 for k in range(n)]
        h[s, s] = (-sys.delta * sum(bits)
                   + sum(v[i, j] for i in range(n) for j in range(i + 1, n)
                         if bits[i] and bits[j]))
        for k in range(n):
            h[s ^ (1 << k), s] += 0.5 * sys.omega
    psi = rng.standard_normal(dim)
    np.testing.assert_allclose(lattice.apply_hamiltonian(sys, psi), h @ psi,
                               rtol=0, atol=1e-12 * dim)


def test_dimension_mismatch():
    sys = lattice.build_system(2)
    with pytest.raises(DimensionMismatchError):
        lattice.apply_hamiltonian(sys, np.zeros(7))
