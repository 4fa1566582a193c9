import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import rydladder as ryd
from rydladder import infoflow, spectrum
from rydladder.dist import ProbDist
from rydladder.errors import EmptyDistributionError, FitError, ParameterError


def make_dist(mapping, n_atoms=2):
    return ProbDist.from_mapping(mapping, n_atoms)


AB = ryd.Partition("AB")


class TestPartition:
    def test_paper_string(self):
        part = ryd.Partition("DDAABBCCDD")
        assert part.n_atoms == 10
        assert part.classes == ["A", "B", "C", "D"]
        assert part.atoms_of("A") == (2, 3)
        assert part.atoms_of("D") == (0, 1, 8, 9)
        assert part.atoms_of("AB") == (2, 3, 4, 5)

    def test_half_cut(self):
        assert ryd.half_cut(6).labels == "AAAAAABBBBBB"
        assert ryd.half_cut(5).labels == "AAAABBBBBB"

    def test_four_block(self):
        assert ryd.four_block(4).labels == "AABBCCDD"
        assert ryd.four_block(5).labels == "AAAABBCCDD"

    def test_validation(self):
        with pytest.raises(ParameterError):
            ryd.Partition("")
        with pytest.raises(ParameterError):
            ryd.Partition("AB").atoms_of("C")
        with pytest.raises(ParameterError):
            ryd.Partition("ABC").require_classes(2)


class TestEntropies:
    def test_shannon_uniform(self):
        d = make_dist({s: 0.25 for s in range(4)})
        assert ryd.shannon_entropy(d) == pytest.approx(np.log(4.0), abs=1e-12)

    def test_shannon_point_mass(self):
        assert ryd.shannon_entropy(make_dist({3: 1.0})) == 0.0

    def test_shannon_hand_value(self):
        d = make_dist({0: 0.5, 1: 0.25, 2: 0.25})
        expected = 0.5 * np.log(2.0) + 0.5 * np.log(4.0)  # 1.0397
        assert ryd.shannon_entropy(d) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(1.0397, abs=5e-5)

    def test_marginal_product_dist(self):
        # p = q_A x q_B with q_A = {0: 0.7, 1: 0.3}, q_B = {0: 0.4, 1: 0.6}
        qa, qb = {0: 0.7, 1: 0.3}, {0: 0.4, 1: 0.6}
        joint = {(b << 1) | a: qa[a] * qb[b] for a in qa for b in qb}
        d = make_dist(joint)
        marg = ryd.marginal(d, AB, "A")
        assert marg.as_dict()[0] == pytest.approx(0.7, abs=1e-12)
        assert marg.as_dict()[1] == pytest.approx(0.3, abs=1e-12)

    def test_marginal_correlated_pair(self):
        d = make_dist({0b00: 0.5, 0b11: 0.5})
        marg = ryd.marginal(d, AB, "A")
        assert marg.as_dict() == {0: 0.5, 1: 0.5}

    def test_marginal_matches_rdm_diagonal(self, psi6, dist6):
        # cross-module oracle: marginal of the joint = diagonal of rho_A
        part = ryd.half_cut(6)
        marg = ryd.marginal(dist6, part, "A")
        rho = spectrum.reduced_density_matrix(psi6, part, "A")
        diag = np.real(np.diag(rho.rho))
        full = np.zeros(64)
        full[marg.states] = marg.probs
        np.testing.assert_allclose(full, diag, atol=1e-10)

    def test_mutual_information_product_is_zero(self):
        qa, qb = {0: 0.7, 1: 0.3}, {0: 0.4, 1: 0.6}
        joint = {(b << 1) | a: qa[a] * qb[b] for a in qa for b in qb}
        assert ryd.mutual_information(make_dist(joint), AB) == pytest.approx(0.0, abs=1e-12)

    def test_mutual_information_correlated_pair(self):
        d = make_dist({0b00: 0.5, 0b11: 0.5})
        assert ryd.mutual_information(d, AB) == pytest.approx(np.log(2.0), abs=1e-12)

    def test_mutual_information_bounded_by_entropy(self, psi6, dist6):
        part = ryd.half_cut(6)
        i_x = ryd.mutual_information(dist6, part)
        s_vn = spectrum.entanglement_entropy(psi6, part, "A")
        assert 0.0 < i_x <= s_vn + 1e-9

    def test_conditional_entropy_perfectly_correlated(self):
        d = make_dist({0b00: 0.5, 0b11: 0.5})
        assert ryd.conditional_entropy(d, AB) == pytest.approx(0.0, abs=1e-12)

    def test_conditional_entropy_product(self):
        qa, qb = {0: 0.7, 1: 0.3}, {0: 0.4, 1: 0.6}
        joint = {(b << 1) | a: qa[a] * qb[b] for a in qa for b in qb}
        s_a = -(0.7 * np.log(0.7) + 0.3 * np.log(0.3))
        assert ryd.conditional_entropy(make_dist(joint), AB) == pytest.approx(s_a, abs=1e-12)

    def test_conditional_entropy_hand_value(self):
        # S_AB = -(0.8 ln 0.4 + 0.2 ln 0.1) = 1.193550, S_B = ln 2
        d = make_dist({0b00: 0.4, 0b01: 0.1, 0b10: 0.1, 0b11: 0.4})
        expected = 1.1935496040981333 - np.log(2.0)
        assert ryd.conditional_entropy(d, AB) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.5004024, abs=1e-6)


class TestFilter:
    def test_identity_at_zero(self):
        d = make_dist({0: 0.5, 1: 0.5})
        assert ryd.filter_dist(d, 0.0) is d

    def test_hand_renormalization(self):
        d = make_dist({0: 0.5, 1: 0.3, 2: 0.2})
        f = ryd.filter_dist(d, 0.25)
        assert f.as_dict()[0] == pytest.approx(0.625, abs=1e-12)
        assert f.as_dict()[1] == pytest.approx(0.375, abs=1e-12)
        assert 2 not in f.as_dict()

    def test_above_max_raises(self):
        d = make_dist({0: 0.6, 1: 0.4})
        with pytest.raises(EmptyDistributionError):
            ryd.filter_dist(d, 0.7)

    def test_noop_at_smallest_present(self):
        # strict inequality: thresholding at an observed value keeps it
        d = make_dist({0: 0.5, 1: 0.3, 2: 0.2})
        f = ryd.filter_dist(d, 0.2)
        assert len(f) == 3
        np.testing.assert_allclose(f.probs, d.probs, atol=1e-15)

    def test_domain(self):
        d = make_dist({0: 1.0})
        with pytest.raises(ParameterError):
            ryd.filter_dist(d, -0.1)
        with pytest.raises(ParameterError):
            ryd.filter_dist(d, 1.0)


class TestFiltrationCurve:
    def test_zero_grid_gives_unfiltered(self, dist6):
        part = ryd.half_cut(6)
        curve = ryd.filtration_curve(dist6, part, [0.0])
        assert curve.i_ab[0] == pytest.approx(ryd.mutual_information(dist6, part), abs=1e-12)
        assert curve.s_cond[0] == pytest.approx(ryd.conditional_entropy(dist6, part), abs=1e-12)
        assert curve.survivors[0] == len(dist6)

    def test_survivors_monotone(self, dist6):
        part = ryd.half_cut(6)
        grid = infoflow.default_threshold_grid(dist6)
        curve = ryd.filtration_curve(dist6, part, grid)
        assert np.all(np.diff(curve.survivors) <= 0)

    def test_invalid_thresholds_flagged(self):
        d = make_dist({0: 0.6, 1: 0.4})
        curve = ryd.filtration_curve(d, AB, [0.0, 0.5, 0.9])
        assert curve.survivors.tolist() == [2, 1, 0]
        assert np.isnan(curve.i_ab[2]) and np.isnan(curve.s_cond[2])

    def test_unsorted_grid_rejected(self, dist6):
        with pytest.raises(ParameterError):
            ryd.filtration_curve(dist6, ryd.half_cut(6), [0.1, 0.0])


def synthetic_tanh_curve(x0=-2.0, width=0.8, amplitude=1.4, offset=0.0):
    thresholds = np.concatenate(([0.0], np.geomspace(1e-5, 1e-1, 40)))
    x = np.log10(np.where(thresholds > 0, thresholds, 1e-300))
    s_cond = offset + 0.5 * amplitude * (1.0 - np.tanh((x - x0) / width))
    s_cond[0] = offset + amplitude  # p_min = 0: unfiltered plateau value
    return infoflow.FiltrationCurve(
        thresholds=thresholds, i_ab=np.zeros_like(thresholds),
        s_cond=s_cond, survivors=np.arange(len(thresholds), 0, -1))


class TestThresholdFinders:
    def test_sigmoid_recovers_synthetic(self):
        fit = ryd.sigmoid_inflection(synthetic_tanh_curve(x0=-2.0))
        assert fit["p_star"] == pytest.approx(1e-2, rel=1e-6)
        assert fit["width"] == pytest.approx(0.8, rel=1e-4)

    def test_midheight_close_to_sigmoid_on_synthetic(self):
        # tanh is symmetric: its mid-height is its inflection
        curve = synthetic_tanh_curve(x0=-2.5)
        sig = ryd.sigmoid_inflection(curve)
        mid = ryd.mid_height_threshold(curve)
        assert np.log10(mid["p_star"]) == pytest.approx(np.log10(sig["p_star"]), abs=0.15)

    def test_midheight_flat_zero_curve_errors(self):
        curve = infoflow.FiltrationCurve(
            thresholds=np.array([0.0, 0.1]), i_ab=np.zeros(2),
            s_cond=np.zeros(2), survivors=np.array([4, 2]))
        with pytest.raises(FitError):
            ryd.mid_height_threshold(curve)

    def test_midheight_never_crossing_errors(self):
        curve = infoflow.FiltrationCurve(
            thresholds=np.array([0.0, 0.01, 0.1]), i_ab=np.zeros(3),
            s_cond=np.array([1.0, 0.9, 0.8]), survivors=np.array([4, 3, 2]))
        with pytest.raises(FitError):
            ryd.mid_height_threshold(curve)

    def test_sigmoid_needs_points(self):
        curve = infoflow.FiltrationCurve(
            thresholds=np.array([0.0, 0.01]), i_ab=np.zeros(2),
            s_cond=np.array([1.0, 0.5]), survivors=np.array([4, 2]))
        with pytest.raises(FitError):
            ryd.sigmoid_inflection(curve)


class TestEstimator:
    def test_product_dist_unfiltered_zero(self):
        qa, qb = {0: 0.7, 1: 0.3}, {0: 0.4, 1: 0.6}
        joint = {(b << 1) | a: qa[a] * qb[b] for a in qa for b in qb}
        est = ryd.estimate_entanglement(make_dist(joint), AB)
        assert est.method == "unfiltered"
        assert est.estimate == pytest.approx(0.0, abs=1e-12)

    def test_reference_six_rungs(self, psi6, dist6):
        part = ryd.half_cut(6)
        est = ryd.estimate_entanglement(dist6, part)
        s_vn = spectrum.entanglement_entropy(psi6, part, "A")
        assert est.method == "sigmoid"
        assert est.estimate > est.i_unfiltered        # filtering raised the bound
        assert abs(est.estimate - s_vn) < 0.05        # close to the true entropy

    def test_flat_curve_falls_back_to_unfiltered(self):
        # a Bell-like distribution: every threshold keeps both strings, the
        # conditional entropy never halves, and the initial I is the answer
        d = make_dist({0b00: 0.5, 0b11: 0.5})
        est = ryd.estimate_entanglement(d, AB)
        assert est.method == "unfiltered"
        assert est.estimate == pytest.approx(np.log(2.0), abs=1e-12)

    def test_relabel_invariance_symmetric_cut(self, dist6):
        part = ryd.half_cut(6)
        flipped = ryd.Partition(part.labels.translate(str.maketrans("AB", "BA")))
        a = ryd.estimate_entanglement(dist6, part)
        b = ryd.estimate_entanglement(dist6, flipped)
        assert a.estimate == pytest.approx(b.estimate, abs=1e-9)


class TestWeakMonotonicity:
    def test_product_state_vn_zero(self):
        psi = spectrum.basis_state(4, 0b0110)
        part = ryd.Partition("ABCD")
        assert ryd.weak_monotonicity_vn(psi, part) == pytest.approx(0.0, abs=1e-10)

    def test_bell_pair_locality(self):
        amps = np.zeros(2 ** 5, dtype=complex)
        amps[0b00000] = amps[0b00011] = 1.0 / np.sqrt(2.0)
        psi = ryd.PureState(amplitudes=amps, n_atoms=5)
        part = ryd.Partition("AABCD")  # pair inside A
        assert ryd.weak_monotonicity_vn(psi, part) == pytest.approx(0.0, abs=1e-10)

    def test_product_dist_mi_zero(self):
        probs = {}
        for s in range(16):
            p = 1.0
            for k in range(4):
                p *= 0.8 if (s >> k) & 1 == 0 else 0.2
            probs[s] = p
        d = ProbDist.from_mapping(probs, 4)
        part = ryd.Partition("ABCD")
        assert ryd.weak_monotonicity_mi(d, part) == pytest.approx(0.0, abs=1e-12)

    def test_complement_grouping_identity(self, dist6):
        part = ryd.four_block(6)
        direct = infoflow.weak_monotonicity_mi_from_groups(dist6, part, complemented=False)
        swapped = infoflow.weak_monotonicity_mi_from_groups(dist6, part, complemented=True)
        assert direct == pytest.approx(swapped, abs=1e-12)
        assert direct == pytest.approx(ryd.weak_monotonicity_mi(dist6, part), abs=1e-10)

    def test_five_rung_paper_partition(self):
        sys = ryd.build_system(5)
        _, psi = ryd.ground_state(sys)
        part = ryd.Partition("DDAABBCCDD")
        w = ryd.weak_monotonicity_vn(psi, part)
        assert w >= -1e-9
        d = ProbDist.from_state(psi)
        filtered = ryd.filter_dist(d, 1.0 / 4000.0)
        w_mi = ryd.weak_monotonicity_mi(filtered, part)
        assert np.isfinite(w_mi)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=2, max_value=6), st.integers(min_value=0, max_value=10 ** 6))
def test_marginal_sum_consistency(n_atoms, seed):
    rng = np.random.default_rng(seed)
    n_entries = int(rng.integers(2, min(2 ** n_atoms, 12) + 1))
    states = rng.choice(2 ** n_atoms, size=n_entries, replace=False)
    probs = rng.random(n_entries) + 1e-3
    probs /= probs.sum()
    d = ProbDist(states=np.sort(states).astype(np.int64),
                 probs=probs[np.argsort(states)], n_atoms=n_atoms)
    labels = "".join(rng.choice(["A", "B"], size=n_atoms))
    if len(set(labels)) < 2:
        labels = "A" + "B" * (n_atoms - 1)
    part = ryd.Partition(labels)
    marg = ryd.marginal(d, part, "A")
    atoms = part.atoms_of("A")
    for key, p_key in marg.as_dict().items():
        total = sum(p for s, p in d.as_dict().items()
                    if sum(((s >> a) & 1) << j for j, a in enumerate(atoms)) == key)
        assert p_key == pytest.approx(total, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=2, max_value=6), st.integers(min_value=0, max_value=10 ** 6))
def test_mutual_information_nonnegative(n_atoms, seed):
    rng = np.random.default_rng(seed)
    probs = rng.random(2 ** n_atoms) ** 3 + 1e-9
    probs /= probs.sum()
    d = ProbDist(states=np.arange(2 ** n_atoms, dtype=np.int64), probs=probs,
                 n_atoms=n_atoms)
    half = n_atoms // 2
    part = ryd.Partition("A" * half + "B" * (n_atoms - half))
    assert ryd.mutual_information(d, part) >= -1e-12
