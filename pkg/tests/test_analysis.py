import numpy as np
import pytest

from symbell.analysis import concurrence, fidelity, hom_scan, qber, success_probability, visibility
from symbell.circuits import symmetric_bsm
from symbell.detection import heralded_state, simulate
from symbell.states import BELL_NAMES, bell_vector, input_state

from oracles import random_local_unitary, werner, wootters_concurrence

DELAYS = np.linspace(-0.4, 0.4, 41)


def _class_at(name, cls, gamma):
    c = symmetric_bsm(gamma)
    return simulate(input_state(name, c.inputs), c).class_probability(cls)


class TestHomScan:
    def test_phi_minus_dip_and_peak(self):
        c = symmetric_bsm()
        scan = hom_scan(c, input_state("phi-", c.inputs), DELAYS, ["D13+D24", "D14+D23"], coherence_length=0.085)
        # oracle: direct measurement at full and zero overlap
        assert _class_at("phi-", "D13+D24", 0.0) == pytest.approx(0.5)
        assert _class_at("phi-", "D13+D24", 1.0) == pytest.approx(0.0, abs=1e-15)
        assert _class_at("phi-", "D14+D23", 1.0) == pytest.approx(1.0)
        assert scan.c_far == pytest.approx({"D13+D24": 0.5, "D14+D23": 0.5})
        assert scan.c_zero == pytest.approx({"D13+D24": 0.0, "D14+D23": 1.0}, abs=1e-12)
        assert scan.kind == {"D13+D24": "dip", "D14+D23": "peak"}
        assert scan.visibility == pytest.approx({"D13+D24": 1.0, "D14+D23": 1.0}, abs=1e-10)

    def test_psi_minus_d11_peak_and_null_d24(self):
        c = symmetric_bsm()
        scan = hom_scan(c, input_state("psi-", c.inputs), DELAYS, ["D11", "D24"], coherence_length=0.085)
        assert _class_at("psi-", "D11", 0.0) == pytest.approx(1 / 8)
        assert _class_at("psi-", "D11", 1.0) == pytest.approx(1 / 4)
        assert scan.c_far["D11"] == pytest.approx(1 / 8)
        assert scan.c_zero["D11"] == pytest.approx(1 / 4)
        assert scan.visibility["D11"] == pytest.approx(1.0, abs=1e-10)
        assert np.abs(scan.series["D24"]).max() < 1e-15
        assert scan.kind["D24"] == "flat"

    def test_curves_are_even_and_bounded(self):
        c = symmetric_bsm()
        scan = hom_scan(c, input_state("phi-", c.inputs), DELAYS, ["D13+D24", "D14+D23"], coherence_length=0.1)
        for series in scan.series.values():
            assert np.abs(series - series[::-1]).max() < 1e-12
            assert series.min() >= 0 and series.max() <= 1

    def test_scan_points_match_direct_measurement(self):
        c = symmetric_bsm()
        scan = hom_scan(c, input_state("phi-", c.inputs), [0.05], ["D13+D24"], coherence_length=0.085)
        gamma = np.exp(-(0.05**2) / (2 * 0.085**2))
        assert scan.series["D13+D24"][0] == pytest.approx(_class_at("phi-", "D13+D24", gamma), abs=1e-14)

    def test_parallel_equals_serial(self):
        c = symmetric_bsm()
        s = input_state("phi-", c.inputs)
        a = hom_scan(c, s, DELAYS, ["D13+D24"], coherence_length=0.085)
        b = hom_scan(c, s, DELAYS, ["D13+D24"], coherence_length=0.085, workers=4)
        assert np.array_equal(a.series["D13+D24"], b.series["D13+D24"])

    def test_csv(self):
        c = symmetric_bsm()
        scan = hom_scan(c, input_state("phi-", c.inputs), [0.0, 0.1], ["D13+D24"])
        lines = scan.to_csv().splitlines()
        assert lines[0] == "l,class,probability" and len(lines) == 3

    def test_rejections(self):
        c = symmetric_bsm()
        s = input_state("phi-", c.inputs)
        with pytest.raises(ValueError, match="empty"):
            hom_scan(c, s, [], ["D13"])
        with pytest.raises(ValueError, match="disjoint"):
            hom_scan(c, s, [0.0], ["D13+D24", "D13"])

    def test_visibility_helper(self):
        assert visibility(0.0, 0.5) == 1.0
        assert visibility(0.75, 0.5) == pytest.approx(0.5)
        assert visibility(0.0, 0.0) == 0.0


class TestQber:
    @pytest.mark.parametrize("name", ["phi+", "phi-"])
    def test_limits(self, name):
        c = symmetric_bsm()
        s = input_state(name, c.inputs)
        assert qber(c, s) == pytest.approx(0.0, abs=1e-12)
        assert qber(c, s, gamma=0.0) == pytest.approx(0.5)

    @pytest.mark.parametrize("gamma_sq", np.linspace(0.0, 1.0, 11))
    def test_closed_form_against_direct_sweep(self, gamma_sq):
        g = np.sqrt(gamma_sq)
        c = symmetric_bsm()
        s = input_state("phi+", c.inputs)
        # oracle: read the wrong and right classes straight off the distribution
        wrong = _class_at("phi+", "D14+D23", g)
        right = _class_at("phi+", "D13+D24", g)
        assert qber(c, s, gamma=g) == pytest.approx(wrong / (wrong + right), abs=1e-12)
        assert qber(c, s, gamma=g) == pytest.approx((1 - gamma_sq) / 2, abs=1e-12)

    def test_reduced_overlap_value(self):
        c = symmetric_bsm()
        assert qber(c, input_state("phi-", c.inputs), gamma=np.sqrt(0.88)) == pytest.approx(0.06, abs=1e-12)

    def test_no_conclusive_events(self):
        c = symmetric_bsm()
        with pytest.raises(ValueError):
            qber(c, input_state("psi+", c.inputs))


def test_average_success_is_half():
    c = symmetric_bsm()
    assert success_probability(c, {n: input_state(n, c.inputs) for n in BELL_NAMES}) == pytest.approx(0.5, abs=1e-10)


class TestFidelity:
    def test_pure_and_mixed(self):
        phi = bell_vector("phi+")
        assert fidelity(np.outer(phi, phi.conj()), phi) == pytest.approx(1.0)
        for name in BELL_NAMES:
            assert fidelity(np.eye(4) / 4, bell_vector(name)) == pytest.approx(0.25)

    def test_heralded_at_reduced_overlap(self):
        g = np.sqrt(0.88)
        r = heralded_state(input_state("DD", ("a", "b")), symmetric_bsm(g))
        assert fidelity(r.rho, bell_vector("phi+")) == pytest.approx((1 + 0.88) / 2, abs=1e-12)


class TestConcurrence:
    @pytest.mark.parametrize("name", BELL_NAMES)
    def test_bell_states(self, name):
        v = bell_vector(name)
        assert concurrence(np.outer(v, v.conj())) == pytest.approx(1.0, abs=1e-12)

    def test_maximally_mixed(self):
        assert concurrence(np.eye(4) / 4) == pytest.approx(0.0, abs=1e-12)

    def test_werner(self):
        rho = werner(0.8, bell_vector("phi+"))
        assert wootters_concurrence(rho) == pytest.approx(0.7, abs=1e-10)
        assert concurrence(rho) == pytest.approx(0.7, abs=1e-10)
        for p in np.linspace(0, 1, 11):
            assert concurrence(werner(p, bell_vector("psi-"))) == pytest.approx(max(0, (3 * p - 1) / 2), abs=1e-10)

    def test_random_states_match_textbook_formula(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            rho = z @ z.conj().T
            rho /= np.trace(rho)
            assert concurrence(rho) == pytest.approx(wootters_concurrence(rho), abs=1e-9)

    def test_local_unitary_invariance(self):
        rng = np.random.default_rng(2024)
        for name in BELL_NAMES:
            v = bell_vector(name)
            rho = np.outer(v, v.conj())
            for _ in range(20):
                u = random_local_unitary(rng)
                assert abs(concurrence(u @ rho @ u.conj().T) - concurrence(rho)) < 1e-8


def test_metrics_monotone_in_overlap():
    grid = np.linspace(1.0, 0.0, 10)
    fids, concs = [], []
    for g in grid:
        r = heralded_state(input_state("DD", ("a", "b")), symmetric_bsm(g))
        fids.append(fidelity(r.rho, bell_vector("phi+")))
        concs.append(concurrence(r.rho))
    assert all(a >= b - 1e-12 for a, b in zip(fids, fids[1:]))
    assert all(a >= b - 1e-12 for a, b in zip(concs, concs[1:]))
    assert concs[0] == pytest.approx(1.0) and concs[-1] == pytest.approx(0.0, abs=1e-12)
