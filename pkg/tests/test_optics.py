import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symbell.fock import apply_transfer, compose, inner_product, make_state, mode
from symbell.optics import DelayModel, bs, circulator_exchange, delay, hwp, pbs, ring_exchange

R2 = 1 / math.sqrt(2)


def _unitarity(t):
    u = t.matrix
    return np.abs(u.conj().T @ u - np.eye(u.shape[1])).max()


class TestPbs:
    def test_transmits_h_reflects_v_with_i(self):
        t = pbs("a", "_a", "c", "d")
        assert t.image(mode("a", "H")) == {mode("c", "H"): 1}
        assert t.image(mode("a", "V")) == {mode("d", "V"): 1j}
        t2 = pbs("b", "_b", "f", "e")
        assert t2.image(mode("b", "V")) == {mode("e", "V"): 1j}

    def test_two_reflections_flip_sign(self):
        t = compose([pbs("a", "_a", "c", "d"), pbs("b", "_b", "f", "e")])
        out = apply_transfer(make_state([({mode("a", "V"): 1, mode("b", "V"): 1}, 1)]), t)
        assert out.amplitude({mode("d", "V"): 1, mode("e", "V"): 1}) == pytest.approx(-1)

    def test_unitary(self):
        assert _unitarity(pbs("a", "b", "c", "d")) < 1e-15

    def test_label_collision(self):
        with pytest.raises(ValueError, match="collision"):
            pbs("a", "b", "a", "d")


class TestHwp:
    def test_22_5_degrees(self):
        t = hwp(22.5, "g")
        img = t.image(mode("g", "H"))
        assert img[mode("g", "H")] == pytest.approx(R2)
        assert img[mode("g", "V")] == pytest.approx(R2)
        img = t.image(mode("g", "V"))
        assert img[mode("g", "H")] == pytest.approx(R2)
        assert img[mode("g", "V")] == pytest.approx(-R2)

    def test_45_degrees_swaps(self):
        t = hwp(45, "d")
        assert t.image(mode("d", "V")) == pytest.approx({mode("d", "H"): 1})
        assert t.image(mode("d", "H")) == pytest.approx({mode("d", "V"): 1})

    def test_zero_degrees(self):
        t = hwp(0, "a")
        assert t.image(mode("a", "H")) == {mode("a", "H"): 1}
        assert t.image(mode("a", "V")) == {mode("a", "V"): -1}

    def test_acts_on_every_bin(self):
        t = hwp(45, "a")
        assert t.image(mode("a", "H", 1)) == pytest.approx({mode("a", "V", 1): 1})

    @settings(max_examples=50, deadline=None)
    @given(st.floats(-360, 360, allow_nan=False))
    def test_involution(self, theta):
        t = hwp(theta, "x")
        assert np.abs(t.matrix @ t.matrix - np.eye(4)).max() < 1e-12
        assert _unitarity(t) < 1e-12


class TestBs:
    def test_convention(self):
        img = bs("a", "b", "u", "v").image(mode("a", "H"))
        assert img[mode("u", "H")] == pytest.approx(R2)
        assert img[mode("v", "H")] == pytest.approx(1j * R2)

    def test_unitary(self):
        assert _unitarity(bs("a", "b", "u", "v")) < 1e-15

    def test_no_coincidences_for_identical_photons(self):
        for p in ("H", "V"):
            s = make_state([({mode("a", p): 1, mode("b", p): 1}, 1)])
            out = apply_transfer(s, bs("a", "b", "u", "v"))
            assert out.amplitude({mode("u", p): 1, mode("v", p): 1}) == pytest.approx(0, abs=1e-15)
            # (i/2)(u^2 + v^2) with sqrt(2) from the factorial convention
            assert out.amplitude({mode("u", p): 2}) == pytest.approx(1j * R2)


class TestCirculator:
    def test_swaps_v_paths(self):
        t = circulator_exchange("d", "e")
        assert t.image(mode("d", "V")) == {mode("e", "V"): 1}
        assert t.image(mode("e", "V")) == {mode("d", "V"): 1}

    def test_double_application_is_identity(self):
        t = compose([circulator_exchange("d", "e"), circulator_exchange("d", "e")])
        for m in t.modes_in:
            assert t.image(m) == {m: 1}

    def test_symmetric_state_unchanged(self):
        s = make_state(
            [({mode("c", "H"): 1, mode("f", "H"): 1}, R2), ({mode("d", "V"): 1, mode("e", "V"): 1}, -R2)]
        )
        out = apply_transfer(s, circulator_exchange("d", "e"))
        assert out.amplitudes == pytest.approx(s.amplitudes)

    def test_ring_of_three(self):
        t = ring_exchange(["x", "y", "z"])
        assert t.image(mode("z", "V")) == {mode("x", "V"): 1}

    def test_same_path_rejected(self):
        with pytest.raises(ValueError):
            circulator_exchange("d", "d")


class TestDelay:
    def test_gaussian_overlap(self):
        m = DelayModel(delay=0.1, coherence_length=0.085)
        assert m.overlap == pytest.approx(math.exp(-0.01 / (2 * 0.085**2)))
        assert DelayModel(0.0, 0.3).overlap == 1.0

    def test_overlap_monotone_in_abs_delay(self):
        vals = [DelayModel(l, 0.2).overlap for l in np.linspace(0, 1, 21)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert DelayModel(-0.3, 0.2).overlap == DelayModel(0.3, 0.2).overlap

    def test_zero_delay_is_identity_on_occupied_modes(self):
        t = delay(DelayModel(0.0, 0.1), "b")
        assert t.image(mode("b", "H")) == {mode("b", "H"): 1}

    def test_far_delay_moves_to_bin_one(self):
        t = delay(DelayModel(50.0, 0.1), "b")
        assert t.image(mode("b", "V")) == pytest.approx({mode("b", "V", 1): 1})

    def test_isometry(self):
        assert _unitarity(delay(0.37, "b")) < 1e-12

    def test_overlap_out_of_range(self):
        with pytest.raises(ValueError):
            delay(1.2, "b")
        with pytest.raises(ValueError):
            DelayModel.from_overlap(-0.1)

    @pytest.mark.parametrize("gamma", [0.0, 0.5, 0.9, 1.0])
    def test_inner_product_is_gamma(self, gamma):
        s = make_state([({mode("b", "H"): 1}, 1)])
        assert inner_product(s, apply_transfer(s, delay(gamma, "b"))) == pytest.approx(gamma)
