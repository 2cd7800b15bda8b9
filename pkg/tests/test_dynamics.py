import numpy as np
import pytest

from superbath import oracle
from superbath.dynamics import (
    branch_cut_contribution,
    detour_rule,
    exchange_coupling,
    excited_amplitude,
    pair_pole,
    two_emitter_amplitudes,
)
from superbath.errors import SingularityError
from superbath.lattice import BathParams
from superbath.selfenergy import EmitterConfig, collective_self_energy
from superbath.spectral import find_bound_states, find_unstable_poles, markov_shift_rate

P = BathParams(1.0, 1.0, 64)


class TestDetourRule:
    def test_exponential(self):
        y, w = detour_rule()
        assert np.sum(w * np.exp(-y)) == pytest.approx(1.0, rel=1e-13)

    def test_algebraic_tail(self):
        y, w = detour_rule()
        # the rule stops at y = 1e5
        assert np.sum(w / (1 + y) ** 2) == pytest.approx(1.0 - 1.0 / (1.0 + 1e5), rel=1e-12)

    @pytest.mark.parametrize("y0,d", [(0.14, 0.0046), (1e-3, 1e-6), (2.0, 0.01)])
    def test_graded_near_pole(self, y0, d):
        y, w = detour_rule([(y0, d)])
        exact = np.arctan((1e5 - y0) / d) + np.arctan(y0 / d)
        assert np.sum(w * d / ((y - y0) ** 2 + d * d)) == pytest.approx(exact, rel=1e-9)


class TestSingleEmitter:
    @pytest.mark.parametrize("D", [-6.0, -3.0, -0.5, 0.4, 2.0, 3.9, 6.0])
    def test_completeness(self, D):
        b = excited_amplitude([0.0], EmitterConfig("A", (0, 0), D, 0.5), P)
        assert abs(b.total[0] - 1) < 1e-6

    def test_b_sublattice_completeness(self):
        b = excited_amplitude([0.0], EmitterConfig("B", (0, 0), -0.4, 0.5), P)
        assert abs(b.total[0] - 1) < 1e-6

    def test_free_emitter(self):
        t = np.linspace(0, 5, 11)
        b = excited_amplitude(t, EmitterConfig("A", (0, 0), 0.7, 0.0), P)
        assert np.allclose(b.total, np.exp(-0.7j * t))

    def test_probability_bound(self):
        t = np.linspace(0, 40, 161)
        for D in (0.0, 2.0, 5.0):
            b = excited_amplitude(t, EmitterConfig("A", (0, 0), D, 0.5), P)
            assert np.all(np.abs(b.total) ** 2 <= 1 + 1e-3)

    def test_bound_state_plateau(self, mbs_emitter):
        t = np.linspace(150, 200, 51)
        b = excited_amplitude(t, mbs_emitter, P)
        r = [s.residue for s in b.bound_states if s.gap == "middle"][0]
        assert np.mean(np.abs(b.total) ** 2) == pytest.approx(r * r, abs=0.02)

    def test_unstable_pole_decay(self):
        e = EmitterConfig("A", (0, 0), 2.5, 0.2)
        t = np.linspace(10, 30, 21)
        b = excited_amplitude(t, e, P)
        (up,) = find_unstable_poles(e, P)
        slope = np.polyfit(t, np.log(np.abs(b.total)), 1)[0]
        assert -2 * slope == pytest.approx(-2 * up.z.imag, rel=0.05)
        assert -2 * up.z.imag == pytest.approx(markov_shift_rate(e, P)[1], rel=0.3)

    def test_oracle_agreement(self, mbs_emitter):
        p = BathParams(1.0, 1.0, 24)
        model = oracle.build_model(p, [mbs_emitter])
        t = np.linspace(0, 10, 41)
        amp = oracle.evolve(model, model.emitter_index(0), t)[:, -1]
        assert np.max(np.abs(amp - excited_amplitude(t, mbs_emitter, p).total)) < 0.02

    def test_band_edge_detuning_rejected(self):
        with pytest.raises(SingularityError):
            excited_amplitude([0.0], EmitterConfig("A", (0, 0), 1.0, 0.5), P)

    def test_needs_gap(self):
        with pytest.raises(ValueError):
            excited_amplitude([0.0], EmitterConfig("A", (0, 0), 0.5, 0.5), BathParams(1, 0, 8))

    def test_negative_times_rejected(self, mbs_emitter):
        with pytest.raises(ValueError):
            excited_amplitude([-1.0], mbs_emitter, P)
        with pytest.raises(ValueError):
            branch_cut_contribution(-1.0, mbs_emitter, P)

    def test_scalar_time(self, mbs_emitter):
        v = branch_cut_contribution(1.0, mbs_emitter, P)
        assert isinstance(v, complex)

    def test_deterministic(self):
        e = EmitterConfig("A", (0, 0), 2.0, 0.5)
        t = np.linspace(0, 5, 6)
        assert np.array_equal(excited_amplitude(t, e, P).total, excited_amplitude(t, e, P).total)


class TestTwoEmitters:
    def test_initial_condition(self):
        e1 = EmitterConfig("A", (0, 0), 0.0, 0.5)
        e2 = EmitterConfig("A", (3, 0), 0.0, 0.5)
        c1, c2 = two_emitter_amplitudes([0.0], e1, e2, P, 256)
        assert abs(c1[0] - 1) < 1e-9 and abs(c2[0]) < 1e-9

    def test_others_are_the_non_pole_part(self):
        e1 = EmitterConfig("A", (0, 0), 0.0, 0.5)
        e2 = EmitterConfig("A", (3, 0), 0.0, 0.5)
        t = np.linspace(0, 10, 11)
        c1, c2, o1, o2 = two_emitter_amplitudes(t, e1, e2, P, 256, return_others=True)
        (mbs,) = [b for b in find_bound_states(e1, P) if b.gap == "middle"]
        assert abs(o1[0] + o2[0] - (1 - mbs.residue)) < 0.05
        assert np.all(np.abs(o1) <= np.abs(c1) + 1)
        # remnants decay while the pair poles persist
        assert abs(o1[-1]) < abs(o1[0])

    def test_uncoupled_limit(self):
        e1 = EmitterConfig("A", (0, 0), 0.0, 0.5)
        e2 = EmitterConfig("A", (3, 0), 0.0, 0.5)
        t = np.linspace(0, 10, 11)
        c1, c2 = two_emitter_amplitudes(t, e1, e2, P, 256, collective=False)
        assert np.allclose(c1, excited_amplitude(t, e1, P).total) and np.all(c2 == 0)

    def test_far_apart_exchange_vanishes(self):
        e1 = EmitterConfig("A", (0, 0), 0.0, 0.5)
        near = exchange_coupling(e1, EmitterConfig("A", (2, 0), 0.0, 0.5), P, 512).J_ex
        far = exchange_coupling(e1, EmitterConfig("A", (40, 0), 0.0, 0.5), P, 512).J_ex
        assert abs(far) < 1e-6 * abs(near)

    @pytest.mark.parametrize("n12", [(2, 0), (4, 0), (3, 3)])
    def test_perturbative_exchange(self, n12):
        g = 0.1
        e1 = EmitterConfig("A", (0, 0), 0.0, g)
        ex = exchange_coupling(e1, EmitterConfig("A", n12, 0.0, g), P, 512)
        (mbs,) = [b for b in find_bound_states(e1, P) if b.gap == "middle"]
        sigma12 = collective_self_energy(mbs.energy, n12, g, P, 512).real
        assert abs(ex.J_ex) == pytest.approx(abs(sigma12), rel=0.1)

    def test_pair_pole_residue(self):
        e1 = EmitterConfig("A", (0, 0), 0.0, 0.5)
        (mbs,) = [b for b in find_bound_states(e1, P) if b.gap == "middle"]
        E, R = pair_pole(e1, (2, 0), P, +1, mbs.energy, 512)
        assert -1 < E < 1 and 0 < R < 1

    def test_rejects_mismatched_emitters(self):
        with pytest.raises(ValueError):
            exchange_coupling(EmitterConfig("A", (0, 0), 0.0, 0.5),
                              EmitterConfig("A", (2, 0), 0.1, 0.5), P)
        with pytest.raises(ValueError):
            exchange_coupling(EmitterConfig("B", (0, 0), 0.0, 0.5),
                              EmitterConfig("B", (2, 0), 0.0, 0.5), P)
