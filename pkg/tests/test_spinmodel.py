import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superbath.lattice import BathParams
from superbath.spinmodel import (
    EffectiveCouplings,
    ProtocolConfig,
    _propagate,
    effective_couplings,
    effective_hamiltonian,
    goal_state,
    initial_state,
    protocol_fidelity_closed,
    protocol_fidelity_sim,
    raman_renormalize,
    symmetric_rotation,
)

coupling = st.floats(-1.0, 1.0, allow_nan=False)

# regression fixture: n = 6, delta = J, g = 0.1 J, Delta = 0, grid_n = 512
N6 = EffectiveCouplings(5.542154221053596e-05, -1.0902237182692023e-07, 2.0504352739674457e-06)


class TestRaman:
    def test_identity(self):
        with pytest.warns(UserWarning):
            cfg = ProtocolConfig(3, Delta=0.2, g=0.1, Omega=1.0, Delta_L=1.0)
        assert raman_renormalize(cfg) == (0.1, 0.2)

    def test_scaling(self):
        with pytest.warns(UserWarning):
            cfg = ProtocolConfig(3, g=0.5, Omega=0.1, Delta_L=0.5)
        assert raman_renormalize(cfg)[0] == pytest.approx(0.1)

    def test_coupling_rates_scale_quadratically(self):
        base = effective_couplings(ProtocolConfig(3, g=0.1))
        dressed = effective_couplings(ProtocolConfig(3, g=1.0, Omega=1.0, Delta_L=10.0))
        assert dressed.J_a == pytest.approx(base.J_a, rel=1e-12)
        weak = effective_couplings(ProtocolConfig(3, g=0.01))
        assert weak.J_a / base.J_a == pytest.approx(1e-2, rel=0.02)

    def test_laser_frequency_shift(self):
        assert raman_renormalize(ProtocolConfig(3, Delta=0.4, omega_L=0.4))[1] == 0.0

    def test_rejects_zero_detuning(self):
        with pytest.raises(ValueError):
            ProtocolConfig(3, Omega=0.1, Delta_L=0.0)

    def test_rejects_bad_arm(self):
        with pytest.raises(ValueError):
            ProtocolConfig(0)


class TestHamiltonian:
    def test_uncoupled_arms_spectrum(self):
        h = effective_hamiltonian(EffectiveCouplings(0.3, 0.0, 0.0), 0.1)
        ev = np.sort(np.linalg.eigvalsh(h))
        assert ev == pytest.approx(np.sort([0.1 - 0.6, 0.1, 0.1, 0.1, 0.1 + 0.6]), abs=1e-14)

    @settings(max_examples=50, deadline=None)
    @given(coupling, coupling, coupling, coupling, coupling)
    def test_block_diagonal(self, ja, j1, j2, d, da):
        c = EffectiveCouplings(ja, j1, j2)
        u = symmetric_rotation()
        r = u.T @ effective_hamiltonian(c, d, da) @ u
        assert np.allclose(u.T @ u, np.eye(5), atol=1e-15)
        assert np.max(np.abs(r[:2, 2:])) < 1e-14
        assert r[:2, :2] == pytest.approx(np.array([[da, 2 * ja], [2 * ja, d + 2 * j1 + j2]]),
                                          abs=1e-14)
        ev = np.linalg.eigvalsh(effective_hamiltonian(c, d, da))
        assert np.sort(ev) == pytest.approx(np.sort(np.linalg.eigvalsh(r)), abs=1e-13)


class TestFidelity:
    def test_resonant_limit(self):
        F, T = protocol_fidelity_closed(EffectiveCouplings(0.2, 0.0, 0.0))
        assert F == 1.0 and T == pytest.approx(np.pi / 0.8)

    @settings(max_examples=100, deadline=None)
    @given(coupling.filter(lambda x: abs(x) > 1e-3), coupling, coupling)
    def test_closed_matches_simulation(self, ja, j1, j2):
        c = EffectiveCouplings(ja, j1, j2)
        F, T = protocol_fidelity_closed(c)
        assert protocol_fidelity_sim(None, c, T) == pytest.approx(F, abs=1e-10)

    def test_detuning_correction_is_perfect(self):
        c = EffectiveCouplings(0.1, 0.03, -0.02)
        cfg = ProtocolConfig(3, detuning_correction=True)
        assert protocol_fidelity_sim(cfg, c, np.pi / 0.4) == pytest.approx(1.0, abs=1e-12)

    def test_zero_time(self):
        assert protocol_fidelity_sim(None, EffectiveCouplings(0.1, 0.01, 0.01), 0.0) < 1e-28

    def test_no_arm_coupling(self):
        with pytest.warns(UserWarning):
            F, T = protocol_fidelity_closed(EffectiveCouplings(0.0, 0.1, 0.1))
        assert F == 0.0 and np.isnan(T)

    def test_loss_reduces_fidelity(self):
        c = EffectiveCouplings(0.1, 0.0, 0.0)
        T = np.pi / 0.4
        assert protocol_fidelity_sim(None, c, T, Gamma_star=0.01) < protocol_fidelity_sim(None, c, T)

    def test_norm_conserved(self):
        c = EffectiveCouplings(0.13, -0.04, 0.02)
        u = _propagate(effective_hamiltonian(c, 0.1, 0.3).astype(complex), 37.0)
        assert np.linalg.norm(u @ initial_state()) == pytest.approx(1.0, abs=1e-12)

    def test_symmetry_protection(self):
        c = EffectiveCouplings(0.13, -0.04, 0.02)
        h = effective_hamiltonian(c, 0.1, 0.3).astype(complex)
        rot = symmetric_rotation()
        for t in np.linspace(0, 50, 26):
            psi = _propagate(h, t) @ initial_state()
            assert np.max(np.abs(rot[:, 2:].T @ psi)) < 1e-12

    def test_goal_state_normalised(self):
        assert np.linalg.norm(goal_state()) == pytest.approx(1.0)


class TestCouplings:
    def test_regression_n6(self):
        c = effective_couplings(ProtocolConfig(6, Delta=0.0, g=0.1, bath=BathParams(1.0, 1.0, 64)))
        assert c.J_a == pytest.approx(N6.J_a, rel=1e-9)
        assert c.J_1 == pytest.approx(N6.J_1, rel=1e-9)
        assert c.J_2 == pytest.approx(N6.J_2, rel=1e-9)

    def test_arm_coupling_dominates(self):
        for n in (6, 8):
            c = effective_couplings(ProtocolConfig(n))
            assert abs((2 * c.J_1 + c.J_2) / c.J_a) < 0.1

    def test_requires_middle_gap(self):
        with pytest.raises(ValueError):
            effective_couplings(ProtocolConfig(3, Delta=2.0))
