import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superbath.errors import SingularityError
from superbath.lattice import BathParams
from superbath.selfenergy import (
    EmitterConfig,
    band_edge_expansion,
    collective_self_energy,
    region_of,
    self_energy_analytic,
    self_energy_continued,
    self_energy_derivative,
    self_energy_ksum,
)

P = BathParams(1.0, 1.0, 64)
W = P.outer_edge


def continued_by_taylor(z_target, sub="A", g=0.5, p=P, m=256, terms=50):
    """Analytic continuation oracle: Taylor series about Re z + i, coefficients
    from a Cauchy circle of radius 0.95 that stays in the upper half plane."""
    centre, radius = complex(z_target.real, 1.0), 0.95
    theta = 2 * np.pi * np.arange(m) / m
    vals = self_energy_analytic(centre + radius * np.exp(1j * theta), sub, g, p)
    coeffs = np.fft.fft(vals) / m / radius ** np.arange(m)
    return np.sum(coeffs[:terms] * (z_target - centre) ** np.arange(terms))


class TestAnalytic:
    def test_zero_energy_closed_value(self):
        g = 0.5
        ref = -2 * g * g * float(mpmath.ellipk(-16)) / np.pi
        assert self_energy_analytic(0.0, "A", g, P) == pytest.approx(ref, rel=1e-14)

    @pytest.mark.parametrize("z", [0.0, 0.5, -5.0, 6.0, 0.3 + 0.2j, 2.5 + 0.05j, -3 + 1j])
    def test_against_ksum(self, z):
        a = self_energy_analytic(z, "A", 0.5, P)
        k = self_energy_ksum(z, "A", 0.5, P, grid_n=2048)
        assert abs(a - k) < 1e-4 * abs(a)

    def test_band_values_use_upper_side(self):
        # in a band the +i0 prescription gives a decay rate >= 0
        for E in (1.5, 3.0, -1.5, -3.0):
            for sub in "AB":
                assert self_energy_analytic(E, sub, 0.5, P).imag <= 0

    def test_band_limit_from_above(self):
        for E in (2.2, -2.2):
            near = self_energy_analytic(complex(E, 1e-9), "A", 0.5, P)
            assert self_energy_analytic(E, "A", 0.5, P) == pytest.approx(near, rel=1e-6)

    def test_null_edge(self):
        assert self_energy_analytic(-1.0, "A", 0.5, P) == 0.0
        assert self_energy_analytic(1.0, "B", 0.5, P) == 0.0

    @pytest.mark.parametrize("E", [1.0, W, -W])
    def test_singular_edges(self, E):
        with pytest.raises(SingularityError):
            self_energy_analytic(E, "A", 0.5, P)

    def test_flat_band_limit_singular_at_zero(self):
        with pytest.raises(SingularityError):
            self_energy_analytic(0.0, "A", 0.5, BathParams(1.0, 0.0, 8))

    def test_vectorised(self):
        zs = np.array([0.2, 2.0, -6.0])
        out = self_energy_analytic(zs, "A", 0.5, P)
        assert out.shape == (3,)
        assert out[1] == self_energy_analytic(2.0, "A", 0.5, P)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-8, 8), st.floats(0.01, 3))
    def test_sublattice_mirror(self, x, y):
        z = complex(x, y)
        assert abs(self_energy_analytic(z, "A", 0.5, P) + self_energy_analytic(-z, "B", 0.5, P)) < 1e-12

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-8, 8), st.floats(0.01, 3))
    def test_herglotz(self, x, y):
        assert self_energy_analytic(complex(x, y), "A", 0.5, P).imag < 0


class TestContinued:
    def test_taylor_continuation_region_II(self):
        z = -2.5 - 0.1j
        ref = continued_by_taylor(z)
        assert abs(self_energy_continued(z, "II", "A", 0.5, P) - ref) < 1e-10

    def test_taylor_continuation_region_IV(self):
        z = 2.7 - 0.15j
        ref = continued_by_taylor(z, sub="B")
        assert abs(self_energy_continued(z, "IV", "B", 0.5, P) - ref) < 1e-10

    @pytest.mark.parametrize("E", [-3.0, -1.7, 1.4, 3.5])
    def test_continuous_across_band(self, E):
        upper = self_energy_analytic(E, "A", 0.5, P)
        lower = self_energy_continued(complex(E, -1e-10), None, "A", 0.5, P)
        assert abs(upper - lower) < 1e-6

    def test_gap_strips_are_closed_form(self):
        z = 0.3 - 0.4j
        assert self_energy_continued(z, "III", "A", 0.5, P) == self_energy_analytic(z, "A", 0.5, P)

    def test_region_labels(self):
        assert [region_of(x, P) for x in (-5, -2, 0, 2, 5)] == ["I", "II", "III", "IV", "V"]
        assert region_of(1.0, P) == "IV"

    def test_unknown_region(self):
        with pytest.raises(ValueError):
            self_energy_continued(0.1, "VI", "A", 0.5, P)


class TestDerivative:
    @pytest.mark.parametrize("z,region", [(0.3, None), (-6.0, None), (0.2 + 0.3j, None),
                                          (2.0 - 0.3j, "IV"), (-2.4 - 0.2j, "II")])
    def test_finite_difference(self, z, region):
        h = 1e-6
        f = (lambda v: self_energy_analytic(v, "A", 0.5, P)) if region is None else \
            (lambda v: self_energy_continued(v, region, "A", 0.5, P))
        fd = (f(z + h) - f(z - h)) / (2 * h)
        assert abs(self_energy_derivative(z, "A", 0.5, P, region) - fd) < 1e-6 * max(1, abs(fd))

    def test_complex_step(self):
        # complex-step oracle on a real gap energy
        h = 1e-20
        E = 0.4
        cs = self_energy_analytic(complex(E, h), "A", 0.5, P).imag / h
        assert self_energy_derivative(E, "A", 0.5, P).real == pytest.approx(cs, rel=1e-10)


class TestBandEdgeExpansion:
    @pytest.mark.parametrize("edge,z", [("inner-upper", lambda x: 1 + x),
                                        ("inner-lower", lambda x: -1 - x),
                                        ("inner-upper-below", lambda x: 1 - x)])
    def test_leading_order(self, edge, z):
        p = BathParams(1.0, 1.0, 8)
        x = 1e-5
        exact = self_energy_analytic(z(x), "A", 0.5, p)
        approx = band_edge_expansion(x, edge, 0.5, p)
        assert abs(exact / approx - 1) < 1e-2

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            band_edge_expansion(-1e-3, "inner-upper", 0.5, P)
        with pytest.raises(ValueError):
            band_edge_expansion(1e-3, "outer", 0.5, P)


class TestCollective:
    def test_zero_separation_is_local(self):
        z = 0.3
        assert collective_self_energy(z, (0, 0), 0.5, P, 512) == pytest.approx(
            self_energy_ksum(z, "A", 0.5, P, 512), rel=1e-14)

    def test_decays_with_distance(self):
        vals = [abs(collective_self_energy(0.0, (n, 0), 0.5, P, 512)) for n in (2, 4, 8, 16)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_axis_exceeds_diagonal(self):
        z = -0.05
        for n in (2, 4, 6):
            assert abs(collective_self_energy(z, (n, 0), 0.1, P, 512)) > \
                abs(collective_self_energy(z, (n, n), 0.1, P, 512))

    def test_inversion_symmetry(self):
        a = collective_self_energy(0.2, (3, 1), 0.5, P, 256)
        b = collective_self_energy(0.2, (-3, -1), 0.5, P, 256)
        assert a == pytest.approx(b, rel=1e-13)


def test_emitter_config_validation():
    with pytest.raises(ValueError):
        EmitterConfig("C")
    with pytest.raises(ValueError):
        EmitterConfig(g=-1.0)
    assert EmitterConfig("B").sign == -1
