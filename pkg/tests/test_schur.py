import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mps_orf.errors import DerivativeUnavailable, FiniteBlaschkeDetected
from mps_orf.measure import CircleGrid
from mps_orf.schur import (CallableSchur, ConstantSchur, RationalSchur, ScaledIdentity, SchurParams,
                           SingularInner, remainder_at, remainder_on_grid, remainder_table,
                           schur_function_from_spec, schur_parameters, validate_schur)
from mps_orf.sequences import AlphaSequence

from conftest import disk_points

CLASSICAL = AlphaSequence.classical()
RADIAL = AlphaSequence.radial()


def test_zero_function_has_zero_parameters():
    p = schur_parameters(ConstantSchur(0), RADIAL, 12)
    assert np.all(p.gammas == 0)
    assert np.all(p.omegas == 1)


def test_constant_classical():
    p = schur_parameters(ConstantSchur(0.3 - 0.4j), CLASSICAL, 5)
    assert p.gammas[0] == pytest.approx(0.3 - 0.4j)
    assert np.all(np.abs(p.gammas[1:]) < 1e-15)


def test_half_z_classical():
    p = schur_parameters(ScaledIdentity(0.5), CLASSICAL, 6)
    assert np.allclose(p.gammas, [0, 0.5, 0, 0, 0, 0, 0], atol=1e-15)
    assert p.omegas[-1] == pytest.approx(0.75)


def richardson_f1_limit():
    """lim_{h -> 0} f_1(0.5 + h) for f = z/2, alpha_1 = 0.5, in 50 digits."""
    mp.mp.dps = 50
    g0 = mp.mpf(1) / 4

    def f1(z):
        zeta = (z - mp.mpf(0.5)) / (1 - z / 2)
        return (z / 2 - g0) / ((1 - g0 * z / 2) * zeta)

    hs = [mp.mpf(10) ** (-k) for k in range(8, 14)]
    table = [f1(mp.mpf(0.5) + h) for h in hs]
    # f_1 is analytic, so the error is O(h); eliminate it with ratio-10 Richardson
    for _ in range(3):
        table = [(10 * table[i + 1] - table[i]) / 9 for i in range(len(table) - 1)]
    return table[-1]


def test_repeated_node_matches_richardson_oracle():
    a = AlphaSequence.explicit([0.5, 0.5])
    p = schur_parameters(ScaledIdentity(0.5), a, 1)
    assert p.gammas[0] == pytest.approx(0.25, abs=1e-16)
    assert abs(p.gammas[1] - complex(richardson_f1_limit())) < 1e-14


def classical_schur_series(coeffs, n):
    """Classical Schur parameters from Taylor coefficients (power-series algorithm)."""
    c = list(coeffs)
    out = []
    for _ in range(n + 1):
        g = c[0]
        out.append(g)
        num = [c[0] - g] + c[1:]
        den = [1 - mp.conj(g) * c[0]] + [-mp.conj(g) * x for x in c[1:]]
        q = []
        for k in range(len(num)):
            s = num[k] - sum(q[j] * den[k - j] for j in range(k))
            q.append(s / den[0])
        c = q[1:]
    return out


@pytest.mark.parametrize("a", [0.3, 0.4 - 0.2j])
def test_high_multiplicity_matches_power_series_oracle(a):
    n = 6
    mp.mp.dps = 60
    am = mp.mpc(a)

    def g(w):  # f o m_a^{-1} with f(z) = z/2
        return ((w + am) / (1 + mp.conj(am) * w)) / 2

    coeffs = mp.taylor(g, 0, n + 2)
    expect = [complex(x) for x in classical_schur_series(coeffs, n)]
    p = schur_parameters(ScaledIdentity(0.5), AlphaSequence.explicit([a], cycle=True), n)
    assert np.max(np.abs(p.gammas - np.array(expect))) < 1e-12


def test_cycle_regime():
    a = AlphaSequence.explicit([0, 0.3, 0.5j, -0.4], cycle=True)
    p = schur_parameters(ScaledIdentity(0.5), a, 8)
    assert abs(p.gammas[0] - a[1] / 2) < 1e-16
    assert np.all(np.abs(p.gammas) < 1)


def test_chain_precision_grows_towards_boundary():
    assert schur_parameters(ScaledIdentity(0.5), RADIAL, 40).dps > schur_parameters(
        ScaledIdentity(0.5), CLASSICAL, 40).dps


def test_callable_without_derivatives():
    f = CallableSchur(lambda z: z / 3)
    with pytest.raises(DerivativeUnavailable):
        schur_parameters(f, AlphaSequence.explicit([0.2, 0.2, 0.2]), 2)


def test_finite_blaschke_detected():
    f = RationalSchur((1, 2), (2, 1))
    with pytest.raises(FiniteBlaschkeDetected):
        schur_parameters(f, CLASSICAL, 3)


def test_remainder_on_grid_examples():
    g = CircleGrid(256)
    c = ConstantSchur(0.2j)
    p = schur_parameters(c, CLASSICAL, 2)
    assert np.array_equal(remainder_on_grid(c, CLASSICAL, p, 0, g), c.boundary(g))
    assert np.max(np.abs(remainder_on_grid(c, CLASSICAL, p, 1, g))) < 1e-15
    h = ScaledIdentity(0.5)
    p = schur_parameters(h, CLASSICAL, 2)
    assert np.max(np.abs(remainder_on_grid(h, CLASSICAL, p, 1, g) - 0.5)) < 1e-15


def test_remainder_at_examples():
    h = ScaledIdentity(0.5)
    p = schur_parameters(h, RADIAL, 6)
    for n in range(6):
        assert abs(remainder_at(h, RADIAL, p, n, RADIAL[n + 1]) - p.gammas[n]) < 1e-13
    assert remainder_at(ConstantSchur(0), RADIAL, schur_parameters(ConstantSchur(0), RADIAL, 3), 3, 0.2) == 0
    pc = schur_parameters(h, CLASSICAL, 2)
    assert remainder_at(h, CLASSICAL, pc, 1, 0.3) == pytest.approx(0.5)


def test_validate_examples():
    g = CircleGrid(1024)
    v = validate_schur(ConstantSchur(0), g)
    assert v.passed and v.max_modulus == 0
    v = validate_schur(RationalSchur((1, 2), (2, 1)), g)
    assert v.finite_blaschke and abs(v.min_modulus - 1) < 1e-12
    v = validate_schur(RationalSchur((0.5, 0.5), (1,)), g)
    assert v.passed and abs(v.max_modulus - 1) < 1e-12


def test_rational_with_pole_in_disk_rejected():
    with pytest.raises(Exception):
        RationalSchur((0.1,), (1, -2))


def test_spec_parsing_kinds():
    f = schur_function_from_spec({"kind": "product", "factors": [
        {"kind": "scaled_identity", "lambda": [0.5, 0]},
        {"kind": "singular_inner", "sigma": 0.5, "xi": [1, 0]}]})
    assert abs(f(0.3) - 0.15 * SingularInner(0.5, 1.0)(0.3)) < 1e-15
    with pytest.raises(Exception):
        schur_function_from_spec({"kind": "nope"})


def test_singular_inner_grid_remainders_stay_unimodular():
    f = SingularInner(1.0, 1.0)
    p = schur_parameters(f, RADIAL, 30)
    tab = remainder_table(f, RADIAL, p, 30, CircleGrid(1024))
    mod = np.abs(tab[:, 1:])
    assert np.max(np.abs(mod - 1)) < 1e-12


@settings(max_examples=25)
@given(st.lists(disk_points(0.9), min_size=3, max_size=8), st.floats(0.05, 0.95))
def test_remainders_stay_schur(points, lam):
    a = AlphaSequence.explicit(points)
    f = ScaledIdentity(lam)
    n = len(points) - 1
    p = schur_parameters(f, a, n)
    tab = remainder_table(f, a, p, n, CircleGrid(512))
    assert np.max(np.abs(tab)) <= 1 + 1e-8
    assert np.all(np.abs(p.gammas) < 1)


@given(st.lists(disk_points(0.9), min_size=1, max_size=10))
def test_params_from_gammas_omegas(gs):
    p = SchurParams.from_gammas(gs)
    assert np.allclose(p.omegas, np.cumprod([1 - abs(g) ** 2 for g in gs]))
