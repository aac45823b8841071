import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mps_orf.errors import DomainError
from mps_orf.geometry import (blaschke, blaschke_partial, hyperbolic, hyperbolic_from_rho,
                              mobius_automorphism, poisson_kernel, pseudo_hyperbolic,
                              pseudo_hyperbolic_from_defects, zeta)
from mps_orf.sequences import AlphaSequence

from conftest import circle_points, disk_points


def test_zeta_at_origin_is_identity():
    z = np.array([0.3 + 0.1j, -0.7j, 0.99])
    assert np.allclose(zeta(0.0, z), z, atol=0, rtol=0)


def test_zeta_vanishes_at_node():
    assert zeta(0.4 - 0.2j, 0.4 - 0.2j) == 0


def test_zeta_exact_value():
    assert zeta(0.5, 1.0) == 1.0


def test_blaschke_empty_product():
    a = AlphaSequence.radial()
    assert blaschke_partial(a, 6, 5, 0.3j) == 1.0


def test_blaschke_classical_is_power():
    z = 0.4 + 0.3j
    assert abs(blaschke(AlphaSequence.classical(), 7, z) - z ** 7) < 1e-15


def test_blaschke_unimodular_on_circle_mp():
    import mpmath as mp

    rng = np.random.default_rng(3)
    a = np.concatenate([[0], 0.9 * rng.random(9) * np.exp(2j * np.pi * rng.random(9))])
    t = np.exp(2j * np.pi * rng.random(20))
    vals = blaschke_partial(a, 1, 9, t)
    mp.mp.dps = 40
    for tt, v in zip(t, vals):
        prod = mp.mpf(1)
        for ak in a[1:]:
            x, ak = mp.mpc(tt), mp.mpc(ak)
            prod *= abs((x - ak) / (1 - mp.conj(ak) * x))
        assert abs(abs(v) - float(prod)) < 1e-13


def test_pseudo_hyperbolic_basics():
    assert pseudo_hyperbolic(0.3j, 0.3j) == 0
    assert pseudo_hyperbolic(0.0, 0.6 - 0.2j) == pytest.approx(abs(0.6 - 0.2j), abs=1e-16)


def test_hyperbolic_at_half():
    assert hyperbolic_from_rho(0.5) == pytest.approx(math.log(3.0), rel=1e-15)
    assert hyperbolic(0.2, 0.2) == 0


def test_poisson_kernel_values():
    t = np.exp(1j * np.linspace(0, 6, 7))
    assert np.allclose(poisson_kernel(t, 0.0), 1.0)
    assert poisson_kernel(1.0, 0.5) == pytest.approx(3.0, rel=1e-15)


@pytest.mark.parametrize("w", [0.0, 0.5j, -0.9, 0.6 + 0.6j])
def test_poisson_mean_value(w):
    t = np.exp(2j * np.pi * np.arange(4096) / 4096)
    assert abs(np.mean(poisson_kernel(t, w)) - 1.0) < 1e-12


def test_radial_points_and_divergent_sum():
    a = AlphaSequence.radial(xi=1j, c=1.0)
    assert a[4] == pytest.approx(0.8j)
    assert a.blaschke_divergent
    assert not AlphaSequence.explicit([0.1, 0.2]).blaschke_divergent
    assert a.blaschke_sums(9)[-1] == pytest.approx(sum(1 / (k + 1) for k in range(1, 10)))


def test_boundary_guard():
    with pytest.raises(DomainError):
        AlphaSequence.explicit([0.5, 1.0])


@given(disk_points(0.999), circle_points())
def test_zeta_unimodular_on_circle(a, t):
    assert abs(abs(zeta(a, t)) - 1.0) < 1e-13


@given(disk_points(0.9), disk_points(0.9), disk_points(0.9), circle_points())
def test_rho_mobius_invariant(z, w, a, phase):
    m = mobius_automorphism(a, phase)
    assert abs(pseudo_hyperbolic(m(z), m(w)) - pseudo_hyperbolic(z, w)) < 1e-12


@given(disk_points(0.9), disk_points(0.9), disk_points(0.9))
def test_rho_triangle_inequality(x, y, z):
    assert pseudo_hyperbolic(x, z) <= pseudo_hyperbolic(x, y) + pseudo_hyperbolic(y, z) + 1e-12


@given(st.floats(0.0, 0.999))
def test_hyperbolic_dominates_twice_rho(r):
    assert hyperbolic_from_rho(r) >= 2 * r - 1e-15


@given(disk_points(0.99), disk_points(0.99))
def test_rho_from_defects_matches_direct(z, w):
    dz, dw = 1 - abs(z) ** 2, 1 - abs(w) ** 2
    assert abs(pseudo_hyperbolic_from_defects(z, w, dz, dw) - pseudo_hyperbolic(z, w)) < 1e-6


def test_rho_from_defects_on_circle():
    f = np.exp(1j * np.array([0.1, 2.0]))
    r = f * (1 - 1e-17)
    assert np.all(pseudo_hyperbolic_from_defects(f, r, 0.0, 1e-12) == 1.0)
