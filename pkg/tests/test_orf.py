import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mps_orf.errors import RankDeficient
from mps_orf.geometry import blaschke, zeta
from mps_orf.measure import CircleMeasure, herglotz_interior
from mps_orf.orf import (OrfCoeffs, extremal_check, gram_matrix, kappa, orf_from_params,
                         orf_gram_schmidt, orf_poisson_residual, orf_recurrence_residual, orf_values,
                         psi_integral, star_in_basis, u_n_eval, wall_orf_bridge)
from mps_orf.schur import ConstantSchur, ScaledIdentity, SchurParams, schur_parameters
from mps_orf.sequences import AlphaSequence

RADIAL = AlphaSequence.radial()
CLASSICAL = AlphaSequence.classical()
CYCLE = AlphaSequence.explicit([0, 0.3, 0.5j, -0.4], cycle=True)
Z20 = 0.8 * np.sqrt(np.linspace(0.05, 1, 20)) * np.exp(2.3j * np.arange(20))


def test_zero_parameters_closed_form():
    a = AlphaSequence.explicit([0.2, 0.5j, -0.3, 0.6])
    p = SchurParams.from_gammas(np.zeros(5))
    z = np.array([0.1, 0.4 - 0.3j])
    for n in range(1, 5):
        phi, phis, psi, psis = orf_values(p, a, n, z)
        an = a[n]
        c = np.sqrt(1 - abs(an) ** 2) / (1 - np.conj(an) * z)
        assert np.allclose(phi, c * z * blaschke(a, n - 1, z), atol=1e-15)
        assert np.allclose(phis, c, atol=1e-15)


def test_order_zero_is_one():
    p = SchurParams.from_gammas([0.3])
    vals = orf_values(p, RADIAL, 0, Z20)
    for v in vals:
        assert np.allclose(v, 1.0, atol=1e-15)


@pytest.mark.parametrize("alphas", [CLASSICAL, CYCLE], ids=["classical", "cycle"])
def test_gram_schmidt_matches_transfer(alphas, mu_half_z):
    n = 10
    p = schur_parameters(ScaledIdentity(0.5), alphas, n + 1)
    gs = orf_gram_schmidt(mu_half_z, alphas, n)
    t = np.exp(2j * np.pi * np.arange(50) / 50 + 0.1j)
    for k in range(n + 1):
        phi = orf_values(p, alphas, k, t)[0]
        assert np.max(np.abs(gs.phis[k](t) - phi)) < 1e-7
    assert np.max(np.abs(gs.geronimus.gammas_tilde - p.gammas[: n])) < 1e-7


def test_gram_schmidt_lebesgue():
    gs = orf_gram_schmidt(CircleMeasure.lebesgue(1024), RADIAL, 6)
    assert np.max(np.abs(gs.geronimus.gammas_tilde)) < 1e-12
    assert np.allclose(gs.phis[0].coeffs, [1.0])


def test_rank_deficient_measure():
    g = CircleMeasure.lebesgue(256).grid
    d = np.zeros(256)
    d[::52] = 256 / 5
    with pytest.raises(RankDeficient):
        orf_gram_schmidt(CircleMeasure(g, d, (), True), CLASSICAL, 8)


def test_star_examples():
    one = OrfCoeffs(0, np.zeros(1), np.array([1.0]))
    assert np.allclose(star_in_basis(one).coeffs, [1.0])
    z = OrfCoeffs(1, np.zeros(2), np.array([0.0, 1.0]))
    assert np.allclose(star_in_basis(z).coeffs, [1.0, 0.0], atol=1e-14)


@settings(max_examples=30)
@given(st.integers(0, 8), st.integers(0, 2 ** 32 - 1))
def test_star_involution(n, seed):
    rng = np.random.default_rng(seed)
    a = 0.8 * np.sqrt(rng.random(n + 1)) * np.exp(2j * np.pi * rng.random(n + 1))
    a[0] = 0
    g = OrfCoeffs(n, a, rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1))
    back = star_in_basis(star_in_basis(g))
    assert np.max(np.abs(back.coeffs - g.coeffs)) < 1e-10
    t = np.exp(1j * np.linspace(0, 6, 9))
    assert np.allclose(g.star(t), blaschke(a, n, t) * np.conj(g(t)), atol=1e-12)


def test_coeffs_json_round_trip():
    g = OrfCoeffs(2, np.array([0, 0.3, 0.1j]), np.array([1, 2j, -0.5]))
    back = OrfCoeffs.from_json(g.to_json())
    assert np.array_equal(back.coeffs, g.coeffs)
    with pytest.raises(ValueError):
        OrfCoeffs.from_json({"n": 0, "alphas": [[0, 0]], "coeffs": [[1, 0]], "extra": 1})


def test_psi_examples(mu_half_z):
    leb = CircleMeasure.lebesgue(4096)
    p0 = SchurParams.from_gammas(np.zeros(3))
    assert np.allclose(psi_integral(leb, lambda z: orf_values(p0, RADIAL, 0, z)[0], Z20, 0), 1.0)
    psi = psi_integral(leb, lambda z: orf_values(p0, RADIAL, 1, z)[0], Z20, 1)
    assert np.max(np.abs(psi - orf_values(p0, RADIAL, 1, Z20)[2])) < 1e-8
    p = schur_parameters(ScaledIdentity(0.5), RADIAL, 7)
    for n in range(1, 7):
        ev = lambda z, n=n: orf_values(p, RADIAL, n, z)[0]
        psi = psi_integral(mu_half_z, ev, Z20, n)
        assert np.max(np.abs(psi - orf_values(p, RADIAL, n, Z20)[2])) < 1e-7
        _, res = u_n_eval(mu_half_z, ev, Z20, orf=orf_values(p, RADIAL, n, Z20), bn=blaschke(RADIAL, n, Z20))
        assert np.max(res) < 1e-7


def test_u0_lebesgue_vanishes():
    leb = CircleMeasure.lebesgue(1024)
    p0 = SchurParams.from_gammas([0.0])
    u, res = u_n_eval(leb, lambda z: np.ones_like(z), Z20, orf=orf_values(p0, RADIAL, 0, Z20), bn=np.ones(20))
    assert np.max(np.abs(u)) < 1e-14 and np.max(res) < 1e-14


def test_psi_star_over_phi_star_interpolates_F(mu_half_z):
    n = 5
    p = schur_parameters(ScaledIdentity(0.5), RADIAL, n)
    pts = np.concatenate([[0], RADIAL.take(n)[1:]])
    _, phis, _, psis = orf_values(p, RADIAL, n, pts)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        F = herglotz_interior(mu_half_z, pts)
    assert np.max(np.abs(psis / phis - F)) < 1e-8


def test_bridge_and_recurrence():
    p = SchurParams.from_gammas(np.zeros(2))
    assert max(np.max(r) for r in wall_orf_bridge(p, RADIAL, 0, Z20)) < 1e-15
    assert np.max(orf_recurrence_residual(p, RADIAL, 1, Z20)) < 1e-15
    rng = np.random.default_rng(11)
    for n in range(1, 11):
        g = 0.9 * np.sqrt(rng.random(n + 2)) * np.exp(2j * np.pi * rng.random(n + 2))
        a = 0.9 * np.sqrt(rng.random(n + 2)) * np.exp(2j * np.pi * rng.random(n + 2))
        a[0] = 0
        p = SchurParams.from_gammas(g)
        assert max(np.max(r) for r in wall_orf_bridge(p, a, n, Z20)) < 1e-9
        assert np.max(orf_recurrence_residual(p, a, n, Z20)) < 1e-9
    p = schur_parameters(ScaledIdentity(0.5), CLASSICAL, 3)
    t = np.exp(2j * np.pi * np.arange(256) / 256)
    assert np.max(orf_recurrence_residual(p, CLASSICAL, 2, t)) < 1e-9
    assert max(np.max(r) for r in wall_orf_bridge(p, CLASSICAL, 2, t)) < 1e-9


def test_kappa_examples(mu_half_z):
    p0 = schur_parameters(ConstantSchur(0), RADIAL, 6)
    for n in range(6):
        assert kappa(p0, RADIAL, n) == pytest.approx(1 / np.sqrt(1 - abs(RADIAL[n]) ** 2))
    assert kappa(schur_parameters(ConstantSchur(0), CLASSICAL, 3), CLASSICAL, 3) == pytest.approx(1.0)
    p = schur_parameters(ScaledIdentity(0.5), RADIAL, 6)
    rng = np.random.default_rng(5)
    for n in range(7):
        k = kappa(p, RADIAL, n)
        assert extremal_check(mu_half_z, RADIAL, n, k, rng) >= 1 / k - 1e-9


def test_orthonormality(mu_half_z):
    gs = orf_gram_schmidt(mu_half_z, RADIAL, 12)
    G = gram_matrix(mu_half_z, gs.phis)
    assert np.max(np.abs(G - np.eye(13))) < 1e-7


@pytest.mark.parametrize("alphas", [CLASSICAL, CYCLE, RADIAL], ids=["classical", "cycle", "radial"])
def test_poisson_identity(alphas):
    p = schur_parameters(ScaledIdentity(0.5), alphas, 13)
    t = np.exp(2j * np.pi * np.arange(512) / 512)
    for n in range(13):
        assert np.max(orf_poisson_residual(p, alphas, n, t)) < 1e-7
