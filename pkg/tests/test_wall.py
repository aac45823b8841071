import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mps_orf.schur import ConstantSchur, ScaledIdentity, SchurParams, remainder_values, schur_parameters
from mps_orf.sequences import AlphaSequence
from mps_orf.wall import (approximant, circle_determinant_residual, determinant_residual,
                          euler_convergents, reconstruct_f, two_path_residual, wall_eval)

from conftest import disk_points

T64 = np.exp(2j * np.pi * (np.arange(64) + 0.25) / 64)


def random_case(rng, n, gmax=0.9, amax=0.95):
    g = gmax * np.sqrt(rng.random(n + 1)) * np.exp(2j * np.pi * rng.random(n + 1))
    a = amax * np.sqrt(rng.random(n + 2)) * np.exp(2j * np.pi * rng.random(n + 2))
    a[0] = 0
    return SchurParams.from_gammas(g), a


def test_order_zero_values():
    p = SchurParams.from_gammas([0.3 - 0.2j])
    w = wall_eval(p, AlphaSequence.radial(), 0, 0.4j)
    A, B, As, Bs = w.unscaled()
    assert (A, B, As, Bs) == pytest.approx((0.3 - 0.2j, 1, 0.3 + 0.2j, 1))


def test_zero_parameters():
    p = SchurParams.from_gammas(np.zeros(6))
    A, B, _, _ = wall_eval(p, AlphaSequence.radial(), 5, T64).unscaled()
    assert np.max(np.abs(A)) == 0
    assert np.max(np.abs(B - 1)) < 1e-15
    lad = euler_convergents(p, AlphaSequence.radial(), 5, 0.3)
    for k in range(0, 11, 2):
        P, Q, _ = lad.at(k)
        assert abs(P) == 0 and abs(Q - 1) < 1e-15


def test_ladder_seeds():
    p = SchurParams.from_gammas([0.4j, 0.2])
    lad = euler_convergents(p, AlphaSequence.radial(), 1, 0.1)
    P, Q, s = lad.at(-1)
    assert (P * np.exp(s), Q) == pytest.approx((1, 0))
    P, Q, s = lad.at(0)
    assert (P * np.exp(s), Q * np.exp(s)) == pytest.approx((0.4j, 1))


def test_determinant_at_order_zero():
    p = SchurParams.from_gammas([0.5])
    w = wall_eval(p, AlphaSequence.classical(), 0, T64)
    A, B, _, _ = w.unscaled()
    assert np.max(np.abs(np.abs(B) ** 2 - np.abs(A) ** 2 - 0.75)) < 1e-15


def test_approximant_examples():
    p = SchurParams.from_gammas(np.zeros(4))
    assert np.max(np.abs(approximant(p, AlphaSequence.radial(), 3, T64))) == 0
    p = SchurParams.from_gammas([0.1 + 0.6j])
    assert abs(approximant(p, AlphaSequence.radial(), 0, 0.77j) - (0.1 + 0.6j)) < 1e-16


def test_interpolation_half_z():
    f = ScaledIdentity(0.5)
    a = AlphaSequence.radial()
    p = schur_parameters(f, a, 21)
    for n in range(21):
        pts = a.take(n + 1)[1:]
        err = np.abs(approximant(p, a, n, pts) - f(pts)) * (1 - np.abs(pts))
        assert np.max(err) < 1e-9


def test_reconstruct_examples():
    c = ConstantSchur(0.3)
    cl = AlphaSequence.classical()
    p = schur_parameters(c, cl, 1)
    assert reconstruct_f(p, cl, 0, 0.2j, 0.0) == pytest.approx(0.3)
    assert reconstruct_f(p, cl, 0, T64, np.zeros(64)) == pytest.approx(approximant(p, cl, 0, T64))
    f = ScaledIdentity(0.5)
    a = AlphaSequence.radial()
    p = schur_parameters(f, a, 4)
    t = np.exp(2j * np.pi * np.arange(100) / 100)
    tail = remainder_values(f, a, p, 4, t)
    assert np.max(np.abs(reconstruct_f(p, a, 3, t, tail) - f(t))) < 1e-9


def test_odd_identity(rng):
    for _ in range(5):
        n = int(rng.integers(1, 11))
        p, a = random_case(rng, n)
        z = 0.9 * np.sqrt(rng.random(20)) * np.exp(2j * np.pi * rng.random(20))
        assert np.max(two_path_residual(p, a, n, z)) < 1e-10


@settings(max_examples=40)
@given(st.integers(0, 30), st.integers(0, 2 ** 32 - 1))
def test_circle_determinant_and_two_path(n, seed):
    p, a = random_case(np.random.default_rng(seed), n)
    assert np.max(circle_determinant_residual(p, a, n, T64)) < 1e-10
    assert np.max(two_path_residual(p, a, n, T64)) < 1e-10


@settings(max_examples=40)
@given(st.integers(0, 20), st.integers(0, 2 ** 32 - 1), disk_points(0.95))
def test_disk_determinant(n, seed, z):
    p, a = random_case(np.random.default_rng(seed), n)
    assert np.max(determinant_residual(p, a, n, z)) < 1e-10


@settings(max_examples=30)
@given(st.integers(1, 15), st.integers(0, 2 ** 32 - 1))
def test_approximant_is_schur_on_circle(n, seed):
    p, a = random_case(np.random.default_rng(seed), n)
    assert np.max(np.abs(approximant(p, a, n, T64))) <= 1 + 1e-12
