"""Mobius factors, partial Blaschke products, disk metrics and the Poisson kernel.

Every function accepts scalars or numpy arrays and broadcasts.
"""

import numpy as np

from .errors import DomainError, PoleHit

BOUNDARY_GUARD = 1e-12
POLE_TOL = 1e-300
CIRCLE_TOL = 1e-12
RHO_OVERFLOW = 1.0 - 1e-15


def disk_point(z):
    """Validate a point (or array of points) of the open disk.

    Rejects ``|z| >= 1 - BOUNDARY_GUARD``.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(~np.isfinite(z)) or np.any(np.abs(z) >= 1.0 - BOUNDARY_GUARD):
        raise DomainError(f"point outside the guarded open disk: max |z| = {np.max(np.abs(z)):.17g}")
    return z[()] if z.ndim == 0 else z


def circle_point(t):
    """Validate and renormalize a point of the unit circle."""
    t = np.asarray(t, dtype=complex)
    mod = np.abs(t)
    if np.any(np.abs(mod - 1.0) > CIRCLE_TOL):
        raise DomainError("point not on the unit circle")
    t = t / mod
    return t[()] if t.ndim == 0 else t


def zeta(alpha, z):
    """Elementary factor (z - alpha) / (1 - conj(alpha) z)."""
    alpha = complex(alpha)
    z = np.asarray(z, dtype=complex)
    den = 1.0 - np.conj(alpha) * z
    if np.any(np.abs(den) < POLE_TOL):
        raise PoleHit(f"zeta({alpha}) evaluated at its pole 1/conj(alpha)")
    out = (z - alpha) / den
    return out[()] if out.ndim == 0 else out


def _points(alphas, n):
    if hasattr(alphas, "generator"):
        return alphas.take(n)
    return np.asarray(alphas, dtype=complex)


def blaschke_partial(alphas, i, n, z):
    """Tail product zeta_i(z) * ... * zeta_n(z); the empty product (i = n + 1) is 1.

    ``alphas`` is an AlphaSequence or an array whose entry k is alpha_k.
    """
    if i < 1 or i > n + 1:
        raise ValueError(f"need 1 <= i <= n + 1, got i={i}, n={n}")
    pts = _points(alphas, n)
    z = np.asarray(z, dtype=complex)
    out = np.ones_like(z)
    for k in range(i, n + 1):
        out = out * zeta(pts[k], z)
    return out[()] if out.ndim == 0 else out


def blaschke(alphas, n, z):
    """Partial Blaschke product B_n = zeta_1 ... zeta_n."""
    return blaschke_partial(alphas, 1, n, z)


def blaschke_table(alphas, n, z):
    """Rows B_0(z), ..., B_n(z) stacked along a new leading axis."""
    pts = _points(alphas, n)
    z = np.asarray(z, dtype=complex)
    rows = [np.ones_like(z)]
    for k in range(1, n + 1):
        rows.append(rows[-1] * zeta(pts[k], z))
    return np.stack(rows)


def pseudo_hyperbolic(z, w):
    """rho(z, w) = |z - w| / |1 - conj(w) z|."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    num = np.abs(z - w)
    den = np.abs(1.0 - np.conj(w) * z)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(num == 0.0, 0.0, num / den)
    out = np.minimum(out, 1.0)
    return out[()] if out.ndim == 0 else out


def pseudo_hyperbolic_from_defects(z, w, dz, dw):
    """rho(z, w) given accurate defects dz = 1 - |z|^2 and dw = 1 - |w|^2.

    The direct quotient loses eps / |1 - conj(w) z| in relative accuracy,
    so once that denominator is small 1 - rho^2 = dz dw / |1 - conj(w) z|^2
    is used instead.
    """
    direct = np.asarray(pseudo_hyperbolic(z, w), dtype=float)
    den = np.abs(1.0 - np.conj(w) * np.asarray(z, dtype=complex))
    with np.errstate(invalid="ignore", divide="ignore"):
        q = np.where(den > 0, np.asarray(dz) * np.asarray(dw) / den ** 2, 0.0)
    stable = np.sqrt(np.clip(1.0 - q, 0.0, 1.0))
    out = np.where(den > 1e-4, direct, stable)
    return out[()] if out.ndim == 0 else out


def hyperbolic_from_rho(rho):
    """log((1 + rho) / (1 - rho)); +inf once rho exceeds 1 - 1e-15."""
    rho = np.asarray(rho, dtype=float)
    safe = np.minimum(rho, RHO_OVERFLOW)
    out = np.where(rho > RHO_OVERFLOW, np.inf, np.log1p(safe) - np.log1p(-safe))
    return out[()] if out.ndim == 0 else out


def hyperbolic(z, w):
    """Hyperbolic distance log((1 + rho) / (1 - rho))."""
    return hyperbolic_from_rho(pseudo_hyperbolic(z, w))


def hyperbolic_overflowed(z, w):
    return np.any(np.asarray(pseudo_hyperbolic(z, w)) > RHO_OVERFLOW)


def poisson_kernel(t, w):
    """P(t, w) = (1 - |w|^2) / |t - w|^2 for t on the circle, w in the disk."""
    t = np.asarray(t, dtype=complex)
    w = np.asarray(w, dtype=complex)
    out = (1.0 - np.abs(w) ** 2) / np.abs(t - w) ** 2
    return out[()] if out.ndim == 0 else out


def mobius_automorphism(a, phase=1.0):
    """Return the disk automorphism z -> phase * (z - a) / (1 - conj(a) z)."""
    a = complex(a)

    def m(z):
        return phase * zeta(a, z)

    return m
