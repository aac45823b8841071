"""Wall rational functions A_n, B_n and their starred companions.

Two independent routes: the ordered 2x2 transfer product, rescaled after
every factor, and the four-term Euler recurrence for the convergents
P_k / Q_k of the associated continued fraction.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import blaschke, zeta


def _alphas(alphas, n):
    return alphas.take(n) if hasattr(alphas, "generator") else np.asarray(alphas, dtype=complex)


def _out(x):
    return x[()] if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class WallEval:
    """Scaled values; the true values are ``X * exp(log_scale)``."""

    A: np.ndarray
    B: np.ndarray
    Astar: np.ndarray
    Bstar: np.ndarray
    log_scale: np.ndarray
    n: int

    def unscaled(self):
        s = np.exp(self.log_scale)
        return self.A * s, self.B * s, self.Astar * s, self.Bstar * s

    @property
    def ratio(self):
        return self.A / self.B


def wall_eval(params, alphas, n, z):
    """Product prod_{k=n..1} [[1, conj g_k], [g_k, 1]] diag(zeta_k, 1) [[1, conj g_0], [g_0, 1]]
    = [[B*, A*], [A, B]], normalized after each factor by its largest entry."""
    a = _alphas(alphas, max(n, 1))
    g = params.gammas
    z = np.asarray(z, dtype=complex)
    g0 = g[0]
    x11 = np.ones(z.shape, dtype=complex)
    x12 = np.full(z.shape, np.conj(g0), dtype=complex)
    x21 = np.full(z.shape, g0, dtype=complex)
    x22 = np.ones(z.shape, dtype=complex)
    log_scale = np.zeros(z.shape)
    for k in range(1, n + 1):
        zk = zeta(a[k], z)
        gk = g[k]
        r11, r12 = zk * x11, zk * x12
        x11, x12, x21, x22 = (r11 + np.conj(gk) * x21, r12 + np.conj(gk) * x22,
                              gk * r11 + x21, gk * r12 + x22)
        s = np.maximum.reduce([np.abs(x11), np.abs(x12), np.abs(x21), np.abs(x22)])
        s = np.where(s > 0, s, 1.0)
        x11, x12, x21, x22 = x11 / s, x12 / s, x21 / s, x22 / s
        log_scale = log_scale + np.log(s)
    return WallEval(_out(x21), _out(x22), _out(x12), _out(x11), _out(log_scale), n)


@dataclass(frozen=True)
class EulerLadder:
    """Convergents P_k, Q_k for k = -1..2n+1 stored at offset 1.

    Entry k carries its own ``log_scale[k + 1]``.
    """

    P: np.ndarray
    Q: np.ndarray
    log_scale: np.ndarray
    n: int

    def at(self, k):
        i = k + 1
        return self.P[i], self.Q[i], self.log_scale[i]


def euler_convergents(params, alphas, n, z):
    """Four-term Euler recurrence seeded by P_-1 = 1, Q_-1 = 0, P_0 = g_0, Q_0 = 1.

    Needs gamma_0..gamma_n and alpha_1..alpha_{n+1}; P_2n = A_n, Q_2n = B_n.
    """
    a = _alphas(alphas, n + 1)
    g = params.gammas
    z = np.asarray(z, dtype=complex)
    one = np.ones(z.shape, dtype=complex)
    P = [one, g[0] * one]
    Q = [0 * one, one]
    L = [np.zeros(z.shape), np.zeros(z.shape)]
    # current pair (k-2, k-1) on a shared scale
    pm2, qm2, pm1, qm1 = P[0], Q[0], P[1], Q[1]
    lcur = np.zeros(z.shape)
    for m in range(1, n + 2):
        gp = g[m - 1]
        zm = zeta(a[m], z)
        w = 1.0 - abs(gp) ** 2
        # odd index 2m - 1
        po = np.conj(gp) * zm * pm1 + w * zm * pm2
        qo = np.conj(gp) * zm * qm1 + w * zm * qm2
        pm2, qm2, pm1, qm1 = pm1, qm1, po, qo
        P.append(po)
        Q.append(qo)
        L.append(lcur.copy())
        if m == n + 1:
            break
        pe = g[m] * pm1 + pm2
        qe = g[m] * qm1 + qm2
        pm2, qm2, pm1, qm1 = pm1, qm1, pe, qe
        s = np.maximum.reduce([np.abs(pm2), np.abs(qm2), np.abs(pm1), np.abs(qm1)])
        s = np.where(s > 0, s, 1.0)
        P.append(pe)
        Q.append(qe)
        L.append(lcur.copy())
        pm2, qm2, pm1, qm1 = pm2 / s, qm2 / s, pm1 / s, qm1 / s
        lcur = lcur + np.log(s)
    return EulerLadder(np.stack(P), np.stack(Q), np.stack(L), n)


def approximant(params, alphas, n, z):
    """Schur approximant A_n / B_n."""
    return wall_eval(params, alphas, n, z).ratio


def reconstruct_f(params, alphas, n, z, tail):
    """(A_n + zeta_{n+1} B_n* tail) / (B_n + zeta_{n+1} A_n* tail)."""
    a = _alphas(alphas, n + 1)
    w = wall_eval(params, alphas, n, z)
    zt = zeta(a[n + 1], z) * np.asarray(tail, dtype=complex)
    return _out((w.A + zt * w.Bstar) / (w.B + zt * w.Astar))


def determinant_residual(params, alphas, n, z):
    """Relative residual of B B* - A A* = B_n(z) omega_n.

    Normalized by |B B*| + |A A*| so that tiny omega_n stays measurable.
    """
    w = wall_eval(params, alphas, n, z)
    lhs = w.B * w.Bstar - w.A * w.Astar
    rhs = blaschke(alphas, n, z) * params.omegas[n] * np.exp(-2.0 * w.log_scale)
    den = np.abs(w.B * w.Bstar) + np.abs(w.A * w.Astar)
    return _out(np.abs(lhs - rhs) / den)


def circle_determinant_residual(params, alphas, n, t):
    """Relative residual of |B|^2 - |A|^2 = omega_n on the circle."""
    w = wall_eval(params, alphas, n, t)
    lhs = np.abs(w.B) ** 2 - np.abs(w.A) ** 2
    rhs = params.omegas[n] * np.exp(-2.0 * w.log_scale)
    den = np.abs(w.B) ** 2 + np.abs(w.A) ** 2
    return _out(np.abs(lhs - rhs) / den)


def two_path_residual(params, alphas, n, z):
    """Max relative gap between wall_eval and the Euler ladder for A, B, A*, B*.

    The starred values come from the odd identities P_{2n+1} = zeta_{n+1} Q_2n*
    and Q_{2n+1} = zeta_{n+1} P_2n*.
    """
    a = _alphas(alphas, n + 1)
    w = wall_eval(params, alphas, n, z)
    lad = euler_convergents(params, alphas, n, z)
    Pe, Qe, Le = lad.at(2 * n)
    Po, Qo, Lo = lad.at(2 * n + 1)
    zn = zeta(a[n + 1], z)
    ce = np.exp(Le - w.log_scale)
    co = np.exp(Lo - w.log_scale)
    den = np.abs(w.A) + np.abs(w.B)
    gaps = [np.abs(Pe * ce - w.A), np.abs(Qe * ce - w.B),
            np.abs(Po * co - zn * w.Bstar), np.abs(Qo * co - zn * w.Astar)]
    return _out(np.max(np.stack(gaps), axis=0) / den)
