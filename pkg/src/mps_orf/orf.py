"""Orthogonal rational functions on the circle.

Three routes to the same objects:

* ``orf_from_params``: transfer product driven by the Schur parameters, with
  Geronimus parameters gamma~_k = gamma_{k-1};
* ``orf_gram_schmidt``: modified Gram-Schmidt on B_0..B_n in the discrete
  L2(mu), phase-fixed so that lambda_n = 1;
* ``psi_integral``: the Cauchy-type integral for the second-kind function.

Basis conventions: B_k = zeta_1 ... zeta_k and zeta_0(z) = z (alpha_0 = 0).
"""

from dataclasses import dataclass, field
import json
import warnings

import numpy as np

from .errors import ConditioningWarning, DomainError, RankDeficient, SolveFailure
from .geometry import blaschke, blaschke_partial, blaschke_table, zeta

COND_LIMIT = 1e12


def _alphas(alphas, n):
    return alphas.take(n) if hasattr(alphas, "generator") else np.asarray(alphas, dtype=complex)


def _out(x):
    return x[()] if np.ndim(x) == 0 else x


# ---------------------------------------------------------------------------
# transfer route


@dataclass(frozen=True)
class OrfEval:
    """phi_n, psi_n and their stars at z; true values are ``X * exp(log_scale)``."""

    phi: np.ndarray
    phistar: np.ndarray
    psi: np.ndarray
    psistar: np.ndarray
    log_scale: np.ndarray
    n: int

    def values(self):
        s = np.exp(self.log_scale)
        return self.phi * s, self.phistar * s, self.psi * s, self.psistar * s


def orf_from_params(params, alphas, n, z):
    """Evaluate [[phi, psi], [phi*, -psi*]] =
    sqrt(1-|a_n|^2) / ((1 - conj(a_n) z) Pi_n) prod_{k=n..1} [[1, -conj g~_k], [-g~_k, 1]] diag(zeta_{k-1}, 1)
    [[1, 1], [1, -1]] with g~_k = gamma_{k-1} and Pi_n = sqrt(omega_{n-1})."""
    if n > params.n + 1:
        raise ValueError(f"order {n} needs gamma_0..gamma_{n - 1}")
    a = _alphas(alphas, max(n, 1))
    z = np.asarray(z, dtype=complex)
    m11 = np.ones(z.shape, dtype=complex)
    m12 = np.zeros(z.shape, dtype=complex)
    m21 = np.zeros(z.shape, dtype=complex)
    m22 = np.ones(z.shape, dtype=complex)
    log_scale = np.zeros(z.shape)
    for k in range(1, n + 1):
        gt = params.gammas[k - 1]
        zk = zeta(a[k - 1], z)
        # left-multiply: M <- [[1, -conj g], [-g, 1]] diag(zeta_{k-1}, 1) M, built right to left
        r11, r12 = zk * m11, zk * m12
        m11, m12, m21, m22 = (r11 - np.conj(gt) * m21, r12 - np.conj(gt) * m22,
                              -gt * r11 + m21, -gt * r12 + m22)
        s = np.maximum.reduce([np.abs(m11), np.abs(m12), np.abs(m21), np.abs(m22)])
        s = np.where(s > 0, s, 1.0)
        m11, m12, m21, m22 = m11 / s, m12 / s, m21 / s, m22 / s
        log_scale = log_scale + np.log(s)
    an = a[n]
    pref = np.sqrt(1.0 - abs(an) ** 2) / (1.0 - np.conj(an) * z)
    if n:
        pref = pref / np.sqrt(params.omegas[n - 1])
    phi = pref * (m11 + m12)
    psi = pref * (m11 - m12)
    phis = pref * (m21 + m22)
    psis = -pref * (m21 - m22)
    return OrfEval(_out(phi), _out(phis), _out(psi), _out(psis), _out(log_scale), n)


def orf_values(params, alphas, n, z):
    """Unscaled (phi, phi*, psi, psi*) at z."""
    return orf_from_params(params, alphas, n, z).values()


# ---------------------------------------------------------------------------
# coefficient route


@dataclass(frozen=True)
class OrfCoeffs:
    """Coefficients a_0..a_n of g = sum a_k B_k."""

    n: int
    alphas: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        a = np.asarray(self.alphas, dtype=complex)
        if c.shape != (self.n + 1,):
            raise ValueError("need n + 1 coefficients")
        if a.shape[0] < self.n + 1:
            raise ValueError("need alpha_0..alpha_n")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "alphas", a[: self.n + 1])

    @property
    def leading(self):
        return self.coeffs[-1]

    def __call__(self, z):
        tab = blaschke_table(self.alphas, self.n, z)
        return _out(np.tensordot(self.coeffs, tab, axes=1))

    def star(self, z):
        """g*(z) = sum conj(a_k) B_{n,k+1}(z)."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for k in range(self.n + 1):
            out = out + np.conj(self.coeffs[k]) * blaschke_partial(self.alphas, k + 1, self.n, z)
        return _out(out)

    def to_json(self):
        return {"n": self.n,
                "alphas": [[float(a.real), float(a.imag)] for a in self.alphas],
                "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        extra = set(obj) - {"n", "alphas", "coeffs"}
        if extra:
            raise ValueError(f"unknown keys in OrfCoeffs JSON: {sorted(extra)}")
        return cls(int(obj["n"]), np.array([complex(*v) for v in obj["alphas"]]),
                   np.array([complex(*v) for v in obj["coeffs"]]))


def star_in_basis(coeffs, alphas=None):
    """Coefficients of g* in the basis B_0..B_n.

    On the circle g* = B_n conj(g); both sides are sampled at n + 1 rotated
    roots of unity and the basis change is solved there.
    """
    n = coeffs.n
    a = coeffs.alphas if alphas is None else _alphas(alphas, n)[: n + 1]
    t = np.exp(1j * (2.0 * np.pi * np.arange(n + 1) / (n + 1) + 0.3183098861837907))
    V = blaschke_table(a, n, t).T
    rhs = blaschke(a, n, t) * np.conj(coeffs(t))
    try:
        c = np.linalg.solve(V, rhs)
    except np.linalg.LinAlgError as exc:
        raise SolveFailure(str(exc)) from exc
    return OrfCoeffs(n, a, c)


@dataclass(frozen=True)
class GeronimusParams:
    """gamma~_1..gamma~_n with the per-step eta_k and the residual lambda_k."""

    gammas_tilde: np.ndarray
    etas: np.ndarray
    lambdas: np.ndarray


@dataclass(frozen=True)
class GramSchmidtResult:
    phis: list
    geronimus: GeronimusParams
    condition: np.ndarray

    def __iter__(self):
        return iter((self.phis, self.geronimus))


def orf_gram_schmidt(mu, alphas, n, cond_limit=COND_LIMIT):
    """Orthonormalize B_0..B_n in L2(mu) and fix phases so lambda_k = 1.

    Atoms enter as extra weighted nodes.  Modified Gram-Schmidt with one
    reorthogonalization pass; raises RankDeficient at the first degree whose
    leading Gram block exceeds ``cond_limit``.
    """
    a = _alphas(alphas, n)[: n + 1]
    t, w = mu.quadrature_nodes()
    keep = w > 0
    t, w = t[keep], w[keep]
    basis = blaschke_table(a, n, t)
    sw = np.sqrt(w)
    X = basis * sw
    gram = X.conj() @ X.T
    conds = np.empty(n + 1)
    for k in range(n + 1):
        ev = np.linalg.eigvalsh(gram[: k + 1, : k + 1])
        conds[k] = np.inf if ev[0] <= 0 else ev[-1] / ev[0]
        if conds[k] > cond_limit:
            raise RankDeficient(k, conds[k])

    vecs = []
    coefs = []
    phis = []
    gt = [np.nan + 0j]
    etas = [np.nan + 0j]
    lams = [1.0 + 0j]
    for k in range(n + 1):
        v = X[k].copy()
        c = np.zeros(n + 1, dtype=complex)
        c[k] = 1.0
        for _ in range(2):
            for q, cq in zip(vecs, coefs):
                p = np.vdot(q, v)
                v = v - p * q
                c = c - p * cq
        nv = np.linalg.norm(v)
        v, c = v / nv, c / nv
        if k == 0:
            # phi_0 = +1: the constant has positive coefficient
            ph = np.conj(c[0]) / abs(c[0])
        else:
            cur = OrfCoeffs(k, a, c[: k + 1])
            ps = cur.star(a[k - 1])
            kap = coefs[-1][k - 1]
            e = 1.0 - a[k] * np.conj(a[k - 1])
            lam = (e / abs(e)) * (np.conj(ps) / abs(ps)) * (np.conj(kap) / abs(kap))
            ph = np.conj(lam)
        v, c = v * ph, c * ph
        vecs.append(v)
        coefs.append(c)
        cur = OrfCoeffs(k, a, c[: k + 1])
        phis.append(cur)
        if k >= 1:
            prev = a[k - 1]
            ps = cur.star(prev)
            gt.append(-np.conj(cur(prev)) / np.conj(ps))
            etas.append((1.0 - a[k] * np.conj(prev)) / (1.0 - np.conj(a[k]) * prev))
            e = 1.0 - a[k] * np.conj(prev)
            kap = phis[k - 1].leading
            lams.append((e / abs(e)) * (np.conj(ps) / abs(ps)) * (np.conj(kap) / abs(kap)))
    ger = GeronimusParams(np.array(gt[1:]), np.array(etas[1:]), np.array(lams[1:]))
    return GramSchmidtResult(phis, ger, conds)


def gram_matrix(mu, phis, weight=None):
    """Discrete Gram matrix of the given ORFs under mu (or ``weight`` dm)."""
    if weight is None:
        t, w = mu.quadrature_nodes()
    else:
        t = mu.grid.nodes
        w = np.asarray(weight) / mu.grid.M
    V = np.stack([p(t) for p in phis])
    return (V * w) @ V.conj().T


# ---------------------------------------------------------------------------
# second kind, u_n, kappa


def _phi_on_nodes(mu, phi):
    """phi at the grid nodes and atoms of mu, plus an interior evaluator."""
    if callable(phi):
        return np.asarray(phi(mu.grid.nodes), dtype=complex), np.asarray(phi(mu.atom_positions), dtype=complex), phi
    samples = np.asarray(phi, dtype=complex)
    if mu.atoms:
        raise DomainError("grid samples alone cannot evaluate phi at atoms; pass an evaluator")
    t = mu.grid.nodes

    def interior(z):
        # Cauchy integral of the boundary values
        z = np.asarray(z, dtype=complex).reshape(-1, 1)
        out = ((t / (t - z)) @ samples) / mu.grid.M
        return out

    return samples, np.zeros(0, dtype=complex), lambda z: _out(interior(z).reshape(np.shape(z)))


def psi_integral(mu, phi, z, n=None):
    """psi_n(z) = int (t + z) / (t - z) (phi_n(t) - phi_n(z)) dmu(t); psi_0 = 1.

    ``phi`` is an evaluator (preferred) or the grid samples of phi_n.
    """
    if n == 0:
        return _out(np.ones(np.shape(z), dtype=complex))
    z = np.asarray(z, dtype=complex)
    pg, pa, ev = _phi_on_nodes(mu, phi)
    tq, wq = mu.quadrature_nodes()
    vals = np.concatenate([pg, pa])
    pz = np.asarray(ev(z), dtype=complex).reshape(-1, 1)
    zz = z.reshape(-1, 1)
    K = (tq + zz) / (tq - zz)
    out = np.sum(K * (vals - pz) * wq, axis=1)
    return _out(out.reshape(z.shape))


def u_n_eval(mu, phi, z, orf=None, bn=None):
    """u_n(z) = 2 int conj(phi_n(t)) dmu(t) / (t - z).

    With ``orf`` (an unscaled (phi, phi*, psi, psi*) tuple at z) and ``bn``
    (B_n(z)) also returns the residual F_mu - psi*/phi* - z B_n u_n / phi*.
    """
    from .measure import herglotz_interior

    z = np.asarray(z, dtype=complex)
    pg, pa, _ = _phi_on_nodes(mu, phi)
    tq, wq = mu.quadrature_nodes()
    vals = np.conj(np.concatenate([pg, pa]))
    zz = z.reshape(-1, 1)
    u = (2.0 * np.sum(vals * wq / (tq - zz), axis=1)).reshape(z.shape)
    if orf is None:
        return _out(u), None
    _, phis, _, psis = orf
    F = herglotz_interior(mu, z, check=False)
    res = F - psis / phis - z * bn * u / phis
    return _out(u), _out(np.abs(res))


def kappa(params, alphas, n):
    """kappa_n = |phi_n*(alpha_n)| from the transfer route."""
    a = _alphas(alphas, max(n, 1))
    _, phis, _, _ = orf_values(params, alphas, n, a[n])
    return float(abs(phis))


def kappa_from_coeffs(coeffs):
    return float(abs(coeffs.leading))


def extremal_check(mu, alphas, n, kap, rng, count=100, scale=1.0):
    """Smallest L2(mu) norm among random xi in L_n with xi(alpha_n) = 1.

    Every value must be at least 1 / kappa_n.
    """
    a = _alphas(alphas, n)[: n + 1]
    tq, wq = mu.quadrature_nodes()
    tab = blaschke_table(a, n, tq)
    at = blaschke_table(a, n, a[n])
    best = np.inf
    for _ in range(count):
        c = scale * (rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1))
        val = np.dot(c, at)
        if abs(val) < 1e-8:
            continue
        c = c / val
        norm = np.sqrt(np.sum(wq * np.abs(c @ tab) ** 2))
        best = min(best, norm)
    return float(best)


def orf_recurrence_residual(params, alphas, n, z):
    """Relative residual of [phi_n; phi_n*] = T_n [phi_{n-1}; phi_{n-1}*] with lambda_n = 1."""
    if n < 1:
        raise ValueError("recurrence needs n >= 1")
    a = _alphas(alphas, n)
    z = np.asarray(z, dtype=complex)
    p1, s1, _, _ = orf_values(params, alphas, n, z)
    p0, s0, _, _ = orf_values(params, alphas, n - 1, z)
    gt = params.gammas[n - 1]
    c = (np.sqrt((1.0 - abs(a[n]) ** 2) / (1.0 - abs(a[n - 1]) ** 2)) / np.sqrt(1.0 - abs(gt) ** 2)
         * (1.0 - np.conj(a[n - 1]) * z) / (1.0 - np.conj(a[n]) * z))
    zp = zeta(a[n - 1], z) * p0
    r1 = p1 - c * (zp - np.conj(gt) * s0)
    r2 = s1 - c * (-gt * zp + s0)
    scale = np.abs(p1) + np.abs(s1)
    return _out(np.maximum(np.abs(r1), np.abs(r2)) / scale)


def wall_orf_bridge(params, alphas, n, z):
    """Residuals of the Wall/ORF relations at order n (needs gamma_0..gamma_n).

    Returns relative residuals of
    z B_n* - A_n* = c sqrt(omega_n) phi_{n+1}, B_n - z A_n = c sqrt(omega_n) phi*_{n+1}
    with c = (1 - conj(a_{n+1}) z) / sqrt(1 - |a_{n+1}|^2), and of
    psi*_{n+1} / phi*_{n+1} = (1 + z A_n / B_n) / (1 - z A_n / B_n).
    """
    from .wall import wall_eval

    a = _alphas(alphas, n + 1)
    z = np.asarray(z, dtype=complex)
    A, B, As, Bs = wall_eval(params, alphas, n, z).unscaled()
    phi, phis, psi, psis = orf_values(params, alphas, n + 1, z)
    c = (1.0 - np.conj(a[n + 1]) * z) / np.sqrt(1.0 - abs(a[n + 1]) ** 2) * np.sqrt(params.omegas[n])
    r1 = np.abs(z * Bs - As - c * phi) / (np.abs(z * Bs) + np.abs(As))
    r2 = np.abs(B - z * A - c * phis) / (np.abs(B) + np.abs(z * A))
    q = z * A / B
    herg = (1.0 + q) / (1.0 - q)
    r3 = np.abs(psis / phis - herg) / np.abs(herg)
    return _out(r1), _out(r2), _out(r3)


def orf_poisson_residual(params, alphas, n, t):
    """Relative residual of phi psi* + phi* psi = 2 B_n P(., alpha_n) on the circle."""
    from .geometry import poisson_kernel

    a = _alphas(alphas, max(n, 1))
    phi, phis, psi, psis = orf_values(params, alphas, n, t)
    lhs = phi * psis + phis * psi
    rhs = 2.0 * blaschke(alphas, n, t) * poisson_kernel(t, a[n])
    return _out(np.abs(lhs - rhs) / np.abs(rhs))
