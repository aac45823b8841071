"""Schur functions, the multipoint Schur algorithm and its remainders.

Parameters gamma_k = f_k(alpha_{k+1}) are extracted from point evaluations
only.  The chain of Mobius steps that produces f_k(x) from f(x) divides by
zeta_j(x) at every step, which amplifies rounding by prod 1/|zeta_j(x)|; for
interpolation points running towards the circle this product grows
geometrically, so the scalar chain runs in mpmath at a working precision
chosen from that amplification.  Repeated nodes are handled with truncated
Taylor series (see ``jets``) of any order.

Grid remainders f_n(t_j) use the same recurrence in double precision: on the
circle every zeta_j is unimodular and the steps do not amplify.
"""

from dataclasses import dataclass, field
import math

import mpmath as mp
import numpy as np

from .errors import DerivativeUnavailable, DomainError, FiniteBlaschkeDetected, ValidationError
from .geometry import zeta
from .jets import Jet, polynomial_jet, zeta_jet
from .measure import (ATOM_NODE_TOL, Atom, CircleGrid, CircleMeasure, herglotz_boundary,
                      measure_from_schur, schur_values_from_measure)

SCHUR_TOL = 1e-9
BLASCHKE_TOL = 1e-9
GAMMA_UNIMODULAR_TOL = 1e-12
RATIONAL_CHECK_M = 4096
MIN_DPS = 30
DPS_MARGIN = 25


def _complex(v):
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex value must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def _pair(z):
    z = complex(z)
    return [z.real, z.imag]


def _mpc(z):
    z = complex(z)
    return mp.mpc(z.real, z.imag)


def _out(z):
    return z[()] if np.ndim(z) == 0 else z


class SchurFunction:
    """Base class: a Schur function with a double evaluator and mp jets.

    Subclasses implement ``__call__`` (vectorized, closed disk) and
    ``jet(a, order)`` returning a :class:`Jet` of mp coefficients at the mp
    point ``a``.
    """

    kind = "abstract"
    boundary_continuous = True

    def __call__(self, z):
        raise NotImplementedError

    def jet(self, a, order):
        raise DerivativeUnavailable(f"{self.kind} function supplies no derivatives")

    def boundary(self, grid):
        """Samples on the grid nodes."""
        return np.asarray(self(grid.nodes), dtype=complex)

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class ConstantSchur(SchurFunction):
    value: complex = 0j
    kind = "constant"

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        if abs(self.value) > 1.0 + SCHUR_TOL:
            raise DomainError(f"constant {self.value} has modulus above 1")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return _out(np.full(z.shape, self.value, dtype=complex))

    def jet(self, a, order):
        return Jet.const(_mpc(self.value), order)

    def to_json(self):
        return {"kind": "constant", "value": _pair(self.value)}


@dataclass(frozen=True, eq=False)
class ScaledIdentity(SchurFunction):
    lam: complex = 0.5
    kind = "scaled_identity"

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        if abs(self.lam) > 1.0 + SCHUR_TOL:
            raise DomainError(f"scale {self.lam} has modulus above 1")

    def __call__(self, z):
        return _out(self.lam * np.asarray(z, dtype=complex))

    def jet(self, a, order):
        return Jet.variable(a, order) * _mpc(self.lam)

    def to_json(self):
        return {"kind": "scaled_identity", "lambda": _pair(self.lam)}


@dataclass(frozen=True, eq=False)
class RationalSchur(SchurFunction):
    """Quotient p/q of polynomials given by ascending complex coefficients."""

    num: tuple
    den: tuple
    kind = "rational"

    def __post_init__(self):
        num = tuple(_complex(c) for c in self.num)
        den = tuple(_complex(c) for c in self.den)
        while len(den) > 1 and den[-1] == 0:
            den = den[:-1]
        if not num or not den or all(c == 0 for c in den):
            raise DomainError("rational function needs non-empty numerator and non-zero denominator")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        if len(den) > 1:
            roots = np.roots(den[::-1])
            if roots.size and np.min(np.abs(roots)) <= 1.0 + 1e-12:
                raise DomainError("denominator vanishes in the closed disk")
        t = CircleGrid(RATIONAL_CHECK_M).nodes
        peak = float(np.max(np.abs(self(t))))
        if peak > 1.0 + SCHUR_TOL:
            raise DomainError(f"max |p/q| on the circle is {peak:.12g} > 1")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        p = np.polyval(self.num[::-1], z)
        q = np.polyval(self.den[::-1], z)
        return _out(p / q)

    def jet(self, a, order):
        p = polynomial_jet([_mpc(c) for c in self.num], a, order)
        q = polynomial_jet([_mpc(c) for c in self.den], a, order)
        return p / q

    def to_json(self):
        return {"kind": "rational", "num": [_pair(c) for c in self.num],
                "den": [_pair(c) for c in self.den]}


@dataclass(frozen=True, eq=False)
class SingularInner(SchurFunction):
    """exp(sigma (z + xi) / (z - xi)); boundary value 0 at the singular point xi."""

    sigma: float = 1.0
    xi: complex = 1.0
    kind = "singular_inner"
    boundary_continuous = False

    def __post_init__(self):
        xi = complex(self.xi)
        if abs(abs(xi) - 1.0) > 1e-12 or self.sigma <= 0:
            raise DomainError("singular inner function needs |xi| = 1 and sigma > 0")
        object.__setattr__(self, "xi", xi / abs(xi))
        object.__setattr__(self, "sigma", float(self.sigma))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        d = z - self.xi
        hit = np.abs(d) < 1e-300
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = np.exp(self.sigma * (z + self.xi) / np.where(hit, 1.0, d))
        return _out(np.where(hit, 0.0, out))

    def boundary(self, grid):
        # (t + xi) / (t - xi) = -i cot(s / 2) for t = xi e^{is}: exactly unimodular
        s = np.angle(grid.nodes / self.xi)
        hit = np.abs(s) < 1e-300
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.exp(-1j * self.sigma / np.tan(np.where(hit, 1.0, s) / 2))
        return np.where(hit, 0.0, out)

    def jet(self, a, order):
        xi = _mpc(self.xi)
        z = Jet.variable(a, order)
        return ((z + xi) / (z - xi) * self.sigma).exp()

    def to_json(self):
        return {"kind": "singular_inner", "sigma": self.sigma, "xi": _pair(self.xi)}


@dataclass(frozen=True, eq=False)
class ProductSchur(SchurFunction):
    factors: tuple
    kind = "product"

    def __call__(self, z):
        out = np.ones(np.shape(z), dtype=complex)
        for g in self.factors:
            out = out * g(z)
        return _out(out)

    @property
    def boundary_continuous(self):
        return all(g.boundary_continuous for g in self.factors)

    def jet(self, a, order):
        out = Jet.const(mp.mpc(1), order)
        for g in self.factors:
            out = out * g.jet(a, order)
        return out

    def boundary(self, grid):
        out = np.ones(grid.M, dtype=complex)
        for g in self.factors:
            out = out * g.boundary(grid)
        return out

    def to_json(self):
        return {"kind": "product", "factors": [g.to_json() for g in self.factors]}


@dataclass(frozen=True, eq=False)
class CompositionSchur(SchurFunction):
    """outer(inner(z)); inner must be a Schur function."""

    outer: SchurFunction
    inner: SchurFunction
    kind = "composition"

    @property
    def boundary_continuous(self):
        return self.outer.boundary_continuous and self.inner.boundary_continuous

    def __call__(self, z):
        return self.outer(self.inner(z))

    def jet(self, a, order):
        g = self.inner.jet(a, order)
        return self.outer.jet(g.value, order).compose_into(g)

    def to_json(self):
        return {"kind": "composition", "outer": self.outer.to_json(), "inner": self.inner.to_json()}


class CallableSchur(SchurFunction):
    """Wraps a plain vectorized callable; no derivatives, so no repeated nodes."""

    kind = "callable"

    def __init__(self, fn, boundary_continuous=True):
        self.fn = fn
        self.boundary_continuous = boundary_continuous

    def __call__(self, z):
        return _out(np.asarray(self.fn(np.asarray(z, dtype=complex)), dtype=complex))

    def jet(self, a, order):
        if order > 1:
            raise DerivativeUnavailable("callable Schur function cannot seed a confluent step")
        return Jet([_mpc(self(complex(a)))])

    def to_json(self):
        raise ValidationError("callable Schur functions are not serializable")


class MeasureSchur(SchurFunction):
    """The Schur function of a probability measure, f = (F - 1) / (z (F + 1)).

    Evaluated through G / (F + 1) with G = 2 int dmu / (t - z), which has no
    removable singularity at 0.  Jets use mp sums over the quadrature nodes,
    with the weights renormalized to unit total mass.
    """

    kind = "measure"

    def __init__(self, mu, spec=None):
        if not mu.probability:
            raise DomainError("measure-induced Schur function needs a probability measure")
        self.mu = mu
        self.spec = spec
        self.boundary_continuous = mu.is_absolutely_continuous
        self._mp_cache = None

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        on_circle = np.abs(np.abs(z) - 1.0) <= 1e-12
        out = np.empty(z.shape, dtype=complex)
        if np.any(on_circle):
            bnd = self.boundary(self.mu.grid)
            idx = [self.mu.grid.index_of(t) for t in np.atleast_1d(z[on_circle])]
            out[on_circle] = bnd[idx]
        inside = ~on_circle
        if np.any(inside):
            out[inside] = schur_values_from_measure(self.mu, z[inside])
        return _out(out)

    def boundary(self, grid):
        if grid.M != self.mu.M or grid.phase != self.mu.grid.phase:
            raise DomainError("measure-induced boundary values exist only on the measure's grid")
        if not hasattr(self, "_boundary"):
            F = herglotz_boundary(self.mu)
            F = F / self.mu.total_mass
            t = grid.nodes
            self._boundary = (F - 1.0) / (t * (F + 1.0))
        return self._boundary

    def _mp_nodes(self):
        dps = mp.mp.dps
        if self._mp_cache is None or self._mp_cache[0] < dps:
            t, w = self.mu.quadrature_nodes()
            w = w / np.sum(w)
            self._mp_cache = (dps, [_mpc(x) for x in t], [mp.mpf(float(x)) for x in w])
        return self._mp_cache[1], self._mp_cache[2]

    def jet(self, a, order):
        ts, ws = self._mp_nodes()
        g = [mp.mpc(0)] * order
        c = [mp.mpc(0)] * order
        for t, w in zip(ts, ws):
            if w == 0:
                continue
            r = 1 / (t - a)
            p = w * r
            c[0] += w * (t + a) * r
            for m in range(order):
                g[m] += p
                if m:
                    c[m] += 2 * t * p
                p *= r
        G = Jet([2 * x for x in g])
        F = Jet(c)
        return G / (F + 1)

    def to_json(self):
        if self.spec is not None:
            return dict(self.spec)
        return {"kind": "measure", "measure": self.mu.to_json()}


def schur_function_from_spec(spec, M=None):
    """Build a SchurFunction from a config mapping.

    ``M`` sets the grid of measure-induced kinds when the mapping omits it.
    """
    spec = dict(spec)
    kind = spec.get("kind")

    def keys(*allowed):
        extra = set(spec) - {"kind", *allowed}
        if extra:
            raise ValidationError(f"unknown keys for function kind {kind!r}: {sorted(extra)}")

    if kind == "constant":
        keys("value")
        return ConstantSchur(_complex(spec.get("value", 0.0)))
    if kind == "scaled_identity":
        keys("lambda")
        return ScaledIdentity(_complex(spec["lambda"]))
    if kind == "rational":
        keys("num", "den")
        return RationalSchur(tuple(spec["num"]), tuple(spec["den"]))
    if kind == "singular_inner":
        keys("sigma", "xi")
        return SingularInner(float(spec.get("sigma", 1.0)), _complex(spec.get("xi", [1.0, 0.0])))
    if kind == "product":
        keys("factors")
        return ProductSchur(tuple(schur_function_from_spec(g, M) for g in spec["factors"]))
    if kind == "composition":
        keys("outer", "inner")
        return CompositionSchur(schur_function_from_spec(spec["outer"], M),
                                schur_function_from_spec(spec["inner"], M))
    if kind == "measure":
        keys("base", "atoms", "M", "measure")
        if "measure" in spec:
            return MeasureSchur(CircleMeasure.from_json(spec["measure"]), spec)
        grid_m = int(spec.get("M", M or 4096))
        atoms = tuple(Atom(float(a["theta"]), float(a["mass"])) for a in spec.get("atoms", []))
        base = schur_function_from_spec(spec.get("base", {"kind": "constant", "value": [0, 0]}), grid_m)
        return MeasureSchur(mixed_measure(base, grid_m, atoms), spec)
    raise ValidationError(f"unknown function kind {kind!r}")


def mixed_measure(base, M, atoms=()):
    """(1 - sum of atom masses) times the a.c. measure of ``base`` plus atoms."""
    atoms = tuple(atoms)
    mass = sum(a.mass for a in atoms)
    if not 0.0 <= mass < 1.0:
        raise DomainError("atom masses must sum to less than 1")
    grid = CircleGrid(M)
    if any(np.min(np.abs(grid.nodes - a.position)) < ATOM_NODE_TOL for a in atoms):
        grid = grid.rotated_half()
    ac = measure_from_schur(base, grid)
    dens = ac.density / ac.density.mean() * (1.0 - mass)
    return CircleMeasure(grid, dens, atoms, True)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class SchurValidation:
    max_modulus: float
    min_modulus: float
    max_jump: float
    finite_blaschke: bool
    passed: bool


def validate_schur(f, grid):
    """Report max and min |f| on the grid, the largest adjacent-node jump and
    whether f looks like a finite Blaschke product (|f| = 1 everywhere)."""
    v = np.asarray(f.boundary(grid), dtype=complex)
    mod = np.abs(v)
    jump = float(np.max(np.abs(np.diff(np.concatenate([v, v[:1]])))))
    mx, mn = float(mod.max()), float(mod.min())
    blaschke = mn > 1.0 - BLASCHKE_TOL
    return SchurValidation(mx, mn, jump, blaschke, mx <= 1.0 + SCHUR_TOL and not blaschke)


# ---------------------------------------------------------------------------
# Schur algorithm


@dataclass(frozen=True)
class SchurParams:
    """Parameters gamma_0..gamma_n and running products omega_k.

    ``hp`` keeps the mp values of the chain at ``dps`` digits.
    """

    gammas: np.ndarray
    omegas: np.ndarray
    hp: tuple = ()
    dps: int = MIN_DPS

    @property
    def n(self):
        return len(self.gammas) - 1

    def truncate(self, n):
        return SchurParams(self.gammas[: n + 1], self.omegas[: n + 1], self.hp[: n + 1], self.dps)

    @classmethod
    def from_gammas(cls, gammas):
        g = np.asarray(gammas, dtype=complex)
        if np.any(np.abs(g) >= 1.0):
            raise DomainError("Schur parameters must lie in the open disk")
        return cls(g, np.cumprod(1.0 - np.abs(g) ** 2), tuple(_mpc(x) for x in g), MIN_DPS)


def _alphas(alphas, n):
    return alphas.take(n) if hasattr(alphas, "generator") else np.asarray(alphas, dtype=complex)


def chain_precision(alpha_arr, targets, upto, orders=None):
    """Decimal digits for the scalar chain.

    For each target x (with the number of steps it passes through) the
    rounding amplification is prod 1/|zeta_j(x)| over steps whose node differs
    from x.  A jet of order m divides its top coefficient by zeta_j(x) m
    times, so the exponent is weighted by ``orders[x]`` (default 1).
    """
    orders = orders or {}
    worst = 0.0
    for x, k in zip(targets, upto):
        s = 0.0
        for j in range(1, k + 1):
            a = alpha_arr[j]
            if a == x:
                continue
            s -= math.log10(max(abs(zeta(a, x)), 1e-300))
        worst = max(worst, s * orders.get(x, 1))
    return max(MIN_DPS, DPS_MARGIN + int(math.ceil(worst)))


def schur_parameters(f, alphas, n, dps=None):
    """gamma_k = f_k(alpha_{k+1}) for k = 0..n.

    One jet state per distinct node is advanced through the steps, so each
    f_k(x) is produced by the forward recurrence from f(x) and its Taylor
    coefficients; the order of a state equals one plus the number of times
    its node occurs among alpha_1..alpha_n.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    a = _alphas(alphas, n + 1)
    order = {}
    for m in range(1, n + 1):
        order[a[m]] = order.get(a[m], 1) + 1
    for k in range(n + 1):
        order.setdefault(a[k + 1], 1)
    if dps is None:
        dps = chain_precision(a, [a[k + 1] for k in range(n + 1)], list(range(n + 1)), order)
    with mp.workdps(dps):
        states = {}
        hp = []
        for k in range(n + 1):
            x = a[k + 1]
            if x not in states:
                # a node first met at step k: seed it and replay steps 0..k-1
                st = f.jet(_mpc(x), order[x])
                for j in range(k):
                    st = _step(st, hp[j], a[j + 1], x)
                states[x] = st
            g = states[x].value
            if abs(g) >= 1 - GAMMA_UNIMODULAR_TOL:
                raise FiniteBlaschkeDetected(f"|gamma_{k}| = {float(abs(g)):.15g}")
            hp.append(g)
            if k < n:
                for y in states:
                    states[y] = _step(states[y], g, a[k + 1], y)
    gam = np.array([complex(g) for g in hp])
    with mp.workdps(dps):
        om = []
        acc = mp.mpf(1)
        for g in hp:
            acc *= 1 - abs(g) ** 2
            om.append(float(acc))
    return SchurParams(gam, np.array(om), tuple(hp), dps)


def _step(st, g, alpha_next, x):
    """One Schur step (F - g) / ((1 - conj(g) F) zeta_{next}) on a jet at x."""
    z = zeta_jet(_mpc(alpha_next), _mpc(x), st.order)
    return (st - g) / ((1 - mp.conj(g) * st) * z)


def remainder_at(f, alphas, params, n, z):
    """f_n(z) for an interior point by the mp scalar chain."""
    if n > params.n + 1:
        raise ValueError(f"params hold gamma_0..gamma_{params.n}; cannot reach f_{n}")
    z = complex(z)
    if abs(z) >= 1.0:
        raise DomainError("remainder_at needs an interior point")
    a = _alphas(alphas, max(n, 1))
    mult = sum(1 for m in range(1, n + 1) if a[m] == z)
    dps = max(params.dps, chain_precision(a, [z], [n], {z: mult + 1}))
    hp = params.hp if params.hp else tuple(_mpc(g) for g in params.gammas)
    with mp.workdps(dps):
        st = f.jet(_mpc(z), mult + 1)
        for j in range(n):
            st = _step(st, hp[j], a[j + 1], z)
        return complex(st.value)


def remainder_on_grid(f, alphas, params, n, grid):
    """Samples of f_n at the grid nodes (double-precision forward recurrence)."""
    return remainder_table(f, alphas, params, n, grid)[n]


UNIMODULAR_TOL = 1e-12


def remainder_table(f, alphas, params, n, grid, amp_limit=4.0):
    """Rows f_0, ..., f_n sampled on the grid.

    The double chain tracks log10 of the accumulated Mobius derivative
    (1 - |g|^2) / |1 - conj(g) f|^2 at every node.  Where it exceeds
    ``amp_limit`` (typically next to a boundary singularity, where f_k keeps
    landing near gamma_k) the node is recomputed in mpmath from the same
    double samples of f.

    Nodes where |f| = 1 to within ``UNIMODULAR_TOL`` are kept on the circle
    after every step: each step is a disk automorphism divided by a
    unimodular factor, so |f_k| = 1 there exactly, while the phase inherits
    the (possibly huge) boundary derivative and is only as good as the data.
    """
    if n > params.n + 1:
        raise ValueError(f"params hold gamma_0..gamma_{params.n}; cannot reach f_{n}")
    a = _alphas(alphas, max(n, 1))
    t = grid.nodes
    f0 = np.asarray(f.boundary(grid), dtype=complex)
    unimodular = np.abs(np.abs(f0) - 1.0) <= UNIMODULAR_TOL
    cur = np.where(unimodular, f0 / np.where(unimodular, np.abs(f0), 1.0), f0)
    rows = [cur]
    amp = np.zeros(grid.M)
    peak = np.zeros(grid.M)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for j in range(n):
            g = params.gammas[j]
            den = 1.0 - np.conj(g) * cur
            amp = amp + np.log10((1.0 - abs(g) ** 2) / np.abs(den) ** 2)
            peak = np.maximum(peak, amp)
            cur = (cur - g) / (den * zeta(a[j + 1], t))
            cur = np.where(unimodular, cur / np.abs(cur), cur)
            rows.append(cur)
    table = np.stack(rows)
    bad = ~(peak <= amp_limit) | ~np.all(np.isfinite(table), axis=0)
    bad = np.nonzero(bad & ~unimodular)[0]
    if bad.size:
        table[:, bad] = _remainder_columns_mp(f0[bad], t[bad], a, params, n)
    return table


def _remainder_columns_mp(f0, t, a, params, n):
    hp = params.hp if params.hp else tuple(_mpc(g) for g in params.gammas)
    out = np.empty((n + 1, f0.size), dtype=complex)
    dps = params.dps + 20
    while True:
        worst = 0.0
        with mp.workdps(dps):
            alph = [_mpc(x) for x in a[: n + 1]]
            for i, (v0, tt) in enumerate(zip(f0, t)):
                v, x = _mpc(v0), _mpc(tt)
                out[0, i] = v0
                amp = mp.mpf(0)
                for j in range(n):
                    g = hp[j]
                    den = 1 - mp.conj(g) * v
                    amp += mp.log10((1 - abs(g) ** 2) / abs(den) ** 2)
                    worst = max(worst, float(amp))
                    z = (x - alph[j + 1]) / (1 - mp.conj(alph[j + 1]) * x)
                    v = (v - g) / (den * z)
                    out[j + 1, i] = complex(v)
        if worst + 25 <= dps:
            return out
        dps = int(worst) + 40


def remainder_values(f, alphas, params, n, z):
    """Double-precision chain at arbitrary points off the interpolation nodes."""
    a = _alphas(alphas, max(n, 1))
    z = np.asarray(z, dtype=complex)
    cur = np.asarray(f(z), dtype=complex)
    for j in range(n):
        g = params.gammas[j]
        cur = (cur - g) / ((1.0 - np.conj(g) * cur) * zeta(a[j + 1], z))
    return _out(cur)
