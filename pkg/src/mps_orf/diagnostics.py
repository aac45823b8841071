"""Convergence functionals and identity residuals as sequences in n.

A :class:`Pipeline` holds the shared state of one run (Schur parameters,
grid remainders, Poisson kernels, Szego functions) and every functional is
a pure function of ``(pipeline, n)``.  Poisson-weighted integrals refuse to
run when the grid cannot resolve the kernel, i.e. when M (1 - |alpha|) < 50,
unless the pipeline was built with ``force=True``.
"""

from dataclasses import dataclass, field
from functools import cached_property
import math
import warnings

import numpy as np

from .errors import HyperbolicOverflow, ResolutionRefused, ResolutionWarning
from .geometry import (RHO_OVERFLOW, blaschke, hyperbolic_from_rho, poisson_kernel,
                       pseudo_hyperbolic, pseudo_hyperbolic_from_defects, zeta)
from .measure import (RESOLUTION_MIN, CircleGrid, analytic_part, herglotz_boundary,
                      measure_from_schur, second_kind_measure, szego_function)
from .orf import (extremal_check, orf_from_params, orf_gram_schmidt, orf_poisson_residual,
                  orf_recurrence_residual, orf_values, psi_integral, u_n_eval, wall_orf_bridge)
from .schur import UNIMODULAR_TOL, MeasureSchur, SchurParams, remainder_table, schur_parameters
from .wall import circle_determinant_residual, reconstruct_f, two_path_residual, wall_eval

SCHUR_SERIES = ("gamma_abs", "gamma_re", "gamma_im", "omega", "remainder_energy", "pseudo_error",
                "hyperbolic_error", "log_defect", "lp_error", "sup_error")
ORF_SERIES = ("kappa", "szego_quantity", "l2_gap", "l2_gap_dual", "pointwise_gap", "weakstar_gap",
              "boundary_uniform_gap", "apriori_monitor", "un_bound")
SCHUR_RESIDUALS = ("det_circle", "two_path", "interpolation", "metric_identity",
                   "boundary_error_identity", "reconstruction", "schur_modulus",
                   "energy_pseudo_gap", "lp_chain")
ORF_RESIDUALS = ("e7", "orf_poisson", "measure_reconstruction", "bridge", "orf_recurrence",
                 "divfmu", "psi_integral", "szego_bound")


def default_testfns():
    """Trigonometric test functions of degree at most 3."""
    return {
        "one": lambda t: np.ones_like(t.real),
        "re_t": lambda t: t.real,
        "im_t": lambda t: t.imag,
        "re_t2": lambda t: (t ** 2).real,
        "im_t3": lambda t: (t ** 3).imag,
        "trig3": lambda t: 1.0 + 0.5 * t.real - 0.3 * (t ** 2).imag + 0.2 * (t ** 3).real,
    }


@dataclass
class PipelineOptions:
    orf: bool = True
    lp_exponents: tuple = (2.0, 6.0)
    arc_I: tuple = (-math.pi / 2, math.pi / 2)
    arc_K: tuple = (math.pi / 2, 3 * math.pi / 2)
    pointwise_z: dict = field(default_factory=lambda: {"kind": "alpha"})
    interior_points: int = 20
    gram_schmidt_max: int = 12
    force: bool = False
    seed: int = 0


class Pipeline:
    """Precomputed state for diagnostics of f against alphas up to n_max."""

    def __init__(self, f, alphas, M, n_max, options=None, mu=None):
        self.f = f
        self.alphas = alphas
        self.n_max = int(n_max)
        self.opt = options or PipelineOptions()
        self.warnings = []
        self.a = alphas.take(self.n_max + 2)
        if isinstance(f, MeasureSchur):
            self.mu = f.mu
            self.grid = f.mu.grid
            if self.grid.M != M:
                raise ValueError("measure grid size differs from the scenario grid size")
        else:
            self.grid = CircleGrid(M)
            self.mu = mu
        self.t = self.grid.nodes
        self.check_resolution()
        self.params = schur_parameters(f, alphas, self.n_max + 1)
        self.fb = np.asarray(f.boundary(self.grid), dtype=complex)
        self.rem = remainder_table(f, self.a, self.params, self.n_max + 2, self.grid)
        self.P = np.stack([poisson_kernel(self.t, self.a[k]) for k in range(self.n_max + 2)])

    # guards ---------------------------------------------------------------
    def check_resolution(self):
        worst = None
        for k in range(self.n_max + 2):
            r = self.grid.M * (1.0 - abs(self.a[k]))
            if r < RESOLUTION_MIN:
                worst = (k, r)
                break
        if worst is None:
            return
        msg = (f"M (1 - |alpha_{worst[0]}|) = {worst[1]:.1f} < {RESOLUTION_MIN:g}: "
               "Poisson-weighted integrals are under-resolved")
        if not self.opt.force:
            raise ResolutionRefused(msg)
        self.warn(msg, ResolutionWarning)

    def warn(self, msg, category=UserWarning):
        if msg not in self.warnings:
            self.warnings.append(msg)
        warnings.warn(msg, category, stacklevel=2)

    # shared measure-side state ---------------------------------------------
    @cached_property
    def measure(self):
        if self.mu is None:
            self.mu = measure_from_schur(self.f, self.grid, probability=True)
        return self.mu

    @cached_property
    def szego(self):
        S = szego_function(self.measure)
        if S.clipped:
            self.warn(f"Szego: {S.clipped} of {self.grid.M} density samples clipped at floor")
        return S

    @cached_property
    def measure_dual(self):
        return second_kind_measure(self.measure)

    @cached_property
    def szego_dual(self):
        S = szego_function(self.measure_dual)
        if S.clipped:
            self.warn(f"dual Szego: {S.clipped} of {self.grid.M} density samples clipped at floor")
        return S

    @cached_property
    def herglotz_b(self):
        return herglotz_boundary(self.measure)

    @cached_property
    def params_dual(self):
        return SchurParams(-self.params.gammas, self.params.omegas,
                           tuple(-g for g in self.params.hp), self.params.dps)

    @cached_property
    def interior_z(self):
        rng = np.random.default_rng(self.opt.seed)
        m = self.opt.interior_points
        return 0.8 * np.sqrt(rng.uniform(size=m)) * np.exp(2j * np.pi * rng.uniform(size=m))

    def orf_grid(self, n):
        return orf_values(self.params, self.a, n, self.t)

    def approx_grid(self, n):
        return wall_eval(self.params, self.a, n, self.t).ratio

    def rho_grid(self, n):
        """rho(f, A_n / B_n) on the grid.

        On the circle 1 - |A_n / B_n|^2 = omega_n / |B_n|^2, which stays
        accurate when the approximant is unimodular to working precision.
        """
        w = wall_eval(self.params, self.a, n, self.t)
        dr = self.params.omegas[n] * np.exp(-2.0 * w.log_scale) / np.abs(w.B) ** 2
        return pseudo_hyperbolic_from_defects(self.fb, w.ratio, self.fb_defect, dr)

    @cached_property
    def fb_defect(self):
        d = 1.0 - np.abs(self.fb) ** 2
        return np.where(np.abs(d) <= 2 * UNIMODULAR_TOL, 0.0, d)

    def mask(self, arc):
        return self.grid.in_arc(*arc)

    # gram-schmidt is optional and capped in degree
    @cached_property
    def gram_schmidt(self):
        m = min(self.n_max, self.opt.gram_schmidt_max)
        return orf_gram_schmidt(self.measure, self.a, m)


# ---------------------------------------------------------------------------
# Schur-side series


def remainder_energy(pipe, n):
    """int |f_n|^2 P(., alpha_n) dm."""
    return float(np.mean(np.abs(pipe.rem[n]) ** 2 * pipe.P[n]))


def pseudo_error(pipe, n):
    """int rho(f, A_n / B_n)^2 P(., alpha_{n+1}) dm."""
    rho = pipe.rho_grid(n)
    return float(np.mean(rho ** 2 * pipe.P[n + 1]))


def hyperbolic_error(pipe, n):
    """int H(f, A_n / B_n)^2 P(., alpha_{n+1}) dm; +inf when rho overflows."""
    rho = pipe.rho_grid(n)
    if np.any(rho > RHO_OVERFLOW):
        return math.inf
    return float(np.mean(hyperbolic_from_rho(rho) ** 2 * pipe.P[n + 1]))


def log_defect(pipe, n):
    """int log(1 - |f_n|^2) P(., alpha_n) dm; -inf when |f_n| reaches 1."""
    d = 1.0 - np.abs(pipe.rem[n]) ** 2
    if np.any(d <= 0):
        return -math.inf
    return float(np.mean(np.log(d) * pipe.P[n]))


def lp_error(pipe, n, p=2.0):
    """int |f - A_n / B_n|^p P(., alpha_{n+1}) dm."""
    e = np.abs(pipe.fb - pipe.approx_grid(n))
    return float(np.mean(e ** p * pipe.P[n + 1]))


def sup_error(pipe, n):
    """max over the grid of |f - A_n / B_n| sqrt(P(., alpha_{n+1}))."""
    e = np.abs(pipe.fb - pipe.approx_grid(n))
    return float(np.max(e * np.sqrt(pipe.P[n + 1])))


# ---------------------------------------------------------------------------
# Szego-side series


def szego_suite(pipe, n):
    """Szego quantity, bound flag, L2 gaps (primal and dual) and pointwise gap."""
    a = pipe.a[n]
    S = pipe.szego
    phi, phis, psi, psis = pipe.orf_grid(n)
    _, phis_a, _, psis_a = orf_values(pipe.params, pipe.a, n, a)
    Sa = S(a)
    kap = abs(phis_a)
    quantity = float(kap ** 2 * abs(Sa) ** 2 * (1.0 - abs(a) ** 2))
    k_n = np.sqrt(1.0 - abs(a) ** 2) / (1.0 - np.conj(a) * pipe.t)

    def gap(Sb, star_b, value_at_a):
        beta = value_at_a / abs(value_at_a)
        return float(np.sqrt(np.mean(np.abs(Sb * star_b - beta * k_n) ** 2))), beta

    l2, beta = gap(S.boundary, phis, Sa * phis_a)
    Sd = pipe.szego_dual
    l2d, _ = gap(Sd.boundary, psis, Sd(a) * psis_a)
    zn = pointwise_point(pipe, n)
    _, phis_z, _, _ = orf_values(pipe.params, pipe.a, n, zn)
    w = math.sqrt(1.0 - abs(zn) ** 2)
    pw = abs(phis_z * S(zn) * w - beta * math.sqrt(1.0 - abs(a) ** 2) * w / (1.0 - np.conj(a) * zn))
    return {"quantity": quantity, "bound_ok": quantity <= 1.0 + 1e-8, "l2_gap": l2,
            "l2_gap_dual": l2d, "pointwise_gap": float(pw), "kappa": float(kap)}


def pointwise_point(pipe, n):
    spec = pipe.opt.pointwise_z
    kind = spec.get("kind", "alpha")
    if kind == "alpha":
        return complex(pipe.a[n])
    if kind == "fixed":
        z = spec.get("z", [0.0, 0.0])
        return complex(z[0], z[1]) if isinstance(z, (list, tuple)) else complex(z)
    if kind == "radial":
        # z_n = r_n xi with 1 - r_n = c / (n + 2)
        c = float(spec.get("c", 1.0))
        return (1.0 - c / (n + 2)) * complex(1.0, 0.0)
    raise ValueError(f"unknown pointwise sequence {kind!r}")


def weakstar_gap(pipe, n, testfns=None):
    """max over h of |int h P(., alpha_n) / |phi_n|^2 dm - int h dmu|."""
    testfns = testfns or default_testfns()
    phi = pipe.orf_grid(n)[0]
    w = pipe.P[n] / np.abs(phi) ** 2
    mu = pipe.measure
    best = 0.0
    for h in testfns.values():
        lhs = np.mean(h(pipe.t) * w)
        rhs = mu.integrate(h(pipe.t), h(mu.atom_positions) if mu.atoms else None)
        best = max(best, float(abs(lhs - rhs)))
    return best


def boundary_uniform_gap(pipe, n, arc=None):
    """max over grid nodes of the arc of |F_mu phi_n* - psi_n*|."""
    arc = arc or pipe.opt.arc_I
    m = pipe.mask(arc)
    _, phis, _, psis = pipe.orf_grid(n)
    return float(np.max(np.abs(pipe.herglotz_b * phis - psis)[m]))


def un_boundary(pipe, n):
    """Boundary values of u_n on the grid: 2 (analytic part of conj(phi_n) mu') + atom kernels."""
    phi = pipe.orf_grid(n)[0]
    mu = pipe.measure
    u = 2.0 * analytic_part(pipe.grid, np.conj(phi) * mu.density, shift=1)
    if mu.atoms:
        tau = mu.atom_positions
        ph_tau = orf_values(pipe.params, pipe.a, n, tau)[0]
        for tk, mk, pk in zip(tau, mu.atom_masses, ph_tau):
            u = u + 2.0 * mk * np.conj(pk) / (tk - pipe.t)
    return u


def apriori_monitor(pipe, n, arc=None):
    """max over K of mu'^2 |phi_n|^2 - mu' P(., alpha_n)."""
    arc = arc or pipe.opt.arc_K
    m = pipe.mask(arc)
    phi = pipe.orf_grid(n)[0]
    d = pipe.measure.density
    return float(np.max((d ** 2 * np.abs(phi) ** 2 - d * pipe.P[n])[m]))


def un_bound(pipe, n, arc=None):
    arc = arc or pipe.opt.arc_K
    return float(np.max(np.abs(un_boundary(pipe, n))[pipe.mask(arc)]))


# ---------------------------------------------------------------------------
# residuals


def schur_residuals(pipe, n):
    """Identity residual maxima at order n for the Schur/Wall side."""
    p, a, t = pipe.params, pipe.a, pipe.t
    ratio = pipe.approx_grid(n)
    fb = pipe.fb
    tail = pipe.rem[n + 1]
    out = {}
    out["det_circle"] = float(np.max(circle_determinant_residual(p, a, n, t)))
    out["two_path"] = float(np.max(two_path_residual(p, a, n, t)))
    ai = a[1: n + 2]
    fa = np.asarray(pipe.f(ai), dtype=complex)
    out["interpolation"] = float(np.max(np.abs(wall_eval(p, a, n, ai).ratio - fa) * (1.0 - np.abs(ai))))
    out["metric_identity"] = float(np.max(np.abs(pipe.rho_grid(n) - np.abs(tail))))
    out["boundary_error_identity"] = float(np.max(np.abs(
        np.abs(fb - ratio) - np.abs(tail) * np.abs(1.0 - ratio * np.conj(fb)))))
    out["reconstruction"] = float(np.max(np.abs(reconstruct_f(p, a, n, t, tail) - fb)))
    out["schur_modulus"] = float(max(0.0, np.max(np.abs(pipe.rem[n])) - 1.0))
    out["energy_pseudo_gap"] = abs(pseudo_error(pipe, n) - remainder_energy(pipe, n + 1))
    out["lp_chain"] = max(0.0, lp_error(pipe, n, 2.0) - 4.0 * remainder_energy(pipe, n + 1))
    return out


def orf_residuals(pipe, n, quantity=None, defect=None):
    """Identity residual maxima at order n for the ORF side."""
    p, a, t = pipe.params, pipe.a, pipe.t
    out = {}
    if quantity is not None and defect is not None:
        out["e7"] = abs(defect - math.log(quantity)) if quantity > 0 and math.isfinite(defect) else math.inf
        out["szego_bound"] = max(0.0, quantity - 1.0)
    out["orf_poisson"] = float(np.max(orf_poisson_residual(p, a, n, t)))
    phi, phis, _, _ = pipe.orf_grid(n)
    fn = pipe.rem[n]
    zn = zeta(a[n], t) if n else t
    recon = (1.0 - np.abs(fn) ** 2) / np.abs(1.0 - zn * (phi / phis) * fn) ** 2 * pipe.P[n] / np.abs(phi) ** 2
    d = pipe.measure.density
    sel = d > 1e-8
    out["measure_reconstruction"] = float(np.max(np.abs(recon[sel] - d[sel]) / d[sel]))
    out["bridge"] = float(max(np.max(r) for r in wall_orf_bridge(p, a, n, t)))
    z = pipe.interior_z
    out["orf_recurrence"] = float(np.max(orf_recurrence_residual(p, a, n, z))) if n >= 1 else 0.0
    vals = orf_values(p, a, n, z)

    def ev(x):
        return orf_values(p, a, n, x)[0]

    _, res = u_n_eval(pipe.measure, ev, z, orf=vals, bn=blaschke(a, n, z))
    out["divfmu"] = float(np.max(res))
    if n >= 1:
        psi = psi_integral(pipe.measure, ev, z, n)
        out["psi_integral"] = float(np.max(np.abs(psi - vals[2])))
    else:
        out["psi_integral"] = 0.0
    return out


def geronimus_residuals(pipe):
    """|gamma~_{k+1} - gamma_k| from Gram-Schmidt, k = 0..n_gs - 1."""
    gs = pipe.gram_schmidt
    gt = gs.geronimus.gammas_tilde
    return np.abs(gt - pipe.params.gammas[: gt.size])


def orthonormality_residual(pipe):
    from .orf import gram_matrix

    gs = pipe.gram_schmidt
    G = gram_matrix(pipe.measure, gs.phis)
    return float(np.max(np.abs(G - np.eye(G.shape[0]))))


def fmu_quotient_residual(pipe):
    """max relative gap of F_mu = S[mu] / S[mu~] on the grid."""
    F = pipe.herglotz_b
    q = pipe.szego.boundary / pipe.szego_dual.boundary
    return float(np.max(np.abs(q - F) / np.abs(F)))


# ---------------------------------------------------------------------------
# report assembly


@dataclass
class DiagnosticsReport:
    scenario: str
    series: dict
    residual_maxima: dict
    warnings: list
    metadata: dict = field(default_factory=dict)

    def series_values(self, kind):
        return np.array([v for _, v in self.series[kind]])

    def to_json(self):
        def enc(x):
            if isinstance(x, float) and not math.isfinite(x):
                return None
            return x

        return {
            "scenario": self.scenario,
            "series": {k: [[n, enc(v)] for n, v in s] for k, s in self.series.items()},
            "residual_maxima": {k: [[n, enc(v)] for n, v in s] for k, s in self.residual_maxima.items()},
            "warnings": list(self.warnings),
            "metadata": self.metadata,
        }


def cell(pipe, n):
    """Every enabled diagnostic at order n: (series dict, residual dict)."""
    s = {}
    g = pipe.params.gammas[n]
    s["gamma_abs"] = float(abs(g))
    s["gamma_re"] = float(g.real)
    s["gamma_im"] = float(g.imag)
    s["omega"] = float(pipe.params.omegas[n])
    s["remainder_energy"] = remainder_energy(pipe, n)
    s["pseudo_error"] = pseudo_error(pipe, n)
    s["hyperbolic_error"] = hyperbolic_error(pipe, n)
    s["log_defect"] = log_defect(pipe, n)
    for p in pipe.opt.lp_exponents:
        s[f"lp_error_p{p:g}"] = lp_error(pipe, n, p)
    s["sup_error"] = sup_error(pipe, n)
    r = schur_residuals(pipe, n)
    if pipe.opt.orf:
        sz = szego_suite(pipe, n)
        s["kappa"] = sz["kappa"]
        s["szego_quantity"] = sz["quantity"]
        s["l2_gap"] = sz["l2_gap"]
        s["l2_gap_dual"] = sz["l2_gap_dual"]
        s["pointwise_gap"] = sz["pointwise_gap"]
        s["weakstar_gap"] = weakstar_gap(pipe, n)
        s["boundary_uniform_gap"] = boundary_uniform_gap(pipe, n)
        s["apriori_monitor"] = apriori_monitor(pipe, n)
        s["un_bound"] = un_bound(pipe, n)
        r.update(orf_residuals(pipe, n, sz["quantity"], s["log_defect"]))
        if not sz["bound_ok"]:
            pipe.warn(f"Szego quantity {sz['quantity']:.12g} exceeds 1 + 1e-8 at n={n}")
    return s, r


def build_report(pipe, scenario_id, cells, metadata=None):
    series, resid = {}, {}
    for n, (s, r) in enumerate(cells):
        for k, v in s.items():
            series.setdefault(k, []).append((n, v))
        for k, v in r.items():
            resid.setdefault(k, []).append((n, v))
    if pipe.opt.orf:
        ger = geronimus_residuals(pipe)
        resid["geronimus"] = [(k, float(v)) for k, v in enumerate(ger)]
        resid["orthonormality"] = [(0, orthonormality_residual(pipe))]
        if pipe.measure.atoms:
            pipe.warn("fmu_quotient skipped: the identity needs an absolutely continuous measure")
        else:
            resid["fmu_quotient"] = [(0, fmu_quotient_residual(pipe))]
        mon = [v for _, v in series["apriori_monitor"]]
        half = max(1, len(mon) // 2)
        if max(mon[half:], default=0.0) > 2.0 * max(max(mon[:half]), 0.0) + 1e-9:
            pipe.warn("apriori_monitor: growth in the second half of the run")
    meta = {"M": pipe.grid.M, "n_max": pipe.n_max, "grid_phase": pipe.grid.phase,
            "chain_digits": pipe.params.dps}
    meta.update(metadata or {})
    return DiagnosticsReport(scenario_id, series, resid, list(pipe.warnings), meta)
