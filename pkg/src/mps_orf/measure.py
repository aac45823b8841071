"""Probability measures on the circle sampled on a uniform grid.

A measure is a density (values of the a.c. part at grid nodes, relative to
normalized Lebesgue measure) plus finitely many atoms.  Integrals use the
periodic trapezoid rule, i.e. the sample mean, which is spectrally accurate
for smooth periodic integrands.  Boundary conjugate functions are computed
with the discrete Fourier multiplier -i sgn(k).
"""

from dataclasses import dataclass, field
from functools import cached_property
import json
import math
import warnings

import numpy as np

from .errors import AtomCollision, DegenerateDensity, DomainError, NotSzego, ResolutionWarning

DENSITY_FLOOR = 1e-13
ATOM_NODE_TOL = 1e-9
MASS_TOL = 1e-9
SZEGO_CLIP_LIMIT = 0.05
RESOLUTION_MIN = 50.0


@dataclass(frozen=True)
class CircleGrid:
    """M equispaced nodes t_j = exp(i (2 pi j / M + phase))."""

    M: int
    phase: float = 0.0

    def __post_init__(self):
        M = int(self.M)
        if M < 256 or M & (M - 1):
            raise DomainError(f"grid size must be a power of two >= 256, got {self.M}")

    @cached_property
    def theta(self):
        return 2.0 * np.pi * np.arange(self.M) / self.M + self.phase

    @cached_property
    def nodes(self):
        return np.exp(1j * self.theta)

    @property
    def spacing(self):
        return 2.0 * np.pi / self.M

    def rotated_half(self):
        return CircleGrid(self.M, self.phase + 0.5 * self.spacing)

    def resolves(self, w, minimum=RESOLUTION_MIN):
        """True when M (1 - |w|) reaches ``minimum``."""
        return self.M * (1.0 - abs(complex(w))) >= minimum

    def index_of(self, t, tol=1e-9):
        """Index of the node equal to t; raises if t is not a node."""
        t = complex(t)
        j = int(round((math.atan2(t.imag, t.real) - self.phase) / self.spacing)) % self.M
        if abs(self.nodes[j] - t) > tol:
            raise DomainError(f"{t} is not a grid node")
        return j

    def in_arc(self, theta1, theta2):
        """Boolean mask of nodes with angle in [theta1, theta2] (mod 2 pi)."""
        th = np.mod(self.theta - theta1, 2.0 * np.pi)
        return th <= (theta2 - theta1) + 1e-15


def integrate(grid, samples):
    """Trapezoid rule for the normalized Lebesgue measure: the sample mean."""
    samples = np.asarray(samples)
    if samples.shape[-1] != grid.M:
        raise ValueError(f"expected {grid.M} samples, got {samples.shape[-1]}")
    return samples.mean(axis=-1)


def conjugate_function(grid, samples):
    """Boundary conjugate function via the Fourier multiplier -i sgn(k).

    The Nyquist mode is dropped.  Works for real or complex samples (the
    operator is extended linearly).
    """
    c = np.fft.fft(np.asarray(samples, dtype=complex))
    M = grid.M
    k = np.fft.fftfreq(M, d=1.0 / M)
    mult = -1j * np.sign(k)
    mult[M // 2] = 0.0
    out = np.fft.ifft(c * mult)
    if np.isrealobj(samples):
        return out.real
    return out


def analytic_part(grid, samples, shift=0):
    """Sum over k >= 1 + shift of c_k t^(k - shift): the Cauchy projection.

    With shift = 1 this gives the boundary values of sum_{k>=0} c_{k+1} z^k.
    """
    M = grid.M
    c = np.fft.fft(np.asarray(samples, dtype=complex)) / M
    k = np.fft.fftfreq(M, d=1.0 / M)
    # DFT coefficients on a rotated grid carry exp(i k phase)
    c = c * np.exp(-1j * k * grid.phase)
    keep = (k >= 1 + shift) & (k < M // 2)
    coeff = np.where(keep, c, 0.0)
    vals = np.fft.ifft(coeff * np.exp(1j * k * grid.phase)) * M
    return vals * grid.nodes ** (-shift)


@dataclass(frozen=True)
class Atom:
    theta: float
    mass: float

    @property
    def position(self):
        return complex(math.cos(self.theta), math.sin(self.theta))


@dataclass(frozen=True)
class CircleMeasure:
    grid: CircleGrid
    density: np.ndarray
    atoms: tuple = ()
    probability: bool = False

    def __post_init__(self):
        d = np.asarray(self.density, dtype=float)
        if d.shape != (self.grid.M,):
            raise ValueError("density must have one sample per grid node")
        if np.any(d < 0) or np.any(~np.isfinite(d)):
            raise DomainError("density must be finite and non-negative")
        d.setflags(write=False)
        object.__setattr__(self, "density", d)
        atoms = tuple(a if isinstance(a, Atom) else Atom(*a) for a in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        pos = [a.position for a in atoms]
        for i, p in enumerate(pos):
            if atoms[i].mass <= 0:
                raise DomainError("atom masses must be positive")
            for q in pos[:i]:
                if abs(p - q) < ATOM_NODE_TOL:
                    raise DomainError("atom positions must be pairwise distinct")
            if np.min(np.abs(self.grid.nodes - p)) < ATOM_NODE_TOL:
                raise AtomCollision("atom sits on a grid node; build with from_density to nudge the grid")
        if self.probability and abs(self.total_mass - 1.0) > MASS_TOL:
            raise DomainError(f"probability measure has total mass {self.total_mass:.17g}")

    # construction ------------------------------------------------------
    @classmethod
    def from_density(cls, M, density_fn, atoms=(), probability=False):
        """Sample ``density_fn(theta)`` on an M-point grid, rotating the grid
        by half a spacing if any atom falls within 1e-9 of a node."""
        atoms = tuple(a if isinstance(a, Atom) else Atom(*a) for a in atoms)
        grid = CircleGrid(M)
        if any(np.min(np.abs(grid.nodes - a.position)) < ATOM_NODE_TOL for a in atoms):
            grid = grid.rotated_half()
        return cls(grid, np.asarray(density_fn(grid.theta), dtype=float), atoms, probability)

    @classmethod
    def lebesgue(cls, M):
        return cls(CircleGrid(M), np.ones(M), (), True)

    # basic quantities -----------------------------------------------------
    @property
    def M(self):
        return self.grid.M

    @cached_property
    def total_mass(self):
        return float(self.density.mean() + sum(a.mass for a in self.atoms))

    @property
    def atom_positions(self):
        return np.array([a.position for a in self.atoms], dtype=complex)

    @property
    def atom_masses(self):
        return np.array([a.mass for a in self.atoms], dtype=float)

    @property
    def is_absolutely_continuous(self):
        return not self.atoms

    def quadrature_nodes(self):
        """Nodes and weights of the discrete measure: grid nodes then atoms."""
        t = np.concatenate([self.grid.nodes, self.atom_positions])
        w = np.concatenate([self.density / self.M, self.atom_masses])
        return t, w

    def integrate(self, values_grid, values_atoms=None):
        """Integral of a function given by its grid samples (and atom values)."""
        out = np.mean(np.asarray(values_grid) * self.density, axis=-1)
        if self.atoms:
            if values_atoms is None:
                raise ValueError("measure has atoms: atom values are required")
            out = out + np.sum(np.asarray(values_atoms) * self.atom_masses, axis=-1)
        return out

    def moment(self, k):
        """int conj(t)^k dmu(t)."""
        t, w = self.quadrature_nodes()
        return complex(np.sum(w * np.conj(t) ** k))

    # serialization -----------------------------------------------------------
    def to_json(self):
        return {
            "M": self.M,
            "density": [float(x) for x in self.density],
            "atoms": [{"theta": a.theta, "mass": a.mass} for a in self.atoms],
            "probability": bool(self.probability),
        }

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        extra = set(obj) - {"M", "density", "atoms", "probability"}
        if extra:
            raise ValueError(f"unknown keys in measure JSON: {sorted(extra)}")
        atoms = tuple(Atom(float(a["theta"]), float(a["mass"])) for a in obj.get("atoms", []))
        grid = CircleGrid(int(obj["M"]))
        # the grid phase is not serialized; it is recovered from the nudge rule
        if any(np.min(np.abs(grid.nodes - a.position)) < ATOM_NODE_TOL for a in atoms):
            grid = grid.rotated_half()
        return cls(grid, np.asarray(obj["density"], dtype=float), atoms, bool(obj.get("probability", False)))


def _check_resolution(grid, z):
    r = np.max(np.abs(np.atleast_1d(z)))
    if grid.M * (1.0 - r) < RESOLUTION_MIN:
        warnings.warn(f"M (1 - |z|) = {grid.M * (1 - r):.1f} < {RESOLUTION_MIN}: quadrature under-resolved",
                      ResolutionWarning, stacklevel=3)


def herglotz_kernel_sum(t, w, z):
    """sum_j w_j (t_j + z) / (t_j - z), vectorized over z."""
    z = np.asarray(z, dtype=complex)
    zz = z.reshape(-1, 1)
    out = ((t + zz) / (t - zz)) @ w
    return out.reshape(z.shape)


def herglotz_interior(mu, z, check=True):
    """F_mu(z) = int (t + z) / (t - z) dmu(t) by quadrature, atoms included."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1.0):
        raise DomainError("herglotz_interior needs |z| < 1")
    if check:
        _check_resolution(mu.grid, z)
    t, w = mu.quadrature_nodes()
    out = herglotz_kernel_sum(t, w, z)
    return out[()] if out.ndim == 0 else out


def cauchy_sum(mu, z, weights_grid=None, weights_atoms=None, power=1):
    """int g(t) dmu(t) / (t - z)^power with g given on grid nodes and atoms."""
    z = np.asarray(z, dtype=complex)
    t, w = mu.quadrature_nodes()
    if weights_grid is not None:
        g = np.concatenate([np.asarray(weights_grid, dtype=complex),
                            np.asarray(weights_atoms if weights_atoms is not None else [], dtype=complex)])
        w = w * g
    zz = z.reshape(-1, 1)
    out = (1.0 / (t - zz) ** power) @ w
    out = out.reshape(z.shape)
    return out[()] if out.ndim == 0 else out


def herglotz_boundary(mu, t=None):
    """Boundary values F_mu(t_j) = mu'(t_j) + i conj(mu')(t_j) + atom kernels.

    With ``t=None`` returns all grid nodes, otherwise the value at node t.
    """
    F = mu.density + 1j * conjugate_function(mu.grid, mu.density)
    if mu.atoms:
        tt = mu.grid.nodes
        for a in mu.atoms:
            tau = a.position
            F = F + a.mass * (tau + tt) / (tau - tt)
    if t is None:
        return F
    t = complex(np.asarray(t).reshape(-1)[0])
    for a in mu.atoms:
        if abs(a.position - t) < ATOM_NODE_TOL:
            raise AtomCollision(f"boundary Herglotz value requested at atom {t}")
    return complex(F[mu.grid.index_of(t)])


def measure_from_schur(f, grid, probability=False):
    """Density (1 - |f|^2) / |1 - t f|^2 of the Herglotz measure of f.

    ``f`` is any callable evaluable on the circle.  The result has no atoms;
    mark ``probability=True`` only when f's measure is purely a.c.
    """
    t = grid.nodes
    ft = np.asarray(f(t), dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        dens = (1.0 - np.abs(ft) ** 2) / np.abs(1.0 - t * ft) ** 2
    dens = np.where(np.isfinite(dens), dens, 0.0)
    dens = np.maximum(dens, 0.0)
    low = np.mean(dens < DENSITY_FLOOR)
    if low > 0.01:
        warnings.warn(f"density below floor at {100 * low:.1f}% of nodes", DegenerateDensity, stacklevel=2)
    return CircleMeasure(grid, dens, (), probability)


def schur_values_from_measure(mu, z):
    """f(z) = (F_mu(z) - 1) / (z (F_mu(z) + 1)) for a probability measure.

    Uses F - 1 = 2 z int dmu / (t - z) so that z = 0 returns the limit
    int conj(t) dmu, the conjugate first Fourier coefficient of mu.
    """
    z = np.asarray(z, dtype=complex)
    F = herglotz_interior(mu, z, check=False)
    G = 2.0 * cauchy_sum(mu, z)
    out = G / (F + 1.0)
    return out[()] if np.ndim(out) == 0 else out


def schur_boundary_from_measure(mu):
    """Boundary values of f on the grid from boundary Herglotz values."""
    F = herglotz_boundary(mu)
    t = mu.grid.nodes
    return (F - 1.0) / (t * (F + 1.0))


@dataclass(frozen=True)
class SzegoFunction:
    """Outer function with |S|^2 = mu' on the circle and S(0) > 0.

    ``log_density`` is log max(mu', floor) on the grid; ``clipped`` counts
    the nodes where the floor was applied.
    """

    grid: CircleGrid
    log_density: np.ndarray
    clipped: int
    floor: float = DENSITY_FLOOR

    @cached_property
    def boundary(self):
        h = 0.5 * self.log_density
        return np.exp(h + 1j * conjugate_function(self.grid, h))

    @property
    def at_zero(self):
        return float(np.exp(0.5 * self.log_density.mean()))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        t = self.grid.nodes
        w = 0.5 * self.log_density / self.grid.M
        out = np.exp(herglotz_kernel_sum(t, w.astype(complex), z))
        return out[()] if out.ndim == 0 else out

    @property
    def clip_fraction(self):
        return self.clipped / self.grid.M


def szego_function(mu, floor=DENSITY_FLOOR, clip_limit=SZEGO_CLIP_LIMIT):
    """Szego function of the a.c. part of mu; NotSzego if too many nodes clip."""
    d = mu.density
    clipped = int(np.sum(d < floor))
    if clipped > clip_limit * mu.M:
        raise NotSzego(f"{clipped} of {mu.M} density samples below {floor:g}")
    return SzegoFunction(mu.grid, np.log(np.maximum(d, floor)), clipped, floor)


def second_kind_measure(mu):
    """Measure whose Herglotz transform is 1 / F_mu (density Re(1/F_mu) on the grid)."""
    F = herglotz_boundary(mu)
    dens = np.maximum((1.0 / F).real, 0.0)
    mass = dens.mean()
    prob = bool(mu.probability and abs(mass - 1.0) <= MASS_TOL)
    if mu.probability and not prob:
        warnings.warn(f"second-kind measure has mass {mass:.12g}; probability flag dropped",
                      ResolutionWarning, stacklevel=2)
    return CircleMeasure(mu.grid, dens, (), prob)
