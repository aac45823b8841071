"""Interpolation point sequences alpha_0 = 0, alpha_1, alpha_2, ...

A sequence is described by a generator tag plus parameters and is evaluated
lazily, so it can be indexed arbitrarily far.  Whether the sum of
``1 - |alpha_k|`` diverges is recorded as a declaration of the generator; it
is never decided from finitely many points.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .geometry import BOUNDARY_GUARD
from .errors import DomainError

GENERATORS = ("classical", "compact_circle", "radial", "nontangential", "explicit")
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class AlphaSequence:
    generator: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ValueError(f"unknown alpha generator {self.generator!r}")
        g, p = self.generator, self.params
        if g == "compact_circle":
            r = float(p.get("r", 0.5))
            if not 0.0 <= r < 1.0 - BOUNDARY_GUARD:
                raise DomainError(f"compact_circle radius must lie in [0, 1), got {r}")
        elif g in ("radial", "nontangential"):
            c = float(p.get("c", 1.0))
            if not 0.0 < c < 2.0:
                raise DomainError(f"radial rate c must lie in (0, 2), got {c}")
            if g == "nontangential":
                ap = float(p.get("aperture", 0.5))
                if not 0.0 <= ap < math.pi / 2:
                    raise DomainError("aperture must lie in [0, pi/2)")
                if c >= 2.0 * math.cos(ap):
                    raise DomainError("c too large for the aperture: points leave the disk")
        elif g == "explicit":
            pts = np.asarray([complex(*v) if isinstance(v, (list, tuple)) else complex(v)
                              for v in p.get("points", [])])
            if pts.size == 0:
                raise DomainError("explicit alpha list is empty")
            if np.any(np.abs(pts) >= 1.0 - BOUNDARY_GUARD):
                raise DomainError("explicit alpha outside the guarded disk")
            object.__setattr__(self, "_explicit", pts)

    # constructors -------------------------------------------------------
    @classmethod
    def classical(cls):
        return cls("classical")

    @classmethod
    def compact_circle(cls, r, theta_rule="golden", step=None):
        params = {"r": r, "theta_rule": theta_rule}
        if step is not None:
            params["step"] = step
        return cls("compact_circle", params)

    @classmethod
    def radial(cls, xi=1.0, c=1.0):
        xi = complex(xi)
        return cls("radial", {"xi": (xi.real, xi.imag), "c": c})

    @classmethod
    def nontangential(cls, xi=1.0, aperture=0.5, c=1.0):
        xi = complex(xi)
        return cls("nontangential", {"xi": (xi.real, xi.imag), "aperture": aperture, "c": c})

    @classmethod
    def explicit(cls, points, cycle=False):
        pts = [(complex(v).real, complex(v).imag) for v in points]
        return cls("explicit", {"points": pts, "cycle": bool(cycle)})

    # evaluation ---------------------------------------------------------
    @property
    def blaschke_divergent(self):
        """Declared divergence of sum(1 - |alpha_k|)."""
        if self.generator == "explicit":
            return bool(self.params.get("cycle", False))
        return True

    def _xi(self):
        xi = self.params.get("xi", (1.0, 0.0))
        xi = complex(*xi) if isinstance(xi, (list, tuple)) else complex(xi)
        return xi / abs(xi)

    def __getitem__(self, k):
        k = int(k)
        if k < 0:
            raise IndexError(k)
        if k == 0:
            return 0j
        g, p = self.generator, self.params
        if g == "classical":
            a = 0j
        elif g == "compact_circle":
            r = float(p.get("r", 0.5))
            rule = p.get("theta_rule", "golden")
            if rule == "golden":
                theta = 2.0 * math.pi * _GOLDEN * k
            elif rule == "linear":
                theta = float(p.get("step", 1.0)) * k
            elif rule == "fixed":
                theta = float(p.get("step", 0.0))
            else:
                raise ValueError(f"unknown theta rule {rule!r}")
            a = r * complex(math.cos(theta), math.sin(theta))
        elif g == "radial":
            c = float(p.get("c", 1.0))
            a = (1.0 - c / (k + 1)) * self._xi()
        elif g == "nontangential":
            c = float(p.get("c", 1.0))
            ap = float(p.get("aperture", 0.5))
            phi = ap if k % 2 == 0 else -ap
            a = self._xi() * (1.0 - (c / (k + 1)) * complex(math.cos(phi), math.sin(phi)))
        else:
            pts = self._explicit
            if p.get("cycle", False):
                a = complex(pts[(k - 1) % pts.size])
            elif k - 1 < pts.size:
                a = complex(pts[k - 1])
            else:
                raise IndexError(f"explicit alpha list has no entry {k}")
        if abs(a) >= 1.0 - BOUNDARY_GUARD:
            raise DomainError(f"alpha_{k} = {a} violates the boundary guard")
        return a

    def take(self, n):
        """Array alpha_0, ..., alpha_n."""
        return np.array([self[k] for k in range(n + 1)], dtype=complex)

    def blaschke_sums(self, n):
        """Partial sums sum_{k <= j} (1 - |alpha_k|) for j = 1..n (index 0 holds 0)."""
        a = self.take(n)
        s = np.concatenate([[0.0], np.cumsum(1.0 - np.abs(a[1:]))])
        return s

    def to_json(self):
        return {"kind": self.generator, **_jsonable(self.params)}


def _jsonable(params):
    out = {}
    for key, val in params.items():
        if key == "xi":
            out[key] = [float(val[0]), float(val[1])]
        elif key == "points":
            out[key] = [[float(a), float(b)] for a, b in val]
        else:
            out[key] = val
    return out


def alpha_sequence_from_spec(spec):
    """Build an AlphaSequence from a config mapping such as ``{"kind": "radial", "c": 1}``."""
    spec = dict(spec)
    kind = spec.pop("kind")
    if kind == "classical":
        allowed = set()
    elif kind == "compact_circle":
        allowed = {"r", "theta_rule", "step"}
    elif kind == "radial":
        allowed = {"xi", "c"}
    elif kind == "nontangential":
        allowed = {"xi", "c", "aperture"}
    elif kind == "explicit":
        allowed = {"points", "cycle"}
    else:
        raise ValueError(f"unknown alpha generator {kind!r}")
    extra = set(spec) - allowed
    if extra:
        raise ValueError(f"unknown keys for alpha generator {kind!r}: {sorted(extra)}")
    if "xi" in spec:
        xi = spec["xi"]
        spec["xi"] = (float(xi[0]), float(xi[1])) if isinstance(xi, (list, tuple)) else (float(xi), 0.0)
    if "points" in spec:
        spec["points"] = [tuple(map(float, v)) if isinstance(v, (list, tuple)) else (float(v), 0.0)
                          for v in spec["points"]]
    return AlphaSequence(kind, spec)
