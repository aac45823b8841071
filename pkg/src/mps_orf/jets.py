"""Truncated Taylor series ("jets") used to resolve confluent Schur steps.

A Jet holds coefficients c_0..c_{r-1} of a function's expansion in powers of
(z - a).  Arithmetic works over any numeric field supporting + - * /, which in
practice means mpmath ``mpc`` at the working precision of the Schur chain.

Division by a jet whose leading coefficients are exact zeros (a known zero of
a Mobius factor at the expansion point) drops the same number of leading
coefficients from the numerator, so the order shrinks by the multiplicity of
the zero.  That is how a repeated interpolation node consumes one derivative.
"""

import mpmath as mp


class Jet:
    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = list(coeffs)

    @property
    def order(self):
        return len(self.c)

    @property
    def value(self):
        return self.c[0]

    @classmethod
    def const(cls, v, order):
        return cls([v] + [0] * (order - 1))

    @classmethod
    def variable(cls, a, order):
        """The identity map z expanded at a."""
        c = [a, 1] + [0] * max(order - 2, 0)
        return cls(c[:order])

    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.const(other, self.order)

    def _trim(self, other):
        r = min(self.order, other.order)
        return self.c[:r], other.c[:r]

    def __add__(self, other):
        a, b = self._trim(self._coerce(other))
        return Jet([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Jet([-x for x in self.c])

    def __sub__(self, other):
        a, b = self._trim(self._coerce(other))
        return Jet([x - y for x, y in zip(a, b)])

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet([x * other for x in self.c])
        a, b = self._trim(other)
        r = len(a)
        return Jet([sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(r)])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet([x / other for x in self.c])
        num, den = list(self.c), list(other.c)
        # strip exact zeros of the denominator together with the numerator's
        # matching (numerically vanishing) coefficients
        while den and den[0] == 0:
            den.pop(0)
            num.pop(0)
        r = min(len(num), len(den))
        if r == 0:
            raise ZeroDivisionError("jet division exhausted every coefficient")
        num, den = num[:r], den[:r]
        q = []
        for k in range(r):
            s = num[k] - sum(q[i] * den[k - i] for i in range(k))
            q.append(s / den[0])
        return Jet(q)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def conj_coeffs(self):
        return Jet([mp.conj(x) for x in self.c])

    def exp(self):
        """exp of a jet via the recurrence k e_k = sum_j j c_j e_{k-j}."""
        r = self.order
        e = [mp.exp(self.c[0])]
        for k in range(1, r):
            e.append(sum(j * self.c[j] * e[k - j] for j in range(1, k + 1)) / k)
        return Jet(e)

    def compose_into(self, inner):
        """Evaluate this jet (expanded at b = inner.value) at the series ``inner``."""
        shifted = inner - inner.value
        out = Jet.const(self.c[-1], inner.order)
        for coef in reversed(self.c[:-1]):
            out = out * shifted + coef
        return out

    def __repr__(self):
        return f"Jet({self.c!r})"


def polynomial_jet(coeffs, a, order):
    """Jet at a of the polynomial sum_k coeffs[k] z^k (Horner in jets)."""
    z = Jet.variable(a, order)
    out = Jet.const(coeffs[-1], order)
    for c in reversed(coeffs[:-1]):
        out = out * z + c
    return out


def zeta_jet(alpha, a, order):
    """Jet of (z - alpha) / (1 - conj(alpha) z) at a.

    With w = z - a, d = a - alpha and e = 1 - conj(alpha) a the factor is
    (w + d) / e * sum_i (conj(alpha) / e)^i w^i.  When a == alpha the
    constant term is set to an exact zero.
    """
    ab = mp.conj(alpha)
    e = 1 - ab * a
    d = 0 if a == alpha else a - alpha
    q = ab / e
    geo = [q ** i for i in range(order)]
    c = [d * geo[0] / e]
    for i in range(1, order):
        c.append((d * geo[i] + geo[i - 1]) / e)
    return Jet(c)
