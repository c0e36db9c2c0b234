"""Order-3 complex jets: exact value-and-derivative arithmetic.

A :class:`Jet` carries f(z), f'(z), f''(z), f'''(z) for an analytic
function f at a fixed point.  Sums, products, quotients, powers and
compositions of jets obey the Leibniz and chain rules exactly, so every
quantity derived from jets downstream (conformal factors, Schwarzians,
curvatures, curve data) is free of finite-difference noise.
"""

from __future__ import annotations

import cmath


class Jet:
    """Value and first three complex derivatives at a point."""

    __slots__ = ("f", "d1", "d2", "d3")

    def __init__(self, f, d1=0j, d2=0j, d3=0j):
        self.f = complex(f)
        self.d1 = complex(d1)
        self.d2 = complex(d2)
        self.d3 = complex(d3)

    @classmethod
    def constant(cls, c) -> "Jet":
        return cls(c, 0.0, 0.0, 0.0)

    @classmethod
    def variable(cls, z) -> "Jet":
        """Jet of the identity function at z."""
        return cls(z, 1.0, 0.0, 0.0)

    def __repr__(self):
        return f"Jet({self.f!r}, {self.d1!r}, {self.d2!r}, {self.d3!r})"

    # -- ring operations -------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.f + other.f, self.d1 + other.d1,
                       self.d2 + other.d2, self.d3 + other.d3)
        return Jet(self.f + other, self.d1, self.d2, self.d3)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.f, -self.d1, -self.d2, -self.d3)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            c = complex(other)
            return Jet(self.f * c, self.d1 * c, self.d2 * c, self.d3 * c)
        f, g = self, other
        return Jet(
            f.f * g.f,
            f.d1 * g.f + f.f * g.d1,
            f.d2 * g.f + 2.0 * f.d1 * g.d1 + f.f * g.d2,
            f.d3 * g.f + 3.0 * f.d2 * g.d1 + 3.0 * f.d1 * g.d2 + f.f * g.d3,
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        g, g1, g2, g3 = self.f, self.d1, self.d2, self.d3
        r = 1.0 / g
        r2 = r * r
        return Jet(
            r,
            -g1 * r2,
            (2.0 * g1 * g1 - g * g2) * r2 * r,
            (-6.0 * g1 ** 3 + 6.0 * g * g1 * g2 - g * g * g3) * r2 * r2,
        )

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self * (1.0 / complex(other))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    # -- analytic functions ----------------------------------------------

    def _chain(self, w0, w1, w2, w3) -> "Jet":
        """Jet of phi(self) given scalar derivatives w_k of phi at self.f."""
        g1, g2, g3 = self.d1, self.d2, self.d3
        return Jet(
            w0,
            w1 * g1,
            w2 * g1 * g1 + w1 * g2,
            w3 * g1 ** 3 + 3.0 * w2 * g1 * g2 + w1 * g3,
        )

    def exp(self) -> "Jet":
        e = cmath.exp(self.f)
        return self._chain(e, e, e, e)

    def log(self) -> "Jet":
        f = self.f
        w1 = 1.0 / f
        return self._chain(cmath.log(f), w1, -w1 * w1, 2.0 * w1 ** 3)

    def pow(self, a) -> "Jet":
        """self**a for constant exponent a (principal branch)."""
        f = self.f
        w0 = f ** a
        w1 = a * w0 / f
        w2 = (a - 1.0) * w1 / f
        w3 = (a - 2.0) * w2 / f
        return self._chain(w0, w1, w2, w3)

    def sqrt(self) -> "Jet":
        return self.pow(0.5)

    def compose(self, inner: "Jet") -> "Jet":
        """Jet of outer∘inner; self must be the jet of outer at inner.f."""
        g1, g2, g3 = inner.d1, inner.d2, inner.d3
        return Jet(
            self.f,
            self.d1 * g1,
            self.d2 * g1 * g1 + self.d1 * g2,
            self.d3 * g1 ** 3 + 3.0 * self.d2 * g1 * g2 + self.d1 * g3,
        )


def jet_eval_series(coeffs, z) -> Jet:
    """Evaluate sum(c_k z^k) and its first three derivatives by Horner.

    The four derived series are accumulated in one backward pass; the d2/d3
    slots carry the true derivatives (factorials included).
    """
    n = len(coeffs)
    if n == 0:
        raise ValueError("power series needs at least one coefficient")
    z = complex(z)
    f = d1 = d2 = d3 = 0j
    for k in range(n - 1, -1, -1):
        d3 = d3 * z + 3.0 * d2
        d2 = d2 * z + 2.0 * d1
        d1 = d1 * z + f
        f = f * z + complex(coeffs[k])
    return Jet(f, d1, d2, d3)


def series_value(coeffs, z) -> complex:
    """Plain Horner evaluation of sum(c_k z^k)."""
    z = complex(z)
    acc = 0j
    for k in range(len(coeffs) - 1, -1, -1):
        acc = acc * z + complex(coeffs[k])
    return acc


def series_multiply(a, b):
    """Cauchy product of two finite coefficient lists."""
    if not a or not b:
        return []
    out = [0j] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca == 0:
            continue
        for j, cb in enumerate(b):
            out[i + j] += complex(ca) * complex(cb)
    return out


def series_integrate(a):
    """Termwise antiderivative with zero constant term."""
    return [0j] + [complex(c) / (k + 1) for k, c in enumerate(a)]
