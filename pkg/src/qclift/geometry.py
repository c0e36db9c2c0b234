"""Points, planar Möbius maps, their half-space extensions, and frames.

The substrate for everything else: R³ vector algebra, Möbius
transformations of the compactified plane together with their Poincaré
extensions to upper half-space, Möbius inversions of space, and the
orthonormal frames used to conjugate planar maps onto tangent planes.

Points at infinity are a tagged singleton value (:data:`INFINITY`) that
flows through every Möbius operation instead of sentinel coordinates.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .jets import Jet


class _Infinity:
    """Tag for the point at infinity of the compactified plane or space."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"


INFINITY = _Infinity()


def is_infinite(x) -> bool:
    return x is INFINITY


@dataclass(frozen=True)
class Point3:
    """Point of R³; x3 is the height above the plane C = {x3 = 0}."""

    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        if not (math.isfinite(self.x1) and math.isfinite(self.x2)
                and math.isfinite(self.x3)):
            raise ValueError(f"non-finite Point3 components: "
                             f"({self.x1}, {self.x2}, {self.x3})")

    @classmethod
    def from_complex(cls, z, height=0.0) -> "Point3":
        z = complex(z)
        return cls(z.real, z.imag, float(height))

    def plane(self) -> complex:
        """Complex coordinate of the planar part."""
        return complex(self.x1, self.x2)

    def __add__(self, other: "Point3") -> "Point3":
        return Point3(self.x1 + other.x1, self.x2 + other.x2, self.x3 + other.x3)

    def __sub__(self, other: "Point3") -> "Point3":
        return Point3(self.x1 - other.x1, self.x2 - other.x2, self.x3 - other.x3)

    def scaled(self, s: float) -> "Point3":
        return Point3(self.x1 * s, self.x2 * s, self.x3 * s)

    def dot(self, other: "Point3") -> float:
        return self.x1 * other.x1 + self.x2 * other.x2 + self.x3 * other.x3

    def cross(self, other: "Point3") -> "Point3":
        return Point3(
            self.x2 * other.x3 - self.x3 * other.x2,
            self.x3 * other.x1 - self.x1 * other.x3,
            self.x1 * other.x2 - self.x2 * other.x1,
        )

    def norm2(self) -> float:
        return self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def as_tuple(self):
        return (self.x1, self.x2, self.x3)


ORIGIN = Point3(0.0, 0.0, 0.0)

_DEGENERATE_TOL = 1e-14


class PlanarMoebius:
    """z ↦ (az+b)/(cz+d) with ad−bc ≠ 0.

    Coefficients are rescaled at construction so max(|a|,|b|,|c|,|d|) = 1;
    the map is projective so this only improves conditioning.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        a, b, c, d = complex(a), complex(b), complex(c), complex(d)
        m = max(abs(a), abs(b), abs(c), abs(d))
        if m == 0.0 or not math.isfinite(m):
            raise ValueError("degenerate Moebius coefficients")
        a, b, c, d = a / m, b / m, c / m, d / m
        if abs(a * d - b * c) <= _DEGENERATE_TOL:
            raise ValueError("degenerate Moebius map: |ad-bc| below tolerance")
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def identity(cls) -> "PlanarMoebius":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def disk_automorphism(cls, center, phase=1.0) -> "PlanarMoebius":
        """e^{iθ}(z + center)/(1 + conj(center) z); maps 0 to phase*center."""
        center = complex(center)
        if abs(center) >= 1.0:
            raise ValueError("automorphism center must lie in the unit disk")
        phase = complex(phase)
        return cls(phase, phase * center, center.conjugate(), 1.0)

    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def __call__(self, z):
        """Apply to a complex number or INFINITY; poles map to INFINITY."""
        if is_infinite(z):
            if abs(self.c) == 0.0:
                return INFINITY
            return self.a / self.c
        z = complex(z)
        den = self.c * z + self.d
        if abs(den) < 1e-300:
            return INFINITY
        return (self.a * z + self.b) / den

    def inverse(self) -> "PlanarMoebius":
        return PlanarMoebius(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "PlanarMoebius") -> "PlanarMoebius":
        """self ∘ other."""
        return PlanarMoebius(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def deriv(self, z) -> complex:
        den = self.c * complex(z) + self.d
        return self.det() / (den * den)

    def jet(self, z) -> Jet:
        """Order-3 jet of the map at z."""
        J = Jet.variable(z)
        return (self.a * J + self.b) / (self.c * J + self.d)

    def deriv_jet(self, z) -> Jet:
        """Order-3 jet of the derivative (carries M'', M''', M'''')."""
        J = Jet.variable(z)
        den = self.c * J + self.d
        return self.det() * (den * den).reciprocal()


def moebius_apply(M: PlanarMoebius, z):
    return M(z)


def poincare_extend(M: PlanarMoebius, p):
    """Extension of M to a Möbius map of half-space.

    For p = (z, t), t = x3 ≥ 0 and M normalized to ad−bc = 1 the image is
        z' = ((az+b)(cz+d)̄ + a c̄ t²) / D,   t' = t / D,
        D  = |cz+d|² + |c|² t².
    Heights map to heights; the restriction to t = 0 is M itself.  The
    lower half-space is handled by the mirror rule: planar Möbius maps
    commute with reflection in C, so compute with |x3| and restore the
    sign.
    """
    if is_infinite(p):
        w = M(INFINITY)
        if is_infinite(w):
            return INFINITY
        return Point3.from_complex(w)
    s = cmath.sqrt(M.det())
    a, b, c, d = M.a / s, M.b / s, M.c / s, M.d / s
    z = complex(p.x1, p.x2)
    t = abs(p.x3)
    sign = -1.0 if p.x3 < 0.0 else 1.0
    czd = c * z + d
    den = czd.real * czd.real + czd.imag * czd.imag + (c.real * c.real + c.imag * c.imag) * t * t
    if den < 1e-300:
        return INFINITY
    zp = ((a * z + b) * czd.conjugate() + a * c.conjugate() * t * t) / den
    tp = t / den
    return Point3(zp.real, zp.imag, sign * tp)


def poincare_factor(M: PlanarMoebius, p) -> float:
    """Conformal factor ‖D(extension of M)‖ at p (any height)."""
    s = cmath.sqrt(M.det())
    c, d = M.c / s, M.d / s
    z = complex(p.x1, p.x2)
    t = p.x3
    czd = c * z + d
    den = abs(czd) ** 2 + abs(c) ** 2 * t * t
    return 1.0 / den


def invert_about(q: Point3, p):
    """Möbius inversion centered at q: p ↦ (p−q)/‖p−q‖²."""
    if is_infinite(p):
        return ORIGIN
    d = p - q
    n2 = d.norm2()
    if n2 < 1e-300:
        return INFINITY
    return d.scaled(1.0 / n2)


def sphere_inversion_j(p):
    """Inversion in the unit sphere: p ↦ p/‖p‖²."""
    if is_infinite(p):
        return ORIGIN
    n2 = p.norm2()
    if n2 < 1e-300:
        return INFINITY
    return p.scaled(1.0 / n2)


class Inversion:
    """I_q as a conformal transformation of compactified R³.

    ‖DI_q(p)‖ = 1/‖p−q‖².  Orientation-reversing, so not representable
    as a SpaceMoebius; exposes the same apply/conformal_factor protocol.
    """

    __slots__ = ("center",)

    def __init__(self, center: Point3):
        self.center = center

    def apply(self, p):
        return invert_about(self.center, p)

    def conformal_factor(self, p) -> float:
        d2 = (p - self.center).norm2()
        if d2 < 1e-300:
            return math.inf
        return 1.0 / d2


_ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class Frame:
    """Right-handed orthonormal frame with a base point and scale.

    Maps frame coordinates (x, y, t) to origin + scale·(x e1 + y e2 + t e3);
    the frame plane is spanned by e1, e2 through origin, oriented by e3.
    """

    origin: Point3
    e1: Point3
    e2: Point3
    e3: Point3
    scale: float

    def __post_init__(self):
        if not (self.scale > 0.0 and math.isfinite(self.scale)):
            raise ValueError("frame scale must be positive and finite")
        for u, v in ((self.e1, self.e2), (self.e1, self.e3), (self.e2, self.e3)):
            if abs(u.dot(v)) > _ORTHO_TOL:
                raise ValueError("frame axes are not orthogonal")
        for u in (self.e1, self.e2, self.e3):
            if abs(u.norm() - 1.0) > _ORTHO_TOL:
                raise ValueError("frame axes are not unit vectors")
        if (self.e1.cross(self.e2) - self.e3).norm() > 1e-8:
            raise ValueError("frame is not right-handed (e3 != e1 x e2)")

    @classmethod
    def standard(cls) -> "Frame":
        return cls(ORIGIN, Point3(1.0, 0.0, 0.0), Point3(0.0, 1.0, 0.0),
                   Point3(0.0, 0.0, 1.0), 1.0)

    def to_world(self, p: Point3) -> Point3:
        s = self.scale
        return Point3(
            self.origin.x1 + s * (p.x1 * self.e1.x1 + p.x2 * self.e2.x1 + p.x3 * self.e3.x1),
            self.origin.x2 + s * (p.x1 * self.e1.x2 + p.x2 * self.e2.x2 + p.x3 * self.e3.x2),
            self.origin.x3 + s * (p.x1 * self.e1.x3 + p.x2 * self.e2.x3 + p.x3 * self.e3.x3),
        )

    def plane_to_world(self, z: complex) -> Point3:
        return self.to_world(Point3(z.real, z.imag, 0.0))

    def height_above_plane(self, p: Point3) -> float:
        """Signed distance of p from the frame plane (e3 side positive)."""
        return (p - self.origin).dot(self.e3)


class SpaceMoebius:
    """Orientation-preserving Möbius map of compactified R³.

    Composition frame ∘ (Poincaré extension of planar): the domain is the
    standard half-space pair over C, the image the half-space pair over
    the frame plane, with the restriction to C equal to frame ∘ planar.
    """

    __slots__ = ("planar", "frame")

    def __init__(self, planar: PlanarMoebius, frame: Frame):
        self.planar = planar
        self.frame = frame

    def apply(self, p):
        if isinstance(p, complex):
            p = Point3.from_complex(p)
        q = poincare_extend(self.planar, p)
        if is_infinite(q):
            return INFINITY
        return self.frame.to_world(q)

    def apply_plane(self, z):
        """Restriction to C; returns a Point3 on the frame plane."""
        w = self.planar(z)
        if is_infinite(w):
            return INFINITY
        return self.frame.plane_to_world(w)

    def conformal_factor(self, p) -> float:
        if isinstance(p, complex):
            p = Point3.from_complex(p)
        return self.frame.scale * poincare_factor(self.planar, p)


def space_moebius_apply(T: SpaceMoebius, p):
    return T.apply(p)


def hyperbolic_distance(p: Point3, q: Point3) -> float:
    """Distance in the upper half-space model (heights = x3 > 0)."""
    if p.x3 <= 0.0 or q.x3 <= 0.0:
        raise ValueError("hyperbolic distance needs points of positive height")
    x = 1.0 + (p - q).norm2() / (2.0 * p.x3 * q.x3)
    return math.acosh(x)
