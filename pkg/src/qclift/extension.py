"""Best Möbius approximations, circle bundles, and the space extension.

The extension carries the bundle of Euclidean circles orthogonal to the
disk (through ζ and ζ* = 1/ζ̄) onto a bundle over the lifted surface by
applying, on each fiber, the best Möbius approximation

    M(z, ζ) = f̃(ζ) + Re{m(z,ζ)} ∂ξf̃(ζ) + Im{m(z,ζ)} ∂ηf̃(ζ),
    m(z, ζ) = (z − ζ) / (1 − σ_z(ζ)(z − ζ)),

extended to space through the tangent frame at f̃(ζ).  Restricting to the
plane outside the closed disk yields the reflection across the surface
boundary; projecting to C yields the planar extension of f itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import (INFINITY, PlanarMoebius, Point3, SpaceMoebius,
                       is_infinite, sphere_inversion_j)
from .lift import SurfaceJet, lift_point, surface_jet
from .maps import MapSpec, sigma_jet

_POLE_TOL = 1e-12


@dataclass(frozen=True)
class CircleFiber:
    """Fiber of the disk's circle bundle: base point and flow parameter.

    For zeta != 0 the fiber is the circle orthogonal to C through zeta and
    1/conj(zeta); its center is ((|ζ|+1/|ζ|)/2)·ζ/|ζ| and its radius
    (1/|ζ|−|ζ|)/2.  For zeta = 0 it is the vertical axis.  t parametrizes
    the upper arc by hyperbolic unit speed; ±inf flag planar points.
    """

    zeta: complex
    t: float

    @property
    def is_axis(self) -> bool:
        return self.zeta == 0

    def center(self) -> complex:
        u = abs(self.zeta)
        if u == 0.0:
            raise ValueError("axis fiber has no planar center")
        return (u + 1.0 / u) / 2.0 * (self.zeta / u)

    def radius(self) -> float:
        u = abs(self.zeta)
        if u == 0.0:
            raise ValueError("axis fiber has no finite radius")
        return (1.0 / u - u) / 2.0


@dataclass(frozen=True)
class StereoPoint:
    """Horosphere coordinates: elevation angle, half planar distance, radius."""

    phi: float
    r: float
    a: float

    def height(self) -> float:
        return 2.0 * self.a * math.sin(self.phi) ** 2


def fiber_point(zeta: complex, t: float) -> Point3:
    """Point of the upper arc of the fiber through zeta at flow time t."""
    zeta = complex(zeta)
    if abs(zeta) >= 1.0:
        raise ValueError("fiber base point must lie in the open unit disk")
    e2 = math.exp(2.0 * t)
    e4 = e2 * e2
    den = 1.0 + e4 * abs(zeta) ** 2
    s = (1.0 + e4) / den
    return Point3(s * zeta.real, s * zeta.imag, e2 * (1.0 - abs(zeta) ** 2) / den)


def fiber_circle_point(zeta: complex, psi: float) -> Point3:
    """Full-circle parametrization; psi = 0 gives zeta, psi = pi gives zeta*."""
    zeta = complex(zeta)
    u = abs(zeta)
    if u == 0.0:
        raise ValueError("axis fiber is a line; sample it by height instead")
    dx, dy = zeta.real / u, zeta.imag / u
    c = (u + 1.0 / u) / 2.0
    R = (1.0 / u - u) / 2.0
    radial = c - R * math.cos(psi)
    return Point3(radial * dx, radial * dy, R * math.sin(psi))


def horosphere_radius(zeta: complex, t: float) -> float:
    """Euclidean radius of the horosphere based at zeta at flow time t."""
    if abs(zeta) >= 1.0:
        raise ValueError("horosphere base point must lie in the open unit disk")
    return 0.5 * math.exp(2.0 * t) * (1.0 - abs(zeta) ** 2)


def circle_of(p: Point3) -> CircleFiber:
    """The unique fiber through p; p must avoid the unit circle in C.

    Solves u + 1/u = (s² + x3² + 1)/s for the base radius u ∈ (0,1) with
    the numerically stable quadratic root, then recovers the flow time from
    the height equation, picking the branch whose planar radius matches.
    """
    s = math.hypot(p.x1, p.x2)
    t_h = abs(p.x3)
    if t_h == 0.0:
        if abs(s - 1.0) < 1e-15:
            raise ValueError("points of the unit circle belong to no fiber")
        if s < 1.0:
            return CircleFiber(complex(p.x1, p.x2), -math.inf)
        z = complex(p.x1, p.x2)
        return CircleFiber(1.0 / z.conjugate(), math.inf)
    if s == 0.0:
        return CircleFiber(0j, 0.5 * math.log(t_h))
    # root u in (0,1) of u + 1/u = B = (s² + t_h² + 1)/s, with B²−4 in its
    # cancellation-free factored form ((s−1)²+t_h²)((s+1)²+t_h²)/s²
    A = s * s + t_h * t_h
    B = (A + 1.0) / s
    W = math.sqrt((s - 1.0) ** 2 + t_h * t_h) \
        * math.sqrt((s + 1.0) ** 2 + t_h * t_h) / s
    u = 2.0 / (B + W)
    zeta = complex(u * p.x1 / s, u * p.x2 / s)
    # flow time from the monotone planar-radius equation: E² = e^{4t} equals
    # (s−u)/(u(1−su)) = m1 (B+W) / (2 m2); the differences m1 = A−1+sW and
    # m2 = B−2s+W are rewritten via m·m̄ = 4t_h² where they would cancel
    sW = s * W
    m1 = (A - 1.0) + sW if A >= 1.0 else 4.0 * t_h * t_h / (sW + 1.0 - A)
    b2s = (1.0 + t_h * t_h - s * s) / s
    m2 = b2s + W if b2s >= 0.0 else 4.0 * t_h * t_h / (W - b2s)
    e4 = m1 * (B + W) / (2.0 * m2)
    return CircleFiber(zeta, 0.25 * math.log(e4))


def bma_m(spec: MapSpec, z, zeta) -> complex:
    """m(z, ζ); INFINITY at the pole of the approximation."""
    sz = sigma_jet(spec, zeta).sigma_z
    if is_infinite(z):
        if abs(sz) < 1e-300:
            return INFINITY
        return -1.0 / sz
    dz = complex(z) - complex(zeta)
    den = 1.0 - sz * dz
    if abs(den) < _POLE_TOL:
        return INFINITY
    return dz / den


def bma_moebius(spec: MapSpec, zeta) -> PlanarMoebius:
    """m(·, ζ) as a planar Möbius map (determinant 1 by construction)."""
    zeta = complex(zeta)
    sz = sigma_jet(spec, zeta).sigma_z
    return PlanarMoebius(1.0, -zeta, -sz, 1.0 + sz * zeta)


def bma_plane(spec: MapSpec, z, zeta):
    """M(z, ζ) for z in the compactified plane; lands on the tangent plane."""
    m = bma_m(spec, z, zeta)
    if is_infinite(m):
        return INFINITY
    sj = surface_jet(spec, zeta)
    return sj.position + sj.du.scaled(m.real) + sj.dv.scaled(m.imag)


def space_bma(spec: MapSpec, zeta) -> SpaceMoebius:
    """The space Möbius map M(·, ζ): planar part m(·, ζ), tangent frame."""
    sj = surface_jet(spec, zeta)
    return SpaceMoebius(bma_moebius(spec, zeta), sj.frame())


def bma_space(spec: MapSpec, p, zeta):
    """M(p, ζ) for spatial p (mirror rule below C), or planar/complex p."""
    return space_bma(spec, zeta).apply(p)


def extend(spec: MapSpec, p):
    """The space extension: f̃ on the closed disk, fiberwise M elsewhere."""
    if is_infinite(p):
        return bma_space(spec, INFINITY, 0j)
    if p.x3 == 0.0:
        z = p.plane()
        r = abs(z)
        if abs(r - 1.0) < 1e-15:
            raise ValueError("extension is not evaluated on the unit circle")
        if r < 1.0:
            return lift_point(spec, z)
        return bma_plane(spec, z, 1.0 / z.conjugate())
    fiber = circle_of(p)
    return bma_space(spec, p, fiber.zeta)


def reflect(spec: MapSpec, zeta):
    """Reflection across the surface boundary: M(ζ*, ζ), ζ* = 1/ζ̄."""
    zeta = complex(zeta)
    if abs(zeta) >= 1.0:
        raise ValueError("reflection is defined for base points in the disk")
    zstar = INFINITY if zeta == 0 else 1.0 / zeta.conjugate()
    return bma_plane(spec, zstar, zeta)


def reflect_intrinsic(spec: MapSpec, zeta):
    """Reflection via the metric gradient: w̃ + 2 J(∇ log λ_Σ(w̃)).

    The surface gradient is assembled in the orthonormal tangent frame from
    the sigma jets: ∂_z log λ_Σ∘f̃ = (ζ̄ − σ_z(1−|ζ|²))/(1−|ζ|²), and J is
    inversion in the unit sphere.  Blows up (to INFINITY) exactly at the
    critical point of the pulled-back metric.
    """
    zeta = complex(zeta)
    sj = surface_jet(spec, zeta)
    w = 1.0 - abs(zeta) ** 2
    dz_log = (zeta.conjugate() - sj.sigma.sigma_z * w) / w
    ux = 2.0 * dz_log.real
    uy = -2.0 * dz_log.imag
    inv_e2 = 1.0 / (sj.e_sigma * sj.e_sigma)
    grad = (sj.du.scaled(ux) + sj.dv.scaled(uy)).scaled(inv_e2)
    jg = sphere_inversion_j(grad)
    if is_infinite(jg):
        return INFINITY
    return sj.position + jg.scaled(2.0)


def planar_extend(spec: MapSpec, zeta):
    """Extension of the planar harmonic map f itself.

    Inside the closed disk this is f; outside it is the projection of the
    reflection, which works out to the Ahlfors-Weill form applied to h and
    conj(g) separately:

        f(ζ*) + (1−|ζ*|²)h'(ζ*)/(ζ̄* − (1−|ζ*|²)σ_z(ζ*)) + conj-term.
    """
    zeta = complex(zeta)
    if abs(zeta) <= 1.0:
        return spec.f_value(zeta)
    zs = 1.0 / zeta.conjugate()
    w = 1.0 - abs(zs) ** 2
    sig = sigma_jet(spec, zs)
    hp = spec.h_prime.value(zs)
    qv = spec.q.value(zs)
    gp = hp * qv * qv
    den_h = zs.conjugate() - w * sig.sigma_z
    den_g = zs - w * sig.sigma_zbar
    if abs(den_h) < _POLE_TOL or abs(den_g) < _POLE_TOL:
        return INFINITY
    return spec.f_value(zs) + w * hp / den_h + (w * gp.conjugate()) / den_g


def classical_aw(spec: MapSpec, z):
    """Classical Ahlfors-Weill extension of an analytic map.

    For |z| > 1, with ζ = 1/z̄:
        f(ζ) + (1−|ζ|²) f'(ζ) / (ζ̄ − ½(1−|ζ|²) f''(ζ)/f'(ζ)).
    """
    if not spec.is_analytic:
        raise ValueError("classical extension needs an analytic spec (q = 0)")
    z = complex(z)
    if abs(z) <= 1.0:
        return spec.f_value(z)
    zeta = 1.0 / z.conjugate()
    hp = spec.hprime_jet(zeta)
    w = 1.0 - abs(zeta) ** 2
    den = zeta.conjugate() - 0.5 * w * hp.d1 / hp.f
    if abs(den) < _POLE_TOL:
        return INFINITY
    h, _, _ = spec.primitives(zeta)
    return h + w * hp.f / den


def stereo_project(sj: SurfaceJet, q_plane: complex, a: float):
    """Hyperbolic stereographic projection onto the horosphere of radius a.

    q_plane is a point of the tangent plane in Euclidean frame coordinates;
    the image is p = (cos²φ) q + 2a (sin²φ) N with r cosφ = a sinφ and
    2r = |q|.  Returns the coordinates and the spatial point.
    """
    if a <= 0.0:
        raise ValueError("horosphere radius must be positive")
    q_plane = complex(q_plane)
    r = 0.5 * abs(q_plane)
    phi = math.atan2(r, a)
    cos2 = math.cos(phi) ** 2
    sin2 = math.sin(phi) ** 2
    frame = sj.frame()
    e1 = frame.e1
    e2 = frame.e2
    planar = e1.scaled(q_plane.real) + e2.scaled(q_plane.imag)
    point = sj.position + planar.scaled(cos2) + sj.normal.scaled(2.0 * a * sin2)
    return StereoPoint(phi, r, a), point


def fiber_samples(zeta: complex, n: int):
    """n points covering the full fiber (both arcs, or the axis line)."""
    zeta = complex(zeta)
    if zeta == 0:
        half = max(n // 2, 1)
        heights = [math.exp(2.0 * (-3.0 + 6.0 * k / (half - 1))) if half > 1 else 1.0
                   for k in range(half)]
        return [Point3(0.0, 0.0, h) for h in heights] + \
               [Point3(0.0, 0.0, -h) for h in heights]
    return [fiber_circle_point(zeta, 2.0 * math.pi * k / n) for k in range(n)]
