"""The Weierstrass-Enneper lift: positions, tangent frame, second form.

The lift of f = h + conj(g) with g' = h'q² is

    f̃(z) = (Re(h+g), Im(h−g), 2 Im ∫₀ᶻ h'q dζ),

a conformal map onto a minimal surface with ⟨∂ξf̃,∂ξf̃⟩ = ⟨∂ηf̃,∂ηf̃⟩
= e^{2σ} and ⟨∂ξf̃,∂ηf̃⟩ = 0.  All derivatives here come from exact jets
of h' and q; only the position itself may need quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import Frame, Point3
from .maps import MapSpec, SigmaJet, sigma_jet_from_jets


@dataclass(frozen=True)
class SurfaceJet:
    """Lift data at one point: position, tangents, normal, second form."""

    z: complex
    position: Point3
    du: Point3          # ∂ξ f̃
    dv: Point3          # ∂η f̃
    normal: Point3      # unit N = (du × dv) e^{−2σ}
    sigma: SigmaJet
    alpha11: float
    alpha12: float
    alpha22: float
    dxx: Point3         # ∂ξξ f̃ (= −∂ηη f̃, components are harmonic)
    dxy: Point3         # ∂ξη f̃

    @property
    def e_sigma(self) -> float:
        return self.sigma.e_sigma

    def frame(self) -> Frame:
        """Tangent frame (e^{−σ}∂ξf̃, e^{−σ}∂ηf̃, N) with scale e^σ."""
        s = 1.0 / self.sigma.e_sigma
        return Frame(self.position, self.du.scaled(s), self.dv.scaled(s),
                     self.normal, self.sigma.e_sigma)


def _vec_xi(a: complex, b: complex, c: complex) -> Point3:
    # ∂ξ of (Re A, Im B, 2 Im C) for holomorphic A, B, C is (Re A', Im B', 2 Im C')
    return Point3(a.real, b.imag, 2.0 * c.imag)


def _vec_eta(a: complex, b: complex, c: complex) -> Point3:
    # ∂η of the same triple is (−Im A', Re B', 2 Re C')
    return Point3(-a.imag, b.real, 2.0 * c.real)


def surface_jet(spec: MapSpec, z) -> SurfaceJet:
    """Full first/second-order lift data at z, memoized per spec.

    The memo key quantizes z on a 1e-15 grid.  Entries are immutable and
    insertion is idempotent, so concurrent readers are safe under the GIL;
    shard specs per worker for multiprocessing.
    """
    z = complex(z)
    key = (round(z.real, 15), round(z.imag, 15))
    cache = spec._surface_cache
    hit = cache.get(key)
    if hit is not None:
        return hit

    hp = spec.hprime_jet(z)
    qj = spec.q_jet(z)
    gp = hp * qj * qj          # jet of g'
    hq = hp * qj               # jet of h'q
    sig = sigma_jet_from_jets(hp, qj)

    h, g, ihq = spec.primitives(z)
    position = Point3((h + g).real, (h - g).imag, 2.0 * ihq.imag)

    A = hp.f + gp.f
    B = hp.f - gp.f
    C = hq.f
    du = _vec_xi(A, B, C)
    dv = _vec_eta(A, B, C)

    inv_e2 = 1.0 / (sig.e_sigma * sig.e_sigma)
    normal = du.cross(dv).scaled(inv_e2)

    A1 = hp.d1 + gp.d1
    B1 = hp.d1 - gp.d1
    C1 = hq.d1
    dxx = _vec_xi(A1, B1, C1)
    dxy = _vec_eta(A1, B1, C1)

    a11 = dxx.dot(normal)
    a12 = dxy.dot(normal)

    sj = SurfaceJet(z, position, du, dv, normal, sig, a11, a12, -a11, dxx, dxy)
    if len(cache) > 200000:
        cache.clear()
    cache[key] = sj
    return sj


def lift_point(spec: MapSpec, z) -> Point3:
    """f̃(z)."""
    h, g, ihq = spec.primitives(complex(z))
    return Point3((h + g).real, (h - g).imag, 2.0 * ihq.imag)


def tangential_project(sj: SurfaceJet, v: Point3) -> Point3:
    """Orthogonal projection of v onto the tangent plane at sj."""
    n = sj.normal
    return v - n.scaled(v.dot(n))


def axis_derivatives(spec: MapSpec, x: float):
    """(f̃(x), f̃'(x), f̃''(x), f̃'''(x)) along the real diameter.

    The derivative along the real axis is ∂ξ, so the k-th derivative of the
    curve is (Re A^(k-1), Im B^(k-1), 2 Im C^(k-1)) for A = h'+g', B = h'−g',
    C = h'q; jets of h' and q supply everything exactly.
    """
    z = complex(x)
    hp = spec.hprime_jet(z)
    qj = spec.q_jet(z)
    gp = hp * qj * qj
    hq = hp * qj
    A = hp + gp
    B = hp - gp
    C = hq
    pos = lift_point(spec, z)
    d1 = _vec_xi(A.f, B.f, C.f)
    d2 = _vec_xi(A.d1, B.d1, C.d1)
    d3 = _vec_xi(A.d2, B.d2, C.d2)
    return pos, d1, d2, d3
