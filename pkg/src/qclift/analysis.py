"""Verification machinery: the auxiliary metric field, convexity, curve
Schwarzians, gradient and dilatation bounds, and the quasiconformality
constants.

The central object is U(z) = ((1−|z|²) e^{τ(z)})^{−1/2}, the square root
of the pulled-back Poincaré-type metric of the image surface; composing
with a conformal space map T multiplies e^τ by the conformal factor of T
along the surface.  Under the criterion bound U is hyperbolically convex
with at most one critical point, and its critical points are dual to the
circle bundle fibers through inversion centers; the checks here measure
all of that directly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .geometry import Point3, is_infinite
from .lift import axis_derivatives, lift_point
from .maps import GridSpec, MapSpec, sigma_jet


class UField:
    """The auxiliary metric field for spec, optionally post-transformed.

    post may be any conformal transformation of compactified R³ exposing
    apply(Point3) and conformal_factor(Point3) (SpaceMoebius, Inversion).
    """

    __slots__ = ("spec", "post")

    def __init__(self, spec: MapSpec, post=None):
        self.spec = spec
        self.post = post

    def e_tau(self, z) -> float:
        et = sigma_jet(self.spec, z).e_sigma
        if self.post is not None:
            et *= self.post.conformal_factor(lift_point(self.spec, z))
        return et

    def value(self, z) -> float:
        w = 1.0 - abs(z) ** 2
        if w <= 0.0:
            raise ValueError("U is defined on the open unit disk")
        et = self.e_tau(z)
        if et <= 0.0:
            raise ValueError("degenerate conformal factor")
        return 1.0 / math.sqrt(w * et)


def u_value(field: UField, z) -> float:
    return field.value(z)


def u_grad(field: UField, z) -> complex:
    """∂_z log U for a plain field: (ζ̄ − σ_z(ζ)(1−|ζ|²)) / (2(1−|ζ|²)).

    The reciprocal of twice this is exactly the Möbius-approximation value
    m(ζ*, ζ), so the gradient norm is 1/|m(ζ*, ζ)|.
    """
    if field.post is not None:
        raise ValueError("closed-form gradient needs a plain field")
    z = complex(z)
    w = 1.0 - abs(z) ** 2
    sz = sigma_jet(field.spec, z).sigma_z
    return (z.conjugate() - sz * w) / (2.0 * w)


def u_grad_norm(field: UField, z) -> float:
    """‖∇ log U‖ = 2 |∂_z log U|."""
    return 2.0 * abs(u_grad(field, z))


# ---------------------------------------------------------------------------
# geodesics and hyperbolic convexity


def geodesic(theta_a: float, theta_b: float):
    """Arclength parametrization s ↦ γ(s) of the geodesic with the given
    boundary endpoint angles; built from a disk automorphism applied to the
    diameter x(s) = tanh(s), so s is hyperbolic arclength automatically."""
    theta_c = 0.5 * (theta_a + theta_b)
    delta = 0.5 * abs(theta_b - theta_a)
    delta = delta % math.pi
    if delta == 0.0:
        raise ValueError("geodesic endpoints coincide")
    cd = math.cos(delta)
    m = 0.0 if abs(cd) < 1e-12 else (1.0 - math.sin(delta)) / cd
    rot = cmath.exp(1j * theta_c)

    def gamma(s: float) -> complex:
        x = math.tanh(s)
        return rot * (1j * x + m) / (1.0 + 1j * m * x)

    return gamma


@dataclass(frozen=True)
class MarginReport:
    """Worst margin of a sampled inequality (margin ≥ 0 means satisfied)."""

    min_margin: float
    worst_point: complex
    n_samples: int

    @property
    def passed(self) -> bool:
        return self.min_margin >= 0.0


def convexity_check(field: UField, endpoints, n_samples: int = 200,
                    s_max: float = 3.0, fd_step: float = 1e-2,
                    tol: float = 1e-6) -> MarginReport:
    """Minimum of d²/ds² U(γ(s)) along one geodesic, by 5-point stencils.

    endpoints is the boundary angle pair; the margin reported is the
    second derivative plus tol, so nonnegative margins mean convexity
    holds within tolerance.
    """
    gamma = geodesic(*endpoints)
    h = fd_step
    worst = math.inf
    worst_z = 0j
    for i in range(n_samples):
        s = -s_max + 2.0 * s_max * i / max(n_samples - 1, 1)
        u_m2 = field.value(gamma(s - 2 * h))
        u_m1 = field.value(gamma(s - h))
        u_0 = field.value(gamma(s))
        u_p1 = field.value(gamma(s + h))
        u_p2 = field.value(gamma(s + 2 * h))
        d2 = (-u_m2 + 16.0 * u_m1 - 30.0 * u_0 + 16.0 * u_p1 - u_p2) / (12.0 * h * h)
        if d2 < worst:
            worst = d2
            worst_z = gamma(s)
    return MarginReport(worst + tol, worst_z, n_samples)


# ---------------------------------------------------------------------------
# critical points


def _fd_grad(field: UField, z: complex, h: float):
    ux = (field.value(z + h) - field.value(z - h)) / (2.0 * h)
    uy = (field.value(z + 1j * h) - field.value(z - 1j * h)) / (2.0 * h)
    return ux, uy


def _grad_vec(field: UField, z: complex, h: float):
    if field.post is None:
        g = u_grad(field, z)
        u = field.value(z)
        return 2.0 * u * g.real, -2.0 * u * g.imag
    return _fd_grad(field, z, h)


def _fd_hessian(field: UField, z: complex, h: float):
    u0 = field.value(z)
    uxx = (field.value(z + h) - 2 * u0 + field.value(z - h)) / (h * h)
    uyy = (field.value(z + 1j * h) - 2 * u0 + field.value(z - 1j * h)) / (h * h)
    uxy = (field.value(z + h + 1j * h) - field.value(z + h - 1j * h)
           - field.value(z - h + 1j * h) + field.value(z - h - 1j * h)) / (4 * h * h)
    return uxx, uxy, uyy


def _radial_tail_increasing(field: UField, n_angles: int = 64) -> bool:
    """Boundary screen: U eventually increasing along every sampled radius.

    An eventually-decreasing tail on any radius certifies that no critical
    point exists (unbounded image); by hyperbolic convexity a radius that
    is increasing at r stays increasing beyond it.
    """
    delta = 2e-3
    for j in range(n_angles):
        direction = cmath.exp(2j * math.pi * j / n_angles)
        ok = False
        for r in (0.93, 0.97, 0.995):
            z = r * direction
            du = (field.value(z + delta * direction)
                  - field.value(z - delta * direction)) / (2.0 * delta)
            if du > 0.0:
                ok = True
                break
        if not ok:
            return False
    return True


def critical_point_find(field: UField, n_radii: int = 16, n_angles: int = 32,
                        r_seed_max: float = 0.9, gradient_tol: float = 1e-12,
                        max_iter: int = 100):
    """Locate the critical point of U, or None when the image is unbounded.

    Grid-minimum seed followed by damped Newton on the gradient with a
    finite-difference Hessian; the gradient itself is exact for plain
    fields and Richardson-free central differences otherwise.
    """
    if not _radial_tail_increasing(field):
        return None
    best = 0j
    best_u = field.value(0j)
    for i in range(1, n_radii + 1):
        r = r_seed_max * i / n_radii
        for j in range(n_angles):
            z = r * cmath.exp(2j * math.pi * j / n_angles)
            u = field.value(z)
            if u < best_u:
                best_u = u
                best = z
    z = best
    best_g = math.inf
    for _ in range(max_iter):
        h = 1e-5 * max(0.05, 1.0 - abs(z))
        gx, gy = _grad_vec(field, z, h)
        gnorm = math.hypot(gx, gy)
        if gnorm < best_g:
            best_g, best = gnorm, z
        if gnorm < gradient_tol:
            return z
        uxx, uxy, uyy = _fd_hessian(field, z, h * 10.0)
        det = uxx * uyy - uxy * uxy
        if abs(det) < 1e-14:
            step = complex(-gx, -gy) * 1e-2
        else:
            step = complex(-(uyy * gx - uxy * gy) / det,
                           -(uxx * gy - uxy * gx) / det)
        lam = 1.0
        for _ in range(25):
            znew = z + lam * step
            if abs(znew) < 0.999:
                nx, ny = _grad_vec(field, znew, h)
                if math.hypot(nx, ny) < gnorm:
                    break
            lam *= 0.5
        else:
            break  # stalled at the FD noise floor
        if abs(lam * step) < 1e-14:
            z = znew
            break
        z = znew
    # finite-difference gradients bottom out around 1e-9; a stall below the
    # looser floor still locates the minimum to far better than 1e-6
    if best_g < 1e-7:
        return best
    # sharp wells (inversion center close to the surface) defeat the FD
    # Hessian; fall back to value-only parabolic descent
    z = _parabolic_polish(field, best)
    h = 1e-6 * max(0.05, 1.0 - abs(z))
    gx, gy = _grad_vec(field, z, h)
    if math.hypot(gx, gy) < 1e-4 * max(1.0, field.value(z)):
        return z
    raise RuntimeError("critical point search did not converge")


def _parabolic_polish(field: UField, z: complex, span: float = 1e-2,
                      sweeps: int = 40) -> complex:
    """Cyclic parabolic line minimization on raw values (no differencing)."""
    for _ in range(sweeps):
        for d in (1.0 + 0j, 1j):
            u0 = field.value(z)
            up = field.value(z + span * d)
            um = field.value(z - span * d)
            curv = up - 2.0 * u0 + um
            if curv <= 0.0:
                continue
            delta = 0.5 * span * (um - up) / curv
            delta = max(min(delta, 2.0 * span), -2.0 * span)
            znew = z + delta * d
            if abs(znew) < 0.999 and field.value(znew) <= u0:
                z = znew
        span = max(0.5 * span, 1e-9)
    return z


# ---------------------------------------------------------------------------
# the curve Schwarzian


@dataclass(frozen=True)
class CurveJet:
    """Space curve data at one parameter value."""

    x: float
    value: Point3
    d1: Point3
    d2: Point3
    d3: Point3

    def __post_init__(self):
        if self.d1.norm() == 0.0:
            raise ValueError("curve jet needs nonvanishing speed")


def s1_curve(cj: CurveJet) -> float:
    """Möbius-invariant curve Schwarzian
    ⟨φ''',φ'⟩/‖φ'‖² − 3⟨φ'',φ'⟩²/‖φ'‖⁴ + (3/2)‖φ''‖²/‖φ'‖²."""
    v2 = cj.d1.norm2()
    return (cj.d3.dot(cj.d1) / v2
            - 3.0 * cj.d2.dot(cj.d1) ** 2 / (v2 * v2)
            + 1.5 * cj.d2.norm2() / v2)


def axis_curve_jet(spec: MapSpec, x: float) -> CurveJet:
    """Jet of the lifted diameter x ↦ f̃(x), from exact map jets."""
    pos, d1, d2, d3 = axis_derivatives(spec, x)
    return CurveJet(x, pos, d1, d2, d3)


_D1_W = (-1 / 60, 3 / 20, -3 / 4, 0.0, 3 / 4, -3 / 20, 1 / 60)
_D2_W = (1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90)
_D3_W = (1 / 8, -1.0, 13 / 8, 0.0, -13 / 8, 1.0, -1 / 8)


def curve_jet_fd(curve, x: float, h: float = 1e-2,
                 richardson: bool = False) -> CurveJet:
    """Finite-difference curve jet from a callable x ↦ Point3 (7-point).

    richardson extrapolates the third derivative (its stencil is only
    fourth order) from steps h and h/2.
    """
    center = curve(x)
    # all stencil weights sum to zero, so differencing the centered values
    # is exact and removes the common-mode roundoff of large positions
    pts = [curve(x + k * h) - center for k in range(-3, 4)]
    def stencil(weights, scale, values):
        acc = Point3(0.0, 0.0, 0.0)
        for w, p in zip(weights, values):
            if w:
                acc = acc + p.scaled(w)
        return acc.scaled(scale)
    d3 = stencil(_D3_W, 1.0 / (h * h * h), pts)
    if richardson:
        half = h / 2.0
        pts_h = [curve(x + k * half) - center for k in range(-3, 4)]
        d3_h = stencil(_D3_W, 1.0 / (half ** 3), pts_h)
        d3 = (d3_h.scaled(16.0) - d3).scaled(1.0 / 15.0)
        return CurveJet(x, center,
                        stencil(_D1_W, 1.0 / half, pts_h),
                        stencil(_D2_W, 1.0 / (half * half), pts_h),
                        d3)
    return CurveJet(x, center,
                    stencil(_D1_W, 1.0 / h, pts),
                    stencil(_D2_W, 1.0 / (h * h), pts),
                    d3)


def curve_jet_invert(cj: CurveJet, center: Point3) -> CurveJet:
    """Exact jet of I_center ∘ φ from the jet of φ (vector-scalar Leibniz)."""
    w = cj.value - center
    w1, w2, w3 = cj.d1, cj.d2, cj.d3
    s0 = w.norm2()
    s1 = 2.0 * w.dot(w1)
    s2 = 2.0 * (w.dot(w2) + w1.norm2())
    s3 = 2.0 * (w.dot(w3) + 3.0 * w1.dot(w2))
    r0 = 1.0 / s0
    r1 = -s1 * r0 * r0
    r2 = (2.0 * s1 * s1 - s0 * s2) * r0 ** 3
    r3 = (-6.0 * s1 ** 3 + 6.0 * s0 * s1 * s2 - s0 * s0 * s3) * r0 ** 4
    return CurveJet(
        cj.x,
        w.scaled(r0),
        w1.scaled(r0) + w.scaled(r1),
        w2.scaled(r0) + w1.scaled(2.0 * r1) + w.scaled(r2),
        w3.scaled(r0) + w2.scaled(3.0 * r1) + w1.scaled(3.0 * r2) + w.scaled(r3),
    )


def curve_jet_affine(cj: CurveJet, transform) -> CurveJet:
    """Exact jet of an affine space map applied to φ.

    transform must act affinely (e.g. a SpaceMoebius whose planar part has
    c = 0); its linear part is extracted by differencing against the image
    of the origin, which is exact for affine maps.
    """
    origin_img = transform.apply(Point3(0.0, 0.0, 0.0))
    lin = lambda v: transform.apply(v) - origin_img
    return CurveJet(cj.x, transform.apply(cj.value),
                    lin(cj.d1), lin(cj.d2), lin(cj.d3))


def s1_bound_check(spec: MapSpec, rho: float, xs=None,
                   tol: float = 1e-6) -> MarginReport:
    """S₁ of the lifted diameter against 2ρ/(1−x²)² + tol."""
    if xs is None:
        xs = [-0.98 + 1.96 * i / 127 for i in range(128)]
    worst = math.inf
    worst_x = 0.0
    for x in xs:
        bound = 2.0 * rho / (1.0 - x * x) ** 2
        margin = bound + tol - s1_curve(axis_curve_jet(spec, x))
        if margin < worst:
            worst = margin
            worst_x = x
    return MarginReport(worst, complex(worst_x), len(xs))


def grad_bound_check(spec: MapSpec, grid: GridSpec | None = None,
                     tol: float = 1e-9) -> MarginReport:
    """(1−|ζ|²) ‖∇ log U‖ against √2 + tol on the grid."""
    grid = grid or GridSpec()
    field = UField(spec)
    worst = math.inf
    worst_z = 0j
    bound = math.sqrt(2.0) + tol
    for z in grid.points():
        val = (1.0 - abs(z) ** 2) * u_grad_norm(field, z)
        margin = bound - val
        if margin < worst:
            worst = margin
            worst_z = z
    return MarginReport(worst, worst_z, grid.size())


# ---------------------------------------------------------------------------
# quasiconformality constants


@dataclass(frozen=True)
class QcConstants:
    """Dilatation constants for the criterion parameter rho."""

    rho: float
    epsilon: float
    kappa1: float
    kappa2: float
    k: float


def h_epsilon(eps: float) -> float:
    """The solver target 2ε³(2−ε)/(3ε²−2ε+1); increasing from 0 to 1."""
    return 2.0 * eps ** 3 * (2.0 - eps) / (3.0 * eps * eps - 2.0 * eps + 1.0)


def qc_constants(rho: float, analytic: bool = False) -> QcConstants:
    """Solve h(ε) = ρ by bisection and assemble κ₁, κ₂, k.

    κ₁ = 1−(1−ε)², κ₂ = 2√ρ, k = (1+κ₁+κ₂)/(1−κ₁).  The analytic-case
    variant (flat image surface) takes κ₁ = ρ, κ₂ = 0, k = (1+ρ)/(1−ρ).
    """
    if not 0.0 <= rho < 1.0:
        raise ValueError("rho must lie in [0, 1)")
    if analytic:
        return QcConstants(rho, math.nan, rho, 0.0, (1.0 + rho) / (1.0 - rho))
    if rho == 0.0:
        eps = 0.0
    else:
        lo, hi = 0.0, 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if h_epsilon(mid) < rho:
                lo = mid
            else:
                hi = mid
        eps = 0.5 * (lo + hi)
    kappa1 = 1.0 - (1.0 - eps) ** 2
    kappa2 = 2.0 * math.sqrt(rho)
    return QcConstants(rho, eps, kappa1, kappa2,
                       (1.0 + kappa1 + kappa2) / (1.0 - kappa1))


def reflection_constant(rho: float) -> float:
    """(1+√ρ)²/(1−ρ), the reflection's quasiconformality constant."""
    if not 0.0 <= rho < 1.0:
        raise ValueError("rho must lie in [0, 1)")
    return (1.0 + math.sqrt(rho)) ** 2 / (1.0 - rho)


# ---------------------------------------------------------------------------
# measured dilatations


@dataclass(frozen=True)
class DilatationSample:
    """Singular-value ratio of a difference Jacobian at one point."""

    point: Point3
    ratio: float
    condition: float
    ill_conditioned: bool


def _fd_jacobian(fn, p: Point3, h: float):
    cols = []
    for e in (Point3(h, 0, 0), Point3(0, h, 0), Point3(0, 0, h)):
        plus = fn(p + e)
        minus = fn(p - e)
        if is_infinite(plus) or is_infinite(minus):
            return None
        if max(plus.norm(), minus.norm()) > 1e9:
            return None
        cols.append([(plus.x1 - minus.x1) / (2 * h),
                     (plus.x2 - minus.x2) / (2 * h),
                     (plus.x3 - minus.x3) / (2 * h)])
    return np.array(cols).T


def measured_dilatation(fn, p: Point3, step: float | None = None) -> DilatationSample:
    """Dilatation of a space map at p from a central-difference Jacobian.

    One Richardson level combines steps h and h/2; samples where the map
    blows up or the Jacobian is numerically singular (condition above 1e6,
    or the two step sizes disagree badly) are flagged ill-conditioned.
    """
    h = step if step is not None else 1e-4 * max(1.0, p.norm())
    j1 = _fd_jacobian(fn, p, h)
    j2 = _fd_jacobian(fn, p, h / 2.0)
    if j1 is None or j2 is None:
        return DilatationSample(p, math.inf, math.inf, True)
    jr = (4.0 * j2 - j1) / 3.0
    sv = np.linalg.svd(jr, compute_uv=False)
    if sv[-1] <= 0.0 or not np.isfinite(sv).all():
        return DilatationSample(p, math.inf, math.inf, True)
    cond = float(sv[0] / sv[-1])
    drift = float(np.linalg.norm(j1 - j2) / max(np.linalg.norm(j2), 1e-300))
    ill = cond > 1e6 or drift > 1e-2
    return DilatationSample(p, cond, cond, ill)


def measured_planar_dilatation(fn, z: complex, step: float = 1e-5) -> float:
    """Dilatation of a plane map C → C by a 2×2 difference Jacobian."""
    h = step
    fx = (fn(z + h) - fn(z - h)) / (2 * h)
    fy = (fn(z + 1j * h) - fn(z - 1j * h)) / (2 * h)
    jac = np.array([[fx.real, fy.real], [fx.imag, fy.imag]])
    sv = np.linalg.svd(jac, compute_uv=False)
    return float(sv[0] / sv[-1])


def measured_reflection_dilatation(spec: MapSpec, zeta: complex,
                                   step: float = 1e-5) -> float:
    """Dilatation of the boundary reflection as a surface-to-surface map.

    The lift is conformal, so the ratio of the two singular values of the
    3×2 Jacobian of ζ ↦ R(f̃(ζ)) is the reflection's dilatation at f̃(ζ).
    """
    from .extension import reflect
    h = step
    pts = [reflect(spec, zeta + d) for d in (h, -h, 1j * h, -1j * h)]
    if any(is_infinite(p) for p in pts):
        return math.inf
    px = (pts[0] - pts[1]).scaled(1.0 / (2 * h))
    py = (pts[2] - pts[3]).scaled(1.0 / (2 * h))
    jac = np.array([px.as_tuple(), py.as_tuple()]).T
    sv = np.linalg.svd(jac, compute_uv=False)
    return float(sv[0] / sv[1])


# ---------------------------------------------------------------------------
# planar-extension hypotheses


def inclination(spec: MapSpec, z) -> float:
    """Tangent-plane inclination from vertical: arctan(2√|ω|/(1−|ω|))."""
    om = abs(dilatation_omega_abs(spec, z))
    if om >= 1.0:
        raise ValueError("inclination needs |omega| < 1")
    return math.atan2(2.0 * math.sqrt(om), 1.0 - om)


def dilatation_omega_abs(spec: MapSpec, z) -> float:
    qv = spec.q.value(z)
    return abs(qv) ** 2


@dataclass(frozen=True)
class OmegaBoundReport:
    sup_sqrt_omega: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.sup_sqrt_omega < self.threshold


def omega_bound_check(spec: MapSpec, rho: float,
                      grid: GridSpec | None = None) -> OmegaBoundReport:
    """sup √|ω| against (1−√ρ)/(1+√ρ) on the grid."""
    grid = grid or GridSpec()
    sup = max(abs(spec.q.value(z)) for z in grid.points())
    threshold = (1.0 - math.sqrt(rho)) / (1.0 + math.sqrt(rho))
    return OmegaBoundReport(sup, threshold)
