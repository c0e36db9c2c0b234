"""The registered verification checks and the report they produce.

Each check measures one inequality or identity of the construction on
random samples and reports a margin (nonnegative means satisfied).
Checks split into two kinds: algebraic identities of the formulas, which
must hold for every map and may fail the suite, and hypothesis-dependent
bounds, which are downgraded to "not-guaranteed" when the estimated rho
is >= 1 (out-of-hypothesis control maps are diagnostic, not failures).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from . import analysis as an
from . import extension as ext
from .geometry import (Frame, Inversion, PlanarMoebius, Point3, SpaceMoebius,
                       is_infinite)
from .lift import lift_point, surface_jet, tangential_project
from .maps import (GridSpec, MapSpec, compose_with_automorphism,
                   condition_value, estimate_rho)

SCHEMA_VERSION = 1


@dataclass
class CheckRecord:
    name: str
    anchor: str
    margin: float
    status: str            # pass | fail | not-guaranteed
    note: str = ""

    def to_json(self):
        return {"name": self.name, "anchor": self.anchor,
                "margin": self.margin, "status": self.status, "note": self.note}


@dataclass
class VerifyContext:
    spec: MapSpec
    rho: float
    grid: GridSpec
    rng: random.Random
    scale: float = 1.0          # sample-count multiplier
    tol_scale: float = 1.0

    @property
    def compliant(self) -> bool:
        return self.rho < 1.0

    def count(self, base: int) -> int:
        return max(1, int(round(base * self.scale)))


def _random_disk(rng, r_max=0.8) -> complex:
    r = r_max * math.sqrt(rng.random())
    t = rng.uniform(0.0, 2.0 * math.pi)
    return complex(r * math.cos(t), r * math.sin(t))


def _random_unit(rng) -> complex:
    t = rng.uniform(0.0, 2.0 * math.pi)
    return complex(math.cos(t), math.sin(t))


def random_space_moebius(rng) -> SpaceMoebius:
    while True:
        coeffs = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(4)]
        try:
            planar = PlanarMoebius(*coeffs)
            break
        except ValueError:
            continue
    e1 = _random_unit_vector(rng)
    helper = _random_unit_vector(rng)
    e3 = e1.cross(helper)
    while e3.norm() < 1e-6:
        helper = _random_unit_vector(rng)
        e3 = e1.cross(helper)
    e3 = e3.scaled(1.0 / e3.norm())
    e2 = e3.cross(e1)
    origin = Point3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2))
    return SpaceMoebius(planar, Frame(origin, e1, e2, e3, math.exp(rng.uniform(-1, 1))))


def _random_unit_vector(rng) -> Point3:
    while True:
        v = Point3(rng.gauss(0, 1), rng.gauss(0, 1), rng.gauss(0, 1))
        n = v.norm()
        if n > 1e-6:
            return v.scaled(1.0 / n)


# ---------------------------------------------------------------------------
# individual checks


def check_condition_rho(ctx: VerifyContext) -> CheckRecord:
    margin = 1.0 - ctx.rho
    status = "pass" if margin > 0.0 else "not-guaranteed"
    note = "" if margin > 0.0 else "criterion bound violated (rho >= 1)"
    return CheckRecord("condition-rho", "normalized-schwarzian-curvature-sup",
                       margin, status, note)


def check_curvature_sign(ctx: VerifyContext) -> CheckRecord:
    worst = math.inf
    for z in ctx.grid.points():
        s = condition_value(ctx.spec, z)
        worst = min(worst, s.curvature_term)
    margin = worst + 1e-12
    return CheckRecord("curvature-sign", "gaussian-curvature-nonpositive",
                       margin, "pass" if margin >= 0 else "fail")


def check_gradient_bound(ctx: VerifyContext) -> CheckRecord:
    rep = an.grad_bound_check(ctx.spec, ctx.grid, tol=1e-9 * ctx.tol_scale)
    return _hypothesis_record("gradient-bound", "grad-log-u-sqrt2-bound",
                              rep.min_margin, ctx)


def check_convexity(ctx: VerifyContext) -> CheckRecord:
    rng = ctx.rng
    n_geo = ctx.count(10)
    n_samples = ctx.count(120)
    worst = math.inf
    field = an.UField(ctx.spec)
    for _ in range(n_geo):
        a = rng.uniform(0, 2 * math.pi)
        b = a + rng.uniform(0.3, 2 * math.pi - 0.3)
        rep = an.convexity_check(field, (a, b), n_samples=n_samples,
                                 tol=1e-6 * ctx.tol_scale)
        worst = min(worst, rep.min_margin)
    for _ in range(ctx.count(4)):
        q = Point3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2))
        post = an.UField(ctx.spec, Inversion(q))
        for _ in range(3):
            a = rng.uniform(0, 2 * math.pi)
            b = a + rng.uniform(0.3, 2 * math.pi - 0.3)
            rep = an.convexity_check(post, (a, b), n_samples=ctx.count(60),
                                     tol=1e-6 * ctx.tol_scale)
            worst = min(worst, rep.min_margin)
    return _hypothesis_record("convexity", "u-hyperbolic-convexity", worst, ctx)


def contact_order_ratios(spec: MapSpec, zeta: complex, direction: complex,
                         ts=(1e-2, 5e-3, 2.5e-3)):
    """Residual decay exponents of the second-order-contact property.

    Returns None when the residuals sit at the exactness floor (the
    approximation is exact for Möbius-like maps)."""
    sj = surface_jet(spec, zeta)
    res = []
    for t in ts:
        z = zeta + t * direction
        d_surface = lift_point(spec, z) - sj.position
        proj = tangential_project(sj, d_surface)
        mp = ext.bma_plane(spec, z, zeta)
        res.append((proj - (mp - sj.position)).norm())
    floor = 1e-11 * sj.e_sigma
    if max(res) < floor:
        return None
    return [math.log2(res[i] / res[i + 1]) for i in range(len(res) - 1)]


def check_contact_order(ctx: VerifyContext) -> CheckRecord:
    rng = ctx.rng
    worst = math.inf
    exact = 0
    n = ctx.count(20)
    for _ in range(n):
        zeta = _random_disk(rng, 0.7)
        ratios = contact_order_ratios(ctx.spec, zeta, _random_unit(rng))
        if ratios is None:
            exact += 1
            continue
        for r in ratios:
            worst = min(worst, r - 2.8, 3.2 - r)
    if exact == n:
        return CheckRecord("contact-order", "bma-second-order-contact", 0.2,
                           "pass", "contact exact to machine precision")
    note = f"{exact} exact samples" if exact else ""
    return CheckRecord("contact-order", "bma-second-order-contact", worst,
                       "pass" if worst >= 0 else "fail", note)


def frozen_basepoint_residual(spec: MapSpec, z: complex, h: float = 1e-4) -> float:
    """max of ‖∂ξ M(z,·)‖, ‖∂η M(z,·)‖ at the base point, over e^σ."""
    e_sigma = surface_jet(spec, z).e_sigma
    worst = 0.0
    for d in (h, 1j * h):
        plus = ext.bma_plane(spec, z, z + d)
        minus = ext.bma_plane(spec, z, z - d)
        worst = max(worst, (plus - minus).scaled(1.0 / (2 * h)).norm())
    return worst / e_sigma


def check_frozen_basepoint(ctx: VerifyContext) -> CheckRecord:
    rng = ctx.rng
    worst = 0.0
    for _ in range(ctx.count(25)):
        worst = max(worst, frozen_basepoint_residual(ctx.spec, _random_disk(rng, 0.8)))
    margin = 1e-5 * ctx.tol_scale - worst
    return CheckRecord("frozen-basepoint", "bma-basepoint-stationary", margin,
                       "pass" if margin >= 0 else "fail")


def frozen_factor_residual(spec: MapSpec, z: complex, h: float = 1e-4) -> float:
    """|∂ξ ‖DM(z,·)‖| and the η version at the base point, over e^σ."""
    zp = Point3.from_complex(z)
    e_sigma = surface_jet(spec, z).e_sigma
    worst = 0.0
    for d in (h, 1j * h):
        plus = ext.space_bma(spec, z + d).conformal_factor(zp)
        minus = ext.space_bma(spec, z - d).conformal_factor(zp)
        worst = max(worst, abs(plus - minus) / (2 * h))
    return worst / e_sigma


def check_frozen_factor(ctx: VerifyContext) -> CheckRecord:
    rng = ctx.rng
    worst = 0.0
    for _ in range(ctx.count(25)):
        worst = max(worst, frozen_factor_residual(ctx.spec, _random_disk(rng, 0.8)))
    margin = 1e-5 * ctx.tol_scale - worst
    return CheckRecord("frozen-conformal-factor", "bma-conformal-factor-stationary",
                       margin, "pass" if margin >= 0 else "fail")


def velocity_component_margin(spec: MapSpec, zeta0: complex, t0: float,
                              h: float = 1e-4, slack: float = 1e-4):
    """Measured base-point velocity of M(p0, ·) against the component bounds.

    Splits the ξ- and η-derivatives into parts tangent/normal to the image
    horosphere and compares with the tangential (V+W) and normal (W⊥)
    bounds; the same bounds apply in both directions since the η-variant
    coefficient only flips the curvature sign inside an absolute value.
    """
    p0 = ext.fiber_point(zeta0, t0)
    sj = surface_jet(spec, zeta0)
    e_sig = sj.e_sigma
    a0 = 0.5 * e_sig * math.exp(2.0 * t0) * (1.0 - abs(zeta0) ** 2)
    refl = ext.reflect(spec, zeta0)
    if is_infinite(refl):
        return None
    r0 = 0.5 * (refl - sj.position).norm()
    phi0 = math.atan2(r0, a0)
    cos2 = math.cos(phi0) ** 2
    s = condition_value(spec, zeta0)
    sqrt_k = math.sqrt(s.curvature_term) / e_sig          # √|K|
    v_bound = 2.0 * r0 * r0 * cos2 / e_sig * (abs(s.schwarzian) + 0.5 * s.curvature_term)
    w_bound = (4.0 * r0 * r0 * cos2 * math.exp(-2.0 * t0)
               * sqrt_k / (1.0 - abs(zeta0) ** 2))
    wp_bound = 2.0 * r0 * cos2 * math.sqrt(s.curvature_term)  # 2r₀cos²φ e^σ √|K|
    center = sj.position + sj.normal.scaled(a0)
    image0 = ext.bma_space(spec, p0, zeta0)
    nvec = (image0 - center).scaled(1.0 / a0)
    worst = math.inf
    for d in (h, 1j * h):
        plus = ext.bma_space(spec, p0, zeta0 + d)
        minus = ext.bma_space(spec, p0, zeta0 - d)
        deriv = (plus - minus).scaled(1.0 / (2 * h))
        normal_part = deriv.dot(nvec)
        tangential = (deriv - nvec.scaled(normal_part)).norm()
        tan_bound = v_bound + w_bound
        worst = min(worst,
                    tan_bound + slack * (1.0 + tan_bound) - tangential,
                    wp_bound + slack * (1.0 + wp_bound) - abs(normal_part))
    return worst


def check_velocity_components(ctx: VerifyContext) -> CheckRecord:
    rng = ctx.rng
    worst = math.inf
    for _ in range(ctx.count(12)):
        zeta = _random_disk(rng, 0.75)
        if abs(zeta) < 0.05:
            zeta += 0.1
        t0 = rng.uniform(-1.5, 1.5)
        m = velocity_component_margin(ctx.spec, zeta, t0,
                                      slack=1e-4 * ctx.tol_scale)
        if m is not None:
            worst = min(worst, m)
    return CheckRecord("velocity-components", "bma-derivative-component-bounds",
                       worst, "pass" if worst >= 0 else "fail")


def bundle_min_distance(spec: MapSpec, z1: complex, z2: complex,
                        n_points: int = 256) -> float:
    import numpy as np
    def circle(zeta):
        pts = []
        for p in ext.fiber_samples(zeta, n_points):
            q = ext.bma_space(spec, p, zeta)
            if not is_infinite(q):
                pts.append(q.as_tuple())
        return np.array(pts)
    c1, c2 = circle(z1), circle(z2)
    diff = c1[:, None, :] - c2[None, :, :]
    return float(np.sqrt((diff ** 2).sum(axis=2)).min())


def check_bundle_disjoint(ctx: VerifyContext) -> CheckRecord:
    rng = ctx.rng
    worst = math.inf
    for _ in range(ctx.count(40)):
        z1 = _random_disk(rng, 0.85)
        z2 = _random_disk(rng, 0.85)
        if abs(z1 - z2) < 1e-3:
            continue
        worst = min(worst, bundle_min_distance(ctx.spec, z1, z2))
    margin = worst - 1e-8
    return _hypothesis_record("bundle-disjointness", "image-circles-disjoint",
                              margin, ctx)


def reflection_agreement_residual(spec: MapSpec, zeta: complex) -> float:
    r1 = ext.reflect(spec, zeta)
    r2 = ext.reflect_intrinsic(spec, zeta)
    if is_infinite(r1) or is_infinite(r2):
        return 0.0 if (is_infinite(r1) and is_infinite(r2)) else math.inf
    return (r1 - r2).norm() / (1.0 + r1.norm())


def check_reflection_agreement(ctx: VerifyContext) -> CheckRecord:
    rng = ctx.rng
    worst = 0.0
    for _ in range(ctx.count(150)):
        zeta = _random_disk(rng, 0.95)
        if abs(zeta) < 1e-3:
            continue
        worst = max(worst, reflection_agreement_residual(ctx.spec, zeta))
    margin = 1e-8 * ctx.tol_scale - worst
    return CheckRecord("reflection-agreement", "reflection-formula-equivalence",
                       margin, "pass" if margin >= 0 else "fail")


def reflection_diameters(spec: MapSpec, radii, n_angles: int = 32):
    """Max circle-bundle diameter over each circle |ζ| = r."""
    out = []
    for r in radii:
        worst = 0.0
        for j in range(n_angles):
            zeta = r * complex(math.cos(2 * math.pi * j / n_angles),
                               math.sin(2 * math.pi * j / n_angles))
            sj = surface_jet(spec, zeta)
            m = ext.bma_m(spec, 1.0 / zeta.conjugate(), zeta)
            d = math.inf if is_infinite(m) else abs(m) * sj.e_sigma
            worst = max(worst, d)
        out.append(worst)
    return out


def check_reflection_shrink(ctx: VerifyContext) -> CheckRecord:
    bounded = an.critical_point_find(an.UField(ctx.spec)) is not None
    if not bounded:
        return CheckRecord("reflection-shrink", "reflection-boundary-continuity",
                           0.0, "not-guaranteed",
                           "image unbounded; Euclidean shrink not asserted")
    diams = reflection_diameters(ctx.spec, (0.9, 0.95, 0.99, 0.999))
    margin = min(diams[i] - diams[i + 1] for i in range(len(diams) - 1))
    return _hypothesis_record("reflection-shrink", "reflection-boundary-continuity",
                              margin, ctx)


def check_s1_bound(ctx: VerifyContext) -> CheckRecord:
    rep = an.s1_bound_check(ctx.spec, ctx.rho, tol=1e-6 * ctx.tol_scale)
    return _hypothesis_record("s1-bound", "curve-schwarzian-bound",
                              rep.min_margin, ctx)


def s1_invariance_residual(spec: MapSpec, x: float, transforms) -> float:
    """|S₁ of the transported curve − S₁ of the curve|, normalized.

    transforms is a composition chain (applied left to right) of inversions
    and affine space maps; the jets are transported exactly, so the
    residual isolates the invariance of the formula itself.
    """
    jet = an.axis_curve_jet(spec, x)
    base = an.s1_curve(jet)
    for t in transforms:
        jet = (an.curve_jet_invert(jet, t.center) if isinstance(t, Inversion)
               else an.curve_jet_affine(jet, t))
    moved = an.s1_curve(jet)
    return abs(moved - base) / (1.0 + abs(base))


def _similarity_space_moebius(rng) -> SpaceMoebius:
    """Pole-free space Möbius map: planar az+b conjugated into a random frame."""
    a = complex(rng.gauss(0, 1), rng.gauss(0, 1))
    while abs(a) < 0.3:
        a = complex(rng.gauss(0, 1), rng.gauss(0, 1))
    planar = PlanarMoebius(a, complex(rng.gauss(0, 1), rng.gauss(0, 1)), 0.0, 1.0)
    e1 = _random_unit_vector(rng)
    e3 = e1.cross(_random_unit_vector(rng))
    while e3.norm() < 1e-6:
        e3 = e1.cross(_random_unit_vector(rng))
    e3 = e3.scaled(1.0 / e3.norm())
    origin = Point3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1))
    return SpaceMoebius(planar, Frame(origin, e1, e3.cross(e1), e3,
                                      math.exp(rng.uniform(-1, 1))))


def check_s1_invariance(ctx: VerifyContext) -> CheckRecord:
    rng = ctx.rng
    worst = 0.0
    n = ctx.count(10)
    for _ in range(n):
        x = rng.uniform(-0.6, 0.6)
        cur = lift_point(ctx.spec, x)
        chain = []
        for _ in range(rng.randint(1, 3)):
            if rng.random() < 0.5:
                t = _similarity_space_moebius(rng)
            else:
                # keep each inversion center off the transported curve point
                offset = _random_unit_vector(rng).scaled(rng.uniform(0.5, 2.0))
                t = Inversion(cur + offset)
            chain.append(t)
            cur = t.apply(cur)
        worst = max(worst, s1_invariance_residual(ctx.spec, x, chain))
    margin = 1e-7 * ctx.tol_scale - worst
    return CheckRecord("s1-invariance", "curve-schwarzian-moebius-invariance",
                       margin, "pass" if margin >= 0 else "fail")


def duality_on_fiber(spec: MapSpec, rng: random.Random, n: int,
                     tol: float = 1e-6):
    """Critical points of U(I_q∘f̃) for q on image fibers land on the base.

    Returns the worst |found − base| over n sampled inversion centers."""
    worst = 0.0
    for _ in range(n):
        zeta = _random_disk(rng, 0.7)
        t = rng.uniform(-1.5, 1.5)
        p = ext.fiber_point(zeta, t)
        if rng.random() < 0.5:
            p = Point3(p.x1, p.x2, -p.x3)   # lower arc
        q = ext.bma_space(spec, p, zeta)
        found = an.critical_point_find(an.UField(spec, Inversion(q)))
        if found is None:
            return math.inf
        worst = max(worst, abs(found - zeta))
    return worst


def duality_off_fiber(spec: MapSpec, rng: random.Random, n: int):
    """Fibers recovered from critical points pass through the center.

    Centers are generic space points (perturbed fiber points); the check
    measures the distance from each center to the image fiber of the
    recovered critical point, relative to the center's scale."""
    worst = 0.0
    for _ in range(n):
        zeta = _random_disk(rng, 0.7)
        t = rng.uniform(-1.2, 1.2)
        p = ext.fiber_point(zeta, t)
        if rng.random() < 0.5:
            p = Point3(p.x1, p.x2, -p.x3)
        base = ext.bma_space(spec, p, zeta)
        q = base + _random_unit_vector(rng).scaled(0.25 * (1.0 + base.norm()))
        found = an.critical_point_find(an.UField(spec, Inversion(q)))
        if found is None:
            return math.inf
        dist = _distance_to_image_fiber(spec, found, q)
        worst = max(worst, dist / (1.0 + q.norm()))
    return worst


def _distance_to_image_fiber(spec: MapSpec, zeta: complex, q: Point3) -> float:
    samples = ext.fiber_samples(zeta, 512)
    best = math.inf
    best_i = 0
    pts = []
    for i, p in enumerate(samples):
        img = ext.bma_space(spec, p, zeta)
        pts.append(img)
        if not is_infinite(img):
            d = (img - q).norm()
            if d < best:
                best = d
                best_i = i
    if zeta == 0:
        return best
    # golden-section refinement on the circle angle around the best sample
    lo = 2.0 * math.pi * (best_i - 1) / 512
    hi = 2.0 * math.pi * (best_i + 1) / 512
    def f(psi):
        img = ext.bma_space(spec, ext.fiber_circle_point(zeta, psi), zeta)
        return math.inf if is_infinite(img) else (img - q).norm()
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - gr * (b - a)
    d = a + gr * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(60):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = f(d)
    return min(best, fc, fd)


def check_duality(ctx: VerifyContext) -> CheckRecord:
    n = ctx.count(6)
    try:
        worst_on = duality_on_fiber(ctx.spec, ctx.rng, n)
        worst_off = duality_off_fiber(ctx.spec, ctx.rng, n)
    except RuntimeError as exc:
        # out-of-hypothesis maps can defeat the search; for compliant maps a
        # diverging search is itself a failure
        return _hypothesis_record("duality", "inversion-critical-point-duality",
                                  -1.0, ctx, str(exc))
    margin = 1e-6 * ctx.tol_scale - max(worst_on, worst_off)
    return _hypothesis_record("duality", "inversion-critical-point-duality",
                              margin, ctx)


def check_u_grad_pole(ctx: VerifyContext) -> CheckRecord:
    field = an.UField(ctx.spec)
    crit = an.critical_point_find(field)
    if crit is None:
        return CheckRecord("u-grad-pole", "diameter-gradient-reciprocity", 0.0,
                           "pass", "no critical point (unbounded image)")
    val = (1.0 - abs(crit) ** 2) * an.u_grad_norm(field, crit)
    margin = 1e-6 * ctx.tol_scale - val
    return CheckRecord("u-grad-pole", "diameter-gradient-reciprocity", margin,
                       "pass" if margin >= 0 else "fail",
                       f"critical point near {crit:.3g}")


def check_qc_consistency(ctx: VerifyContext) -> CheckRecord:
    rhos = [0.1 * k for k in range(1, 10)]
    if ctx.compliant and ctx.rho > 0.0:
        rhos.append(ctx.rho)
    worst = 0.0
    for rho in rhos:
        qc = an.qc_constants(rho)
        eps = qc.epsilon
        lhs = 1.0 - (1.0 - eps) ** 2
        rhs = rho * (1.0 + 2.0 * eps * eps) / (rho + 2.0 * eps * eps)
        worst = max(worst, abs(lhs - rhs))
    margin = 1e-10 * ctx.tol_scale - worst
    return CheckRecord("qc-consistency", "epsilon-solver-identity", margin,
                       "pass" if margin >= 0 else "fail")


def sample_space_points(rng: random.Random, n: int, planar_max: float = 2.0,
                        log_height_range=(-3.0, 3.0)):
    pts = []
    for _ in range(n):
        ang = rng.uniform(0.0, 2.0 * math.pi)
        s = planar_max * math.sqrt(rng.random())
        height = 10.0 ** rng.uniform(*log_height_range)
        if rng.random() < 0.5:
            height = -height
        pts.append(Point3(s * math.cos(ang), s * math.sin(ang), height))
    return pts


def extension_dilatation_sweep(spec: MapSpec, rng: random.Random, n: int):
    """(max ratio, mean ratio, excluded count) of the space extension."""
    fn = lambda p: ext.extend(spec, p)
    worst = 1.0
    total = 0.0
    kept = 0
    excluded = 0
    for p in sample_space_points(rng, n):
        sample = an.measured_dilatation(fn, p)
        if sample.ill_conditioned:
            excluded += 1
            continue
        kept += 1
        total += sample.ratio
        worst = max(worst, sample.ratio)
    mean = total / kept if kept else math.nan
    return worst, mean, excluded


def check_dilatation_extension(ctx: VerifyContext) -> CheckRecord:
    if not ctx.compliant:
        return CheckRecord("dilatation-extension", "extension-dilatation-bound",
                           0.0, "not-guaranteed", "rho >= 1: bound not claimed")
    k = (an.qc_constants(ctx.rho, analytic=True).k if ctx.spec.is_analytic
         else an.qc_constants(ctx.rho).k)
    worst, _, excluded = extension_dilatation_sweep(ctx.spec, ctx.rng,
                                                    ctx.count(150))
    margin = k + 0.05 * ctx.tol_scale - worst
    note = f"bound {k:.4g}, excluded {excluded}"
    return _hypothesis_record("dilatation-extension", "extension-dilatation-bound",
                              margin, ctx, note)


def reflection_dilatation_sweep(spec: MapSpec, rng: random.Random, n: int):
    worst = 1.0
    excluded = 0
    for _ in range(n):
        zeta = _random_disk(rng, 0.9)
        if abs(zeta) < 0.02:
            continue
        ratio = an.measured_reflection_dilatation(spec, zeta)
        if not math.isfinite(ratio):
            excluded += 1
            continue
        worst = max(worst, ratio)
    return worst, excluded


def check_dilatation_reflection(ctx: VerifyContext) -> CheckRecord:
    if not ctx.compliant:
        return CheckRecord("dilatation-reflection", "reflection-dilatation-bound",
                           0.0, "not-guaranteed", "rho >= 1: bound not claimed")
    bound = an.reflection_constant(ctx.rho)
    worst, excluded = reflection_dilatation_sweep(ctx.spec, ctx.rng, ctx.count(100))
    margin = bound + 0.05 * ctx.tol_scale - worst
    note = f"bound {bound:.4g}, excluded {excluded}"
    return _hypothesis_record("dilatation-reflection", "reflection-dilatation-bound",
                              margin, ctx, note)


def check_omega_bound(ctx: VerifyContext) -> CheckRecord:
    rho = min(ctx.rho, 1.0 - 1e-12)
    rep = an.omega_bound_check(ctx.spec, rho, ctx.grid)
    margin = rep.threshold - rep.sup_sqrt_omega
    status = "pass" if margin > 0 else "not-guaranteed"
    note = "" if margin > 0 else "planar-extension hypothesis on omega fails"
    return CheckRecord("omega-bound", "dilatation-root-threshold", margin,
                       status, note)


def check_condition_invariance(ctx: VerifyContext) -> CheckRecord:
    rng = ctx.rng
    worst = 0.0
    for _ in range(ctx.count(8)):
        M = PlanarMoebius.disk_automorphism(_random_disk(rng, 0.6), _random_unit(rng))
        composed = compose_with_automorphism(ctx.spec, M)
        for _ in range(5):
            z = _random_disk(rng, 0.8)
            n1 = condition_value(composed, z).n_value
            n2 = condition_value(ctx.spec, M(z)).n_value
            worst = max(worst, abs(n1 - n2) / (1.0 + abs(n2)))
    margin = 1e-8 * ctx.tol_scale - worst
    return CheckRecord("condition-invariance", "criterion-moebius-invariance",
                       margin, "pass" if margin >= 0 else "fail")


def check_u_invariance(ctx: VerifyContext) -> CheckRecord:
    rng = ctx.rng
    worst = 0.0
    base = an.UField(ctx.spec)
    for _ in range(ctx.count(8)):
        M = PlanarMoebius.disk_automorphism(_random_disk(rng, 0.6), _random_unit(rng))
        composed = an.UField(compose_with_automorphism(ctx.spec, M))
        for _ in range(5):
            z = _random_disk(rng, 0.8)
            u1 = composed.value(z)
            u2 = base.value(M(z))
            worst = max(worst, abs(u1 - u2) / (1.0 + abs(u2)))
    margin = 1e-9 * ctx.tol_scale - worst
    return CheckRecord("u-invariance", "u-reparametrization-invariance", margin,
                       "pass" if margin >= 0 else "fail")


def _hypothesis_record(name: str, anchor: str, margin: float,
                       ctx: VerifyContext, note: str = "") -> CheckRecord:
    if not ctx.compliant:
        extra = "out of hypothesis (rho >= 1): reported, not asserted"
        note = f"{note}; {extra}" if note else extra
        return CheckRecord(name, anchor, margin, "not-guaranteed", note)
    return CheckRecord(name, anchor, margin, "pass" if margin >= 0 else "fail", note)


CHECK_REGISTRY = [
    ("condition-rho", check_condition_rho),
    ("curvature-sign", check_curvature_sign),
    ("gradient-bound", check_gradient_bound),
    ("convexity", check_convexity),
    ("contact-order", check_contact_order),
    ("frozen-basepoint", check_frozen_basepoint),
    ("frozen-conformal-factor", check_frozen_factor),
    ("velocity-components", check_velocity_components),
    ("bundle-disjointness", check_bundle_disjoint),
    ("reflection-agreement", check_reflection_agreement),
    ("reflection-shrink", check_reflection_shrink),
    ("s1-bound", check_s1_bound),
    ("s1-invariance", check_s1_invariance),
    ("duality", check_duality),
    ("u-grad-pole", check_u_grad_pole),
    ("qc-consistency", check_qc_consistency),
    ("dilatation-extension", check_dilatation_extension),
    ("dilatation-reflection", check_dilatation_reflection),
    ("omega-bound", check_omega_bound),
    ("condition-invariance", check_condition_invariance),
    ("u-invariance", check_u_invariance),
]

REGISTERED_CHECK_NAMES = [name for name, _ in CHECK_REGISTRY]


@dataclass
class VerificationReport:
    map_name: str
    map_params: dict
    rho_estimate: float
    condition_violated: bool
    grid: GridSpec
    seed: int
    checks: list = field(default_factory=list)
    timing_seconds: float | None = None

    @property
    def failed(self) -> bool:
        return any(c.status == "fail" for c in self.checks)

    def to_json(self):
        out = {
            "schema_version": SCHEMA_VERSION,
            "map": {"name": self.map_name, "params": self.map_params},
            "rho_estimate": self.rho_estimate,
            "condition_violated": self.condition_violated,
            "grid": {"n_radii": self.grid.n_radii, "n_angles": self.grid.n_angles,
                     "r_max": self.grid.r_max},
            "seed": self.seed,
            "checks": [c.to_json() for c in self.checks],
        }
        if self.timing_seconds is not None:
            out["timing_seconds"] = self.timing_seconds
        return out


def run_verification(spec: MapSpec, grid: GridSpec | None = None, seed: int = 0,
                     scale: float = 1.0, tol_scale: float = 1.0) -> VerificationReport:
    """Run every registered check once and assemble the report."""
    grid = grid or GridSpec()
    rho = estimate_rho(spec, grid)
    ctx = VerifyContext(spec, rho, grid, random.Random(seed), scale, tol_scale)
    report = VerificationReport(spec.name, spec.params, rho, rho >= 1.0,
                                grid, seed)
    for _, runner in CHECK_REGISTRY:
        report.checks.append(runner(ctx))
    return report
