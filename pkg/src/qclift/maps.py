"""Harmonic map data and the analytic layer built on it.

A harmonic map of the disk is f = h + conj(g) with h, g analytic; we take
its Weierstrass data as input: h' and the analytic square root q of the
dilatation (omega = g'/h' = q²).  Everything downstream is computed from
order-3 jets of h' and q:

  e^sigma    = |h'| (1 + |q|²)                (conformal factor of the lift)
  sigma_z    = h''/(2h') + q̄ q'/(1+|q|²)
  sigma_zz   = h'''/(2h') − h''²/(2h'²) + q̄ q''/(1+|q|²) − q̄² q'²/(1+|q|²)²
  sigma_zz̄  = |q'|²/(1+|q|²)²
  S = 2(sigma_zz − sigma_z²)                  (Schwarzian of the lift)
  K = −4 sigma_zz̄ e^{−2 sigma}               (Gaussian curvature, ≤ 0)

The normalized criterion value is n(z) = (1−|z|²)²(|S| + e^{2σ}|K|)/2;
rho is its supremum over the disk, estimated on a boundary-clustered
polar grid.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .jets import (Jet, jet_eval_series, series_integrate, series_multiply,
                   series_value)
from .geometry import PlanarMoebius

DEGENERATE_HPRIME_TOL = 1e-14


class DegenerateMapError(ValueError):
    """Raised where |h'| vanishes and the conformal frame degenerates."""


class QuadratureError(RuntimeError):
    """Raised when the path quadrature fails to meet tolerance."""


# ---------------------------------------------------------------------------
# components: h' and q as jet evaluators


class SeriesComponent:
    """Truncated power series component."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = [complex(c) for c in coeffs]
        if not coeffs:
            raise ValueError("series component needs at least one coefficient")
        self.coeffs = coeffs

    def jet(self, z) -> Jet:
        return jet_eval_series(self.coeffs, z)

    def value(self, z) -> complex:
        return series_value(self.coeffs, z)

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)


class FuncComponent:
    """Component given by closed-form jet and value evaluators."""

    __slots__ = ("jet_fn", "value_fn", "is_zero")

    def __init__(self, jet_fn, value_fn=None):
        self.jet_fn = jet_fn
        self.value_fn = value_fn if value_fn is not None else (lambda z: jet_fn(z).f)
        self.is_zero = False

    def jet(self, z) -> Jet:
        return self.jet_fn(z)

    def value(self, z) -> complex:
        return self.value_fn(z)


ZERO_COMPONENT = SeriesComponent([0.0])
ONE_COMPONENT = SeriesComponent([1.0])


# ---------------------------------------------------------------------------
# quadrature for h, g, ∫h'q along the radial segment

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_GL_NODES = [(x + 1.0) / 2.0 for x in _GL_NODES.tolist()]     # on [0, 1]
_GL_WEIGHTS = [w / 2.0 for w in _GL_WEIGHTS.tolist()]

_MAX_PANELS = 512
_QUAD_RTOL = 1e-12


def _segment_integrals(spec, z, panels):
    """Composite GL values of (∫h', ∫h'q, ∫h'q²) along [0, z]."""
    h = ihq = g = 0j
    hv_fn = spec.h_prime.value
    qv_fn = spec.q.value
    width = 1.0 / panels
    for k in range(panels):
        left = k * width
        for x, w in zip(_GL_NODES, _GL_WEIGHTS):
            u = left + x * width
            zeta = z * u
            hv = hv_fn(zeta)
            qv = qv_fn(zeta)
            cw = w * width
            h += cw * hv
            ihq += cw * hv * qv
            g += cw * hv * qv * qv
    return h * z, ihq * z, g * z


def _quadrature_primitives(spec, z):
    prev = _segment_integrals(spec, z, 1)
    panels = 2
    while panels <= _MAX_PANELS:
        cur = _segment_integrals(spec, z, panels)
        ok = all(abs(c - p) <= _QUAD_RTOL * (1.0 + abs(c))
                 for c, p in zip(cur, prev))
        if ok:
            return cur
        prev = cur
        panels *= 2
    raise QuadratureError(f"path quadrature did not converge at z={z!r}")


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Polar sample grid with radii clustered toward the boundary.

    Radii are r_i = 1 − (1−r_max)^(i/n_radii), i = 1..n_radii, so spacing
    tightens where condition margins degenerate; the center point is
    included as an extra sample by default.
    """

    n_radii: int = 64
    n_angles: int = 256
    r_max: float = 0.999
    include_center: bool = True

    def __post_init__(self):
        if self.n_radii < 1 or self.n_angles < 1:
            raise ValueError("grid counts must be >= 1")
        if not 0.0 < self.r_max < 1.0:
            raise ValueError("r_max must lie in (0, 1)")

    def radii(self):
        base = 1.0 - self.r_max
        return [1.0 - base ** (i / self.n_radii) for i in range(1, self.n_radii + 1)]

    def angles(self):
        return [2.0 * math.pi * j / self.n_angles for j in range(self.n_angles)]

    def points(self):
        if self.include_center:
            yield 0j
        for r in self.radii():
            for t in self.angles():
                yield complex(r * math.cos(t), r * math.sin(t))

    def size(self) -> int:
        return self.n_radii * self.n_angles + (1 if self.include_center else 0)


class MapSpec:
    """Weierstrass data (h', q) defining a harmonic map and its lift.

    The normalization h(0) = g(0) = 0 is implied.  Closed-form primitives
    h, g, ∫h'q may be supplied; pure-series data is integrated exactly;
    anything else falls back to adaptive Gauss-Legendre quadrature along
    the radial segment.
    """

    def __init__(self, h_prime, q, name="custom", params=None,
                 h_value=None, g_value=None, ihq_value=None):
        self.h_prime = h_prime
        self.q = q
        self.name = name
        self.params = dict(params or {})
        self._h_value = h_value
        self._g_value = g_value
        self._ihq_value = ihq_value
        if isinstance(h_prime, SeriesComponent):
            hc = h_prime.coeffs
            self._h_series = series_integrate(hc)
            if isinstance(q, SeriesComponent):
                qc = q.coeffs
                self._ihq_series = series_integrate(series_multiply(hc, qc))
                self._g_series = series_integrate(
                    series_multiply(hc, series_multiply(qc, qc)))
            else:
                self._ihq_series = None
                self._g_series = None
        else:
            self._h_series = None
            self._ihq_series = None
            self._g_series = None
        self._surface_cache = {}
        self._primitive_cache = {}

    def __repr__(self):
        ps = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"MapSpec({self.name}{', ' + ps if ps else ''})"

    @property
    def is_analytic(self) -> bool:
        return isinstance(self.q, SeriesComponent) and self.q.is_zero

    def hprime_jet(self, z) -> Jet:
        return self.h_prime.jet(z)

    def q_jet(self, z) -> Jet:
        return self.q.jet(z)

    def primitives(self, z):
        """(h(z), g(z), ∫₀ᶻ h'q dζ), each by its best available route."""
        key = (round(z.real, 15), round(z.imag, 15))
        hit = self._primitive_cache.get(key)
        if hit is not None:
            return hit
        h = g = ihq = None
        if self._h_value is not None:
            h = self._h_value(z)
        elif self._h_series is not None:
            h = series_value(self._h_series, z)
        if self._g_value is not None:
            g = self._g_value(z)
        elif self._g_series is not None:
            g = series_value(self._g_series, z)
        if self._ihq_value is not None:
            ihq = self._ihq_value(z)
        elif self._ihq_series is not None:
            ihq = series_value(self._ihq_series, z)
        if h is None or g is None or ihq is None:
            qh, qihq, qg = _quadrature_primitives(self, z)
            h = qh if h is None else h
            g = qg if g is None else g
            ihq = qihq if ihq is None else ihq
        out = (h, g, ihq)
        if len(self._primitive_cache) > 300000:
            self._primitive_cache.clear()
        self._primitive_cache[key] = out
        return out

    def f_value(self, z) -> complex:
        """The planar harmonic map f = h + conj(g)."""
        h, g, _ = self.primitives(z)
        return h + g.conjugate()


@dataclass(frozen=True)
class SigmaJet:
    """Conformal factor e^sigma with the sigma derivatives used everywhere."""

    e_sigma: float
    sigma_z: complex
    sigma_zz: complex
    sigma_zzbar: float

    @property
    def sigma_zbar(self) -> complex:
        return self.sigma_z.conjugate()


def sigma_jet_from_jets(hp: Jet, qj: Jet) -> SigmaJet:
    habs = abs(hp.f)
    if habs <= DEGENERATE_HPRIME_TOL:
        raise DegenerateMapError("h'(z) vanishes: conformal frame degenerates")
    qv = qj.f
    q2 = 1.0 + (qv.real * qv.real + qv.imag * qv.imag)
    qb = qv.conjugate()
    e_sigma = habs * q2
    hh = hp.d1 / hp.f
    sigma_z = 0.5 * hh + qb * qj.d1 / q2
    sigma_zz = (0.5 * hp.d2 / hp.f - 0.5 * hh * hh
                + qb * qj.d2 / q2 - (qb * qj.d1 / q2) ** 2)
    sigma_zzbar = abs(qj.d1) ** 2 / (q2 * q2)
    return SigmaJet(e_sigma, sigma_z, sigma_zz, sigma_zzbar)


def sigma_jet(spec: MapSpec, z) -> SigmaJet:
    """sigma and its derivatives at z, via exact jets of h' and q."""
    return sigma_jet_from_jets(spec.hprime_jet(z), spec.q_jet(z))


def schwarzian(spec: MapSpec, z) -> complex:
    """Schwarzian of the lift: 2(sigma_zz − sigma_z²)."""
    s = sigma_jet(spec, z)
    return 2.0 * (s.sigma_zz - s.sigma_z * s.sigma_z)


def curvature(spec: MapSpec, z) -> float:
    """Gaussian curvature of the image surface at f̃(z); always ≤ 0."""
    s = sigma_jet(spec, z)
    return -4.0 * s.sigma_zzbar / (s.e_sigma * s.e_sigma)


def dilatation_omega(spec: MapSpec, z) -> complex:
    """Second dilatation omega = g'/h' = q²."""
    qv = spec.q.value(z)
    return qv * qv


@dataclass(frozen=True)
class ConditionSample:
    """Normalized criterion value at one point."""

    z: complex
    schwarzian: complex
    curvature_term: float   # e^{2 sigma} |K| = 4 sigma_zz̄
    n_value: float


def condition_value(spec: MapSpec, z) -> ConditionSample:
    s = sigma_jet(spec, z)
    sch = 2.0 * (s.sigma_zz - s.sigma_z * s.sigma_z)
    curv = 4.0 * s.sigma_zzbar
    w = 1.0 - abs(z) ** 2
    n = 0.5 * w * w * (abs(sch) + curv)
    return ConditionSample(complex(z), sch, curv, n)


def estimate_rho(spec: MapSpec, grid: GridSpec | None = None) -> float:
    """Max of the normalized criterion value over the grid."""
    grid = grid or GridSpec()
    best = 0.0
    for z in grid.points():
        n = condition_value(spec, z).n_value
        if n > best:
            best = n
    return best


def compose_with_automorphism(spec: MapSpec, M: PlanarMoebius) -> MapSpec:
    """Weierstrass data of f ∘ M: h'_new = (h'∘M)·M', q_new = q∘M.

    Composition is done with jets (exact to order 3); M' is carried to
    order 3 itself, i.e. through M'''', via the closed-form derivative jet.
    """

    def hp_jet(z):
        mj = M.jet(z)
        outer = spec.hprime_jet(mj.f)
        return outer.compose(mj) * M.deriv_jet(z)

    def hp_value(z):
        return spec.h_prime.value(M(z)) * M.deriv(z)

    def q_jet(z):
        mj = M.jet(z)
        return spec.q_jet(mj.f).compose(mj)

    def q_value(z):
        return spec.q.value(M(z))

    h_value = None
    if spec._h_value is not None or spec._h_series is not None:
        def h_value(z, _spec=spec, _M=M):
            h0, _, _ = _spec.primitives(_M(0j))
            hz, _, _ = _spec.primitives(_M(z))
            return hz - h0
    return MapSpec(FuncComponent(hp_jet, hp_value), FuncComponent(q_jet, q_value),
                   name=f"{spec.name}∘M", params=spec.params, h_value=h_value)


# ---------------------------------------------------------------------------
# builtin catalog


def _power_pieces(alpha):
    """Jet and value evaluators for h' of z ↦ ((1+z)/(1−z))^alpha."""

    def hp_jet(z):
        J = Jet.variable(z)
        w = (1.0 + J) / (1.0 - J)
        return (2.0 * alpha) * w.pow(alpha) * (1.0 - J * J).reciprocal()

    def hp_value(z):
        return 2.0 * alpha * ((1.0 + z) / (1.0 - z)) ** alpha / (1.0 - z * z)

    def h_value(z):
        return ((1.0 + z) / (1.0 - z)) ** alpha - 1.0

    return hp_jet, hp_value, h_value


def _builtin_identity(**_):
    return MapSpec(ONE_COMPONENT, ZERO_COMPONENT, name="identity",
                   h_value=lambda z: complex(z), g_value=lambda z: 0j,
                   ihq_value=lambda z: 0j)


def _builtin_alpha_power(alpha=0.5):
    alpha = float(alpha)
    hp_jet, hp_value, h_value = _power_pieces(alpha)
    return MapSpec(FuncComponent(hp_jet, hp_value), ZERO_COMPONENT,
                   name="alpha_power", params={"alpha": alpha},
                   h_value=h_value, g_value=lambda z: 0j, ihq_value=lambda z: 0j)


def _builtin_shear(alpha=0.25):
    alpha = float(alpha)
    if not 0.0 <= alpha < 1.0:
        raise ValueError("shear needs 0 <= alpha < 1 for |omega| < 1")
    root = math.sqrt(alpha)
    return MapSpec(ONE_COMPONENT, SeriesComponent([root]),
                   name="shear", params={"alpha": alpha},
                   h_value=lambda z: complex(z),
                   g_value=lambda z: alpha * complex(z),
                   ihq_value=lambda z: root * complex(z))


def _builtin_koebe(**_):
    def hp_jet(z):
        J = Jet.variable(z)
        den = 1.0 - J
        return (1.0 + J) * (den * den * den).reciprocal()

    def hp_value(z):
        return (1.0 + z) / (1.0 - z) ** 3

    return MapSpec(FuncComponent(hp_jet, hp_value), ZERO_COMPONENT,
                   name="koebe",
                   h_value=lambda z: z / (1.0 - z) ** 2,
                   g_value=lambda z: 0j, ihq_value=lambda z: 0j)


_SQRT2 = math.sqrt(2.0)


def _builtin_n0_extremal(**_):
    """The boundary-case analytic map n0 with Schwarzian −2/(1−z²)²."""

    def hp_jet(z):
        J = Jet.variable(z)
        W = ((1.0 + J) / (1.0 - J)).pow(_SQRT2)
        W1 = W + 1.0
        return 4.0 * W * ((1.0 - J * J) * (W1 * W1)).reciprocal()

    def hp_value(z):
        W = ((1.0 + z) / (1.0 - z)) ** _SQRT2
        return 4.0 * W / ((1.0 - z * z) * (W + 1.0) ** 2)

    def h_value(z):
        W = ((1.0 + z) / (1.0 - z)) ** _SQRT2
        return (W - 1.0) / ((W + 1.0) * _SQRT2)

    return MapSpec(FuncComponent(hp_jet, hp_value), ZERO_COMPONENT,
                   name="n0_extremal",
                   h_value=h_value, g_value=lambda z: 0j, ihq_value=lambda z: 0j)


BUILTINS = {
    "identity": _builtin_identity,
    "alpha_power": _builtin_alpha_power,
    "shear": _builtin_shear,
    "koebe": _builtin_koebe,
    "n0_extremal": _builtin_n0_extremal,
}


def builtin(name: str, **params) -> MapSpec:
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown builtin map {name!r}; "
                         f"choices: {sorted(BUILTINS)}") from None
    return factory(**params)


# ---------------------------------------------------------------------------
# map-spec file schema


def _component_from_config(cfg: dict, slot: str):
    kind = cfg.get("type")
    if kind == "series":
        coeffs = [complex(float(re), float(im)) for re, im in cfg["coeffs"]]
        return SeriesComponent(coeffs)
    if kind == "builtin":
        base = builtin(cfg["name"], **cfg.get("params", {}))
        return base.h_prime if slot == "h_prime" else base.q
    raise ValueError(f"component {slot}: unknown type {kind!r}")


def spec_from_config(cfg: dict) -> MapSpec:
    """Build a MapSpec from the JSON map-spec structure.

    Either {"builtin": name, "params": {...}} or component slots
    {"h_prime": {...}, "q": {...}} where each slot is
    {"type": "series", "coeffs": [[re, im], ...]} or
    {"type": "builtin", "name": ..., "params": {...}} meaning that
    builtin's h' (resp. q).
    """
    if "builtin" in cfg:
        return builtin(cfg["builtin"], **cfg.get("params", {}))
    if "h_prime" not in cfg or "q" not in cfg:
        raise ValueError("map spec needs 'builtin' or both 'h_prime' and 'q'")
    hp = _component_from_config(cfg["h_prime"], "h_prime")
    q = _component_from_config(cfg["q"], "q")
    name = cfg.get("name", "custom")
    return MapSpec(hp, q, name=name)


def load_map_spec(path) -> MapSpec:
    with open(path, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    return spec_from_config(cfg)


def parse_builtin_token(token: str) -> MapSpec:
    """Parse 'name' or 'name:key=val,key=val' into a builtin MapSpec."""
    name, _, rest = token.partition(":")
    params = {}
    if rest:
        for piece in rest.split(","):
            key, _, val = piece.partition("=")
            if not key or not val:
                raise ValueError(f"bad builtin parameter {piece!r}")
            params[key.strip()] = float(val)
    return builtin(name.strip(), **params)


def power_with_linear_q(alpha: float, c: float) -> MapSpec:
    """alpha_power h' paired with q(z) = c z, via the component schema."""
    return spec_from_config({
        "name": f"alpha_power:{alpha}+linq:{c}",
        "h_prime": {"type": "builtin", "name": "alpha_power",
                    "params": {"alpha": alpha}},
        "q": {"type": "series", "coeffs": [[0.0, 0.0], [c, 0.0]]},
    })
