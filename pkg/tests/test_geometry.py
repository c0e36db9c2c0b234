import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qclift.geometry import (INFINITY, Frame, Inversion, PlanarMoebius,
                             Point3, SpaceMoebius, hyperbolic_distance,
                             invert_about, is_infinite, poincare_extend,
                             poincare_factor, sphere_inversion_j)

finite = st.floats(-3.0, 3.0, allow_nan=False)


def test_moebius_identity():
    M = PlanarMoebius.identity()
    assert M(1j) == 1j


def test_moebius_inverse_map():
    M = PlanarMoebius(0, 1, 1, 0)   # 1/z
    assert abs(M(2.0 + 0j) - 0.5) < 1e-15
    assert is_infinite(M(0j))
    assert M(INFINITY) == 0.0


def test_moebius_degenerate_rejected():
    with pytest.raises(ValueError):
        PlanarMoebius(1, 2, 2, 4)
    with pytest.raises(ValueError):
        PlanarMoebius(0, 0, 0, 0)


def test_moebius_compose_and_inverse():
    M = PlanarMoebius(2, 1j, 0.5, 1)
    N = M.compose(M.inverse())
    for z in (0.3 + 0.4j, -1.2j, 2.0 + 0j):
        assert abs(N(z) - z) < 1e-12


def test_poincare_translation():
    M = PlanarMoebius(1, 1 + 2j, 0, 1)
    p = poincare_extend(M, Point3(0, 0, 1))
    assert abs(p.x1 - 1) < 1e-15 and abs(p.x2 - 2) < 1e-15 and abs(p.x3 - 1) < 1e-15


def test_poincare_inversion_fixes_apex():
    # 1/z = (unit-sphere inversion) ∘ (conjugation); (0,0,1) is fixed
    M = PlanarMoebius(0, 1, 1, 0)
    p = poincare_extend(M, Point3(0, 0, 1))
    assert (p - Point3(0, 0, 1)).norm() < 1e-14


def test_poincare_inversion_decomposition_oracle():
    # extension of 1/z equals J followed by mirroring x2
    M = PlanarMoebius(0, 1, 1, 0)
    rng = np.random.default_rng(5)
    for _ in range(25):
        p = Point3(*rng.uniform(-2, 2, 2), rng.uniform(0.1, 2.0))
        expected = sphere_inversion_j(p)
        expected = Point3(expected.x1, -expected.x2, expected.x3)
        got = poincare_extend(M, p)
        assert (got - expected).norm() < 1e-13


def test_poincare_dilation_scales_heights():
    M = PlanarMoebius(2, 0, 0, 1)
    p = poincare_extend(M, Point3(1, 0, 1))
    assert (p - Point3(2, 0, 2)).norm() < 1e-14


@settings(max_examples=30, deadline=None)
@given(finite, finite, finite, finite,
       st.floats(0.05, 2.0), st.floats(0.05, 2.0), finite, finite)
def test_poincare_is_hyperbolic_isometry(a_re, a_im, b_re, b_im, h1, h2, x, y):
    try:
        M = PlanarMoebius(complex(a_re, a_im) + 1.5, complex(b_re, b_im),
                          0.4 - 0.2j, 1.0)
    except ValueError:
        return
    p = Point3(x, y, h1)
    q = Point3(y - 0.3, x + 0.2, h2)
    P, Q = poincare_extend(M, p), poincare_extend(M, q)
    if is_infinite(P) or is_infinite(Q):
        return
    d0 = hyperbolic_distance(p, q)
    d1 = hyperbolic_distance(P, Q)
    assert abs(d0 - d1) <= 1e-9 * (1 + d0)


def test_poincare_restricts_to_moebius():
    M = PlanarMoebius(1.2, -0.5j, 0.3, 0.9)
    for z in (0.2 + 0.1j, -0.7 + 0.4j, 1.5 - 0.2j):
        p = poincare_extend(M, Point3(z.real, z.imag, 0.0))
        assert abs(p.plane() - M(z)) < 1e-12
        assert abs(p.x3) < 1e-15


def test_poincare_mirror_rule():
    M = PlanarMoebius(1.1, 0.2, -0.3j, 1.0)
    up = poincare_extend(M, Point3(0.4, -0.2, 0.7))
    down = poincare_extend(M, Point3(0.4, -0.2, -0.7))
    assert abs(up.x1 - down.x1) < 1e-14
    assert abs(up.x2 - down.x2) < 1e-14
    assert abs(up.x3 + down.x3) < 1e-14


def test_invert_about_examples():
    assert (invert_about(Point3(0, 0, 0), Point3(2, 0, 0))
            - Point3(0.5, 0, 0)).norm() < 1e-15
    on_sphere = Point3(0.6, 0.8, 0.0)
    assert (invert_about(Point3(0, 0, 0), on_sphere) - on_sphere).norm() < 1e-15
    assert is_infinite(invert_about(Point3(1, 2, 3), Point3(1, 2, 3)))


def test_inversion_operator_norm_fd():
    # ‖DI_q(p)‖ = 1/‖p−q‖²: finite-difference Jacobian at q=0, p=(2,0,0)
    q = Point3(0, 0, 0)
    p = Point3(2, 0, 0)
    h = 1e-5
    cols = []
    for e in (Point3(h, 0, 0), Point3(0, h, 0), Point3(0, 0, h)):
        cols.append([(a - b) / (2 * h) for a, b in
                     zip(invert_about(q, p + e).as_tuple(),
                         invert_about(q, p - e).as_tuple())])
    sv = np.linalg.svd(np.array(cols).T, compute_uv=False)
    assert abs(sv[0] - 0.25) < 1e-6


@settings(max_examples=30, deadline=None)
@given(finite, finite, st.floats(0.2, 3.0), finite, finite, finite)
def test_inversions_are_involutions(qx, qy, qz, px, py, pz):
    # I_q(p) = (p−q)/‖p−q‖² is unit inversion at q followed by a translation,
    # so self-composition is the identity exactly when q = 0; the centered
    # variant q + I_q(p) is the honest involution for every center.
    q = Point3(qx, qy, qz)
    p = Point3(px + 3.5, py, pz)   # keep p away from q
    centered = q + invert_about(q, p)
    assert (q + invert_about(q, centered) - p).norm() < 1e-12 * (1 + p.norm())
    p2 = Point3(px + 3.5, py, pz + 4.0)
    assert (sphere_inversion_j(sphere_inversion_j(p2)) - p2).norm() < 1e-12 * (1 + p2.norm())


def test_offcenter_inversion_is_not_an_involution():
    q = Point3(0, 0, 1)
    p = Point3(3.5, 0, 0)
    assert (invert_about(q, invert_about(q, p)) - p).norm() > 1.0


def test_sphere_inversion_examples():
    assert (sphere_inversion_j(Point3(0, 0, 2)) - Point3(0, 0, 0.5)).norm() < 1e-15
    unit = Point3(1 / math.sqrt(3), 1 / math.sqrt(3), 1 / math.sqrt(3))
    assert (sphere_inversion_j(unit) - unit).norm() < 1e-15


def _tilted_frame(scale=1.5):
    e1 = Point3(1, 1, 0).scaled(1 / math.sqrt(2))
    e2 = Point3(-1, 1, 1).scaled(1 / math.sqrt(3))
    e3 = e1.cross(e2)
    return Frame(Point3(0.3, -0.2, 0.9), e1, e2, e3, scale)


def test_frame_validation():
    with pytest.raises(ValueError):
        Frame(Point3(0, 0, 0), Point3(1, 0, 0), Point3(1, 0, 0),
              Point3(0, 0, 1), 1.0)
    with pytest.raises(ValueError):
        Frame(Point3(0, 0, 0), Point3(1, 0, 0), Point3(0, 1, 0),
              Point3(0, 0, -1), 1.0)   # left-handed
    with pytest.raises(ValueError):
        Frame(Point3(0, 0, 0), Point3(2, 0, 0), Point3(0, 1, 0),
              Point3(0, 0, 1), 1.0)    # not unit
    with pytest.raises(ValueError):
        _tilted_frame(scale=-2.0)


def test_space_moebius_identity():
    T = SpaceMoebius(PlanarMoebius.identity(), Frame.standard())
    p = Point3(0.3, -0.4, 1.2)
    assert (T.apply(p) - p).norm() < 1e-15


def test_space_moebius_heights_scale_with_frame():
    T = SpaceMoebius(PlanarMoebius.identity(), _tilted_frame(scale=2.5))
    p = Point3(0.1, 0.2, 0.8)
    img = T.apply(p)
    height = T.frame.height_above_plane(img)
    assert abs(height - 2.5 * 0.8) < 1e-12


def test_space_moebius_restriction_matches_planar():
    M = PlanarMoebius(1.0, 0.3j, -0.2, 1.1)
    T = SpaceMoebius(M, _tilted_frame())
    for z in (0.2 + 0.1j, -0.4 - 0.3j):
        img = T.apply(Point3(z.real, z.imag, 0.0))
        expected = T.frame.plane_to_world(M(z))
        assert (img - expected).norm() < 1e-12


def test_space_moebius_conformal():
    M = PlanarMoebius(1.0, 0.3j, -0.2, 1.1)
    T = SpaceMoebius(M, _tilted_frame())
    rng = np.random.default_rng(2)
    for _ in range(10):
        p = Point3(*rng.uniform(-0.8, 0.8, 2), rng.uniform(0.2, 1.5))
        h = 1e-6
        cols = []
        for e in (Point3(h, 0, 0), Point3(0, h, 0), Point3(0, 0, h)):
            plus, minus = T.apply(p + e), T.apply(p - e)
            cols.append([(a - b) / (2 * h) for a, b in
                         zip(plus.as_tuple(), minus.as_tuple())])
        sv = np.linalg.svd(np.array(cols).T, compute_uv=False)
        assert sv[0] / sv[-1] < 1 + 1e-5


def test_space_moebius_conformal_factor_matches_heights():
    M = PlanarMoebius(1.0, 0.3j, -0.2, 1.1)
    T = SpaceMoebius(M, _tilted_frame())
    p = Point3(0.2, -0.1, 0.6)
    img = T.apply(p)
    factor = T.conformal_factor(p)
    # conformal maps of half-spaces scale heights by the local factor
    assert abs(T.frame.height_above_plane(img) - factor * p.x3) < 1e-12


def test_inversion_transform_protocol():
    inv = Inversion(Point3(0, 0, 2))
    p = Point3(0.5, 0, 0)
    expected = invert_about(Point3(0, 0, 2), p)
    assert (inv.apply(p) - expected).norm() == 0.0
    assert abs(inv.conformal_factor(p) - 1.0 / (p - Point3(0, 0, 2)).norm2()) < 1e-15


def test_point3_rejects_nan():
    with pytest.raises(ValueError):
        Point3(float("nan"), 0.0, 0.0)


def test_poincare_factor_on_plane():
    M = PlanarMoebius(0, 1, 1, 0)
    z = 2.0 + 0j
    # |d(1/z)/dz| = 1/|z|²
    assert abs(poincare_factor(M, Point3(z.real, z.imag, 0.0)) - 0.25) < 1e-14


def test_inversion_of_infinity():
    from qclift.geometry import INFINITY, ORIGIN
    q = Point3(1.0, -2.0, 0.5)
    assert invert_about(q, INFINITY) == ORIGIN
    assert sphere_inversion_j(INFINITY) == ORIGIN
    assert is_infinite(invert_about(q, q))
