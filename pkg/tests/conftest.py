"""Shared finite-difference oracles for the test suite.

These deliberately avoid the jet machinery: every derivative here is a
central-difference stencil (with one Richardson level) straight off the
evaluated function, so agreement with the exact-jet paths is meaningful.
"""

import math

import pytest

from qclift.maps import sigma_jet


def richardson(stencil, h):
    """One Richardson level for a stencil whose leading error is O(h²)."""
    return (4.0 * stencil(h / 2.0) - stencil(h)) / 3.0


def fd_d1(f, z, h=1e-4):
    return richardson(lambda s: (f(z + s) - f(z - s)) / (2 * s), h)


def fd_d2(f, z, h=1e-3):
    return richardson(lambda s: (f(z + s) - 2 * f(z) + f(z - s)) / (s * s), h)


def fd_d3(f, z, h=1e-2):
    def stencil(s):
        return (-f(z - 2 * s) + 2 * f(z - s) - 2 * f(z + s) + f(z + 2 * s)) / (2 * s ** 3)
    return richardson(stencil, h)


def fd_sigma_derivs(spec, z, h=1e-4):
    """(sigma_z, sigma_zz, sigma_zzbar) from e^sigma values only.

    sigma_z = (sigma_x - i sigma_y)/2 and the second derivatives come from
    the 2D stencil identities sigma_zz = (s_xx - s_yy - 2i s_xy)/4 and
    sigma_zzbar = (s_xx + s_yy)/4.
    """
    def sig(w):
        return math.log(sigma_jet(spec, w).e_sigma)

    sigma_z = richardson(lambda s: _sz_step(sig, z, s), h)
    s0 = sig(z)
    sxx = richardson(lambda s: (sig(z + s) - 2 * s0 + sig(z - s)) / (s * s), h * 10)
    syy = richardson(lambda s: (sig(z + 1j * s) - 2 * s0 + sig(z - 1j * s)) / (s * s), h * 10)
    sxy = richardson(lambda s: (sig(z + s + 1j * s) - sig(z + s - 1j * s)
                                - sig(z - s + 1j * s) + sig(z - s - 1j * s)) / (4 * s * s),
                     h * 10)
    sigma_zz = complex(sxx - syy, -2 * sxy) / 4.0
    sigma_zzbar = (sxx + syy) / 4.0
    return sigma_z, sigma_zz, sigma_zzbar


def _sz_step(sig, z, s):
    sx = (sig(z + s) - sig(z - s)) / (2 * s)
    sy = (sig(z + 1j * s) - sig(z - 1j * s)) / (2 * s)
    return complex(sx, -sy) / 2.0


@pytest.fixture
def rng():
    import random
    return random.Random(20240817)
