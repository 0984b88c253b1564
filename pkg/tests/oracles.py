"""
Independent reference computations, written without importing ``dreadlock``.

* forward iteration with plain ``cmath``
* fixed points of ``e^z + a`` by iterating the inverse branch
  ``z -> log(z - a) + 2*pi*i*k``, polished with mpmath ``findroot``
* periodic points by mpmath Newton on ``f^p(z) - z``

The frozen constants below were produced by these functions (see
``test_oracles.py``, which recomputes them).
"""

import cmath
import math

import mpmath

mpmath.mp.dps = 40

# fixed points of e^z - 2
FIX_EXP_M2 = {
    0: 1.1461932206205826 + 0j,
    1: 2.1310754576665873 + 7.341435092197778j,
    -1: 2.1310754576665873 - 7.341435092197778j,
    2: 2.679774192512273 + 13.810452993120176j,
    -2: 2.679774192512273 - 13.810452993120176j,
    3: 3.0346885232781815 + 20.175805735222703j,
    -3: 3.0346885232781815 - 20.175805735222703j,
}
ATTRACTING_EXP_M2 = -1.8414056604369606 + 0j
# fixed points of e^z - 1 besides the parabolic point 0
FIX_EXP_M1 = {
    1: 2.0888430156130439 + 7.4614892856542546j,
    -1: 2.0888430156130439 - 7.4614892856542546j,
    2: 2.664068142429071 + 13.879056002746809j,
}
CYL_NORM_EXP_M2_AT_3 = 3.331756807966665
CYL_NORM_EXP_M2_AT_LN3 = 3.295836866004329


def forward_orbit(a, z, n):
    out = [complex(z)]
    for _ in range(n):
        out.append(cmath.exp(out[-1]) + a)
    return out


def inverse_fixed_point(a, k, z=10.0 + 0j, steps=200):
    """Fixed point of ``e^z + a`` reached by ``z -> Log(z - a) + 2*pi*i*k``."""
    for _ in range(steps):
        z = cmath.log(z - a) + 2j * math.pi * k
    return complex(mpmath.findroot(lambda w: mpmath.exp(w) + a - w, z))


def newton_periodic_mp(f, p, seed):
    """Root of ``f^p(z) - z`` near ``seed`` with mpmath."""

    def g(z):
        w = z
        for _ in range(p):
            w = f(w)
        return w - z

    return complex(mpmath.findroot(g, mpmath.mpc(seed)))


def cyl_norm_exp(a, z):
    z = mpmath.mpc(z)
    return float(abs(mpmath.exp(z) * z / (mpmath.exp(z) + a)))


def pullback_exp(a, labels, zeta):
    """``Log``-based pullback along ``labels`` (outermost first), valid where
    every intermediate point has ``|arg(w - a)| < pi``, e.g. on the real
    axis to the right of ``a``."""
    w = complex(zeta)
    for k in reversed(labels):
        w = cmath.log(w - a) + 2j * math.pi * k
    return w
