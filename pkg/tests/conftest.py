import math

import numpy as np
import pytest
from scipy.integrate import simpson

from oamturb import XState, _kernels
from oamturb.lgmath import BeamParams, phase_correlation_length


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the jitted kernels once so timed tests see steady-state speed."""
    _kernels.warmup()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240611)


def channel_ab_bruteforce(l0: int, x: float, nr: int = 2000, nth: int = 2000,
                          rmax_factor: float = 6.0):
    """Fixed-order quadrature for (a, b) directly in (r, theta) coordinates.

    Independent of the package's u-substituted adaptive path: trapezoid over
    the periodic angle, Simpson over radius, p0 = 0 radial profile written
    out explicitly.
    """
    labs = abs(l0)
    w0 = 1.0
    r0 = phase_correlation_length(BeamParams(waist=w0, l0=l0)) / x
    r = np.linspace(0.0, w0 * rmax_factor, nr)
    th = np.linspace(0.0, 2.0 * math.pi, nth)
    with np.errstate(divide="ignore"):
        ln_r2 = (math.log(4.0) - 2.0 * math.log(w0) - math.lgamma(labs + 1.0)
                 + labs * np.log(2.0 * np.maximum(r, 1e-300) ** 2 / w0 ** 2)
                 - 2.0 * r ** 2 / w0 ** 2)
    radial2 = np.exp(ln_r2)
    radial2[0] = 0.0
    d_half = 3.44 * (2.0 * np.outer(r, np.abs(np.sin(th / 2.0))) / r0) ** (5.0 / 3.0)
    kernel = np.exp(-d_half)
    ang_a = np.trapezoid(kernel, th, axis=1)
    ang_b = np.trapezoid(kernel * np.cos(2.0 * labs * th)[None, :], th, axis=1)
    a = simpson(r * radial2 * ang_a, x=r) / (2.0 * math.pi)
    b = simpson(r * radial2 * ang_b, x=r) / (2.0 * math.pi)
    return a, b


def random_x_state(rng: np.random.Generator) -> XState:
    """Random valid X state: Dirichlet populations, coherences inside the
    positivity disks with random phases."""
    d = rng.dirichlet(np.ones(4))
    m14 = math.sqrt(d[0] * d[3]) * rng.uniform(0.0, 1.0)
    m23 = math.sqrt(d[1] * d[2]) * rng.uniform(0.0, 1.0)
    ph14, ph23 = rng.uniform(0.0, 2.0 * math.pi, 2)
    return XState(d[0], d[1], d[2], d[3],
                  m14 * complex(math.cos(ph14), math.sin(ph14)),
                  m23 * complex(math.cos(ph23), math.sin(ph23)))
