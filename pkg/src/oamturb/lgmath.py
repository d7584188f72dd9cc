"""Laguerre-Gauss beam math: special functions and beam geometry.

Everything here is evaluated at the beam waist (z = 0); no propagation
factors (Gouy phase, curvature) enter the model.
"""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class BeamParams:
    """LG mode description: waist, azimuthal and radial quantum numbers.

    The qubit lives in the {+l0, -l0} OAM subspace, so |l0| >= 1.
    """

    waist: float = 1.0
    l0: int = 1
    p0: int = 0

    def __post_init__(self):
        if not self.waist > 0:
            raise ValueError(f"beam waist must be positive, got {self.waist}")
        if abs(self.l0) < 1:
            raise ValueError("azimuthal index l0 = 0 gives no two-dimensional OAM subspace")
        if self.p0 < 0:
            raise ValueError(f"radial index p0 must be non-negative, got {self.p0}")


def laguerre(p: int, alpha: int, x: float) -> float:
    """Generalized Laguerre polynomial L_p^alpha(x).

    Evaluated by the three-term recurrence
        (k+1) L_{k+1} = (2k + alpha + 1 - x) L_k - (k + alpha) L_{k-1},
    which is stable for large p where the alternating factorial sum is not.
    """
    if p < 0:
        raise ValueError(f"polynomial degree p must be non-negative, got {p}")
    if alpha < 0:
        raise ValueError(f"order alpha must be non-negative, got {alpha}")
    if not math.isfinite(x):
        raise ValueError(f"argument must be finite, got {x}")
    if p == 0:
        return 1.0
    lm1 = 1.0
    lcur = 1.0 + alpha - x
    for k in range(1, p):
        lnext = ((2.0 * k + alpha + 1.0 - x) * lcur - (k + alpha) * lm1) / (k + 1.0)
        lm1 = lcur
        lcur = lnext
    return lcur


def radial_profile(r: float, beam: BeamParams) -> float:
    """Radial amplitude R_{p0,l0}(r) of the LG mode, normalized so that
    the intensity integral  int_0^inf R^2 r dr = 1.

        R(r) = (2/w0) sqrt(p0!/(p0+|l0|)!) (r sqrt2/w0)^|l0|
               L_{p0}^{|l0|}(2 r^2/w0^2) exp(-r^2/w0^2)

    The Laguerre argument is the dimensionless 2r^2/w0^2 (for p0 = 0 the
    polynomial is constant and the argument is immaterial).
    """
    if r < 0:
        raise ValueError(f"radius must be non-negative, got {r}")
    w0 = beam.waist
    labs = abs(beam.l0)
    p0 = beam.p0
    if r == 0.0:
        return 0.0  # (r sqrt2/w0)^|l0| vanishes for |l0| >= 1
    u = 2.0 * r * r / (w0 * w0)
    # log-space prefactor: factorial ratio overflows well before |l0| ~ 150
    lg = 0.5 * (math.lgamma(p0 + 1.0) - math.lgamma(p0 + labs + 1.0))
    amp = (2.0 / w0) * math.exp(lg + 0.5 * labs * math.log(u) - 0.5 * u)
    return amp * laguerre(p0, labs, u)


def phase_correlation_length(beam: BeamParams) -> float:
    """Phase correlation length xi(l0): the transverse distance over which the
    helical phase advances by pi/2, averaged over the mode cross-section.

        xi(l0) = sin(pi/(2|l0|)) (w0/2) Gamma(|l0| + 3/2) / Gamma(|l0| + 1)

    Gamma ratio computed via lgamma so large |l0| does not overflow.
    """
    labs = abs(beam.l0)
    if labs < 1:
        raise ValueError("phase correlation length undefined for l0 = 0")
    ratio = math.exp(math.lgamma(labs + 1.5) - math.lgamma(labs + 1.0))
    return math.sin(math.pi / (2.0 * labs)) * 0.5 * beam.waist * ratio
