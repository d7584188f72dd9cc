"""Kolmogorov turbulence channel: structure function, Fried parameter, and the
survival/crosstalk coefficients of the single-photon OAM map.

The map element between modes of the {+l0, -l0} subspace reduces, after the
angular selection rule, to

    (1/2pi) int_0^inf dr r R(r)^2 int_0^2pi dtheta e^{-i n theta}
            exp(-D_phi(2 r |sin(theta/2)|)/2)

with n = 0 for the survival amplitude a and n = 2 l0 for the crosstalk
amplitude b.  Substituting u = 2 r^2/w0^2 turns the radial measure into the
normalized weight u^|l0| L_{p0}^{|l0|}(u)^2 e^-u p0!/(p0+|l0|)!, so the result
depends on (w0/r0, l0, p0) only.  The nested adaptive quadrature lives in
``_kernels``.
"""

import math
from dataclasses import dataclass

from scipy.special import gammainccinv

from . import _kernels
from .lgmath import BeamParams, phase_correlation_length

# Kolmogorov phase structure function constant: D = 6.88 (d/r0)^(5/3)
STRUCTURE_CONSTANT = 6.88

# Relative mass allowed beyond the radial truncation point.
_TAIL_MASS = 1e-16

# b values in (-NEGATIVE_B_TOL, 0) are quadrature noise and clamp to zero.
NEGATIVE_B_TOL = 1e-10


class ConvergenceFailure(RuntimeError):
    """Adaptive quadrature could not reach the requested tolerance."""


@dataclass(frozen=True)
class TurbulenceParams:
    """Turbulence strength via the Fried parameter r0 (same length unit as the
    beam waist).  ``math.inf`` encodes the no-turbulence limit."""

    fried_r0: float

    def __post_init__(self):
        if not self.fried_r0 > 0:
            raise ValueError(f"Fried parameter must be positive, got {self.fried_r0}")

    @classmethod
    def from_physical(cls, Cn2: float, k: float, L: float) -> "TurbulenceParams":
        """Construct from structure constant Cn2 [m^-2/3], wavenumber k [1/m]
        and path length L [m]."""
        return cls(fried_parameter(Cn2, k, L))


@dataclass(frozen=True)
class ChannelCoefficients:
    """Survival amplitude a and crosstalk amplitude b with quadrature error bounds."""

    a: float
    b: float
    err_a: float = 0.0
    err_b: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.a <= 1.0 + 1e-10:
            raise ValueError(f"survival coefficient out of range: a = {self.a}")
        if self.b < 0.0:
            raise ValueError(f"crosstalk coefficient negative: b = {self.b}")
        if abs(self.b) > self.a + 1e-10:
            raise ValueError(f"crosstalk exceeds survival: a = {self.a}, b = {self.b}")


def phase_structure(separation: float, turb: TurbulenceParams) -> float:
    """Kolmogorov phase structure function D_phi = 6.88 (separation/r0)^(5/3)."""
    if separation < 0:
        raise ValueError(f"separation must be non-negative, got {separation}")
    if separation == 0.0:
        return 0.0
    return STRUCTURE_CONSTANT * (separation / turb.fried_r0) ** (5.0 / 3.0)


def fried_parameter(Cn2: float, k: float, L: float) -> float:
    """Fried parameter r0 = (0.423 Cn2 k^2 L)^(-3/5)."""
    if Cn2 <= 0 or k <= 0 or L <= 0:
        raise ValueError(f"Cn2, k, L must all be positive, got ({Cn2}, {k}, {L})")
    return (0.423 * Cn2 * k * k * L) ** (-3.0 / 5.0)


def x_ratio(beam: BeamParams, turb: TurbulenceParams) -> float:
    """Dimensionless turbulence strength x = xi(l0)/r0."""
    if math.isinf(turb.fried_r0):
        return 0.0
    return phase_correlation_length(beam) / turb.fried_r0


def r0_from_x(beam: BeamParams, x: float) -> TurbulenceParams:
    """Fried parameter realizing strength x, the inverse of x_ratio.

    x = 0 is accepted as the symbolic no-turbulence limit (r0 = inf,
    handled by channel_ab without quadrature); x < 0 is rejected.
    """
    if x < 0:
        raise ValueError(f"turbulence strength x must be non-negative, got {x}")
    if x == 0.0:
        return TurbulenceParams(math.inf)
    return TurbulenceParams(phase_correlation_length(beam) / x)


def _c_scale(beam: BeamParams, turb: TurbulenceParams) -> float:
    # exponent of the angular kernel: c(u) = c_scale * u^(5/6), from
    # D_phi(2 r |sin(theta/2)|)/2 with r = w0 sqrt(u/2)
    return 0.5 * STRUCTURE_CONSTANT * (math.sqrt(2.0) * beam.waist / turb.fried_r0) ** (5.0 / 3.0)


def _u_max(beam: BeamParams) -> float:
    # cut the radial tail where the remaining weight mass is below _TAIL_MASS;
    # the weight peaks near u = |l0|, so a fixed cut would under-truncate at
    # large |l0|.  The Laguerre factor raises the effective shape parameter
    # by at most 2 p0.
    shape = abs(beam.l0) + 2 * beam.p0 + 1
    return 1.1 * float(gammainccinv(shape, _TAIL_MASS))


def channel_ab(beam: BeamParams, turb: TurbulenceParams, tol: float = 1e-9) -> ChannelCoefficients:
    """Survival and crosstalk coefficients (a, b) of the turbulence map.

    The angular integral is folded onto [0, pi] (the kernel is symmetric
    under theta -> 2pi - theta, so both coefficients are real cosine
    integrals), resolved to tol/10 per radial point; the radial integral is
    adaptive to tol.  Raises ConvergenceFailure if the panel budget is
    exhausted before reaching the tolerance.
    """
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if math.isinf(turb.fried_r0):
        return ChannelCoefficients(1.0, 0.0, 0.0, 0.0)
    labs = abs(beam.l0)
    cscale = _c_scale(beam, turb)
    umax = _u_max(beam)
    tol_inner = tol / 10.0

    raw_a, err_a, ok_a = _kernels._channel_integral(
        0, labs, beam.p0, cscale, umax, math.pi, tol, tol_inner, False)
    if not ok_a:
        raise ConvergenceFailure(
            f"survival integral did not reach tol={tol} within the panel budget "
            f"(l0={beam.l0}, x={x_ratio(beam, turb):.6g})")
    raw_b, err_b, ok_b = _kernels._channel_integral(
        2 * labs, labs, beam.p0, cscale, umax, math.pi, tol, tol_inner, False)
    if not ok_b:
        raise ConvergenceFailure(
            f"crosstalk integral did not reach tol={tol} within the panel budget "
            f"(l0={beam.l0}, x={x_ratio(beam, turb):.6g})")

    # fold [0, pi] back to [0, 2pi] and apply the 1/2pi prefactor
    a = raw_a / math.pi
    b = raw_b / math.pi
    bound_a = (err_a + tol_inner) / math.pi
    bound_b = (err_b + tol_inner) / math.pi
    if b < 0.0:
        if b < -NEGATIVE_B_TOL:
            raise ConvergenceFailure(
                f"crosstalk coefficient b = {b} is negative beyond quadrature noise")
        b = 0.0
    a = min(a, 1.0)
    return ChannelCoefficients(a, b, bound_a, bound_b)


def lambda_element(l_in: int, lp_in: int, l_out: int, lp_out: int,
                   beam: BeamParams, turb: TurbulenceParams, tol: float = 1e-9) -> complex:
    """General element of the single-photon map for indices in {+l0, -l0}.

    Enforces the angular-momentum selection rule (exact zero when violated)
    and carries the phase factor exp(-i theta [l_out + lp_out - l_in - lp_in]/2).
    Unlike channel_ab, integrates the full [0, 2pi] circle so the analytic
    vanishing of the imaginary part is checked numerically, not imposed.
    """
    valid = {beam.l0, -beam.l0}
    for idx in (l_in, lp_in, l_out, lp_out):
        if idx not in valid:
            raise ValueError(f"index {idx} outside the qubit subspace {{+l0, -l0}}")
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if l_in - lp_in != l_out - lp_out:
        return 0.0 + 0.0j
    if math.isinf(turb.fried_r0):
        return (1.0 if l_in == l_out else 0.0) + 0.0j

    n = (l_out + lp_out - l_in - lp_in) // 2
    labs = abs(beam.l0)
    cscale = _c_scale(beam, turb)
    umax = _u_max(beam)
    two_pi = 2.0 * math.pi
    tol_inner = tol / 10.0

    # e^{-i n theta} = cos(n theta) - i sin(n theta)
    re, _, ok_re = _kernels._channel_integral(
        n, labs, beam.p0, cscale, umax, two_pi, tol, tol_inner, False)
    im, _, ok_im = _kernels._channel_integral(
        n, labs, beam.p0, cscale, umax, two_pi, tol, tol_inner, True)
    if not (ok_re and ok_im):
        raise ConvergenceFailure(
            f"map element integral did not converge (indices {l_in},{lp_in} -> {l_out},{lp_out})")
    return complex(re / two_pi, -im / two_pi)
