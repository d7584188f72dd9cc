"""Two-qubit X states in the OAM basis {|l0,l0>, |l0,-l0>, |-l0,l0>, |-l0,-l0>}
and the action of the turbulence channel on them.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .turbulence import ChannelCoefficients

_TRACE_TOL = 1e-12
_POS_TOL = 1e-12


class DegenerateChannel(ValueError):
    """Channel coefficients with a + b ~ 0 leave no state to normalize."""


@dataclass(frozen=True)
class WernerParams:
    """Extended Werner-like input state: white noise of weight 1-gamma mixed
    with the Bell-like state cos(theta/2)|l0,-l0> + e^{i phi} sin(theta/2)|-l0,l0>."""

    gamma: float
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"purity gamma must lie in [0, 1], got {self.gamma}")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise ValueError(f"phi must lie in [0, 2pi), got {self.phi}")


@dataclass(frozen=True)
class XState:
    """Two-qubit density matrix in X form: diagonal (d11..d44) plus the two
    anti-diagonal coherences c14 and c23."""

    d11: float
    d22: float
    d33: float
    d44: float
    c14: complex = 0j
    c23: complex = 0j

    def __post_init__(self):
        d = (self.d11, self.d22, self.d33, self.d44)
        if min(d) < -_POS_TOL:
            raise ValueError(f"negative population in X state: {d}")
        if abs(sum(d) - 1.0) > _TRACE_TOL:
            raise ValueError(f"X state trace {sum(d)} != 1")
        if abs(self.c14) ** 2 > self.d11 * self.d44 + _POS_TOL:
            raise ValueError("outer block of X state not positive: |c14|^2 > d11*d44")
        if abs(self.c23) ** 2 > self.d22 * self.d33 + _POS_TOL:
            raise ValueError("inner block of X state not positive: |c23|^2 > d22*d33")

    @property
    def populations(self) -> np.ndarray:
        return np.array([self.d11, self.d22, self.d33, self.d44])


def werner_like(w: WernerParams) -> XState:
    """Input X state of purity gamma.

    The white-noise term contributes (1-gamma)/4 to the diagonal only; the
    coherence is c23 = (gamma/2) e^{-i phi} sin(theta).
    """
    e = (1.0 - w.gamma) / 4.0
    half = 0.5 * w.theta
    return XState(
        d11=e,
        d22=e + w.gamma * math.cos(half) ** 2,
        d33=e + w.gamma * math.sin(half) ** 2,
        d44=e,
        c14=0j,
        c23=0.5 * w.gamma * cmath.exp(-1j * w.phi) * math.sin(w.theta),
    )


def apply_channel(s: XState, cc: ChannelCoefficients) -> XState:
    """Push an X state through the two-photon turbulence channel.

    Populations mix with weights {a^2, ab, ab, b^2} rotated per row,
    coherences scale by a^2, everything divided by (a+b)^2; for unit-trace
    input the division renormalizes exactly (asserted).
    """
    a, b = cc.a, cc.b
    norm = (a + b) ** 2
    if norm <= 1e-14:
        raise DegenerateChannel(f"a + b = {a + b} too small to normalize the output")
    aa, ab, bb = a * a, a * b, b * b
    d = s.populations
    out = np.array([
        aa * d[0] + ab * d[1] + ab * d[2] + bb * d[3],
        ab * d[0] + aa * d[1] + bb * d[2] + ab * d[3],
        ab * d[0] + bb * d[1] + aa * d[2] + ab * d[3],
        bb * d[0] + ab * d[1] + ab * d[2] + aa * d[3],
    ]) / norm
    assert abs(out.sum() - 1.0) < 1e-12, "channel failed to preserve trace"
    scale = aa / norm
    return XState(out[0], out[1], out[2], out[3], scale * s.c14, scale * s.c23)


def eigenvalues_x(s: XState) -> np.ndarray:
    """Eigenvalues of the X state from its two 2x2 blocks, clamped at zero.

    Order: outer block (d11/d44 with c14) +/-, then inner block (d22/d33
    with c23) +/-.
    """
    h_outer = math.hypot(0.5 * (s.d11 - s.d44), abs(s.c14))
    h_inner = math.hypot(0.5 * (s.d22 - s.d33), abs(s.c23))
    m_outer = 0.5 * (s.d11 + s.d44)
    m_inner = 0.5 * (s.d22 + s.d33)
    eigs = np.array([m_outer + h_outer, m_outer - h_outer,
                     m_inner + h_inner, m_inner - h_inner])
    if eigs.min() < -_POS_TOL:
        raise ValueError(f"X state eigenvalue below -{_POS_TOL}: {eigs.min()}")
    return np.clip(eigs, 0.0, None)


def to_dense(s: XState) -> np.ndarray:
    """4x4 Hermitian density matrix with the X entries in place."""
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0], m[1, 1], m[2, 2], m[3, 3] = s.d11, s.d22, s.d33, s.d44
    m[0, 3] = s.c14
    m[3, 0] = s.c14.conjugate()
    m[1, 2] = s.c23
    m[2, 1] = s.c23.conjugate()
    return m


def extract_x(dense: np.ndarray, tol: float = 1e-12) -> XState:
    """Inverse of to_dense; rejects matrices with entries off the X pattern."""
    m = np.asarray(dense, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    mask = np.ones((4, 4), dtype=bool)
    for i, j in ((0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0), (1, 2), (2, 1)):
        mask[i, j] = False
    if np.abs(m[mask]).max() > tol:
        raise ValueError("matrix has entries outside the X pattern")
    return XState(m[0, 0].real, m[1, 1].real, m[2, 2].real, m[3, 3].real,
                  m[0, 3], m[1, 2])
