"""Quantumness measures for two-qubit X states: Wootters concurrence (X-form
analytic, channel-analytic, and a dense spin-flip oracle), relative entropy
of coherence, and local quantum uncertainty (LQU).
"""

import math
from dataclasses import dataclass

import numpy as np

from .qstate import WernerParams, XState, eigenvalues_x, to_dense
from .turbulence import ChannelCoefficients

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_I2 = np.eye(2, dtype=complex)
_PAULIS_A = [np.kron(s, _I2) for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)]

_EIG_CLAMP = 1e-12
_TIE_BAND = 1e-12


class NotPSD(ValueError):
    """Matrix handed to sqrt_psd has an eigenvalue below the clamping tolerance."""


@dataclass(frozen=True)
class MeasureTriple:
    """The three quantifiers of one state, plus the index of the maximal
    LQU eigenvalue branch (for sudden-change detection)."""

    concurrence: float
    coherence_rel_ent: float
    lqu: float
    lqu_branch: int


def concurrence_x(s: XState) -> float:
    """Wootters concurrence of an X state:
    2 max{0, |c14| - sqrt(d22 d33), |c23| - sqrt(d11 d44)}."""
    inner = abs(s.c14) - math.sqrt(max(s.d22 * s.d33, 0.0))
    outer = abs(s.c23) - math.sqrt(max(s.d11 * s.d44, 0.0))
    return 2.0 * max(0.0, inner, outer)


def concurrence_analytic(w: WernerParams, cc: ChannelCoefficients) -> float:
    """Closed-form concurrence of the Werner-like state through the channel:
    max{0, (a^2 gamma sin(theta) - 2 a b gamma)/(a+b)^2 - (1-gamma)/2}."""
    a, b = cc.a, cc.b
    val = (a * a * w.gamma * math.sin(w.theta) - 2.0 * a * b * w.gamma) / (a + b) ** 2
    return max(0.0, val - 0.5 * (1.0 - w.gamma))


def concurrence_wootters_oracle(dense: np.ndarray) -> float:
    """Spin-flip concurrence of a general two-qubit density matrix:
    C = max{0, l1 - l2 - l3 - l4} with l_i the decreasing square roots of the
    eigenvalues of rho (sy x sy) rho* (sy x sy).  Independent cross-check for
    concurrence_x."""
    rho = np.asarray(dense, dtype=complex)
    yy = np.kron(SIGMA_Y, SIGMA_Y)
    prod = rho @ yy @ rho.conj() @ yy
    lam = np.sqrt(np.clip(np.linalg.eigvals(prod).real, 0.0, None))
    lam = np.sort(lam)[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def von_neumann_entropy(eigs) -> float:
    """Entropy -sum l log2 l in bits, with 0 log 0 = 0."""
    lam = np.clip(np.asarray(eigs, dtype=float), 0.0, None)
    if abs(lam.sum() - 1.0) > 1e-10:
        raise ValueError(f"eigenvalues sum to {lam.sum()}, not a density spectrum")
    nz = lam[lam > 0.0]
    return float(-np.sum(nz * np.log2(nz)))


def rel_entropy_coherence(s: XState) -> float:
    """Relative entropy of coherence S(rho_diag) - S(rho), the entropy cost of
    deleting the off-diagonal elements."""
    s_diag = von_neumann_entropy(s.populations)
    s_full = von_neumann_entropy(eigenvalues_x(s))
    return max(0.0, s_diag - s_full)


def sqrt_psd(dense: np.ndarray) -> np.ndarray:
    """Hermitian square root by eigendecomposition.  Eigenvalues in
    [-1e-12, 0) are clamped to zero; anything lower raises NotPSD."""
    rho = np.asarray(dense, dtype=complex)
    eigs, vecs = np.linalg.eigh(rho)
    if eigs.min() < -_EIG_CLAMP:
        raise NotPSD(f"eigenvalue {eigs.min()} below clamping tolerance -{_EIG_CLAMP}")
    root = np.sqrt(np.clip(eigs, 0.0, None))
    return (vecs * root) @ vecs.conj().T


def w_matrix(dense: np.ndarray) -> np.ndarray:
    """3x3 matrix W_ij = Tr[sqrt(rho) (sigma_i x I) sqrt(rho) (sigma_j x I)]
    whose maximal eigenvalue gives the LQU."""
    root = sqrt_psd(dense)
    rotated = [root @ p for p in _PAULIS_A]
    w = np.empty((3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            w[i, j] = np.trace(rotated[i] @ rotated[j])
    assert np.abs(w.imag).max() <= 1e-12, "W matrix acquired an imaginary part"
    wr = w.real
    assert np.abs(wr - wr.T).max() <= 1e-12, "W matrix not symmetric"
    return 0.5 * (wr + wr.T)


def _max_branch(w: np.ndarray) -> tuple[float, int]:
    """Maximal eigenvalue of W and the 1-based Pauli axis (x,y,z) dominating
    its eigenvector; degenerate maxima (within 1e-12) pick the lowest axis."""
    eigs, vecs = np.linalg.eigh(w)
    lam_max = eigs[-1]
    axes = [int(np.argmax(np.abs(vecs[:, i])))
            for i in range(3) if eigs[i] >= lam_max - _TIE_BAND]
    return float(lam_max), min(axes) + 1


def lqu(s: XState) -> tuple[float, int]:
    """Local quantum uncertainty 1 - lambda_max(W), clamped to [0, 1], and the
    branch index of the maximal eigenvalue."""
    lam_max, branch = _max_branch(w_matrix(to_dense(s)))
    return min(1.0, max(0.0, 1.0 - lam_max)), branch


def measure_triple(s: XState) -> MeasureTriple:
    """All three quantifiers of one X state."""
    value, branch = lqu(s)
    return MeasureTriple(
        concurrence=concurrence_x(s),
        coherence_rel_ent=rel_entropy_coherence(s),
        lqu=value,
        lqu_branch=branch,
    )
