"""Turbulence-strength sweeps, ESD / sudden-change detection, and nonlinear
least-squares fits of the two universal decay forms

    poly_form: f(x) = A / (x^p + B) + C        (coherence)
    exp_form:  g(x) = G [exp(-alpha x^beta) + c]   (LQU)
"""

import math
from dataclasses import dataclass

import numpy as np

from .lgmath import BeamParams
from .measures import concurrence_analytic, measure_triple
from .qstate import WernerParams, apply_channel, werner_like
from .turbulence import ChannelCoefficients, ConvergenceFailure, channel_ab, r0_from_x

# Default initial guesses: the published fitted constants of each form.
POLY_FORM_INITIAL = (0.183, 3.78, 0.21, 0.131)
EXP_FORM_INITIAL = (0.92, 3.50, 1.90, 0.08)

MEASURE_FIELDS = ("concurrence", "coherence", "lqu")


class GridMismatch(ValueError):
    """Sweeps handed to collapse_check do not share the same x grid."""


@dataclass(frozen=True)
class SweepRow:
    """One sampled point of a sweep: strength, channel coefficients, measures."""

    x: float
    a: float
    b: float
    concurrence: float
    coherence: float
    lqu: float
    lqu_branch: int


@dataclass(frozen=True)
class FitResult:
    form: str                # "poly_form" or "exp_form"
    params: np.ndarray       # poly: (A, p, B, C); exp: (G, alpha, beta, c)
    rss: float
    converged: bool
    iterations: int


def _row_at(beam: BeamParams, w: WernerParams, x: float, tol: float) -> SweepRow:
    cc = channel_ab(beam, r0_from_x(beam, x), tol)
    m = measure_triple(apply_channel(werner_like(w), cc))
    return SweepRow(x=x, a=cc.a, b=cc.b, concurrence=m.concurrence,
                    coherence=m.coherence_rel_ent, lqu=m.lqu, lqu_branch=m.lqu_branch)


def sweep(beam: BeamParams, w: WernerParams, x_grid, tol: float = 1e-9) -> list[SweepRow]:
    """Evaluate channel and measures on each grid point, rows in grid order."""
    xs = [float(x) for x in x_grid]
    if any(x < 0 for x in xs):
        raise ValueError("x grid must be non-negative")
    if any(b < a for a, b in zip(xs, xs[1:])):
        raise ValueError("x grid must be sorted ascending")
    rows = []
    for x in xs:
        try:
            rows.append(_row_at(beam, w, x, tol))
        except ConvergenceFailure as exc:
            raise ConvergenceFailure(f"sweep failed at x = {x}: {exc}") from exc
    return rows


@dataclass(frozen=True)
class EsdResult:
    """Entanglement-sudden-death threshold, or the reason there is none."""

    x_star: float | None
    reason: str | None = None


def _analytic_concurrence_at(beam, w, x, tol):
    return concurrence_analytic(w, channel_ab(beam, r0_from_x(beam, x), tol))


def find_esd(beam: BeamParams, w: WernerParams, tol: float = 1e-9,
             x_max: float = 3.0, grid_points: int = 61) -> EsdResult:
    """Smallest x in (0, x_max] past which the concurrence is identically zero.

    Scans a uniform grid for the sign change of the analytic form's inner
    expression, verifies concurrence stays zero afterwards, then bisects the
    bracket.  Returns reasons "zero at origin" (no entanglement to lose) or
    "no death in range" when applicable.
    """
    if concurrence_analytic(w, ChannelCoefficients(1.0, 0.0)) <= 0.0:
        return EsdResult(None, "zero at origin")
    xs = np.linspace(0.0, x_max, grid_points)
    vals = [_analytic_concurrence_at(beam, w, float(x), tol) for x in xs]
    first_zero = next((i for i, v in enumerate(vals) if v <= 0.0), None)
    if first_zero is None:
        return EsdResult(None, "no death in range")
    if any(v > 0.0 for v in vals[first_zero:]):
        raise RuntimeError("concurrence revived after reaching zero; grid too coarse?")
    lo, hi = float(xs[first_zero - 1]), float(xs[first_zero])
    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        if _analytic_concurrence_at(beam, w, mid, tol) > 0.0:
            lo = mid
        else:
            hi = mid
    return EsdResult(0.5 * (lo + hi))


def detect_sudden_change(rows: list[SweepRow], beam: BeamParams | None = None,
                         w: WernerParams | None = None, tol: float = 1e-9,
                         refine_to: float = 1e-4) -> float | None:
    """Location where the LQU's maximal-eigenvalue branch index switches.

    With beam and state context the grid midpoint is refined by bisection on
    the branch index; otherwise the midpoint itself is returned.  None when
    the branch is constant along the sweep.
    """
    if len(rows) < 2:
        return None
    spacing = max(b.x - a.x for a, b in zip(rows, rows[1:]))
    if spacing > 0.05 + 1e-12:
        raise ValueError(f"grid spacing {spacing} too coarse for sudden-change detection")
    change = next((i for i, (r0, r1) in enumerate(zip(rows, rows[1:]))
                   if r0.lqu_branch != r1.lqu_branch), None)
    if change is None:
        return None
    lo, hi = rows[change].x, rows[change + 1].x
    if beam is None or w is None:
        return 0.5 * (lo + hi)
    branch_lo = rows[change].lqu_branch
    while hi - lo > refine_to:
        mid = 0.5 * (lo + hi)
        if _row_at(beam, w, mid, tol).lqu_branch == branch_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --- model forms and their Jacobians ---

def poly_form(x, params):
    """f(x) = A/(x^p + B) + C with f(0) = A/B + C."""
    A, p, B, C = params
    x = np.asarray(x, dtype=float)
    xp = np.where(x > 0.0, np.power(np.where(x > 0.0, x, 1.0), p), 0.0)
    return A / (xp + B) + C


def _poly_jac(x, params):
    A, p, B, C = params
    x = np.asarray(x, dtype=float)
    safe = np.where(x > 0.0, x, 1.0)
    xp = np.where(x > 0.0, np.power(safe, p), 0.0)
    denom = xp + B
    d_A = 1.0 / denom
    d_p = np.where(x > 0.0, -A * xp * np.log(safe) / denom ** 2, 0.0)
    d_B = -A / denom ** 2
    d_C = np.ones_like(x)
    return np.stack([d_A, d_p, d_B, d_C], axis=1)


def exp_form(x, params):
    """g(x) = G [exp(-alpha x^beta) + c] with g(0) = G (1 + c)."""
    G, alpha, beta, c = params
    x = np.asarray(x, dtype=float)
    xb = np.where(x > 0.0, np.power(np.where(x > 0.0, x, 1.0), beta), 0.0)
    return G * (np.exp(-alpha * xb) + c)


def _exp_jac(x, params):
    G, alpha, beta, c = params
    x = np.asarray(x, dtype=float)
    safe = np.where(x > 0.0, x, 1.0)
    xb = np.where(x > 0.0, np.power(safe, beta), 0.0)
    e = np.exp(-alpha * xb)
    d_G = e + c
    d_alpha = -G * xb * e
    d_beta = np.where(x > 0.0, -G * alpha * xb * np.log(safe) * e, 0.0)
    d_c = np.full_like(x, G)
    return np.stack([d_G, d_alpha, d_beta, d_c], axis=1)


def lm_least_squares(model, jac, x, y, p0, max_iter=500,
                     step_tol=1e-10, grad_tol=1e-12):
    """Damped Gauss-Newton (Levenberg-Marquardt) with analytic Jacobian.

    Returns (params, rss, converged, iterations, rss_history); the history
    records the rss after each accepted step and is non-increasing by
    construction (steps that raise the rss are rejected and re-damped).
    """
    p = np.asarray(p0, dtype=float).copy()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    resid = model(x, p) - y
    rss = float(resid @ resid)
    history = [rss]
    lam = 1e-3
    converged = False
    iterations = 0
    while iterations < max_iter:
        iterations += 1
        J = jac(x, p)
        grad = J.T @ resid
        if np.max(np.abs(grad)) < grad_tol:
            converged = True
            break
        JtJ = J.T @ J
        damped = JtJ + lam * np.diag(np.clip(np.diag(JtJ), 1e-30, None))
        try:
            step = np.linalg.solve(damped, -grad)
        except np.linalg.LinAlgError:
            lam *= 10.0
            continue
        trial = p + step
        trial_resid = model(x, trial) - y
        trial_rss = float(trial_resid @ trial_resid)
        if np.isfinite(trial_rss) and trial_rss <= rss:
            accepted_step = np.max(np.abs(step))
            p, resid, rss = trial, trial_resid, trial_rss
            history.append(rss)
            lam = max(lam / 3.0, 1e-14)
            if accepted_step < step_tol:
                converged = True
                break
        else:
            lam *= 10.0
            if lam > 1e14:
                break
    return p, rss, converged, iterations, history


def _fit(form_name, model, jac, rows, column, initial, max_iter):
    xs = np.array([r.x for r in rows])
    ys = np.array([getattr(r, column) for r in rows])
    if len(rows) < 8:
        raise ValueError(f"need at least 8 rows to fit, got {len(rows)}")
    if xs.min() > 1e-12:
        raise ValueError("fit requires an x = 0 row (anchors the form at the origin)")
    p, rss, converged, iterations, _ = lm_least_squares(
        model, jac, xs, ys, initial, max_iter=max_iter)
    return FitResult(form=form_name, params=p, rss=rss,
                     converged=converged, iterations=iterations)


def fit_poly_form(rows: list[SweepRow], initial=POLY_FORM_INITIAL,
                  max_iter: int = 500) -> FitResult:
    """Fit f(x) = A/(x^p + B) + C to the coherence column."""
    return _fit("poly_form", poly_form, _poly_jac, rows, "coherence", initial, max_iter)


def fit_exp_form(rows: list[SweepRow], initial=EXP_FORM_INITIAL,
                 max_iter: int = 500) -> FitResult:
    """Fit g(x) = G [exp(-alpha x^beta) + c] to the lqu column."""
    return _fit("exp_form", exp_form, _exp_jac, rows, "lqu", initial, max_iter)


def collapse_check(curves: list[list[SweepRow]], measure: str = "coherence") -> float:
    """Maximum pointwise absolute deviation between any two sweeps sharing a grid."""
    if measure not in MEASURE_FIELDS:
        raise ValueError(f"measure must be one of {MEASURE_FIELDS}, got {measure!r}")
    if len(curves) < 2:
        return 0.0
    grids = [np.array([r.x for r in rows]) for rows in curves]
    for g in grids[1:]:
        if g.shape != grids[0].shape or np.max(np.abs(g - grids[0])) > 1e-12:
            raise GridMismatch("sweeps do not share the same x grid")
    cols = [np.array([getattr(r, measure) for r in rows]) for rows in curves]
    worst = 0.0
    for i in range(len(cols)):
        for j in range(i + 1, len(cols)):
            worst = max(worst, float(np.max(np.abs(cols[i] - cols[j]))))
    return worst
