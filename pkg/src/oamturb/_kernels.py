"""Adaptive Gauss-Kronrod kernels for the turbulence channel integrals.

The double integral behind the survival/crosstalk coefficients is the hot
path of every sweep, so the panel loops here are compiled with numba when
available.  Setting the environment variable ``OAMTURB_NO_NUMBA=1`` before
import selects the pure NumPy/Python fallback (same source, no JIT); see
``benchmarks/bench_kernels.py`` for a timing comparison of the two paths.
"""

import math
import os

import numpy as np

_flag = os.environ.get("OAMTURB_NO_NUMBA", "").strip().lower()
NUMBA_ENABLED = _flag not in {"1", "true", "yes", "on"}

if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:
    def njit(*args, **kwargs):
        """No-op decorator standing in for numba.njit on the fallback path."""
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK dqk15),
# nodes sorted ascending; Gauss weights are zero at Kronrod-only nodes.
_XK = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0, 0.207784955007898, 0.405845151377397,
    0.586087235467691, 0.741531185599394, 0.864864423359769,
    0.949107912342759, 0.991455371120813,
])
_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529,
])
_WG = np.array([
    0.0, 0.129484966168870, 0.0, 0.279705391489277, 0.0,
    0.381830050505119, 0.0, 0.417959183673469, 0.0,
    0.381830050505119, 0.0, 0.279705391489277, 0.0,
    0.129484966168870, 0.0,
])

# Panel budget for each 1-D adaptive integral before giving up.
PANEL_BUDGET = 10_000

_FIVE_THIRDS = 5.0 / 3.0


@njit(cache=True)
def _laguerre_rec(p, alpha, x):
    """Generalized Laguerre polynomial L_p^alpha(x) by three-term recurrence."""
    if p == 0:
        return 1.0
    lm1 = 1.0
    lcur = 1.0 + alpha - x
    for k in range(1, p):
        lnext = ((2.0 * k + alpha + 1.0 - x) * lcur - (k + alpha) * lm1) / (k + 1.0)
        lm1 = lcur
        lcur = lnext
    return lcur


@njit(cache=True)
def _angular_panel(c, n, lo, hi, use_sin):
    """GK15 on one panel of cos/sin(n*theta) * exp(-c*|sin(theta/2)|^(5/3))."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    acc_k = 0.0
    acc_g = 0.0
    for i in range(15):
        th = mid + half * _XK[i]
        s = abs(math.sin(0.5 * th))
        kern = math.exp(-c * s ** _FIVE_THIRDS)
        if use_sin:
            f = math.sin(n * th) * kern
        else:
            f = math.cos(n * th) * kern
        acc_k += _WK[i] * f
        acc_g += _WG[i] * f
    return half * acc_k, abs(half * (acc_k - acc_g))


@njit(cache=True)
def _angular_integral(c, n, lo, hi, tol, use_sin):
    """Globally adaptive integral over [lo, hi]; returns (value, err_bound, ok)."""
    los = np.empty(PANEL_BUDGET)
    his = np.empty(PANEL_BUDGET)
    vals = np.empty(PANEL_BUDGET)
    errs = np.empty(PANEL_BUDGET)
    v, e = _angular_panel(c, n, lo, hi, use_sin)
    los[0] = lo
    his[0] = hi
    vals[0] = v
    errs[0] = e
    count = 1
    total_val = v
    total_err = e
    min_width = 1e-13 * (hi - lo)
    while total_err > tol:
        worst = 0
        emax = errs[0]
        for i in range(1, count):
            if errs[i] > emax:
                emax = errs[i]
                worst = i
        wlo = los[worst]
        whi = his[worst]
        if count >= PANEL_BUDGET or (whi - wlo) < min_width:
            return total_val, total_err, False
        wmid = 0.5 * (wlo + whi)
        v1, e1 = _angular_panel(c, n, wlo, wmid, use_sin)
        v2, e2 = _angular_panel(c, n, wmid, whi, use_sin)
        total_val += v1 + v2 - vals[worst]
        total_err += e1 + e2 - errs[worst]
        los[worst] = wlo
        his[worst] = wmid
        vals[worst] = v1
        errs[worst] = e1
        los[count] = wmid
        his[count] = whi
        vals[count] = v2
        errs[count] = e2
        count += 1
    return total_val, total_err, True


@njit(cache=True)
def _radial_weight(u, labs, p0):
    """Radial measure u^|l| L_p^|l|(u)^2 e^-u p!/(p+|l|)! in the u = 2r^2/w0^2 variable."""
    if u <= 0.0:
        return 0.0
    lg = math.lgamma(p0 + 1.0) - math.lgamma(p0 + labs + 1.0) + labs * math.log(u) - u
    lag = _laguerre_rec(p0, float(labs), u)
    return math.exp(lg) * lag * lag


@njit(cache=True)
def _radial_panel(n, labs, p0, cscale, lo, hi, th_hi, tol_inner, use_sin):
    """GK15 panel of w(u) * angular(c(u)); c(u) = cscale * u^(5/6)."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    acc_k = 0.0
    acc_g = 0.0
    ok = True
    for i in range(15):
        u = mid + half * _XK[i]
        w = _radial_weight(u, labs, p0)
        if w > 0.0:
            c = cscale * u ** (5.0 / 6.0)
            ang, _, ang_ok = _angular_integral(c, n, 0.0, th_hi, tol_inner, use_sin)
            if not ang_ok:
                ok = False
            f = w * ang
        else:
            f = 0.0
        acc_k += _WK[i] * f
        acc_g += _WG[i] * f
    return half * acc_k, abs(half * (acc_k - acc_g)), ok


@njit(cache=True)
def _channel_integral(n, labs, p0, cscale, umax, th_hi, tol_outer, tol_inner, use_sin):
    """Nested adaptive integral of w(u) * int_0^th_hi trig(n*theta) exp(-c(u) sin^(5/3)) dtheta.

    Returns (value, err_bound, ok); err_bound covers the outer panels only,
    the inner integrals are each resolved to absolute tol_inner.
    """
    los = np.empty(PANEL_BUDGET)
    his = np.empty(PANEL_BUDGET)
    vals = np.empty(PANEL_BUDGET)
    errs = np.empty(PANEL_BUDGET)
    v, e, ok = _radial_panel(n, labs, p0, cscale, 0.0, umax, th_hi, tol_inner, use_sin)
    if not ok:
        return v, e, False
    los[0] = 0.0
    his[0] = umax
    vals[0] = v
    errs[0] = e
    count = 1
    total_val = v
    total_err = e
    min_width = 1e-13 * umax
    while total_err > tol_outer:
        worst = 0
        emax = errs[0]
        for i in range(1, count):
            if errs[i] > emax:
                emax = errs[i]
                worst = i
        wlo = los[worst]
        whi = his[worst]
        if count >= PANEL_BUDGET or (whi - wlo) < min_width:
            return total_val, total_err, False
        wmid = 0.5 * (wlo + whi)
        v1, e1, ok1 = _radial_panel(n, labs, p0, cscale, wlo, wmid, th_hi, tol_inner, use_sin)
        v2, e2, ok2 = _radial_panel(n, labs, p0, cscale, wmid, whi, th_hi, tol_inner, use_sin)
        if not (ok1 and ok2):
            return total_val, total_err, False
        total_val += v1 + v2 - vals[worst]
        total_err += e1 + e2 - errs[worst]
        los[worst] = wlo
        his[worst] = wmid
        vals[worst] = v1
        errs[worst] = e1
        los[count] = wmid
        his[count] = whi
        vals[count] = v2
        errs[count] = e2
        count += 1
    return total_val, total_err, True


def warmup():
    """Trigger JIT compilation of the kernel chain (no-op on the fallback path)."""
    _channel_integral(2, 1, 0, 1.0, 30.0, math.pi, 1e-6, 1e-7, False)
