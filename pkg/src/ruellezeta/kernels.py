"""Array kernels for Gaussian weight sums over target grids.

Every (grid target, cached word translate) pair contributes one Gaussian
term, and for fine grids this dominates the total runtime by a wide
margin.  Two interchangeable implementations live here: a numba-compiled
loop and a plain numpy one.  The backend is picked once at import time
from the RUELLEZETA_NUMBA environment variable; set it to "0" to force
the numpy path (or when numba is not installed the fallback engages on
its own).  Both paths evaluate the same term expression; only the
reduction order differs, so results agree to rounding.

Inputs are flat float64 arrays with an ``offsets`` vector delimiting the
terms of each word (segment r owns offsets[r]:offsets[r+1]); outputs are
(targets, segments) matrices of raw term sums.  All normalization
prefactors are applied by the callers.
"""

import math
import os

import numpy as np

_TWO_PI = 2.0 * math.pi

_want_numba = os.environ.get("RUELLEZETA_NUMBA", "1") != "0"
if _want_numba:
    try:
        import numba
    except ImportError:
        numba = None
else:
    numba = None

#: maximum (targets x terms) block materialized at once on the numpy path
_BLOCK = 2_000_000


def backend_name():
    if numba is not None:
        return "numba"
    if _want_numba:
        return "numpy (numba unavailable)"
    return "numpy (flag disabled)"


def _as_f64(*arrays):
    return tuple(np.ascontiguousarray(a, dtype=np.float64) for a in arrays)


# The base-manifold term: with w the image of the target z = x + i y
# under the anchor map [[a, b], [c, d]], the summand is
# exp(-(Re w / (sigma Im w))^2).  Real and imaginary part share the
# |cz + d|^2 denominator, so the ratio is formed as
# ((a x + b)(c x + d) + a c y^2) / (y det) and the shared factor never
# gets computed; for targets off the real axis the one division is by a
# strictly positive quantity.

def _base_sums_numpy(ma, mb, mc, md, mdet, offsets, cx, cy, inv_sigma):
    npts = cx.shape[0]
    nseg = offsets.shape[0] - 1
    out = np.empty((npts, nseg))
    step = max(1, _BLOCK // max(1, npts))
    for r in range(nseg):
        lo, hi = int(offsets[r]), int(offsets[r + 1])
        acc = np.zeros(npts)
        for t0 in range(lo, hi, step):
            t1 = min(hi, t0 + step)
            na = np.multiply.outer(cx, ma[t0:t1]) + mb[t0:t1]
            nb = np.multiply.outer(cy, ma[t0:t1])
            da = np.multiply.outer(cx, mc[t0:t1]) + md[t0:t1]
            db = np.multiply.outer(cy, mc[t0:t1])
            ratio = ((na * da + nb * db)
                     / np.multiply.outer(cy, mdet[t0:t1]) * inv_sigma)
            acc += np.exp(-(ratio * ratio)).sum(axis=1)
        out[:, r] = acc
    return out


def _section_sums_numpy(tm, tp, offsets, gm, gp, inv_sigma2, wrap):
    npts = gm.shape[0]
    nseg = offsets.shape[0] - 1
    out = np.empty((npts, nseg))
    for r in range(nseg):
        lo, hi = int(offsets[r]), int(offsets[r + 1])
        dm = np.abs(np.subtract.outer(gm, tm[lo:hi]))
        dp = np.abs(np.subtract.outer(gp, tp[lo:hi]))
        if wrap:
            dm = np.minimum(dm, _TWO_PI - dm)
            dp = np.minimum(dp, _TWO_PI - dp)
        out[:, r] = np.exp(-(dm * dm + dp * dp) * inv_sigma2).sum(axis=1)
    return out


if numba is not None:

    @numba.njit(cache=True, nogil=True)
    def _base_sums_numba(ma, mb, mc, md, mdet, offsets, cx, cy, inv_sigma,
                         out):
        for p in range(cx.shape[0]):
            zx = cx[p]
            zy = cy[p]
            for r in range(offsets.shape[0] - 1):
                acc = 0.0
                for t in range(offsets[r], offsets[r + 1]):
                    na = ma[t] * zx + mb[t]
                    nb = ma[t] * zy
                    da = mc[t] * zx + md[t]
                    db = mc[t] * zy
                    ratio = (na * da + nb * db) / (zy * mdet[t]) * inv_sigma
                    acc += math.exp(-(ratio * ratio))
                out[p, r] = acc

    @numba.njit(cache=True, nogil=True)
    def _section_sums_numba(tm, tp, offsets, gm, gp, inv_sigma2, wrap, out):
        for p in range(gm.shape[0]):
            xm = gm[p]
            xp = gp[p]
            for r in range(offsets.shape[0] - 1):
                acc = 0.0
                for t in range(offsets[r], offsets[r + 1]):
                    dm = abs(xm - tm[t])
                    dp = abs(xp - tp[t])
                    if wrap:
                        if dm > math.pi:
                            dm = _TWO_PI - dm
                        if dp > math.pi:
                            dp = _TWO_PI - dp
                    acc += math.exp(-(dm * dm + dp * dp) * inv_sigma2)
                out[p, r] = acc


def base_sums(ma, mb, mc, md, mdet, offsets, cx, cy, sigma):
    """Sum exp(-(x_j / (sigma y_j))^2) per segment for every target.

    ma..mdet hold the prefix-map entries and determinants, cx/cy the real
    and imaginary parts of the target centers.  Returns (len(cx), nseg).
    """
    ma, mb, mc, md, mdet, cx, cy = _as_f64(ma, mb, mc, md, mdet, cx, cy)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    inv_sigma = 1.0 / float(sigma)
    if numba is not None:
        out = np.empty((cx.shape[0], offsets.shape[0] - 1))
        _base_sums_numba(ma, mb, mc, md, mdet, offsets, cx, cy, inv_sigma,
                         out)
        return out
    return _base_sums_numpy(ma, mb, mc, md, mdet, offsets, cx, cy, inv_sigma)


def section_sums(tm, tp, offsets, gm, gp, sigma, wrap):
    """Sum exp(-(d_minus^2 + d_plus^2)/sigma^2) per segment per target.

    tm/tp are the per-term coordinates of the repelling/attracting pair,
    gm/gp the target coordinates, all in the same chart: angles on the
    boundary circle with wrap=True, raw boundary reals with wrap=False.
    """
    tm, tp, gm, gp = _as_f64(tm, tp, gm, gp)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    inv_sigma2 = 1.0 / float(sigma) ** 2
    if numba is not None:
        out = np.empty((gm.shape[0], offsets.shape[0] - 1))
        _section_sums_numba(tm, tp, offsets, gm, gp, inv_sigma2,
                            bool(wrap), out)
        return out
    return _section_sums_numpy(tm, tp, offsets, gm, gp, inv_sigma2,
                               bool(wrap))


def warmup():
    """Trigger compilation so later timings exclude it."""
    off = np.array([0, 1], dtype=np.int64)
    one = np.ones(1)
    base_sums(one, one, one, 2.0 * one, one, off, one, one, 1.0)
    section_sums(one, -one, off, one, -one, 1.0, True)
