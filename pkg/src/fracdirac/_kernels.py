"""RK4 sweeps over a pre-sampled Dirac system.

The coefficients never depend on the spectral parameter, so they are
sampled once per grid (at nodes and at stage midpoints) and every sweep
is a plain loop over arrays.  Two interchangeable backends exist:

* numba ``@njit`` kernels (default when numba imports), and
* pure numpy kernels, vectorised over the spectral parameter.

Set ``FRACDIRAC_DISABLE_NUMBA=1`` to force the numpy path.
"""

import os

import numpy as np

_DISABLED = os.environ.get("FRACDIRAC_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    import numba
except ImportError:  # pragma: no cover - numba is optional
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not _DISABLED


# -- numpy backend -----------------------------------------------------------


# below this many lambdas a scalar loop per lambda beats per-step array overhead
SCALAR_BATCH = 16


def sweep_endpoint_numpy(lams, h, pn, pm, rn, rm, y0, reverse):
    """Final states of one sweep per entry of ``lams``; shape (M, 2)."""
    lams = np.asarray(lams, dtype=float)
    if lams.size <= SCALAR_BATCH:
        return _endpoint_scalar(lams, h, pn, pm, rn, rm, y0, reverse)
    y1 = np.full(lams.shape, y0[0])
    y2 = np.full(lams.shape, y0[1])
    n_steps = h.shape[0]
    for j in range(n_steps):
        if reverse:
            n = n_steps - 1 - j
            hs = -h[n]
            a1 = rn[n + 1] - lams
            b1 = lams + pn[n + 1]
            a4 = rn[n] - lams
            b4 = lams + pn[n]
        else:
            n = j
            hs = h[n]
            a1 = rn[n] - lams
            b1 = lams + pn[n]
            a4 = rn[n + 1] - lams
            b4 = lams + pn[n + 1]
        am = rm[n] - lams
        bm = lams + pm[n]
        half = 0.5 * hs
        k11 = a1 * y2
        k12 = b1 * y1
        k21 = am * (y2 + half * k12)
        k22 = bm * (y1 + half * k11)
        k31 = am * (y2 + half * k22)
        k32 = bm * (y1 + half * k21)
        k41 = a4 * (y2 + hs * k32)
        k42 = b4 * (y1 + hs * k31)
        y1 = y1 + hs * (k11 + 2.0 * k21 + 2.0 * k31 + k41) / 6.0
        y2 = y2 + hs * (k12 + 2.0 * k22 + 2.0 * k32 + k42) / 6.0
    return np.stack([y1, y2], axis=-1)


def _path_into(out, lam, h, pn, pm, rn, rm, y1, y2, reverse):
    n_steps = len(h)
    start = n_steps if reverse else 0
    out[start, 0] = y1
    out[start, 1] = y2
    for j in range(n_steps):
        if reverse:
            n = n_steps - 1 - j
            hs = -h[n]
            a1 = rn[n + 1] - lam
            b1 = lam + pn[n + 1]
            a4 = rn[n] - lam
            b4 = lam + pn[n]
            dest = n
        else:
            n = j
            hs = h[n]
            a1 = rn[n] - lam
            b1 = lam + pn[n]
            a4 = rn[n + 1] - lam
            b4 = lam + pn[n + 1]
            dest = n + 1
        am = rm[n] - lam
        bm = lam + pm[n]
        half = 0.5 * hs
        k11 = a1 * y2
        k12 = b1 * y1
        k21 = am * (y2 + half * k12)
        k22 = bm * (y1 + half * k11)
        k31 = am * (y2 + half * k22)
        k32 = bm * (y1 + half * k21)
        k41 = a4 * (y2 + hs * k32)
        k42 = b4 * (y1 + hs * k31)
        y1 = y1 + hs * (k11 + 2.0 * k21 + 2.0 * k31 + k41) / 6.0
        y2 = y2 + hs * (k12 + 2.0 * k22 + 2.0 * k32 + k42) / 6.0
        out[dest, 0] = y1
        out[dest, 1] = y2


def _endpoint_scalar(lams, h, pn, pm, rn, rm, y0, reverse):
    lists = [arr.tolist() for arr in (h, pn, pm, rn, rm)]
    work = np.empty((h.shape[0] + 1, 2))
    last = 0 if reverse else h.shape[0]
    out = np.empty((lams.size, 2))
    for m, lam in enumerate(lams.ravel().tolist()):
        _path_into(work, lam, *lists, float(y0[0]), float(y0[1]), bool(reverse))
        out[m] = work[last]
    return out.reshape(lams.shape + (2,))


def sweep_path_numpy(lam, h, pn, pm, rn, rm, y0, reverse):
    """All node states of a single sweep, ascending in x; shape (N + 1, 2)."""
    out = np.empty((h.shape[0] + 1, 2))
    # plain lists: per-element numpy indexing would dominate the cost
    h, pn, pm, rn, rm = (arr.tolist() for arr in (h, pn, pm, rn, rm))
    _path_into(out, float(lam), h, pn, pm, rn, rm, float(y0[0]), float(y0[1]), bool(reverse))
    return out


# -- numba backend -----------------------------------------------------------

if HAVE_NUMBA:
    _path_into_jit = numba.njit(cache=True)(_path_into)

    @numba.njit(cache=True)
    def _endpoint_many(lams, h, pn, pm, rn, rm, y1, y2, reverse):
        out = np.empty((lams.shape[0], 2))
        work = np.empty((h.shape[0] + 1, 2))
        for m in range(lams.shape[0]):
            _path_into_jit(work, lams[m], h, pn, pm, rn, rm, y1, y2, reverse)
            last = 0 if reverse else h.shape[0]
            out[m, 0] = work[last, 0]
            out[m, 1] = work[last, 1]
        return out

    def sweep_endpoint_numba(lams, h, pn, pm, rn, rm, y0, reverse):
        lams = np.ascontiguousarray(lams, dtype=np.float64).reshape(-1)
        return _endpoint_many(lams, h, pn, pm, rn, rm, float(y0[0]), float(y0[1]), bool(reverse))

    def sweep_path_numba(lam, h, pn, pm, rn, rm, y0, reverse):
        out = np.empty((h.shape[0] + 1, 2))
        _path_into_jit(out, float(lam), h, pn, pm, rn, rm, float(y0[0]), float(y0[1]), bool(reverse))
        return out

else:  # pragma: no cover
    sweep_endpoint_numba = None
    sweep_path_numba = None


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


def sweep_endpoint(lams, h, pn, pm, rn, rm, y0, reverse=False):
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    if USE_NUMBA:
        return sweep_endpoint_numba(lams, h, pn, pm, rn, rm, y0, reverse)
    return sweep_endpoint_numpy(lams, h, pn, pm, rn, rm, y0, reverse)


def sweep_path(lam, h, pn, pm, rn, rm, y0, reverse=False):
    if USE_NUMBA:
        return sweep_path_numba(lam, h, pn, pm, rn, rm, y0, reverse)
    return sweep_path_numpy(lam, h, pn, pm, rn, rm, y0, reverse)
