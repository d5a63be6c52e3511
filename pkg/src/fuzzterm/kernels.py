"""Numeric kernels for batched rule firing.

Two interchangeable implementations live here: numba-compiled loops and a
vectorized numpy fallback.  The environment variable FUZZTERM_DISABLE_NUMBA
(set to 1/true/yes) forces the fallback; it is also used automatically when
numba is not importable.  Both paths share the same branch arithmetic so
results agree to the last ulp in practice.
"""

import os

import numpy as np


def _numba_disabled_by_env() -> bool:
    return os.environ.get("FUZZTERM_DISABLE_NUMBA", "").strip().lower() in {
        "1",
        "true",
        "yes",
    }


NUMBA_ENABLED = False
if not _numba_disabled_by_env():
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - depends on environment
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:

    def njit(*args, **kwargs):
        """No-op stand-in so the kernel definitions below import cleanly."""

        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True)
def _trap_scalar(x, a, b, c, d):
    if x < a:
        return 0.0
    if x < b:
        return (x - a) / (b - a)
    if x <= c:
        return 1.0
    if x < d:
        return (d - x) / (d - c)
    return 0.0


@njit(cache=True)
def _infer_loop(X, trap, ant, cons, m0, m1, out, fired):
    n, n_vars = X.shape
    n_rules = ant.shape[0]
    for i in range(n):
        num = 0.0
        den = 0.0
        for r in range(n_rules):
            t = 1.0
            for v in range(n_vars):
                s = ant[r, v]
                if s >= 0:
                    m = _trap_scalar(X[i, v], trap[s, 0], trap[s, 1], trap[s, 2], trap[s, 3])
                    if m < t:
                        t = m
                    if t == 0.0:
                        break
            if t > 0.0:
                num += t * m1[cons[r]]
                den += t * m0[cons[r]]
        if den > 0.0:
            out[i] = num / den
            fired[i] = True
        else:
            out[i] = 0.0
            fired[i] = False


@njit(cache=True)
def _segment_max_loop(values, offsets, out):
    for i in range(offsets.shape[0] - 1):
        lo = offsets[i]
        hi = offsets[i + 1]
        m = values[lo]
        for j in range(lo + 1, hi):
            if values[j] > m:
                m = values[j]
        out[i] = m


def trapezoid_memberships(x, a, b, c, d):
    """Vectorized membership of `x` in the trapezoid (a, b, c, d)."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    rising = (x >= a) & (x < b)
    if rising.any():
        out[rising] = (x[rising] - a) / (b - a)
    out[(x >= b) & (x <= c)] = 1.0
    falling = (x > c) & (x < d)
    if falling.any():
        out[falling] = (d - x[falling]) / (d - c)
    return out


def _infer_numpy(X, trap, var_of_set, ant, cons, m0, m1):
    n = X.shape[0]
    n_sets = trap.shape[0]
    memberships = np.empty((n, n_sets), dtype=np.float64)
    for s in range(n_sets):
        memberships[:, s] = trapezoid_memberships(
            X[:, var_of_set[s]], trap[s, 0], trap[s, 1], trap[s, 2], trap[s, 3]
        )
    num = np.zeros(n, dtype=np.float64)
    den = np.zeros(n, dtype=np.float64)
    for r in range(ant.shape[0]):
        sets = ant[r][ant[r] >= 0]
        t = memberships[:, sets[0]]
        for s in sets[1:]:
            t = np.minimum(t, memberships[:, s])
        num += t * m1[cons[r]]
        den += t * m0[cons[r]]
    fired = den > 0.0
    out = np.where(fired, num / np.where(fired, den, 1.0), 0.0)
    return out, fired


def batch_infer(X, trap, var_of_set, ant, cons, m0, m1):
    """Fire every rule on every row of X; return (weights, fired).

    X columns follow the system's input-variable order; ant holds a global
    set index per (rule, variable) slot, -1 meaning the variable is absent
    from that rule's antecedent.  Rows where no rule fires get weight 0 and
    fired=False; raising is the caller's call.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    if NUMBA_ENABLED:
        out = np.empty(X.shape[0], dtype=np.float64)
        fired = np.empty(X.shape[0], dtype=np.bool_)
        _infer_loop(X, trap, ant, cons, m0, m1, out, fired)
        return out, fired
    return _infer_numpy(X, trap, var_of_set, ant, cons, m0, m1)


def segment_max(values, offsets):
    """Max of values[offsets[i]:offsets[i+1]] for each segment i."""
    values = np.ascontiguousarray(values, dtype=np.float64)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    n = offsets.shape[0] - 1
    out = np.empty(n, dtype=np.float64)
    if n == 0:
        return out
    if (offsets[1:] <= offsets[:-1]).any():
        raise ValueError("empty or unsorted segment")
    if NUMBA_ENABLED:
        _segment_max_loop(values, offsets, out)
        return out
    return np.maximum.reduceat(values[: offsets[-1]], offsets[:-1])
