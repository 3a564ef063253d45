"""Hot numeric kernels: numba-jitted with pure-numpy fallbacks.

The backend is chosen once at import from MDHT_KERNELS ("numba" or
"numpy", default numba when importable) and can be switched at runtime
with set_backend(), which the benchmark harness uses to compare both.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

_backend = os.environ.get("MDHT_KERNELS", "numba" if HAS_NUMBA else "numpy")


def set_backend(name: str):
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError("backend must be 'numba' or 'numpy'")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba is not available")
    _backend = name


def get_backend() -> str:
    return _backend


# ---------------------------------------------------------------- numpy path

def _sign_dot_numpy(coeffs, reps):
    acc = np.zeros((1,) * len(reps), dtype=np.int64)
    for axis, (c, r) in enumerate(zip(coeffs, reps)):
        shape = [1] * len(reps)
        shape[axis] = len(r)
        acc = acc + c * r.reshape(shape)
    return np.sign(acc).astype(np.int8)


def _max_abs_accumulate_numpy(acc, g):
    np.maximum(acc, np.abs(g), out=acc)
    return acc


# ---------------------------------------------------------------- numba path

if HAS_NUMBA:

    @njit(cache=True)
    def _sign_dot_2d(c0, c1, r0, r1, out):
        for i in range(r0.size):
            a = c0 * r0[i]
            for j in range(r1.size):
                t = a + c1 * r1[j]
                out[i, j] = 0 if t == 0 else (1 if t > 0 else -1)

    @njit(cache=True)
    def _sign_dot_3d(c0, c1, c2, r0, r1, r2, out):
        for i in range(r0.size):
            a = c0 * r0[i]
            for j in range(r1.size):
                b = a + c1 * r1[j]
                for k in range(r2.size):
                    t = b + c2 * r2[k]
                    out[i, j, k] = 0 if t == 0 else (1 if t > 0 else -1)

    @njit(cache=True)
    def _sign_dot_4d(c0, c1, c2, c3, r0, r1, r2, r3, out):
        for i in range(r0.size):
            a = c0 * r0[i]
            for j in range(r1.size):
                b = a + c1 * r1[j]
                for k in range(r2.size):
                    c = b + c2 * r2[k]
                    for l in range(r3.size):
                        t = c + c3 * r3[l]
                        out[i, j, k, l] = 0 if t == 0 else (1 if t > 0 else -1)

    @njit(cache=True)
    def _max_abs_accumulate_numba(acc, g):
        flat_a = acc.ravel()
        flat_g = g.ravel()
        for i in range(flat_a.size):
            v = abs(flat_g[i])
            if v > flat_a[i]:
                flat_a[i] = v


def sign_dot_lattice(coeffs, reps):
    """int8 sign of sum_k coeffs[k] * reps[k][i_k] over the product lattice.

    coeffs are Python ints small enough that all partial sums fit in int64
    (the caller checks); reps are per-axis int64 arrays.
    """
    d = len(reps)
    cs = [np.int64(c) for c in coeffs]
    if _backend == "numba" and 2 <= d <= 4:
        out = np.empty(tuple(r.size for r in reps), dtype=np.int8)
        if d == 2:
            _sign_dot_2d(cs[0], cs[1], reps[0], reps[1], out)
        elif d == 3:
            _sign_dot_3d(cs[0], cs[1], cs[2], reps[0], reps[1], reps[2], out)
        else:
            _sign_dot_4d(cs[0], cs[1], cs[2], cs[3], reps[0], reps[1], reps[2], reps[3], out)
        return out
    return _sign_dot_numpy(cs, reps)


def max_abs_accumulate(acc, g):
    """In-place acc = max(acc, |g|), elementwise."""
    if _backend == "numba":
        _max_abs_accumulate_numba(acc, g)
        return acc
    return _max_abs_accumulate_numpy(acc, g)
