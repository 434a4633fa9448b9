"""Hot numerical kernels with a JIT-compiled and a plain numpy backend.

The phase-space sweeps evaluate the Fock Wigner kernel at millions of
points, so the point loop is JIT-compiled when numba is importable.
Setting the environment variable PBSIM_NO_NUMBA to any non-empty value
forces the vectorized numpy implementation instead; both backends share
the same recurrences and agree to floating-point roundoff.

Kernel, in the hbar = 1/2 convention (vacuum peak 2/pi):

    W(q,p) = sum_{m,n} rho[m,n] K[m,n](q,p)
    K[m,n] = (2/pi) (-1)^n sqrt(n!/m!) (2(q+ip))^(m-n)
             exp(-2 r^2) L_n^(m-n)(4 r^2),   m >= n, r^2 = q^2 + p^2

with K[n,m] the conjugate. Hermiticity of rho folds the upper triangle
into twice the real part of the lower one.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    import numba

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and not os.environ.get("PBSIM_NO_NUMBA")


def backend() -> str:
    """Name of the kernel backend selected at import time."""
    return "numba" if USE_NUMBA else "numpy"


_COEF_CACHE: dict[int, np.ndarray] = {}


def kernel_coefficients(dim: int) -> np.ndarray:
    """Lower-triangular table c[m, n] = (2/pi) (-1)^n sqrt(n!/m!)."""
    cached = _COEF_CACHE.get(dim)
    if cached is not None:
        return cached
    c = np.zeros((dim, dim))
    for n in range(dim):
        base = (2.0 / np.pi) * (-1.0) ** n
        c[n, n] = base
        for m in range(n + 1, dim):
            base /= np.sqrt(m)
            c[m, n] = base
    _COEF_CACHE[dim] = c
    return c


def wigner_batch_numpy(rho: np.ndarray, coef: np.ndarray,
                       qs: np.ndarray, ps: np.ndarray) -> np.ndarray:
    """Vectorized-over-points evaluation of W at (qs, ps)."""
    r2 = qs * qs + ps * ps
    x = 4.0 * r2
    env = np.exp(-2.0 * r2)
    z = 2.0 * (qs + 1j * ps)
    dim = rho.shape[0]
    acc = np.zeros(r2.shape)
    zd = np.ones(r2.shape, dtype=np.complex128)
    for d in range(dim):
        # Laguerre L_n^(d)(x) by upward recurrence in n
        lprev = np.zeros(r2.shape)
        lcur = np.ones(r2.shape)
        ssum = np.zeros(r2.shape, dtype=np.complex128)
        for n in range(dim - d):
            m = n + d
            ssum = ssum + (rho[m, n] * coef[m, n]) * lcur
            lnext = ((2 * n + 1 + d - x) * lcur - (n + d) * lprev) / (n + 1)
            lprev = lcur
            lcur = lnext
        contrib = (ssum * zd).real
        acc += contrib if d == 0 else 2.0 * contrib
        zd = zd * z
    return acc * env


def _wigner_batch_serial(rho, coef, qs, ps):
    npts = qs.shape[0]
    dim = rho.shape[0]
    out = np.empty(npts)
    for i in range(npts):
        q = qs[i]
        p = ps[i]
        r2 = q * q + p * p
        x = 4.0 * r2
        z = 2.0 * (q + 1j * p)
        acc = 0.0
        zd = 1.0 + 0.0j
        for d in range(dim):
            lprev = 0.0
            lcur = 1.0
            ssum = 0.0 + 0.0j
            for n in range(dim - d):
                m = n + d
                ssum += rho[m, n] * coef[m, n] * lcur
                lnext = ((2 * n + 1 + d - x) * lcur - (n + d) * lprev) / (n + 1)
                lprev = lcur
                lcur = lnext
            c = (ssum * zd).real
            acc += c if d == 0 else 2.0 * c
            zd *= z
        out[i] = acc * math.exp(-2.0 * r2)
    return out


if HAS_NUMBA:
    _wigner_batch_jit = numba.njit(cache=True, fastmath=False)(
        _wigner_batch_serial)
else:  # pragma: no cover - exercised only without numba installed
    _wigner_batch_jit = _wigner_batch_serial


def wigner_batch(rho: np.ndarray, qs: np.ndarray, ps: np.ndarray) -> np.ndarray:
    """W at each point, dispatching to the selected backend.

    rho must be Hermitian; only its lower triangle is read.
    """
    rho = np.ascontiguousarray(rho, dtype=np.complex128)
    coef = kernel_coefficients(rho.shape[0])
    qs = np.ascontiguousarray(qs, dtype=np.float64).ravel()
    ps = np.ascontiguousarray(ps, dtype=np.float64).ravel()
    if qs.shape != ps.shape:
        raise ValueError("qs and ps must have equal length")
    if USE_NUMBA:
        return _wigner_batch_jit(rho, coef, qs, ps)
    return wigner_batch_numpy(rho, coef, qs, ps)
