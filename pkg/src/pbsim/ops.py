"""Circuit elements on truncated Fock states.

Beam splitters, displacements, two-mode squeezed vacuum, phase plates and
the inefficient-detector POVM. Beam splitters act by substituting creation
operators with row combinations of the 2x2 matrix,

    a_i+ -> u00 a_i+ + u01 a_j+,   a_j+ -> u10 a_i+ + u11 a_j+,

and expanding binomially, which is exact within each total-photon block.
With the 50-50 matrix [[1/sqrt2, -1/sqrt2], [1/sqrt2, 1/sqrt2]] this sends
|1,0> to (|1,0> - |0,1>)/sqrt2. Photon blocks whose redistribution exceeds
the cutoff are truncated and the lost squared norm is recorded as leakage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import ValidationError
from .fock import NORM_TOL, FockVector, TruncationConfig

UNITARITY_TOL = 1e-12


@dataclass(frozen=True)
class TwoModeUnitary:
    """2x2 unitary mixing a mode pair."""

    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=np.complex128)
        if u.shape != (2, 2):
            raise ValidationError(f"expected 2x2 matrix, got {u.shape}")
        err = np.abs(u.conj().T @ u - np.eye(2)).max()
        if err > UNITARITY_TOL:
            raise ValidationError(f"matrix not unitary: |U+U - I| = {err:.3e}")
        object.__setattr__(self, "u", u)

    @property
    def dagger(self) -> "TwoModeUnitary":
        return TwoModeUnitary(self.u.conj().T)


@dataclass(frozen=True)
class DetectorPovm:
    """Two-outcome POVM {E, I-E} of a click detector with efficiency eta.

    E is diagonal with E[0,0] = 0 and E[k,k] = eta*(1-eta)^(k-1) for k >= 1.
    tail_weight bounds the probability weight of the discarded k > cutoff
    part, (1-eta)^cutoff.
    """

    eta: float
    cutoff: int
    click: np.ndarray
    no_click: np.ndarray
    tail_weight: float


def beam_splitter_pb(k: int, s: int) -> TwoModeUnitary:
    """The k-th splitter of the s-mode distribution cascade.

    Transmits sqrt((s-k)/(s-k+1)); at k = s-1 this is the 50-50 splitter.
    """
    if not 1 <= k <= s - 1:
        raise ValidationError(f"require 1 <= k <= s-1, got k={k}, s={s}")
    t = np.sqrt((s - k) / (s - k + 1.0))
    r = 1.0 / np.sqrt(s - k + 1.0)
    return TwoModeUnitary(np.array([[t, -r], [r, t]], dtype=np.complex128))


def beam_splitter_5050() -> TwoModeUnitary:
    r = 1.0 / np.sqrt(2.0)
    return TwoModeUnitary(np.array([[r, -r], [r, r]], dtype=np.complex128))


def _binom_table(n: int) -> np.ndarray:
    c = np.zeros((n + 1, n + 1))
    c[:, 0] = 1.0
    for i in range(1, n + 1):
        for j in range(1, i + 1):
            c[i, j] = c[i - 1, j - 1] + c[i - 1, j]
    return c


_TRANSFER_CACHE: dict[tuple[bytes, int], np.ndarray] = {}


def _transfer_tensor(u: np.ndarray, cutoff: int) -> np.ndarray:
    """T[m, n, a, b]: amplitude of |a,b> in the image of |m,n>.

    From the creation-operator substitution, with b = m+n-a,

        T = sqrt(a! b! / (m! n!)) * sum_x C(m,x) C(n,a-x)
            u00^x u01^(m-x) u10^(a-x) u11^(n-a+x)

    and zero when a+b != m+n. Entries with b > cutoff are dropped; those
    are exactly the truncation leakage.
    """
    key = (u.tobytes(), cutoff)
    cached = _TRANSFER_CACHE.get(key)
    if cached is not None:
        return cached
    dim = cutoff + 1
    binom = _binom_table(cutoff)
    fact = np.cumprod(np.concatenate(([1.0], np.arange(1, dim))))
    p00, p01, p10, p11 = (np.power(u[i, j], np.arange(dim))
                          for i, j in ((0, 0), (0, 1), (1, 0), (1, 1)))

    mm, nn, aa = np.meshgrid(np.arange(dim), np.arange(dim), np.arange(dim),
                             indexing="ij")
    bb = mm + nn - aa
    ok = (bb >= 0) & (bb <= cutoff)
    acc = np.zeros((dim, dim, dim), dtype=np.complex128)
    for x in range(dim):
        yy = aa - x
        sel = ok & (x <= mm) & (yy >= 0) & (yy <= nn)
        if not sel.any():
            continue
        mi, ni, yi = mm[sel], nn[sel], yy[sel]
        acc[sel] += (binom[mi, x] * binom[ni, yi]
                     * p00[x] * p01[mi - x] * p10[yi] * p11[ni - yi])

    norm = np.zeros((dim, dim, dim))
    norm[ok] = np.sqrt(fact[aa[ok]] * fact[bb[ok]]
                       / (fact[mm[ok]] * fact[nn[ok]]))
    T = np.zeros((dim, dim, dim, dim), dtype=np.complex128)
    T[mm[ok], nn[ok], aa[ok], bb[ok]] = (acc * norm)[ok]
    if len(_TRANSFER_CACHE) > 64:
        _TRANSFER_CACHE.clear()
    _TRANSFER_CACHE[key] = T
    return T


def apply_two_mode_unitary(state: FockVector, modes: tuple[int, int],
                           u: TwoModeUnitary) -> FockVector:
    """Mix two modes of a state through a 2x2 unitary.

    Photon number within the pair is conserved; components redistributed
    above the cutoff are dropped and their squared norm added to the
    state's leakage.
    """
    i, j = modes
    if i == j:
        raise ValidationError("modes must be distinct")
    for m in (i, j):
        if not 0 <= m < state.modes:
            raise ValidationError(f"mode {m} out of range for {state.modes} modes")
    T = _transfer_tensor(u.u, state.cutoff)
    amp = np.moveaxis(state.amplitudes, (i, j), (-2, -1))
    out = np.tensordot(amp, T, axes=([-2, -1], [0, 1]))
    out = np.moveaxis(out, (-2, -1), (i, j))
    nsq_in = state.norm_sq()
    nsq_out = float(np.vdot(out, out).real)
    delta = max(0.0, nsq_in - nsq_out)
    normalized = state.normalized and abs(nsq_out - 1.0) <= NORM_TOL
    return FockVector(state.config, out, normalized,
                      leakage=state.leakage + delta)


def tmsv(q: float, cutoff: int, max_terms: int | None = None) -> FockVector:
    """Two-mode squeezed vacuum sqrt(1-q^2) sum q^n |n,n>, q = tanh r.

    Truncation keeps n <= cutoff, and optionally only the first max_terms
    terms. For q > 0 the kept state is subnormalized with squared norm
    1 - q^(2 nkept); it is returned as is, never renormalized.
    """
    if not 0.0 <= q < 1.0:
        raise ValidationError(f"require 0 <= q < 1, got {q}")
    config = TruncationConfig(cutoff, 2)
    nkeep = config.dim if max_terms is None else min(config.dim, max_terms)
    if nkeep < 1:
        raise ValidationError("max_terms must keep at least the vacuum term")
    amp = np.zeros(config.shape, dtype=np.complex128)
    n = np.arange(nkeep)
    amp[n, n] = np.sqrt(1.0 - q * q) * q ** n
    nsq = float(np.vdot(amp, amp).real)
    return FockVector(config, amp, normalized=abs(nsq - 1.0) <= NORM_TOL)


def displacement_op(alpha: complex, cutoff: int, scheme: str = "exact",
                    order: int = 5) -> np.ndarray:
    """Displacement matrix on the truncated space.

    scheme "exact": matrix exponential of alpha*a+ - conj(alpha)*a restricted
    to the truncated space (exactly unitary there, since the restricted
    generator stays anti-Hermitian). scheme "series": the Taylor polynomial
    of the same generator up to the given order, matching a source that
    truncates the displacement sum.
    """
    dim = cutoff + 1
    n = np.arange(1, dim)
    adag = np.zeros((dim, dim), dtype=np.complex128)
    adag[n, n - 1] = np.sqrt(n)
    g = alpha * adag - np.conj(alpha) * adag.conj().T
    if scheme == "exact":
        return expm(g)
    if scheme == "series":
        if order < 1:
            raise ValidationError(f"series order must be >= 1, got {order}")
        out = np.eye(dim, dtype=np.complex128)
        term = np.eye(dim, dtype=np.complex128)
        for k in range(1, order + 1):
            term = term @ g / k
            out = out + term
        return out
    raise ValidationError(f"unknown displacement scheme {scheme!r}")


def apply_single_mode_op(state: FockVector, mode: int, op: np.ndarray,
                         track_leakage: bool = False) -> FockVector:
    """Apply a (dim, dim) matrix to one mode. General op, so the output
    normalization is recomputed rather than assumed."""
    if not 0 <= mode < state.modes:
        raise ValidationError(f"mode {mode} out of range")
    op = np.asarray(op, dtype=np.complex128)
    dim = state.config.dim
    if op.shape != (dim, dim):
        raise ValidationError(f"operator shape {op.shape} != ({dim},{dim})")
    out = np.moveaxis(np.tensordot(op, state.amplitudes, axes=(1, mode)), 0, mode)
    nsq = float(np.vdot(out, out).real)
    leak = state.leakage
    if track_leakage:
        leak += max(0.0, state.norm_sq() - nsq)
    return FockVector(state.config, out, abs(nsq - 1.0) <= NORM_TOL
                      and state.normalized, leakage=leak)


def phase_plate(state: FockVector, mode: int, theta: float) -> FockVector:
    """Multiply the photon-number-n amplitude in `mode` by exp(-i n theta).

    Setting theta = -phi maps the phase-0 eigenstate family to phase phi.
    """
    if not 0 <= mode < state.modes:
        raise ValidationError(f"mode {mode} out of range")
    phases = np.exp(-1j * theta * np.arange(state.config.dim))
    shape = [1] * state.modes
    shape[mode] = state.config.dim
    amp = state.amplitudes * phases.reshape(shape)
    return FockVector(state.config, amp, state.normalized, leakage=state.leakage)


def detector_povm(eta: float, cutoff: int) -> DetectorPovm:
    """Click/no-click POVM of an inefficient detector.

    Click weight for k photons is eta*(1-eta)^(k-1), vacuum never clicks.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValidationError(f"require 0 <= eta <= 1, got {eta}")
    dim = cutoff + 1
    k = np.arange(dim, dtype=float)
    diag = np.zeros(dim)
    diag[1:] = eta * (1.0 - eta) ** (k[1:] - 1.0)
    click = np.diag(diag).astype(np.complex128)
    no_click = np.eye(dim, dtype=np.complex128) - click
    return DetectorPovm(eta=float(eta), cutoff=cutoff, click=click,
                        no_click=no_click, tail_weight=float((1.0 - eta) ** cutoff))
