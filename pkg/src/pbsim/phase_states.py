"""Phase eigenstates on a finite Fock ladder.

For order s the s+1 states

    |phi_m> = (s+1)^(-1/2) sum_{n=0}^{s} exp(i n phi_m) |n>,
    phi_m = phi0 + 2 pi m / (s+1),

form an orthonormal basis of the (s+1)-dimensional space. They are the
eigenstates of the phase operator sum_m phi_m |phi_m><phi_m|. All
amplitudes have equal weight (s+1)^(-1/2).
"""

from __future__ import annotations

import numpy as np

from .errors import CutoffError, ValidationError
from .fock import FockVector, TruncationConfig


def _check_order(s: int) -> None:
    if not isinstance(s, (int, np.integer)) or isinstance(s, bool):
        raise ValidationError(f"order must be an integer, got {s!r}")
    if s < 1:
        raise ValidationError(f"order must be >= 1, got {s}")


def phase_value(s: int, m: int, phi0: float = 0.0) -> float:
    """The m-th eigenphase phi0 + 2 pi m / (s+1)."""
    _check_order(s)
    if not 0 <= m <= s:
        raise ValidationError(f"require 0 <= m <= s, got m={m}, s={s}")
    return float(phi0 + 2.0 * np.pi * m / (s + 1))


def phase_state(s: int, phi: float, cutoff: int | None = None) -> FockVector:
    """Equal-weight state (s+1)^(-1/2) sum_n exp(i n phi) |n>, n = 0..s.

    cutoff defaults to s (the smallest space that holds the state); a
    larger cutoff pads with zeros, a smaller one raises CutoffError.
    """
    _check_order(s)
    if cutoff is None:
        cutoff = s
    if cutoff < s:
        raise CutoffError(f"cutoff {cutoff} cannot hold photon numbers up to {s}")
    config = TruncationConfig(cutoff, 1)
    amp = np.zeros(config.shape, dtype=np.complex128)
    n = np.arange(s + 1)
    amp[: s + 1] = np.exp(1j * n * phi) / np.sqrt(s + 1.0)
    return FockVector(config, amp, normalized=True)


def pb_eigenstate(s: int, m: int, phi0: float = 0.0,
                  cutoff: int | None = None) -> FockVector:
    """The m-th phase eigenstate of order s with offset phi0."""
    return phase_state(s, phase_value(s, m, phi0), cutoff)


def pb_phase_operator(s: int, phi0: float = 0.0,
                      cutoff: int | None = None) -> np.ndarray:
    """Hermitian phase operator sum_m phi_m |phi_m><phi_m|.

    Returned as a dense (cutoff+1, cutoff+1) matrix; photon numbers above
    s lie in its kernel.
    """
    _check_order(s)
    if cutoff is None:
        cutoff = s
    if cutoff < s:
        raise CutoffError(f"cutoff {cutoff} cannot hold photon numbers up to {s}")
    dim = cutoff + 1
    op = np.zeros((dim, dim), dtype=np.complex128)
    for m in range(s + 1):
        v = pb_eigenstate(s, m, phi0, cutoff).amplitudes
        op += phase_value(s, m, phi0) * np.outer(v, v.conj())
    return op
