"""Dense truncated Fock-space states and the measurement primitives.

States live on a lattice of per-mode photon numbers 0..cutoff with a fixed
mode count. Amplitude tensors are indexed amp[n1, ..., nM]; when a heralded
mode is present it is by convention the last axis. Subnormalized states are
first class: they carry normalized=False and are never silently renormalized,
because heralding probabilities and fidelities need the raw inner products.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigMismatchError, DegenerateHeraldError, ValidationError

NORM_TOL = 1e-12
HERM_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-10

# Herald probabilities scale like r^(2s) and underflow for tiny r; below this
# floor conditioning is reported as degenerate instead of dividing.
PROB_FLOOR = 1e-300


@dataclass(frozen=True)
class TruncationConfig:
    """Per-mode photon cutoff (inclusive) and mode count."""

    cutoff: int
    modes: int = 1

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValidationError(f"cutoff must be >= 1, got {self.cutoff}")
        if self.modes < 1:
            raise ValidationError(f"modes must be >= 1, got {self.modes}")

    @property
    def dim(self) -> int:
        return self.cutoff + 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.dim,) * self.modes


class FockVector:
    """Pure state on a truncated multimode Fock lattice.

    Parameters
    ----------
    config : TruncationConfig
    amplitudes : array_like, shape config.shape
        Complex amplitudes amp[n1, ..., nM].
    normalized : bool
        Declared normalization. True requires the squared norm to be 1
        within 1e-12; heralded/truncated states pass False.
    leakage : float
        Squared-norm loss accumulated by truncating unitaries, carried
        through subsequent operations for accounting.
    """

    __slots__ = ("config", "amplitudes", "normalized", "leakage")

    def __init__(self, config: TruncationConfig, amplitudes, normalized: bool,
                 leakage: float = 0.0):
        amp = np.ascontiguousarray(amplitudes, dtype=np.complex128)
        if amp.shape != config.shape:
            raise ConfigMismatchError(
                f"amplitude shape {amp.shape} does not match config {config.shape}")
        if not np.all(np.isfinite(amp.view(np.float64))):
            raise ValidationError("non-finite amplitude")
        nsq = float(np.vdot(amp, amp).real)
        if normalized and abs(nsq - 1.0) > NORM_TOL:
            raise ValidationError(
                f"state declared normalized but |norm^2 - 1| = {abs(nsq - 1.0):.3e}")
        self.config = config
        self.amplitudes = amp
        self.normalized = bool(normalized)
        self.leakage = float(leakage)

    @property
    def modes(self) -> int:
        return self.config.modes

    @property
    def cutoff(self) -> int:
        return self.config.cutoff

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def to_json_dict(self) -> dict:
        """Sparse JSON form: entries [n1, ..., nM, re, im] for nonzero amps."""
        entries = []
        flat = self.amplitudes.ravel()
        nz = np.nonzero(flat)[0]
        for k in nz:
            idx = np.unravel_index(k, self.config.shape)
            a = flat[k]
            entries.append([int(i) for i in idx] + [float(a.real), float(a.imag)])
        return {
            "cutoff": self.config.cutoff,
            "modes": self.config.modes,
            "normalized": self.normalized,
            "leakage": self.leakage,
            "entries": entries,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "FockVector":
        config = TruncationConfig(int(d["cutoff"]), int(d["modes"]))
        amp = np.zeros(config.shape, dtype=np.complex128)
        for row in d["entries"]:
            idx = tuple(int(i) for i in row[:-2])
            amp[idx] = complex(row[-2], row[-1])
        return cls(config, amp, bool(d["normalized"]), float(d.get("leakage", 0.0)))

    def __repr__(self):
        return (f"FockVector(cutoff={self.cutoff}, modes={self.modes}, "
                f"norm_sq={self.norm_sq():.6g}, normalized={self.normalized})")


class FockDensity:
    """Single-mode density matrix on the truncated space.

    Construction validates hermiticity (1e-12), positive semidefiniteness
    (min eigenvalue >= -1e-10) and, when declared_trace is given, the trace
    (1e-10). Heralded subnormalized densities declare their trace P.
    """

    __slots__ = ("cutoff", "matrix", "trace")

    def __init__(self, matrix, declared_trace: float | None = None):
        m = np.ascontiguousarray(matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"density matrix must be square, got {m.shape}")
        if not np.all(np.isfinite(m.view(np.float64))):
            raise ValidationError("non-finite density matrix entry")
        scale = max(1.0, float(np.abs(m).max()))
        asym = float(np.abs(m - m.conj().T).max())
        if asym > HERM_TOL * scale:
            raise ValidationError(f"density not Hermitian: asymmetry {asym:.3e}")
        m = 0.5 * (m + m.conj().T)
        w = np.linalg.eigvalsh(m)
        if w[0] < -PSD_TOL:
            raise ValidationError(f"density not PSD: min eigenvalue {w[0]:.3e}")
        tr = float(np.trace(m).real)
        if declared_trace is not None and abs(tr - declared_trace) > TRACE_TOL:
            raise ValidationError(
                f"trace {tr:.12g} differs from declared {declared_trace:.12g}")
        self.cutoff = m.shape[0] - 1
        self.matrix = m
        self.trace = tr

    @classmethod
    def from_pure(cls, psi: FockVector) -> "FockDensity":
        if psi.modes != 1:
            raise ValidationError("from_pure expects a single-mode state")
        a = psi.amplitudes
        return cls(np.outer(a, a.conj()))

    def to_json_dict(self) -> dict:
        entries = []
        for i in range(self.cutoff + 1):
            for j in range(self.cutoff + 1):
                v = self.matrix[i, j]
                if v != 0:
                    entries.append([i, j, float(v.real), float(v.imag)])
        return {"cutoff": self.cutoff, "trace": self.trace, "entries": entries}

    @classmethod
    def from_json_dict(cls, d: dict) -> "FockDensity":
        dim = int(d["cutoff"]) + 1
        m = np.zeros((dim, dim), dtype=np.complex128)
        for i, j, re, im in d["entries"]:
            m[int(i), int(j)] = complex(re, im)
        return cls(m)

    def __repr__(self):
        return f"FockDensity(cutoff={self.cutoff}, trace={self.trace:.6g})"


def tensor_product(a: FockVector, b: FockVector) -> FockVector:
    """Joint state with a's modes first, then b's. Norm multiplies."""
    if a.cutoff != b.cutoff:
        raise ConfigMismatchError(
            f"cutoff mismatch: {a.cutoff} vs {b.cutoff}")
    config = TruncationConfig(a.cutoff, a.modes + b.modes)
    amp = np.tensordot(a.amplitudes, b.amplitudes, axes=0)
    return FockVector(config, amp, a.normalized and b.normalized,
                      leakage=a.leakage + b.leakage)


def inner_product(a: FockVector, b: FockVector) -> complex:
    """<a|b> with conjugation on a."""
    if a.config != b.config:
        raise ConfigMismatchError(f"config mismatch: {a.config} vs {b.config}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity_pure(rho: FockDensity, psi: FockVector) -> float:
    """<psi|rho|psi> / trace(rho) for a normalized single-mode pure target."""
    if psi.modes != 1:
        raise ValidationError("fidelity target must be single-mode")
    if not psi.normalized:
        raise ValidationError("fidelity target must be normalized")
    if psi.cutoff != rho.cutoff:
        raise ConfigMismatchError(
            f"cutoff mismatch: state {psi.cutoff} vs density {rho.cutoff}")
    if abs(rho.trace) < PROB_FLOOR:
        raise DegenerateHeraldError("zero-trace density in fidelity")
    a = psi.amplitudes
    val = float(np.real(a.conj() @ rho.matrix @ a)) / rho.trace
    # exact arithmetic gives [0,1]; clip fp dust only
    return float(min(max(val, 0.0), 1.0))


def project_pattern(state: FockVector, detected: dict[int, int]) -> FockVector:
    """Slice the amplitude tensor at fixed photon counts on some modes.

    Returns the (subnormalized) state of the remaining modes, in their
    original order. Its squared norm is the probability of detecting
    exactly the given counts with ideal number-resolving detectors.
    """
    if not detected:
        return state
    modes = state.modes
    for mode, count in detected.items():
        if not 0 <= mode < modes:
            raise ValidationError(f"mode {mode} out of range for {modes} modes")
        if not 0 <= count <= state.cutoff:
            raise ValidationError(
                f"count {count} outside [0, {state.cutoff}] on mode {mode}")
    remaining = [m for m in range(modes) if m not in detected]
    if not remaining:
        raise ValidationError("projection must leave at least one mode")
    index = tuple(
        detected[m] if m in detected else slice(None) for m in range(modes))
    amp = state.amplitudes[index]
    config = TruncationConfig(state.cutoff, len(remaining))
    return FockVector(config, amp, normalized=False, leakage=state.leakage)


def conditional_density(state: FockVector, povm_per_mode, kept_mode: int
                        ) -> tuple[FockDensity, float]:
    """Condition on POVM outcomes on all modes except one.

    Parameters
    ----------
    state : FockVector
    povm_per_mode : sequence of (dim, dim) Hermitian PSD matrices
        One element per non-kept mode, in increasing mode order.
    kept_mode : int

    Returns
    -------
    (rho, p) : the kept mode's conditional density normalized to trace 1,
        and the outcome probability p = <Psi|(tensor E (x) I)|Psi>.
    """
    modes = state.modes
    if not 0 <= kept_mode < modes:
        raise ValidationError(f"kept_mode {kept_mode} out of range")
    others = [m for m in range(modes) if m != kept_mode]
    povms = list(povm_per_mode)
    if len(povms) != len(others):
        raise ValidationError(
            f"need {len(others)} POVM elements, got {len(povms)}")
    dim = state.config.dim

    phi = state.amplitudes
    for mode, e in zip(others, povms):
        e = np.asarray(e, dtype=np.complex128)
        if e.shape != (dim, dim):
            raise ValidationError(f"POVM element shape {e.shape} != ({dim},{dim})")
        if np.abs(e - e.conj().T).max() > HERM_TOL * max(1.0, np.abs(e).max()):
            raise ValidationError("POVM element not Hermitian")
        if np.linalg.eigvalsh(0.5 * (e + e.conj().T))[0] < -PSD_TOL:
            raise ValidationError("POVM element not PSD")
        # contract E_mode onto the mode's axis, keeping axis order
        phi = np.moveaxis(np.tensordot(e, phi, axes=(1, mode)), 0, mode)

    rest = tuple(others)
    raw = np.tensordot(phi, state.amplitudes.conj(), axes=(rest, rest))
    p = float(np.trace(raw).real)
    if p < PROB_FLOOR:
        raise DegenerateHeraldError(
            f"conditioning probability {p:.3e} below floor {PROB_FLOOR:.0e}")
    rho = 0.5 * (raw + raw.conj().T) / p
    return FockDensity(rho, declared_trace=1.0), p


def pad_to_cutoff(state: FockVector, cutoff: int) -> FockVector:
    """Embed into a space with a larger per-mode cutoff, zero-padding."""
    if cutoff < state.cutoff:
        raise ValidationError(
            f"cannot pad to smaller cutoff {cutoff} < {state.cutoff}")
    if cutoff == state.cutoff:
        return state
    config = TruncationConfig(cutoff, state.modes)
    amp = np.zeros(config.shape, dtype=np.complex128)
    amp[tuple(slice(0, state.config.dim) for _ in range(state.modes))] = \
        state.amplitudes
    return FockVector(config, amp, state.normalized, leakage=state.leakage)


def vacuum_state(cutoff: int, modes: int = 1) -> FockVector:
    config = TruncationConfig(cutoff, modes)
    amp = np.zeros(config.shape, dtype=np.complex128)
    amp[(0,) * modes] = 1.0
    return FockVector(config, amp, normalized=True)


def number_state(n: int, cutoff: int) -> FockVector:
    if not 0 <= n <= cutoff:
        raise ValidationError(f"n={n} outside [0, {cutoff}]")
    amp = np.zeros(cutoff + 1, dtype=np.complex128)
    amp[n] = 1.0
    return FockVector(TruncationConfig(cutoff, 1), amp, normalized=True)
