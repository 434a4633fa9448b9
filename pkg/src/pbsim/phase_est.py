"""Interference statistics at a 50-50 splitter and the estimators on top.

A reference equal-weight phase state meets the unknown state at a 50-50
beam splitter; the joint photon-number distribution at the two outputs
carries the phase information. estimate_phase inverts the single-photon
contrast; estimate_coefficients fits a full superposition by penalized
least squares on empirical frequencies. Both also accept exact
probability tables (fractional pseudo-counts, trials = 1).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (CutoffError, LowInformationError, RankDeficiencyWarning,
                     ValidationError)
from .fock import FockVector, pad_to_cutoff, tensor_product
from .ops import apply_two_mode_unitary, beam_splitter_5050
from .phase_states import phase_state, phase_value

_SUM_TOL = 1e-10
_CLAMP_TOL = 1e-14


def _wrap_angle(x: float) -> float:
    """Wrap to (-pi, pi]."""
    y = math.remainder(x, 2.0 * math.pi)
    return math.pi if y == -math.pi else y


@dataclass(frozen=True)
class OutcomeDistribution:
    """Joint photon-count probabilities P(n1, n2) on a (2s+1)^2 grid."""

    s: int
    probs: np.ndarray

    def __post_init__(self):
        if self.s < 0:
            raise ValidationError(f"s must be >= 0, got {self.s}")
        p = np.asarray(self.probs, dtype=np.float64)
        dim = 2 * self.s + 1
        if p.shape != (dim, dim):
            raise ValidationError(
                f"probability grid shape {p.shape} != ({dim}, {dim})")
        if p.min() < -_CLAMP_TOL:
            raise ValidationError(f"negative probability {p.min():.3e}")
        p = np.where(p < 0.0, 0.0, p)
        if abs(p.sum() - 1.0) > _SUM_TOL:
            raise ValidationError(
                f"probabilities sum to {p.sum():.12f}, not 1")
        object.__setattr__(self, "probs", p)

    def prob(self, n1: int, n2: int) -> float:
        return float(self.probs[n1, n2])


@dataclass(frozen=True)
class CountTable:
    """Observed (or exact, fractional) counts on the outcome grid.

    Sampled tables carry integer-valued counts and the generator seed;
    exact tables built by from_exact hold the probabilities themselves
    with trials = 1 and no seed.
    """

    counts: np.ndarray
    trials: float
    rng_seed: int | None = None

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.float64)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] % 2 == 0:
            raise ValidationError(
                f"counts must be a (2s+1, 2s+1) grid, got {c.shape}")
        if c.min() < 0:
            raise ValidationError("negative count")
        if self.trials <= 0:
            raise ValidationError(f"trials must be positive, got {self.trials}")
        if abs(c.sum() - self.trials) > 1e-9 * max(1.0, self.trials):
            raise ValidationError(
                f"counts sum {c.sum():g} != trials {self.trials:g}")
        object.__setattr__(self, "counts", c)

    @classmethod
    def from_exact(cls, dist: OutcomeDistribution) -> "CountTable":
        return cls(counts=dist.probs.copy(), trials=1.0, rng_seed=None)

    @property
    def s(self) -> int:
        return (self.counts.shape[0] - 1) // 2

    def frequencies(self) -> np.ndarray:
        return self.counts / self.trials


@dataclass(frozen=True)
class SuperpositionCoeffs:
    """Gauge-fixed coefficients of sum_k c_k |phi_k>_s.

    The global phase is fixed by making c_0 real and nonnegative; the
    vector is normalized. note records identifiability caveats (for
    example an undetermined relative phase at a boundary).
    """

    s: int
    c: np.ndarray
    note: str = ""

    def __post_init__(self):
        v = np.asarray(self.c, dtype=np.complex128)
        if v.shape != (self.s + 1,):
            raise ValidationError(
                f"need {self.s + 1} coefficients, got shape {v.shape}")
        if abs(float(np.vdot(v, v).real) - 1.0) > 1e-12:
            raise ValidationError("coefficients not normalized")
        if abs(v[0].imag) > 1e-12 or v[0].real < -1e-12:
            raise ValidationError("gauge requires c_0 real and >= 0")
        object.__setattr__(self, "c", v)


def gauge_fixed(c, s: int, note: str = "") -> SuperpositionCoeffs:
    """Normalize and rotate a raw coefficient vector into the gauge."""
    v = np.asarray(c, dtype=np.complex128).copy()
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ValidationError("zero coefficient vector")
    v /= norm
    pivot = v[0]
    if abs(pivot) < 1e-15:
        nz = np.nonzero(np.abs(v) > 1e-15)[0]
        pivot = v[nz[0]]
    v *= np.exp(-1j * np.angle(pivot))
    v[0] = complex(v[0].real if abs(v[0]) > 1e-15 else 0.0, 0.0)
    v /= float(np.linalg.norm(v))
    return SuperpositionCoeffs(s=s, c=v, note=note)


def _support_top(state: FockVector) -> int:
    amp = np.abs(state.amplitudes)
    nz = np.nonzero(amp > 1e-14 * max(amp.max(), 1e-300))[0]
    return int(nz[-1]) if nz.size else 0


def interference_probs(left: FockVector, right: FockVector,
                       cutoff: int | None = None) -> OutcomeDistribution:
    """Exact joint output distribution of a 50-50 beam splitter.

    The working cutoff defaults to the summed photon support of the two
    inputs, which makes the mixing exact; an explicit smaller cutoff is
    rejected rather than silently truncated.
    """
    for st, name in ((left, "left"), (right, "right")):
        if st.modes != 1:
            raise ValidationError(f"{name} input must be single-mode")
        if not st.normalized:
            raise ValidationError(f"{name} input must be normalized")
    n_l = _support_top(left)
    n_r = _support_top(right)
    needed = max(1, n_l + n_r)
    if cutoff is None:
        cutoff = needed
    elif cutoff < needed:
        raise CutoffError(
            f"cutoff {cutoff} cannot hold the {needed}-photon outcomes")
    joint = tensor_product(pad_to_cutoff(left, cutoff),
                           pad_to_cutoff(right, cutoff))
    out = apply_two_mode_unitary(joint, (0, 1), beam_splitter_5050())
    probs = np.abs(out.amplitudes) ** 2
    s_dist = max(n_l, n_r)
    dim = 2 * s_dist + 1
    grid = np.zeros((dim, dim))
    lim = min(dim, cutoff + 1)
    grid[:lim, :lim] = probs[:lim, :lim]
    if probs.sum() - grid.sum() > 1e-12:
        raise CutoffError(
            f"{probs.sum() - grid.sum():.3e} probability beyond the "
            f"(2s)-photon grid")
    return OutcomeDistribution(s=s_dist, probs=grid)


def superposition_state(coeffs: SuperpositionCoeffs,
                        phi0: float = 0.0) -> FockVector:
    """Fock-basis form of sum_k c_k |phi_k>_s."""
    s = coeffs.s
    n = np.arange(s + 1)
    phases = np.array([phase_value(s, k, phi0) for k in range(s + 1)])
    basis = np.exp(1j * np.outer(n, phases)) / np.sqrt(s + 1.0)
    amp = basis @ coeffs.c
    from .fock import TruncationConfig

    return FockVector(TruncationConfig(s, 1), amp, normalized=True)


def superposition_probs(phi_j: float, coeffs: SuperpositionCoeffs,
                        phi0: float = 0.0) -> OutcomeDistribution:
    """Distribution for reference |phi(phi_j)>_s against the superposition."""
    s = coeffs.s
    left = phase_state(s, phi_j)
    right = superposition_state(coeffs, phi0)
    return interference_probs(left, right)


def sample_outcomes(dist: OutcomeDistribution, trials: int,
                    seed: int) -> CountTable:
    """Multinomial sample of the outcome grid, reproducible by seed.

    Uses the PCG64 generator; identical (dist, trials, seed) triples give
    identical tables on any platform.
    """
    if not isinstance(trials, (int, np.integer)) or trials < 1:
        raise ValidationError(f"trials must be a positive integer, got {trials}")
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    p = dist.probs.ravel()
    counts = rng.multinomial(int(trials), p / p.sum())
    return CountTable(counts=counts.reshape(dist.probs.shape).astype(float),
                      trials=float(trials), rng_seed=int(seed))


@dataclass(frozen=True)
class PhaseEstimate:
    phi_k: float
    stderr: float
    candidates: tuple
    informative_counts: float


def _contrast(table: CountTable) -> tuple[float, float]:
    n10 = float(table.counts[1, 0])
    n01 = float(table.counts[0, 1])
    total = n10 + n01
    if total <= 0.0:
        raise LowInformationError(
            "no counts in the (1,0)/(0,1) cells; the contrast estimator "
            "needs single-photon events (increase trials or adjust the "
            "reference phase)")
    c = (n10 - n01) / total
    return float(np.clip(c, -1.0, 1.0)), total


def estimate_phase(counts: CountTable, phi_j: float, s: int,
                   aux: tuple[float, CountTable] | None = None
                   ) -> PhaseEstimate:
    """Phase of the unknown input from the single-photon contrast.

    The contrast (N(1,0) - N(0,1)) / (N(1,0) + N(0,1)) estimates
    cos(phi_j - phi_k). With one setting the sign of the difference is
    unresolvable, so both candidates are returned; a second reference
    setting (aux) pins it down. Standard errors come from binomial
    propagation; counts scaled to trials = 1 give the exact-probability
    limit.
    """
    if s < 1:
        raise ValidationError(f"s must be >= 1, got {s}")
    c1, n1 = _contrast(counts)
    var_c1 = max(0.0, (1.0 - c1 * c1)) / n1
    if aux is None:
        delta = math.acos(c1)
        cands = (_wrap_angle(phi_j - delta), _wrap_angle(phi_j + delta))
        return PhaseEstimate(phi_k=cands[0], stderr=1.0 / math.sqrt(n1),
                             candidates=cands, informative_counts=n1)
    phi_j2, table2 = aux
    c2, n2 = _contrast(table2)
    var_c2 = max(0.0, (1.0 - c2 * c2)) / n2
    dsep = phi_j2 - phi_j
    sd = math.sin(dsep)
    if abs(sd) < 1e-9:
        raise ValidationError(
            "second reference setting must differ from the first by a "
            "non-multiple of pi")
    # with d = phi_j - phi_k: c1 = cos(d) and c2 = cos(d + dsep), so
    # sin(d) = (c1 cos(dsep) - c2) / sin(dsep)
    x = c1
    y = (c1 * math.cos(dsep) - c2) / sd
    delta = math.atan2(y, x)
    r2 = x * x + y * y
    gx = -y / r2
    gy = x / r2
    var_y = (var_c2 + math.cos(dsep) ** 2 * var_c1) / (sd * sd)
    cov_xy = math.cos(dsep) * var_c1 / sd
    var_delta = gx * gx * var_c1 + gy * gy * var_y + 2.0 * gx * gy * cov_xy
    phi_k = _wrap_angle(phi_j - delta)
    return PhaseEstimate(phi_k=phi_k, stderr=math.sqrt(max(var_delta, 0.0)),
                         candidates=(phi_k,), informative_counts=n1 + n2)


def _assert_parameter_counting(s: int) -> None:
    # number of independent probabilities per setting, times settings,
    # must cover the 2s real parameters of the coefficient vector
    if ((s + 1) ** 2 - 1) * (s + 1) < 2 * s:
        raise ValidationError(
            f"outcome statistics cannot determine {2 * s} parameters at s={s}")


def _covers_eigenphases(settings, s: int, phi0: float) -> bool:
    for j in range(s + 1):
        target = phase_value(s, j, phi0)
        if not any(abs(_wrap_angle(p - target)) < 1e-9 for p in settings):
            return False
    return True


def _model_matrices(settings, s: int, phi0: float) -> list[np.ndarray]:
    """Per setting: matrix mapping coefficients to flattened amplitudes."""
    mats = []
    for phi_j in settings:
        left = phase_state(s, phi_j)
        cols = []
        for k in range(s + 1):
            right = phase_state(s, phase_value(s, k, phi0))
            joint = tensor_product(pad_to_cutoff(left, 2 * s),
                                   pad_to_cutoff(right, 2 * s))
            out = apply_two_mode_unitary(joint, (0, 1), beam_splitter_5050())
            cols.append(out.amplitudes.ravel())
        mats.append(np.stack(cols, axis=1))
    return mats


def _lsq_objective(mats, freqs, c):
    obj = 0.0
    grad = np.zeros_like(c)
    for mat, f in zip(mats, freqs):
        amp = mat @ c
        p = np.abs(amp) ** 2
        d = p - f
        obj += float(d @ d)
        grad += 2.0 * (mat.conj().T @ (d * amp))
    return obj, grad


def _project_sphere(c):
    return c / float(np.linalg.norm(c))


def estimate_coefficients(tables, s: int, *, phi0: float = 0.0,
                          rng_seed: int = 20240, starts: int = 8,
                          max_iter: int = 20000, tol: float = 1e-10
                          ) -> SuperpositionCoeffs:
    """Superposition coefficients from count tables at several settings.

    tables: sequence of (phi_j, CountTable); the settings must include
    every eigenphase of order s (extra settings sharpen identifiability,
    and s = 1 needs one off-axis setting to fix the sign of the relative
    phase). Exact tables at s = 1 invert in closed form; otherwise a
    projected-gradient least-squares fit on the unit sphere is run from
    several starts and the best optimum is gauge-fixed.
    """
    if s < 1:
        raise ValidationError(f"s must be >= 1, got {s}")
    _assert_parameter_counting(s)
    tables = list(tables)
    if not tables:
        raise ValidationError("no count tables given")
    settings = [float(p) for p, _ in tables]
    for _, t in tables:
        if t.s != s:
            raise ValidationError(
                f"table grid is for s={t.s}, estimator called with s={s}")
    if not _covers_eigenphases(settings, s, phi0):
        raise ValidationError(
            "settings must include every eigenphase of order s")

    all_exact = all(t.rng_seed is None and t.trials == 1.0 for _, t in tables)
    if s == 1 and all_exact:
        return _invert_s1_exact(tables, phi0)

    freqs = [t.frequencies().ravel() for _, t in tables]
    populated = sum(int(np.count_nonzero(f > 0)) for f in freqs)
    if populated < 2 * (s + 1):
        warnings.warn(
            f"only {populated} populated outcome cells for {2 * s} free "
            f"parameters", RankDeficiencyWarning, stacklevel=2)
    mats = _model_matrices(settings, s, phi0)

    rng = np.random.Generator(np.random.PCG64(rng_seed))
    best = None
    best_obj = np.inf
    inits = [np.ones(s + 1, dtype=np.complex128)]
    for _ in range(max(0, starts - 1)):
        z = rng.standard_normal(s + 1) + 1j * rng.standard_normal(s + 1)
        inits.append(z)
    for z in inits:
        c = _project_sphere(z.astype(np.complex128))
        obj, grad = _lsq_objective(mats, freqs, c)
        step = 0.5
        for _ in range(max_iter):
            # project the gradient onto the sphere's tangent space
            tang = grad - c * float(np.real(np.vdot(c, grad)))
            gnorm = float(np.linalg.norm(tang))
            if gnorm < tol:
                break
            improved = False
            while step > 1e-16:
                trial = _project_sphere(c - step * tang)
                new_obj, new_grad = _lsq_objective(mats, freqs, trial)
                if new_obj < obj - 1e-300:
                    improved = True
                    break
                step *= 0.5
            if not improved:
                break
            c, obj, grad = trial, new_obj, new_grad
            step = min(step * 2.0, 1.0)
        if obj < best_obj:
            best_obj = obj
            best = c
    note = ""
    if s == 1 and all(abs(math.sin(p)) < 1e-9 for p in settings):
        note = "relative-phase sign not identifiable from on-axis settings"
    return gauge_fixed(best, s, note=note)


def _invert_s1_exact(tables, phi0: float) -> SuperpositionCoeffs:
    """Closed-form (r, theta) from exact probabilities at s = 1.

    At reference phase phi0, P(0,1) = (1 - r^2)/2 fixes the weight and
    P(0,0) = (1 + 2 r sqrt(1-r^2) cos(theta))/4 fixes cos(theta); an
    off-axis setting, when present, picks the sign of theta.
    """
    base = None
    for p, t in tables:
        if abs(_wrap_angle(p - phi0)) < 1e-9:
            base = t
            break
    if base is None:
        raise ValidationError("need a table at the phi0 reference setting")
    f = base.frequencies()
    p01 = float(f[0, 1])
    r = math.sqrt(max(0.0, 1.0 - 2.0 * p01))
    if r >= 1.0 - 1e-12:
        return SuperpositionCoeffs(
            s=1, c=np.array([1.0, 0.0], dtype=np.complex128),
            note="theta unidentifiable at r = 1")
    if r <= 1e-12:
        return SuperpositionCoeffs(
            s=1, c=np.array([0.0, 1.0], dtype=np.complex128),
            note="theta absorbed into the gauge at r = 0")
    p00 = float(f[0, 0])
    cos_theta = np.clip((4.0 * p00 - 1.0) / (2.0 * r * math.sqrt(1.0 - r * r)),
                        -1.0, 1.0)
    theta = math.acos(float(cos_theta))
    boundary = theta < 1e-12 or theta > math.pi - 1e-12
    off_axis = [(p, t) for p, t in tables
                if abs(math.sin(p - phi0)) > 1e-9]
    if boundary:
        note = ""
    elif not off_axis:
        note = "relative-phase sign not identifiable from on-axis settings"
    else:
        note = ""
        p_off, t_off = off_axis[0]
        best_theta = theta
        best_err = None
        for cand in (theta, -theta):
            c = np.array([r, math.sqrt(1.0 - r * r) * np.exp(1j * cand)])
            model = superposition_probs(
                p_off, gauge_fixed(c, 1), phi0).probs
            err = float(np.abs(model - t_off.frequencies()).max())
            if best_err is None or err < best_err:
                best_err = err
                best_theta = cand
        theta = best_theta
    c = np.array([r, math.sqrt(1.0 - r * r) * np.exp(1j * theta)],
                 dtype=np.complex128)
    return gauge_fixed(c, 1, note=note)


def save_count_table(path, table: CountTable, phi_j: float, s: int) -> None:
    """CSV dump: header comments, then n1,n2,count rows."""
    lines = [
        f"# trials={table.trials!r}",
        f"# seed={'none' if table.rng_seed is None else table.rng_seed}",
        f"# phi_j={float(phi_j)!r}",
        f"# s={int(s)}",
        "n1,n2,count",
    ]
    dim = table.counts.shape[0]
    for n1 in range(dim):
        for n2 in range(dim):
            v = table.counts[n1, n2]
            text = str(int(v)) if float(v).is_integer() else repr(float(v))
            lines.append(f"{n1},{n2},{text}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_count_table(path) -> tuple[float, int, CountTable]:
    """Inverse of save_count_table; returns (phi_j, s, table)."""
    meta: dict[str, str] = {}
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = value.strip()
            elif not line.startswith("n1"):
                n1, n2, v = line.split(",")
                rows.append((int(n1), int(n2), float(v)))
    if "s" not in meta or "trials" not in meta:
        raise ValidationError(f"missing header metadata in {path}")
    s = int(meta["s"])
    dim = 2 * s + 1
    counts = np.zeros((dim, dim))
    for n1, n2, v in rows:
        counts[n1, n2] = v
    seed = None if meta.get("seed", "none") == "none" else int(meta["seed"])
    table = CountTable(counts=counts, trials=float(meta["trials"]),
                       rng_seed=seed)
    return float(meta.get("phi_j", "0.0")), s, table
