"""Heralded generation of equal-amplitude phase states.

Pipeline: a two-mode squeezed vacuum feeds the last of s distribution
modes, a beam-splitter cascade spreads it evenly, each distribution mode
is displaced, and a click on every distribution detector heralds the
target mode A. The displacement amplitudes are the roots of a degree-s
polynomial whose coefficients make the heralded amplitudes equal weight
order by order in q = tanh(r).

Mode layout of the built state: axes 0..s-1 are the distribution modes
(the cascade feeds axis s-1), axis s is the heralded mode A, always last.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache
from math import comb, tanh

import numpy as np

from .errors import (CutoffError, LeakageWarning, NumericalError, ProbeError,
                     RootQualityError, ValidationError)
from .fock import (FockDensity, FockVector, conditional_density,
                   fidelity_pure, project_pattern, tensor_product,
                   vacuum_state)
from .ops import (apply_single_mode_op, apply_two_mode_unitary,
                  beam_splitter_pb, detector_povm, displacement_op, tmsv)
from .phase_states import pb_eigenstate
from .wigner import QuadratureSpec, negativity_volume

_PROBE_Q = 0.1
_PROBE_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class HeraldConfig:
    """Parameters of one generation run.

    cutoff must be at least s so the target |phi_0>_s fits; tmsv_terms
    and the displacement series order default to the six-term truncation
    of the source material the circuit reproduces.
    """

    s: int
    r: float
    eta: float
    cutoff: int = 5
    tmsv_terms: int = 6
    displacement_scheme: str = "series"
    displacement_order: int = 5
    leakage_bound: float = 1e-6

    def __post_init__(self):
        if self.s < 1:
            raise ValidationError(f"s must be >= 1, got {self.s}")
        if self.r < 0:
            raise ValidationError(f"squeezing r must be >= 0, got {self.r}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValidationError(f"eta must lie in [0, 1], got {self.eta}")
        if self.cutoff < self.s:
            raise CutoffError(
                f"cutoff {self.cutoff} < s = {self.s}; the target state "
                f"needs photon numbers up to s")
        if self.tmsv_terms < 1:
            raise ValidationError("tmsv_terms must be >= 1")
        if self.displacement_scheme not in ("series", "exact"):
            raise ValidationError(
                f"unknown displacement scheme {self.displacement_scheme!r}")

    @property
    def q(self) -> float:
        return tanh(self.r)


@dataclass(frozen=True)
class HeraldResult:
    """Everything derived from one configuration."""

    alphas: tuple
    P: float
    F: float
    rho_A: FockDensity
    V: float
    leakage: float

    def __post_init__(self):
        if not -1e-12 <= self.P <= 1.0 + 1e-12:
            raise ValidationError(f"P = {self.P} outside [0, 1]")
        if not -1e-12 <= self.F <= 1.0 + 1e-12:
            raise ValidationError(f"F = {self.F} outside [0, 1]")
        if self.V < 0:
            raise ValidationError(f"V = {self.V} negative")


def _first_order_displacement(t: float, dim: int) -> np.ndarray:
    """I + t a+ - t a, the probe's first-order displacement (real t)."""
    n = np.arange(1, dim)
    adag = np.zeros((dim, dim))
    adag[n, n - 1] = np.sqrt(n)
    return np.eye(dim) + t * adag - t * adag.T


def _probe_amplitudes(s: int, t: float, q: float) -> np.ndarray:
    """Mode-A amplitudes of the first-order circuit, all displacements t,
    heralded on exactly one photon in every distribution mode.

    Distribution modes are created, displaced and projected one at a time,
    so the live tensor never exceeds three modes.
    """
    cutoff = s
    dim = cutoff + 1
    st = tmsv(q, cutoff)
    d1 = _first_order_displacement(t, dim)
    for k in range(1, s):
        st3 = tensor_product(vacuum_state(cutoff, 1), st)
        st3 = apply_two_mode_unitary(st3, (0, 1), beam_splitter_pb(k, s))
        st3 = apply_single_mode_op(st3, 0, d1)
        st = project_pattern(st3, {0: 1})
    st = apply_single_mode_op(st, 0, d1)
    st = project_pattern(st, {0: 1})
    return st.amplitudes[: s + 1]


@lru_cache(maxsize=None)
def _symmetric_factors_cached(s: int) -> tuple:
    nsamples = 2 * s + 3
    ts = np.linspace(-1.0, 1.0, nsamples)
    amps = np.stack([_probe_amplitudes(s, float(t), _PROBE_Q) for t in ts])
    vander = np.vander(ts, s + 1, increasing=True)
    coef, _, _, _ = np.linalg.lstsq(vander, amps, rcond=None)
    fit_residual = np.abs(vander @ coef - amps).max()

    prefactor = np.sqrt(1.0 - _PROBE_Q ** 2)
    factors = []
    for j in range(s + 1):
        col = coef[:, j] / (prefactor * _PROBE_Q ** j)
        want = s - j
        value = col[want]
        # every power below s-j, or of the wrong parity, must vanish:
        # the amplitude is a polynomial in t with powers s-j, s-j+2, ...
        spurious = 0.0
        for w in range(s + 1):
            if w != want and (w < want or (w - want) % 2 == 1):
                spurious = max(spurious, abs(col[w]))
        if spurious > _PROBE_RESIDUAL_TOL * max(1.0, abs(value)):
            raise ProbeError(
                f"probe extraction residual {spurious:.3e} at j={j}; "
                f"the amplitude is not multilinear as assumed")
        if abs(value.imag) > _PROBE_RESIDUAL_TOL:
            raise ProbeError(
                f"probe coefficient unexpectedly complex at j={j}")
        factors.append(float(value.real) / comb(s, s - j))
    if fit_residual > 1e-9:
        raise ProbeError(f"probe polynomial fit residual {fit_residual:.3e}")
    return tuple(factors)


def symmetric_factors(s: int) -> tuple:
    """Scalars f_{s,j} with heralded amplitude of |j>_A equal, at lowest
    order, to q^j f_{s,j} e_{s-j}(alpha_1..alpha_s).

    Extracted by a multilinearity probe: run the first-order circuit with
    every displacement equal to t and read off the t^(s-j) coefficient.
    """
    if s < 1:
        raise ValidationError(f"s must be >= 1, got {s}")
    return _symmetric_factors_cached(s)


def alpha_polynomial(s: int, q: float) -> np.ndarray:
    """Monic degree-s polynomial whose roots are the displacement
    amplitudes, coefficients ordered highest power first.

    The equal-weight condition c_0 = q c_1 = ... = q^s c_s fixes the
    elementary symmetric polynomials to e_k = (f_{s,s}/f_{s,s-k}) q^k.
    """
    if not 0.0 < q < 1.0:
        raise ValidationError(f"require 0 < q < 1, got {q}")
    f = symmetric_factors(s)
    coeffs = np.empty(s + 1)
    for k in range(s + 1):
        coeffs[k] = (-1.0) ** k * (f[s] / f[s - k]) * q ** k
    return coeffs


def solve_alphas(poly) -> np.ndarray:
    """All roots of a monic polynomial, sorted by (real, imag), each
    verified to a residual below 1e-10 relative to the coefficient scale.
    """
    c = np.asarray(poly, dtype=np.complex128)
    if c.ndim != 1 or c.size < 2:
        raise ValidationError("polynomial must have degree >= 1")
    if abs(c[0] - 1.0) > 1e-12:
        raise ValidationError(f"polynomial must be monic, got leading {c[0]}")
    roots = np.roots(c)
    scale = max(1.0, float(np.abs(c).max()))
    residuals = np.abs(np.polyval(c, roots))
    if residuals.max() > 1e-10 * scale:
        raise RootQualityError(
            f"root residual {residuals.max():.3e} above 1e-10 * {scale:g}")
    order = np.lexsort((roots.imag, roots.real))
    return roots[order]


def herald_alphas(cfg: HeraldConfig) -> np.ndarray:
    """Displacement amplitudes for a configuration (zeros when r = 0)."""
    if cfg.q == 0.0:
        return np.zeros(cfg.s, dtype=np.complex128)
    return solve_alphas(alpha_polynomial(cfg.s, cfg.q))


def build_state(cfg: HeraldConfig, alphas=None) -> FockVector:
    """The full circuit state on s distribution modes plus mode A.

    Operators are applied source first: the beam-splitter cascade from
    B_{1,s} to B_{s-1,s}, then every displacement. Truncation leakage
    above cfg.leakage_bound triggers a LeakageWarning.
    """
    if alphas is None:
        alphas = herald_alphas(cfg)
    alphas = np.asarray(alphas, dtype=np.complex128)
    if alphas.shape != (cfg.s,):
        raise ValidationError(
            f"expected {cfg.s} displacement amplitudes, got {alphas.shape}")
    source = tmsv(cfg.q, cfg.cutoff, max_terms=cfg.tmsv_terms)
    if cfg.s == 1:
        st = source
    else:
        st = tensor_product(vacuum_state(cfg.cutoff, cfg.s - 1), source)
    for k in range(1, cfg.s):
        st = apply_two_mode_unitary(st, (k - 1, cfg.s - 1),
                                    beam_splitter_pb(k, cfg.s))
    for i in range(cfg.s):
        d = displacement_op(complex(alphas[i]), cfg.cutoff,
                            scheme=cfg.displacement_scheme,
                            order=cfg.displacement_order)
        st = apply_single_mode_op(st, i, d, track_leakage=True)
    if st.leakage > cfg.leakage_bound:
        warnings.warn(
            f"truncation leakage {st.leakage:.3e} above bound "
            f"{cfg.leakage_bound:.0e}", LeakageWarning, stacklevel=2)
    return st


def _conditioned(cfg: HeraldConfig, state: FockVector | None = None
                 ) -> tuple[FockDensity, float, float]:
    if state is None:
        state = build_state(cfg)
    povm = detector_povm(cfg.eta, cfg.cutoff)
    rho_a, p = conditional_density(state, [povm.click] * cfg.s,
                                   kept_mode=cfg.s)
    return rho_a, p, state.leakage


def click_probability(cfg: HeraldConfig) -> float:
    """Probability that every distribution detector clicks."""
    _, p, _ = _conditioned(cfg)
    return p


def herald_fidelity(cfg: HeraldConfig) -> float:
    """Overlap of the heralded mode-A state with the ideal |phi_0>_s."""
    rho_a, _, _ = _conditioned(cfg)
    target = pb_eigenstate(cfg.s, 0, cutoff=cfg.cutoff)
    return fidelity_pure(rho_a, target)


def conditional_negativity(cfg: HeraldConfig,
                           quad: QuadratureSpec | None = None
                           ) -> tuple[FockDensity, float]:
    """Heralded density of mode A and its negativity volume."""
    rho_a, _, _ = _conditioned(cfg)
    return rho_a, negativity_volume(rho_a, quad)


def herald_point(cfg: HeraldConfig, quad: QuadratureSpec | None = None
                 ) -> HeraldResult:
    """One-shot evaluation of alphas, P, F, rho_A and V."""
    alphas = herald_alphas(cfg)
    state = build_state(cfg, alphas)
    rho_a, p, leakage = _conditioned(cfg, state)
    target = pb_eigenstate(cfg.s, 0, cutoff=cfg.cutoff)
    fid = fidelity_pure(rho_a, target)
    vol = negativity_volume(rho_a, quad)
    return HeraldResult(alphas=tuple(complex(a) for a in alphas),
                        P=float(p), F=float(fid), rho_A=rho_a,
                        V=float(vol), leakage=float(leakage))


@dataclass(frozen=True)
class HeraldSweepRow:
    s: int
    r: float
    eta: float
    P: float
    F: float
    V: float
    leakage: float
    error: str | None = None


def sweep(s: int, r_values, eta_values, *, cutoff: int = 5,
          tmsv_terms: int = 6, displacement_scheme: str = "series",
          displacement_order: int = 5,
          quad: QuadratureSpec | None = None) -> list[HeraldSweepRow]:
    """Evaluate herald_point over an (eta, r) grid.

    Row order is deterministic: eta in the given order outermost, r
    innermost. Numerical failures (for example r = 0, where no detector
    can click) are recorded in the row's error field and the sweep
    continues; invalid configurations still raise.
    """
    rows: list[HeraldSweepRow] = []
    for eta in eta_values:
        for r in r_values:
            cfg = HeraldConfig(s=s, r=float(r), eta=float(eta), cutoff=cutoff,
                               tmsv_terms=tmsv_terms,
                               displacement_scheme=displacement_scheme,
                               displacement_order=displacement_order)
            try:
                res = herald_point(cfg, quad)
                rows.append(HeraldSweepRow(s, float(r), float(eta), res.P,
                                           res.F, res.V, res.leakage))
            except NumericalError as exc:
                rows.append(HeraldSweepRow(s, float(r), float(eta),
                                           float("nan"), float("nan"),
                                           float("nan"), float("nan"),
                                           error=str(exc)))
    return rows
