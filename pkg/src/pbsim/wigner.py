"""Wigner functions, negativity volumes and the support-radius metric.

Conventions: hbar = 1/2, so the vacuum Wigner peak is 2/pi and the
position wavefunctions are psi_n(x) = (2/pi)^(1/4) (2^n n!)^(-1/2)
H_n(sqrt(2) x) exp(-x^2). The fast path evaluates W through the
closed-form Fock kernel in _kernels; wigner_point_integral keeps the
defining integral as an independent slow oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad

from ._kernels import kernel_coefficients, wigner_batch
from .errors import (QuadratureError, ValidationError, WindowExhaustedError)
from .fock import FockDensity, FockVector

RADIUS_THRESHOLD = 0.001
_TRACE_PRE_TOL = 1e-8
_ORACLE_HALF_RANGE = 40.0


def hermite_wavefunction(n: int, x):
    """Position wavefunction psi_n(x) of the n-th Fock state.

    Normalized three-term recurrence; accepts a scalar or an array x.
    """
    if n < 0:
        raise ValidationError(f"n must be >= 0, got {n}")
    x_arr = np.asarray(x, dtype=np.float64)
    vals = hermite_wavefunctions_all(n, x_arr)[n]
    return float(vals) if np.isscalar(x) or x_arr.ndim == 0 else vals


def hermite_wavefunctions_all(nmax: int, x) -> np.ndarray:
    """psi_n(x) for all n = 0..nmax, shape (nmax+1,) + x.shape.

    Recurrence in the unit-normalized Hermite functions h_n(xi),
    h_n = xi sqrt(2/n) h_(n-1) - sqrt((n-1)/n) h_(n-2), evaluated at
    xi = sqrt(2) x and rescaled by 2^(1/4) for the hbar = 1/2 units.
    """
    if nmax < 0:
        raise ValidationError(f"nmax must be >= 0, got {nmax}")
    x_arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    xi = np.sqrt(2.0) * x_arr
    out = np.zeros((nmax + 1,) + x_arr.shape)
    h_prev = np.pi ** -0.25 * np.exp(-0.5 * xi * xi)
    out[0] = h_prev
    h_cur = h_prev
    for n in range(1, nmax + 1):
        h_next = xi * np.sqrt(2.0 / n) * h_cur
        if n > 1:
            h_next -= np.sqrt((n - 1.0) / n) * h_prev
        h_prev, h_cur = h_cur, h_next
        out[n] = h_cur
    out *= 2.0 ** 0.25
    if np.isscalar(x) or np.asarray(x).ndim == 0:
        return out[:, 0]
    return out


def kernel_matrix(dim: int, q: float, p: float) -> np.ndarray:
    """Full kernel table K[m, n](q, p), so that W = sum(rho * K).

    Lower triangle (m >= n) carries (2(q+ip))^(m-n); the upper triangle
    is its conjugate transpose.
    """
    coef = kernel_coefficients(dim)
    r2 = q * q + p * p
    x = 4.0 * r2
    z = 2.0 * (q + 1j * p)
    k = np.zeros((dim, dim), dtype=np.complex128)
    zd = 1.0 + 0.0j
    for d in range(dim):
        lprev, lcur = 0.0, 1.0
        for n in range(dim - d):
            m = n + d
            k[m, n] = coef[m, n] * lcur * zd
            lnext = ((2 * n + 1 + d - x) * lcur - (n + d) * lprev) / (n + 1)
            lprev, lcur = lcur, lnext
        zd *= z
    k *= math.exp(-2.0 * r2)
    lower = np.tril(k, -1)
    return k + lower.conj().T


def _as_density(state) -> FockDensity:
    if isinstance(state, FockDensity):
        return state
    if isinstance(state, FockVector):
        return FockDensity.from_pure(state)
    return FockDensity(np.asarray(state))


def wigner_point(rho, q: float, p: float) -> float:
    """W(q, p) of a single-mode density.

    FockDensity and FockVector inputs take the Hermitian fast path. A raw
    matrix is evaluated by the full complex kernel sum; an imaginary
    residue above 1e-8 reports a non-Hermitian input.
    """
    if isinstance(rho, FockVector):
        rho = FockDensity.from_pure(rho)
    if isinstance(rho, FockDensity):
        return float(wigner_batch(rho.matrix, np.array([q]), np.array([p]))[0])
    m = np.asarray(rho, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"density matrix must be square, got {m.shape}")
    w = complex(np.sum(m * kernel_matrix(m.shape[0], q, p)))
    if abs(w.imag) > 1e-8:
        raise ValidationError(
            f"input not Hermitian: imaginary residue {w.imag:.3e} in W")
    return float(w.real)


def wigner_point_integral(psi: FockVector, q: float, p: float) -> float:
    """W(q, p) by direct integration of the defining transform.

    W = (1/pi) Int dx psi(q + x/2) conj(psi)(q - x/2) exp(2ipx), for a
    single-mode pure state. Slow; kept as the oracle for wigner_point.
    """
    if psi.modes != 1:
        raise ValidationError("integral oracle expects a single-mode state")
    a = psi.amplitudes
    nmax = psi.cutoff

    def integrand(x: float) -> float:
        ph = hermite_wavefunctions_all(nmax, np.array([q + 0.5 * x,
                                                       q - 0.5 * x]))
        u = complex(a @ ph[:, 0])
        w = complex(a @ ph[:, 1])
        return (u * w.conjugate() * np.exp(2j * p * x)).real

    val, abserr = quad(integrand, -_ORACLE_HALF_RANGE, _ORACLE_HALF_RANGE,
                       limit=500, epsabs=1e-12, epsrel=1e-11)
    if abserr > 1e-9:
        raise QuadratureError(
            f"oracle integral error estimate {abserr:.3e} above 1e-9")
    return val / np.pi


@dataclass(frozen=True)
class WignerGrid:
    """Rectangular lattice spec and, once evaluated, the W values.

    values[i, j] = W(q_i, p_j) with q_i, p_j the uniform lattices given
    by q_values()/p_values().
    """

    q_min: float
    q_max: float
    p_min: float
    p_max: float
    nq: int
    np: int
    values: np.ndarray | None = None

    def __post_init__(self):
        if self.nq < 2 or self.np < 2:
            raise ValidationError("grid needs at least 2 points per axis")
        for v in (self.q_min, self.q_max, self.p_min, self.p_max):
            if not np.isfinite(v):
                raise ValidationError("grid extents must be finite")
        if not (self.q_max > self.q_min and self.p_max > self.p_min):
            raise ValidationError("grid extents must have positive span")
        if self.values is not None:
            vals = np.asarray(self.values, dtype=np.float64)
            if vals.shape != (self.nq, self.np):
                raise ValidationError(
                    f"values shape {vals.shape} != ({self.nq}, {self.np})")
            if not np.all(np.isfinite(vals)):
                raise ValidationError("non-finite grid value")
            object.__setattr__(self, "values", vals)

    def q_values(self) -> np.ndarray:
        return np.linspace(self.q_min, self.q_max, self.nq)

    def p_values(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.np)


def wigner_grid(rho, spec: WignerGrid) -> WignerGrid:
    """Evaluate W on the lattice described by spec."""
    dm = _as_density(rho)
    qv = spec.q_values()
    pv = spec.p_values()
    qq, pp = np.meshgrid(qv, pv, indexing="ij")
    vals = wigner_batch(dm.matrix, qq.ravel(), pp.ravel())
    return replace(spec, values=vals.reshape(spec.nq, spec.np))


@dataclass(frozen=True)
class QuadratureSpec:
    """How to integrate over phase space.

    scheme "adaptive": panel quadtree of tensor Gauss-Legendre rules,
    refined until parent/children estimates agree. scheme "fixed": one
    tensor rule over the whole box, no error control.
    """

    scheme: str = "adaptive"
    order: int = 16
    tol: float = 1e-6
    radius_margin: float = 2.0
    max_depth: int = 14
    max_evals: int = 40_000_000

    def __post_init__(self):
        if self.scheme not in ("adaptive", "fixed"):
            raise ValidationError(f"unknown quadrature scheme {self.scheme!r}")
        if self.tol <= 0:
            raise ValidationError("tolerance must be > 0")
        if self.order < 2:
            raise ValidationError("panel order must be >= 2")
        if self.radius_margin < 0:
            raise ValidationError("radius margin must be >= 0")


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class NegativityResult:
    volume: float
    abs_integral: float
    tail_estimate: float
    box_half_width: float
    evaluations: int
    max_depth_reached: int


def _panel_values(matrix, q0, q1, p0, p1, nodes, weights, absolute):
    """Tensor Gauss-Legendre estimate of each panel's integral."""
    k = nodes.size
    npanels = q0.size
    hq = 0.5 * (q1 - q0)
    cq = 0.5 * (q1 + q0)
    hp = 0.5 * (p1 - p0)
    cp = 0.5 * (p1 + p0)
    qpts = cq[:, None, None] + hq[:, None, None] * nodes[None, :, None]
    ppts = cp[:, None, None] + hp[:, None, None] * nodes[None, None, :]
    shape = (npanels, k, k)
    w = wigner_batch(matrix,
                     np.broadcast_to(qpts, shape).ravel(),
                     np.broadcast_to(ppts, shape).ravel()).reshape(shape)
    if absolute:
        w = np.abs(w)
    ww = weights[:, None] * weights[None, :]
    return (w * ww).sum(axis=(1, 2)) * hq * hp


def _adaptive_box_integral(matrix, half_width, spec, absolute):
    """Integral of W (or |W|) over the centered square box.

    Returns (value, evaluations, depth_reached). Panels are refined
    level-synchronously; a panel is accepted when its parent/children
    difference is below the area-share tolerance, and the whole
    refinement stops early once the remaining difference budget is
    below half the target.
    """
    nodes, weights = leggauss(spec.order)
    box_area = (2.0 * half_width) ** 2
    q0 = np.array([-half_width])
    q1 = np.array([half_width])
    p0 = np.array([-half_width])
    p1 = np.array([half_width])
    vals = _panel_values(matrix, q0, q1, p0, p1, nodes, weights, absolute)
    evals = spec.order ** 2
    if spec.scheme == "fixed":
        return float(vals[0]), evals, 0

    total = 0.0
    for depth in range(1, spec.max_depth + 1):
        qm = 0.5 * (q0 + q1)
        pm = 0.5 * (p0 + p1)
        cq0 = np.concatenate([q0, qm, q0, qm])
        cq1 = np.concatenate([qm, q1, qm, q1])
        cp0 = np.concatenate([p0, p0, pm, pm])
        cp1 = np.concatenate([pm, pm, p1, p1])
        cvals = _panel_values(matrix, cq0, cq1, cp0, cp1, nodes, weights,
                              absolute)
        evals += cvals.size * spec.order ** 2
        if evals > spec.max_evals:
            raise QuadratureError(
                f"evaluation budget {spec.max_evals} exceeded at depth {depth}")
        nparent = q0.size
        child_sum = (cvals[:nparent] + cvals[nparent:2 * nparent]
                     + cvals[2 * nparent:3 * nparent] + cvals[3 * nparent:])
        diff = np.abs(child_sum - vals)
        if diff.sum() <= 0.5 * spec.tol:
            return float(total + child_sum.sum()), evals, depth
        area_frac = (q1 - q0) * (p1 - p0) / box_area
        done = diff <= spec.tol * area_frac
        total += float(child_sum[done].sum())
        keep = ~done
        keep4 = np.concatenate([keep, keep, keep, keep])
        q0, q1, p0, p1 = cq0[keep4], cq1[keep4], cp0[keep4], cp1[keep4]
        vals = cvals[keep4]
        if q0.size == 0:
            return float(total), evals, depth
    raise QuadratureError(
        f"{q0.size} panels unconverged at max depth {spec.max_depth}")


def _check_unit_trace(dm: FockDensity) -> None:
    if abs(dm.trace - 1.0) > _TRACE_PRE_TOL:
        raise ValidationError(
            f"expected a trace-1 density, got trace {dm.trace:.12g}")


def negativity_volume(rho, quad: QuadratureSpec | None = None) -> float:
    """Negativity volume (1/2)(Int |W| - 1), clamped at zero.

    The integration box is a square of half-width effective_radius +
    radius_margin; the tail outside is bounded separately by the
    detailed variant.
    """
    return negativity_volume_detailed(rho, quad).volume


def negativity_volume_detailed(rho, quad: QuadratureSpec | None = None
                               ) -> NegativityResult:
    spec = quad if quad is not None else DEFAULT_QUADRATURE
    dm = _as_density(rho)
    _check_unit_trace(dm)
    half_width = effective_radius(dm) + spec.radius_margin
    absint, evals, depth = _adaptive_box_integral(dm.matrix, half_width,
                                                  spec, absolute=True)
    raw = 0.5 * (absint - 1.0)
    if raw < 0.0:
        if raw < -100.0 * spec.tol:
            raise QuadratureError(
                f"negativity volume {raw:.3e} below zero beyond tolerance")
        raw = 0.0
    tail = _tail_estimate(dm.matrix, half_width, spec)
    return NegativityResult(volume=float(raw), abs_integral=float(absint),
                            tail_estimate=float(tail),
                            box_half_width=float(half_width),
                            evaluations=evals, max_depth_reached=depth)


def _tail_estimate(matrix, half_width, spec) -> float:
    """One-shot estimate of Int |W| over the frame just outside the box."""
    nodes, weights = leggauss(min(spec.order, 24))
    l = half_width
    e = half_width + 2.0
    # frame = two full-height side strips plus top/bottom strips between them
    q0 = np.array([-e, l, -l, -l])
    q1 = np.array([-l, e, l, l])
    p0 = np.array([-e, -e, l, -e])
    p1 = np.array([e, e, e, -l])
    vals = _panel_values(matrix, q0, q1, p0, p1, nodes, weights,
                         absolute=True)
    return float(vals.sum())


def wigner_plane_integral(rho, quad: QuadratureSpec | None = None) -> float:
    """Signed integral of W over the support box; close to trace(rho)."""
    spec = quad if quad is not None else DEFAULT_QUADRATURE
    dm = _as_density(rho)
    half_width = effective_radius(dm) + spec.radius_margin
    val, _, _ = _adaptive_box_integral(dm.matrix, half_width, spec,
                                       absolute=False)
    return float(val)


def effective_radius(rho, angle: float = 0.0,
                     threshold: float = RADIUS_THRESHOLD) -> float:
    """Outermost |W| = threshold crossing along a ray from the origin.

    Scans outward along (cos(angle), sin(angle)) with step 0.01, extends
    the window when the boundary is still above threshold, then bisects
    the final crossing to 1e-8.
    """
    dm = _as_density(rho)
    _check_unit_trace(dm)
    if not np.isfinite(angle):
        raise ValidationError("ray angle must be finite")
    if threshold <= 0:
        raise ValidationError("threshold must be > 0")
    matrix = dm.matrix
    ca, sa = math.cos(angle), math.sin(angle)
    step = 0.01
    window = math.sqrt(4.0 * dm.cutoff + 2.0) / 2.0 + 4.0
    t_lo = 0.0
    last_above = -1.0
    for _ in range(6):
        ts = np.arange(t_lo, window + step, step)
        vals = np.abs(wigner_batch(matrix, ts * ca, ts * sa))
        above = np.nonzero(vals >= threshold)[0]
        if above.size:
            last_above = max(last_above, float(ts[above[-1]]))
        if above.size == 0 or ts[above[-1]] < ts[-1]:
            break
        t_lo = float(ts[-1])
        window += 4.0
    else:
        raise WindowExhaustedError(
            f"|W| still above {threshold} at ray distance {window:.1f}")
    if last_above < 0.0:
        raise WindowExhaustedError(
            f"no |W| >= {threshold} point found along the ray")

    lo, hi = last_above, last_above + step

    def g(t: float) -> float:
        return float(np.abs(wigner_batch(matrix, np.array([t * ca]),
                                         np.array([t * sa])))[0]) - threshold

    for _ in range(80):
        if hi - lo <= 1e-8:
            break
        mid = 0.5 * (lo + hi)
        if g(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
