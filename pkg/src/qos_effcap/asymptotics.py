"""Zero-spectral-efficiency limits in the wideband and low-power regimes.

Wideband (``B -> inf`` at fixed ``P/N0``): the limiting threshold solves

    delta * a = log(1 + delta * P{z > a} / p_z(a)),   delta = theta*T*(P/N0)/ln2

Low-power (``P -> 0`` at fixed ``B``): it solves ``a p_z(a) = P{z > a}``,
independently of ``theta``; the QoS exponent enters the slope only through
``beta = theta*T*B/ln2``.

Both roots are found by bisection on a scanned bracket. For integer-shape
Gamma fading the low-power root is unique and lies in ``(0, n/lam]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .effcap import LN2, maximize_fixed_rate, to_db
from .errors import MultipleRootsError, ParameterError, SolverError
from .fading import FadingModel
from .solvers import bisect, first_sign_change, sign_changes

#: residual the fixed-point roots must meet
ROOT_RESIDUAL = 1e-10
SCAN_POINTS = 10_000
#: tail mass that sets the upper end of the uniqueness scan
SCAN_TAIL = 1e-12
TEN_LOG10_2 = 10.0 * math.log10(2.0)


@dataclass(frozen=True)
class AsymptoticResult:
    regime: str
    alpha_star: float
    eb_n0_zero_db: float
    wideband_slope: float
    qos_param: float
    is_minimum: bool

    @property
    def eb_n0_zero(self) -> float:
        return 10.0 ** (self.eb_n0_zero_db / 10.0)


def wideband_delta(theta: float, T: float, pbar_over_n0: float) -> float:
    return theta * T * pbar_over_n0 / LN2


def lowpower_beta(theta: float, T: float, B: float) -> float:
    return theta * T * B / LN2


def _lowpower_condition(model):
    return lambda x: x * model.pdf(x) - model.ccdf(x)


def _scan_upper(model: FadingModel) -> float:
    hi = max(model.mean, 1.0)
    while model.ccdf(hi) >= SCAN_TAIL:
        hi *= 1.5
    return hi


def lowpower_alpha_star(model: FadingModel) -> float:
    """Root of ``a p_z(a) = P{z > a}``.

    Integer-shape models are bracketed on ``(0, n/lam]``. Other shapes are
    scanned on 10^4 points first; more than one sign change raises
    :class:`MultipleRootsError` since uniqueness is not established there.
    """
    f = _lowpower_condition(model)
    if model.integer_shape:
        hi = model.shape / model.rate
        while f(hi) < 0:
            # n = 1 puts the root exactly on n/lam; nudge past rounding
            hi *= 1.0 + 1e-9
        root = bisect(f, 0.0, hi)
    else:
        x_hi = _scan_upper(model)
        grid = np.linspace(x_hi / SCAN_POINTS, x_hi, SCAN_POINTS)
        vals = f(grid)
        changes = sign_changes(vals)
        if not changes:
            raise SolverError("no root of a*p(a) = P{z>a} on the scan", bracket=(0.0, x_hi))
        if len(changes) > 1:
            raise MultipleRootsError(
                f"{len(changes)} sign changes of a*p(a) - P{{z>a}} for {model}",
                roots=[float(grid[i]) for i in changes], bracket=(0.0, x_hi))
        lo, hi = _bracket(grid, vals, changes[0])
        root = bisect(f, lo, hi)
    _check_residual(f(root), root)
    return root


def wideband_alpha_star(delta: float, model: FadingModel) -> float:
    """Fixed point of ``delta a = log(1 + delta P{z>a}/p_z(a))``.

    ``delta == 0`` returns the low-power root, the limit of the fixed-point
    equation after dividing by ``delta``.
    """
    if delta < 0:
        raise ParameterError(f"delta must be >= 0, got {delta!r}")
    if delta == 0:
        return lowpower_alpha_star(model)

    def g(a):
        a = np.asarray(a, dtype=float)
        p = np.asarray(model.pdf(a))
        tail = np.asarray(model.ccdf(a))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = delta * a - np.log1p(delta * tail / p)
        # a vanishing density means an unbounded hazard below the mean
        out = np.where(p == 0, np.where(a < model.mean, -np.inf, delta * a), out)
        return float(out) if out.ndim == 0 else out

    x_hi = _scan_upper(model)
    grid = np.geomspace(x_hi * 1e-12, x_hi, 2000)
    vals = g(grid)
    i = first_sign_change(vals)
    if i is None or vals[i] > 0:
        raise SolverError(f"no sign change of the wideband fixed point for delta={delta!r}",
                          bracket=(float(grid[0]), x_hi))
    lo, hi = _bracket(grid, vals, i)
    root = bisect(g, lo, hi)
    _check_residual(g(root) / max(1.0, delta * root), root)
    return root


def wideband_limits(theta: float, T: float, pbar_over_n0: float, model: FadingModel) -> AsymptoticResult:
    """Bit energy at zero spectral efficiency and wideband slope as ``B -> inf``.

    With ``xi = 1 - P{z>a}(1 - e^(-delta a))``, the bit energy is
    ``-delta ln2 / ln xi`` and the slope is
    ``2 xi ln^2 xi / ((delta a)^2 P{z>a} e^(-delta a))``. At ``delta = 0``
    both are replaced by their exact limits ``ln2 / (a P{z>a})`` and
    ``2 P{z>a}``. The wideband intercept is always the minimum bit energy.
    """
    if theta < 0 or T <= 0 or pbar_over_n0 <= 0:
        raise ParameterError("need theta >= 0, T > 0, P/N0 > 0")
    delta = wideband_delta(theta, T, pbar_over_n0)
    a = wideband_alpha_star(delta, model)
    tail = model.ccdf(a)
    if delta == 0:
        eb = LN2 / (a * tail)
        s0 = 2.0 * tail
    else:
        da = delta * a
        log_xi = math.log1p(-tail * -math.expm1(-da))
        xi = math.exp(log_xi)
        eb = -delta * LN2 / log_xi
        s0 = 2.0 * xi * log_xi ** 2 / (da ** 2 * tail * math.exp(-da))
    return AsymptoticResult("wideband", a, to_db(eb), s0, delta, True)


def lowpower_limits(theta: float, T: float, B: float, model: FadingModel) -> AsymptoticResult:
    """Bit energy at zero spectral efficiency and wideband slope as ``P -> 0``.

    ``E_b/N_0 = ln2 / (a P{z>a})`` does not depend on ``theta``;
    ``S_0 = 2 P{z>a} / (1 + beta (1 - P{z>a}))``. The intercept is known to
    be the minimum bit energy when ``theta == 0`` or the fading is an
    integer-shape Gamma law.
    """
    if theta < 0 or T <= 0 or B <= 0:
        raise ParameterError("need theta >= 0, T > 0, B > 0")
    a = lowpower_alpha_star(model)
    tail = model.ccdf(a)
    beta = lowpower_beta(theta, T, B)
    eb = LN2 / (a * tail)
    s0 = 2.0 * tail / (1.0 + beta * model.cdf(a))
    return AsymptoticResult("lowpower", a, to_db(eb), s0, beta,
                            theta == 0 or model.integer_shape)


def linear_approximation(eb_db, result: AsymptoticResult):
    """First-order spectral efficiency ``S_0/(10 log10 2) (E_b|dB - E_b0|dB)``, clamped at 0."""
    gap = np.maximum(np.asarray(eb_db, dtype=float) - result.eb_n0_zero_db, 0.0)
    out = result.wideband_slope / TEN_LOG10_2 * gap
    return float(out) if out.ndim == 0 else out


def linear_bit_energy_db(spectral_eff: float, result: AsymptoticResult) -> float:
    """Inverse of :func:`linear_approximation`."""
    return result.eb_n0_zero_db + spectral_eff * TEN_LOG10_2 / result.wideband_slope


def bit_energy_gap_db(s0_a: float, s0_b: float, spectral_eff: float) -> float:
    """Extra dB needed at spectral efficiency ``spectral_eff`` when the slope
    drops from ``s0_a`` to ``s0_b`` with a common intercept."""
    if s0_a <= 0 or s0_b <= 0 or spectral_eff <= 0:
        raise ParameterError("slopes and spectral efficiency must be positive")
    return (1.0 / s0_b - 1.0 / s0_a) * spectral_eff * TEN_LOG10_2


@dataclass(frozen=True)
class MonotonicityReport:
    zeta: np.ndarray
    ratio: np.ndarray          # R_E(zeta)/zeta in bits/s
    max_violation: float       # largest relative increase between neighbours
    passed: bool


def wideband_ratio_monotonicity_check(theta, T, pbar_over_n0, model, zeta_grid,
                                      tol: float = 1e-9) -> MonotonicityReport:
    """Check that ``R_E(zeta)/zeta`` does not increase with ``zeta = 1/B``.

    Each point is a full rate optimization at ``B = 1/zeta``; a relative
    increase above ``tol`` between neighbours fails the check.
    """
    if theta <= 0:
        raise ParameterError("theta must be positive")
    zeta = np.asarray(zeta_grid, dtype=float)
    if zeta.ndim != 1 or zeta.size == 0 or np.any(zeta <= 0) or np.any(np.diff(zeta) <= 0):
        raise ParameterError("zeta grid must be positive and strictly increasing")
    ratio = np.empty_like(zeta)
    for k, z in enumerate(zeta):
        B = 1.0 / z
        point = maximize_fixed_rate(theta, T, B, pbar_over_n0 / B, model)
        ratio[k] = point.spectral_efficiency / z
    rel = np.diff(ratio) / ratio[:-1] if zeta.size > 1 else np.zeros(0)
    worst = float(rel.max()) if rel.size else 0.0
    return MonotonicityReport(zeta, ratio, worst, worst <= tol)


def uniqueness_scan(model: FadingModel, points: int = SCAN_POINTS) -> int:
    """Number of sign changes of ``x p_z(x) - P{z > x}`` on ``(0, x_hi]``.

    ``x_hi`` is the first point where the tail mass drops below 1e-12.
    """
    x_hi = _scan_upper(model)
    grid = np.linspace(x_hi / points, x_hi, points)
    return len(sign_changes(_lowpower_condition(model)(grid)))


def _bracket(grid, vals, i):
    # sign_changes reports the last nonzero entry before the flip
    j = i + 1
    while vals[j] == 0:
        j += 1
    return float(grid[i]), float(grid[j])


def _check_residual(res, root):
    if not abs(res) <= ROOT_RESIDUAL:
        raise SolverError(f"root {root!r} misses the residual target ({res!r})")
