"""Fixed-rate ON-OFF transmission and its effective capacity.

A frame of duration ``T`` carries ``r*T`` bits when the fading gain exceeds
the outage threshold ``alpha(r) = (2^(r/B) - 1) / SNR`` and nothing
otherwise. With block fading the ON/OFF states are i.i.d. across frames, so
the normalized effective capacity at rate ``r`` is

    -1/(theta*T*B) * log(1 - P{z > alpha} * (1 - exp(-theta*T*r)))

and the spectral efficiency ``R_E`` is its maximum over ``r >= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, SolverError
from .fading import FadingModel
from .solvers import bisect, golden_section_max

LN2 = math.log(2.0)

#: tail probability below which a rate is treated as certain outage
OUTAGE_FLOOR = 1e-14
GRID_POINTS = 256
#: lowest scanned rate relative to the outage rate
GRID_SPAN = 1e-10
#: relative gap under which two local maxima count as a tie
TIE_RTOL = 1e-9


@dataclass(frozen=True)
class SystemParams:
    """Frame duration ``T`` (s), bandwidth ``B`` (Hz), QoS exponent ``theta``
    (1/bit) and average SNR ``P/(N0 B)``."""

    T: float
    B: float
    theta: float
    snr: float

    def __post_init__(self):
        for name in ("T", "B", "snr"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ParameterError(f"{name} must be positive and finite, got {v!r}")
        if not (math.isfinite(self.theta) and self.theta >= 0):
            raise ParameterError(f"theta must be >= 0, got {self.theta!r}")
        if self.T * self.B <= 2:
            raise ParameterError(f"T*B must exceed 2, got {self.T * self.B!r}")

    @classmethod
    def from_power(cls, T: float, B: float, theta: float, pbar_over_n0: float) -> "SystemParams":
        """Build from the power-to-noise-density ratio ``P/N0`` (Hz)."""
        return cls(T=T, B=B, theta=theta, snr=pbar_over_n0 / B)

    @property
    def pbar_over_n0(self) -> float:
        return self.snr * self.B


@dataclass(frozen=True)
class EffCapPoint:
    """Optimal operating point of the fixed-rate scheme at one SNR."""

    r_opt: float
    alpha_opt: float
    spectral_efficiency: float
    bit_energy_db: float
    stationarity_residual: float
    #: rates of every refined local maximum found by the grid scan
    local_maxima: tuple = field(default=(), compare=False)

    @property
    def bit_energy(self) -> float:
        return 10.0 ** (self.bit_energy_db / 10.0)


def instantaneous_capacity(snr, z, B):
    """Shannon rate ``B log2(1 + SNR z)`` in bits/s."""
    return B * np.log1p(np.multiply(snr, z)) / LN2


def outage_threshold(r, B, snr):
    """``alpha = (2^(r/B) - 1) / SNR``, via expm1 so ``r/B << 1`` keeps its digits."""
    return np.expm1(np.multiply(r, LN2 / B)) / snr


def on_probability(model: FadingModel, alpha):
    """Probability of the ON state, ``P{z > alpha}`` (= p22 = p12)."""
    return model.ccdf(alpha)


def log_mgf_per_frame(r, theta, T, p_on, p_off=None):
    """Per-frame log-MGF of the service, ``Lambda(-theta)``.

    ``log((1 - p_on) + p_on * exp(-theta*T*r))``, always <= 0. Passing the
    OFF probability ``p_off`` computed directly (rather than ``1 - p_on``)
    keeps full relative accuracy when ``p_on`` is close to 1 and
    ``theta*T*r`` is large.
    """
    x = theta * T * np.asarray(r, dtype=float)
    p_on = np.asarray(p_on, dtype=float)
    with np.errstate(divide="ignore"):
        direct = np.log1p(-p_on * -np.expm1(-x))
        if p_off is None:
            return direct
        u = np.asarray(p_off, dtype=float) + p_on * np.exp(-x)
        return np.where(u < 0.5, np.log(u), direct)


def effective_capacity_at_rate(r, params: SystemParams, model: FadingModel):
    """Normalized effective capacity (bits/s/Hz) at a fixed rate ``r``."""
    if params.theta == 0:
        raise ParameterError("theta = 0 has no fixed-rate log-MGF form; "
                             "use effective_capacity_theta0")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ParameterError("rate must be >= 0")
    with np.errstate(over="ignore"):
        alpha = outage_threshold(r, params.B, params.snr)
    lam = log_mgf_per_frame(r, params.theta, params.T, model.ccdf(alpha), model.cdf(alpha))
    out = -lam / (params.theta * params.T * params.B)
    return float(out) if out.ndim == 0 else out


def optimize_rate(params: SystemParams, model: FadingModel) -> EffCapPoint:
    """Maximize the effective capacity over the fixed rate ``r``.

    ``theta == 0`` is routed to the average-throughput objective
    ``(r/B) P{z > alpha}``.
    """
    return maximize_fixed_rate(params.theta, params.T, params.B, params.snr, model)


def effective_capacity_theta0(snr: float, B: float, model: FadingModel) -> float:
    """``max_r (r/B) P{z > alpha(r)}``: the loose-QoS limit of ``R_E``."""
    if not (snr > 0 and B > 0):
        raise ParameterError("snr and B must be positive")
    return maximize_fixed_rate(0.0, 1.0, B, snr, model).spectral_efficiency


def bit_energy(snr: float, spectral_efficiency: float) -> float:
    """``E_b/N_0 = SNR / R_E``; ``inf`` when nothing is delivered."""
    if spectral_efficiency < 0:
        raise ParameterError("spectral efficiency must be >= 0")
    if spectral_efficiency == 0:
        return math.inf
    return snr / spectral_efficiency


def bit_energy_db(snr: float, spectral_efficiency: float) -> float:
    eb = bit_energy(snr, spectral_efficiency)
    return math.inf if math.isinf(eb) else 10.0 * math.log10(eb)


def to_db(x: float) -> float:
    return 10.0 * math.log10(x)


# ---------------------------------------------------------------------------
# generic maximizer
# ---------------------------------------------------------------------------

class _FixedRateProblem:
    """Objective and first-order residual for ``alpha(r) = expm1(c r ln2)/s``.

    ``c`` is ``1/B`` with perfect CSI and ``T/(TB-1)`` with a trained
    channel estimate; ``s`` is the (effective) SNR.
    """

    def __init__(self, theta, T, B, snr, model, rate_scale):
        self.theta = float(theta)
        self.T = float(T)
        self.B = float(B)
        self.snr = float(snr)
        self.model = model
        self.c = float(rate_scale)

    def alpha(self, r):
        with np.errstate(over="ignore"):
            return np.expm1(np.multiply(r, self.c * LN2)) / self.snr

    def rate_for_alpha(self, alpha):
        return math.log1p(self.snr * alpha) / (self.c * LN2)

    def objective(self, r):
        r = np.asarray(r, dtype=float)
        alpha = self.alpha(r)
        p_on = np.asarray(self.model.ccdf(alpha))
        if self.theta == 0:
            out = r / self.B * p_on
        else:
            tt = self.theta * self.T
            lam = log_mgf_per_frame(r, self.theta, self.T, p_on, self.model.cdf(alpha))
            out = -lam / (tt * self.B)
        return float(out) if out.ndim == 0 else out

    def sides(self, r):
        """(LHS, RHS) of the stationarity identity; dF/dr has the sign of RHS - LHS."""
        a = float(self.alpha(r))
        dalpha = (1.0 + self.snr * a) * self.c * LN2 / self.snr
        pdf = self.model.pdf(a)
        tail = self.model.ccdf(a)
        if self.theta == 0:
            return r * pdf * dalpha, tail
        tt = self.theta * self.T
        return dalpha * pdf * -math.expm1(-tt * r), tt * math.exp(-tt * r) * tail

    def residual(self, r):
        lhs, rhs = self.sides(r)
        scale = max(abs(lhs), abs(rhs))
        return 0.0 if scale == 0 else (lhs - rhs) / scale

    def outage_rate(self):
        # smallest alpha with P{z > alpha} < OUTAGE_FLOOR, then map to a rate
        model = self.model
        hi = max(model.mean, 1.0)
        while model.ccdf(hi) >= OUTAGE_FLOOR:
            hi *= 2.0
        lo = hi / 2.0 if model.ccdf(hi / 2.0) >= OUTAGE_FLOOR else 0.0
        a = bisect(lambda x: model.ccdf(x) - OUTAGE_FLOOR, lo, hi, rtol=1e-12)
        return self.rate_for_alpha(a)


def maximize_fixed_rate(theta, T, B, snr, model: FadingModel, rate_scale=None) -> EffCapPoint:
    """Maximize the fixed-rate effective capacity over ``r``.

    A 256-point log-spaced scan over ``[1e-10 r_max, r_max]`` seeds a
    golden-section search (relative tolerance 1e-12 on ``r``) at every grid
    local maximum; each candidate is then certified by bisection on the
    stationarity residual. Ties within ``1e-9`` resolve to the smaller rate.

    ``rate_scale`` multiplies ``r`` in the threshold exponent
    (default ``1/B``).
    """
    if not (snr > 0 and math.isfinite(snr)):
        raise ParameterError(f"snr must be positive, got {snr!r}")
    if theta < 0:
        raise ParameterError(f"theta must be >= 0, got {theta!r}")
    prob = _FixedRateProblem(theta, T, B, snr, model, 1.0 / B if rate_scale is None else rate_scale)

    r_max = prob.outage_rate()
    u_hi = math.log(r_max)
    u_lo = u_hi + math.log(GRID_SPAN)
    for _ in range(8):
        u = np.linspace(u_lo, u_hi, GRID_POINTS)
        vals = prob.objective(np.exp(u))
        if not np.any(vals > 0):
            raise SolverError("effective capacity is numerically zero on the whole scan",
                              bracket=(math.exp(u_lo), r_max))
        if int(np.argmax(vals)) > 0:
            break
        u_lo += math.log(GRID_SPAN)
    else:
        raise SolverError("maximum escapes the lower end of the rate scan",
                          bracket=(math.exp(u_lo), r_max))

    peaks = [i for i in range(1, GRID_POINTS - 1)
             if vals[i] > 0 and vals[i] >= vals[i - 1] and vals[i] >= vals[i + 1]]
    if not peaks:
        peaks = [int(np.argmax(vals))]

    candidates = []
    for i in peaks:
        lo, hi = u[max(i - 1, 0)], u[min(i + 1, GRID_POINTS - 1)]
        ug, fg = golden_section_max(lambda v: prob.objective(math.exp(v)), lo, hi, xtol=1e-12)
        r = _certify(prob, math.exp(ug), math.exp(lo), math.exp(hi))
        f = prob.objective(r)
        # the peak is flat to second order: only a real drop disqualifies
        if f < fg * (1.0 - 1e-12):
            r, f = math.exp(ug), fg
        candidates.append((r, f))

    best = max(f for _, f in candidates)
    r_opt = min(r for r, f in candidates if f >= best * (1.0 - TIE_RTOL))
    value = prob.objective(r_opt)
    maxima = tuple(sorted({r for r, _ in candidates}))
    return EffCapPoint(
        r_opt=r_opt,
        alpha_opt=float(prob.alpha(r_opt)),
        spectral_efficiency=value,
        bit_energy_db=bit_energy_db(snr, value),
        stationarity_residual=prob.residual(r_opt),
        local_maxima=maxima,
    )


def _certify(prob, r, r_lo, r_hi):
    """Refine ``r`` to the sign change of the stationarity residual nearby."""
    h = 1e-7
    while True:
        a, b = max(r * (1 - h), r_lo), min(r * (1 + h), r_hi)
        ga, gb = prob.residual(a), prob.residual(b)
        if ga < 0 < gb:
            return bisect(prob.residual, a, b, xtol=0.0, f_lo=ga, f_hi=gb)
        if ga == 0:
            return a
        if gb == 0:
            return b
        if a <= r_lo and b >= r_hi:
            return r
        h *= 4.0
