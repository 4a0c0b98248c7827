"""Fixed-rate transmission with a pilot-based MMSE channel estimate.

Each frame of ``TB`` symbols carries one pilot with energy ``rho P T`` and
``TB - 1`` data symbols sharing the rest. The estimation error is folded
into the noise, which leaves an estimated-channel link with unit-mean
exponential gain ``|w|^2`` and effective SNR

    snr_eff = rho (1-rho) g^2 (TB)^2 snr^2 / (rho g TB (TB-2) snr + g TB snr + TB - 1)

(``g`` the mean channel gain). The data rate ``r`` maps to the threshold
``alpha = (2^(r T/(TB-1)) - 1) / snr_eff``. The pilot fraction maximizing
``snr_eff`` does not depend on ``theta`` or ``r``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .effcap import EffCapPoint, bit_energy_db, maximize_fixed_rate
from .errors import ParameterError, SolverError
from .fading import FadingModel
from .solvers import golden_section_max

#: the estimated-channel gain |w|^2 is exponential with mean 1
UNIT_EXPONENTIAL = FadingModel.rayleigh(1.0)


class GridBoundaryWarning(UserWarning):
    """The bit-energy minimum sits on the edge of the SNR grid."""


@dataclass(frozen=True)
class TrainingParams:
    gamma: float
    T: float
    B: float
    theta: float
    snr: float

    def __post_init__(self):
        for name in ("gamma", "T", "B", "snr"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ParameterError(f"{name} must be positive and finite, got {v!r}")
        if not (math.isfinite(self.theta) and self.theta >= 0):
            raise ParameterError(f"theta must be >= 0, got {self.theta!r}")
        _check_tb(self.T, self.B)


@dataclass(frozen=True)
class TrainingPoint:
    rho_opt: float
    snr_eff: float
    r_opt: float
    alpha_opt: float
    spectral_efficiency: float
    bit_energy_db: float
    stationarity_residual: float = 0.0


def _check_tb(T, B, minimum=2.0):
    if not T * B > minimum:
        raise ParameterError(f"T*B must exceed {minimum:g}, got {T * B!r}")


def frame_energies(rho, pbar, T, B):
    """Pilot energy ``rho P T`` and per-data-symbol energy ``(1-rho) P T/(TB-1)``."""
    return rho * pbar * T, (1.0 - rho) * pbar * T / (T * B - 1.0)


def mmse_variances(pilot_energy, gamma, n0=1.0):
    """Variances of the MMSE estimate and of its error for one pilot.

    They always sum to ``gamma``.
    """
    denom = gamma * pilot_energy + n0
    return gamma * gamma * pilot_energy / denom, gamma * n0 / denom


def effective_snr(rho, snr, gamma, T, B):
    """SNR of the estimated-channel link for pilot fraction ``rho``."""
    rho = np.asarray(rho, dtype=float)
    if np.any((rho < 0) | (rho > 1)):
        raise ParameterError("rho must lie in [0, 1]")
    tb = T * B
    num = rho * (1.0 - rho) * (gamma * tb * snr) ** 2
    den = rho * gamma * tb * (tb - 2.0) * snr + gamma * tb * snr + tb - 1.0
    out = num / den
    return float(out) if out.ndim == 0 else out


def optimal_training_fraction(snr, gamma, T, B):
    """``rho_opt = sqrt(eta (eta+1)) - eta`` with
    ``eta = (g TB snr + TB - 1) / (g TB (TB-2) snr)``.

    Evaluated as ``1 / (1 + sqrt(1 + 1/eta))`` to stay exact as ``eta -> inf``.
    """
    _check_tb(T, B)
    if not (snr > 0 and gamma > 0):
        raise ParameterError("snr and gamma must be positive")
    tb = T * B
    inv_eta = gamma * tb * (tb - 2.0) * snr / (gamma * tb * snr + tb - 1.0)
    return 1.0 / (1.0 + math.sqrt(1.0 + inv_eta))


def lowpower_snr_eff_coefficient(gamma, T, B):
    """Limit of ``snr_eff(rho_opt) / snr^2`` as ``snr -> 0``: ``g^2 (TB)^2 / (4 (TB-1))``."""
    _check_tb(T, B, minimum=1.0)
    tb = T * B
    return gamma * gamma * tb * tb / (4.0 * (tb - 1.0))


def optimize_given_snr_eff(theta, T, B, snr, snr_eff, rate_scale=None) -> EffCapPoint:
    """Best fixed rate on the estimated-channel link.

    ``snr`` only enters the reported bit energy. ``rate_scale`` defaults to
    ``T/(TB-1)``; passing ``1/B`` removes the pilot overhead, which makes
    the problem identical to perfect CSI in Rayleigh fading at ``snr_eff``.
    """
    scale = T / (T * B - 1.0) if rate_scale is None else rate_scale
    point = maximize_fixed_rate(theta, T, B, snr_eff, UNIT_EXPONENTIAL, rate_scale=scale)
    return EffCapPoint(point.r_opt, point.alpha_opt, point.spectral_efficiency,
                       bit_energy_db(snr, point.spectral_efficiency),
                       point.stationarity_residual, point.local_maxima)


def optimize_rate_training(params: TrainingParams) -> TrainingPoint:
    """Optimal pilot fraction, then the optimal fixed rate given that estimate."""
    p = params
    rho = optimal_training_fraction(p.snr, p.gamma, p.T, p.B)
    s_eff = effective_snr(rho, p.snr, p.gamma, p.T, p.B)
    if s_eff > 0:
        try:
            pt = optimize_given_snr_eff(p.theta, p.T, p.B, p.snr, s_eff)
        except SolverError:
            # objective underflows everywhere: nothing gets through
            pt = None
        if pt is not None and pt.spectral_efficiency > 0:
            return TrainingPoint(rho, s_eff, pt.r_opt, pt.alpha_opt, pt.spectral_efficiency,
                                 pt.bit_energy_db, pt.stationarity_residual)
    return TrainingPoint(rho, s_eff, 0.0, math.inf, 0.0, math.inf, 0.0)


def training_bit_energy_db(snr, theta, T, B, gamma=1.0) -> float:
    return optimize_rate_training(TrainingParams(gamma, T, B, theta, snr)).bit_energy_db


def default_snr_grid(points: int = 60, decades: float = 5.0, hi: float = 10.0):
    """Log-spaced SNR grid, 60 points over 5 decades ending at ``hi``."""
    return np.geomspace(hi / 10.0 ** decades, hi, points)


@dataclass(frozen=True)
class BitEnergyScan:
    snr_star: float
    eb_min_db: float
    snr: np.ndarray
    eb_db: np.ndarray
    interior: bool


def min_bit_energy_scan(theta, T, B, gamma=1.0, snr_grid=None) -> BitEnergyScan:
    """Locate the SNR where the estimated-channel bit energy is smallest.

    The grid minimum is refined by golden-section search in ``log snr``
    between its two neighbours. A minimum on the grid edge is returned as is
    with a :class:`GridBoundaryWarning`.
    """
    snr = np.sort(np.asarray(default_snr_grid() if snr_grid is None else snr_grid, dtype=float))
    if snr.ndim != 1 or snr.size < 3 or np.any(snr <= 0):
        raise ParameterError("snr grid needs at least 3 positive points")
    if np.any(np.diff(snr) <= 0):
        raise ParameterError("snr grid points must be distinct")
    eb = np.array([training_bit_energy_db(s, theta, T, B, gamma) for s in snr])
    k = int(np.argmin(eb))
    if k == 0 or k == snr.size - 1:
        warnings.warn(f"bit-energy minimum at grid edge snr={snr[k]:g}; widen the grid",
                      GridBoundaryWarning, stacklevel=2)
        return BitEnergyScan(float(snr[k]), float(eb[k]), snr, eb, False)
    u, neg = golden_section_max(
        lambda v: -training_bit_energy_db(math.exp(v), theta, T, B, gamma),
        math.log(snr[k - 1]), math.log(snr[k + 1]), xtol=1e-8)
    s_star, e_min = math.exp(u), -neg
    if e_min > eb[k]:
        s_star, e_min = float(snr[k]), float(eb[k])
    return BitEnergyScan(s_star, e_min, snr, eb, True)
