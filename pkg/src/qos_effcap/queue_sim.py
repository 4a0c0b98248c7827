"""Monte-Carlo check of the effective-capacity formalism on a buffered link.

Fluid arrivals of ``a*T`` bits enter a buffer every frame; the ON-OFF link
drains ``r*T`` bits when the frame's fading gain exceeds the outage
threshold and nothing otherwise. The backlog follows the Lindley recursion

    Q[k+1] = max(Q[k] + a*T - R[k], 0),   Q[0] = 0,

and when ``a`` equals the effective capacity at exponent ``theta`` the tail
``P{Q >= q}`` should decay like ``exp(-theta q)``. The decay rate is read
off a least-squares fit of ``log P{Q >= q}`` against ``q`` over the tail
window where the empirical ccdf lies in ``[1e-5, 1e-2]``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .effcap import SystemParams, effective_capacity_theta0, log_mgf_per_frame, optimize_rate
from .errors import EstimationError, ParameterError
from .fading import FadingModel, make_stream

DEFAULT_FRAMES = 10_000_000
FIT_WINDOW = (1e-5, 1e-2)
MIN_LEVELS = 10
#: bounds on theta_hat/theta accepted by the validation run
RATIO_BOUNDS = (0.85, 1.15)
MGF_TOL = 1e-9


@dataclass(frozen=True)
class QueueTrace:
    """Backlog at every frame boundary, ``Q[0..N]``, and the ``N`` ON/OFF states."""

    queue_samples: np.ndarray
    on_state: np.ndarray
    #: (arrival_rate, rate, alpha, model, T, seed, index, n_frames)
    params_echo: tuple = field(compare=False)

    @property
    def n_frames(self) -> int:
        return int(self.on_state.size)


@dataclass(frozen=True)
class DecayEstimate:
    theta_hat: float
    fit_range: tuple
    r_squared: float
    n_frames: int
    n_levels: int = 0


def lindley_recursion(increments, q0: float = 0.0) -> np.ndarray:
    """Run ``Q <- max(Q + d, 0)`` over ``increments``; returns ``Q[0..N]``.

    A plain Python loop keeps the floating-point operation order fixed, so
    the same increments always give bit-identical backlogs.
    """
    q = float(q0)
    out = [q]
    append = out.append
    for d in increments.tolist() if isinstance(increments, np.ndarray) else increments:
        q = q + d
        if q < 0.0:
            q = 0.0
        append(q)
    return np.asarray(out, dtype=float)


def frame_increments(arrival_rate, rate, T, on_state) -> np.ndarray:
    """``a*T - R[k]`` with ``R[k] = r*T`` in ON frames."""
    a_t = arrival_rate * T
    d_on = a_t - rate * T
    return np.where(on_state, d_on, a_t)


def simulate_queue(arrival_rate: float, rate: float, model: FadingModel, alpha: float, T: float,
                   n_frames: int = DEFAULT_FRAMES, seed: int = 0, index: int = 0) -> QueueTrace:
    """Simulate ``n_frames`` frames of the buffered ON-OFF link.

    Fading gains come from stream ``index`` of ``seed`` (one draw per
    frame), so the trace is fully determined by its arguments.
    """
    if arrival_rate < 0 or rate < 0:
        raise ParameterError("arrival rate and service rate must be >= 0")
    if alpha < 0 or T <= 0:
        raise ParameterError("need alpha >= 0 and T > 0")
    if int(n_frames) != n_frames or n_frames < 1:
        raise ParameterError(f"n_frames must be a positive integer, got {n_frames!r}")
    n_frames = int(n_frames)
    gains = model.sample(make_stream(seed, index), n_frames)
    on = gains > alpha
    q = lindley_recursion(frame_increments(arrival_rate, rate, T, on))
    echo = (float(arrival_rate), float(rate), float(alpha), str(model), float(T), seed, index, n_frames)
    return QueueTrace(q, on, echo)


def replay_gains(trace: QueueTrace) -> np.ndarray:
    """Regenerate the fading gains that drove ``trace``."""
    from .fading import parse_model

    _, _, _, model, _, seed, index, n = trace.params_echo
    return parse_model(model).sample(make_stream(seed, index), n)


def fit_tail_decay(samples, window=FIT_WINDOW, min_levels: int = MIN_LEVELS) -> DecayEstimate:
    """Fit ``log P{Q >= q} = c - theta q`` over the levels whose ccdf is in ``window``."""
    lo, hi = window
    if not (0 < lo < hi <= 1):
        raise ParameterError(f"fit window must satisfy 0 < lo < hi <= 1, got {window!r}")
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n == 0 or not np.any(x > 0):
        raise EstimationError("queue never builds up; raise the arrival rate or run longer")
    levels, counts = np.unique(x, return_counts=True)
    # P{Q >= level}: counts at or above each distinct level
    ccdf = np.cumsum(counts[::-1])[::-1] / n
    sel = (ccdf >= lo) & (ccdf <= hi) & (levels > 0)
    k = int(sel.sum())
    if k < min_levels:
        raise EstimationError(
            f"only {k} distinct queue levels with tail mass in [{lo:g}, {hi:g}] "
            f"(need {min_levels}); run more frames or raise the arrival rate")
    q, y = levels[sel], np.log(ccdf[sel])
    slope, intercept = np.polyfit(q, y, 1)
    resid = y - (slope * q + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 0.0
    return DecayEstimate(float(-slope), (float(q[0]), float(q[-1])), r2, n, k)


def estimate_decay_rate(trace: QueueTrace, window=FIT_WINDOW, min_levels: int = MIN_LEVELS) -> DecayEstimate:
    """Tail decay rate of the backlog ``Q[1..N]`` of a simulated trace.

    A queue that never empties during the second half of the run is
    treated as unstable and rejected.
    """
    q = trace.queue_samples[1:]
    if q.size and not np.any(q[q.size // 2:] == 0.0):
        raise EstimationError("queue never empties in the second half of the run; "
                              "the arrival rate exceeds what the link sustains")
    est = fit_tail_decay(q, window, min_levels)
    return DecayEstimate(est.theta_hat, est.fit_range, est.r_squared, trace.n_frames, est.n_levels)


def delay_ccdf(trace: QueueTrace, delays) -> np.ndarray:
    """Empirical ``P{D >= d}`` (``d`` in frames) for the bits queued at frame ends.

    The backlog left after frame ``k`` is cleared once the service of later
    frames adds up to it; frames whose backlog is still pending at the end
    of the run are left out.
    """
    rate, T = trace.params_echo[1], trace.params_echo[4]
    service = np.concatenate(([0.0], np.cumsum(np.where(trace.on_state, rate * T, 0.0))))
    backlog = trace.queue_samples[1:]
    start = service[1:]
    done = np.searchsorted(service, start + backlog, side="left")
    frames = np.arange(1, backlog.size + 1)
    ok = done < service.size
    wait = (done - frames)[ok]
    d = np.asarray(delays, dtype=float)
    if wait.size == 0:
        return np.full(d.shape, np.nan)
    wait = np.sort(wait)
    return 1.0 - np.searchsorted(wait, d, side="left") / wait.size


def empirical_log_mgf(theta, rate, T, model: FadingModel, alpha, t: int = 10,
                      replicas: int = 10_000, seed: int = 0):
    """Estimate ``(1/t) log E exp(-theta S[t])`` from independent replicas.

    Returns ``(estimate, standard_error)``, the error from the delta method.
    All replicas are drawn from a single stream in one array. The relative
    variance of ``exp(-theta S[t])`` grows geometrically in ``t``, so short
    horizons give the more trustworthy error bars.
    """
    if replicas < 2 or t < 1:
        raise ParameterError("need replicas >= 2 and t >= 1")
    gains = model.sample(make_stream(seed), (replicas, t))
    s = rate * T * np.count_nonzero(gains > alpha, axis=1)
    w = np.exp(-theta * s)
    m = float(w.mean())
    se = float(w.std(ddof=1)) / math.sqrt(replicas)
    return math.log(m) / t, se / (m * t)


@dataclass(frozen=True)
class ValidationReport:
    theta: float
    r_opt: float
    alpha_opt: float
    spectral_efficiency: float
    arrival_rate: float
    estimate: DecayEstimate | None
    ratio: float
    mgf_error: float
    stable: bool
    passed: bool
    #: ((d, P{D >= d}), ...) for a few delays, informational only
    delay_tail: tuple = field(default=(), compare=False)


def validate_effective_capacity(theta: float, snr: float, T: float, B: float, model: FadingModel,
                                n_frames: int = DEFAULT_FRAMES, seed: int = 0,
                                arrival_scale: float = 1.0, arrival_rate: float | None = None,
                                window=FIT_WINDOW) -> ValidationReport:
    """Feed the link with a constant load equal to its effective capacity and
    compare the simulated tail decay with ``theta``.

    The load is ``arrival_scale * R_E * B`` unless ``arrival_rate`` is given.
    An analytically unstable load (mean drift >= 0) is reported with
    ``stable=False`` and no estimate.
    """
    if not theta > 0:
        raise ParameterError("validation needs theta > 0")
    point = optimize_rate(SystemParams(T, B, theta, snr), model)
    r = point.r_opt
    p_on = model.ccdf(point.alpha_opt)
    capacity = point.spectral_efficiency * B
    a = arrival_scale * capacity if arrival_rate is None else float(arrival_rate)
    if a < 0:
        raise ParameterError("arrival rate must be >= 0")

    frame_bits = -float(log_mgf_per_frame(r, theta, T, p_on)) / theta
    mgf_error = abs(frame_bits - capacity * T) / (capacity * T)
    stable = bool(a * T - r * T * p_on < 0)

    trace = simulate_queue(a, r, model, point.alpha_opt, T, n_frames, seed)
    estimate, ratio = None, math.nan
    try:
        estimate = estimate_decay_rate(trace, window)
        ratio = estimate.theta_hat / theta
    except EstimationError:
        if stable:
            raise
    delays = (1, 2, 5, 10, 20)
    tail = tuple(zip(delays, (float(v) for v in delay_ccdf(trace, delays)))) if stable else ()
    passed = bool(estimate is not None and stable and RATIO_BOUNDS[0] <= ratio <= RATIO_BOUNDS[1]
              and mgf_error <= MGF_TOL)
    return ValidationReport(theta, r, point.alpha_opt, point.spectral_efficiency, a, estimate,
                            ratio, mgf_error, stable, passed, tail)


def theta0_throughput(snr: float, B: float, model: FadingModel) -> float:
    """Largest mean service rate (bits/s) of the ON-OFF link over all fixed rates."""
    return effective_capacity_theta0(snr, B, model) * B


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

TRACE_HEADER = "frame,queue_bits,on_state"
DECAY_HEADER = "theta_hat,q_lo,q_hi,r2,n_frames"


def write_trace_csv(trace: QueueTrace, fh) -> None:
    """One row per frame: backlog at the start of the frame and its ON state."""
    fh.write(TRACE_HEADER + "\n")
    q = trace.queue_samples.tolist()
    on = trace.on_state.tolist()
    buf = io.StringIO()
    for k in range(len(on)):
        buf.write(f"{k},{q[k]!r},{int(on[k])}\n")
    fh.write(buf.getvalue())


def decay_record(est: DecayEstimate) -> str:
    """Header line plus the single-line record for ``est``."""
    return (f"{DECAY_HEADER}\n{est.theta_hat!r},{est.fit_range[0]!r},{est.fit_range[1]!r},"
            f"{est.r_squared!r},{est.n_frames}\n")
