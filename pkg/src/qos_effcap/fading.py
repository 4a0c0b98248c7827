"""Distributions of the block-fading power gain ``z = |h|^2``.

Three parameterizations are supported, all of them members of the Gamma
family with shape ``k`` and rate ``lam``:

* ``rayleigh:gamma=g``  -- exponential with mean ``g`` (k = 1, lam = 1/g)
* ``nakagami:m=m``      -- unit-mean Gamma with k = lam = m
* ``gamma:n=n,lambda=l`` -- integer shape ``n``, rate ``l``

Integer shapes use the finite-sum tail
``P{z > x} = exp(-lam x) sum_{j<k} (lam x)^j / j!``; non-integer shapes use
the regularized upper incomplete gamma function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, ParameterError, SingularityError

_KINDS = ("rayleigh", "nakagami", "gamma")


@dataclass(frozen=True)
class FadingModel:
    """Power-gain distribution; build instances with the class constructors."""

    kind: str
    shape: float
    rate: float

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParameterError(f"unknown fading kind {self.kind!r}")
        if not (math.isfinite(self.shape) and self.shape > 0):
            raise ParameterError(f"shape must be positive, got {self.shape!r}")
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ParameterError(f"rate must be positive, got {self.rate!r}")
        if self.kind == "rayleigh" and self.shape != 1.0:
            raise ParameterError("rayleigh fading has unit shape")
        if self.kind == "nakagami" and self.shape != self.rate:
            raise ParameterError("nakagami fading is normalized to unit mean")
        if self.kind == "gamma" and self.shape != int(self.shape):
            raise ParameterError(f"gamma fading needs integer n, got {self.shape!r}")

    # -- constructors ---------------------------------------------------
    @classmethod
    def rayleigh(cls, gamma: float = 1.0) -> "FadingModel":
        if not (gamma > 0 and math.isfinite(gamma)):
            raise ParameterError(f"mean gain gamma must be positive, got {gamma!r}")
        return cls("rayleigh", 1.0, 1.0 / float(gamma))

    @classmethod
    def nakagami(cls, m: float) -> "FadingModel":
        if not (m > 0 and math.isfinite(m)):
            raise ParameterError(f"nakagami m must be positive, got {m!r}")
        return cls("nakagami", float(m), float(m))

    @classmethod
    def gamma(cls, n: int, lam: float) -> "FadingModel":
        if isinstance(n, float) and not n.is_integer():
            raise ParameterError(f"gamma fading needs integer n, got {n!r}")
        if int(n) < 1:
            raise ParameterError(f"gamma fading needs n >= 1, got {n!r}")
        if not (lam > 0 and math.isfinite(lam)):
            raise ParameterError(f"lambda must be positive, got {lam!r}")
        return cls("gamma", float(int(n)), float(lam))

    # -- properties -------------------------------------------------------
    @property
    def mean(self) -> float:
        return self.shape / self.rate

    @property
    def integer_shape(self) -> bool:
        """True when the finite-sum tail (and the uniqueness theorem) applies."""
        return float(self.shape).is_integer()

    def __str__(self) -> str:
        if self.kind == "rayleigh":
            return f"rayleigh:gamma={_fmt(1.0 / self.rate)}"
        if self.kind == "nakagami":
            return f"nakagami:m={_fmt(self.shape)}"
        return f"gamma:n={int(self.shape)},lambda={_fmt(self.rate)}"

    # -- distribution functions -------------------------------------------
    def pdf(self, x):
        """Density ``p_z(x)``; scalar in, float out, array in, array out."""
        xa = _check_nonneg(x)
        k, lam = self.shape, self.rate
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            logp = k * math.log(lam) + (k - 1.0) * np.log(xa) - lam * xa - special.gammaln(k)
            out = np.exp(logp)
        if k == 1.0:
            out = np.where(xa == 0.0, lam, out)
        elif k > 1.0:
            out = np.where(xa == 0.0, 0.0, out)
        else:
            out = np.where(xa == 0.0, np.inf, out)
        out = np.where(np.isinf(xa), 0.0, out)
        return _ret(out, x)

    def ccdf(self, x):
        """Tail probability ``P{z > x}``."""
        xa = _check_nonneg(x)
        k, lam = self.shape, self.rate
        if self.integer_shape:
            out = _finite_sum_tail(int(k), lam * xa)
        else:
            out = special.gammaincc(k, lam * xa)
        return _ret(np.clip(out, 0.0, 1.0), x)

    def cdf(self, x):
        """``P{z <= x}``, accurate for small ``x`` where ``1 - ccdf`` would cancel."""
        xa = _check_nonneg(x)
        k, lam = self.shape, self.rate
        if k == 1.0:
            out = -np.expm1(-lam * xa)
        else:
            out = special.gammainc(k, lam * xa)
        return _ret(out, x)

    def hazard_ratio(self, x):
        """``P{z > x} / p_z(x)``; raises :class:`SingularityError` where ``p_z = 0``."""
        p = np.asarray(self.pdf(x), dtype=float)
        if np.any(p == 0.0):
            xs = np.ravel(np.broadcast_to(np.asarray(x, dtype=float), p.shape))
            first = float(xs[np.argmax(np.ravel(p == 0.0))])
            raise SingularityError(f"density vanishes at x={first!r}", x=first)
        return _ret(np.asarray(self.ccdf(x)) / p, x)

    # -- sampling -----------------------------------------------------------
    def sample(self, stream: np.random.Generator, size=None):
        """Draw i.i.d. gains from ``stream``.

        Unit-shape models use inverse transform ``-log(1 - U) / lam`` on the
        stream's uniform doubles; other shapes use NumPy's standard-gamma
        sampler (Marsaglia-Tsang) scaled by ``1/lam``. Both consume the stream
        deterministically, so a fixed seed fixes the sequence.
        """
        if self.shape == 1.0:
            u = stream.random(size)
            return -np.log1p(-u) / self.rate
        return stream.standard_gamma(self.shape, size) / self.rate


def make_stream(seed: int, index: int = 0) -> np.random.Generator:
    """PCG64 generator for replica ``index`` of master ``seed``.

    Distinct ``index`` values give statistically independent streams
    (``SeedSequence`` spawn keys), so parallel replicas never share state.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def parse_model(text: str) -> FadingModel:
    """Parse ``rayleigh:gamma=1.0``, ``nakagami:m=2`` or ``gamma:n=3,lambda=3``."""
    if not isinstance(text, str) or not text.strip():
        raise ParameterError("empty fading model specification")
    head, _, tail = text.strip().lower().partition(":")
    kind = head.strip()
    params = {}
    if tail.strip():
        for item in tail.split(","):
            key, eq, value = item.partition("=")
            key = key.strip()
            if not eq or not key:
                raise ParameterError(f"malformed parameter {item!r} in {text!r}")
            if key in params:
                raise ParameterError(f"duplicate key {key!r} in {text!r}")
            try:
                params[key] = float(value)
            except ValueError:
                raise ParameterError(f"non-numeric value for {key!r} in {text!r}") from None

    allowed = {"rayleigh": {"gamma"}, "nakagami": {"m"}, "gamma": {"n", "lambda"}}
    if kind not in allowed:
        raise ParameterError(f"unknown fading model {kind!r}")
    unknown = set(params) - allowed[kind]
    if unknown:
        raise ParameterError(f"unknown key(s) {sorted(unknown)} for {kind} model")

    if kind == "rayleigh":
        return FadingModel.rayleigh(params.get("gamma", 1.0))
    if kind == "nakagami":
        if "m" not in params:
            raise ParameterError("nakagami model requires m")
        return FadingModel.nakagami(params["m"])
    missing = {"n", "lambda"} - set(params)
    if missing:
        raise ParameterError(f"gamma model requires {sorted(missing)}")
    n = params["n"]
    if not n.is_integer():
        raise ParameterError(f"gamma model needs integer n, got {n!r}")
    return FadingModel.gamma(int(n), params["lambda"])


#: beyond this the leading term exp(-y) of the finite sum leaves the normal range
_DIRECT_SUM_LIMIT = 700.0


def _finite_sum_tail(n: int, y):
    # exp(-y) * sum_{j<n} y^j / j!, accumulated term by term
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        term = np.exp(-y)
        total = term.copy() if isinstance(term, np.ndarray) else term
        for j in range(1, n):
            term = term * y / j
            total = total + term
    total = np.array(total, dtype=float)
    big = np.isfinite(y) & (np.asarray(y) > _DIRECT_SUM_LIMIT)
    if np.any(big):
        # same sum with every term formed in log space
        yb = np.asarray(y, dtype=float)[big]
        j = np.arange(n, dtype=float)
        logs = j * np.log(yb)[..., None] - special.gammaln(j + 1.0) - yb[..., None]
        total[big] = np.exp(special.logsumexp(logs, axis=-1))
    return np.where(np.isinf(y), 0.0, total)


def _check_nonneg(x):
    xa = np.asarray(x, dtype=float)
    if np.any(np.isnan(xa)) or np.any(xa < 0):
        raise DomainError(f"fading gain argument must be >= 0, got {x!r}")
    return xa


def _ret(out, x):
    out = np.asarray(out, dtype=float)
    if np.ndim(x) == 0:
        return float(out)
    return out


def _fmt(v: float) -> str:
    return repr(float(v)) if not float(v).is_integer() else str(float(v))
