"""Trade-off (f-DP) curves and the numeric plumbing built on top of them.

A trade-off curve f maps a type-I error level x in [0, 1] to the smallest
achievable type-II error of any test distinguishing two neighboring runs of a
mechanism.  Perfect privacy is f(x) = 1 - x; weaker privacy pushes the curve
toward 0.  This module provides the (eps, delta) and Gaussian curves, the
tau-shift used to absorb simulator error, inversion of fbar(x) = 1 - f(x),
and extraction of eps(delta) from a curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import ndtr, ndtri


class TradeoffError(ValueError):
    """Raised when an input is outside the domain of a trade-off operation."""


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise TradeoffError(f"{name} must lie in [0, 1], got {value}")


def _check_unit_array(name: str, value: np.ndarray) -> None:
    if value.size and (value.min() < 0.0 or value.max() > 1.0):
        raise TradeoffError(f"{name} must lie in [0, 1]")


class TradeoffFunction:
    """Base class for trade-off curves; subclasses implement ``eval``."""

    def eval(self, x):
        """Evaluate the curve at x (scalar or array in [0, 1])."""
        raise NotImplementedError

    def __call__(self, x):
        return self.eval(x)

    def shift(self, tau: float) -> "TradeoffFunction":
        return shift_tradeoff(self, tau)

    def fbar_inverse(self, r: float) -> float:
        """sup{x in [0,1] : 1 - f(x) <= r}; generic bisection fallback.

        Subclasses with closed-form inverses override this; the bisection
        route stays available as ``fbar_inverse_bisect`` for cross-checking.
        """
        return fbar_inverse_bisect(self, r)


def fbar_inverse_bisect(f: TradeoffFunction, r: float,
                        tol: float = 1e-12, max_iter: int = 100) -> float:
    """Invert fbar(x) = 1 - f(x) by bisection on the non-decreasing map."""
    _check_unit("r", r)

    def fbar(x: float) -> float:
        return 1.0 - float(f.eval(x))

    if fbar(1.0) <= r:
        return 1.0
    if fbar(0.0) > r:
        return 0.0
    lo, hi = 0.0, 1.0  # invariant: fbar(lo) <= r < fbar(hi)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if fbar(mid) <= r:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class EpsDeltaTradeoff(TradeoffFunction):
    """The symmetrized (eps, delta)-DP trade-off curve.

    f(x) = max(0, 1 - delta - e^eps * x, e^-eps * (1 - delta - x)).
    The second linear branch plus the 0-clip make the curve a valid
    trade-off function (non-increasing, convex, f(x) <= 1 - x).
    """

    eps: float
    delta: float = 0.0

    def __post_init__(self):
        if self.eps < 0:
            raise TradeoffError(f"eps must be non-negative, got {self.eps}")
        _check_unit("delta", self.delta)

    def eval(self, x):
        xs = np.asarray(x, dtype=float)
        _check_unit_array("x", xs)
        a = 1.0 - self.delta - math.exp(self.eps) * xs
        b = math.exp(-self.eps) * (1.0 - self.delta - xs)
        out = np.maximum(0.0, np.maximum(a, b))
        return float(out) if np.isscalar(x) or xs.ndim == 0 else out

    def fbar_inverse(self, r: float) -> float:
        _check_unit("r", r)
        if r >= 1.0:
            return 1.0
        # fbar = min(1, delta + e^eps x, 1 - e^-eps(1 - delta - x)); below the
        # cap, fbar(x) <= r iff x is below the larger of the two branch roots.
        x1 = (r - self.delta) * math.exp(-self.eps)
        x2 = 1.0 - self.delta - math.exp(self.eps) * (1.0 - r)
        return min(1.0, max(0.0, x1, x2))


@dataclass(frozen=True)
class GaussianTradeoff(TradeoffFunction):
    """mu-GDP curve f(x) = Phi(Phi^-1(1 - x) - mu)."""

    mu: float

    def __post_init__(self):
        if self.mu < 0:
            raise TradeoffError(f"mu must be non-negative, got {self.mu}")

    def eval(self, x):
        xs = np.asarray(x, dtype=float)
        _check_unit_array("x", xs)
        # Phi^-1(1 - x) = -Phi^-1(x); this form stays accurate for tiny x.
        out = ndtr(-(ndtri(xs) + self.mu))
        return float(out) if np.isscalar(x) or xs.ndim == 0 else out

    def fbar_inverse(self, r: float) -> float:
        _check_unit("r", r)
        if r <= 0.0:
            return 0.0
        if r >= 1.0:
            return 1.0
        # fbar(x) = Phi(Phi^-1(x) + mu), so the inverse is exact:
        return float(ndtr(ndtri(r) - self.mu))


@dataclass(frozen=True)
class ShiftedTradeoff(TradeoffFunction):
    """g(s) = base(min(1, s + tau)): the shift absorbing simulator error.

    Not necessarily a valid trade-off curve near 0 (g(0) = base(tau) < 1)
    nor convex at the clip point; it is only ever consumed by the audit
    recursion, which needs monotonicity alone.
    """

    base: TradeoffFunction
    tau: float

    def __post_init__(self):
        _check_unit("tau", self.tau)

    def eval(self, x):
        xs = np.asarray(x, dtype=float)
        _check_unit_array("x", xs)
        out = self.base.eval(np.minimum(1.0, xs + self.tau))
        return float(out) if np.isscalar(x) or xs.ndim == 0 else out

    def fbar_inverse(self, r: float) -> float:
        _check_unit("r", r)
        if 1.0 - float(self.base.eval(1.0)) <= r:
            return 1.0
        return max(0.0, self.base.fbar_inverse(r) - self.tau)


@dataclass(frozen=True)
class GaussianFamily:
    """Totally ordered family {f_mu : mu in [mu_min, mu_max]} for eps search.

    Smaller mu means stronger privacy: f_mu1 >= f_mu2 pointwise for mu1 < mu2.
    The default range covers eps(1e-5) up to roughly 60.
    """

    mu_min: float = 1e-4
    mu_max: float = 20.0
    tolerance: float = 1e-3

    def __post_init__(self):
        if not 0 < self.mu_min < self.mu_max:
            raise TradeoffError("need 0 < mu_min < mu_max")
        if self.tolerance <= 0:
            raise TradeoffError("tolerance must be positive")

    def curve(self, mu: float) -> GaussianTradeoff:
        return GaussianTradeoff(mu)


def eval_eps_delta(eps: float, delta: float, x):
    """Evaluate the (eps, delta) trade-off curve at x."""
    return EpsDeltaTradeoff(eps, delta).eval(x)


def eval_gaussian(mu: float, x):
    """Evaluate the mu-GDP trade-off curve at x."""
    return GaussianTradeoff(mu).eval(x)


def shift_tradeoff(f: TradeoffFunction, tau: float) -> TradeoffFunction:
    """Return g with g(s) = f(min(1, s + tau))."""
    _check_unit("tau", tau)
    if tau == 0.0:
        return f
    return ShiftedTradeoff(f, tau)


def fbar_inverse(f: TradeoffFunction, r: float) -> float:
    """sup{x in [0,1] : 1 - f(x) <= r}."""
    return f.fbar_inverse(r)


def eps_from_tradeoff(f: TradeoffFunction, delta: float,
                      grid_size: int = 10_000,
                      x_min: float | None = None) -> float:
    """max(0, sup_x log((1 - f(x) - delta) / x)) over x in (0, 1].

    Dense log-spaced grid (suprema for (eps, delta) curves sit near x -> 0)
    followed by a bounded local refinement around the best grid point.  When
    delta > 0 the grid reaches far into the tiny-x tail where Gaussian
    suprema live; grid points whose numerator sits at the double-precision
    cancellation floor are discarded, since their ratio is pure noise.
    """
    if not 0.0 <= delta < 1.0:
        raise TradeoffError(f"delta must lie in [0, 1), got {delta}")
    if x_min is None:
        # with delta = 0 the numerator scales like x itself, so going far
        # below 1e-12 only amplifies rounding noise; with sizable delta the
        # numerator stays of order delta and tiny x is safe
        x_min = 1e-12 if delta < 1e-8 else 1e-60
    xs = np.logspace(math.log10(x_min), 0.0, grid_size)
    numerators = 1.0 - np.asarray(f.eval(xs)) - delta
    ratios = np.where(numerators > 1e-13, numerators / xs, 0.0)
    i = int(np.argmax(ratios))
    best = float(ratios[i])

    lo = xs[max(i - 1, 0)]
    hi = xs[min(i + 1, grid_size - 1)]
    if best > 0.0 and hi > lo:

        def negated(x):
            num = 1.0 - float(f.eval(x)) - delta
            return -(num / x) if num > 1e-13 else 0.0

        res = minimize_scalar(negated, bounds=(lo, hi), method="bounded",
                              options={"xatol": max(1e-70, lo * 1e-6)})
        best = max(best, -float(res.fun))
    if best <= 1.0:
        return 0.0
    return math.log(best)
