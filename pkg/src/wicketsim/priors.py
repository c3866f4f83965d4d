"""Gamma score priors: density, tail probability, sampling, and the grid fit.

A player's predicted score against an opponent is a shape-scale gamma
random variable. The fit takes the player's batting average as the mean
(shape = average / scale) and picks the scale from a fixed candidate grid
so that the chance of surpassing the player's recorded highest score
stays at or below a cap (default 5%).

Feasibility of the tail cap is NOT monotone in the scale: at fixed mean
the tail probability rises from ~0 (tiny scale, near-degenerate at the
mean) to a single peak and then falls back toward 0 (huge scale, mass
piled near zero with a thin far tail). The fitted scale is therefore the
end of the contiguous feasible prefix of the grid — the largest candidate
below the first violation — falling back to the smallest feasible
candidate anywhere when even the first candidate violates the cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize, special

__all__ = [
    "DomainError",
    "GammaParams",
    "FitInput",
    "BetaGrid",
    "FitResult",
    "gamma_pdf",
    "gamma_tail",
    "gamma_ppf",
    "gamma_sample",
    "fit_gamma",
    "density_table",
    "FLAG_CLAMPED_AVERAGE",
    "FLAG_UNSATISFIABLE",
    "FLAG_PREFIX_INFEASIBLE",
]

# Substitute mean for players with a zero batting average, in runs.
MIN_AVERAGE = 0.1

FLAG_CLAMPED_AVERAGE = "clamped-average"
FLAG_UNSATISFIABLE = "constraint-unsatisfiable"
FLAG_PREFIX_INFEASIBLE = "prefix-infeasible"

_BETA_RULES = ("max_feasible", "min_feasible")


class DomainError(ValueError):
    """An argument lies outside an operation's domain."""


@dataclass(frozen=True)
class GammaParams:
    """Shape-scale gamma parameters of one player-versus-opponent prior."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (isinstance(self.alpha, (int, float)) and math.isfinite(self.alpha) and self.alpha > 0):
            raise DomainError(f"shape must be finite and positive, got {self.alpha!r}")
        if not (isinstance(self.beta, (int, float)) and math.isfinite(self.beta) and self.beta > 0):
            raise DomainError(f"scale must be finite and positive, got {self.beta!r}")

    def mean(self) -> float:
        return self.alpha * self.beta

    def variance(self) -> float:
        return self.alpha * self.beta**2

    def sd(self) -> float:
        return math.sqrt(self.variance())


@dataclass(frozen=True)
class FitInput:
    """Historical summary the fit runs on: batting average and highest score."""

    average: float
    highest: int
    tail_cap: float = 0.05

    def __post_init__(self) -> None:
        if not (math.isfinite(self.average) and self.average >= 0):
            raise DomainError(f"average must be finite and non-negative, got {self.average!r}")
        if not (isinstance(self.highest, (int, np.integer)) and self.highest >= 0):
            raise DomainError(f"highest must be a non-negative integer, got {self.highest!r}")
        if self.highest < self.average:
            raise DomainError(
                f"highest score {self.highest} cannot be below the average {self.average}"
            )
        if not (0.0 < self.tail_cap < 1.0):
            raise DomainError(f"tail_cap must lie in (0, 1), got {self.tail_cap!r}")


@dataclass(frozen=True)
class BetaGrid:
    """Uniform grid of scale candidates, endpoints inclusive."""

    lo: float = 0.01
    hi: float = 5000.0
    count: int = 50_000

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and self.lo > 0):
            raise DomainError(f"grid lo must be finite and positive, got {self.lo!r}")
        if not (math.isfinite(self.hi) and self.hi > self.lo):
            raise DomainError(f"grid hi must exceed lo, got lo={self.lo!r} hi={self.hi!r}")
        if not (isinstance(self.count, int) and self.count >= 2):
            raise DomainError(f"grid count must be an integer >= 2, got {self.count!r}")

    def candidate(self, k: int) -> float:
        """Candidate k (0-indexed): lo + k * (hi - lo) / (count - 1)."""
        if not 0 <= k < self.count:
            raise DomainError(f"candidate index {k} outside [0, {self.count})")
        return self.lo + k * (self.hi - self.lo) / (self.count - 1)

    def candidates(self) -> np.ndarray:
        """All candidates, strictly increasing."""
        return _grid_candidates(self.lo, self.hi, self.count)


@lru_cache(maxsize=8)
def _grid_candidates(lo: float, hi: float, count: int) -> np.ndarray:
    values = lo + np.arange(count, dtype=np.float64) * ((hi - lo) / (count - 1))
    values.setflags(write=False)
    return values


@dataclass(frozen=True)
class FitResult:
    """Fitted prior plus metadata about clamping and constraint feasibility."""

    params: GammaParams
    beta_index: int
    flags: frozenset[str] = frozenset()

    @property
    def alpha(self) -> float:
        return self.params.alpha

    @property
    def beta(self) -> float:
        return self.params.beta


def _check_params(params: GammaParams) -> None:
    if not isinstance(params, GammaParams):
        raise DomainError(f"expected GammaParams, got {type(params).__name__}")


def gamma_pdf(x: float, params: GammaParams) -> float:
    """Density (1 / (Γ(α) β^α)) x^(α-1) e^(-x/β) at x >= 0.

    For α < 1 the density diverges at the origin, so gamma_pdf(0, ...)
    returns inf there.
    """
    _check_params(params)
    if not (isinstance(x, (int, float)) and math.isfinite(x)):
        raise DomainError(f"x must be finite, got {x!r}")
    if x < 0:
        raise DomainError(f"x must be non-negative, got {x!r}")
    a, b = params.alpha, params.beta
    if x == 0.0:
        if a > 1.0:
            return 0.0
        if a == 1.0:
            return 1.0 / b
        return math.inf
    log_pdf = (a - 1.0) * math.log(x) - x / b - math.lgamma(a) - a * math.log(b)
    return math.exp(log_pdf)


def gamma_tail(x: float, params: GammaParams) -> float:
    """P(X > x) for X ~ Gamma(α, β): the regularized upper incomplete gamma."""
    _check_params(params)
    if not (isinstance(x, (int, float)) and math.isfinite(x)):
        raise DomainError(f"x must be finite, got {x!r}")
    if x < 0:
        raise DomainError(f"x must be non-negative, got {x!r}")
    return float(special.gammaincc(params.alpha, x / params.beta))


def gamma_ppf(u: float, params: GammaParams) -> float:
    """Inverse CDF: the score at cumulative probability u in (0, 1)."""
    _check_params(params)
    if not 0.0 < u < 1.0:
        raise DomainError(f"u must lie strictly in (0, 1), got {u!r}")
    return float(special.gammaincinv(params.alpha, u)) * params.beta


def gamma_sample(params: GammaParams, rng: np.random.Generator, size: int | None = None):
    """Draw from Gamma(α, β), advancing the stream deterministically."""
    _check_params(params)
    return rng.gamma(shape=params.alpha, scale=params.beta, size=size)


def _tail_at(average: float, highest: float, betas: np.ndarray) -> np.ndarray:
    """Vectorized P(X > highest) across scale candidates at fixed mean."""
    return special.gammaincc(average / betas, highest / betas)


def _refine_flip(
    average: float, highest: float, cap: float, grid: BetaGrid, left: int, right: int
) -> int:
    """Exact index of the first candidate in (left, right] whose feasibility
    differs from candidate `left`'s. Both bounds are grid indices and the
    flip is known to occur in the interval."""
    idx = np.arange(left, right + 1)
    feas = _tail_at(average, highest, grid.candidates()[idx]) <= cap
    flips = np.nonzero(feas != feas[0])[0]
    return int(idx[flips[0]])


def _feasibility_transitions(
    average: float, highest: float, cap: float, grid: BetaGrid
) -> tuple[int | None, int | None]:
    """Locate (first_infeasible, first_feasible) indices on the grid.

    Relies on the tail being unimodal in the scale at fixed mean, so the
    infeasible set {tail > cap} is one contiguous index band. A coarse
    vectorized scan finds the band's neighborhood; flips are refined to
    exact indices; a coarse scan that sees no violation is double-checked
    at the continuous tail peak in case the band is narrower than the
    coarse spacing.
    """
    candidates = grid.candidates()
    n = grid.count
    coarse = np.unique(np.linspace(0, n - 1, num=min(n, 1025)).astype(np.int64))
    feasible = _tail_at(average, highest, candidates[coarse]) <= cap

    if feasible.all():
        peak = optimize.minimize_scalar(
            lambda b: -_tail_at(average, highest, np.asarray([b]))[0],
            bounds=(grid.lo, grid.hi),
            method="bounded",
            options={"xatol": (grid.hi - grid.lo) / (4.0 * (n - 1))},
        )
        if -peak.fun <= cap:
            return None, 0
        # Narrow infeasible band hiding between coarse points around the peak;
        # refine the adjacent coarse intervals on both sides of it.
        k = int(np.searchsorted(candidates, peak.x))
        pos = np.searchsorted(coarse, k, side="right") - 1
        left = int(coarse[max(pos - 1, 0)])
        right = int(coarse[min(pos + 2, len(coarse) - 1)])
        idx = np.arange(left, right + 1)
        band = np.nonzero(_tail_at(average, highest, candidates[idx]) > cap)[0]
        if band.size == 0:
            return None, 0
        return int(idx[band[0]]), 0

    if not feasible.any():
        return 0, None

    flips = np.nonzero(feasible[1:] != feasible[:-1])[0]
    first_infeasible: int | None
    first_feasible: int | None
    if feasible[0]:
        first_feasible = 0
        pos = flips[0]
        first_infeasible = _refine_flip(average, highest, cap, grid, int(coarse[pos]), int(coarse[pos + 1]))
    else:
        first_infeasible = 0
        pos = flips[0]
        first_feasible = _refine_flip(average, highest, cap, grid, int(coarse[pos]), int(coarse[pos + 1]))
    return first_infeasible, first_feasible


def fit_gamma(
    fit_input: FitInput, grid: BetaGrid | None = None, *, beta_rule: str = "max_feasible"
) -> FitResult:
    """Fit (α, β) from an average and highest score under the tail cap.

    β comes from the candidate grid; α = average / β exactly, so the prior
    mean always reproduces the (possibly clamped) average. Under
    ``max_feasible`` the chosen β is the end of the feasible prefix (the
    candidate just before the first cap violation); under ``min_feasible``
    it is the smallest feasible candidate. When no prefix exists but some
    far candidate is feasible, both rules return the smallest feasible
    candidate and flag it; when nothing is feasible, the smallest (most
    concentrated) candidate is returned with the unsatisfiable flag.
    """
    if grid is None:
        grid = BetaGrid()
    if beta_rule not in _BETA_RULES:
        raise DomainError(f"beta_rule must be one of {_BETA_RULES}, got {beta_rule!r}")

    flags: set[str] = set()
    average = fit_input.average
    if average == 0.0:
        average = MIN_AVERAGE
        flags.add(FLAG_CLAMPED_AVERAGE)
    highest = float(fit_input.highest)
    cap = fit_input.tail_cap

    first_infeasible, first_feasible = _feasibility_transitions(average, highest, cap, grid)

    if first_feasible is None:
        index = 0
        flags.add(FLAG_UNSATISFIABLE)
    elif beta_rule == "min_feasible":
        index = first_feasible
    elif first_infeasible is None:
        index = grid.count - 1
    elif first_infeasible == 0:
        index = first_feasible
        flags.add(FLAG_PREFIX_INFEASIBLE)
    else:
        index = first_infeasible - 1

    beta = grid.candidate(index)
    return FitResult(
        params=GammaParams(alpha=average / beta, beta=beta),
        beta_index=index,
        flags=frozenset(flags),
    )


def density_table(params: GammaParams, highest: int, points: int = 512) -> np.ndarray:
    """(x, pdf(x)) rows on a uniform grid covering the prior's mass.

    The grid spans [0, 1.5 * highest], extended to the 0.999 quantile when
    the prior is wide enough that the fixed span would clip visible mass.
    """
    if points < 2:
        raise DomainError(f"points must be >= 2, got {points!r}")
    hi = max(1.5 * float(highest), gamma_ppf(0.999, params))
    xs = np.linspace(0.0, hi, num=points)
    pdf = np.array([gamma_pdf(float(x), params) for x in xs])
    return np.column_stack([xs, pdf])
