"""Single-match simulation and Monte Carlo matchup estimates.

A match is simulated by drawing an XI per team, sampling each selected
player's score from his fitted gamma prior against the opposing team,
rounding to the nearest integer (half away from zero), and comparing the
two team sums. Estimates repeat that pipeline on per-replicate RNG
substreams so results are independent of worker count and execution
order.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import special

from wicketsim.priors import BetaGrid, FitInput, FitResult, fit_gamma
from wicketsim.roster import Dataset, MatchupRecord, Role, Team, resolve_matchup
from wicketsim.selection import (
    EMPTY_CONSTRAINT,
    LineupConstraint,
    SelectionScheme,
    apply_conditions,
    sample_xi,
)
from wicketsim.streams import prf_uniform, substream

__all__ = [
    "Outcome",
    "MatchResult",
    "MatchEstimate",
    "FitOptions",
    "SimOptions",
    "PriorCache",
    "MatchEngine",
    "HeadToHead",
    "WhatIfResult",
]

# Replicates per work chunk; fixed so aggregation order never depends on
# the worker count.
_CHUNK = 512

# Substream namespace tags under the caller's seed.
_NS_REPLICATE = 0
_NS_FIXED_XI = 1


class Outcome(enum.Enum):
    A_WINS = "a"
    B_WINS = "b"
    DRAW = "draw"


@dataclass(frozen=True)
class MatchResult:
    """One simulated match: integer team scores; winner by strict comparison."""

    score_a: int
    score_b: int

    @property
    def outcome(self) -> Outcome:
        if self.score_a > self.score_b:
            return Outcome.A_WINS
        if self.score_b > self.score_a:
            return Outcome.B_WINS
        return Outcome.DRAW


@dataclass(frozen=True)
class MatchEstimate:
    """Monte Carlo win/draw estimate for an ordered team pair.

    Counts are kept as integers so the probabilities partition exactly.
    """

    team_a: str
    team_b: str
    wins_a: int
    wins_b: int
    draws: int
    n: int
    seed: int
    total_score_a: int
    total_score_b: int

    @property
    def p_a(self) -> float:
        return self.wins_a / self.n

    @property
    def p_b(self) -> float:
        return self.wins_b / self.n

    @property
    def p_draw(self) -> float:
        return self.draws / self.n

    @property
    def mean_score_a(self) -> float:
        return self.total_score_a / self.n

    @property
    def mean_score_b(self) -> float:
        return self.total_score_b / self.n

    def to_dict(self) -> dict:
        return {
            "a": self.team_a,
            "b": self.team_b,
            "p_a": self.p_a,
            "p_b": self.p_b,
            "p_draw": self.p_draw,
            "mean_score_a": self.mean_score_a,
            "mean_score_b": self.mean_score_b,
            "n": self.n,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class FitOptions:
    """How matchup records become gamma priors."""

    grid: BetaGrid = field(default_factory=BetaGrid)
    tail_cap: float = 0.05
    beta_rule: str = "max_feasible"


@dataclass(frozen=True)
class SimOptions:
    """Simulation behavior knobs shared by matches, estimates, and tournaments."""

    fit: FitOptions = field(default_factory=FitOptions)
    fixed_xi: bool = False
    common_random_numbers: bool = False
    workers: int = 1


@dataclass(frozen=True)
class CachedPrior:
    """Fitted prior for one (player, opponent) pair plus its source record."""

    record: MatchupRecord
    result: FitResult


class _TeamPriors:
    """Roster-aligned prior arrays for one (team, opponent) pairing."""

    __slots__ = ("ids", "positions", "alphas", "betas", "priors")

    def __init__(self, ids: tuple[str, ...], priors: list[CachedPrior]) -> None:
        self.ids = ids
        self.positions = {pid: i for i, pid in enumerate(ids)}
        self.alphas = np.array([p.result.alpha for p in priors])
        self.betas = np.array([p.result.beta for p in priors])
        self.priors = priors


class PriorCache:
    """Memoized per-(player, opponent) fitted priors.

    Fitting is deterministic, so caching is semantics-preserving; the
    cache also exposes roster-aligned arrays for the scoring hot path.
    """

    def __init__(self, dataset: Dataset, options: FitOptions) -> None:
        self.dataset = dataset
        self.options = options
        self._priors: dict[tuple[str, str], CachedPrior] = {}
        self._team_arrays: dict[tuple[str, str], _TeamPriors] = {}

    def lookup(self, player_id: str, opponent_id: str) -> CachedPrior:
        key = (player_id, opponent_id)
        cached = self._priors.get(key)
        if cached is None:
            record = resolve_matchup(player_id, opponent_id, self.dataset)
            result = fit_gamma(
                FitInput(
                    average=record.average,
                    highest=record.highest,
                    tail_cap=self.options.tail_cap,
                ),
                self.options.grid,
                beta_rule=self.options.beta_rule,
            )
            cached = CachedPrior(record=record, result=result)
            self._priors[key] = cached
        return cached

    def team_arrays(self, team_id: str, opponent_id: str) -> _TeamPriors:
        key = (team_id, opponent_id)
        arrays = self._team_arrays.get(key)
        if arrays is None:
            team = self.dataset.team(team_id)
            ids = tuple(sorted(p.id for p in team.roster))
            priors = [self.lookup(pid, opponent_id) for pid in ids]
            arrays = _TeamPriors(ids, priors)
            self._team_arrays[key] = arrays
        return arrays


@dataclass(frozen=True)
class WhatIfResult:
    """Estimate plus per-player selection counts for constrained what-ifs."""

    estimate: MatchEstimate
    selection_counts_a: Mapping[str, int]
    selection_counts_b: Mapping[str, int]


@dataclass(frozen=True)
class HeadToHead:
    """One MatchEstimate per ordered team pair; diagonal empty."""

    teams: tuple[str, ...]
    entries: Mapping[tuple[str, str], MatchEstimate]

    def entry(self, team_a: str, team_b: str) -> MatchEstimate:
        return self.entries[(team_a, team_b)]

    def to_dict(self) -> dict:
        return {
            "teams": list(self.teams),
            "entries": [self.entries[key].to_dict() for key in sorted(self.entries)],
        }


class _Strata:
    """Precomputed per-stratum roster positions for the fast selection path."""

    __slots__ = ("parts",)

    def __init__(self, team: Team, scheme: SelectionScheme, ids: tuple[str, ...]) -> None:
        position = {pid: i for i, pid in enumerate(ids)}
        players = sorted(team.roster, key=lambda p: p.id)
        self.parts: list[tuple[np.ndarray, int]] = []
        pool = players
        if scheme.overseas_count is not None:
            overseas = np.array([position[p.id] for p in pool if p.overseas], dtype=np.int64)
            self.parts.append((overseas, scheme.overseas_count))
            pool = [p for p in pool if not p.overseas]
        for role in Role:
            stratum = np.array([position[p.id] for p in pool if p.role is role], dtype=np.int64)
            self.parts.append((stratum, scheme.quotas[role]))


class MatchEngine:
    """Simulates matches and matchup estimates over an immutable dataset.

    The per-team selection scheme has its conditions profile applied once
    at construction. All randomness flows through explicit streams keyed
    on (seed, namespace, replicate), so identical inputs give identical
    results on any number of workers.
    """

    def __init__(
        self,
        dataset: Dataset,
        *,
        scheme: SelectionScheme | None = None,
        schemes: Mapping[str, SelectionScheme] | None = None,
        options: SimOptions | None = None,
    ) -> None:
        self.dataset = dataset
        self.options = options if options is not None else SimOptions()
        base = scheme if scheme is not None else SelectionScheme()
        self.schemes: dict[str, SelectionScheme] = {}
        for team_id in dataset.teams:
            chosen = schemes.get(team_id, base) if schemes else base
            self.schemes[team_id] = apply_conditions(chosen)
        self.cache = PriorCache(dataset, self.options.fit)
        self._strata: dict[str, _Strata] = {}

    def with_options(
        self,
        *,
        fixed_xi: bool | None = None,
        common_random_numbers: bool | None = None,
        workers: int | None = None,
    ) -> MatchEngine:
        """Shallow variant sharing the prior cache, for per-request knobs."""
        from dataclasses import replace

        clone = object.__new__(MatchEngine)
        clone.dataset = self.dataset
        clone.options = replace(
            self.options,
            fixed_xi=self.options.fixed_xi if fixed_xi is None else fixed_xi,
            common_random_numbers=(
                self.options.common_random_numbers
                if common_random_numbers is None
                else common_random_numbers
            ),
            workers=self.options.workers if workers is None else workers,
        )
        clone.schemes = self.schemes
        clone.cache = self.cache
        clone._strata = self._strata
        return clone

    # -- selection ---------------------------------------------------------

    def _strata_for(self, team_id: str) -> _Strata:
        strata = self._strata.get(team_id)
        if strata is None:
            team = self.dataset.team(team_id)
            ids = tuple(sorted(p.id for p in team.roster))
            strata = _Strata(team, self.schemes[team_id], ids)
            self._strata[team_id] = strata
        return strata

    def _select_positions(
        self,
        team_id: str,
        opponent_id: str,
        constraint: LineupConstraint,
        rng: np.random.Generator,
    ) -> np.ndarray:
        """Roster positions of a sampled XI, ascending."""
        if constraint == EMPTY_CONSTRAINT:
            # Same stratum order and draw shapes as sample_xi with no
            # constraint, so both paths consume the stream identically.
            picks: list[np.ndarray] = []
            for positions, quota in self._strata_for(team_id).parts:
                if quota > len(positions):
                    return self._select_via_sample_xi(team_id, constraint, rng)
                if quota > 0:
                    picks.append(positions[rng.choice(len(positions), size=quota, replace=False)])
            return np.sort(np.concatenate(picks)) if picks else np.empty(0, dtype=np.int64)
        return self._select_via_sample_xi(team_id, constraint, rng)

    def _select_via_sample_xi(
        self, team_id: str, constraint: LineupConstraint, rng: np.random.Generator
    ) -> np.ndarray:
        team = self.dataset.team(team_id)
        xi = sample_xi(team, self.schemes[team_id], constraint, rng=rng)
        position = {pid: i for i, pid in enumerate(sorted(p.id for p in team.roster))}
        return np.sort(np.array([position[p.id] for p in xi], dtype=np.int64))

    # -- scoring -----------------------------------------------------------

    def _innings(
        self,
        team_id: str,
        opponent_id: str,
        positions: np.ndarray,
        rng: np.random.Generator,
        crn: tuple[int, int] | None,
    ) -> int:
        """Team score: sum of rounded per-player gamma draws."""
        arrays = self.cache.team_arrays(team_id, opponent_id)
        alphas = arrays.alphas[positions]
        betas = arrays.betas[positions]
        if crn is None:
            raw = rng.gamma(shape=alphas, scale=betas)
        else:
            seed, replicate = crn
            us = np.array([prf_uniform(seed, replicate, arrays.ids[p]) for p in positions])
            raw = special.gammaincinv(alphas, us) * betas
        return int(np.floor(raw + 0.5).sum())

    # -- public operations ---------------------------------------------------

    def simulate_match(
        self,
        team_a: str,
        team_b: str,
        rng: np.random.Generator,
        *,
        constraint_a: LineupConstraint = EMPTY_CONSTRAINT,
        constraint_b: LineupConstraint = EMPTY_CONSTRAINT,
        positions_a: np.ndarray | None = None,
        positions_b: np.ndarray | None = None,
        crn: tuple[int, int] | None = None,
    ) -> MatchResult:
        """Simulate one match; the coin toss plays no part."""
        if positions_a is None:
            positions_a = self._select_positions(team_a, team_b, constraint_a, rng)
        if positions_b is None:
            positions_b = self._select_positions(team_b, team_a, constraint_b, rng)
        score_a = self._innings(team_a, team_b, positions_a, rng, crn)
        score_b = self._innings(team_b, team_a, positions_b, rng, crn)
        return MatchResult(score_a=score_a, score_b=score_b)

    def _run_chunk(
        self,
        team_a: str,
        team_b: str,
        replicates: range,
        seed: int,
        path: tuple[int, ...],
        constraint_a: LineupConstraint,
        constraint_b: LineupConstraint,
        fixed: tuple[np.ndarray, np.ndarray] | None,
        track: bool,
    ) -> tuple[int, int, int, int, int, Counter, Counter]:
        wins_a = wins_b = draws = 0
        total_a = total_b = 0
        counts_a: Counter = Counter()
        counts_b: Counter = Counter()
        use_crn = self.options.common_random_numbers
        for i in replicates:
            rng = substream(seed, *path, _NS_REPLICATE, i)
            crn = (seed, i) if use_crn else None
            if fixed is not None:
                pos_a, pos_b = fixed
            else:
                pos_a = self._select_positions(team_a, team_b, constraint_a, rng)
                pos_b = self._select_positions(team_b, team_a, constraint_b, rng)
            result = self.simulate_match(
                team_a, team_b, rng, positions_a=pos_a, positions_b=pos_b, crn=crn
            )
            if track:
                ids_a = self.cache.team_arrays(team_a, team_b).ids
                ids_b = self.cache.team_arrays(team_b, team_a).ids
                counts_a.update(ids_a[p] for p in pos_a)
                counts_b.update(ids_b[p] for p in pos_b)
            total_a += result.score_a
            total_b += result.score_b
            outcome = result.outcome
            if outcome is Outcome.A_WINS:
                wins_a += 1
            elif outcome is Outcome.B_WINS:
                wins_b += 1
            else:
                draws += 1
        return wins_a, wins_b, draws, total_a, total_b, counts_a, counts_b

    def _estimate(
        self,
        team_a: str,
        team_b: str,
        n: int,
        seed: int,
        *,
        constraint_a: LineupConstraint,
        constraint_b: LineupConstraint,
        path: tuple[int, ...],
        workers: int | None,
        track: bool,
    ) -> tuple[MatchEstimate, Counter, Counter]:
        if n < 1:
            raise ValueError(f"replicate count must be >= 1, got {n}")
        self.dataset.team(team_a)
        self.dataset.team(team_b)

        fixed: tuple[np.ndarray, np.ndarray] | None = None
        if self.options.fixed_xi:
            rng_fix = substream(seed, *path, _NS_FIXED_XI)
            fixed = (
                self._select_positions(team_a, team_b, constraint_a, rng_fix),
                self._select_positions(team_b, team_a, constraint_b, rng_fix),
            )
        else:
            # Surface infeasible constraints before spawning workers.
            probe = substream(seed, *path, _NS_FIXED_XI)
            self._select_positions(team_a, team_b, constraint_a, probe)
            self._select_positions(team_b, team_a, constraint_b, probe)

        chunks = [range(start, min(start + _CHUNK, n)) for start in range(0, n, _CHUNK)]
        run = lambda chunk: self._run_chunk(
            team_a, team_b, chunk, seed, path, constraint_a, constraint_b, fixed, track
        )
        worker_count = workers if workers is not None else self.options.workers
        if worker_count > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=worker_count) as pool:
                results = list(pool.map(run, chunks))
        else:
            results = [run(chunk) for chunk in chunks]

        wins_a = wins_b = draws = total_a = total_b = 0
        counts_a: Counter = Counter()
        counts_b: Counter = Counter()
        for wa, wb, d, ta, tb, ca, cb in results:
            wins_a += wa
            wins_b += wb
            draws += d
            total_a += ta
            total_b += tb
            counts_a.update(ca)
            counts_b.update(cb)
        estimate = MatchEstimate(
            team_a=team_a,
            team_b=team_b,
            wins_a=wins_a,
            wins_b=wins_b,
            draws=draws,
            n=n,
            seed=seed,
            total_score_a=total_a,
            total_score_b=total_b,
        )
        return estimate, counts_a, counts_b

    def estimate_matchup(
        self,
        team_a: str,
        team_b: str,
        n: int,
        seed: int,
        *,
        constraint_a: LineupConstraint = EMPTY_CONSTRAINT,
        constraint_b: LineupConstraint = EMPTY_CONSTRAINT,
        workers: int | None = None,
    ) -> MatchEstimate:
        """n match replicates on substreams keyed (seed, replicate index)."""
        estimate, _, _ = self._estimate(
            team_a,
            team_b,
            n,
            seed,
            constraint_a=constraint_a,
            constraint_b=constraint_b,
            path=(),
            workers=workers,
            track=False,
        )
        return estimate

    def whatif(
        self,
        team_a: str,
        team_b: str,
        n: int,
        seed: int,
        *,
        constraint_a: LineupConstraint = EMPTY_CONSTRAINT,
        constraint_b: LineupConstraint = EMPTY_CONSTRAINT,
        workers: int | None = None,
    ) -> WhatIfResult:
        """estimate_matchup plus per-player selection counts (same streams)."""
        estimate, counts_a, counts_b = self._estimate(
            team_a,
            team_b,
            n,
            seed,
            constraint_a=constraint_a,
            constraint_b=constraint_b,
            path=(),
            workers=workers,
            track=True,
        )
        return WhatIfResult(estimate=estimate, selection_counts_a=dict(counts_a), selection_counts_b=dict(counts_b))

    def head_to_head_matrix(
        self,
        team_ids: Sequence[str] | None = None,
        *,
        n: int,
        seed: int,
        workers: int | None = None,
    ) -> HeadToHead:
        """One estimate per ordered pair, each on its own substream family."""
        ids = tuple(sorted(team_ids if team_ids is not None else self.dataset.teams))
        if len(ids) < 2:
            raise ValueError("head-to-head needs at least 2 teams")
        entries: dict[tuple[str, str], MatchEstimate] = {}
        for ai, team_a in enumerate(ids):
            for bi, team_b in enumerate(ids):
                if team_a == team_b:
                    continue
                estimate, _, _ = self._estimate(
                    team_a,
                    team_b,
                    n,
                    seed,
                    constraint_a=EMPTY_CONSTRAINT,
                    constraint_b=EMPTY_CONSTRAINT,
                    path=(ai, bi),
                    workers=workers,
                    track=False,
                )
                entries[(team_a, team_b)] = estimate
        return HeadToHead(teams=ids, entries=entries)
