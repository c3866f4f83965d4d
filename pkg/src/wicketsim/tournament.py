"""League + knockout tournament simulation and standings distributions.

Supports the CWC shape (single round robin, split-point draws, 1v4/2v3
semifinals) and the IPL shape (double round robin, super-over draw
resolution, Qualifier/Eliminator playoffs). Net run rate is proxied by
cumulative run difference since overs are not modeled.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from wicketsim.matchsim import MatchEngine, MatchResult, Outcome, HeadToHead
from wicketsim.streams import substream

__all__ = [
    "DrawRule",
    "PointsRule",
    "PlayoffFormat",
    "TournamentConfig",
    "TeamStanding",
    "StandingsDistribution",
    "ComparisonRow",
    "simulate_league",
    "simulate_knockout",
    "simulate_tournament",
    "wilson_interval",
    "compare_to_actuals",
    "tournament_config_from_dict",
]

# Re-simulations of a drawn game before falling back to a coin flip.
MAX_RESIMULATIONS = 10

# Sims are chunked at a fixed size so aggregation never depends on workers.
_CHUNK = 64


class DrawRule(enum.Enum):
    SPLIT_POINTS = "split"
    SUPER_OVER = "super_over"


class PlayoffFormat(enum.Enum):
    SEMIS_1V4_2V3_FINAL = "semis_1v4_2v3_final"
    Q1_ELIMINATOR_Q2_FINAL = "q1_eliminator_q2_final"


@dataclass(frozen=True)
class PointsRule:
    win: int = 2
    loss: int = 0
    draw_rule: DrawRule = DrawRule.SPLIT_POINTS

    def __post_init__(self) -> None:
        if self.win <= self.loss:
            raise ValueError(f"win points ({self.win}) must exceed loss points ({self.loss})")


@dataclass(frozen=True)
class TournamentConfig:
    team_ids: tuple[str, ...]
    rounds: int = 1
    points: PointsRule = field(default_factory=PointsRule)
    playoff: PlayoffFormat | None = PlayoffFormat.SEMIS_1V4_2V3_FINAL
    sims: int = 10_000
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "team_ids", tuple(self.team_ids))
        if len(set(self.team_ids)) != len(self.team_ids):
            raise ValueError("duplicate team ids in tournament config")
        if len(self.team_ids) < 2:
            raise ValueError("a tournament needs at least 2 teams")
        if self.playoff is not None and len(self.team_ids) < 4:
            raise ValueError("playoff formats need at least 4 teams")
        if self.rounds not in (1, 2):
            raise ValueError(f"rounds must be 1 or 2, got {self.rounds}")
        if self.sims < 1:
            raise ValueError(f"sims must be >= 1, got {self.sims}")


@dataclass
class TeamStanding:
    """One team's league aggregates within a single realization."""

    team_id: str
    points: int = 0
    scored: int = 0
    conceded: int = 0
    wins: int = 0
    losses: int = 0
    draws: int = 0

    @property
    def run_difference(self) -> int:
        return self.scored - self.conceded


def _standing_order(standing: TeamStanding) -> tuple:
    # points desc, run difference desc, then id: a strict total order.
    return (-standing.points, -standing.run_difference, standing.team_id)


def _resolve_draw(
    engine: MatchEngine, team_a: str, team_b: str, rng: np.random.Generator
) -> tuple[MatchResult, str]:
    """Re-simulate a drawn game to a strict winner (super-over stand-in).

    Fresh draws up to MAX_RESIMULATIONS times, then a stream-deterministic
    coin flip. Returns the final attempt's result (whose scores count
    toward run difference) and the winner's id.
    """
    result = engine.simulate_match(team_a, team_b, rng)
    attempts = 1
    while result.outcome is Outcome.DRAW and attempts <= MAX_RESIMULATIONS:
        result = engine.simulate_match(team_a, team_b, rng)
        attempts += 1
    if result.outcome is Outcome.A_WINS:
        return result, team_a
    if result.outcome is Outcome.B_WINS:
        return result, team_b
    winner = team_a if int(rng.integers(0, 2)) == 0 else team_b
    return result, winner


def simulate_league(
    engine: MatchEngine, config: TournamentConfig, rng: np.random.Generator
) -> list[TeamStanding]:
    """One league realization: every unordered pair plays ``rounds`` games.

    Returns standings ordered by points, cumulative run difference, then
    team id.
    """
    table = {tid: TeamStanding(team_id=tid) for tid in config.team_ids}
    points = config.points
    for _ in range(config.rounds):
        for team_a, team_b in combinations(sorted(config.team_ids), 2):
            if points.draw_rule is DrawRule.SUPER_OVER:
                result, winner = _resolve_draw(engine, team_a, team_b, rng)
            else:
                result = engine.simulate_match(team_a, team_b, rng)
                if result.outcome is Outcome.A_WINS:
                    winner = team_a
                elif result.outcome is Outcome.B_WINS:
                    winner = team_b
                else:
                    winner = ""
            row_a, row_b = table[team_a], table[team_b]
            row_a.scored += result.score_a
            row_a.conceded += result.score_b
            row_b.scored += result.score_b
            row_b.conceded += result.score_a
            if winner == team_a:
                row_a.points += points.win
                row_a.wins += 1
                row_b.points += points.loss
                row_b.losses += 1
            elif winner == team_b:
                row_b.points += points.win
                row_b.wins += 1
                row_a.points += points.loss
                row_a.losses += 1
            else:
                # CWC-style split: one point each.
                row_a.points += 1
                row_b.points += 1
                row_a.draws += 1
                row_b.draws += 1
    return sorted(table.values(), key=_standing_order)


def _decide(engine: MatchEngine, team_a: str, team_b: str, rng: np.random.Generator) -> str:
    """Knockout game: always produces a strict winner."""
    _, winner = _resolve_draw(engine, team_a, team_b, rng)
    return winner


def simulate_knockout(
    engine: MatchEngine,
    table: Sequence[TeamStanding],
    playoff: PlayoffFormat,
    rng: np.random.Generator,
) -> list[str]:
    """One knockout realization on a finished league table.

    Returns team ids in final position order: champion, runner-up, the
    two eliminated playoff teams by league order, then the rest in league
    order.
    """
    if len(table) < 4:
        raise ValueError("knockout needs a league table of at least 4 teams")
    seeds = [row.team_id for row in table]
    league_pos = {tid: i for i, tid in enumerate(seeds)}

    if playoff is PlayoffFormat.SEMIS_1V4_2V3_FINAL:
        sf1_winner = _decide(engine, seeds[0], seeds[3], rng)
        sf2_winner = _decide(engine, seeds[1], seeds[2], rng)
        champion = _decide(engine, sf1_winner, sf2_winner, rng)
        runner_up = sf2_winner if champion == sf1_winner else sf1_winner
        eliminated = [tid for tid in seeds[:4] if tid not in (champion, runner_up)]
    elif playoff is PlayoffFormat.Q1_ELIMINATOR_Q2_FINAL:
        q1_winner = _decide(engine, seeds[0], seeds[1], rng)
        q1_loser = seeds[1] if q1_winner == seeds[0] else seeds[0]
        elim_winner = _decide(engine, seeds[2], seeds[3], rng)
        elim_loser = seeds[3] if elim_winner == seeds[2] else seeds[2]
        q2_winner = _decide(engine, q1_loser, elim_winner, rng)
        q2_loser = elim_winner if q2_winner == q1_loser else q1_loser
        champion = _decide(engine, q1_winner, q2_winner, rng)
        runner_up = q2_winner if champion == q1_winner else q1_winner
        eliminated = sorted([elim_loser, q2_loser], key=lambda tid: league_pos[tid])
    else:
        raise ValueError(f"unsupported playoff format: {playoff!r}")

    eliminated = sorted(eliminated, key=lambda tid: league_pos[tid])
    return [champion, runner_up, *eliminated, *seeds[4:]]


@dataclass(frozen=True)
class StandingsDistribution:
    """Team-by-final-position counts over all simulations.

    Counts are integers, so the probability matrix is doubly stochastic
    exactly: every sim assigns each position exactly once.
    """

    team_ids: tuple[str, ...]
    position_counts: np.ndarray
    semifinal_counts: np.ndarray
    sims: int
    seed: int

    @property
    def positions(self) -> np.ndarray:
        return self.position_counts / self.sims

    @property
    def champion(self) -> dict[str, float]:
        return {
            tid: float(self.position_counts[i, 0] / self.sims)
            for i, tid in enumerate(self.team_ids)
        }

    @property
    def semifinalist(self) -> dict[str, float]:
        return {
            tid: float(self.semifinal_counts[i] / self.sims)
            for i, tid in enumerate(self.team_ids)
        }

    @property
    def conditional_champion(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for i, tid in enumerate(self.team_ids):
            semis = self.semifinal_counts[i]
            out[tid] = float(self.position_counts[i, 0] / semis) if semis > 0 else 0.0
        return out

    def to_dict(self) -> dict:
        return {
            "teams": list(self.team_ids),
            "positions": self.positions.tolist(),
            "champion": self.champion,
            "semifinalist": self.semifinalist,
            "conditional_champion": self.conditional_champion,
            "sims": self.sims,
            "seed": self.seed,
        }


def _simulate_sims(
    engine: MatchEngine, config: TournamentConfig, sims: range
) -> tuple[np.ndarray, np.ndarray]:
    n = len(config.team_ids)
    index = {tid: i for i, tid in enumerate(config.team_ids)}
    position_counts = np.zeros((n, n), dtype=np.int64)
    semifinal_counts = np.zeros(n, dtype=np.int64)
    qualifiers = min(4, n)
    for sim in sims:
        rng = substream(config.seed, sim)
        table = simulate_league(engine, config, rng)
        for row in table[:qualifiers]:
            semifinal_counts[index[row.team_id]] += 1
        if config.playoff is not None:
            final_order = simulate_knockout(engine, table, config.playoff, rng)
        else:
            final_order = [row.team_id for row in table]
        for position, tid in enumerate(final_order):
            position_counts[index[tid], position] += 1
    return position_counts, semifinal_counts


def simulate_tournament(
    engine: MatchEngine, config: TournamentConfig, *, workers: int | None = None
) -> StandingsDistribution:
    """Aggregate ``config.sims`` independent league+knockout realizations.

    Each sim runs on the substream keyed (seed, sim index); counts are
    summed in fixed chunk order, so the result is identical for any
    worker count.
    """
    chunks = [range(s, min(s + _CHUNK, config.sims)) for s in range(0, config.sims, _CHUNK)]
    worker_count = workers if workers is not None else engine.options.workers
    if worker_count > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=worker_count) as pool:
            results = list(pool.map(lambda c: _simulate_sims(engine, config, c), chunks))
    else:
        results = [_simulate_sims(engine, config, chunk) for chunk in chunks]
    n = len(config.team_ids)
    position_counts = np.zeros((n, n), dtype=np.int64)
    semifinal_counts = np.zeros(n, dtype=np.int64)
    for pos, semis in results:
        position_counts += pos
        semifinal_counts += semis
    return StandingsDistribution(
        team_ids=config.team_ids,
        position_counts=position_counts,
        semifinal_counts=semifinal_counts,
        sims=config.sims,
        seed=config.seed,
    )


def wilson_interval(wins: int, games: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score 95% interval for a win proportion."""
    if games <= 0:
        raise ValueError("wilson_interval needs games >= 1")
    p_hat = wins / games
    z2 = z * z
    denom = 1.0 + z2 / games
    center = (p_hat + z2 / (2.0 * games)) / denom
    half = z * math.sqrt(p_hat * (1.0 - p_hat) / games + z2 / (4.0 * games * games)) / denom
    return center - half, center + half


@dataclass(frozen=True)
class ComparisonRow:
    """Predicted vs actual win rate for one ordered pair."""

    team_a: str
    team_b: str
    predicted: float
    actual: float | None
    wilson_lo: float | None
    wilson_hi: float | None
    flag: str  # "inside" | "outside" | "no data"

    def to_dict(self) -> dict:
        return {
            "a": self.team_a,
            "b": self.team_b,
            "predicted": self.predicted,
            "actual": self.actual,
            "wilson_lo": self.wilson_lo,
            "wilson_hi": self.wilson_hi,
            "flag": self.flag,
        }


def compare_to_actuals(
    predicted: HeadToHead, actual: Mapping[tuple[str, str], tuple[int, int]]
) -> list[ComparisonRow]:
    """Per ordered pair: actual %, Wilson 95% interval, predicted %, flag.

    ``actual`` maps (team_a, team_b) to (wins by a over b, games played).
    Both tables must cover the same ordered pairs.
    """
    predicted_pairs = set(predicted.entries)
    actual_pairs = set(actual)
    missing = sorted(predicted_pairs - actual_pairs)
    extra = sorted(actual_pairs - predicted_pairs)
    if missing or extra:
        raise ValueError(
            f"pair coverage mismatch: missing from actuals {missing}; "
            f"not in predictions {extra}"
        )
    rows: list[ComparisonRow] = []
    for key in sorted(predicted.entries):
        estimate = predicted.entries[key]
        wins, games = actual[key]
        if games <= 0:
            rows.append(
                ComparisonRow(
                    team_a=key[0],
                    team_b=key[1],
                    predicted=estimate.p_a,
                    actual=None,
                    wilson_lo=None,
                    wilson_hi=None,
                    flag="no data",
                )
            )
            continue
        lo, hi = wilson_interval(wins, games)
        inside = lo <= estimate.p_a <= hi
        rows.append(
            ComparisonRow(
                team_a=key[0],
                team_b=key[1],
                predicted=estimate.p_a,
                actual=wins / games,
                wilson_lo=lo,
                wilson_hi=hi,
                flag="inside" if inside else "outside",
            )
        )
    return rows


def tournament_config_from_dict(doc: Mapping, *, sims: int | None = None, seed: int | None = None) -> TournamentConfig:
    """Parse the tournament config JSON shape; CLI flags override sims/seed."""
    try:
        points_doc = doc.get("points", {})
        draw_code = points_doc.get("draw", DrawRule.SPLIT_POINTS.value)
        points = PointsRule(
            win=int(points_doc.get("win", 2)),
            loss=int(points_doc.get("loss", 0)),
            draw_rule=DrawRule(draw_code),
        )
        playoff_code = doc.get("playoff")
        playoff = None if playoff_code is None else PlayoffFormat(playoff_code)
        return TournamentConfig(
            team_ids=tuple(doc["teams"]),
            rounds=int(doc.get("rounds", 1)),
            points=points,
            playoff=playoff,
            sims=sims if sims is not None else int(doc.get("sims", 10_000)),
            seed=seed if seed is not None else int(doc.get("seed", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed tournament config: {exc}") from exc
