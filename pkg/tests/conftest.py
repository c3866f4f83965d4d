"""Shared fixtures: bundled datasets and toy dataset builders."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from wicketsim.matchsim import FitOptions, MatchEngine, SimOptions
from wicketsim.priors import BetaGrid
from wicketsim.roster import ALL_OPPONENTS, Dataset, MatchupRecord, Player, Role, SourceTier, Team
from wicketsim.selection import SelectionScheme, scheme_from_dict

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "wicketsim" / "fixtures"

# Narrow grid + min_feasible gives near-degenerate priors, so toy players
# have two-point (or one-point) rounded score distributions.
TOY_GRID = BetaGrid(lo=1e-4, hi=5000.0, count=50_000)
TOY_FIT = FitOptions(grid=TOY_GRID, beta_rule="min_feasible")

NEVER_SCORER = "ind_neverscorer"


@pytest.fixture(scope="session")
def cwc12_paths() -> dict[str, Path]:
    return {
        "stats": FIXTURES / "cwc12.csv",
        "teams": FIXTURES / "cwc12_teams.json",
        "defaults": FIXTURES / "league_defaults.json",
        "config": FIXTURES / "cwc12.json",
    }


@pytest.fixture(scope="session")
def cwc12_dataset(cwc12_paths) -> Dataset:
    from wicketsim.roster import load_dataset

    return load_dataset(cwc12_paths["stats"], cwc12_paths["teams"], cwc12_paths["defaults"])


@pytest.fixture(scope="session")
def cwc12_scheme(cwc12_paths) -> SelectionScheme:
    doc = json.loads(cwc12_paths["config"].read_text(encoding="utf-8"))
    return scheme_from_dict(doc["scheme"])


@pytest.fixture(scope="session")
def cwc12_engine(cwc12_dataset, cwc12_scheme) -> MatchEngine:
    return MatchEngine(cwc12_dataset, scheme=cwc12_scheme)


@pytest.fixture(scope="session")
def ipl8_paths() -> dict[str, Path]:
    return {
        "stats": FIXTURES / "ipl8.csv",
        "teams": FIXTURES / "ipl8_teams.json",
        "defaults": FIXTURES / "league_defaults.json",
        "config": FIXTURES / "ipl8.json",
    }


@pytest.fixture(scope="session")
def ipl8_dataset(ipl8_paths) -> Dataset:
    from wicketsim.roster import load_dataset

    return load_dataset(ipl8_paths["stats"], ipl8_paths["teams"], ipl8_paths["defaults"])


@pytest.fixture(scope="session")
def ipl8_scheme(ipl8_paths) -> SelectionScheme:
    doc = json.loads(ipl8_paths["config"].read_text(encoding="utf-8"))
    return scheme_from_dict(doc["scheme"])


@pytest.fixture(scope="session")
def ipl8_engine(ipl8_dataset, ipl8_scheme) -> MatchEngine:
    return MatchEngine(ipl8_dataset, scheme=ipl8_scheme)


DEFAULTS = {
    Role.FAST_BOWLER: (10.0, 30),
    Role.SPINNER: (11.0, 32),
    Role.ALL_ROUNDER_FAST: (18.0, 52),
    Role.ALL_ROUNDER_SPIN: (20.0, 55),
    Role.BATSMAN: (25.0, 80),
    Role.WICKET_KEEPER: (24.0, 75),
}


def toy_dataset(team_lines: dict[str, list[tuple[float, int]]], squad: int = 11) -> Dataset:
    """Teams of batsmen with all-opponents batting lines.

    ``team_lines[tid]`` lists (average, highest) per player; teams are
    padded to ``squad`` players with never-scoring (0, 0) lines so the
    full XI pipeline runs while only the listed players contribute runs.
    """
    teams: dict[str, Team] = {}
    records: list[MatchupRecord] = []
    for tid, lines in team_lines.items():
        players = []
        padded = list(lines) + [(0.0, 0)] * (squad - len(lines))
        for i, (average, highest) in enumerate(padded, start=1):
            pid = f"{tid}_p{i:02d}"
            players.append(Player(id=pid, name=pid, team_id=tid, role=Role.BATSMAN))
            records.append(
                MatchupRecord(
                    player_id=pid,
                    opponent_id=ALL_OPPONENTS,
                    average=average,
                    highest=highest,
                    innings=5,
                    tier=SourceTier.INTERNATIONAL,
                )
            )
        teams[tid] = Team(id=tid, name=tid.upper(), roster=tuple(players))
    return Dataset(teams, records, DEFAULTS)


def toy_engine(
    team_lines: dict[str, list[tuple[float, int]]],
    squad: int = 11,
    quota: int | None = None,
    fit: FitOptions = TOY_FIT,
    **options,
) -> MatchEngine:
    """Engine over a toy dataset of batsmen with near-degenerate priors."""
    dataset = toy_dataset(team_lines, squad=squad)
    scheme = SelectionScheme(quotas={Role.BATSMAN: quota if quota is not None else squad})
    sim_options = SimOptions(fit=fit, **options)
    return MatchEngine(dataset, scheme=scheme, options=sim_options)
