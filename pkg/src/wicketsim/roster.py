"""Players, teams, historical matchup records, and the tiered fallback resolver.

Ingestion reads three local files: a stats CSV of per-opponent batting
lines, a teams JSON with rosters and roles, and a league-defaults JSON
giving a per-role batting line used when a player has no record at all.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

__all__ = [
    "DatasetError",
    "Role",
    "SourceTier",
    "Player",
    "Team",
    "MatchupRecord",
    "Dataset",
    "load_dataset",
    "ALL_OPPONENTS",
]

# opponent_id wildcard for a player's aggregate row across all opponents
ALL_OPPONENTS = "*"

STATS_HEADER = ["player_id", "opponent_id", "average", "highest", "innings", "tier"]


class DatasetError(ValueError):
    """Input files failed to parse or violate a dataset invariant."""


class Role(enum.Enum):
    """Player role; one per player, the unit of stratified sampling."""

    FAST_BOWLER = "fast"
    SPINNER = "spin"
    ALL_ROUNDER_FAST = "ar_fast"
    ALL_ROUNDER_SPIN = "ar_spin"
    BATSMAN = "bat"
    WICKET_KEEPER = "wk"

    @classmethod
    def from_code(cls, code: str) -> Role:
        try:
            return cls(code)
        except ValueError:
            raise DatasetError(
                f"unknown role {code!r}; expected one of {[r.value for r in cls]}"
            ) from None


class SourceTier(enum.IntEnum):
    """Data-source tiers, ordered by preference (international best)."""

    INTERNATIONAL = 0
    DOMESTIC = 1
    FIRST_CLASS = 2
    RESERVE_TEAM = 3
    UNDER_19 = 4
    LEAGUE_DEFAULT = 5

    @property
    def code(self) -> str:
        return _TIER_TO_CODE[self]

    @classmethod
    def from_code(cls, code: str) -> SourceTier:
        try:
            return _CODE_TO_TIER[code]
        except KeyError:
            raise DatasetError(
                f"unknown tier {code!r}; expected one of {sorted(_CODE_TO_TIER)}"
            ) from None


_CODE_TO_TIER = {
    "international": SourceTier.INTERNATIONAL,
    "domestic": SourceTier.DOMESTIC,
    "first_class": SourceTier.FIRST_CLASS,
    "reserve": SourceTier.RESERVE_TEAM,
    "u19": SourceTier.UNDER_19,
    "default": SourceTier.LEAGUE_DEFAULT,
}
_TIER_TO_CODE = {tier: code for code, tier in _CODE_TO_TIER.items()}


@dataclass(frozen=True)
class Player:
    id: str
    name: str
    team_id: str
    role: Role
    overseas: bool = False


@dataclass(frozen=True)
class Team:
    """A named roster. Competition loaders enforce full-size rosters
    (>= 11); direct construction allows smaller squads for reduced test
    schemes."""

    id: str
    name: str
    roster: tuple[Player, ...]

    def __post_init__(self) -> None:
        if not self.roster:
            raise DatasetError(f"team {self.id!r} has an empty roster")
        seen = set()
        for player in self.roster:
            if player.team_id != self.id:
                raise DatasetError(
                    f"player {player.id!r} carries team_id {player.team_id!r} inside team {self.id!r}"
                )
            if player.id in seen:
                raise DatasetError(f"duplicate player id {player.id!r} in team {self.id!r}")
            seen.add(player.id)

    def players_by_role(self, role: Role) -> tuple[Player, ...]:
        return tuple(p for p in self.roster if p.role is role)


@dataclass(frozen=True)
class MatchupRecord:
    """One player's historical batting line versus one opponent team."""

    player_id: str
    opponent_id: str
    average: float
    highest: int
    innings: int
    tier: SourceTier

    def __post_init__(self) -> None:
        if not (math.isfinite(self.average) and self.average >= 0):
            raise DatasetError(
                f"record ({self.player_id!r} vs {self.opponent_id!r}): average must be "
                f"finite and non-negative, got {self.average!r}"
            )
        if self.highest < 0 or self.innings < 0:
            raise DatasetError(
                f"record ({self.player_id!r} vs {self.opponent_id!r}): highest and innings "
                "must be non-negative"
            )
        if self.innings >= 1 and self.highest < self.average:
            raise DatasetError(
                f"record ({self.player_id!r} vs {self.opponent_id!r}): highest {self.highest} "
                f"below average {self.average} with innings >= 1"
            )
        if self.innings == 0 and self.tier is not SourceTier.LEAGUE_DEFAULT:
            raise DatasetError(
                f"record ({self.player_id!r} vs {self.opponent_id!r}): innings=0 is only "
                "allowed on league-default rows"
            )


class Dataset:
    """Immutable competition dataset: teams, matchup records, league defaults."""

    def __init__(
        self,
        teams: dict[str, Team],
        records: list[MatchupRecord],
        league_defaults: dict[Role, tuple[float, int]],
    ) -> None:
        self.teams = dict(sorted(teams.items()))
        self.players: dict[str, Player] = {}
        for team in self.teams.values():
            for player in team.roster:
                if player.id in self.players:
                    raise DatasetError(f"player id {player.id!r} appears in more than one team")
                self.players[player.id] = player

        missing = [role.value for role in Role if role not in league_defaults]
        if missing:
            raise DatasetError(f"league defaults missing roles: {missing}")
        self.league_defaults = dict(league_defaults)
        self._default_records = {
            role: MatchupRecord(
                player_id="",
                opponent_id=ALL_OPPONENTS,
                average=avg,
                highest=high,
                innings=0,
                tier=SourceTier.LEAGUE_DEFAULT,
            )
            for role, (avg, high) in self.league_defaults.items()
        }

        self.records: tuple[MatchupRecord, ...] = tuple(records)
        self._by_matchup: dict[tuple[str, str], MatchupRecord] = {}
        seen_rows: set[tuple[str, str, SourceTier]] = set()
        for record in records:
            if record.player_id not in self.players:
                raise DatasetError(f"record references unknown player {record.player_id!r}")
            if record.opponent_id != ALL_OPPONENTS and record.opponent_id not in self.teams:
                raise DatasetError(
                    f"record for {record.player_id!r} references unknown opponent "
                    f"{record.opponent_id!r}"
                )
            row_key = (record.player_id, record.opponent_id, record.tier)
            if row_key in seen_rows:
                raise DatasetError(
                    f"duplicate record for ({record.player_id!r}, {record.opponent_id!r}, "
                    f"{record.tier.code!r})"
                )
            seen_rows.add(row_key)
            key = (record.player_id, record.opponent_id)
            best = self._by_matchup.get(key)
            if best is None or record.tier < best.tier:
                self._by_matchup[key] = record

    def team(self, team_id: str) -> Team:
        try:
            return self.teams[team_id]
        except KeyError:
            raise DatasetError(f"unknown team {team_id!r}") from None

    def player(self, player_id: str) -> Player:
        try:
            return self.players[player_id]
        except KeyError:
            raise DatasetError(f"unknown player {player_id!r}") from None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.teams == other.teams
            and sorted(self.records, key=_record_sort_key) == sorted(other.records, key=_record_sort_key)
            and self.league_defaults == other.league_defaults
        )

    def save(self, stats_path: str | Path, teams_path: str | Path, defaults_path: str | Path) -> None:
        """Write the dataset back out in the canonical on-disk formats."""
        with open(stats_path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(STATS_HEADER)
            for record in sorted(self.records, key=_record_sort_key):
                writer.writerow(
                    [
                        record.player_id,
                        record.opponent_id,
                        repr(record.average),
                        record.highest,
                        record.innings,
                        record.tier.code,
                    ]
                )
        teams_doc = [
            {
                "id": team.id,
                "name": team.name,
                "players": [
                    {"id": p.id, "name": p.name, "role": p.role.value, "overseas": p.overseas}
                    for p in team.roster
                ],
            }
            for team in self.teams.values()
        ]
        Path(teams_path).write_text(json.dumps(teams_doc, indent=2, sort_keys=True), encoding="utf-8")
        defaults_doc = {
            role.value: {"average": avg, "highest": high}
            for role, (avg, high) in sorted(self.league_defaults.items(), key=lambda kv: kv[0].value)
        }
        Path(defaults_path).write_text(json.dumps(defaults_doc, indent=2, sort_keys=True), encoding="utf-8")


def _record_sort_key(record: MatchupRecord) -> tuple:
    return (record.player_id, record.opponent_id, int(record.tier))


def resolve_matchup(player_id: str, opponent_id: str, dataset: Dataset) -> MatchupRecord:
    """Best available batting line for (player, opponent).

    Preference order: opponent-specific record at the best tier, then the
    player's all-opponents aggregate at its best tier, then the league
    default for the player's role. Total on any valid dataset.
    """
    player = dataset.player(player_id)
    specific = dataset._by_matchup.get((player_id, opponent_id))
    if specific is not None:
        return specific
    star = dataset._by_matchup.get((player_id, ALL_OPPONENTS))
    if star is not None:
        return star
    return dataset._default_records[player.role]


def _parse_teams(teams_path: str | Path) -> dict[str, Team]:
    try:
        doc = json.loads(Path(teams_path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{teams_path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, list) or not doc:
        raise DatasetError(f"{teams_path}: expected a non-empty array of teams")
    teams: dict[str, Team] = {}
    for entry in doc:
        try:
            team_id = entry["id"]
            roster = tuple(
                Player(
                    id=p["id"],
                    name=p["name"],
                    team_id=team_id,
                    role=Role.from_code(p["role"]),
                    overseas=bool(p.get("overseas", False)),
                )
                for p in entry["players"]
            )
            team = Team(id=team_id, name=entry["name"], roster=roster)
        except (KeyError, TypeError) as exc:
            raise DatasetError(f"{teams_path}: malformed team entry ({exc})") from exc
        if team.id in teams:
            raise DatasetError(f"{teams_path}: duplicate team id {team.id!r}")
        if len(team.roster) < 11:
            raise DatasetError(
                f"{teams_path}: team {team.id!r} has {len(team.roster)} players; a "
                "competition roster needs at least 11"
            )
        teams[team.id] = team
    return teams


def _parse_defaults(defaults_path: str | Path) -> dict[Role, tuple[float, int]]:
    try:
        doc = json.loads(Path(defaults_path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{defaults_path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise DatasetError(f"{defaults_path}: expected an object keyed by role")
    defaults: dict[Role, tuple[float, int]] = {}
    for code, line in doc.items():
        role = Role.from_code(code)
        try:
            defaults[role] = (float(line["average"]), int(line["highest"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise DatasetError(f"{defaults_path}: malformed defaults for {code!r} ({exc})") from exc
    return defaults


def _parse_stats(stats_path: str | Path) -> list[MatchupRecord]:
    records: list[MatchupRecord] = []
    with open(stats_path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != STATS_HEADER:
            raise DatasetError(
                f"{stats_path}: header must be {','.join(STATS_HEADER)!r}, got {reader.fieldnames}"
            )
        for line_no, row in enumerate(reader, start=2):
            try:
                record = MatchupRecord(
                    player_id=row["player_id"].strip(),
                    opponent_id=row["opponent_id"].strip(),
                    average=float(row["average"]),
                    highest=int(row["highest"]),
                    innings=int(row["innings"]),
                    tier=SourceTier.from_code(row["tier"].strip()),
                )
            except DatasetError as exc:
                raise DatasetError(f"{stats_path}:{line_no}: {exc}") from None
            except (TypeError, ValueError, AttributeError) as exc:
                raise DatasetError(f"{stats_path}:{line_no}: malformed row ({exc})") from None
            records.append(record)
    if not records:
        raise DatasetError(f"{stats_path}: no records")
    return records


def load_dataset(
    stats_path: str | Path, teams_path: str | Path, defaults_path: str | Path
) -> Dataset:
    """Load and validate a dataset from its three on-disk files."""
    teams = _parse_teams(teams_path)
    defaults = _parse_defaults(defaults_path)
    records = _parse_stats(stats_path)
    try:
        return Dataset(teams, records, defaults)
    except DatasetError:
        raise
