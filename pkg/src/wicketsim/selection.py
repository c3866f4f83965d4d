"""Stratified random selection of an XI under quota, conditions, and overseas rules.

Within each stratum the unlocked slots are a simple random sample, so
every eligible subset of the right size is equally likely. Conditions
shift quota slots from fast bowlers to spinners deterministically. In
overseas mode the overseas players form their own stratum sampled with an
exact count, and the role quotas then apply to domestic players only.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Mapping

import numpy as np

from wicketsim.roster import Player, Role, Team

__all__ = [
    "SelectionError",
    "ConditionsProfile",
    "SelectionScheme",
    "LineupConstraint",
    "EMPTY_CONSTRAINT",
    "ODI_DEFAULT_QUOTAS",
    "IPL_DEFAULT_QUOTAS",
    "apply_conditions",
    "sample_xi",
    "scheme_from_dict",
    "scheme_to_dict",
]

OVERSEAS_STRATUM = "overseas"

# Default ODI role quotas (sum 11).
ODI_DEFAULT_QUOTAS: Mapping[Role, int] = MappingProxyType(
    {
        Role.FAST_BOWLER: 3,
        Role.SPINNER: 2,
        Role.ALL_ROUNDER_FAST: 1,
        Role.ALL_ROUNDER_SPIN: 1,
        Role.BATSMAN: 3,
        Role.WICKET_KEEPER: 1,
    }
)

# Default domestic quotas when four overseas slots are carved out (sum 7).
IPL_DEFAULT_QUOTAS: Mapping[Role, int] = MappingProxyType(
    {
        Role.FAST_BOWLER: 2,
        Role.SPINNER: 1,
        Role.ALL_ROUNDER_FAST: 1,
        Role.ALL_ROUNDER_SPIN: 1,
        Role.BATSMAN: 1,
        Role.WICKET_KEEPER: 1,
    }
)


class SelectionError(ValueError):
    """A scheme or constraint cannot be satisfied; names the failing stratum."""

    def __init__(self, message: str, stratum: str | None = None) -> None:
        super().__init__(message)
        self.stratum = stratum


@dataclass(frozen=True)
class ConditionsProfile:
    """Venue-driven adjustment: quota slots moved from fast bowlers to spinners."""

    spin_shift: int = 0
    description: str = ""

    def __post_init__(self) -> None:
        if self.spin_shift < 0:
            raise SelectionError(f"spin_shift must be >= 0, got {self.spin_shift}")


@dataclass(frozen=True)
class SelectionScheme:
    """Per-stratum quotas plus optional exact overseas count and conditions.

    With ``overseas_count`` set, ``quotas`` covers the domestic slots only
    and the quota sum plus the overseas count gives the XI size.
    """

    quotas: Mapping[Role, int] = field(default_factory=lambda: dict(ODI_DEFAULT_QUOTAS))
    overseas_count: int | None = None
    conditions: ConditionsProfile = field(default_factory=ConditionsProfile)

    def __post_init__(self) -> None:
        frozen = MappingProxyType({role: int(self.quotas.get(role, 0)) for role in Role})
        object.__setattr__(self, "quotas", frozen)
        for role, quota in self.quotas.items():
            if quota < 0:
                raise SelectionError(f"quota for {role.value} must be >= 0, got {quota}", role.value)
        if self.overseas_count is not None and self.overseas_count < 0:
            raise SelectionError(
                f"overseas_count must be >= 0, got {self.overseas_count}", OVERSEAS_STRATUM
            )

    @property
    def xi_size(self) -> int:
        return sum(self.quotas.values()) + (self.overseas_count or 0)

    def require_xi_size(self, expected: int = 11) -> None:
        """Competition configs must select a full XI."""
        if self.xi_size != expected:
            raise SelectionError(
                f"scheme selects {self.xi_size} players; expected {expected}"
            )


@dataclass(frozen=True)
class LineupConstraint:
    """What-if constraint: players forced into and barred from the XI."""

    locked: frozenset[str] = frozenset()
    excluded: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "locked", frozenset(self.locked))
        object.__setattr__(self, "excluded", frozenset(self.excluded))
        overlap = self.locked & self.excluded
        if overlap:
            raise SelectionError(f"players both locked and excluded: {sorted(overlap)}")


EMPTY_CONSTRAINT = LineupConstraint()


def apply_conditions(scheme: SelectionScheme) -> SelectionScheme:
    """Shift ``spin_shift`` quota slots from fast bowlers to spinners."""
    shift = scheme.conditions.spin_shift
    if shift == 0:
        return scheme
    if shift > scheme.quotas[Role.FAST_BOWLER]:
        raise SelectionError(
            f"spin_shift {shift} exceeds the fast-bowler quota "
            f"{scheme.quotas[Role.FAST_BOWLER]}",
            Role.FAST_BOWLER.value,
        )
    quotas = dict(scheme.quotas)
    quotas[Role.FAST_BOWLER] -= shift
    quotas[Role.SPINNER] += shift
    return replace(scheme, quotas=quotas)


def _draw_stratum(
    stratum: str,
    pool: list[Player],
    quota: int,
    constraint: LineupConstraint,
    rng: np.random.Generator,
) -> list[Player]:
    """SRS of ``quota`` players from ``pool``, honoring locks and exclusions."""
    locked = [p for p in pool if p.id in constraint.locked]
    if len(locked) > quota:
        raise SelectionError(
            f"stratum {stratum!r}: {len(locked)} locked players exceed the quota {quota}",
            stratum,
        )
    eligible = [p for p in pool if p.id not in constraint.locked and p.id not in constraint.excluded]
    need = quota - len(locked)
    if need > len(eligible):
        raise SelectionError(
            f"stratum {stratum!r}: quota {quota} cannot be met "
            f"({len(locked)} locked, {len(eligible)} eligible)",
            stratum,
        )
    chosen = list(locked)
    if need > 0:
        picks = rng.choice(len(eligible), size=need, replace=False)
        chosen.extend(eligible[int(i)] for i in picks)
    return chosen


def sample_xi(
    team: Team,
    scheme: SelectionScheme,
    constraint: LineupConstraint = EMPTY_CONSTRAINT,
    *,
    rng: np.random.Generator,
) -> list[Player]:
    """Draw an XI from the roster by stratified simple random sampling.

    Returns ``scheme.xi_size`` distinct players sorted by (role, id).
    Locked players always appear, excluded players never do, and with
    ``overseas_count`` set the XI contains exactly that many overseas
    players.
    """
    roster_ids = {p.id for p in team.roster}
    for pid in sorted((constraint.locked | constraint.excluded) - roster_ids):
        raise SelectionError(f"constraint references {pid!r}, not on team {team.id!r}")

    pool = sorted(team.roster, key=lambda p: p.id)
    xi: list[Player] = []
    if scheme.overseas_count is not None:
        overseas = [p for p in pool if p.overseas]
        xi.extend(_draw_stratum(OVERSEAS_STRATUM, overseas, scheme.overseas_count, constraint, rng))
        pool = [p for p in pool if not p.overseas]
    for role in Role:
        stratum = [p for p in pool if p.role is role]
        xi.extend(_draw_stratum(role.value, stratum, scheme.quotas[role], constraint, rng))
    return sorted(xi, key=lambda p: (p.role.value, p.id))


def scheme_from_dict(doc: Mapping) -> SelectionScheme:
    """Parse the scheme JSON shape {quotas, overseas_count?, conditions?}."""
    try:
        quotas = {Role.from_code(code): int(n) for code, n in doc.get("quotas", {}).items()}
        conditions_doc = doc.get("conditions", {})
        conditions = ConditionsProfile(
            spin_shift=int(conditions_doc.get("spin_shift", 0)),
            description=str(conditions_doc.get("description", "")),
        )
        overseas = doc.get("overseas_count")
        return SelectionScheme(
            quotas=quotas,
            overseas_count=None if overseas is None else int(overseas),
            conditions=conditions,
        )
    except (TypeError, ValueError, AttributeError) as exc:
        raise SelectionError(f"malformed scheme: {exc}") from exc


def scheme_to_dict(scheme: SelectionScheme) -> dict:
    doc: dict = {
        "quotas": {role.value: quota for role, quota in scheme.quotas.items()},
        "conditions": {
            "spin_shift": scheme.conditions.spin_shift,
            "description": scheme.conditions.description,
        },
    }
    if scheme.overseas_count is not None:
        doc["overseas_count"] = scheme.overseas_count
    return doc
