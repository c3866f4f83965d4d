"""JSON-over-HTTP surface for the what-if console.

Stateless with respect to simulation: the dataset is immutable, every
response is reproducible from the request plus its (possibly
server-generated, always echoed) seed.
"""

from __future__ import annotations

import secrets

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from wicketsim.matchsim import MatchEngine
from wicketsim.priors import DomainError
from wicketsim.roster import DatasetError, resolve_matchup
from wicketsim.selection import LineupConstraint, SelectionError

__all__ = ["create_app"]


class ConstraintBody(BaseModel):
    locked: list[str] = Field(default_factory=list)
    excluded: list[str] = Field(default_factory=list)


class WhatIfBody(BaseModel):
    team_a: str
    team_b: str
    constraint_a: ConstraintBody = Field(default_factory=ConstraintBody)
    constraint_b: ConstraintBody = Field(default_factory=ConstraintBody)
    fixed_xi: bool = False
    sims: int = Field(default=10_000, ge=1)
    seed: int | None = None
    common_random_numbers: bool = False


class OddsBody(BaseModel):
    p: float
    margin: float = 1.0


def _player_summaries(engine: MatchEngine, team_id: str, opponent_id: str,
                      counts: dict, sims: int) -> list[dict]:
    arrays = engine.cache.team_arrays(team_id, opponent_id)
    players = engine.dataset.teams[team_id].roster
    by_id = {p.id: p for p in players}
    rows = []
    for pid in arrays.ids:
        player = by_id[pid]
        prior = engine.cache.lookup(pid, opponent_id)
        rows.append(
            {
                "id": pid,
                "name": player.name,
                "role": player.role.value,
                "overseas": player.overseas,
                "prior_mean": prior.result.params.mean(),
                "prior_sd": prior.result.params.sd(),
                "tier": prior.record.tier.code,
                "flags": sorted(prior.result.flags),
                "selection_rate": counts.get(pid, 0) / sims,
            }
        )
    return rows


def create_app(
    engine: MatchEngine,
    *,
    sims_cap: int = 100_000,
    cors_origins: tuple[str, ...] = ("*",),
) -> FastAPI:
    """Build the console API around a configured match engine."""
    app = FastAPI(title="wicketsim", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError) -> JSONResponse:
        # 422 is reserved for infeasible lineups; malformed bodies are 400.
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/teams")
    def teams() -> dict:
        rows = []
        for tid in sorted(engine.dataset.teams):
            team = engine.dataset.teams[tid]
            rows.append(
                {
                    "id": tid,
                    "name": team.name,
                    "players": len(team.roster),
                    "overseas": sum(1 for p in team.roster if p.overseas),
                }
            )
        return {"teams": rows}

    @app.get("/teams/{team_id}/players")
    def team_players(team_id: str):
        if team_id not in engine.dataset.teams:
            return JSONResponse(status_code=404, content={"detail": f"unknown team {team_id!r}"})
        team = engine.dataset.teams[team_id]
        opponents = [tid for tid in sorted(engine.dataset.teams) if tid != team_id]
        players = []
        for player in sorted(team.roster, key=lambda p: p.id):
            tier_counts: dict[str, int] = {}
            for opponent_id in opponents:
                record = resolve_matchup(player.id, opponent_id, engine.dataset)
                tier_counts[record.tier.code] = tier_counts.get(record.tier.code, 0) + 1
            players.append(
                {
                    "id": player.id,
                    "name": player.name,
                    "role": player.role.value,
                    "overseas": player.overseas,
                    "tiers": dict(sorted(tier_counts.items())),
                }
            )
        return {"team": {"id": team.id, "name": team.name}, "players": players}

    @app.post("/simulate/whatif")
    def simulate_whatif(body: WhatIfBody):
        if body.sims > sims_cap:
            return JSONResponse(
                status_code=400,
                content={"detail": f"sims {body.sims} exceeds the per-request cap {sims_cap}"},
            )
        if body.team_a not in engine.dataset.teams or body.team_b not in engine.dataset.teams:
            return JSONResponse(status_code=400, content={"detail": "unknown team id"})
        seed = body.seed if body.seed is not None else secrets.randbits(62)
        try:
            constraint_a = LineupConstraint(
                locked=frozenset(body.constraint_a.locked),
                excluded=frozenset(body.constraint_a.excluded),
            )
            constraint_b = LineupConstraint(
                locked=frozenset(body.constraint_b.locked),
                excluded=frozenset(body.constraint_b.excluded),
            )
            variant = engine.with_options(
                fixed_xi=body.fixed_xi, common_random_numbers=body.common_random_numbers
            )
            result = variant.whatif(
                body.team_a,
                body.team_b,
                body.sims,
                seed,
                constraint_a=constraint_a,
                constraint_b=constraint_b,
            )
        except SelectionError as exc:
            return JSONResponse(
                status_code=422, content={"detail": str(exc), "stratum": exc.stratum}
            )
        except (DatasetError, DomainError, ValueError) as exc:
            return JSONResponse(status_code=400, content={"detail": str(exc)})

        estimate = result.estimate
        return {
            "estimate": estimate.to_dict(),
            "request": {
                "team_a": body.team_a,
                "team_b": body.team_b,
                "fixed_xi": body.fixed_xi,
                "common_random_numbers": body.common_random_numbers,
                "sims": body.sims,
                "seed": seed,
            },
            "players": {
                body.team_a: _player_summaries(
                    engine, body.team_a, body.team_b, dict(result.selection_counts_a), body.sims
                ),
                body.team_b: _player_summaries(
                    engine, body.team_b, body.team_a, dict(result.selection_counts_b), body.sims
                ),
            },
        }

    @app.post("/odds")
    def odds(body: OddsBody):
        if not 0.0 <= body.p <= 1.0:
            return JSONResponse(
                status_code=400, content={"detail": f"p must lie in [0, 1], got {body.p}"}
            )
        if body.margin <= 0.0:
            return JSONResponse(
                status_code=400, content={"detail": f"margin must be positive, got {body.margin}"}
            )
        if body.p == 0.0:
            return {"p": 0.0, "margin": body.margin, "decimal_odds": None, "no_price": True}
        return {
            "p": body.p,
            "margin": body.margin,
            "decimal_odds": body.margin / body.p,
            "no_price": False,
        }

    return app
