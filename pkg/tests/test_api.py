"""What-if API behavior over the bundled fixture dataset."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from wicketsim.api import create_app
from wicketsim.roster import Player, Role, Team
from wicketsim.selection import LineupConstraint, SelectionError, sample_xi, scheme_from_dict
from wicketsim.streams import substream

from tests.conftest import FIXTURES, NEVER_SCORER

VECTORS = json.loads(
    (Path(__file__).parent / "data" / "feasibility_vectors.json").read_text(encoding="utf-8")
)


@pytest.fixture(scope="module")
def client(cwc12_engine) -> TestClient:
    return TestClient(create_app(cwc12_engine, cors_origins=("http://localhost:5173",)))


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_teams_listing_is_stable(client):
    body = client.get("/teams").json()
    ids = [t["id"] for t in body["teams"]]
    assert len(ids) == 12
    assert ids == sorted(ids)
    assert client.get("/teams").json() == body


def test_unknown_team_is_404(client):
    assert client.get("/teams/nope/players").status_code == 404


def test_player_listing_carries_tier_summary(client):
    body = client.get("/teams/aus/players").json()
    assert body["team"]["id"] == "aus"
    players = body["players"]
    assert len(players) >= 15
    for player in players:
        assert {"id", "name", "role", "overseas", "tiers"} <= set(player)
        assert sum(player["tiers"].values()) == 11  # one resolved tier per opponent
    # The fixture ships debutants who resolve through the default ladder.
    assert any("default" in p["tiers"] for p in players)


def test_whatif_identical_teams_symmetric(client):
    response = client.post(
        "/simulate/whatif", json={"team_a": "aus", "team_b": "aus", "sims": 10_000, "seed": 1}
    )
    assert response.status_code == 200
    estimate = response.json()["estimate"]
    assert abs(estimate["p_a"] - 0.5) < 0.02


def test_whatif_is_reproducible_with_seed(client):
    body = {"team_a": "aus", "team_b": "ind", "sims": 500, "seed": 33}
    first = client.post("/simulate/whatif", json=body)
    second = client.post("/simulate/whatif", json=body)
    assert first.json() == second.json()


def test_whatif_generates_and_echoes_seed(client):
    body = {"team_a": "aus", "team_b": "ind", "sims": 200}
    response = client.post("/simulate/whatif", json=body).json()
    seed = response["estimate"]["seed"]
    assert response["request"]["seed"] == seed
    replay = client.post("/simulate/whatif", json={**body, "seed": seed}).json()
    assert replay["estimate"] == response["estimate"]


def test_whatif_lock_never_scorer_decreases_probability(client):
    base_body = {
        "team_a": "ind", "team_b": "aus", "sims": 1500, "seed": 5,
        "common_random_numbers": True,
    }
    baseline = client.post("/simulate/whatif", json=base_body).json()
    locked = client.post(
        "/simulate/whatif",
        json={**base_body, "constraint_a": {"locked": [NEVER_SCORER]}},
    ).json()
    assert locked["estimate"]["p_a"] < baseline["estimate"]["p_a"]
    summary = {p["id"]: p for p in locked["players"]["ind"]}
    assert summary[NEVER_SCORER]["selection_rate"] == 1.0
    assert summary[NEVER_SCORER]["prior_mean"] == pytest.approx(0.1, abs=1e-9)


def test_whatif_per_player_summaries(client):
    response = client.post(
        "/simulate/whatif", json={"team_a": "aus", "team_b": "ind", "sims": 300, "seed": 2}
    ).json()
    players = response["players"]
    assert set(players) == {"aus", "ind"}
    for side in players.values():
        for p in side:
            assert p["prior_mean"] > 0
            assert p["prior_sd"] > 0
            assert 0.0 <= p["selection_rate"] <= 1.0


def test_whatif_infeasible_names_stratum(client):
    response = client.post(
        "/simulate/whatif",
        json={
            "team_a": "aus", "team_b": "ind", "sims": 100, "seed": 1,
            "constraint_a": {"locked": ["aus_wk1", "aus_wk2"]},
        },
    )
    assert response.status_code == 422
    assert response.json()["stratum"] == "wk"


def test_whatif_rejects_oversized_sims(client):
    response = client.post(
        "/simulate/whatif", json={"team_a": "aus", "team_b": "ind", "sims": 100_001}
    )
    assert response.status_code == 400


def test_whatif_rejects_unknown_team(client):
    response = client.post("/simulate/whatif", json={"team_a": "aus", "team_b": "xyz"})
    assert response.status_code == 400


def test_malformed_body_is_400_not_422(client):
    response = client.post("/simulate/whatif", json={"team_a": "aus"})
    assert response.status_code == 400
    response = client.post("/simulate/whatif", json={"team_a": "aus", "team_b": "ind", "sims": -3})
    assert response.status_code == 400


def test_odds_quotes(client):
    assert client.post("/odds", json={"p": 0.5}).json()["decimal_odds"] == pytest.approx(2.0)
    assert client.post("/odds", json={"p": 0.73}).json()["decimal_odds"] == pytest.approx(
        1.3699, abs=1e-4
    )
    assert client.post("/odds", json={"p": 0.5, "margin": 1.05}).json()[
        "decimal_odds"
    ] == pytest.approx(2.1)
    no_price = client.post("/odds", json={"p": 0.0}).json()
    assert no_price["no_price"] is True
    assert no_price["decimal_odds"] is None


def test_odds_validation(client):
    assert client.post("/odds", json={"p": 1.5}).status_code == 400
    assert client.post("/odds", json={"p": -0.1}).status_code == 400
    assert client.post("/odds", json={"p": 0.5, "margin": 0.0}).status_code == 400


def test_cors_header_present(client):
    response = client.get("/teams", headers={"Origin": "http://localhost:5173"})
    assert response.headers.get("access-control-allow-origin") in (
        "http://localhost:5173", "*",
    )


def test_concurrent_whatif_requests_complete_independently(client):
    from concurrent.futures import ThreadPoolExecutor

    def run(_: int) -> dict:
        return client.post(
            "/simulate/whatif", json={"team_a": "aus", "team_b": "ind", "sims": 150}
        ).json()

    with ThreadPoolExecutor(max_workers=8) as pool:
        bodies = list(pool.map(run, range(8)))
    seeds = [b["estimate"]["seed"] for b in bodies]
    assert len(set(seeds)) == len(seeds)  # server-generated seeds are independent
    for body in bodies:
        assert body["estimate"]["n"] == 150


def test_infeasible_constraint_returns_no_estimate(client):
    response = client.post(
        "/simulate/whatif",
        json={
            "team_a": "aus", "team_b": "ind", "sims": 100, "seed": 1,
            "constraint_a": {"locked": ["aus_wk1", "aus_wk2"]},
        },
    )
    assert response.status_code == 422
    assert "estimate" not in response.json()


def test_whatif_matches_cli_replay(client, tmp_path):
    """A console result replays exactly through the CLI at the echoed seed."""
    from click.testing import CliRunner

    from wicketsim.cli import main

    body = {
        "team_a": "aus", "team_b": "ind", "sims": 400, "seed": 21,
        "constraint_a": {"excluded": ["aus_fast1"]},
        "common_random_numbers": True,
    }
    api_estimate = client.post("/simulate/whatif", json=body).json()["estimate"]

    config = {
        "dataset": {"stats": str(FIXTURES / "cwc12.csv"),
                    "teams": str(FIXTURES / "cwc12_teams.json"),
                    "defaults": str(FIXTURES / "league_defaults.json")},
        "scheme": json.loads((FIXTURES / "cwc12.json").read_text())["scheme"],
        "options": {"common_random_numbers": True},
        "match": {"pair": {"a": "aus", "b": "ind"},
                  "constraints": {"a": {"excluded": ["aus_fast1"]}}},
    }
    config_path = tmp_path / "replay.json"
    config_path.write_text(json.dumps(config))
    out = tmp_path / "replay_out.json"
    result = CliRunner().invoke(
        main,
        ["sim", "match", "--config", str(config_path), "--sims", "400", "--seed", "21",
         "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    cli_entry = json.loads(out.read_text())["entries"][0]
    assert cli_entry["p_a"] == api_estimate["p_a"]
    assert cli_entry["p_b"] == api_estimate["p_b"]
    assert cli_entry["p_draw"] == api_estimate["p_draw"]


def _vector_team() -> Team:
    players = tuple(
        Player(
            id=p["id"], name=p["id"], team_id="vec", role=Role.from_code(p["role"]),
            overseas=p["overseas"],
        )
        for p in VECTORS["roster"]
    )
    return Team(id="vec", name="Vector", roster=players)


@pytest.mark.parametrize("case", VECTORS["cases"], ids=lambda c: c["name"])
def test_feasibility_vectors_match_server_rules(case):
    """The shared client/server vector set, evaluated with the server's rules."""
    team = _vector_team()
    scheme = scheme_from_dict(VECTORS["scheme"])
    try:
        constraint = LineupConstraint(
            locked=frozenset(case["locked"]), excluded=frozenset(case["excluded"])
        )
        xi = sample_xi(team, scheme, constraint, rng=substream(1))
        outcome: tuple[bool, str | None] = (True, None)
        assert len(xi) == 11
    except SelectionError as exc:
        outcome = (False, exc.stratum)
    assert outcome[0] == case["ok"], outcome
    if not case["ok"]:
        assert outcome[1] == case["stratum"]
