"""Generate the bundled synthetic fixtures (cwc12 and ipl8 datasets).

Deterministic: rerunning reproduces byte-identical files. Every stats row
is checked to fit cleanly (no clamp/unsatisfiable flags, interior grid
candidate) so fixture simulations exercise the sane-prior path.
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from wicketsim.priors import BetaGrid, FitInput, fit_gamma  # noqa: E402

OUT = Path(__file__).resolve().parents[1] / "src" / "wicketsim" / "fixtures"

ROLE_BASE_AVG = {"fast": 12.0, "spin": 13.0, "ar_fast": 22.0, "ar_spin": 24.0, "bat": 38.0, "wk": 32.0}
ROLE_DEFAULTS = {
    "fast": {"average": 10.0, "highest": 30},
    "spin": {"average": 11.0, "highest": 32},
    "ar_fast": {"average": 18.0, "highest": 52},
    "ar_spin": {"average": 20.0, "highest": 55},
    "bat": {"average": 25.0, "highest": 80},
    "wk": {"average": 24.0, "highest": 75},
}

CWC_TEAMS = {
    "afg": ("Afghanistan", 0.88),
    "aus": ("Australia", 1.18),
    "ban": ("Bangladesh", 0.92),
    "eng": ("England", 1.15),
    "ind": ("India", 1.22),
    "ire": ("Ireland", 0.82),
    "nzl": ("New Zealand", 1.12),
    "pak": ("Pakistan", 1.10),
    "rsa": ("South Africa", 1.08),
    "sri": ("Sri Lanka", 1.00),
    "win": ("West Indies", 0.97),
    "zim": ("Zimbabwe", 0.85),
}
CWC_ROSTER_SHAPE = [("fast", 4), ("spin", 4), ("ar_fast", 2), ("ar_spin", 2), ("bat", 4), ("wk", 2)]

IPL_TEAMS = {
    "csk": ("Chennai Super Kings", 0.90),
    "dc": ("Delhi Capitals", 1.12),
    "kkr": ("Kolkata Knight Riders", 1.00),
    "kxip": ("Kings XI Punjab", 0.98),
    "mi": ("Mumbai Indians", 1.20),
    "rcb": ("Royal Challengers Bangalore", 1.05),
    "rr": ("Rajasthan Royals", 0.93),
    "srh": ("Sunrisers Hyderabad", 0.96),
}
IPL_DOMESTIC_SHAPE = [("fast", 3), ("spin", 2), ("ar_fast", 2), ("ar_spin", 2), ("bat", 2), ("wk", 2)]
IPL_OVERSEAS_ROLES = ["fast", "spin", "ar_fast", "bat", "bat"]

GRID = BetaGrid()
FALLBACK_TIERS = ["domestic", "first_class", "reserve", "u19"]

NEVER_SCORER = "ind_neverscorer"


def sane_line(rng: np.random.Generator, base_avg: float, strength: float) -> tuple[float, int]:
    """A batting line whose fit lands on an interior grid candidate, unflagged."""
    for _ in range(200):
        average = round(float(base_avg * strength * rng.uniform(0.72, 1.32)), 2)
        average = max(average, 1.5)
        highest = int(round(average * rng.uniform(1.7, 2.4)))
        highest = max(highest, int(np.ceil(average)) + 2)
        result = fit_gamma(FitInput(average=average, highest=highest), GRID)
        if not result.flags and 0 < result.beta_index < GRID.count - 1:
            return average, highest
    raise RuntimeError("could not draw a sane batting line")


def build_teams(teams: dict, shape: list[tuple[str, int]], overseas_roles: list[str] | None) -> list[dict]:
    docs = []
    for tid in sorted(teams):
        name, _ = teams[tid]
        players = []
        for role, count in shape:
            for i in range(1, count + 1):
                players.append(
                    {"id": f"{tid}_{role}{i}", "name": f"{name} {role.replace('_', ' ').title()} {i}",
                     "role": role, "overseas": False}
                )
        if overseas_roles:
            for i, role in enumerate(overseas_roles, start=1):
                players.append(
                    {"id": f"{tid}_ovs{i}", "name": f"{name} Overseas {i}", "role": role,
                     "overseas": True}
                )
        docs.append({"id": tid, "name": name, "players": players})
    return docs


def build_stats(rng: np.random.Generator, team_docs: list[dict], teams: dict) -> list[list]:
    """Per-opponent international rows with tier/star/default fallbacks mixed in."""
    rows: list[list] = []
    team_ids = sorted(teams)
    for team in team_docs:
        tid = team["id"]
        _, strength = teams[tid]
        for slot, player in enumerate(team["players"]):
            pid = player["id"]
            if pid == NEVER_SCORER:
                for opponent in team_ids:
                    if opponent == tid:
                        continue
                    rows.append([pid, opponent, 0.1, 1, 3, "international"])
                continue
            base = ROLE_BASE_AVG[player["role"]]
            # Last regular player of each team is a debutant: no rows at all,
            # resolving to the league default for his role.
            if slot == len(team["players"]) - 1:
                continue
            # Second-to-last player has only an all-opponents aggregate row.
            if slot == len(team["players"]) - 2:
                average, highest = sane_line(rng, base, strength)
                rows.append([pid, "*", average, highest, int(rng.integers(8, 40)), "international"])
                continue
            has_star = rng.random() < 0.5
            if has_star:
                average, highest = sane_line(rng, base, strength)
                rows.append([pid, "*", average, highest, int(rng.integers(10, 60)), "international"])
            for opponent in team_ids:
                if opponent == tid:
                    continue
                draw = rng.random()
                if draw < 0.08 and has_star:
                    continue  # no specific row; falls back to the star row
                average, highest = sane_line(rng, base, strength)
                innings = int(rng.integers(4, 30))
                if draw < 0.20:
                    tier = FALLBACK_TIERS[int(rng.integers(0, len(FALLBACK_TIERS)))]
                else:
                    tier = "international"
                rows.append([pid, opponent, average, highest, innings, tier])
    rows.sort(key=lambda r: (r[0], r[1], r[5]))
    return rows


def write_stats(path: Path, rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["player_id", "opponent_id", "average", "highest", "innings", "tier"])
        writer.writerows(rows)


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20230811)

    cwc_teams = build_teams(CWC_TEAMS, CWC_ROSTER_SHAPE, None)
    for team in cwc_teams:
        if team["id"] == "ind":
            team["players"].append(
                {"id": NEVER_SCORER, "name": "India Never Scorer", "role": "bat", "overseas": False}
            )
    cwc_stats = build_stats(rng, cwc_teams, CWC_TEAMS)
    write_stats(OUT / "cwc12.csv", cwc_stats)
    (OUT / "cwc12_teams.json").write_text(json.dumps(cwc_teams, indent=2), encoding="utf-8")

    ipl_teams = build_teams(IPL_TEAMS, IPL_DOMESTIC_SHAPE, IPL_OVERSEAS_ROLES)
    ipl_stats = build_stats(rng, ipl_teams, IPL_TEAMS)
    write_stats(OUT / "ipl8.csv", ipl_stats)
    (OUT / "ipl8_teams.json").write_text(json.dumps(ipl_teams, indent=2), encoding="utf-8")

    (OUT / "league_defaults.json").write_text(
        json.dumps(ROLE_DEFAULTS, indent=2, sort_keys=True), encoding="utf-8"
    )

    cwc_config = {
        "dataset": {"stats": "cwc12.csv", "teams": "cwc12_teams.json",
                    "defaults": "league_defaults.json"},
        "scheme": {
            "quotas": {"fast": 3, "spin": 2, "ar_fast": 1, "ar_spin": 1, "bat": 3, "wk": 1},
            "conditions": {"spin_shift": 1, "description": "subcontinental venue"},
        },
        "tournament": {
            "teams": sorted(CWC_TEAMS),
            "rounds": 1,
            "points": {"win": 2, "loss": 0, "draw": "split"},
            "playoff": "semis_1v4_2v3_final",
            "sims": 10000,
            "seed": 42,
        },
        "match": {"teams": sorted(CWC_TEAMS), "sims": 10000, "seed": 42},
    }
    (OUT / "cwc12.json").write_text(json.dumps(cwc_config, indent=2), encoding="utf-8")

    ipl_config = {
        "dataset": {"stats": "ipl8.csv", "teams": "ipl8_teams.json",
                    "defaults": "league_defaults.json"},
        "scheme": {
            "quotas": {"fast": 2, "spin": 1, "ar_fast": 1, "ar_spin": 1, "bat": 1, "wk": 1},
            "overseas_count": 4,
            "conditions": {"spin_shift": 0},
        },
        "tournament": {
            "teams": sorted(IPL_TEAMS),
            "rounds": 2,
            "points": {"win": 2, "loss": 0, "draw": "super_over"},
            "playoff": "q1_eliminator_q2_final",
            "sims": 10000,
            "seed": 42,
        },
    }
    (OUT / "ipl8.json").write_text(json.dumps(ipl_config, indent=2), encoding="utf-8")

    whatif_config = {
        "dataset": {"stats": "cwc12.csv", "teams": "cwc12_teams.json",
                    "defaults": "league_defaults.json"},
        "scheme": cwc_config["scheme"],
        "options": {"common_random_numbers": True, "fixed_xi": False},
        "match": {"pair": {"a": "aus", "b": "ind"}, "sims": 2000, "seed": 7},
    }
    (OUT / "whatif_cwc12.json").write_text(json.dumps(whatif_config, indent=2), encoding="utf-8")

    serve_manifest = {
        "dataset": {"stats": "cwc12.csv", "teams": "cwc12_teams.json",
                    "defaults": "league_defaults.json"},
        "scheme": cwc_config["scheme"],
        "api": {"sims_cap": 100000, "cors_origins": ["*"]},
    }
    (OUT / "dataset_cwc12.json").write_text(json.dumps(serve_manifest, indent=2), encoding="utf-8")

    print(f"cwc12: {len(cwc_stats)} stats rows; ipl8: {len(ipl_stats)} rows -> {OUT}")


if __name__ == "__main__":
    main()
