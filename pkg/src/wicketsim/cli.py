"""Command-line front door: fit priors, run matchups and tournaments,
emit density tables, serve the what-if API."""

from __future__ import annotations

import csv
import io
import json
import os
import sys
import time
from pathlib import Path

import click

from wicketsim import __version__
from wicketsim.matchsim import FitOptions, MatchEngine, SimOptions
from wicketsim.priors import BetaGrid, DomainError, FitInput, density_table, fit_gamma
from wicketsim.roster import Dataset, DatasetError, load_dataset, resolve_matchup
from wicketsim.selection import (
    LineupConstraint,
    SelectionError,
    SelectionScheme,
    scheme_from_dict,
)
from wicketsim.tournament import simulate_tournament, tournament_config_from_dict

__all__ = ["main"]

_VALIDATION_ERRORS = (DatasetError, DomainError, SelectionError, ValueError, OSError)


def _fail(message: str) -> None:
    """Validation failure: message on stderr, exit code 2."""
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _default_seed() -> int:
    env = os.environ.get("WICKETSIM_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        _fail(f"WICKETSIM_SEED must be an integer, got {env!r}")
        raise AssertionError("unreachable")


def _manifest(command: str, config_paths: list[str], seed: int | None, sims: int | None) -> dict:
    return {
        "command": command,
        "config_paths": config_paths,
        "seed": seed,
        "sims": sims,
        "version": __version__,
    }


def _write_json(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _percent(p: float) -> str:
    return f"{100.0 * p:.1f}"


def _load_config_doc(config_path: str) -> tuple[dict, Path]:
    path = Path(config_path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        _fail(f"{config_path}: {exc}")
        raise AssertionError("unreachable")
    if not isinstance(doc, dict):
        _fail(f"{config_path}: expected a JSON object")
    return doc, path.parent


def _dataset_from_doc(doc: dict, base: Path) -> Dataset:
    try:
        paths = doc["dataset"]
        stats = base / paths["stats"]
        teams = base / paths["teams"]
        defaults = base / paths["defaults"]
    except (KeyError, TypeError) as exc:
        _fail(f"config missing dataset paths ({exc})")
        raise AssertionError("unreachable")
    return load_dataset(stats, teams, defaults)


def _fit_options_from_doc(doc: dict) -> FitOptions:
    fit_doc = doc.get("fit", {})
    grid_doc = fit_doc.get("grid", {})
    grid = BetaGrid(
        lo=float(grid_doc.get("lo", 0.01)),
        hi=float(grid_doc.get("hi", 5000.0)),
        count=int(grid_doc.get("count", 50_000)),
    )
    return FitOptions(
        grid=grid,
        tail_cap=float(fit_doc.get("tail_cap", 0.05)),
        beta_rule=str(fit_doc.get("beta_rule", "max_feasible")),
    )


def _engine_from_doc(doc: dict, base: Path, workers: int) -> tuple[Dataset, MatchEngine]:
    dataset = _dataset_from_doc(doc, base)
    scheme = scheme_from_dict(doc["scheme"]) if "scheme" in doc else SelectionScheme()
    scheme.require_xi_size(11)
    schemes = None
    if "schemes" in doc:
        schemes = {tid: scheme_from_dict(s) for tid, s in doc["schemes"].items()}
        for per_team in schemes.values():
            per_team.require_xi_size(11)
    options_doc = doc.get("options", {})
    options = SimOptions(
        fit=_fit_options_from_doc(doc),
        fixed_xi=bool(options_doc.get("fixed_xi", False)),
        common_random_numbers=bool(options_doc.get("common_random_numbers", False)),
        workers=workers,
    )
    engine = MatchEngine(dataset, scheme=scheme, schemes=schemes, options=options)
    return dataset, engine


@click.group()
@click.version_option(version=__version__, prog_name="wicketsim")
def main() -> None:
    """Monte Carlo cricket match and tournament prediction."""


@main.command("fit")
@click.option("--stats", required=True, type=click.Path(), help="stats CSV path")
@click.option("--teams", required=True, type=click.Path(), help="teams JSON path")
@click.option("--defaults", required=True, type=click.Path(), help="league defaults JSON path")
@click.option("--out", required=True, type=click.Path(), help="output params CSV path")
@click.option("--tail-cap", default=0.05, show_default=True)
@click.option("--beta-rule", default="max_feasible", show_default=True,
              type=click.Choice(["max_feasible", "min_feasible"]))
def cmd_fit(stats: str, teams: str, defaults: str, out: str, tail_cap: float, beta_rule: str) -> None:
    """Fit gamma priors for every (player, opponent) matchup."""
    started = time.perf_counter()
    try:
        dataset = load_dataset(stats, teams, defaults)
    except _VALIDATION_ERRORS as exc:
        _fail(str(exc))
        raise AssertionError("unreachable")

    grid = BetaGrid()
    rows = []
    for player_id in sorted(dataset.players):
        player = dataset.players[player_id]
        for opponent_id in sorted(dataset.teams):
            if opponent_id == player.team_id:
                continue
            record = resolve_matchup(player_id, opponent_id, dataset)
            result = fit_gamma(
                FitInput(average=record.average, highest=record.highest, tail_cap=tail_cap),
                grid,
                beta_rule=beta_rule,
            )
            rows.append(
                [
                    player_id,
                    opponent_id,
                    repr(result.alpha),
                    repr(result.beta),
                    record.tier.code,
                    "|".join(sorted(result.flags)),
                ]
            )

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["player_id", "opponent_id", "alpha", "beta", "tier", "flags"])
    writer.writerows(rows)
    Path(out).write_text(buffer.getvalue(), encoding="utf-8")
    click.echo(
        f"fit {len(rows)} matchups in {time.perf_counter() - started:.2f}s -> {out}", err=True
    )


@main.group("sim")
def cmd_sim() -> None:
    """Run Monte Carlo simulations."""


_sim_options = [
    click.option("--config", "config_path", required=True, type=click.Path()),
    click.option("--sims", type=click.IntRange(min=1), default=None,
                 help="replicates (matches) or simulations (tournaments)"),
    click.option("--seed", type=int, default=None, help="root seed; WICKETSIM_SEED fallback"),
    click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True),
    click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
                 show_default=True),
    click.option("--out", type=click.Path(), default=None, help="output file; stdout summary if omitted"),
]


def _with_sim_options(command):
    for option in reversed(_sim_options):
        command = option(command)
    return command


def _resolve_seed(flag_seed: int | None, *docs: dict) -> int:
    """Flag wins, then WICKETSIM_SEED, then the first config doc carrying one."""
    if flag_seed is not None:
        return flag_seed
    if os.environ.get("WICKETSIM_SEED") is not None:
        return _default_seed()
    for doc in docs:
        if "seed" in doc:
            return int(doc["seed"])
    return 0


@cmd_sim.command("match")
@_with_sim_options
def cmd_sim_match(config_path: str, sims: int | None, seed: int | None, workers: int,
                  fmt: str, out: str | None) -> None:
    """Head-to-head win probabilities for team pairs."""
    started = time.perf_counter()
    doc, base = _load_config_doc(config_path)
    match_doc = doc.get("match", {})
    try:
        dataset, engine = _engine_from_doc(doc, base, workers)
        n = sims if sims is not None else int(match_doc.get("sims", doc.get("sims", 10_000)))
        root_seed = _resolve_seed(seed, match_doc, doc)
        if n < 1:
            raise ValueError(f"sims must be >= 1, got {n}")

        if "pair" in match_doc:
            pair = match_doc["pair"]
            constraints = match_doc.get("constraints", {})
            constraint_a = LineupConstraint(
                locked=frozenset(constraints.get("a", {}).get("locked", [])),
                excluded=frozenset(constraints.get("a", {}).get("excluded", [])),
            )
            constraint_b = LineupConstraint(
                locked=frozenset(constraints.get("b", {}).get("locked", [])),
                excluded=frozenset(constraints.get("b", {}).get("excluded", [])),
            )
            estimate = engine.estimate_matchup(
                pair["a"], pair["b"], n, root_seed,
                constraint_a=constraint_a, constraint_b=constraint_b,
            )
            entries = [estimate.to_dict()]
            teams = sorted({pair["a"], pair["b"]})
        else:
            team_ids = match_doc.get("teams")
            matrix = engine.head_to_head_matrix(team_ids, n=n, seed=root_seed)
            entries = matrix.to_dict()["entries"]
            teams = list(matrix.teams)
    except _VALIDATION_ERRORS as exc:
        _fail(str(exc))
        raise AssertionError("unreachable")

    payload = {
        "teams": teams,
        "entries": entries,
        "manifest": _manifest("sim match", [config_path], root_seed, n),
    }
    if out is None and fmt == "json":
        _echo_match_summary(entries)
    elif fmt == "json":
        _write_json(payload, out)
    else:
        _write_match_csv(entries, out)
    click.echo(f"sim match done in {time.perf_counter() - started:.2f}s", err=True)


def _echo_match_summary(entries: list[dict]) -> None:
    for entry in entries:
        click.echo(
            f"{entry['a']} vs {entry['b']}: win {_percent(entry['p_a'])}% "
            f"loss {_percent(entry['p_b'])}% draw {_percent(entry['p_draw'])}%"
        )


def _write_match_csv(entries: list[dict], out: str | None) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["a", "b", "p_a", "p_b", "p_draw", "mean_score_a", "mean_score_b", "n", "seed"])
    for e in entries:
        writer.writerow(
            [e["a"], e["b"], repr(e["p_a"]), repr(e["p_b"]), repr(e["p_draw"]),
             repr(e["mean_score_a"]), repr(e["mean_score_b"]), e["n"], e["seed"]]
        )
    if out is None:
        click.echo(buffer.getvalue(), nl=False)
    else:
        Path(out).write_text(buffer.getvalue(), encoding="utf-8")


@cmd_sim.command("tournament")
@_with_sim_options
def cmd_sim_tournament(config_path: str, sims: int | None, seed: int | None, workers: int,
                       fmt: str, out: str | None) -> None:
    """Standings distribution and championship odds for a full tournament."""
    started = time.perf_counter()
    doc, base = _load_config_doc(config_path)
    try:
        dataset, engine = _engine_from_doc(doc, base, workers)
        tournament_doc = doc.get("tournament")
        if tournament_doc is None:
            raise ValueError("config has no 'tournament' section")
        root_seed = _resolve_seed(seed, tournament_doc, doc)
        config = tournament_config_from_dict(tournament_doc, sims=sims, seed=root_seed)
        for tid in config.team_ids:
            dataset.team(tid)
        distribution = simulate_tournament(engine, config, workers=workers)
    except _VALIDATION_ERRORS as exc:
        _fail(str(exc))
        raise AssertionError("unreachable")

    payload = distribution.to_dict()
    payload["manifest"] = _manifest("sim tournament", [config_path], config.seed, config.sims)
    if out is None and fmt == "json":
        click.echo("team: champion% semifinalist%")
        for tid in distribution.team_ids:
            click.echo(
                f"{tid}: {_percent(distribution.champion[tid])}% "
                f"{_percent(distribution.semifinalist[tid])}%"
            )
    elif fmt == "json":
        _write_json(payload, out)
    else:
        _write_standings_csv(distribution, out)
    click.echo(f"sim tournament done in {time.perf_counter() - started:.2f}s", err=True)


def _write_standings_csv(distribution, out: str | None) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        ["team", "position", "probability", "champion", "semifinalist", "conditional_champion"]
    )
    champion = distribution.champion
    semifinalist = distribution.semifinalist
    conditional = distribution.conditional_champion
    probs = distribution.positions
    for i, tid in enumerate(distribution.team_ids):
        for position in range(len(distribution.team_ids)):
            writer.writerow(
                [tid, position + 1, repr(float(probs[i, position])), repr(champion[tid]),
                 repr(semifinalist[tid]), repr(conditional[tid])]
            )
    if out is None:
        click.echo(buffer.getvalue(), nl=False)
    else:
        Path(out).write_text(buffer.getvalue(), encoding="utf-8")


@main.command("density")
@click.option("--stats", required=True, type=click.Path())
@click.option("--teams", required=True, type=click.Path())
@click.option("--defaults", required=True, type=click.Path())
@click.option("--player", "player_id", required=True)
@click.option("--opponents", default=None, help="comma-separated team ids; default all others")
@click.option("--points", default=512, show_default=True, type=click.IntRange(min=2))
@click.option("--out", required=True, type=click.Path())
def cmd_density(stats: str, teams: str, defaults: str, player_id: str, opponents: str | None,
                points: int, out: str) -> None:
    """Emit (x, pdf) tables of a player's fitted priors, one per opponent."""
    try:
        dataset = load_dataset(stats, teams, defaults)
        player = dataset.player(player_id)
        if opponents is None:
            opponent_ids = [tid for tid in sorted(dataset.teams) if tid != player.team_id]
        else:
            opponent_ids = [tid.strip() for tid in opponents.split(",") if tid.strip()]
            for tid in opponent_ids:
                dataset.team(tid)

        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["opponent", "x", "pdf"])
        for opponent_id in opponent_ids:
            record = resolve_matchup(player_id, opponent_id, dataset)
            result = fit_gamma(FitInput(average=record.average, highest=record.highest))
            table = density_table(result.params, record.highest, points=points)
            for x, pdf in table:
                writer.writerow([opponent_id, repr(float(x)), repr(float(pdf))])
    except _VALIDATION_ERRORS as exc:
        _fail(str(exc))
        raise AssertionError("unreachable")
    Path(out).write_text(buffer.getvalue(), encoding="utf-8")
    click.echo(f"density tables for {player_id} -> {out}", err=True)


@main.command("serve")
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--dataset", "dataset_path", required=True, type=click.Path(),
              help="dataset manifest JSON: {stats, teams, defaults}")
@click.option("--config", "config_path", default=None, type=click.Path(),
              help="optional sim config JSON (scheme, fit, options, api)")
def cmd_serve(port: int, host: str, dataset_path: str, config_path: str | None) -> None:
    """Serve the what-if JSON API until terminated."""
    import uvicorn

    from wicketsim.api import create_app

    try:
        manifest_doc, base = _load_config_doc(dataset_path)
        if "dataset" not in manifest_doc:
            manifest_doc = {"dataset": manifest_doc}
        doc: dict = dict(manifest_doc)
        if config_path is not None:
            extra, extra_base = _load_config_doc(config_path)
            doc.update({k: v for k, v in extra.items() if k != "dataset"})
        dataset, engine = _engine_from_doc(doc, base, workers=1)
        api_doc = doc.get("api", {})
        app = create_app(
            engine,
            sims_cap=int(api_doc.get("sims_cap", 100_000)),
            cors_origins=tuple(api_doc.get("cors_origins", ["*"])),
        )
    except _VALIDATION_ERRORS as exc:
        _fail(str(exc))
        raise AssertionError("unreachable")
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
