"""Acceptance suite: every exit criterion at its stated tolerance.

Each test prints one PASS line (visible with ``pytest -s``); a failed
assertion is the corresponding FAIL. Criteria marked with runtime limits
assert wall time too.
"""

from __future__ import annotations

import json
import math
import time
from collections import Counter
from itertools import combinations

import numpy as np
import pytest
from click.testing import CliRunner
from scipy import stats

from wicketsim.cli import main as cli_main
from wicketsim.matchsim import MatchEstimate, HeadToHead
from wicketsim.priors import BetaGrid, FitInput, GammaParams, fit_gamma, gamma_sample, gamma_tail
from wicketsim.roster import Role
from wicketsim.selection import SelectionScheme, sample_xi
from wicketsim.streams import substream
from wicketsim.tournament import (
    PlayoffFormat,
    compare_to_actuals,
    simulate_league,
    simulate_tournament,
    tournament_config_from_dict,
    wilson_interval,
)

from tests.conftest import FIXTURES, toy_engine
from tests.test_priors import scan_oracle
from tests.test_matchsim import two_point_distribution
from tests.test_selection import make_team
from tests.test_tournament import WILSON_5_OF_10, enumerate_champion_probabilities, league_config


def report(name: str, detail: str) -> None:
    print(f"PASS [{name}]: {detail}")


def test_williamson_anchor():
    started = time.perf_counter()
    alpha = 54.61 / 0.63
    assert abs(alpha - 86.68) < 0.01
    tail = gamma_tail(118.0, GammaParams(86.68, 0.63))
    assert tail <= 0.05
    assert tail < 1e-6  # quadrature-oracle value is ~7.3e-17
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    report("williamson-anchor", f"alpha={alpha:.4f}, tail={tail:.2e}, {elapsed:.3f}s")


def test_fit_matches_linear_scan_oracle_on_200_inputs():
    started = time.perf_counter()
    grid = BetaGrid()
    rng = np.random.default_rng(2023)
    checked = 0
    for _ in range(200):
        average = float(np.round(rng.uniform(5.0, 200.0), 2))
        highest = int(math.ceil(average * rng.uniform(1.15, 3.0)))
        result = fit_gamma(FitInput(average=average, highest=highest), grid)
        assert result.flags == frozenset(), (average, highest, result.flags)
        oracle_index = scan_oracle(average, float(highest), 0.05, grid, "max_feasible")
        assert result.beta_index == oracle_index, (average, highest)
        # Maximal feasibility: the successor candidate violates the bound.
        assert result.beta_index < grid.count - 1
        successor = grid.candidate(result.beta_index + 1)
        assert gamma_tail(float(highest), GammaParams(average / successor, successor)) > 0.05
        checked += 1
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0
    report("fit-linear-scan-oracle", f"{checked} randomized inputs agreed, {elapsed:.1f}s")


def test_gamma_sampler_moments():
    started = time.perf_counter()
    rng_params = np.random.default_rng(7)
    n = 100_000
    for k in range(20):
        alpha = float(rng_params.uniform(0.5, 120.0))
        beta = float(rng_params.uniform(0.05, 50.0))
        params = GammaParams(alpha, beta)
        draws = gamma_sample(params, substream(500, k), size=n)
        se_mean = params.sd() / math.sqrt(n)
        assert abs(draws.mean() - alpha * beta) <= 4.0 * se_mean
        assert abs(draws.var() - params.variance()) <= 0.10 * params.variance()
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0
    report("sampler-moments", f"20 parameter pairs x {n} draws, {elapsed:.1f}s")


def test_srs_inclusion_law_and_subset_uniformity():
    started = time.perf_counter()
    # 3-from-5 inclusion frequency: n/N = 0.6 for every player.
    team = make_team({Role.FAST_BOWLER: 5, Role.BATSMAN: 8})
    scheme = SelectionScheme(quotas={Role.FAST_BOWLER: 3, Role.BATSMAN: 8})
    counts: Counter = Counter()
    n = 10_000
    rng = substream(913)
    for _ in range(n):
        xi = sample_xi(team, scheme, rng=rng)
        counts.update(p.id for p in xi if p.role is Role.FAST_BOWLER)
    for i in range(1, 6):
        freq = counts[f"t_fast{i}"] / n
        assert abs(freq - 0.6) <= 0.02, (i, freq)

    # 2-from-4 subset uniformity: chi-square over the 6 subsets.
    team2 = make_team({Role.SPINNER: 4, Role.BATSMAN: 9})
    scheme2 = SelectionScheme(quotas={Role.SPINNER: 2, Role.BATSMAN: 9})
    subsets = list(combinations(sorted(p.id for p in team2.roster if p.role is Role.SPINNER), 2))
    subset_counts = {s: 0 for s in subsets}
    draws = 50_000
    rng2 = substream(914)
    for _ in range(draws):
        xi = sample_xi(team2, scheme2, rng=rng2)
        subset_counts[tuple(sorted(p.id for p in xi if p.role is Role.SPINNER))] += 1
    observed = np.array([subset_counts[s] for s in subsets])
    assert all(abs(c / draws - 1 / 6) < 0.01 for c in observed)
    pvalue = stats.chisquare(observed).pvalue
    assert pvalue > 0.001
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    report("srs-laws", f"inclusion 0.6 +/- 0.02, chi-square p={pvalue:.3f}, {elapsed:.1f}s")


def test_ipl_overseas_rule(ipl8_dataset, ipl8_scheme):
    started = time.perf_counter()
    team = ipl8_dataset.team("mi")
    rng = substream(808)
    n = 10_000
    for _ in range(n):
        xi = sample_xi(team, ipl8_scheme, rng=rng)
        assert len(xi) == 11
        assert sum(1 for p in xi if p.overseas) == 4
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    report("ipl-overseas-rule", f"{n} sampled XIs all carried exactly 4 overseas, {elapsed:.1f}s")


def test_match_symmetry(cwc12_engine):
    started = time.perf_counter()
    estimate = cwc12_engine.estimate_matchup("aus", "aus", 10_000, 2024)
    assert abs(estimate.p_a - 0.5) <= 0.02
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    report("match-symmetry", f"identical teams p_a={estimate.p_a:.4f}, {elapsed:.1f}s")


def test_deterministic_score_oracle():
    started = time.perf_counter()
    engine = toy_engine({"a": [(50.0, 60)] * 11, "b": [(40.0, 50)] * 11})
    estimate = engine.estimate_matchup("a", "b", 200, 1)
    assert estimate.p_a == 1.0
    assert estimate.mean_score_a == 550.0
    assert estimate.mean_score_b == 440.0
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    report("deterministic-oracle", f"550 vs 440 -> p_a=1 exactly, {elapsed:.2f}s")


def test_tiny_tournament_enumeration():
    started = time.perf_counter()
    means = {"t1": 50.58, "t2": 50.52, "t3": 50.47, "t4": 50.42}
    engine = toy_engine({tid: [(mean, 51)] for tid, mean in means.items()})
    sims = 10_000
    config = league_config(
        sorted(means), playoff=PlayoffFormat.SEMIS_1V4_2V3_FINAL, sims=sims, seed=929
    )
    distribution = simulate_tournament(engine, config)
    exact = enumerate_champion_probabilities(means, 51)
    for tid, p in exact.items():
        band = 3.0 * math.sqrt(p * (1.0 - p) / sims)
        assert abs(distribution.champion[tid] - p) <= band, (tid, distribution.champion[tid], p)
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0
    detail = ", ".join(f"{tid}={exact[tid]:.3f}" for tid in sorted(exact))
    report("tiny-tournament-enumeration", f"exact {detail}, {elapsed:.1f}s")


def test_structural_suite_on_bundled_fixtures(cwc12_engine, ipl8_engine):
    started = time.perf_counter()

    cwc_doc = json.loads((FIXTURES / "cwc12.json").read_text())["tournament"]
    cwc_config = tournament_config_from_dict(cwc_doc, sims=10_000, seed=42)
    cwc = simulate_tournament(cwc12_engine, cwc_config, workers=1)
    assert (cwc.position_counts.sum(axis=1) == 10_000).all()
    assert (cwc.position_counts.sum(axis=0) == 10_000).all()
    for tid in cwc.team_ids:
        assert cwc.champion[tid] <= cwc.semifinalist[tid] + 1e-12
        if cwc.semifinalist[tid] > 0:
            assert cwc.conditional_champion[tid] >= cwc.champion[tid] - 1e-12

    # Points conservation: 2 x C(12,2) = 132 points distributed per sim.
    for seed in range(50):
        table = simulate_league(cwc12_engine, cwc_config, substream(3000, seed))
        assert sum(row.points for row in table) == 132

    ipl_doc = json.loads((FIXTURES / "ipl8.json").read_text())["tournament"]
    ipl_config = tournament_config_from_dict(ipl_doc, sims=10_000, seed=42)
    max_points = ipl_config.rounds * (len(ipl_config.team_ids) - 1) * ipl_config.points.win
    assert max_points == 28
    ipl = simulate_tournament(ipl8_engine, ipl_config, workers=1)
    assert (ipl.position_counts.sum(axis=1) == 10_000).all()
    assert (ipl.position_counts.sum(axis=0) == 10_000).all()
    for seed in range(25):
        table = simulate_league(ipl8_engine, ipl_config, substream(4000, seed))
        assert table[0].points <= 28
        assert sum(row.points for row in table) == 2 * 2 * 28  # 112 games x 2 points

    elapsed = time.perf_counter() - started
    assert elapsed < 300.0
    champion = max(cwc.champion, key=cwc.champion.get)
    report(
        "structural-suite",
        f"cwc12+ipl8 at 10k sims, top champion {champion}={cwc.champion[champion]:.3f}, "
        f"{elapsed:.0f}s",
    )


def test_cli_determinism_across_reruns_and_workers(tmp_path):
    runner = CliRunner()
    fit_args = [
        "fit",
        "--stats", str(FIXTURES / "cwc12.csv"),
        "--teams", str(FIXTURES / "cwc12_teams.json"),
        "--defaults", str(FIXTURES / "league_defaults.json"),
    ]
    fit1, fit2 = tmp_path / "f1.csv", tmp_path / "f2.csv"
    assert runner.invoke(cli_main, [*fit_args, "--out", str(fit1)]).exit_code == 0
    assert runner.invoke(cli_main, [*fit_args, "--out", str(fit2)]).exit_code == 0
    assert fit1.read_bytes() == fit2.read_bytes()

    match_args = ["sim", "match", "--config", str(FIXTURES / "whatif_cwc12.json"),
                  "--sims", "300", "--seed", "6"]
    m1, m2, m3 = tmp_path / "m1.json", tmp_path / "m2.json", tmp_path / "m3.json"
    assert runner.invoke(cli_main, [*match_args, "--workers", "1", "--out", str(m1)]).exit_code == 0
    assert runner.invoke(cli_main, [*match_args, "--workers", "1", "--out", str(m2)]).exit_code == 0
    assert runner.invoke(cli_main, [*match_args, "--workers", "4", "--out", str(m3)]).exit_code == 0
    assert m1.read_bytes() == m2.read_bytes() == m3.read_bytes()

    tour_args = ["sim", "tournament", "--config", str(FIXTURES / "cwc12.json"),
                 "--sims", "80", "--seed", "6"]
    t1, t2, t3 = tmp_path / "t1.json", tmp_path / "t2.json", tmp_path / "t3.json"
    assert runner.invoke(cli_main, [*tour_args, "--workers", "1", "--out", str(t1)]).exit_code == 0
    assert runner.invoke(cli_main, [*tour_args, "--workers", "1", "--out", str(t2)]).exit_code == 0
    assert runner.invoke(cli_main, [*tour_args, "--workers", "3", "--out", str(t3)]).exit_code == 0
    assert t1.read_bytes() == t2.read_bytes() == t3.read_bytes()

    report("cli-determinism", "fit, sim match, sim tournament byte-identical across reruns/workers")


def test_figure2_machinery():
    lo, hi = wilson_interval(5, 10)
    assert lo == pytest.approx(WILSON_5_OF_10[0], abs=1e-9)
    assert hi == pytest.approx(WILSON_5_OF_10[1], abs=1e-9)

    predicted = HeadToHead(
        teams=("aus", "ind"),
        entries={
            ("aus", "ind"): MatchEstimate("aus", "ind", 649, 345, 6, 1000, 0, 0, 0),
            ("ind", "aus"): MatchEstimate("ind", "aus", 345, 649, 6, 1000, 0, 0, 0),
        },
    )
    actual = {("aus", "ind"): (570, 1000), ("ind", "aus"): (349, 1000)}
    rows = compare_to_actuals(predicted, actual)
    row = next(r for r in rows if (r.team_a, r.team_b) == ("aus", "ind"))
    assert row.predicted == pytest.approx(0.649)
    assert row.actual == pytest.approx(0.570)
    assert row.flag in ("inside", "outside")
    report("figure2-machinery", f"wilson [{lo:.6f}, {hi:.6f}], aus-ind row carries 64.9/57.0")
