/** Console entry point: wires the board, API client, and scenario history. */

import { ApiClient, ApiError, LatestRequestGate } from "./api.js";
import { LineupBoard } from "./board.js";
import { ScenarioStore } from "./scenarios.js";
import {
  PlayerSummary,
  ROLE_LABELS,
  RoleCode,
  RosterPlayer,
  Scenario,
  SelectionScheme,
  WhatIfRequest,
} from "./types.js";

const API_BASE = (window as any).WICKETSIM_API ?? "http://127.0.0.1:8000";

// The server applies its configured scheme; the console mirrors the CWC
// default (after conditions) for client-side gating. Served deployments
// can override via window.WICKETSIM_SCHEME.
const DEFAULT_SCHEME: SelectionScheme = (window as any).WICKETSIM_SCHEME ?? {
  quotas: { fast: 2, spin: 3, ar_fast: 1, ar_spin: 1, bat: 3, wk: 1 },
  conditions: { spin_shift: 0 },
};

const client = new ApiClient(API_BASE);
const store = new ScenarioStore();
const gate = new LatestRequestGate();

const el = (id: string) => document.getElementById(id)!;
const pct = (p: number) => `${(100 * p).toFixed(1)}%`;

interface PanelState {
  teamA: string;
  teamB: string;
  boardA: LineupBoard | null;
  boardB: LineupBoard | null;
}

const state: PanelState = { teamA: "", teamB: "", boardA: null, boardB: null };

async function loadTeams(): Promise<void> {
  const teams = await client.teams();
  for (const selectId of ["team-a", "team-b"]) {
    const select = el(selectId) as HTMLSelectElement;
    select.innerHTML = "";
    for (const team of teams) {
      const option = document.createElement("option");
      option.value = team.id;
      option.textContent = `${team.name} (${team.id})`;
      select.appendChild(option);
    }
  }
  (el("team-a") as HTMLSelectElement).selectedIndex = 0;
  (el("team-b") as HTMLSelectElement).selectedIndex = Math.min(1, teams.length - 1);
  await reloadBoards();
}

async function reloadBoards(): Promise<void> {
  state.teamA = (el("team-a") as HTMLSelectElement).value;
  state.teamB = (el("team-b") as HTMLSelectElement).value;
  const [playersA, playersB] = await Promise.all([
    client.players(state.teamA) as Promise<RosterPlayer[]>,
    client.players(state.teamB) as Promise<RosterPlayer[]>,
  ]);
  state.boardA = new LineupBoard(playersA, DEFAULT_SCHEME);
  state.boardB = new LineupBoard(playersB, DEFAULT_SCHEME);
  renderBoard("board-a", state.boardA, state.teamA);
  renderBoard("board-b", state.boardB, state.teamB);
  refreshGate();
}

function renderBoard(containerId: string, board: LineupBoard, teamId: string): void {
  const container = el(containerId);
  container.innerHTML = "";
  const title = document.createElement("h3");
  title.textContent = teamId;
  container.appendChild(title);

  const counters = document.createElement("div");
  counters.className = "counters";
  container.appendChild(counters);

  const byRole = new Map<RoleCode, RosterPlayer[]>();
  for (const player of board.roster) {
    const bucket = byRole.get(player.role) ?? [];
    bucket.push(player);
    byRole.set(player.role, bucket);
  }
  for (const [role, players] of byRole) {
    const column = document.createElement("div");
    column.className = "stratum";
    const header = document.createElement("h4");
    header.textContent = ROLE_LABELS[role];
    column.appendChild(header);
    for (const player of players) {
      const chip = document.createElement("button");
      chip.className = `player ${board.stateOf(player.id)}`;
      chip.textContent = `${player.name ?? player.id}${player.overseas ? " ✈" : ""}`;
      chip.onclick = () => {
        board.toggle(player.id);
        renderBoard(containerId, board, teamId);
        refreshGate();
      };
      column.appendChild(chip);
    }
    container.appendChild(column);
  }
  renderCounters(counters, board);
}

function renderCounters(target: HTMLElement, board: LineupBoard): void {
  target.innerHTML = "";
  for (const counter of board.counters()) {
    const span = document.createElement("span");
    span.className = "counter";
    span.textContent = `${counter.stratum}: ${counter.locked}/${counter.quota} locked, pool ${
      counter.poolSize - counter.excluded
    }`;
    if (counter.locked > counter.quota || counter.poolSize - counter.excluded < counter.quota) {
      span.classList.add("violated");
    }
    target.appendChild(span);
  }
}

function refreshGate(): void {
  const runButton = el("run") as HTMLButtonElement;
  const problems: string[] = [];
  for (const [label, board] of [["A", state.boardA], ["B", state.boardB]] as const) {
    if (!board) continue;
    const verdict = board.feasibility();
    if (!verdict.ok) {
      problems.push(`team ${label}: ${verdict.reason} (stratum ${verdict.stratum ?? "n/a"})`);
    }
  }
  runButton.disabled = problems.length > 0;
  el("gate-message").textContent = problems.join("; ");
}

async function runScenario(): Promise<void> {
  if (!state.boardA || !state.boardB) return;
  const request: WhatIfRequest = {
    team_a: state.teamA,
    team_b: state.teamB,
    constraint_a: state.boardA.constraint(),
    constraint_b: state.boardB.constraint(),
    fixed_xi: (el("fixed-xi") as HTMLInputElement).checked,
    sims: Number((el("sims") as HTMLInputElement).value) || 10_000,
    common_random_numbers: (el("crn") as HTMLInputElement).checked,
  };
  const seedField = (el("seed") as HTMLInputElement).value.trim();
  if (seedField !== "") {
    request.seed = Number(seedField);
  }
  el("run-status").textContent = "simulating…";
  try {
    const result = await gate.run(() => client.simulateWhatIf(request));
    if (result === null) {
      return; // superseded by a newer request
    }
    const scenario = store.add(`${state.teamA} vs ${state.teamB}`, request, result);
    renderScenario(scenario);
    renderHistory();
    el("run-status").textContent = "";
  } catch (error) {
    if (error instanceof ApiError && error.status === 422) {
      el("run-status").textContent = `infeasible at stratum ${error.stratum}: ${error.detail}`;
    } else {
      el("run-status").textContent = String(error);
    }
  }
}

function renderScenario(scenario: Scenario): void {
  const estimate = scenario.result.estimate;
  el("result-title").textContent =
    `${scenario.label} — seed ${estimate.seed}, ${estimate.n} replicates`;
  el("result-probs").innerHTML =
    `<span class="win">${estimate.a} ${pct(estimate.p_a)}</span>` +
    `<span class="draw">draw ${pct(estimate.p_draw)}</span>` +
    `<span class="loss">${estimate.b} ${pct(estimate.p_b)}</span>`;
  const bars = el("player-bars");
  bars.innerHTML = "";
  for (const [team, players] of Object.entries(scenario.result.players)) {
    const active = players
      .filter((p: PlayerSummary) => p.selection_rate > 0)
      .sort((x, y) => y.prior_mean - x.prior_mean);
    for (const player of active) {
      const row = document.createElement("div");
      row.className = "bar-row";
      const width = Math.min(100, player.prior_mean);
      row.innerHTML =
        `<span class="bar-label">${team} · ${player.name}</span>` +
        `<span class="bar" style="width:${width}%"></span>` +
        `<span class="bar-value">μ ${player.prior_mean.toFixed(1)} ± ${player.prior_sd.toFixed(1)}` +
        ` · picked ${pct(player.selection_rate)}</span>`;
      bars.appendChild(row);
    }
  }
}

function renderHistory(): void {
  const list = el("history");
  list.innerHTML = "";
  for (const scenario of store.list()) {
    const item = document.createElement("li");
    const estimate = scenario.result.estimate;
    item.innerHTML =
      `<label><input type="checkbox" data-id="${scenario.id}"> #${scenario.id} ${scenario.label} ` +
      `p=${pct(estimate.p_a)} seed=${estimate.seed}</label>`;
    list.appendChild(item);
  }
}

function renderComparison(): void {
  const checked = [...document.querySelectorAll<HTMLInputElement>("#history input:checked")].map(
    (input) => Number(input.dataset.id),
  );
  const views = store.compare(checked);
  const target = el("compare");
  target.innerHTML = "";
  for (const view of views) {
    const div = document.createElement("div");
    div.className = "compare-row";
    div.innerHTML =
      `<strong>#${view.left.id} → #${view.right.id}</strong> ` +
      `Δp_a ${(100 * view.deltaPA).toFixed(1)} · Δdraw ${(100 * view.deltaPDraw).toFixed(1)} ` +
      `(seeds ${view.seeds[0]}, ${view.seeds[1]})`;
    target.appendChild(div);
  }
}

export function boot(): void {
  el("run").onclick = () => void runScenario();
  el("team-a").onchange = () => void reloadBoards();
  el("team-b").onchange = () => void reloadBoards();
  el("compare-button").onclick = renderComparison;
  (el("crn") as HTMLInputElement).checked = true; // default ON so deltas are paired
  void loadTeams().catch((error) => {
    el("run-status").textContent = `cannot reach API at ${API_BASE}: ${error}`;
  });
}

if (typeof document !== "undefined" && document.getElementById("run")) {
  boot();
}
