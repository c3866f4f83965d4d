/** Session-local scenario history and side-by-side comparison math. */

import { Scenario, WhatIfRequest, WhatIfResponse } from "./types.js";

export interface PlayerDelta {
  id: string;
  name: string;
  team: string;
  selectionRateDelta: number;
}

export interface ComparisonView {
  left: Scenario;
  right: Scenario;
  deltaPA: number;
  deltaPB: number;
  deltaPDraw: number;
  seeds: [number, number];
  playerDeltas: PlayerDelta[];
}

export class ScenarioStore {
  private scenarios = new Map<number, Scenario>();
  private nextId = 1;

  add(label: string, request: WhatIfRequest, result: WhatIfResponse): Scenario {
    const scenario: Scenario = {
      id: this.nextId++,
      label,
      request,
      result,
      timestamp: Date.now(),
    };
    this.scenarios.set(scenario.id, scenario);
    return scenario;
  }

  get(id: number): Scenario | undefined {
    return this.scenarios.get(id);
  }

  remove(id: number): void {
    this.scenarios.delete(id);
  }

  list(): Scenario[] {
    return [...this.scenarios.values()].sort((a, b) => a.id - b.id);
  }

  /**
   * Pairwise comparison of stored scenarios. Ids that no longer exist are
   * skipped, so a removal mid-compare degrades to the remaining set.
   */
  compare(ids: number[]): ComparisonView[] {
    const present = ids
      .map((id) => this.scenarios.get(id))
      .filter((s): s is Scenario => s !== undefined);
    const views: ComparisonView[] = [];
    for (let i = 0; i + 1 < present.length; i += 1) {
      views.push(compareScenarios(present[i]!, present[i + 1]!));
    }
    return views;
  }
}

export function compareScenarios(left: Scenario, right: Scenario): ComparisonView {
  const playerDeltas: PlayerDelta[] = [];
  for (const [team, rightPlayers] of Object.entries(right.result.players)) {
    const leftPlayers = left.result.players[team];
    if (!leftPlayers) {
      continue;
    }
    const leftRates = new Map(leftPlayers.map((p) => [p.id, p]));
    for (const player of rightPlayers) {
      const before = leftRates.get(player.id);
      if (!before) {
        continue;
      }
      const delta = player.selection_rate - before.selection_rate;
      if (delta !== 0) {
        playerDeltas.push({
          id: player.id,
          name: player.name,
          team,
          selectionRateDelta: delta,
        });
      }
    }
  }
  playerDeltas.sort((a, b) => Math.abs(b.selectionRateDelta) - Math.abs(a.selectionRateDelta));
  return {
    left,
    right,
    deltaPA: right.result.estimate.p_a - left.result.estimate.p_a,
    deltaPB: right.result.estimate.p_b - left.result.estimate.p_b,
    deltaPDraw: right.result.estimate.p_draw - left.result.estimate.p_draw,
    seeds: [left.result.estimate.seed, right.result.estimate.seed],
    playerDeltas,
  };
}
