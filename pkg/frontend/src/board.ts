/** Lineup board state: lock/exclude toggles, live counters, submit gating. */

import { checkFeasibility, effectiveQuotas, OVERSEAS_STRATUM } from "./feasibility.js";
import {
  ConstraintBody,
  FeasibilityVerdict,
  ROLE_ORDER,
  RoleCode,
  RosterPlayer,
  SelectionScheme,
} from "./types.js";

export type ToggleState = "none" | "locked" | "excluded";

export interface StratumCounter {
  stratum: RoleCode | typeof OVERSEAS_STRATUM;
  quota: number;
  locked: number;
  excluded: number;
  poolSize: number;
}

export class LineupBoard {
  readonly locked = new Set<string>();
  readonly excluded = new Set<string>();

  constructor(
    readonly roster: RosterPlayer[],
    readonly scheme: SelectionScheme,
  ) {}

  stateOf(playerId: string): ToggleState {
    if (this.locked.has(playerId)) return "locked";
    if (this.excluded.has(playerId)) return "excluded";
    return "none";
  }

  /** Cycle none -> locked -> excluded -> none. */
  toggle(playerId: string): ToggleState {
    const current = this.stateOf(playerId);
    this.locked.delete(playerId);
    this.excluded.delete(playerId);
    if (current === "none") {
      this.locked.add(playerId);
      return "locked";
    }
    if (current === "locked") {
      this.excluded.add(playerId);
      return "excluded";
    }
    return "none";
  }

  clear(): void {
    this.locked.clear();
    this.excluded.clear();
  }

  feasibility(): FeasibilityVerdict {
    return checkFeasibility(this.roster, this.scheme, this.locked, this.excluded);
  }

  get submittable(): boolean {
    return this.feasibility().ok;
  }

  constraint(): ConstraintBody {
    return { locked: [...this.locked].sort(), excluded: [...this.excluded].sort() };
  }

  /** Per-stratum counters for the board header row. */
  counters(): StratumCounter[] {
    const rows: StratumCounter[] = [];
    const overseasActive = this.scheme.overseas_count !== undefined && this.scheme.overseas_count !== null;
    let pool = this.roster;
    if (overseasActive) {
      const overseas = pool.filter((p) => p.overseas);
      rows.push(this.counterFor(OVERSEAS_STRATUM, overseas, this.scheme.overseas_count ?? 0));
      pool = pool.filter((p) => !p.overseas);
    }
    const quotas = effectiveQuotas(this.scheme);
    for (const role of ROLE_ORDER) {
      const stratum = pool.filter((p) => p.role === role);
      if (stratum.length > 0 || quotas[role] > 0) {
        rows.push(this.counterFor(role, stratum, quotas[role]));
      }
    }
    return rows;
  }

  private counterFor(
    stratum: RoleCode | typeof OVERSEAS_STRATUM,
    pool: RosterPlayer[],
    quota: number,
  ): StratumCounter {
    return {
      stratum,
      quota,
      locked: pool.filter((p) => this.locked.has(p.id)).length,
      excluded: pool.filter((p) => this.excluded.has(p.id)).length,
      poolSize: pool.length,
    };
  }
}
