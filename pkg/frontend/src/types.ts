/** Shared shapes of the wicketsim JSON API and console state. */

export type RoleCode = "fast" | "spin" | "ar_fast" | "ar_spin" | "bat" | "wk";

export const ROLE_ORDER: RoleCode[] = ["fast", "spin", "ar_fast", "ar_spin", "bat", "wk"];

export const ROLE_LABELS: Record<RoleCode, string> = {
  fast: "Fast bowlers",
  spin: "Spinners",
  ar_fast: "All-rounders (fast)",
  ar_spin: "All-rounders (spin)",
  bat: "Batsmen",
  wk: "Wicket-keepers",
};

export interface RosterPlayer {
  id: string;
  name?: string;
  role: RoleCode;
  overseas: boolean;
}

export interface ConditionsProfile {
  spin_shift: number;
  description?: string;
}

export interface SelectionScheme {
  quotas: Partial<Record<RoleCode, number>>;
  overseas_count?: number | null;
  conditions?: ConditionsProfile;
}

export interface ConstraintBody {
  locked: string[];
  excluded: string[];
}

export interface WhatIfRequest {
  team_a: string;
  team_b: string;
  constraint_a: ConstraintBody;
  constraint_b: ConstraintBody;
  fixed_xi: boolean;
  sims: number;
  seed?: number;
  common_random_numbers: boolean;
}

export interface MatchEstimate {
  a: string;
  b: string;
  p_a: number;
  p_b: number;
  p_draw: number;
  mean_score_a: number;
  mean_score_b: number;
  n: number;
  seed: number;
}

export interface PlayerSummary {
  id: string;
  name: string;
  role: RoleCode;
  overseas: boolean;
  prior_mean: number;
  prior_sd: number;
  tier: string;
  flags: string[];
  selection_rate: number;
}

export interface WhatIfResponse {
  estimate: MatchEstimate;
  request: {
    team_a: string;
    team_b: string;
    fixed_xi: boolean;
    common_random_numbers: boolean;
    sims: number;
    seed: number;
  };
  players: Record<string, PlayerSummary[]>;
}

export interface TeamRow {
  id: string;
  name: string;
  players: number;
  overseas: number;
}

export interface Scenario {
  id: number;
  label: string;
  request: WhatIfRequest;
  result: WhatIfResponse;
  timestamp: number;
}

export interface FeasibilityFailure {
  ok: false;
  stratum: string | null;
  reason: string;
}

export type FeasibilityVerdict = { ok: true } | FeasibilityFailure;
