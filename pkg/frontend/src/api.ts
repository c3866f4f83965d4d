/** Thin fetch client for the wicketsim API with stale-response discarding. */

import { TeamRow, WhatIfRequest, WhatIfResponse } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
    readonly stratum: string | null = null,
  ) {
    super(detail);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail ?? body);
      throw new ApiError(response.status, detail, body.stratum ?? null);
    }
    return body as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("/health");
  }

  async teams(): Promise<TeamRow[]> {
    const body = await this.request<{ teams: TeamRow[] }>("/teams");
    return body.teams;
  }

  async players(teamId: string): Promise<unknown[]> {
    const body = await this.request<{ players: unknown[] }>(`/teams/${teamId}/players`);
    return body.players;
  }

  simulateWhatIf(request: WhatIfRequest): Promise<WhatIfResponse> {
    return this.request("/simulate/whatif", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    });
  }

  odds(p: number, margin = 1.0): Promise<{ decimal_odds: number | null; no_price: boolean }> {
    return this.request("/odds", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ p, margin }),
    });
  }
}

/**
 * At most one in-flight simulation per panel: responses that arrive after
 * a newer request was issued are discarded.
 */
export class LatestRequestGate {
  private counter = 0;

  issue(): number {
    this.counter += 1;
    return this.counter;
  }

  isCurrent(id: number): boolean {
    return id === this.counter;
  }

  /** Resolves with the response only if no newer request superseded it. */
  async run<T>(task: () => Promise<T>): Promise<T | null> {
    const id = this.issue();
    const result = await task();
    return this.isCurrent(id) ? result : null;
  }
}
