/**
 * Client-side lineup feasibility: the same rules the server applies before
 * simulating, so infeasible boards are blocked before the request is sent.
 *
 * Checks run in the server's order: constraint consistency, roster
 * membership, the overseas stratum (when an exact count applies), then
 * each role stratum with locked-overflow before eligible-shortage.
 */

import {
  FeasibilityVerdict,
  ROLE_ORDER,
  RoleCode,
  RosterPlayer,
  SelectionScheme,
} from "./types.js";

export const OVERSEAS_STRATUM = "overseas";

function fail(stratum: string | null, reason: string): FeasibilityVerdict {
  return { ok: false, stratum, reason };
}

/** Quotas after the conditions shift from fast bowlers to spinners. */
export function effectiveQuotas(scheme: SelectionScheme): Record<RoleCode, number> {
  const quotas = {} as Record<RoleCode, number>;
  for (const role of ROLE_ORDER) {
    quotas[role] = scheme.quotas[role] ?? 0;
  }
  const shift = scheme.conditions?.spin_shift ?? 0;
  if (shift > quotas.fast) {
    throw new Error(`spin_shift ${shift} exceeds the fast-bowler quota ${quotas.fast}`);
  }
  quotas.fast -= shift;
  quotas.spin += shift;
  return quotas;
}

export function xiSize(scheme: SelectionScheme): number {
  const quotas = effectiveQuotas(scheme);
  const roleSlots = ROLE_ORDER.reduce((total, role) => total + quotas[role], 0);
  return roleSlots + (scheme.overseas_count ?? 0);
}

function checkStratum(
  label: string,
  pool: RosterPlayer[],
  quota: number,
  locked: Set<string>,
  excluded: Set<string>,
): FeasibilityVerdict {
  const lockedHere = pool.filter((p) => locked.has(p.id)).length;
  if (lockedHere > quota) {
    return fail(label, `${lockedHere} locked players exceed the quota ${quota}`);
  }
  const eligible = pool.filter((p) => !locked.has(p.id) && !excluded.has(p.id)).length;
  if (quota - lockedHere > eligible) {
    return fail(label, `quota ${quota} cannot be met (${lockedHere} locked, ${eligible} eligible)`);
  }
  return { ok: true };
}

export function checkFeasibility(
  roster: RosterPlayer[],
  scheme: SelectionScheme,
  lockedIds: Iterable<string>,
  excludedIds: Iterable<string>,
): FeasibilityVerdict {
  const locked = new Set(lockedIds);
  const excluded = new Set(excludedIds);

  for (const id of locked) {
    if (excluded.has(id)) {
      return fail(null, `players both locked and excluded: ${id}`);
    }
  }
  const known = new Set(roster.map((p) => p.id));
  for (const id of [...locked, ...excluded].sort()) {
    if (!known.has(id)) {
      return fail(null, `constraint references ${id}, not on this team`);
    }
  }

  let quotas: Record<RoleCode, number>;
  try {
    quotas = effectiveQuotas(scheme);
  } catch (error) {
    return fail("fast", String(error));
  }

  let pool = roster;
  if (scheme.overseas_count !== undefined && scheme.overseas_count !== null) {
    const overseas = pool.filter((p) => p.overseas);
    const verdict = checkStratum(OVERSEAS_STRATUM, overseas, scheme.overseas_count, locked, excluded);
    if (!verdict.ok) {
      return verdict;
    }
    pool = pool.filter((p) => !p.overseas);
  }
  for (const role of ROLE_ORDER) {
    const stratum = pool.filter((p) => p.role === role);
    const verdict = checkStratum(role, stratum, quotas[role], locked, excluded);
    if (!verdict.ok) {
      return verdict;
    }
  }
  return { ok: true };
}
