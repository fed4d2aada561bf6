/** CSV schemas produced by the simulator, and the errors raised on bad input. */

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export class EmptyData extends Error {
  constructor(message: string) {
    super(message);
    this.name = "EmptyData";
  }
}

/** Per-run aggregate rows written by the sweep runner. */
export const RESULT_COLUMNS = [
  "scheme", "load", "offered_rps", "achieved_rps", "mean_us", "p50_us",
  "p99_us", "clone_rate", "server_drop_rate", "filter_drops",
  "duplicate_deliveries", "seed", "duration_s",
] as const;

/** Per-second throughput rows written by failure-injection runs. */
export const TIMELINE_COLUMNS = [
  "scheme", "seed", "second", "completed_rps", "duplicates",
] as const;

/** Per-load empty-queue-fraction rows (see the state-signal demo script). */
export const FRACTION_COLUMNS = [
  "scheme", "load", "seed", "empty_queue_fraction",
] as const;

export interface ResultRow {
  scheme: string;
  load: number;
  offered_rps: number;
  achieved_rps: number;
  mean_us: number;
  p50_us: number;
  p99_us: number;
  clone_rate: number;
  server_drop_rate: number;
  filter_drops: number;
  duplicate_deliveries: number;
  seed: number;
  duration_s: number;
}

export interface TimelineRow {
  scheme: string;
  seed: number;
  second: number;
  completed_rps: number;
  duplicates: number;
}

export interface FractionRow {
  scheme: string;
  load: number;
  seed: number;
  empty_queue_fraction: number;
}

export function checkHeader(header: string[], expected: readonly string[], path: string): void {
  if (header.length !== expected.length || expected.some((c, i) => header[i] !== c)) {
    throw new SchemaError(
      `${path}: unexpected header [${header.join(",")}]; expected [${expected.join(",")}]`);
  }
}

function toNumber(raw: string, column: string, path: string): number {
  const v = Number(raw);
  if (!Number.isFinite(v)) {
    throw new SchemaError(`${path}: column ${column} has non-numeric value ${JSON.stringify(raw)}`);
  }
  return v;
}

export function toResultRows(records: string[][], path: string): ResultRow[] {
  return records.map((r) => ({
    scheme: r[0],
    load: toNumber(r[1], "load", path),
    offered_rps: toNumber(r[2], "offered_rps", path),
    achieved_rps: toNumber(r[3], "achieved_rps", path),
    mean_us: toNumber(r[4], "mean_us", path),
    p50_us: toNumber(r[5], "p50_us", path),
    p99_us: toNumber(r[6], "p99_us", path),
    clone_rate: toNumber(r[7], "clone_rate", path),
    server_drop_rate: toNumber(r[8], "server_drop_rate", path),
    filter_drops: toNumber(r[9], "filter_drops", path),
    duplicate_deliveries: toNumber(r[10], "duplicate_deliveries", path),
    seed: toNumber(r[11], "seed", path),
    duration_s: toNumber(r[12], "duration_s", path),
  }));
}

export function toTimelineRows(records: string[][], path: string): TimelineRow[] {
  return records.map((r) => ({
    scheme: r[0],
    seed: toNumber(r[1], "seed", path),
    second: toNumber(r[2], "second", path),
    completed_rps: toNumber(r[3], "completed_rps", path),
    duplicates: toNumber(r[4], "duplicates", path),
  }));
}

export function toFractionRows(records: string[][], path: string): FractionRow[] {
  return records.map((r) => ({
    scheme: r[0],
    load: toNumber(r[1], "load", path),
    seed: toNumber(r[2], "seed", path),
    empty_queue_fraction: toNumber(r[3], "empty_queue_fraction", path),
  }));
}
