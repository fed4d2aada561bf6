#!/usr/bin/env node
/** Standalone figure renderer.
 *
 * Usage:
 *   plot --csv results.csv[,more.csv] --kind latency_curve --out fig.svg
 *        [--schemes baseline,netclone] [--linear-y] [--title "..."]
 *
 * Kinds: latency_curve | improvement_bars | timeline | empty_queue_fraction.
 * Exit codes: 0 ok, 2 bad usage, 3 bad input data.
 */

import { FigureKind, FigureSpec, render } from "./figures";
import { EmptyData, SchemaError } from "./schema";

const KINDS: FigureKind[] = [
  "latency_curve", "improvement_bars", "timeline", "empty_queue_fraction",
];

class UsageError extends Error {}

export function parseArgs(argv: string[]): FigureSpec {
  const opts = new Map<string, string>();
  const flags = new Set<string>();
  for (let i = 0; i < argv.length; i += 1) {
    const arg = argv[i];
    if (!arg.startsWith("--")) {
      throw new UsageError(`unexpected argument ${JSON.stringify(arg)}`);
    }
    const name = arg.slice(2);
    if (name === "linear-y" || name === "help") {
      flags.add(name);
      continue;
    }
    const value = argv[i + 1];
    if (value === undefined) {
      throw new UsageError(`--${name} needs a value`);
    }
    // Repeated --csv accumulates paths.
    opts.set(name, name === "csv" && opts.has("csv")
      ? `${opts.get("csv")},${value}` : value);
    i += 1;
  }
  if (flags.has("help")) {
    throw new UsageError("help");
  }
  for (const key of opts.keys()) {
    if (!["csv", "kind", "out", "schemes", "title"].includes(key)) {
      throw new UsageError(`unknown option --${key}`);
    }
  }
  const csv = opts.get("csv");
  const kind = opts.get("kind") as FigureKind | undefined;
  const out = opts.get("out");
  if (!csv || !kind || !out) {
    throw new UsageError("--csv, --kind and --out are required");
  }
  if (!KINDS.includes(kind)) {
    throw new UsageError(`--kind must be one of: ${KINDS.join(", ")}`);
  }
  const schemes = opts.get("schemes")?.split(",").map((s) => s.trim()).filter(Boolean);
  return {
    csvPaths: csv.split(",").map((s) => s.trim()).filter(Boolean),
    kind,
    outPath: out,
    schemes,
    logY: flags.has("linear-y") ? false : undefined,
    title: opts.get("title"),
  };
}

const USAGE = "usage: plot --csv PATH[,PATH...] --kind KIND --out PATH " +
  "[--schemes a,b,c] [--linear-y] [--title TEXT]\n" +
  `kinds: ${KINDS.join(", ")}`;

export function main(argv: string[]): number {
  try {
    const spec = parseArgs(argv);
    const out = render(spec);
    process.stderr.write(`wrote ${out}\n`);
    return 0;
  } catch (err) {
    if (err instanceof UsageError) {
      process.stderr.write(`${err.message === "help" ? "" : `error: ${err.message}\n`}${USAGE}\n`);
      return err.message === "help" ? 0 : 2;
    }
    if (err instanceof SchemaError || err instanceof EmptyData) {
      process.stderr.write(`error: ${err.message}\n`);
      return 3;
    }
    if (err instanceof Error && "code" in err) {
      process.stderr.write(`error: ${err.message}\n`);
      return 3;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
