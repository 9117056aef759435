#!/usr/bin/env node
/**
 * urnfield-render <trajectory.csv ...> [--flow <csv ...>]
 *                 [--fixed-points <report.json>] [--colour <i>] --out <file.(svg|png)>
 *
 * Exit codes: 0 rendered, 1 input rejected (bad schema / d != 3), 2 usage.
 */

import { SchemaError } from "./csv";
import { render, RenderSpec } from "./render";

export function parseArgs(argv: string[]): RenderSpec {
  const spec: RenderSpec = { trajectories: [], flows: [], colour: 1, out: "" };
  let mode: "traj" | "flow" = "traj";
  for (let k = 0; k < argv.length; k += 1) {
    const arg = argv[k];
    if (arg === "--flow") {
      mode = "flow";
    } else if (arg === "--fixed-points") {
      spec.fixedPoints = argv[++k];
      if (spec.fixedPoints === undefined) throw new UsageError("--fixed-points needs a path");
    } else if (arg === "--colour" || arg === "--color") {
      const value = Number(argv[++k]);
      if (!Number.isInteger(value) || value < 1) throw new UsageError("--colour needs a positive integer");
      spec.colour = value;
    } else if (arg === "--out") {
      spec.out = argv[++k] ?? "";
      if (spec.out === "") throw new UsageError("--out needs a path");
    } else if (arg.startsWith("--")) {
      throw new UsageError(`unknown flag ${arg}`);
    } else {
      (mode === "traj" ? spec.trajectories : spec.flows).push(arg);
    }
  }
  if (spec.out === "") throw new UsageError("--out is required");
  return spec;
}

export class UsageError extends Error {}

export function main(argv: string[]): number {
  try {
    const spec = parseArgs(argv);
    const summary = render(spec);
    console.log(
      `wrote ${spec.out} (${summary.format}): ${summary.nPaths} path(s), ` +
        `${summary.nFlows} flow curve(s), ${summary.nMarkers} fixed-point marker(s)`
    );
    return 0;
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`usage error: ${err.message}`);
      return 2;
    }
    if (err instanceof SchemaError) {
      console.error(`rejected: ${err.message}`);
      return 1;
    }
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
