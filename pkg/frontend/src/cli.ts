/**
 * `plots render --kind base-noise|error-trace --in FILE --out FILE.png`
 *
 * Exit codes: 0 rendered, 1 empty data, 2 schema mismatch or usage error.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { PlotKind, buildChart } from "./chart.js";
import { renderChart } from "./render.js";
import { EmptyDataError, SchemaError, parseCsv } from "./schema.js";

const USAGE =
  "usage: plots render --kind base-noise|error-trace --in FILE --out FILE.png [--title TEXT]";

function parseArgs(argv: string[]): Map<string, string> {
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    if (!flag.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`bad argument ${JSON.stringify(flag)}`);
    }
    args.set(flag.slice(2), argv[i + 1]);
  }
  return args;
}

export function main(argv: string[]): number {
  try {
    if (argv[0] !== "render") {
      process.stderr.write(USAGE + "\n");
      return 2;
    }
    const args = parseArgs(argv.slice(1));
    const kind = args.get("kind");
    const input = args.get("in");
    const output = args.get("out");
    if (!kind || !input || !output) {
      process.stderr.write(USAGE + "\n");
      return 2;
    }
    if (kind !== "base-noise" && kind !== "error-trace") {
      process.stderr.write(`unknown kind ${JSON.stringify(kind)}\n`);
      return 2;
    }
    const table = parseCsv(readFileSync(input, "utf-8"));
    const model = buildChart(kind as PlotKind, table, args.get("title"));
    writeFileSync(output, renderChart(model));
    return 0;
  } catch (err) {
    if (err instanceof EmptyDataError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 1;
    }
    process.stderr.write(`error: ${err instanceof Error ? err.message : err}\n`);
    return 2;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
