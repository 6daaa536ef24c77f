/**
 * Chart models: turn a parsed CSV into plottable series.
 *
 * Two kinds exist. `base-noise` compares noise standard deviation across
 * tree bases (one series per stream length, or a single series for the
 * one-length table). `error-trace` shows the mean per-round error of each
 * mechanism configuration over time.
 */

import { CsvTable, EmptyDataError, SchemaError, column, requireNumeric } from "./schema.js";

export type PlotKind = "base-noise" | "error-trace";

export interface Series {
  name: string;
  x: number[];
  y: number[];
}

export interface ChartModel {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

function arraysEqual(a: string[], b: string[]): boolean {
  return a.length === b.length && a.every((v, i) => v === b[i]);
}

function groupSeries(
  keys: string[],
  x: number[],
  y: number[],
  nameOf: (key: string) => string,
): Series[] {
  const order: string[] = [];
  const grouped = new Map<string, Series>();
  keys.forEach((key, i) => {
    let s = grouped.get(key);
    if (!s) {
      s = { name: nameOf(key), x: [], y: [] };
      grouped.set(key, s);
      order.push(key);
    }
    s.x.push(x[i]);
    s.y.push(y[i]);
  });
  return order.sort().map((key) => grouped.get(key)!);
}

export function buildBaseNoiseChart(table: CsvTable, title?: string): ChartModel {
  let series: Series[];
  if (arraysEqual(table.header, ["T", "r", "std_factor", "std_ratio_vs_base2"])) {
    const T = column(table, "T");
    series = groupSeries(
      T,
      requireNumeric(table, "r"),
      requireNumeric(table, "std_factor"),
      (key) => `T=${key}`,
    );
  } else if (arraysEqual(table.header, ["r", "objective", "std_ratio_vs_base2"])) {
    const r = requireNumeric(table, "r");
    const objective = requireNumeric(table, "objective");
    series = [{ name: "std factor", x: r, y: objective.map(Math.sqrt) }];
  } else {
    throw new SchemaError(
      `unrecognized base-noise header: ${table.header.join(",")}`,
    );
  }
  if (series.every((s) => s.x.length === 0)) {
    throw new EmptyDataError("no data rows");
  }
  return {
    title: title ?? "Noise std by tree base",
    xLabel: "base r",
    yLabel: "noise std factor",
    series,
  };
}

export function buildErrorTraceChart(table: CsvTable, title?: string): ChartModel {
  if (!arraysEqual(table.header, ["t", "series", "mean_error"])) {
    throw new SchemaError(
      `unrecognized error-trace header: ${table.header.join(",")}`,
    );
  }
  const series = groupSeries(
    column(table, "series"),
    requireNumeric(table, "t"),
    requireNumeric(table, "mean_error"),
    (key) => key,
  );
  if (series.length === 0) {
    throw new EmptyDataError("no data rows");
  }
  return {
    title: title ?? "Mean error per round",
    xLabel: "round t",
    yLabel: "mean error",
    series,
  };
}

export function buildChart(kind: PlotKind, table: CsvTable, title?: string): ChartModel {
  if (kind === "base-noise") return buildBaseNoiseChart(table, title);
  if (kind === "error-trace") return buildErrorTraceChart(table, title);
  throw new SchemaError(`unknown plot kind ${JSON.stringify(kind)}`);
}
