/**
 * Chart rendering: fixed 800x500 canvas, axes with ticks, one polyline per
 * series, legend in the top-right corner. Pure function of the chart model,
 * so identical inputs give byte-identical images.
 */

import { ChartModel } from "./chart.js";
import { encodePng } from "./png.js";
import { CHAR_HEIGHT, CHAR_WIDTH, Color, Raster, textWidth } from "./raster.js";

export const WIDTH = 800;
export const HEIGHT = 500;

const MARGIN = { left: 76, right: 24, top: 40, bottom: 52 };
const AXIS: Color = [40, 40, 40];
const GRID: Color = [225, 225, 225];
const TEXT: Color = [30, 30, 30];

export const PALETTE: Color[] = [
  [31, 119, 180],
  [255, 127, 14],
  [44, 160, 44],
  [214, 39, 40],
  [148, 103, 189],
  [140, 86, 75],
  [227, 119, 194],
  [127, 127, 127],
  [188, 189, 34],
  [23, 190, 207],
];

interface Range {
  min: number;
  max: number;
}

function dataRange(values: number[]): Range {
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  if (min === max) {
    min -= 1;
    max += 1;
  }
  return { min, max };
}

function formatTick(v: number): string {
  if (v === 0) return "0";
  const mag = Math.abs(v);
  if (mag >= 100000 || mag < 0.01) {
    return v.toExponential(1).toUpperCase();
  }
  const text = mag >= 100 ? v.toFixed(0) : mag >= 1 ? v.toFixed(1) : v.toFixed(3);
  return text.replace(/\.?0+$/, "");
}

export function renderChart(model: ChartModel): Buffer {
  const raster = new Raster(WIDTH, HEIGHT);
  const plotX = MARGIN.left;
  const plotY = MARGIN.top;
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;

  const xs = model.series.flatMap((s) => s.x);
  const ys = model.series.flatMap((s) => s.y);
  const xr = dataRange(xs);
  const yr = dataRange(ys);
  const toPx = (v: number) => plotX + ((v - xr.min) / (xr.max - xr.min)) * plotW;
  const toPy = (v: number) => plotY + plotH - ((v - yr.min) / (yr.max - yr.min)) * plotH;

  // grid and ticks
  const ticks = 5;
  for (let i = 0; i <= ticks; i++) {
    const fx = xr.min + ((xr.max - xr.min) * i) / ticks;
    const px = Math.round(toPx(fx));
    raster.line(px, plotY, px, plotY + plotH, GRID);
    const label = formatTick(fx);
    raster.text(px - textWidth(label) / 2, plotY + plotH + 8, label, TEXT);
    const fy = yr.min + ((yr.max - yr.min) * i) / ticks;
    const py = Math.round(toPy(fy));
    raster.line(plotX, py, plotX + plotW, py, GRID);
    const ylabel = formatTick(fy);
    raster.text(plotX - textWidth(ylabel) - 6, py - 3, ylabel, TEXT);
  }

  // frame
  raster.line(plotX, plotY, plotX, plotY + plotH, AXIS);
  raster.line(plotX, plotY + plotH, plotX + plotW, plotY + plotH, AXIS);

  // series
  model.series.forEach((series, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    const points = series.x
      .map((x, i) => [x, series.y[i]] as const)
      .sort((a, b) => a[0] - b[0]);
    for (let i = 1; i < points.length; i++) {
      raster.line(
        toPx(points[i - 1][0]),
        toPy(points[i - 1][1]),
        toPx(points[i][0]),
        toPy(points[i][1]),
        color,
      );
    }
    if (points.length === 1) {
      raster.fillRect(
        Math.round(toPx(points[0][0])) - 2,
        Math.round(toPy(points[0][1])) - 2,
        5,
        5,
        color,
      );
    }
  });

  // title and axis labels
  raster.text(
    Math.round(WIDTH / 2 - textWidth(model.title) / 2),
    12,
    model.title,
    TEXT,
  );
  raster.text(
    Math.round(plotX + plotW / 2 - textWidth(model.xLabel) / 2),
    HEIGHT - 20,
    model.xLabel,
    TEXT,
  );
  raster.text(8, 12, model.yLabel, TEXT);

  // legend, top-right inside the plot
  const legendW =
    Math.max(...model.series.map((s) => textWidth(s.name))) + 26;
  const legendX = plotX + plotW - legendW - 6;
  let legendY = plotY + 6;
  model.series.forEach((series, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    raster.fillRect(legendX, legendY + 2, 14, 3, color);
    raster.text(legendX + 20, legendY - 1, series.name, TEXT);
    legendY += CHAR_HEIGHT + 2;
  });

  return encodePng(WIDTH, HEIGHT, raster.data);
}

export function legendEntries(model: ChartModel): string[] {
  return model.series.map((s) => s.name);
}
