import { writeFileSync } from "node:fs";

import { createCanvas, type SKRSContext2D } from "@napi-rs/canvas";

import {
  Frame,
  PlottedSeries,
  drawAxes,
  drawLegend,
  drawSeries,
  linearScale,
  niceTicks,
  seriesExtent,
} from "./chart.js";
import { loadAutocorr, loadConvergence, loadDensityTable, loadMpsrf } from "./data.js";
import { FigureSpec, validateSpec } from "./figure.js";
import { InputFormatError, PercentileBlock } from "./schema.js";
import { drawDensityTriangle } from "./triangle.js";

export interface RenderResult {
  width: number;
  height: number;
  outPath: string;
  series: PlottedSeries[];
}

const WIDTH = 900;
const HEIGHT = 560;
const FRAME: Frame = { left: 70, top: 50, width: 620, height: 440 };

interface FigureData {
  title: string;
  xLabel: string;
  yLabel: string;
  series: PlottedSeries[];
}

function gapless(values: Array<number | null>): number[] {
  return values.map((v) => (v === null ? NaN : v));
}

function bandSeries(sampler: string, x: number[], block: PercentileBlock): PlottedSeries[] {
  return [
    { sampler, label: "mean", dash: false, x, y: block.mean },
    { sampler, label: "p10", dash: true, x, y: block.p10 },
    { sampler, label: "p90", dash: true, x, y: block.p90 },
  ];
}

function checkLengths(source: string, n: number, series: PlottedSeries[]): void {
  for (const s of series) {
    if (s.x.length !== n || s.y.length !== n) {
      throw new InputFormatError(`${source}: series length differs from axis length ${n}`);
    }
  }
}

function autocorrData(spec: FigureSpec): FigureData {
  const series: PlottedSeries[] = [];
  let component = 0;
  for (const path of spec.inputs) {
    const doc = loadAutocorr(path);
    let x = doc.lags;
    if (spec.axis === "elapsed-time") {
      if (doc.median_seconds_per_step === null) {
        throw new InputFormatError(`${path}: no timing information for the elapsed-time axis`);
      }
      x = doc.lags.map((lag) => lag * (doc.median_seconds_per_step as number));
    }
    const block = doc.components[0];
    component = block.component;
    const band = bandSeries(doc.sampler, x, block);
    checkLengths(path, doc.lags.length, band);
    series.push(...band);
  }
  return {
    title: `chain autocorrelation (component ${component})`,
    xLabel: spec.axis === "elapsed-time" ? "lag time (s)" : "lag",
    yLabel: "autocorrelation",
    series,
  };
}

function checkpointAxis(
  spec: FigureSpec,
  path: string,
  checkpoints: number[],
  elapsed: Array<number | null>,
): number[] {
  if (spec.axis === "sample-index") {
    return checkpoints;
  }
  if (elapsed.length !== checkpoints.length) {
    throw new InputFormatError(`${path}: elapsed-time axis length differs from checkpoints`);
  }
  return gapless(elapsed);
}

function mpsrfData(spec: FigureSpec): FigureData {
  const series: PlottedSeries[] = [];
  for (const path of spec.inputs) {
    const doc = loadMpsrf(path);
    const x = checkpointAxis(spec, path, doc.checkpoints, doc.median_elapsed_seconds);
    const own: PlottedSeries[] = [
      { sampler: doc.sampler, label: "mpsrf", dash: false, x, y: doc.r_hat },
      ...bandSeries(doc.sampler, x, doc.scalar_psrf),
    ];
    checkLengths(path, doc.checkpoints.length, own);
    series.push(...own);
  }
  return {
    title: "potential scale reduction",
    xLabel: spec.axis === "elapsed-time" ? "elapsed time (s)" : "sample index",
    yLabel: "R-hat",
    series,
  };
}

function convergenceData(spec: FigureSpec): FigureData {
  const series: PlottedSeries[] = [];
  for (const path of spec.inputs) {
    const doc = loadConvergence(path);
    const x = checkpointAxis(spec, path, doc.checkpoints, doc.median_elapsed_seconds);
    const band = bandSeries(doc.sampler, x, doc.mean_error);
    checkLengths(path, doc.checkpoints.length, band);
    series.push(...band);
  }
  return {
    title: "mean error against the pooled reference",
    xLabel: spec.axis === "elapsed-time" ? "elapsed time (s)" : "sample index",
    yLabel: "l2 mean error",
    series,
  };
}

function drawFigure(ctx: SKRSContext2D, data: FigureData): void {
  const extent = seriesExtent(data.series);
  const xScale = linearScale(extent.xMin, extent.xMax, FRAME.left, FRAME.left + FRAME.width);
  const yScale = linearScale(extent.yMin, extent.yMax, FRAME.top + FRAME.height, FRAME.top);
  const samplerOrder = [...new Set(data.series.map((s) => s.sampler))];
  drawAxes(
    ctx,
    FRAME,
    niceTicks(extent.xMin, extent.xMax),
    niceTicks(extent.yMin, extent.yMax),
    xScale,
    yScale,
    data.xLabel,
    data.yLabel,
    data.title,
  );
  drawSeries(ctx, data.series, samplerOrder, xScale, yScale);
  drawLegend(ctx, FRAME, data.series, samplerOrder);
}

/**
 * Render one figure from harness output files and write it as a PNG.
 *
 * Rendering is read-only with respect to the inputs; repeated calls with
 * the same spec produce the same dimensions and the same plotted series.
 */
export function render(spec: FigureSpec): RenderResult {
  validateSpec(spec);
  const canvas = createCanvas(WIDTH, HEIGHT);
  const ctx = canvas.getContext("2d");
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, WIDTH, HEIGHT);

  let series: PlottedSeries[] = [];
  if (spec.kind === "density-triangle") {
    drawDensityTriangle(ctx, FRAME, loadDensityTable(spec.inputs[0]));
  } else {
    const data =
      spec.kind === "autocorr"
        ? autocorrData(spec)
        : spec.kind === "mpsrf"
          ? mpsrfData(spec)
          : convergenceData(spec);
    series = data.series;
    drawFigure(ctx, data);
  }

  writeFileSync(spec.out, canvas.toBuffer("image/png"));
  return { width: canvas.width, height: canvas.height, outPath: spec.out, series };
}
