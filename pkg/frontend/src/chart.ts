import type { SKRSContext2D } from "@napi-rs/canvas";

export interface PlottedSeries {
  sampler: string;
  label: string;
  dash: boolean;
  x: number[];
  y: Array<number | null>;
}

export interface Frame {
  left: number;
  top: number;
  width: number;
  height: number;
}

export function linearScale(d0: number, d1: number, r0: number, r1: number): (v: number) => number {
  const span = d1 - d0 || 1;
  return (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) hi = lo + 1;
  const raw = (hi - lo) / count;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = mag * (norm >= 7.5 ? 10 : norm >= 3.5 ? 5 : norm >= 1.5 ? 2 : 1);
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 1e4 || abs < 1e-3) return v.toExponential(1);
  return String(Number(v.toPrecision(6)));
}

export interface SeriesExtent {
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
}

export function seriesExtent(series: PlottedSeries[]): SeriesExtent {
  let xMin = Infinity;
  let xMax = -Infinity;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const s of series) {
    for (let i = 0; i < s.x.length; i++) {
      const y = s.y[i];
      if (y === null || !Number.isFinite(y) || !Number.isFinite(s.x[i])) continue;
      if (s.x[i] < xMin) xMin = s.x[i];
      if (s.x[i] > xMax) xMax = s.x[i];
      if (y < yMin) yMin = y;
      if (y > yMax) yMax = y;
    }
  }
  if (!Number.isFinite(xMin)) {
    xMin = 0;
    xMax = 1;
  }
  if (!Number.isFinite(yMin)) {
    yMin = 0;
    yMax = 1;
  }
  if (yMin === yMax) {
    yMin -= 0.5;
    yMax += 0.5;
  }
  const pad = 0.05 * (yMax - yMin);
  return { xMin, xMax, yMin: yMin - pad, yMax: yMax + pad };
}

export const SAMPLER_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export function samplerColor(order: string[], sampler: string): string {
  const idx = order.indexOf(sampler);
  return SAMPLER_COLORS[(idx < 0 ? order.length : idx) % SAMPLER_COLORS.length];
}

export function drawAxes(
  ctx: SKRSContext2D,
  frame: Frame,
  xTicks: number[],
  yTicks: number[],
  xScale: (v: number) => number,
  yScale: (v: number) => number,
  xLabel: string,
  yLabel: string,
  title: string,
): void {
  ctx.save();
  ctx.strokeStyle = "#cccccc";
  ctx.lineWidth = 1;
  ctx.setLineDash([]);
  ctx.font = "12px sans-serif";
  ctx.fillStyle = "#333333";

  for (const t of xTicks) {
    const px = xScale(t);
    ctx.beginPath();
    ctx.moveTo(px, frame.top);
    ctx.lineTo(px, frame.top + frame.height);
    ctx.stroke();
    ctx.textAlign = "center";
    ctx.fillText(formatTick(t), px, frame.top + frame.height + 16);
  }
  for (const t of yTicks) {
    const py = yScale(t);
    ctx.beginPath();
    ctx.moveTo(frame.left, py);
    ctx.lineTo(frame.left + frame.width, py);
    ctx.stroke();
    ctx.textAlign = "right";
    ctx.fillText(formatTick(t), frame.left - 8, py + 4);
  }

  ctx.strokeStyle = "#333333";
  ctx.strokeRect(frame.left, frame.top, frame.width, frame.height);

  ctx.textAlign = "center";
  ctx.fillText(xLabel, frame.left + frame.width / 2, frame.top + frame.height + 38);
  ctx.font = "14px sans-serif";
  ctx.fillText(title, frame.left + frame.width / 2, frame.top - 14);
  ctx.save();
  ctx.translate(frame.left - 52, frame.top + frame.height / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.font = "12px sans-serif";
  ctx.fillText(yLabel, 0, 0);
  ctx.restore();
  ctx.restore();
}

export function drawSeries(
  ctx: SKRSContext2D,
  series: PlottedSeries[],
  samplerOrder: string[],
  xScale: (v: number) => number,
  yScale: (v: number) => number,
): void {
  ctx.save();
  for (const s of series) {
    ctx.strokeStyle = samplerColor(samplerOrder, s.sampler);
    ctx.lineWidth = s.dash ? 1.25 : 2;
    ctx.setLineDash(s.dash ? [6, 4] : []);
    ctx.beginPath();
    let drawing = false;
    for (let i = 0; i < s.x.length; i++) {
      const y = s.y[i];
      if (y === null || !Number.isFinite(y) || !Number.isFinite(s.x[i])) {
        drawing = false; // break the line at gaps
        continue;
      }
      const px = xScale(s.x[i]);
      const py = yScale(y);
      if (drawing) {
        ctx.lineTo(px, py);
      } else {
        ctx.moveTo(px, py);
        drawing = true;
      }
    }
    ctx.stroke();
  }
  ctx.restore();
}

export function drawLegend(
  ctx: SKRSContext2D,
  frame: Frame,
  series: PlottedSeries[],
  samplerOrder: string[],
): void {
  ctx.save();
  ctx.font = "12px sans-serif";
  const x = frame.left + frame.width + 16;
  let y = frame.top + 8;
  for (const s of series) {
    ctx.strokeStyle = samplerColor(samplerOrder, s.sampler);
    ctx.lineWidth = s.dash ? 1.25 : 2;
    ctx.setLineDash(s.dash ? [6, 4] : []);
    ctx.beginPath();
    ctx.moveTo(x, y);
    ctx.lineTo(x + 26, y);
    ctx.stroke();
    ctx.fillStyle = "#333333";
    ctx.textAlign = "left";
    ctx.fillText(`${s.sampler} ${s.label}`, x + 32, y + 4);
    y += 18;
  }
  ctx.restore();
}
