import type { SKRSContext2D } from "@napi-rs/canvas";

import { Frame, formatTick } from "./chart.js";
import { viridis } from "./colormap.js";
import { DensityTable } from "./data.js";
import { InputFormatError } from "./schema.js";

const ROOT3_2 = Math.sqrt(3) / 2;

// Barycentric (b0, b1, b2) to unit coordinates: vertex 0 bottom-left,
// vertex 1 bottom-right, vertex 2 top. x in [0, 1], y in [0, sqrt(3)/2].
function toUnit(b: number[]): [number, number] {
  return [b[1] + b[2] / 2, b[2] * ROOT3_2];
}

function fromUnit(x: number, y: number): [number, number, number] {
  const b2 = y / ROOT3_2;
  const b1 = x - b2 / 2;
  return [1 - b1 - b2, b1, b2];
}

interface Bucketed {
  cell: Map<string, number[]>;
  size: number;
}

function bucketNodes(points: Array<[number, number]>): Bucketed {
  // Node spacing for an h-subdivision density dump is about 1/sqrt(count).
  const size = 1 / Math.max(4, Math.round(Math.sqrt(points.length)));
  const cell = new Map<string, number[]>();
  points.forEach(([x, y], idx) => {
    const key = `${Math.floor(x / size)},${Math.floor(y / size)}`;
    const bucket = cell.get(key);
    if (bucket) {
      bucket.push(idx);
    } else {
      cell.set(key, [idx]);
    }
  });
  return { cell, size };
}

function nearestNode(buckets: Bucketed, points: Array<[number, number]>, x: number, y: number): number {
  const cx = Math.floor(x / buckets.size);
  const cy = Math.floor(y / buckets.size);
  for (let ring = 1; ring <= 64; ring++) {
    let best = -1;
    let bestDist = Infinity;
    for (let i = cx - ring; i <= cx + ring; i++) {
      for (let j = cy - ring; j <= cy + ring; j++) {
        for (const idx of buckets.cell.get(`${i},${j}`) ?? []) {
          const dx = points[idx][0] - x;
          const dy = points[idx][1] - y;
          const dist = dx * dx + dy * dy;
          if (dist < bestDist) {
            bestDist = dist;
            best = idx;
          }
        }
      }
    }
    // a hit inside the ring cannot be beaten by nodes outside it
    if (best >= 0 && Math.sqrt(bestDist) <= ring * buckets.size) {
      return best;
    }
  }
  return -1;
}

export function drawDensityTriangle(ctx: SKRSContext2D, frame: Frame, table: DensityTable): void {
  if (table.dim !== 3) {
    throw new InputFormatError(`density triangle needs 3 components, input has ${table.dim}`);
  }

  const maxLog = table.nodes.reduce((acc, n) => Math.max(acc, n.logDensity), -Infinity);
  const heat = table.nodes.map((n) =>
    Number.isFinite(n.logDensity - maxLog) ? Math.exp(n.logDensity - maxLog) : 0,
  );
  const points = table.nodes.map((n) => toUnit(n.coords));
  const buckets = bucketNodes(points);

  // Fit an upright unit triangle into the frame, centered.
  const scale = Math.min(frame.width, frame.height / ROOT3_2);
  const originX = frame.left + (frame.width - scale) / 2;
  const baseY = frame.top + (frame.height + scale * ROOT3_2) / 2;

  const w = Math.ceil(scale);
  const h = Math.ceil(scale * ROOT3_2);
  const image = ctx.createImageData(w, h);
  for (let py = 0; py < h; py++) {
    for (let px = 0; px < w; px++) {
      const ux = (px + 0.5) / scale;
      const uy = (h - (py + 0.5)) / scale;
      const b = fromUnit(ux, uy);
      if (b[0] < -1e-9 || b[1] < -1e-9 || b[2] < -1e-9) continue;
      const idx = nearestNode(buckets, points, ux, uy);
      if (idx < 0) continue;
      const [r, g, bl] = viridis(heat[idx]);
      const off = 4 * (py * w + px);
      image.data[off] = r;
      image.data[off + 1] = g;
      image.data[off + 2] = bl;
      image.data[off + 3] = 255;
    }
  }
  ctx.putImageData(image, Math.round(originX), Math.round(baseY - h));

  ctx.save();
  ctx.strokeStyle = "#333333";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.moveTo(originX, baseY);
  ctx.lineTo(originX + scale, baseY);
  ctx.lineTo(originX + scale / 2, baseY - scale * ROOT3_2);
  ctx.closePath();
  ctx.stroke();

  ctx.fillStyle = "#333333";
  ctx.font = "12px sans-serif";
  ctx.textAlign = "center";
  ctx.fillText("pi_0 = 1", originX, baseY + 18);
  ctx.fillText("pi_1 = 1", originX + scale, baseY + 18);
  ctx.fillText("pi_2 = 1", originX + scale / 2, baseY - scale * ROOT3_2 - 8);
  ctx.restore();

  drawColorbar(ctx, frame, maxLog);
}

function drawColorbar(ctx: SKRSContext2D, frame: Frame, maxLog: number): void {
  const x = frame.left + frame.width + 24;
  const top = frame.top + 10;
  const height = frame.height - 20;
  ctx.save();
  for (let i = 0; i < height; i++) {
    const [r, g, b] = viridis(1 - i / (height - 1));
    ctx.fillStyle = `rgb(${r},${g},${b})`;
    ctx.fillRect(x, top + i, 14, 1);
  }
  ctx.strokeStyle = "#333333";
  ctx.strokeRect(x, top, 14, height);
  ctx.fillStyle = "#333333";
  ctx.font = "11px sans-serif";
  ctx.textAlign = "left";
  const peak = Number.isFinite(maxLog) ? `max log-density ${formatTick(maxLog)}` : "empty table";
  ctx.fillText("1.0", x + 18, top + 8);
  ctx.fillText("0.0", x + 18, top + height);
  ctx.fillText(peak, x - 6, top - 6);
  ctx.restore();
}
