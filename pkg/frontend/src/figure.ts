import { existsSync } from "node:fs";

export const FIGURE_KINDS = ["density-triangle", "autocorr", "mpsrf", "convergence"] as const;
export const AXIS_MODES = ["sample-index", "elapsed-time"] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];
export type AxisMode = (typeof AXIS_MODES)[number];

export interface FigureSpec {
  inputs: string[];
  kind: FigureKind;
  axis: AxisMode;
  out: string;
}

export class FigureSpecError extends Error {}

export function validateSpec(spec: FigureSpec): void {
  if (!FIGURE_KINDS.includes(spec.kind)) {
    throw new FigureSpecError(`unknown figure kind '${spec.kind}' (expected one of ${FIGURE_KINDS.join(", ")})`);
  }
  if (!AXIS_MODES.includes(spec.axis)) {
    throw new FigureSpecError(`unknown axis mode '${spec.axis}' (expected one of ${AXIS_MODES.join(", ")})`);
  }
  if (spec.inputs.length === 0) {
    throw new FigureSpecError("no input files given");
  }
  const missing = spec.inputs.filter((p) => !existsSync(p));
  if (missing.length > 0) {
    throw new FigureSpecError(`input files not found: ${missing.join(", ")}`);
  }
  if (spec.kind === "density-triangle" && spec.inputs.length !== 1) {
    throw new FigureSpecError("density-triangle takes exactly one input file");
  }
  if (!spec.out) {
    throw new FigureSpecError("no output path given");
  }
}
