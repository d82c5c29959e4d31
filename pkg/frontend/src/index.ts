export { AXIS_MODES, FIGURE_KINDS, FigureSpecError, validateSpec } from "./figure.js";
export type { FigureSpec, FigureKind, AxisMode } from "./figure.js";
export { render } from "./render.js";
export type { RenderResult } from "./render.js";
export type { PlottedSeries } from "./chart.js";
export {
  SUPPORTED_SCHEMA_VERSION,
  SchemaMismatchError,
  MissingColumnError,
  InputFormatError,
} from "./schema.js";
export type { AutocorrDocument, MpsrfDocument, ConvergenceDocument } from "./schema.js";
export { loadAutocorr, loadMpsrf, loadConvergence, loadDensityTable } from "./data.js";
export type { DensityTable, DensityNode } from "./data.js";
export { viridis } from "./colormap.js";
export { main } from "./cli.js";
