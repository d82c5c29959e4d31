import { z } from "zod";

/** Version of the harness output layout this renderer understands. */
export const SUPPORTED_SCHEMA_VERSION = 1;

export class SchemaMismatchError extends Error {}

export class MissingColumnError extends Error {}

export class InputFormatError extends Error {}

// Non-finite floats are serialized as null by the harness.
const seriesValues = z.array(z.number().nullable());

const percentileBlock = z.object({
  mean: seriesValues,
  p10: seriesValues,
  p90: seriesValues,
});

export const autocorrDocument = z.object({
  schema_version: z.number(),
  metric: z.literal("autocorrelation"),
  sampler: z.string(),
  t: z.number(),
  lags: z.array(z.number()),
  median_seconds_per_step: z.number().nullable(),
  components: z
    .array(percentileBlock.extend({ component: z.number() }))
    .min(1),
});

export const mpsrfDocument = z.object({
  schema_version: z.number(),
  metric: z.literal("mpsrf"),
  sampler: z.string(),
  checkpoints: z.array(z.number()).min(1),
  r_hat: seriesValues,
  scalar_psrf: percentileBlock,
  median_elapsed_seconds: seriesValues,
});

export const convergenceDocument = z.object({
  schema_version: z.number(),
  metric: z.literal("statistic_convergence"),
  sampler: z.string(),
  checkpoints: z.array(z.number()).min(1),
  mean_error: percentileBlock,
  var_error: percentileBlock,
  median_elapsed_seconds: seriesValues,
});

export type AutocorrDocument = z.infer<typeof autocorrDocument>;
export type MpsrfDocument = z.infer<typeof mpsrfDocument>;
export type ConvergenceDocument = z.infer<typeof convergenceDocument>;
export type PercentileBlock = z.infer<typeof percentileBlock>;

const topLevelKeys: Record<string, string[]> = {
  autocorrelation: ["sampler", "t", "lags", "median_seconds_per_step", "components"],
  mpsrf: ["sampler", "checkpoints", "r_hat", "scalar_psrf", "median_elapsed_seconds"],
  statistic_convergence: ["sampler", "checkpoints", "mean_error", "var_error", "median_elapsed_seconds"],
};

/**
 * Check the envelope every diagnostics document shares: a compatible
 * schema_version, the expected metric tag, and the metric's required keys.
 * Returns the parsed object for the full zod pass.
 */
export function checkEnvelope(raw: unknown, expectedMetric: string, source: string): Record<string, unknown> {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new InputFormatError(`${source}: expected a JSON object`);
  }
  const doc = raw as Record<string, unknown>;
  if (!("schema_version" in doc)) {
    throw new SchemaMismatchError(`${source}: input declares no schema_version`);
  }
  if (doc.schema_version !== SUPPORTED_SCHEMA_VERSION) {
    throw new SchemaMismatchError(
      `${source}: schema_version ${doc.schema_version} unsupported (expected ${SUPPORTED_SCHEMA_VERSION})`,
    );
  }
  if (doc.metric !== expectedMetric) {
    throw new InputFormatError(
      `${source}: input declares metric '${doc.metric}', expected '${expectedMetric}'`,
    );
  }
  const missing = topLevelKeys[expectedMetric].filter((k) => !(k in doc));
  if (missing.length > 0) {
    throw new MissingColumnError(`${source}: missing columns: ${missing.join(", ")}`);
  }
  return doc;
}

export function formatZodError(err: z.ZodError, source: string): InputFormatError {
  const first = err.issues[0];
  const where = first && first.path.length > 0 ? ` at ${first.path.join(".")}` : "";
  const what = first ? first.message : "invalid document";
  return new InputFormatError(`${source}: ${what}${where}`);
}
