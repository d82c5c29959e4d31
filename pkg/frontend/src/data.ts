import { existsSync, readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { z } from "zod";

import {
  AutocorrDocument,
  ConvergenceDocument,
  InputFormatError,
  MissingColumnError,
  MpsrfDocument,
  SUPPORTED_SCHEMA_VERSION,
  SchemaMismatchError,
  autocorrDocument,
  checkEnvelope,
  convergenceDocument,
  formatZodError,
  mpsrfDocument,
} from "./schema.js";

function readJson(path: string): unknown {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new InputFormatError(`${path}: cannot read input file`);
  }
  try {
    return JSON.parse(text);
  } catch (err) {
    throw new InputFormatError(`${path}: not valid JSON (${(err as Error).message})`);
  }
}

function parseDocument<T>(path: string, metric: string, schema: z.ZodType<T>): T {
  const raw = checkEnvelope(readJson(path), metric, path);
  const result = schema.safeParse(raw);
  if (!result.success) {
    throw formatZodError(result.error, path);
  }
  return result.data;
}

export function loadAutocorr(path: string): AutocorrDocument {
  return parseDocument(path, "autocorrelation", autocorrDocument);
}

export function loadMpsrf(path: string): MpsrfDocument {
  return parseDocument(path, "mpsrf", mpsrfDocument);
}

export function loadConvergence(path: string): ConvergenceDocument {
  return parseDocument(path, "statistic_convergence", convergenceDocument);
}

export interface DensityNode {
  coords: number[];
  logDensity: number;
}

export interface DensityTable {
  dim: number;
  nodes: DensityNode[];
}

function parseCell(token: string): number {
  if (token === "inf") return Infinity;
  if (token === "-inf") return -Infinity;
  if (token === "nan") return NaN;
  const v = Number(token);
  if (token === "" || Number.isNaN(v)) {
    throw new InputFormatError(`unparseable numeric cell '${token}'`);
  }
  return v;
}

/**
 * Load an oracle density dump: columns pi_0..pi_{n-1}, log_density,
 * probability. The sibling oracle.json, when present, must carry a
 * compatible schema_version (the CSV itself declares none).
 */
export function loadDensityTable(path: string): DensityTable {
  const sibling = join(dirname(path), "oracle.json");
  if (existsSync(sibling)) {
    const raw = readJson(sibling);
    const version = (raw as Record<string, unknown>)?.schema_version;
    if (version !== SUPPORTED_SCHEMA_VERSION) {
      throw new SchemaMismatchError(
        `${sibling}: schema_version ${version} unsupported (expected ${SUPPORTED_SCHEMA_VERSION})`,
      );
    }
  }

  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new InputFormatError(`${path}: cannot read input file`);
  }
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length < 2) {
    throw new InputFormatError(`${path}: density table has no data rows`);
  }

  const header = lines[0].split(",");
  let dim = 0;
  while (header[dim] === `pi_${dim}`) dim += 1;
  const missing: string[] = [];
  if (dim === 0) missing.push("pi_0");
  for (const name of ["log_density", "probability"]) {
    if (!header.includes(name)) missing.push(name);
  }
  if (missing.length > 0) {
    throw new MissingColumnError(`${path}: missing columns: ${missing.join(", ")}`);
  }
  const logCol = header.indexOf("log_density");

  const nodes: DensityNode[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new InputFormatError(`${path}:${i + 1}: expected ${header.length} cells, got ${cells.length}`);
    }
    try {
      nodes.push({
        coords: cells.slice(0, dim).map(parseCell),
        logDensity: parseCell(cells[logCol]),
      });
    } catch (err) {
      if (err instanceof InputFormatError) {
        throw new InputFormatError(`${path}:${i + 1}: ${err.message}`);
      }
      throw err;
    }
  }
  return { dim, nodes };
}
