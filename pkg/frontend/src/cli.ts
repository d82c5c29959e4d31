import { parseArgs } from "node:util";
import { fileURLToPath } from "node:url";
import { resolve } from "node:path";

import { AXIS_MODES, FIGURE_KINDS, FigureSpec } from "./figure.js";
import { render } from "./render.js";

const USAGE = `usage: truncdir-plots render --kind <kind> --in <path> [--in <path> ...] --out <png> [--axis <mode>]

kinds: ${FIGURE_KINDS.join(", ")}
axis modes: ${AXIS_MODES.join(", ")} (default sample-index)`;

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        kind: { type: "string" },
        in: { type: "string", multiple: true },
        out: { type: "string" },
        axis: { type: "string", default: "sample-index" },
        help: { type: "boolean", default: false },
      },
    });
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n${USAGE}\n`);
    return 2;
  }

  if (parsed.values.help) {
    process.stdout.write(`${USAGE}\n`);
    return 0;
  }
  if (parsed.positionals.length !== 1 || parsed.positionals[0] !== "render") {
    process.stderr.write(`error: expected the 'render' subcommand\n${USAGE}\n`);
    return 2;
  }
  const { kind, out, axis } = parsed.values;
  const inputs = parsed.values.in ?? [];
  if (!kind || !out || inputs.length === 0) {
    process.stderr.write(`error: --kind, --in and --out are required\n${USAGE}\n`);
    return 2;
  }

  const spec: FigureSpec = {
    kind: kind as FigureSpec["kind"],
    axis: axis as FigureSpec["axis"],
    inputs,
    out,
  };
  try {
    const result = render(spec);
    process.stdout.write(`${result.outPath}\n`);
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 2;
  }
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined && fileURLToPath(import.meta.url) === resolve(process.argv[1]);
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
