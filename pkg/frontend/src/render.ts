#!/usr/bin/env node
/**
 * render --csv <file> --kind <name> --out <img.svg>
 *
 * Reads one harness CSV and writes one SVG figure. Nothing is written when
 * the input fails schema validation.
 */

import { readFileSync, writeFileSync } from "fs";
import { parseCsv, SchemaError } from "./csv.js";
import { KINDS, render } from "./kinds.js";

function parseArgs(argv: string[]): Map<string, string> {
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      throw new Error(`malformed arguments near '${key}'`);
    }
    args.set(key.slice(2), value);
  }
  return args;
}

export function main(argv: string[]): number {
  let args: Map<string, string>;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err));
    return 2;
  }
  const csvPath = args.get("csv");
  const kind = args.get("kind");
  const outPath = args.get("out");
  if (!csvPath || !kind || !outPath) {
    console.error(
      "usage: render --csv <file> --kind <name> --out <img.svg>\n" +
        `kinds: ${Object.keys(KINDS).join(", ")}`,
    );
    return 2;
  }
  try {
    const table = parseCsv(readFileSync(csvPath, "utf-8"));
    const svg = render(kind, table);
    writeFileSync(outPath, svg);
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 1;
    }
    throw err;
  }
  console.log(`wrote ${outPath}`);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
